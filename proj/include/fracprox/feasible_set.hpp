#pragma once

#include "fracprox/block_vector.hpp"
#include "fracprox/prox.hpp"
#include "fracprox/rng.hpp"

#include <cstddef>
#include <functional>
#include <string>

namespace fracprox {

/// Per-block constraint set S_i with an exact Euclidean projection.
class FeasibleSet {
 public:
  enum class Kind { Box, Sphere, Sparsity, SphereSparsity, Custom };

  using ProjectionFn = std::function<ProxResult(const Vector&)>;
  using MembershipFn = std::function<bool(const Vector&, double)>;

  static FeasibleSet box(Vector lo, Vector hi);
  static FeasibleSet box(std::size_t dim, double lo, double hi);
  static FeasibleSet sphere(std::size_t dim);
  static FeasibleSet sparsity(std::size_t dim, std::size_t r);
  static FeasibleSet sphere_sparsity(std::size_t dim, std::size_t r);
  static FeasibleSet custom(std::size_t dim, ProjectionFn project, MembershipFn contains);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::size_t sparsity_level() const { return r_; }
  const Vector& lower() const { return lo_; }
  const Vector& upper() const { return hi_; }

  ProxResult project(const Vector& a) const;

  /// Membership predicate. `tol` only loosens the sphere norm test and box
  /// bounds; support sizes are checked exactly.
  bool contains(const Vector& x, double tol = 1e-12) const;

  /// A random member of the set (projection of a Gaussian draw, or a uniform
  /// point for boxes).
  Vector sample(CounterRng& rng) const;

 private:
  FeasibleSet() = default;

  Kind kind_ = Kind::Sphere;
  std::size_t dim_ = 0;
  std::size_t r_ = 0;
  Vector lo_, hi_;
  ProjectionFn custom_project_;
  MembershipFn custom_contains_;
};

std::string to_string(FeasibleSet::Kind kind);

}  // namespace fracprox
