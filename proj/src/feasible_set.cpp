#include "fracprox/feasible_set.hpp"

#include "fracprox/error.hpp"

#include <cmath>

namespace fracprox {

FeasibleSet FeasibleSet::box(Vector lo, Vector hi) {
  if (lo.size() != hi.size()) {
    throw Error(ErrorCode::DimensionMismatch, "box bounds differ in size");
  }
  if ((lo.array() > hi.array()).any()) {
    throw Error(ErrorCode::InvalidParam, "box requires lo <= hi");
  }
  FeasibleSet s;
  s.kind_ = Kind::Box;
  s.dim_ = static_cast<std::size_t>(lo.size());
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

FeasibleSet FeasibleSet::box(std::size_t dim, double lo, double hi) {
  const auto n = static_cast<Eigen::Index>(dim);
  return box(Vector::Constant(n, lo), Vector::Constant(n, hi));
}

FeasibleSet FeasibleSet::sphere(std::size_t dim) {
  if (dim == 0) throw Error(ErrorCode::InvalidParam, "sphere dimension must be positive");
  FeasibleSet s;
  s.kind_ = Kind::Sphere;
  s.dim_ = dim;
  return s;
}

FeasibleSet FeasibleSet::sparsity(std::size_t dim, std::size_t r) {
  if (r < 1 || r > dim) throw Error(ErrorCode::InvalidParam, "sparsity level must lie in [1, dim]");
  FeasibleSet s;
  s.kind_ = Kind::Sparsity;
  s.dim_ = dim;
  s.r_ = r;
  return s;
}

FeasibleSet FeasibleSet::sphere_sparsity(std::size_t dim, std::size_t r) {
  FeasibleSet s = sparsity(dim, r);
  s.kind_ = Kind::SphereSparsity;
  return s;
}

FeasibleSet FeasibleSet::custom(std::size_t dim, ProjectionFn project, MembershipFn contains) {
  if (!project || !contains) {
    throw Error(ErrorCode::InvalidParam, "custom set needs projection and membership oracles");
  }
  FeasibleSet s;
  s.kind_ = Kind::Custom;
  s.dim_ = dim;
  s.custom_project_ = std::move(project);
  s.custom_contains_ = std::move(contains);
  return s;
}

ProxResult FeasibleSet::project(const Vector& a) const {
  if (static_cast<std::size_t>(a.size()) != dim_) {
    throw Error(ErrorCode::DimensionMismatch, "point does not match set dimension");
  }
  switch (kind_) {
    case Kind::Box: return {project_box(a, lo_, hi_), false};
    case Kind::Sphere: return project_sphere(a);
    case Kind::Sparsity: return project_sparsity(a, r_);
    case Kind::SphereSparsity: return project_sphere_sparsity(a, r_);
    case Kind::Custom: return custom_project_(a);
  }
  return {a, false};
}

bool FeasibleSet::contains(const Vector& x, double tol) const {
  if (static_cast<std::size_t>(x.size()) != dim_ || !x.allFinite()) return false;
  switch (kind_) {
    case Kind::Box:
      return ((x.array() >= lo_.array() - tol) && (x.array() <= hi_.array() + tol)).all();
    case Kind::Sphere: return std::abs(x.norm() - 1.0) <= tol;
    case Kind::Sparsity: return count_nonzeros(x) <= r_;
    case Kind::SphereSparsity:
      return std::abs(x.norm() - 1.0) <= tol && count_nonzeros(x) <= r_;
    case Kind::Custom: return custom_contains_(x, tol);
  }
  return false;
}

Vector FeasibleSet::sample(CounterRng& rng) const {
  const auto n = static_cast<Eigen::Index>(dim_);
  if (kind_ == Kind::Box) {
    Vector x(n);
    for (Eigen::Index j = 0; j < n; ++j) x[j] = rng.uniform(lo_[j], hi_[j]);
    return x;
  }
  Vector g(n);
  for (Eigen::Index j = 0; j < n; ++j) g[j] = rng.normal();
  if (kind_ == Kind::Sparsity) {
    // Random support size as well, so sparse samples are not all r-sparse.
    const auto k = 1 + rng.below(r_);
    return project_sparsity(g, k).point;
  }
  return project(g).point;
}

std::string to_string(FeasibleSet::Kind kind) {
  switch (kind) {
    case FeasibleSet::Kind::Box: return "box";
    case FeasibleSet::Kind::Sphere: return "sphere";
    case FeasibleSet::Kind::Sparsity: return "sparsity";
    case FeasibleSet::Kind::SphereSparsity: return "sphere_sparsity";
    case FeasibleSet::Kind::Custom: return "custom";
  }
  return "unknown";
}

}  // namespace fracprox
