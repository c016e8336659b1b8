#pragma once

#include "fracprox/block_vector.hpp"

#include <cstddef>

namespace fracprox {

/// Output of a (possibly set-valued) projection or proximal map.
/// `tie_broken` is set when several distinct minimizers existed and the
/// deterministic selection rule picked one of them.
struct ProxResult {
  Vector point;
  bool tie_broken = false;
};

/// Inputs with norm at or below this are treated as the zero vector by the
/// sphere-type projections.
inline constexpr double kZeroNormThreshold = 1e-300;

/// Componentwise clamp onto [lo, hi].
Vector project_box(const Vector& a, const Vector& lo, const Vector& hi);

/// a / ||a||; the zero vector maps to e_1 with tie_broken set.
ProxResult project_sphere(const Vector& a);

/// Keeps the r entries of largest magnitude (lowest index wins ties).
ProxResult project_sparsity(const Vector& a, std::size_t r);

/// Projection onto the r-sparse unit sphere: normalized hard threshold, or
/// e_1 for a = 0.
ProxResult project_sphere_sparsity(const Vector& a, std::size_t r);

/// argmax over ||x|| = 1 of <a, x> - mu * ||x||_0.
///
/// With |a| sorted in decreasing order and S_k the sum of the k largest
/// squared entries, the best point with support size k is the normalized
/// restriction of a to those entries and scores sqrt(S_k) - mu * k. The
/// smallest maximizing k is selected.
ProxResult prox_l0_sphere(const Vector& a, double mu);

/// Support size ||x||_0 counting entries with |x_j| > threshold.
std::size_t count_nonzeros(const Vector& x, double threshold = 0.0);

}  // namespace fracprox
