#include "fracprox/prox.hpp"

#include "fracprox/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace fracprox {

namespace {

// Indices sorted by decreasing |a_j|; equal magnitudes keep index order.
std::vector<Eigen::Index> magnitude_order(const Vector& a) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(a.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index i, Eigen::Index j) {
    return std::abs(a[i]) > std::abs(a[j]);
  });
  return idx;
}

void check_sparsity_level(const Vector& a, std::size_t r) {
  if (r < 1 || r > static_cast<std::size_t>(a.size())) {
    throw Error(ErrorCode::InvalidParam,
                "sparsity level " + std::to_string(r) + " outside [1, " +
                    std::to_string(a.size()) + "]");
  }
}

Vector first_basis_vector(Eigen::Index dim) {
  Vector e = Vector::Zero(dim);
  if (dim > 0) e[0] = 1.0;
  return e;
}

// True when keeping the top-k entries is ambiguous: a nonzero magnitude is
// shared across the cut.
bool cut_is_tied(const Vector& a, const std::vector<Eigen::Index>& order,
                 std::size_t k) {
  if (k == 0 || k >= order.size()) return false;
  const double last_kept = std::abs(a[order[k - 1]]);
  const double first_dropped = std::abs(a[order[k]]);
  return last_kept > 0.0 && last_kept == first_dropped;
}

}  // namespace

Vector project_box(const Vector& a, const Vector& lo, const Vector& hi) {
  if (a.size() != lo.size() || a.size() != hi.size()) {
    throw Error(ErrorCode::DimensionMismatch, "box bounds and point differ in size");
  }
  return a.cwiseMax(lo).cwiseMin(hi);
}

ProxResult project_sphere(const Vector& a) {
  const double norm = a.norm();
  if (norm <= kZeroNormThreshold) return {first_basis_vector(a.size()), true};
  return {a / norm, false};
}

ProxResult project_sparsity(const Vector& a, std::size_t r) {
  check_sparsity_level(a, r);
  const auto order = magnitude_order(a);
  Vector out = Vector::Zero(a.size());
  for (std::size_t k = 0; k < r; ++k) out[order[k]] = a[order[k]];
  return {out, cut_is_tied(a, order, r)};
}

ProxResult project_sphere_sparsity(const Vector& a, std::size_t r) {
  check_sparsity_level(a, r);
  if (a.norm() <= kZeroNormThreshold) return {first_basis_vector(a.size()), true};
  auto res = project_sparsity(a, r);
  res.point /= res.point.norm();
  return res;
}

ProxResult prox_l0_sphere(const Vector& a, double mu) {
  if (!(mu >= 0.0)) {
    throw Error(ErrorCode::InvalidParam, "l0 weight must be nonnegative");
  }
  if (a.norm() <= kZeroNormThreshold) return {first_basis_vector(a.size()), true};

  const auto order = magnitude_order(a);
  const std::size_t d = order.size();

  std::vector<double> cumulative(d);
  std::vector<double> score(d);
  double acc = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    acc += a[order[k]] * a[order[k]];
    cumulative[k] = acc;
    score[k] = std::sqrt(acc) - mu * static_cast<double>(k + 1);
  }

  std::size_t best = 0;
  for (std::size_t k = 1; k < d; ++k)
    if (score[k] > score[best]) best = k;

  // Another support size reaching the same score with a different point.
  const double tie_tol = 1e-14 * std::max(1.0, std::abs(score[best]));
  bool tie = false;
  for (std::size_t k = 0; k < d; ++k) {
    if (k != best && std::abs(score[k] - score[best]) <= tie_tol &&
        cumulative[k] != cumulative[best]) {
      tie = true;
    }
  }
  tie = tie || cut_is_tied(a, order, best + 1);

  Vector out = Vector::Zero(a.size());
  for (std::size_t k = 0; k <= best; ++k) out[order[k]] = a[order[k]];
  out /= std::sqrt(cumulative[best]);
  return {out, tie};
}

std::size_t count_nonzeros(const Vector& x, double threshold) {
  std::size_t n = 0;
  for (Eigen::Index j = 0; j < x.size(); ++j)
    if (std::abs(x[j]) > threshold) ++n;
  return n;
}

}  // namespace fracprox
