#pragma once

// Independent reference computations used only by the test suites. None of
// these call into the library's prox or solver code paths.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <utility>

namespace oracles {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ProxKind { Sparsity, SphereSparsity, L0Sphere };

inline constexpr std::size_t kMaxBruteForceDim = 20;

/// Exact optimum by enumerating every support:
///  Sparsity:       argmin ||x - a|| over ||x||_0 <= r         (param = r)
///  SphereSparsity: argmin ||x - a|| over ||x|| = 1, ||x||_0 <= r
///  L0Sphere:       argmax <a, x> - mu ||x||_0 over ||x|| = 1   (param = mu)
/// Throws std::length_error above kMaxBruteForceDim.
Vector brute_force_prox(ProxKind kind, const Vector& a, double param);

double l0_objective(const Vector& a, const Vector& x, double mu);

Vector central_difference(const std::function<double(const Vector&)>& fn, const Vector& x,
                          double h = 1e-6);

/// argmax of fn over the grid lo, lo + step, ..., hi.
double grid_argmax(const std::function<double(double)>& fn, double lo, double hi, double step);

/// Best r-sparse generalized Rayleigh quotient and its maximizer, by
/// enumerating supports of size exactly r.
std::pair<double, Vector> best_sparse_rayleigh(const Matrix& A, const Matrix& B, std::size_t r);

/// Maximizer of x'Qx + b'x on the unit circle by an angular grid plus
/// golden-section refinement around the best grid point (d = 2 only).
Vector circle_argmax(const Matrix& Q, const Vector& b, std::size_t grid = 20000);

}  // namespace oracles
