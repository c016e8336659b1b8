#pragma once

#include "fracprox/block_vector.hpp"
#include "fracprox/problem.hpp"
#include "fracprox/solver.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace fracprox {

/// G(x, u) = -F(x) + delta_S(x) + nu_bar ||x - u||^2; +infinity off S.
double merit_G(const FractionalProblem& problem, const BlockVector& x, const BlockVector& u,
               double nu_bar);

/// Largest per-block distance between x_i and the no-inertia update
/// block_prox(i, x, x_i + w_i / (2 tau), tau). Zero at fixed points of the sweep.
double stationarity_residual(const FractionalProblem& problem, const BlockVector& x,
                             double tau, WConvention convention = WConvention::Full);

struct MeritViolation {
  std::size_t n = 0;
  double excess = 0.0;
};

/// Along stored iterates, checks
///   G(x_{n+1}, x_n) + (delta - 2 nu_bar) ||x_{n+1} - x_n||^2 <= G(x_n, x_{n-1})
/// with slack rel_tol * max(1, |G|). Needs SolverConfig::record_iterates.
std::vector<MeritViolation> check_merit_decrease(const FractionalProblem& problem,
                                                 const std::vector<BlockVector>& iterates,
                                                 double delta, double nu_bar, double rel_tol);

enum class RateClass { Finite, Linear, Sublinear, Inconclusive };
std::string to_string(RateClass c);

struct RateFit {
  RateClass classification = RateClass::Inconclusive;
  double slope = 0.0;      // of the selected model
  double r_squared = 0.0;  // of the selected model
  std::size_t tail_start = 0;
  double linear_slope = 0.0;
  double linear_r_squared = 0.0;
  double power_slope = 0.0;
  double power_r_squared = 0.0;
};

struct RateThresholds {
  double max_slope = -1e-4;
  double min_r_squared = 0.95;
  std::size_t min_points = 10;
};

/// Classifies a distance sequence d_n = ||x_n - x*||.
///
/// Exact zeros mean Finite. Otherwise the last `tail_fraction` of the
/// sequence is fitted twice by least squares: log d_n against n (geometric
/// model) and log d_n against log(n + 1) (power model). The model with the
/// larger R^2 wins; it must have slope < max_slope and R^2 >= min_r_squared,
/// otherwise the result is Inconclusive. Throws TooFewPoints when fewer than
/// min_points tail points remain above 1e-14.
RateFit fit_rate(const std::vector<double>& distances, double tail_fraction = 0.5,
                 const RateThresholds& thresholds = {});

/// ||x_n - x_N|| for n = 0..N-1, where x_N is the last iterate.
std::vector<double> distances_to_final(const std::vector<BlockVector>& iterates);
std::vector<double> distances_to(const std::vector<BlockVector>& iterates,
                                 const BlockVector& target);

struct TrialMetrics {
  Vector x_final;
  double objective = 0.0;
  double cpu_seconds = 0.0;
  std::size_t iterations = 0;
};

/// Table row averaged over trials. Sparsity counts entries with |x_j| > 1e-6;
/// sparsity and iterations are rounded to the nearest integer.
struct TrialSummary {
  std::size_t trials = 0;
  long sparsity = 0;
  double objective = 0.0;
  double cpu_seconds = 0.0;
  long iterations = 0;
  double mean_sparsity_exact = 0.0;
  double mean_iterations_exact = 0.0;
};

inline constexpr double kSparsityThreshold = 1e-6;

TrialMetrics metrics_from(const SolverResult& result);
TrialSummary summarize_trial_set(const std::vector<TrialMetrics>& results);

}  // namespace fracprox
