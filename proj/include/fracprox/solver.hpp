#pragma once

#include "fracprox/block_vector.hpp"
#include "fracprox/problem.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace fracprox {

/// Proximal weight selection.
///  Auto:   tau = delta + max_i (y_i alpha_i + y_i^2 beta_i / 2), the smallest
///          admissible value.
///  Sfda:   tau = delta + max_i y_i^2 beta_i / 2. For a single Rayleigh
///          quotient x'Ax / x'Bx with beta = 2 lambda_max(B) this is
///          delta + x'Ax / (x'Bx)^2 * lambda_max(B). Requires alpha_i = 0.
///  Fixed:  a constant, checked against the lower bound.
///  Custom: user oracle, checked against the lower bound.
struct TauRule {
  enum class Kind { Auto, Sfda, Fixed, Custom };
  using Oracle = std::function<double(const FractionalProblem&, const BlockVector&,
                                      const Vector&)>;

  Kind kind = Kind::Auto;
  double value = 0.0;
  Oracle custom;

  static TauRule automatic() { return {}; }
  static TauRule sfda() { return {Kind::Sfda, 0.0, {}}; }
  static TauRule fixed(double tau) { return {Kind::Fixed, tau, {}}; }
  static TauRule from(Oracle oracle) { return {Kind::Custom, 0.0, std::move(oracle)}; }
};

/// Inertia selection; the result is always capped at nu_bar / tau.
///  Scaled: nu = inertia_scale * delta / (2 tau).
///  Cap:    nu = nu_bar / tau.
struct NuRule {
  enum class Kind { Scaled, Cap, Custom };
  using Oracle = std::function<double(std::size_t n, double tau)>;

  Kind kind = Kind::Scaled;
  Oracle custom;
};

struct SolverConfig {
  double delta = 1.0;
  double nu_bar = 0.0;
  double inertia_scale = 0.0;
  NuRule nu_rule{};
  TauRule tau_rule{};
  std::size_t max_iter = 6000;
  double step_tol = 1e-6;
  std::uint64_t seed = 0;
  WConvention w_convention = WConvention::Full;
  /// Reject tau below the admissibility bound. Disabling this voids the
  /// descent guarantee and exists for negative-control experiments.
  bool enforce_tau_bound = true;
  /// Keep every iterate in SolverResult::iterates.
  bool record_iterates = false;

  /// Scaled inertia with nu_bar = scale * delta / 2, so the cap never binds.
  static SolverConfig with_inertia(double scale);
  /// Cap rule nu = nu_bar / tau with the SFDA tau rule.
  static SolverConfig sfda(double nu_bar = 0.4999);

  /// Throws InvalidParam unless 0 <= nu_bar < delta / 2, max_iter >= 1, ...
  void validate() const;
};

struct SolverState {
  std::size_t n = 0;
  BlockVector x_prev;
  BlockVector x_curr;
  Vector y;
  double tau = 0.0;
  double nu = 0.0;

  /// State at n = 0 with x_{-1} = x_0.
  static SolverState initial(BlockVector x0);
};

/// One trace row. Row n holds F(x_n), theta_n = F(x_n) - nu_bar ||x_n - x_{n-1}||^2,
/// the parameters used to produce x_{n+1}, and ||x_{n+1} - x_n||. The last row
/// of a finished solve describes x_N with step_norm = 0 and the parameters
/// that the next iteration would use.
struct IterateRecord {
  std::size_t n = 0;
  double F = 0.0;
  double step_norm = 0.0;
  double theta = 0.0;
  double tau = 0.0;
  double nu = 0.0;
  double elapsed = 0.0;
};

enum class SolverStatus { StepTolReached, MaxIterReached };
std::string to_string(SolverStatus status);

struct SolverResult {
  BlockVector x_final;
  SolverStatus status = SolverStatus::MaxIterReached;
  std::vector<IterateRecord> trace;
  std::vector<BlockVector> iterates;
  double residual = 0.0;
  double max_tau = 0.0;
  double elapsed = 0.0;

  /// Number of completed update sweeps.
  std::size_t iterations() const { return trace.empty() ? 0 : trace.size() - 1; }
  double final_objective() const {
    return trace.empty() ? std::numeric_limits<double>::quiet_NaN() : trace.back().F;
  }
};

/// Step 1 lower bound delta + max_i (y_i alpha_i + y_i^2 beta_i / 2).
double tau_lower_bound(const FractionalProblem& problem, const Vector& y, double delta);

/// tau_n from the configured rule. Throws TauBelowBound when a fixed or
/// custom value is inadmissible and the bound is enforced.
double step_tau(const FractionalProblem& problem, const BlockVector& x, const Vector& y,
                const SolverConfig& config);

/// nu_n from the configured rule, clipped to [0, nu_bar / tau].
double step_nu(const SolverConfig& config, std::size_t n, double tau);

/// One Gauss-Seidel sweep over blocks 1..m. Blocks before i are taken at
/// their new values, blocks after i at their old ones; w and y are computed
/// once at x_n.
std::pair<SolverState, IterateRecord> iterate(const FractionalProblem& problem,
                                              const SolverState& state,
                                              const SolverConfig& config);

/// Runs sweeps from x_{-1} = x_0 until ||x_{n+1} - x_n|| < step_tol or
/// max_iter sweeps.
SolverResult solve(const FractionalProblem& problem, const BlockVector& x0,
                   const SolverConfig& config);

struct DescentViolation {
  std::size_t n = 0;
  char kind = 'i';  // 'i': sufficient increase, 't': theta monotonicity, 's': summability
  double excess = 0.0;
};

struct DescentReport {
  std::vector<DescentViolation> violations;
  double step_square_sum = 0.0;
  double summability_bound = 0.0;
  bool ok() const { return violations.empty(); }
};

/// Checks, for consecutive trace rows,
///   F(x_n) - nu_bar ||x_n - x_{n-1}||^2 <= F(x_{n+1}) - (delta - nu_bar) ||x_{n+1} - x_n||^2,
/// theta_n <= theta_{n+1}, and the summability bound
///   sum ||x_{n+1} - x_n||^2 <= (theta_N - theta_0) / (delta - 2 nu_bar),
/// each with slack rel_tol * max(1, |F|).
DescentReport check_descent(const std::vector<IterateRecord>& trace, double delta,
                            double nu_bar, double rel_tol);

/// CSV header "n,F,step_norm,theta,tau,nu,elapsed" and one row per record.
void write_trace_csv(std::ostream& out, const std::vector<IterateRecord>& trace);

}  // namespace fracprox
