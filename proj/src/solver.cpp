#include "fracprox/solver.hpp"

#include "fracprox/diagnostics.hpp"
#include "fracprox/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <string>

namespace fracprox {

SolverConfig SolverConfig::with_inertia(double scale) {
  SolverConfig c;
  c.inertia_scale = scale;
  c.nu_bar = scale * c.delta / 2.0;
  c.nu_rule.kind = NuRule::Kind::Scaled;
  return c;
}

SolverConfig SolverConfig::sfda(double nu_bar) {
  SolverConfig c;
  c.nu_bar = nu_bar;
  c.nu_rule.kind = NuRule::Kind::Cap;
  c.tau_rule = TauRule::sfda();
  c.w_convention = WConvention::Full;
  return c;
}

void SolverConfig::validate() const {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidParam, "delta must be positive");
  if (!(nu_bar >= 0.0) || !(nu_bar < delta / 2.0)) {
    throw Error(ErrorCode::InvalidParam, "nu_bar must lie in [0, delta/2)");
  }
  if (!(inertia_scale >= 0.0) || !(inertia_scale < 1.0)) {
    throw Error(ErrorCode::InvalidParam, "inertia_scale must lie in [0, 1)");
  }
  if (max_iter < 1) throw Error(ErrorCode::InvalidParam, "max_iter must be at least 1");
  if (!(step_tol >= 0.0)) throw Error(ErrorCode::InvalidParam, "step_tol must be nonnegative");
  if (tau_rule.kind == TauRule::Kind::Fixed && !(tau_rule.value > 0.0)) {
    throw Error(ErrorCode::InvalidParam, "fixed tau must be positive");
  }
  if (tau_rule.kind == TauRule::Kind::Custom && !tau_rule.custom) {
    throw Error(ErrorCode::InvalidParam, "custom tau rule needs an oracle");
  }
  if (nu_rule.kind == NuRule::Kind::Custom && !nu_rule.custom) {
    throw Error(ErrorCode::InvalidParam, "custom nu rule needs an oracle");
  }
}

SolverState SolverState::initial(BlockVector x0) {
  SolverState s;
  s.x_prev = x0;
  s.x_curr = std::move(x0);
  return s;
}

std::string to_string(SolverStatus status) {
  return status == SolverStatus::StepTolReached ? "StepTolReached" : "MaxIterReached";
}

double tau_lower_bound(const FractionalProblem& problem, const Vector& y, double delta) {
  double worst = 0.0;
  for (std::size_t i = 0; i < problem.num_blocks(); ++i) {
    const double yi = y[static_cast<Eigen::Index>(i)];
    const auto& t = problem.term(i);
    worst = std::max(worst, yi * t.alpha + 0.5 * yi * yi * t.beta);
  }
  return delta + worst;
}

double step_tau(const FractionalProblem& problem, const BlockVector& x, const Vector& y,
                const SolverConfig& config) {
  const double bound = tau_lower_bound(problem, y, config.delta);
  double tau = bound;
  switch (config.tau_rule.kind) {
    case TauRule::Kind::Auto: return bound;
    case TauRule::Kind::Sfda: {
      double worst = 0.0;
      for (std::size_t i = 0; i < problem.num_blocks(); ++i) {
        if (problem.term(i).alpha != 0.0) {
          throw Error(ErrorCode::InvalidParam, "sfda tau rule requires alpha_i = 0",
                      static_cast<int>(i));
        }
        const double yi = y[static_cast<Eigen::Index>(i)];
        worst = std::max(worst, 0.5 * yi * yi * problem.term(i).beta);
      }
      return config.delta + worst;
    }
    case TauRule::Kind::Fixed: tau = config.tau_rule.value; break;
    case TauRule::Kind::Custom: tau = config.tau_rule.custom(problem, x, y); break;
  }
  if (!std::isfinite(tau) || !(tau > 0.0)) {
    throw Error(ErrorCode::TauBelowBound, "tau must be positive and finite");
  }
  if (config.enforce_tau_bound && tau < bound) {
    throw Error(ErrorCode::TauBelowBound,
                "tau = " + std::to_string(tau) + " below bound " + std::to_string(bound));
  }
  return tau;
}

double step_nu(const SolverConfig& config, std::size_t n, double tau) {
  const double cap = config.nu_bar / tau;
  double nu = 0.0;
  switch (config.nu_rule.kind) {
    case NuRule::Kind::Scaled: nu = config.inertia_scale * config.delta / (2.0 * tau); break;
    case NuRule::Kind::Cap: nu = cap; break;
    case NuRule::Kind::Custom: nu = config.nu_rule.custom(n, tau); break;
  }
  return std::clamp(nu, 0.0, cap);
}

std::pair<SolverState, IterateRecord> iterate(const FractionalProblem& problem,
                                              const SolverState& state,
                                              const SolverConfig& config) {
  const BlockVector& x = state.x_curr;
  problem.check_layout(x);

  const Vector y = compute_y(problem, x);
  const double tau = step_tau(problem, x, y, config);
  const double nu = step_nu(config, state.n, tau);
  const BlockVector w = compute_w(problem, x, y, config.w_convention);

  BlockVector next = x;
  for (std::size_t i = 0; i < problem.num_blocks(); ++i) {
    const Vector z = x.block(i) + nu * (x.block(i) - state.x_prev.block(i));
    const Vector center = z + w.block(i) / (2.0 * tau);
    Vector xi = problem.block_prox(i, next, center, tau);
    if (!problem.set(i).contains(xi)) {
      throw Error(ErrorCode::InfeasibleBlock, "block_prox left the feasible set",
                  static_cast<int>(i));
    }
    next.set_block(i, xi);
  }

  IterateRecord rec;
  rec.n = state.n;
  rec.F = evaluate_F(problem, x);
  rec.step_norm = next.distance(x);
  rec.theta = rec.F - config.nu_bar * x.squared_distance(state.x_prev);
  rec.tau = tau;
  rec.nu = nu;

  SolverState out;
  out.n = state.n + 1;
  out.x_prev = x;
  out.x_curr = std::move(next);
  out.y = y;
  out.tau = tau;
  out.nu = nu;
  return {std::move(out), rec};
}

SolverResult solve(const FractionalProblem& problem, const BlockVector& x0,
                   const SolverConfig& config) {
  config.validate();
  problem.check_layout(x0);
  for (std::size_t i = 0; i < problem.num_blocks(); ++i) {
    if (!problem.set(i).contains(x0.block(i))) {
      throw Error(ErrorCode::InfeasibleBlock, "initial point is infeasible",
                  static_cast<int>(i));
    }
  }

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto seconds = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  SolverResult result;
  SolverState state = SolverState::initial(x0);
  if (config.record_iterates) result.iterates.push_back(x0);
  result.status = SolverStatus::MaxIterReached;

  while (state.n < config.max_iter) {
    auto [next, rec] = iterate(problem, state, config);
    rec.elapsed = seconds();
    result.max_tau = std::max(result.max_tau, rec.tau);
    const bool converged = rec.step_norm < config.step_tol;
    result.trace.push_back(rec);
    state = std::move(next);
    if (config.record_iterates) result.iterates.push_back(state.x_curr);
    if (converged) {
      result.status = SolverStatus::StepTolReached;
      break;
    }
  }

  // Closing row for x_N.
  const Vector y = compute_y(problem, state.x_curr);
  IterateRecord last;
  last.n = state.n;
  last.F = evaluate_F(problem, state.x_curr);
  last.theta = last.F - config.nu_bar * state.x_curr.squared_distance(state.x_prev);
  last.tau = step_tau(problem, state.x_curr, y, config);
  last.nu = step_nu(config, state.n, last.tau);
  last.elapsed = seconds();
  result.trace.push_back(last);

  result.residual =
      stationarity_residual(problem, state.x_curr, last.tau, config.w_convention);
  result.x_final = std::move(state.x_curr);
  result.elapsed = seconds();
  return result;
}

DescentReport check_descent(const std::vector<IterateRecord>& trace, double delta,
                            double nu_bar, double rel_tol) {
  DescentReport report;
  if (trace.size() < 2) return report;

  for (std::size_t n = 0; n + 1 < trace.size(); ++n) {
    const auto& cur = trace[n];
    const auto& nxt = trace[n + 1];
    const double s2 = cur.step_norm * cur.step_norm;
    const double slack = rel_tol * std::max({1.0, std::abs(cur.F), std::abs(nxt.F)});
    report.step_square_sum += s2;

    const double increase = cur.theta - (nxt.F - (delta - nu_bar) * s2);
    if (increase > slack) report.violations.push_back({n, 'i', increase});
    const double theta_drop = cur.theta - nxt.theta;
    if (theta_drop > slack) report.violations.push_back({n, 't', theta_drop});
  }

  const double gap = delta - 2.0 * nu_bar;
  if (gap > 0.0) {
    const double theta_gain = trace.back().theta - trace.front().theta;
    report.summability_bound = theta_gain / gap;
    const double slack =
        rel_tol * std::max({1.0, std::abs(trace.front().F), std::abs(trace.back().F)}) *
        static_cast<double>(trace.size()) / gap;
    const double excess = report.step_square_sum - report.summability_bound;
    if (excess > slack) {
      report.violations.push_back({trace.size() - 1, 's', excess});
    }
  }
  return report;
}

void write_trace_csv(std::ostream& out, const std::vector<IterateRecord>& trace) {
  out << "n,F,step_norm,theta,tau,nu,elapsed\n";
  const auto old_precision = out.precision(17);
  for (const auto& r : trace) {
    out << r.n << ',' << r.F << ',' << r.step_norm << ',' << r.theta << ',' << r.tau << ','
        << r.nu << ',' << r.elapsed << '\n';
  }
  out.precision(old_precision);
}

}  // namespace fracprox
