#include "fracprox/diagnostics.hpp"

#include "fracprox/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fracprox {

namespace {

struct LineFit {
  double slope = 0.0;
  double r_squared = 0.0;
};

LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double dx = xs[k] - mx, dy = ys[k] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  // A constant response is fitted exactly by a flat line.
  fit.r_squared = syy > 0.0 && sxx > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0)
                                         : (syy == 0.0 ? 1.0 : 0.0);
  return fit;
}

}  // namespace

double merit_G(const FractionalProblem& problem, const BlockVector& x, const BlockVector& u,
               double nu_bar) {
  if (!problem.is_feasible(x)) return std::numeric_limits<double>::infinity();
  return -evaluate_F(problem, x) + nu_bar * x.squared_distance(u);
}

double stationarity_residual(const FractionalProblem& problem, const BlockVector& x,
                             double tau, WConvention convention) {
  const Vector y = compute_y(problem, x);
  const BlockVector w = compute_w(problem, x, y, convention);
  double worst = 0.0;
  for (std::size_t i = 0; i < problem.num_blocks(); ++i) {
    const Vector center = x.block(i) + w.block(i) / (2.0 * tau);
    const Vector p = problem.block_prox(i, x, center, tau);
    worst = std::max(worst, (p - x.block(i)).norm());
  }
  return worst;
}

std::vector<MeritViolation> check_merit_decrease(const FractionalProblem& problem,
                                                 const std::vector<BlockVector>& iterates,
                                                 double delta, double nu_bar, double rel_tol) {
  std::vector<MeritViolation> out;
  if (iterates.size() < 2) return out;
  const double gap = delta - 2.0 * nu_bar;
  // x_{-1} = x_0.
  double prev = merit_G(problem, iterates[0], iterates[0], nu_bar);
  for (std::size_t n = 0; n + 1 < iterates.size(); ++n) {
    const double cur = merit_G(problem, iterates[n + 1], iterates[n], nu_bar);
    const double lhs = cur + gap * iterates[n + 1].squared_distance(iterates[n]);
    const double slack = rel_tol * std::max({1.0, std::abs(cur), std::abs(prev)});
    if (lhs - prev > slack) out.push_back({n, lhs - prev});
    prev = cur;
  }
  return out;
}

std::string to_string(RateClass c) {
  switch (c) {
    case RateClass::Finite: return "Finite";
    case RateClass::Linear: return "Linear";
    case RateClass::Sublinear: return "Sublinear";
    case RateClass::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

RateFit fit_rate(const std::vector<double>& distances, double tail_fraction,
                 const RateThresholds& thresholds) {
  if (!(tail_fraction > 0.0) || tail_fraction > 1.0) {
    throw Error(ErrorCode::InvalidParam, "tail_fraction must lie in (0, 1]");
  }
  RateFit fit;
  const auto first_zero =
      std::find_if(distances.begin(), distances.end(), [](double d) { return d <= 0.0; });
  if (first_zero != distances.end()) {
    fit.classification = RateClass::Finite;
    fit.tail_start = static_cast<std::size_t>(first_zero - distances.begin());
    fit.r_squared = 1.0;
    return fit;
  }

  const std::size_t n = distances.size();
  const auto tail_len = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n)));
  fit.tail_start = n - std::min(n, tail_len);

  std::vector<double> idx, log_idx, log_d;
  for (std::size_t k = fit.tail_start; k < n; ++k) {
    if (distances[k] <= 1e-14) continue;
    idx.push_back(static_cast<double>(k));
    log_idx.push_back(std::log(static_cast<double>(k) + 1.0));
    log_d.push_back(std::log(distances[k]));
  }
  if (idx.size() < thresholds.min_points) {
    throw Error(ErrorCode::TooFewPoints,
                std::to_string(idx.size()) + " usable tail points, need " +
                    std::to_string(thresholds.min_points));
  }

  const LineFit geometric = least_squares(idx, log_d);
  const LineFit power = least_squares(log_idx, log_d);
  fit.linear_slope = geometric.slope;
  fit.linear_r_squared = geometric.r_squared;
  fit.power_slope = power.slope;
  fit.power_r_squared = power.r_squared;

  const bool geometric_wins = geometric.r_squared >= power.r_squared;
  const LineFit& best = geometric_wins ? geometric : power;
  fit.slope = best.slope;
  fit.r_squared = best.r_squared;
  if (best.slope < thresholds.max_slope && best.r_squared >= thresholds.min_r_squared) {
    fit.classification = geometric_wins ? RateClass::Linear : RateClass::Sublinear;
  }
  return fit;
}

std::vector<double> distances_to(const std::vector<BlockVector>& iterates,
                                 const BlockVector& target) {
  std::vector<double> out;
  out.reserve(iterates.size());
  for (const auto& x : iterates) out.push_back(x.distance(target));
  return out;
}

std::vector<double> distances_to_final(const std::vector<BlockVector>& iterates) {
  if (iterates.empty()) return {};
  auto out = distances_to(iterates, iterates.back());
  out.pop_back();
  return out;
}

TrialMetrics metrics_from(const SolverResult& result) {
  TrialMetrics m;
  m.x_final = result.x_final.flatten();
  m.objective = result.final_objective();
  m.cpu_seconds = result.elapsed;
  m.iterations = result.iterations();
  return m;
}

TrialSummary summarize_trial_set(const std::vector<TrialMetrics>& results) {
  if (results.empty()) throw Error(ErrorCode::EmptyInput, "no trials to summarize");
  TrialSummary s;
  s.trials = results.size();
  double sparsity = 0.0, iterations = 0.0;
  for (const auto& r : results) {
    sparsity += static_cast<double>(count_nonzeros(r.x_final, kSparsityThreshold));
    s.objective += r.objective;
    s.cpu_seconds += r.cpu_seconds;
    iterations += static_cast<double>(r.iterations);
  }
  const auto n = static_cast<double>(results.size());
  s.mean_sparsity_exact = sparsity / n;
  s.mean_iterations_exact = iterations / n;
  s.sparsity = std::lround(s.mean_sparsity_exact);
  s.iterations = std::lround(s.mean_iterations_exact);
  s.objective /= n;
  s.cpu_seconds /= n;
  return s;
}

}  // namespace fracprox
