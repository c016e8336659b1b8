// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any hard criterion fails. Criterion 5 is soft: its failure is
// reported but does not change the exit status.

#include "oracles.hpp"

#include "fracprox/baseline.hpp"
#include "fracprox/diagnostics.hpp"
#include "fracprox/instances.hpp"
#include "fracprox/prox.hpp"
#include "fracprox/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>
#include <string>
#include <vector>

using namespace fracprox;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int hard_failures = 0;

void report(int id, const char* title, const Outcome& o, bool soft = false) {
  const char* verdict = o.pass ? "PASS" : (soft ? "SOFT-FAIL" : "FAIL");
  std::printf("%-9s criterion %d: %s -- %s\n", verdict, id, title, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass && !soft) ++hard_failures;
}

template <typename... Args>
std::string fmt(const char* pattern, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

BlockVector single(const Vector& x) { return BlockVector(std::vector<Vector>{x}); }

BlockVector ep_point(double a, double b) {
  Vector v(2);
  v << a, b;
  return BlockVector::unflatten(v, {1, 1});
}

constexpr int kDeskSeeds = 20;

// Desk-scale runs shared by criteria 2, 6 and 7.
struct DeskRuns {
  std::vector<SolverResult> geps, gep, trfm;
  std::vector<FractionalProblem> gep_problems;
};

DeskRuns run_desk() {
  const auto preset = sfda_preset("desk");
  DeskRuns out;
  std::vector<std::future<std::tuple<SolverResult, SolverResult, SolverResult, FractionalProblem>>>
      jobs;
  for (int s = 0; s < kDeskSeeds; ++s) {
    jobs.push_back(std::async(std::launch::async, [preset, s] {
      const auto data = generate_sfda(preset.d, preset.p1, preset.p2, static_cast<std::uint64_t>(s));
      const Vector x0 = sparse_start(preset.d, preset.r);
      const auto cfg = SolverConfig::sfda();
      auto geps = solve(build_geps(data.V_b, data.V_w, preset.r), single(x0), cfg);
      auto gep_problem = build_gep(data.V_b, data.V_w, preset.lambda);
      auto gep_cfg = cfg;
      gep_cfg.record_iterates = true;
      auto gep = solve(gep_problem, single(x0), gep_cfg);
      TrfmConfig tcfg;
      tcfg.r = preset.r;
      auto trfm = trfm_solve(data.V_b, data.V_w, x0, tcfg);
      return std::make_tuple(std::move(geps), std::move(gep), std::move(trfm),
                             std::move(gep_problem));
    }));
  }
  for (auto& j : jobs) {
    auto [geps, gep, trfm, problem] = j.get();
    out.geps.push_back(std::move(geps));
    out.gep.push_back(std::move(gep));
    out.trfm.push_back(std::move(trfm));
    out.gep_problems.push_back(std::move(problem));
  }
  return out;
}

Outcome criterion1() {
  const auto P = build_ep(2, 10.0);
  Outcome o;
  std::ostringstream detail;
  const auto t0 = clock_type::now();
  for (const auto& x0 : {ep_point(0, 0), ep_point(0, 1), ep_point(1, 0), ep_point(10, 10)}) {
    SolverConfig cfg;  // delta = 1, nu = 0, auto tau rule
    // The default step tolerance halts about 1e-6 short of the limit, so the
    // distance target needs a tighter stopping rule.
    cfg.step_tol = 1e-9;
    cfg.max_iter = 6000;
    const auto res = solve(P, x0, cfg);
    const double dist = res.x_final.distance(ep_point(1, 1));
    const double gap = std::abs(res.final_objective() - 6.0);
    o.pass = o.pass && dist <= 1e-6 && gap <= 1e-8 && res.iterations() <= 6000;
    detail << fmt("x0=(%g,%g): %zu it, dist %.1e, |F-6| %.1e; ", x0.block(0)[0], x0.block(1)[0],
                  res.iterations(), dist, gap);
  }
  const double elapsed = seconds_since(t0);
  o.pass = o.pass && elapsed < 1.0;
  detail << fmt("total %.3f s", elapsed);
  o.detail = detail.str();
  return o;
}

Outcome criterion2(const DeskRuns& desk) {
  Outcome o;
  std::size_t runs = 0, bad = 0;
  auto check = [&](const std::vector<IterateRecord>& trace, double delta, double nu_bar) {
    ++runs;
    if (!check_descent(trace, delta, nu_bar, 1e-10).ok()) ++bad;
  };

  // EP from random starts in [0, 10]^2, with and without inertia.
  const auto ep = build_ep(2, 10.0);
  CounterRng rng(2024);
  for (int s = 0; s < kDeskSeeds; ++s) {
    const auto x0 = ep_point(rng.uniform(0, 10), rng.uniform(0, 10));
    const auto cfg = SolverConfig::with_inertia(s % 2 == 0 ? 0.0 : 0.9);
    check(solve(ep, x0, cfg).trace, cfg.delta, cfg.nu_bar);
  }
  // FQP with 5 sphere blocks of dimension 10.
  for (int s = 0; s < kDeskSeeds; ++s) {
    const auto P = build(random_fqp(5, 10, static_cast<std::uint64_t>(s)));
    const auto cfg = SolverConfig::with_inertia(0.5);
    check(solve(P, canonical_start(P), cfg).trace, cfg.delta, cfg.nu_bar);
  }
  const auto sfda = SolverConfig::sfda();
  for (const auto& r : desk.geps) check(r.trace, sfda.delta, sfda.nu_bar);
  for (const auto& r : desk.gep) check(r.trace, sfda.delta, sfda.nu_bar);

  o.pass = bad == 0;
  o.detail = fmt("%zu runs (EP, FQP, GEP, GEPS x %d seeds), %zu with violations", runs,
                 kDeskSeeds, bad);
  return o;
}

Outcome criterion3() {
  const auto t0 = clock_type::now();
  CounterRng rng(3);
  std::size_t cases = 0, value_mismatch = 0, point_mismatch = 0, ties = 0;
  double worst = 0.0;
  for (Eigen::Index d : {6, 10, 12}) {
    for (std::size_t r = 1; r <= static_cast<std::size_t>(d); ++r) {
      for (int k = 0; k < 1000; ++k) {
        Vector a(d);
        for (Eigen::Index j = 0; j < d; ++j) a[j] = rng.normal();
        if (k % 20 == 0) a = a.array().round();  // exact ties and zeros
        const double mu = rng.uniform(0, 2);
        ++cases;

        auto compare = [&](const ProxResult& got, const Vector& want, double got_value,
                           double want_value) {
          const double err = std::abs(got_value - want_value);
          worst = std::max(worst, err);
          if (err > 1e-12 * std::max(1.0, std::abs(want_value))) ++value_mismatch;
          if (got.tie_broken) {
            ++ties;
          } else if ((got.point - want).norm() > 1e-12) {
            ++point_mismatch;
          }
        };

        const auto ps = project_sparsity(a, r);
        const Vector bs = oracles::brute_force_prox(oracles::ProxKind::Sparsity, a, double(r));
        compare(ps, bs, (ps.point - a).squaredNorm(), (bs - a).squaredNorm());

        const auto pss = project_sphere_sparsity(a, r);
        const Vector bss = oracles::brute_force_prox(oracles::ProxKind::SphereSparsity, a, double(r));
        compare(pss, bss, (pss.point - a).squaredNorm(), (bss - a).squaredNorm());

        const auto pl = prox_l0_sphere(a, mu);
        const Vector bl = oracles::brute_force_prox(oracles::ProxKind::L0Sphere, a, mu);
        compare(pl, bl, oracles::l0_objective(a, pl.point, mu), oracles::l0_objective(a, bl, mu));
      }
    }
  }
  const double elapsed = seconds_since(t0);
  Outcome o;
  o.pass = value_mismatch == 0 && point_mismatch == 0 && elapsed < 30.0;
  o.detail = fmt("%zu inputs x 3 maps, worst value gap %.1e, %zu value / %zu point mismatches, "
                 "%zu documented tie-breaks, %.2f s",
                 cases, worst, value_mismatch, point_mismatch, ties, elapsed);
  return o;
}

Outcome criterion4() {
  // x* is the final iterate, so the run is driven well past the default
  // tolerance to keep the reference point from biasing the tail.
  const std::size_t d = 100, r = 10;
  int linear_gep = 0, linear_geps = 0;
  std::ostringstream detail;
  std::vector<std::future<std::pair<RateClass, RateClass>>> jobs;
  for (int s = 0; s < 10; ++s) {
    jobs.push_back(std::async(std::launch::async, [=] {
      const auto data = generate_sfda(d, 100, 100, static_cast<std::uint64_t>(s));
      auto cfg = SolverConfig::sfda();
      cfg.step_tol = 1e-12;
      cfg.record_iterates = true;
      const BlockVector x0 = single(sparse_start(d, r));
      auto classify = [&](const FractionalProblem& P) {
        const auto res = solve(P, x0, cfg);
        try {
          return fit_rate(distances_to_final(res.iterates)).classification;
        } catch (const std::exception&) {
          return RateClass::Inconclusive;
        }
      };
      return std::make_pair(classify(build_gep(data.V_b, data.V_w, kSfdaLambda)),
                            classify(build_geps(data.V_b, data.V_w, r)));
    }));
  }
  for (auto& j : jobs) {
    const auto [gep, geps] = j.get();
    linear_gep += gep == RateClass::Linear;
    linear_geps += geps == RateClass::Linear;
  }
  Outcome o;
  o.pass = linear_gep >= 8 && linear_geps >= 8;
  o.detail = fmt("Linear in %d/10 GEP (lambda %.3f) and %d/10 GEPS (r %zu) seeds at d = %zu",
                 linear_gep, kSfdaLambda, linear_geps, r, d);
  return o;
}

Outcome criterion5() {
  const auto P = build_ep(2, 10.0);
  const auto x0 = ep_point(10, 10);
  const auto plain = solve(P, x0, SolverConfig::with_inertia(0.0));
  const auto fast = solve(P, x0, SolverConfig::with_inertia(0.9));
  Outcome o;
  o.pass = fast.iterations() <= plain.iterations();
  o.detail = fmt("iterations %zu with inertia 0.9 vs %zu without", fast.iterations(),
                 plain.iterations());
  return o;
}

Outcome criterion6(const DeskRuns& desk) {
  const std::size_t r = sfda_preset("desk").r;
  double mean_alg = 0.0, mean_trfm = 0.0;
  std::size_t infeasible = 0, unterminated = 0;
  for (int s = 0; s < kDeskSeeds; ++s) {
    const Vector x = desk.geps[s].x_final.block(0);
    if (std::abs(x.norm() - 1.0) > 1e-10 || count_nonzeros(x) > r) ++infeasible;
    if (desk.geps[s].iterations() > 6000 || desk.trfm[s].iterations() > 6000) ++unterminated;
    mean_alg += desk.geps[s].final_objective() / kDeskSeeds;
    mean_trfm += desk.trfm[s].final_objective() / kDeskSeeds;
  }
  Outcome o;
  o.pass = infeasible == 0 && unterminated == 0 && mean_alg >= mean_trfm - 1e-6;
  o.detail = fmt("d=200 r=10 x %d seeds: mean objective %.4f (algorithm) vs %.4f (TRFM), "
                 "%zu infeasible, %zu over 6000 iterations",
                 kDeskSeeds, mean_alg, mean_trfm, infeasible, unterminated);
  return o;
}

Outcome criterion7(const DeskRuns& desk) {
  const auto cfg = SolverConfig::sfda();
  std::vector<TrialMetrics> metrics;
  std::size_t failures = 0;
  for (int s = 0; s < kDeskSeeds; ++s) {
    const auto& res = desk.gep[s];
    const auto& it = res.iterates;
    const auto& P = desk.gep_problems[s];
    const bool terminated = res.iterations() <= 6000;
    const bool sparse_nonzero = count_nonzeros(res.x_final.block(0), kSparsityThreshold) > 0;
    const double g0 = merit_G(P, it.front(), it.front(), cfg.nu_bar);
    const double gN = merit_G(P, it.back(), it[it.size() - 2], cfg.nu_bar);
    const bool decreased = gN < g0;
    const bool descent = check_descent(res.trace, cfg.delta, cfg.nu_bar, 1e-10).ok();
    if (!(terminated && sparse_nonzero && decreased && descent)) ++failures;
    metrics.push_back(metrics_from(res));
  }
  const auto row = summarize_trial_set(metrics);
  Outcome o;
  o.pass = failures == 0;
  o.detail = fmt("%zu/%d seeds failing; means: sparsity %ld, objective %.4f, cpu %.3f s, "
                 "iterations %ld (reference means at d=2000: 27, 13.7196, 3.1013, 1074)",
                 failures, kDeskSeeds, row.sparsity, row.objective, row.cpu_seconds,
                 row.iterations);
  return o;
}

Outcome criterion8() {
  const auto data = generate_sfda(40, 30, 30, 8);
  std::vector<FractionalProblem> problems{
      build_ep(3, 10.0), build(random_fqp(3, 4, 8)), build_gep(data.V_b, data.V_w, kSfdaLambda),
      build_geps(data.V_b, data.V_w, 5)};
  CounterRng rng(8);
  double worst = 0.0;
  std::size_t bad = 0, count = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto& P = problems[static_cast<std::size_t>(k) % problems.size()];
    std::vector<Vector> blocks;
    for (std::size_t i = 0; i < P.num_blocks(); ++i) blocks.push_back(P.set(i).sample(rng));
    const BlockVector x(blocks);
    const double F = evaluate_F(P, x);
    const double lifted = P.h(x) + evaluate_H(P, x, compute_y(P, x));
    // Relative to the size of the summands, so cancellation between h and
    // the ratios cannot inflate the error measure.
    const double scale = std::max(std::abs(F), std::abs(P.h(x)) + std::abs(F - P.h(x)));
    const double rel = std::abs(F - lifted) / std::max(scale, 1e-300);
    worst = std::max(worst, rel);
    bad += rel > 1e-12;
    ++count;
  }
  Outcome o;
  o.pass = bad == 0;
  o.detail = fmt("%zu random feasible points over EP/FQP/GEP/GEPS, worst relative gap %.1e", count,
                 worst);
  return o;
}

}  // namespace

int main() {
  // Criterion 1 has a wall-clock bound, so it runs before anything parallel.
  const Outcome c1 = criterion1();
  const Outcome c3 = criterion3();
  const Outcome c5 = criterion5();
  const Outcome c8 = criterion8();
  const Outcome c4 = criterion4();
  const DeskRuns desk = run_desk();

  report(1, "EP convergence to (1,1)", c1);
  report(2, "descent invariants on every run", criterion2(desk));
  report(3, "prox maps match support enumeration", c3);
  report(4, "linear-rate regime on GEP and GEPS", c4);
  report(5, "inertia does not slow EP", c5, /*soft=*/true);
  report(6, "SFDA comparison against TRFM", criterion6(desk));
  report(7, "cardinality-regularized desk runs", criterion7(desk));
  report(8, "reformulation identity h + H = F", c8);

  std::printf("%s: %d hard criteria failed\n", hard_failures == 0 ? "OK" : "FAILED", hard_failures);
  return hard_failures == 0 ? 0 : 1;
}
