// fracprox command-line driver: solve, bench, compare and export.

#include "fracprox/baseline.hpp"
#include "fracprox/diagnostics.hpp"
#include "fracprox/error.hpp"
#include "fracprox/instances.hpp"
#include "fracprox/prox.hpp"
#include "fracprox/rng.hpp"
#include "fracprox/serialize.hpp"
#include "fracprox/solver.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace fracprox;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Configuration problems detected before any solve starts.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every field is optional so that config files and flags can be layered.
#define RUNSPEC_FIELDS(X)                                                            \
  X(instance) X(instance_file) X(preset) X(m) X(gamma) X(d) X(r) X(lambda) X(p1)     \
  X(p2) X(x0) X(trials) X(seed) X(seeds) X(inertia) X(delta) X(nu_bar) X(tau_rule) \
  X(max_iter) X(step_tol) X(w_convention) X(out) X(format) X(baseline) X(jobs)      \
  X(left) X(right)

struct RunSpec {
  std::optional<std::string> instance, instance_file, preset, x0, tau_rule, w_convention, out,
      format, baseline, left, right;
  std::optional<std::size_t> m, d, r, p1, p2, trials, max_iter, jobs;
  std::optional<double> gamma, lambda, inertia, delta, nu_bar, step_tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<std::uint64_t>> seeds;
};

void merge(RunSpec& base, const RunSpec& over) {
#define MERGE_FIELD(f) \
  if (over.f) base.f = over.f;
  RUNSPEC_FIELDS(MERGE_FIELD)
#undef MERGE_FIELD
}

RunSpec load_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::exception& e) {
    throw UsageError("config file is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");

  static const std::set<std::string> known = {
#define NAME_FIELD(f) #f,
      RUNSPEC_FIELDS(NAME_FIELD)
#undef NAME_FIELD
          "command"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw UsageError("unknown config key '" + key + "'");
  }
  if (j.contains("command") && j["command"] != command) {
    throw UsageError("config file is for command '" + j["command"].dump() + "'");
  }

  RunSpec spec;
  try {
#define LOAD_FIELD(f) \
  if (j.contains(#f)) spec.f = j.at(#f).get<decltype(spec.f)::value_type>();
    RUNSPEC_FIELDS(LOAD_FIELD)
#undef LOAD_FIELD
  } catch (const Json::exception& e) {
    throw UsageError("config file has a field of the wrong type: " + std::string(e.what()));
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Tables written as CSV or as a JSON array of row objects.

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<Json>> rows;
};

std::string csv_cell(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) {
    std::ostringstream s;
    s.precision(17);
    s << v.get<double>();
    return s.str();
  }
  return v.dump();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

void write_table(const fs::path& dir, const std::string& stem, const Table& t,
                 const std::string& format) {
  std::ostringstream s;
  if (format == "json") {
    Json arr = Json::array();
    for (const auto& row : t.rows) {
      Json obj;
      for (std::size_t k = 0; k < t.header.size(); ++k) obj[t.header[k]] = row[k];
      arr.push_back(obj);
    }
    s << arr.dump(2) << '\n';
  } else {
    for (std::size_t k = 0; k < t.header.size(); ++k) s << (k ? "," : "") << t.header[k];
    s << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t k = 0; k < row.size(); ++k) s << (k ? "," : "") << csv_cell(row[k]);
      s << '\n';
    }
  }
  write_file(dir / (stem + "." + format), s.str());
}

// ---------------------------------------------------------------------------
// Instance and solver configuration.

struct Instance {
  InstanceSpec spec;
  std::optional<FractionalProblem> problem;
  BlockVector x0;
  std::optional<SfdaData> data;
  std::size_t r = 1;  // sparsity level handed to TRFM
};

bool is_sfda_kind(InstanceSpec::Kind k) {
  return k == InstanceSpec::Kind::Gep || k == InstanceSpec::Kind::Geps;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--x0 expects comma-separated numbers, got '" + text + "'");
    }
  }
  return out;
}

InstanceSpec::Kind resolve_kind(const RunSpec& spec) {
  if (!spec.instance && !spec.instance_file) {
    throw UsageError("one of --instance or --instance-file is required");
  }
  if (spec.instance) {
    try {
      return instance_kind_from_string(*spec.instance);
    } catch (const Error&) {
      throw UsageError("unknown instance '" + *spec.instance + "' (ep, fqp, gep, geps)");
    }
  }
  return InstanceSpec::Kind::Ep;  // replaced by the file contents
}

SfdaPreset resolve_preset(const RunSpec& spec) {
  SfdaPreset p = sfda_preset(spec.preset.value_or("desk"), spec.d);
  if (spec.r) p.r = *spec.r;
  if (spec.p1) p.p1 = *spec.p1;
  if (spec.p2) p.p2 = *spec.p2;
  if (spec.lambda) p.lambda = *spec.lambda;
  return p;
}

Instance make_instance(const RunSpec& spec, std::uint64_t seed) {
  const InstanceSpec::Kind kind = resolve_kind(spec);
  Instance inst;
  if (spec.instance_file) {
    std::ifstream in(*spec.instance_file);
    if (!in) throw UsageError("cannot read instance file '" + *spec.instance_file + "'");
    inst.spec = instance_from_json(Json::parse(in));
    if (spec.instance && inst.spec.kind != kind) {
      throw UsageError("--instance disagrees with the instance file");
    }
    inst.r = inst.spec.kind == InstanceSpec::Kind::Geps ? inst.spec.r : spec.r.value_or(1);
  } else if (kind == InstanceSpec::Kind::Ep) {
    inst.spec.kind = kind;
    inst.spec.m = spec.m.value_or(2);
    inst.spec.gamma = spec.gamma.value_or(10.0);
  } else if (kind == InstanceSpec::Kind::Fqp) {
    inst.spec = random_fqp(spec.m.value_or(2), spec.d.value_or(3), seed);
  } else {
    const SfdaPreset p = resolve_preset(spec);
    inst.data = generate_sfda(p.d, p.p1, p.p2, seed);
    inst.spec.kind = kind;
    inst.spec.A = inst.data->V_b;
    inst.spec.B = inst.data->V_w;
    inst.spec.lambda = p.lambda;
    inst.spec.r = p.r;
    inst.r = p.r;
  }
  inst.problem = build(inst.spec);

  const auto dims = inst.problem->dims();
  if (spec.x0) {
    const std::vector<double> values = parse_list(*spec.x0);
    std::size_t total = 0;
    for (auto n : dims) total += n;
    if (values.size() != total) {
      throw UsageError("--x0 has " + std::to_string(values.size()) + " entries, expected " +
                       std::to_string(total));
    }
    const Vector flat = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(total));
    inst.x0 = BlockVector::unflatten(flat, dims);
    if (!inst.problem->is_feasible(inst.x0, 1e-10)) throw UsageError("--x0 is not feasible");
  } else if (inst.spec.kind == InstanceSpec::Kind::Ep) {
    // Uniform start in [0, 10]^m, as in the analytic-example protocol.
    CounterRng rng(seed);
    std::vector<Vector> blocks;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      blocks.push_back(Vector::Constant(1, rng.uniform(0.0, kEpUpper)));
    }
    inst.x0 = BlockVector(std::move(blocks));
  } else if (is_sfda_kind(inst.spec.kind)) {
    inst.x0 = BlockVector(std::vector<Vector>{sparse_start(dims[0], std::min(inst.r, dims[0]))});
  } else {
    inst.x0 = canonical_start(*inst.problem);
  }
  return inst;
}

TauRule parse_tau_rule(const std::string& text) {
  if (text == "auto") return TauRule::automatic();
  if (text == "sfda") return TauRule::sfda();
  const std::string prefix = "fixed:";
  if (text.rfind(prefix, 0) == 0) {
    try {
      return TauRule::fixed(std::stod(text.substr(prefix.size())));
    } catch (const std::exception&) {
    }
  }
  throw UsageError("--tau-rule must be auto, sfda or fixed:<value>, got '" + text + "'");
}

SolverConfig make_config(const RunSpec& spec, InstanceSpec::Kind kind) {
  const bool sfda = is_sfda_kind(kind);
  SolverConfig cfg = sfda ? SolverConfig::sfda() : SolverConfig{};
  if (spec.delta) {
    cfg.delta = *spec.delta;
    if (sfda) cfg.nu_bar = 0.4999 * cfg.delta;
  }
  if (spec.inertia) {
    cfg.inertia_scale = *spec.inertia;
    cfg.nu_rule.kind = NuRule::Kind::Scaled;
    cfg.nu_bar = *spec.inertia * cfg.delta / 2.0;
  }
  if (spec.nu_bar) cfg.nu_bar = *spec.nu_bar;
  if (spec.tau_rule) cfg.tau_rule = parse_tau_rule(*spec.tau_rule);
  if (spec.max_iter) cfg.max_iter = *spec.max_iter;
  if (spec.step_tol) cfg.step_tol = *spec.step_tol;
  if (spec.seed) cfg.seed = *spec.seed;
  if (spec.w_convention) {
    if (*spec.w_convention == "step1") {
      cfg.w_convention = WConvention::Full;
    } else if (*spec.w_convention == "section6") {
      cfg.w_convention = WConvention::Half;
    } else {
      throw UsageError("--w-convention must be step1 or section6");
    }
  }
  cfg.validate();
  return cfg;
}

std::string tau_rule_name(const TauRule& t) {
  switch (t.kind) {
    case TauRule::Kind::Auto: return "auto";
    case TauRule::Kind::Sfda: return "sfda";
    case TauRule::Kind::Fixed: return "fixed";
    case TauRule::Kind::Custom: return "custom";
  }
  return "auto";
}

Json config_json(const SolverConfig& cfg) {
  return {{"delta", cfg.delta},
          {"nu_bar", cfg.nu_bar},
          {"inertia_scale", cfg.inertia_scale},
          {"tau_rule", tau_rule_name(cfg.tau_rule)},
          {"max_iter", cfg.max_iter},
          {"step_tol", cfg.step_tol},
          {"w_convention", cfg.w_convention == WConvention::Full ? "step1" : "section6"}};
}

std::string format_of(const RunSpec& spec) {
  const std::string f = spec.format.value_or("csv");
  if (f != "csv" && f != "json") throw UsageError("--format must be csv or json");
  return f;
}

fs::path out_dir(const RunSpec& spec) {
  const fs::path dir = spec.out.value_or(".");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw UsageError("output directory '" + dir.string() + "' is not writable");
  }
  return dir;
}

// ---------------------------------------------------------------------------
// solve

int run_solve(const RunSpec& spec) {
  // Preparation errors are configuration errors.
  const std::string format = format_of(spec);
  const fs::path dir = out_dir(spec);
  const std::uint64_t seed = spec.seed.value_or(0);
  const Instance inst = make_instance(spec, seed);
  SolverConfig cfg = make_config(spec, inst.spec.kind);
  cfg.record_iterates = true;

  SolverResult res;
  try {
    res = solve(*inst.problem, inst.x0, cfg);
  } catch (const std::exception& e) {
    std::cerr << "fracprox: solve failed: " << e.what() << '\n';
    return kExitRuntime;
  }

  if (format == "csv") {
    std::ostringstream s;
    write_trace_csv(s, res.trace);
    write_file(dir / "trace.csv", s.str());
  } else {
    Table t{{"n", "F", "step_norm", "theta", "tau", "nu", "elapsed"}, {}};
    for (const auto& r : res.trace) t.rows.push_back({r.n, r.F, r.step_norm, r.theta, r.tau, r.nu, r.elapsed});
    write_table(dir, "trace", t, format);
  }

  const std::vector<double> dist = distances_to_final(res.iterates);
  Table dt{{"n", "distance_to_final"}, {}};
  for (std::size_t n = 0; n < dist.size(); ++n) dt.rows.push_back({n, dist[n]});
  write_table(dir, "distances", dt, format);

  Json rate = nullptr;
  try {
    const RateFit fit = fit_rate(dist);
    rate = {{"classification", to_string(fit.classification)},
            {"slope", fit.slope},
            {"r_squared", fit.r_squared},
            {"tail_start", fit.tail_start},
            {"linear_slope", fit.linear_slope},
            {"linear_r_squared", fit.linear_r_squared},
            {"power_slope", fit.power_slope},
            {"power_r_squared", fit.power_r_squared}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TooFewPoints) throw;
  }

  const Vector x = res.x_final.flatten();
  Json summary = {{"command", "solve"},
                  {"instance", to_string(inst.spec.kind)},
                  {"seed", seed},
                  {"status", to_string(res.status)},
                  {"iterations", res.iterations()},
                  {"F_final", res.final_objective()},
                  {"residual", res.residual},
                  {"sparsity", count_nonzeros(x, kSparsityThreshold)},
                  {"elapsed_seconds", res.elapsed},
                  {"rate_fit", rate},
                  {"x_final", vector_to_json(x)},
                  {"config", config_json(cfg)}};
  write_file(dir / "summary.json", summary.dump(2) + "\n");

  std::cout << "status " << to_string(res.status) << ", " << res.iterations()
            << " iterations, F " << res.final_objective() << ", residual " << res.residual
            << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// bench and compare share the seeded trial runner.

struct TrialRow {
  std::string method;
  std::uint64_t seed = 0;
  std::size_t d = 0;
  double objective = 0.0;
  std::size_t sparsity = 0;
  std::size_t iterations = 0;
  double cpu_seconds = 0.0;
  std::string status;
  Vector x_final;
};

const std::vector<std::string> kTrialHeader = {"method",     "seed",        "d",
                                               "objective",  "sparsity",    "iterations",
                                               "cpu_seconds", "status"};

std::vector<std::uint64_t> resolve_seeds(const RunSpec& spec) {
  if (spec.seeds) {
    if (spec.seeds->empty()) throw UsageError("--seeds must not be empty");
    if (spec.trials && *spec.trials != spec.seeds->size()) {
      throw UsageError("--seeds has " + std::to_string(spec.seeds->size()) +
                       " entries but --trials is " + std::to_string(*spec.trials));
    }
    return *spec.seeds;
  }
  const std::size_t trials = spec.trials.value_or(1);
  if (trials < 1) throw UsageError("--trials must be at least 1");
  std::vector<std::uint64_t> seeds(trials);
  for (std::size_t k = 0; k < trials; ++k) seeds[k] = spec.seed.value_or(0) + k;
  return seeds;
}

TrialRow row_from(const std::string& method, std::uint64_t seed, const SolverResult& res) {
  TrialRow row;
  row.method = method;
  row.seed = seed;
  row.x_final = res.x_final.flatten();
  row.d = static_cast<std::size_t>(row.x_final.size());
  row.objective = res.final_objective();
  row.sparsity = count_nonzeros(row.x_final, kSparsityThreshold);
  row.iterations = res.iterations();
  row.cpu_seconds = res.elapsed;  // solve call only
  row.status = to_string(res.status);
  return row;
}

enum class Method { Algorithm, Trfm };

std::string method_name(Method m) { return m == Method::Algorithm ? "Algorithm" : "TRFM"; }

struct TrialPlan {
  RunSpec spec;
  SolverConfig config;
  std::vector<std::uint64_t> seeds;
  std::vector<Method> methods;
  std::size_t jobs = 1;
};

TrialPlan plan_trials(const RunSpec& spec, std::vector<Method> methods) {
  TrialPlan plan;
  plan.spec = spec;
  const InstanceSpec::Kind kind = resolve_kind(spec);
  if (spec.instance_file || !is_sfda_kind(kind)) {
    throw UsageError("bench and compare need --instance gep or geps");
  }
  plan.config = make_config(spec, kind);
  plan.seeds = resolve_seeds(spec);
  plan.methods = std::move(methods);
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  plan.jobs = std::clamp<std::size_t>(spec.jobs.value_or(hw), 1, plan.seeds.size());
  // Surface preset and x0 errors before any thread starts.
  make_instance(spec, plan.seeds.front());
  TrfmConfig trfm;
  trfm.max_iter = plan.config.max_iter;
  trfm.step_tol = plan.config.step_tol;
  trfm.validate();
  return plan;
}

// rows[k][j]: method j on seed k.
std::vector<std::vector<TrialRow>> run_trials(const TrialPlan& plan) {
  std::vector<std::vector<TrialRow>> rows(plan.seeds.size());
  std::vector<std::exception_ptr> errors(plan.seeds.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t k = next++; k < plan.seeds.size(); k = next++) {
      try {
        const std::uint64_t seed = plan.seeds[k];
        const Instance inst = make_instance(plan.spec, seed);
        SolverConfig cfg = plan.config;
        cfg.seed = seed;
        for (Method m : plan.methods) {
          if (m == Method::Algorithm) {
            rows[k].push_back(row_from(method_name(m), seed, solve(*inst.problem, inst.x0, cfg)));
          } else {
            TrfmConfig t;
            t.r = inst.r;
            t.max_iter = cfg.max_iter;
            t.step_tol = cfg.step_tol;
            const Vector x0 = sparse_start(inst.data->d, inst.r);
            rows[k].push_back(
                row_from(method_name(m), seed, trfm_solve(inst.spec.A, inst.spec.B, x0, t)));
          }
        }
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };

  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < plan.jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

Table trial_table(const std::vector<TrialRow>& rows) {
  Table t{kTrialHeader, {}};
  for (const auto& r : rows) {
    t.rows.push_back(
        {r.method, r.seed, r.d, r.objective, r.sparsity, r.iterations, r.cpu_seconds, r.status});
  }
  return t;
}

int run_bench(const RunSpec& spec) {
  const std::string format = format_of(spec);
  const fs::path dir = out_dir(spec);
  const std::string baseline = spec.baseline.value_or("none");
  if (baseline != "none" && baseline != "trfm") throw UsageError("--baseline must be trfm or none");
  std::vector<Method> methods{Method::Algorithm};
  if (baseline == "trfm") methods.push_back(Method::Trfm);
  const TrialPlan plan = plan_trials(spec, methods);
  const SfdaPreset preset = resolve_preset(spec);

  std::vector<std::vector<TrialRow>> grid;
  try {
    grid = run_trials(plan);
  } catch (const std::exception& e) {
    std::cerr << "fracprox: trial failed: " << e.what() << '\n';
    return kExitRuntime;
  }

  std::vector<TrialRow> flat;
  for (const auto& per_seed : grid) flat.insert(flat.end(), per_seed.begin(), per_seed.end());
  write_table(dir, "trials", trial_table(flat), format);

  Table agg{{"method", "trials", "sparsity", "objective", "cpu_seconds", "iterations",
             "mean_sparsity_exact", "mean_iterations_exact"},
            {}};
  Json aggregates = Json::array();
  for (std::size_t j = 0; j < methods.size(); ++j) {
    std::vector<TrialMetrics> metrics;
    for (const auto& per_seed : grid) {
      const TrialRow& r = per_seed[j];
      metrics.push_back({r.x_final, r.objective, r.cpu_seconds, r.iterations});
    }
    const TrialSummary s = summarize_trial_set(metrics);
    const std::string name = method_name(methods[j]);
    agg.rows.push_back({name, s.trials, s.sparsity, s.objective, s.cpu_seconds, s.iterations,
                        s.mean_sparsity_exact, s.mean_iterations_exact});
    aggregates.push_back({{"method", name},
                          {"trials", s.trials},
                          {"sparsity", s.sparsity},
                          {"objective", s.objective},
                          {"cpu_seconds", s.cpu_seconds},
                          {"iterations", s.iterations},
                          {"mean_sparsity_exact", s.mean_sparsity_exact},
                          {"mean_iterations_exact", s.mean_iterations_exact}});
    std::cout << name << ": sparsity " << s.sparsity << ", objective " << s.objective
              << ", cpu " << s.cpu_seconds << " s, iterations " << s.iterations << '\n';
  }
  write_table(dir, "aggregate", agg, format);

  const Json summary = {{"command", "bench"},
                        {"instance", to_string(instance_kind_from_string(*spec.instance))},
                        {"preset", preset.name},
                        {"d", preset.d},
                        {"r", preset.r},
                        {"lambda", preset.lambda},
                        {"seeds", plan.seeds},
                        {"config", config_json(plan.config)},
                        {"aggregates", aggregates}};
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  return 0;
}

// A compare side is a method name or a trials CSV, optionally "path#Method".
std::vector<TrialRow> read_trials_csv(const std::string& source) {
  std::string path = source, method;
  if (const auto hash = source.rfind('#'); hash != std::string::npos) {
    path = source.substr(0, hash);
    method = source.substr(hash + 1);
  }
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read trials file '" + path + "'");
  std::string line;
  std::getline(in, line);
  std::string expected;
  for (std::size_t k = 0; k < kTrialHeader.size(); ++k) expected += (k ? "," : "") + kTrialHeader[k];
  if (line != expected) throw UsageError("'" + path + "' does not have the trials CSV header");

  std::vector<TrialRow> rows;
  std::set<std::string> methods;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream s(line);
    std::string cell;
    while (std::getline(s, cell, ',')) cells.push_back(cell);
    if (cells.size() != kTrialHeader.size()) throw UsageError("malformed row in '" + path + "'");
    TrialRow r;
    try {
      r.method = cells[0];
      r.seed = std::stoull(cells[1]);
      r.d = std::stoul(cells[2]);
      r.objective = std::stod(cells[3]);
      r.sparsity = std::stoul(cells[4]);
      r.iterations = std::stoul(cells[5]);
      r.cpu_seconds = std::stod(cells[6]);
      r.status = cells[7];
    } catch (const std::exception&) {
      throw UsageError("malformed row in '" + path + "'");
    }
    methods.insert(r.method);
    rows.push_back(r);
  }
  if (method.empty()) {
    if (methods.size() == 1) return rows;
    method = "Algorithm";
  }
  std::vector<TrialRow> picked;
  for (auto& r : rows) {
    if (r.method == method) picked.push_back(r);
  }
  if (picked.empty()) throw UsageError("no rows for method '" + method + "' in '" + path + "'");
  return picked;
}

std::optional<Method> method_from(const std::string& s) {
  if (s == "algorithm") return Method::Algorithm;
  if (s == "trfm") return Method::Trfm;
  return std::nullopt;
}

int run_compare(const RunSpec& spec) {
  const std::string format = format_of(spec);
  const fs::path dir = out_dir(spec);
  const std::string left = spec.left.value_or("algorithm");
  const std::string right = spec.right.value_or("trfm");

  std::vector<Method> to_run;
  for (const auto& side : {left, right}) {
    if (auto m = method_from(side)) to_run.push_back(*m);
  }
  std::optional<TrialPlan> plan;
  if (!to_run.empty()) plan = plan_trials(spec, to_run);

  std::vector<std::vector<TrialRow>> grid;
  if (plan) {
    try {
      grid = run_trials(*plan);
    } catch (const std::exception& e) {
      std::cerr << "fracprox: trial failed: " << e.what() << '\n';
      return kExitRuntime;
    }
  }
  std::size_t run_index = 0;
  auto side_rows = [&](const std::string& side) {
    if (!method_from(side)) return read_trials_csv(side);
    std::vector<TrialRow> rows;
    for (const auto& per_seed : grid) rows.push_back(per_seed[run_index]);
    ++run_index;
    return rows;
  };
  const std::vector<TrialRow> L = side_rows(left);
  const std::vector<TrialRow> R = side_rows(right);

  std::map<std::uint64_t, const TrialRow*> by_seed;
  for (const auto& r : R) by_seed[r.seed] = &r;
  if (L.size() != R.size() || by_seed.size() != R.size()) {
    throw UsageError("left and right runs do not cover the same seeds");
  }

  Table paired{{"seed", "d", "objective_left", "objective_right", "objective_delta",
                "sparsity_left", "sparsity_right", "sparsity_delta", "iterations_left",
                "iterations_right", "iterations_delta"},
               {}};
  struct Tally {
    double left = 0, right = 0, delta = 0;
    std::size_t left_better = 0, right_better = 0, ties = 0;
  };
  Tally obj, spa, its;
  auto tally = [](Tally& t, double l, double r, bool higher_is_better) {
    t.left += l;
    t.right += r;
    t.delta += l - r;
    if (l == r) {
      ++t.ties;
    } else if ((l > r) == higher_is_better) {
      ++t.left_better;
    } else {
      ++t.right_better;
    }
  };
  for (const auto& l : L) {
    const auto it = by_seed.find(l.seed);
    if (it == by_seed.end()) throw UsageError("left and right runs do not cover the same seeds");
    const TrialRow& r = *it->second;
    if (l.d != r.d) {
      throw UsageError("dimension mismatch on seed " + std::to_string(l.seed) + ": " +
                       std::to_string(l.d) + " vs " + std::to_string(r.d));
    }
    const auto ls = static_cast<long>(l.sparsity), rs = static_cast<long>(r.sparsity);
    const auto li = static_cast<long>(l.iterations), ri = static_cast<long>(r.iterations);
    paired.rows.push_back({l.seed, l.d, l.objective, r.objective, l.objective - r.objective, ls,
                           rs, ls - rs, li, ri, li - ri});
    tally(obj, l.objective, r.objective, true);
    tally(spa, static_cast<double>(ls), static_cast<double>(rs), false);
    tally(its, static_cast<double>(li), static_cast<double>(ri), false);
  }
  write_table(dir, "paired", paired, format);

  const double n = static_cast<double>(L.size());
  Table verdict{{"metric", "mean_left", "mean_right", "mean_delta", "left_better", "right_better",
                 "ties"},
                {}};
  for (const auto& [name, t] : {std::pair{"objective", obj}, {"sparsity", spa}, {"iterations", its}}) {
    verdict.rows.push_back(
        {name, t.left / n, t.right / n, t.delta / n, t.left_better, t.right_better, t.ties});
  }
  write_table(dir, "verdict", verdict, format);
  std::cout << "mean objective delta (left - right): " << std::showpos << obj.delta / n
            << std::noshowpos << " over " << L.size() << " seeds\n";
  return 0;
}

// ---------------------------------------------------------------------------
// export

int run_export(const RunSpec& spec) {
  const fs::path dir = out_dir(spec);
  const Instance inst = make_instance(spec, spec.seed.value_or(0));
  write_file(dir / "instance.json", instance_to_json(inst.spec).dump(2) + "\n");
  if (inst.data) {
    const SfdaData& s = *inst.data;
    std::ostringstream vw, vb;
    write_matrix_csv(vw, s.V_w);
    write_matrix_csv(vb, s.V_b);
    write_file(dir / "V_w.csv", vw.str());
    write_file(dir / "V_b.csv", vb.str());
    const Json meta = {{"seed", s.seed},
                       {"d", s.d},
                       {"p1", s.p1},
                       {"p2", s.p2},
                       {"ridge", s.ridge},
                       {"lambda_min_w", s.lambda_min_w},
                       {"lambda_max_w", s.lambda_max_w},
                       {"mu1_hat", vector_to_json(s.mu1_hat)},
                       {"mu2_hat", vector_to_json(s.mu2_hat)}};
    write_file(dir / "data.json", meta.dump(2) + "\n");
  }
  std::cout << "wrote " << to_string(inst.spec.kind) << " instance to " << dir.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// Command line.

void add_options(CLI::App* sub, RunSpec& s, std::vector<std::uint64_t>& seeds,
                 std::string& config) {
  sub->add_option("--config", config, "JSON file with run settings; flags override it");
  sub->add_option("--instance,--kind", s.instance, "ep, fqp, gep or geps");
  sub->add_option("--instance-file", s.instance_file, "instance JSON written by export");
  sub->add_option("--preset", s.preset, "SFDA preset: desk or paper-scale")
      ->check(CLI::IsMember({"desk", "paper-scale"}));
  sub->add_option("--m", s.m, "number of blocks (ep, fqp)");
  sub->add_option("--gamma", s.gamma, "EP numerator scale");
  sub->add_option("--d", s.d, "dimension (SFDA) or block size (fqp)");
  sub->add_option("--r", s.r, "sparsity level");
  sub->add_option("--lambda", s.lambda, "cardinality penalty (gep)");
  sub->add_option("--p1", s.p1, "class-1 sample size (SFDA)");
  sub->add_option("--p2", s.p2, "class-2 sample size (SFDA)");
  sub->add_option("--x0", s.x0, "comma-separated starting point");
  sub->add_option("--trials", s.trials, "number of seeded trials");
  sub->add_option("--seed", s.seed, "base seed");
  sub->add_option("--seeds", seeds, "explicit seed list")->delimiter(',');
  sub->add_option("--inertia", s.inertia, "inertia scale in [0, 1)");
  sub->add_option("--delta", s.delta, "proximal margin delta > 0");
  sub->add_option("--nu-bar", s.nu_bar, "inertia cap in [0, delta/2)");
  sub->add_option("--tau-rule", s.tau_rule, "auto, sfda or fixed:<value>");
  sub->add_option("--max-iter", s.max_iter, "iteration limit");
  sub->add_option("--step-tol", s.step_tol, "stop when the step norm falls below this");
  sub->add_option("--w-convention", s.w_convention, "step1 or section6");
  sub->add_option("--out", s.out, "output directory");
  sub->add_option("--format", s.format, "table format: csv or json");
  sub->add_option("--baseline", s.baseline, "trfm or none");
  sub->add_option("--jobs", s.jobs, "worker threads");
  sub->add_option("--left", s.left, "algorithm, trfm or a trials CSV (path#Method)");
  sub->add_option("--right", s.right, "algorithm, trfm or a trials CSV (path#Method)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inertial proximal block-coordinate solver for sum-of-ratios maximization"};
  app.require_subcommand(1);

  RunSpec flags;
  std::vector<std::uint64_t> seeds;
  std::string config;
  std::map<std::string, int (*)(const RunSpec&)> commands = {
      {"solve", run_solve}, {"bench", run_bench}, {"compare", run_compare}, {"export", run_export}};
  const std::map<std::string, std::string> help = {
      {"solve", "run one solve and write trace, distances and summary"},
      {"bench", "run seeded SFDA trials and aggregate them"},
      {"compare", "pair two methods or trials files seed by seed"},
      {"export", "write an instance and its data matrices"}};
  for (const auto& [name, fn] : commands) add_options(app.add_subcommand(name, help.at(name)), flags, seeds, config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    RunSpec spec;
    if (!config.empty()) spec = load_config(config, command);
    if (!seeds.empty()) flags.seeds = seeds;
    merge(spec, flags);
    return commands.at(command)(spec);
  } catch (const UsageError& e) {
    std::cerr << "fracprox " << command << ": " << e.what() << "\n\n" << sub->help();
    return kExitUsage;
  } catch (const Error& e) {
    // Library validation of inputs the user supplied.
    std::cerr << "fracprox " << command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "fracprox " << command << ": " << e.what() << '\n';
    return kExitRuntime;
  }
}
