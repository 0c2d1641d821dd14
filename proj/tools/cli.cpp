#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "mixserve/baselines.hpp"
#include "mixserve/error.hpp"
#include "mixserve/planner.hpp"
#include "mixserve/profiles.hpp"
#include "mixserve/report.hpp"
#include "mixserve/simulator.hpp"
#include "mixserve/trace.hpp"

namespace mixserve::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kEnvPrefix = "MIXSERVE_";

struct PlannerFlags {
  int budget = 16;
  double slo_ms = 750.0;
  double alpha = 1.0;
  double beta = 0.05;
  double gamma = 0.05;
  int min_cores = 1;

  PlannerParams params() const {
    PlannerParams p;
    p.budget_cores = budget;
    p.slo_ms = slo_ms;
    p.alpha = alpha;
    p.beta = beta;
    p.gamma = gamma;
    p.min_cores_per_variant = min_cores;
    return p;
  }
};

void add_planner_flags(CLI::App* cmd, PlannerFlags& f) {
  cmd->add_option("--budget", f.budget, "CPU core budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--slo-ms", f.slo_ms, "P99 latency SLO in ms")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--alpha", f.alpha, "accuracy weight")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--beta", f.beta, "resource cost weight")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--gamma", f.gamma, "loading cost weight")->check(CLI::NonNegativeNumber)->capture_default_str();
  cmd->add_option("--min-cores", f.min_cores, "minimum cores per deployed variant")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

struct SimFlags {
  std::string profiles;
  std::string trace;
  std::string synth;
  std::int64_t duration = 1200;
  PlannerFlags planner;
  int interval = 30;
  double horizon = 60.0;
  double headroom = 1.1;
  std::uint64_t seed = 0;
  std::optional<double> initial_load;
  std::string out = "out";
};

void add_sim_flags(CLI::App* cmd, SimFlags& f) {
  cmd->add_option("--profiles", f.profiles, "profile JSON file")->required();
  auto* trace = cmd->add_option("--trace", f.trace, "trace CSV (second,count)");
  auto* synth = cmd->add_option(
      "--synth", f.synth,
      "synthetic trace: steady:R | spike:BASE,PEAK,START,END[,DECAY] | ramp:FROM,TO | "
      "bursty:BASE,PEAK | nonbursty:FROM,TO");
  trace->excludes(synth);
  cmd->add_option("--duration", f.duration, "synthetic trace length in s")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_planner_flags(cmd, f.planner);
  cmd->add_option("--interval", f.interval, "adaptation interval in s")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--horizon", f.horizon, "forecast horizon in s")->capture_default_str();
  cmd->add_option("--headroom", f.headroom, "forecast over-provisioning factor")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "arrival placement seed")->capture_default_str();
  cmd->add_option("--initial-load", f.initial_load, "load for the warm-started plan at t=0");
  cmd->add_option("--out", f.out, "output directory")->capture_default_str();
}

// Every long flag of `cmd` can also come from MIXSERVE_<FLAG> in the
// environment, e.g. --slo-ms from MIXSERVE_SLO_MS.
void bind_env(CLI::App* cmd) {
  for (CLI::Option* opt : cmd->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "config") continue;
    std::string env = kEnvPrefix;
    for (char c : name) env += c == '-' ? '_' : static_cast<char>(std::toupper(c));
    opt->envname(env);
  }
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

// Fills options not given on the command line or environment from a flat
// JSON object whose keys are flag names without the leading dashes.
void apply_config(CLI::App* cmd, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, path + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::kParse, path + ": expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    CLI::Option* opt = nullptr;
    try {
      opt = cmd->get_option("--" + key);
    } catch (const CLI::OptionNotFound&) {
      throw Error(ErrorKind::kParse, path + ": unknown key '" + key + "'");
    }
    if (opt->count() > 0) continue;
    if (value.is_array()) {
      for (const auto& v : value) opt->add_result(scalar_text(v));
    } else {
      opt->add_result(scalar_text(value));
    }
    opt->run_callback();
  }
}

WorkloadTrace make_trace(const SimFlags& f) {
  if (!f.trace.empty()) return load_trace(f.trace);
  if (f.synth.empty())
    throw Error(ErrorKind::kInvalidParams, "either --trace or --synth is required");
  const auto colon = f.synth.find(':');
  const std::string kind = f.synth.substr(0, colon);
  if (kind == "bursty" || kind == "nonbursty") {
    double a = 0.0;
    double b = 0.0;
    if (colon == std::string::npos ||
        std::sscanf(f.synth.c_str() + colon + 1, "%lf,%lf", &a, &b) != 2)
      throw Error(ErrorKind::kParse, "expected " + kind + ":A,B");
    return kind == "bursty" ? bursty_scenario(a, b, f.seed)
                            : non_bursty_scenario(a, b, f.seed);
  }
  return synth_trace(parse_trace_shape(f.synth), f.duration, f.seed);
}

SimConfig make_sim_config(const SimFlags& f, const Policy& policy) {
  SimConfig cfg;
  cfg.profiles = load_profiles(f.profiles);
  cfg.trace = make_trace(f);
  cfg.planner = f.planner.params();
  cfg.adaptation_interval_s = f.interval;
  cfg.forecaster.horizon_s = f.horizon;
  cfg.forecaster.headroom = f.headroom;
  cfg.seed = f.seed;
  cfg.policy = policy;
  cfg.initial_load_rps = f.initial_load;
  return cfg;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInfeasible:
    case ErrorKind::kInsufficientCapacity:
    case ErrorKind::kProfileTooSmall:
      return kExitDomain;
    default:
      return kExitUsage;
  }
}

int cmd_profile_fit(const std::string& path, double threshold, std::ostream& out,
                    std::ostream& err) {
  const auto profiles = load_profiles(path);
  json fits = json::array();
  bool ok = true;
  for (const auto& p : profiles) {
    const PerfModel m = fit_perf_model(p);
    json j = to_json(m);
    j["passes"] = m.r_squared >= threshold;
    if (m.slope_clamped)
      fmt::print(err, "warning: negative slope for '{}' clamped to 0\n", m.variant_id);
    if (m.r_squared < threshold) {
      ok = false;
      fmt::print(err, "'{}': r^2 {} below threshold {}\n", m.variant_id, m.r_squared,
                 threshold);
    }
    fits.push_back(std::move(j));
  }
  out << fits.dump(2) << '\n';
  return ok ? kExitOk : kExitDomain;
}

struct SolveFlags {
  std::string profiles;
  std::optional<double> lambda;
  PlannerFlags planner;
  std::string prev;
  std::string mode = "infadapter";
  std::string out;
};

int cmd_solve(const SolveFlags& f, std::ostream& out, std::ostream& err) {
  const auto variants = make_variants(load_profiles(f.profiles));
  PlannerParams params = f.planner.params();
  if (!f.lambda) throw Error(ErrorKind::kInvalidParams, "--lambda is required");
  params.predicted_load_rps = *f.lambda;

  CoreMap prev;
  if (!f.prev.empty()) {
    std::ifstream in(f.prev);
    if (!in) throw Error(ErrorKind::kIo, "cannot open previous plan " + f.prev);
    try {
      prev = plan_from_json(json::parse(in)).config();
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::kParse, f.prev + ": " + e.what());
    }
  }

  const Policy policy = Policy::parse(f.mode);
  Plan plan;
  switch (policy.kind) {
    case PolicyKind::kInfAdapter: plan = solve(variants, params, prev); break;
    case PolicyKind::kMsPlus: plan = solve_ms_plus(variants, params, prev); break;
    case PolicyKind::kVpaPlus: {
      const auto it = std::find_if(variants.begin(), variants.end(),
                                   [&](const Variant& v) { return v.id() == policy.fixed_variant_id; });
      if (it == variants.end())
        throw Error(ErrorKind::kInvalidParams, "unknown variant '" + policy.fixed_variant_id + "'");
      plan = solve_vpa_plus(*it, params, variants, prev);
      break;
    }
  }

  const std::string doc = to_json(plan).dump(2);
  out << doc << '\n';
  if (!f.out.empty()) {
    std::ofstream file(f.out);
    if (!file) throw Error(ErrorKind::kIo, "cannot write " + f.out);
    file << doc << '\n';
  }
  fmt::print(err, "objective={} aa={} rc={} lc={} cores={}{}\n", plan.objective,
             plan.avg_accuracy, plan.resource_cost_norm, plan.loading_cost_norm,
             plan.total_cores(), plan.under_provisioned ? " under_provisioned" : "");
  return kExitOk;
}

void print_aggregate(std::ostream& out, const SimReport& r) {
  fmt::print(out,
             "policy={} arrivals={} completed={} queued={} p99_ms={:.3f} "
             "violations={:.6f} accuracy_loss={:.6f} core_seconds={:.3f} fallbacks={}\n",
             r.policy, r.total_arrivals, r.completed, r.in_queue_at_end, r.p99_latency_ms,
             r.slo_violation_fraction, r.accuracy_loss, r.core_seconds, r.fallback_count);
}

int cmd_simulate(const SimFlags& f, const std::string& policy, std::ostream& out) {
  const SimConfig cfg = make_sim_config(f, Policy::parse(policy));
  const SimReport report = run(cfg);
  write_report(f.out, report);
  print_aggregate(out, report);
  return kExitOk;
}

int cmd_compare(const SimFlags& f, const std::vector<std::string>& policies,
                const std::vector<double>& betas, std::ostream& out) {
  std::vector<SimConfig> configs;
  const std::vector<double> beta_grid = betas.empty() ? std::vector<double>{f.planner.beta} : betas;
  const SimConfig base = make_sim_config(f, Policy{});
  for (double beta : beta_grid) {
    for (const auto& p : policies) {
      SimConfig cfg = base;
      cfg.policy = Policy::parse(p);
      cfg.planner.beta = beta;
      configs.push_back(std::move(cfg));
    }
  }
  const auto rows = compare(configs);

  fs::create_directories(f.out);
  {
    std::ofstream csv(fs::path(f.out) / "comparison.csv", std::ios::binary);
    if (!csv) throw Error(ErrorKind::kIo, "cannot write comparison.csv");
    write_comparison_csv(csv, rows);
  }
  {
    json doc = json::array();
    for (const auto& r : rows) doc.push_back(to_json(r));
    std::ofstream js(fs::path(f.out) / "comparison.json", std::ios::binary);
    if (!js) throw Error(ErrorKind::kIo, "cannot write comparison.json");
    js << doc.dump(2) << '\n';
  }
  write_comparison_csv(out, rows);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variant-mix planner and serving simulator", "mixserve"};
  app.require_subcommand(1);

  std::string config_path;

  std::string fit_path;
  double threshold = 0.95;
  auto* fit = app.add_subcommand("profile-fit", "fit throughput models to profiles");
  fit->add_option("profiles", fit_path, "profile JSON file")->required();
  fit->add_option("--r2-threshold", threshold, "minimum acceptable r^2")->capture_default_str();

  SolveFlags solve_flags;
  auto* solve_cmd = app.add_subcommand("solve", "one-shot plan for a given load");
  solve_cmd->add_option("profiles", solve_flags.profiles, "profile JSON file")->required();
  solve_cmd->add_option("--lambda", solve_flags.lambda, "predicted load in rps")
      ->check(CLI::NonNegativeNumber);
  add_planner_flags(solve_cmd, solve_flags.planner);
  solve_cmd->add_option("--prev", solve_flags.prev, "previous plan JSON");
  solve_cmd->add_option("--mode", solve_flags.mode, "infadapter | ms_plus | vpa_plus:<variant>")
      ->capture_default_str();
  solve_cmd->add_option("--out", solve_flags.out, "also write the plan here");

  SimFlags sim_flags;
  std::string policy = "infadapter";
  auto* simulate = app.add_subcommand("simulate", "simulate one policy over a trace");
  add_sim_flags(simulate, sim_flags);
  simulate->add_option("--policy", policy, "infadapter | ms_plus | vpa_plus:<variant>")
      ->capture_default_str();

  SimFlags cmp_flags;
  std::vector<std::string> policies;
  std::vector<double> betas;
  auto* compare_cmd = app.add_subcommand("compare", "simulate several policies on one trace");
  add_sim_flags(compare_cmd, cmp_flags);
  compare_cmd->add_option("--policies", policies, "policies to compare")->required()->delimiter(',');
  compare_cmd->add_option("--betas", betas, "beta values to sweep")->delimiter(',');

  for (auto* cmd : {fit, solve_cmd, simulate, compare_cmd}) {
    bind_env(cmd);
    cmd->add_option("--config", config_path, "JSON file with default flag values");
  }

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("mixserve");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    for (auto* cmd : {fit, solve_cmd, simulate, compare_cmd}) {
      if (cmd->parsed() && !config_path.empty()) apply_config(cmd, config_path);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const CLI::Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  }

  try {
    if (fit->parsed()) return cmd_profile_fit(fit_path, threshold, out, err);
    if (solve_cmd->parsed()) return cmd_solve(solve_flags, out, err);
    if (simulate->parsed()) return cmd_simulate(sim_flags, policy, out);
    if (compare_cmd->parsed()) return cmd_compare(cmp_flags, policies, betas, out);
  } catch (const Error& e) {
    fmt::print(err, "error ({}): {}\n", to_string(e.kind()), e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace mixserve::cli
