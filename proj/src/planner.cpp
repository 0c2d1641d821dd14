#include "mixserve/planner.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "mixserve/error.hpp"

namespace mixserve {

namespace {

// Indices of `variants` by descending accuracy, ties by ascending id.
std::vector<std::size_t> accuracy_order(std::span<const Variant> variants) {
  std::vector<std::size_t> order(variants.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (variants[a].accuracy != variants[b].accuracy)
      return variants[a].accuracy > variants[b].accuracy;
    return variants[a].id() < variants[b].id();
  });
  return order;
}

const Variant& find_variant(std::span<const Variant> variants,
                            const std::string& id) {
  for (const auto& v : variants)
    if (v.id() == id) return v;
  throw Error(ErrorKind::kInvalidParams, "unknown variant '" + id + "'");
}

// Predicted capacity of a config, summed in accuracy order. The recursive
// generator accumulates in the same order so both agree bit-for-bit.
double capacity(const CoreMap& config, std::span<const Variant> variants,
                std::span<const std::size_t> order) {
  double cap = 0.0;
  for (std::size_t i : order) {
    auto it = config.find(variants[i].id());
    if (it != config.end()) cap += predict_throughput(variants[i].model, it->second);
  }
  return cap;
}

void check_config_variants(const CoreMap& config,
                           std::span<const Variant> variants) {
  for (const auto& [id, cores] : config) {
    (void)find_variant(variants, id);
    if (cores < 0)
      throw Error(ErrorKind::kInvalidParams, "negative cores for '" + id + "'");
  }
}

using ConfigSink = std::function<void(const CoreMap&)>;

class Generator {
 public:
  Generator(std::span<const Variant> variants, const PlannerParams& params,
            const SolveOptions& options, ConfigSink sink)
      : variants_(variants),
        params_(params),
        options_(options),
        order_(accuracy_order(variants)),
        sink_(std::move(sink)) {}

  void run() { generate(0, params_.budget_cores, 0.0, 0); }

 private:
  void generate(std::size_t pos, int budget_left, double covered,
                std::size_t used) {
    if (used > 0 && covered >= params_.predicted_load_rps) {
      sink_(current_);
      return;
    }
    if (pos == order_.size() || used == options_.max_variants) return;

    // Even giving every remaining variant the whole remaining budget cannot
    // cover the load: nothing below this node would ever be recorded.
    double bound = covered;
    for (std::size_t j = pos; j < order_.size(); ++j)
      bound += predict_throughput(variants_[order_[j]].model, budget_left);
    if (bound < params_.predicted_load_rps) return;

    generate(pos + 1, budget_left, covered, used);

    const Variant& v = variants_[order_[pos]];
    for (int n = params_.min_cores_per_variant; n <= budget_left; ++n) {
      if (predict_latency(v.model, n) > params_.slo_ms) continue;
      current_[v.id()] = n;
      generate(pos + 1, budget_left - n,
               covered + predict_throughput(v.model, n), used + 1);
      current_.erase(v.id());
    }
  }

  std::span<const Variant> variants_;
  const PlannerParams& params_;
  const SolveOptions& options_;
  std::vector<std::size_t> order_;
  ConfigSink sink_;
  CoreMap current_;
};

PlannerParams clamped(const PlannerParams& params) {
  PlannerParams p = params;
  p.predicted_load_rps = std::max(1.0, p.predicted_load_rps);
  return p;
}

}  // namespace

Variant make_variant(const VariantProfile& profile) {
  return Variant{fit_perf_model(profile), profile.accuracy,
                 profile.readiness_time_s};
}

std::vector<Variant> make_variants(const std::vector<VariantProfile>& profiles) {
  std::vector<Variant> out;
  out.reserve(profiles.size());
  for (const auto& p : profiles) out.push_back(make_variant(p));
  return out;
}

void PlannerParams::validate() const {
  auto bad = [](const std::string& why) {
    throw Error(ErrorKind::kInvalidParams, why);
  };
  if (!(slo_ms > 0.0)) bad("slo_ms must be > 0");
  if (min_cores_per_variant < 1) bad("min_cores_per_variant must be >= 1");
  if (budget_cores < min_cores_per_variant)
    bad("budget_cores must be >= min_cores_per_variant");
  if (!(alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0))
    bad("alpha, beta, gamma must be non-negative");
  if (!(alpha + beta + gamma > 0.0)) bad("alpha + beta + gamma must be > 0");
  if (!(predicted_load_rps >= 0.0)) bad("predicted load must be >= 0");
}

CoreMap Plan::config() const {
  CoreMap m;
  for (const auto& a : assignments) m[a.variant_id] = a.cores;
  return m;
}

int Plan::total_cores() const {
  int sum = 0;
  for (const auto& a : assignments) sum += a.cores;
  return sum;
}

double Plan::total_quota() const {
  double sum = 0.0;
  for (const auto& a : assignments) sum += a.quota_rps;
  return sum;
}

std::vector<CoreMap> enumerate_configs(std::span<const Variant> variants,
                                       const PlannerParams& params,
                                       const SolveOptions& options) {
  params.validate();
  std::vector<CoreMap> out;
  Generator(variants, params, options,
            [&](const CoreMap& c) { out.push_back(c); })
      .run();
  return out;
}

std::vector<Assignment> assign_quotas(const CoreMap& config, double load_rps,
                                      std::span<const Variant> variants) {
  check_config_variants(config, variants);
  const auto order = accuracy_order(variants);
  const double cap = capacity(config, variants, order);
  if (cap < load_rps) {
    throw Error(ErrorKind::kInsufficientCapacity,
                "configuration capacity " + std::to_string(cap) +
                    " rps is below the load " + std::to_string(load_rps) + " rps");
  }
  std::vector<Assignment> out;
  double remaining = load_rps;
  for (std::size_t i : order) {
    auto it = config.find(variants[i].id());
    if (it == config.end()) continue;
    const double quota =
        std::min(predict_throughput(variants[i].model, it->second), remaining);
    remaining -= quota;
    out.push_back({it->first, it->second, quota});
  }
  return out;
}

double average_accuracy(std::span<const Assignment> assignments,
                        std::span<const Variant> variants) {
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& a : assignments) {
    weighted += a.quota_rps * find_variant(variants, a.variant_id).accuracy;
    total += a.quota_rps;
  }
  if (!(total > 0.0))
    throw Error(ErrorKind::kUndefinedAccuracy,
                "average accuracy is undefined for zero total quota");
  return weighted / total;
}

double loading_cost(const CoreMap& next, const CoreMap& prev,
                    std::span<const Variant> variants) {
  double max_rt = 0.0;
  for (const auto& v : variants) max_rt = std::max(max_rt, v.readiness_time_s);
  if (max_rt <= 0.0) return 0.0;

  double loaded = 0.0;
  for (const auto& [id, cores] : next) {
    if (cores == 0) continue;
    auto it = prev.find(id);
    if (it != prev.end() && it->second == cores) continue;
    loaded = std::max(loaded, find_variant(variants, id).readiness_time_s);
  }
  return loaded / max_rt;
}

double objective(double avg_accuracy, double resource_cost_norm,
                 double loading_cost_norm, const PlannerParams& params) {
  return params.alpha * avg_accuracy -
         (params.beta * resource_cost_norm + params.gamma * loading_cost_norm);
}

Plan score_config(const CoreMap& config, std::span<const Variant> variants,
                  const PlannerParams& params, const CoreMap& prev) {
  Plan plan;
  plan.assignments = assign_quotas(config, params.predicted_load_rps, variants);
  plan.avg_accuracy = average_accuracy(plan.assignments, variants);
  plan.resource_cost_norm =
      static_cast<double>(plan.total_cores()) / params.budget_cores;
  plan.loading_cost_norm = loading_cost(config, prev, variants);
  plan.objective = objective(plan.avg_accuracy, plan.resource_cost_norm,
                             plan.loading_cost_norm, params);
  return plan;
}

bool plan_preferred(const Plan& a, const Plan& b) {
  if (a.objective != b.objective) return a.objective > b.objective;
  if (a.avg_accuracy != b.avg_accuracy) return a.avg_accuracy > b.avg_accuracy;
  if (a.total_cores() != b.total_cores()) return a.total_cores() < b.total_cores();
  return a.config() < b.config();
}

Plan solve(std::span<const Variant> variants, const PlannerParams& params,
           const CoreMap& prev, const SolveOptions& options) {
  params.validate();
  if (variants.size() > kMaxSolverVariants || params.budget_cores > kMaxSolverBudget) {
    throw Error(ErrorKind::kInstanceTooLarge,
                "solver supports at most " + std::to_string(kMaxSolverVariants) +
                    " variants and " + std::to_string(kMaxSolverBudget) +
                    " cores");
  }
  const PlannerParams p = clamped(params);

  Plan best;
  bool found = false;
  Generator(variants, p, options, [&](const CoreMap& c) {
    Plan candidate = score_config(c, variants, p, prev);
    if (!found || plan_preferred(candidate, best)) {
      best = std::move(candidate);
      found = true;
    }
  }).run();

  if (!found) {
    throw Error(ErrorKind::kInfeasible,
                "no configuration within " + std::to_string(p.budget_cores) +
                    " cores sustains " + std::to_string(p.predicted_load_rps) +
                    " rps under the " + std::to_string(p.slo_ms) + " ms SLO");
  }
  return best;
}

std::vector<CoreMap> enumerate_all_feasible(std::span<const Variant> variants,
                                            const PlannerParams& params,
                                            const SolveOptions& options) {
  params.validate();
  if (variants.size() > kMaxOracleVariants || params.budget_cores > kMaxOracleBudget) {
    throw Error(ErrorKind::kInstanceTooLarge,
                "oracle supports at most " + std::to_string(kMaxOracleVariants) +
                    " variants and " + std::to_string(kMaxOracleBudget) +
                    " cores");
  }
  const auto order = accuracy_order(variants);
  std::vector<CoreMap> out;
  CoreMap current;

  // Plain odometer over every variant's cores in {0} U [min, budget].
  std::function<void(std::size_t, int)> visit = [&](std::size_t i, int left) {
    if (i == variants.size()) {
      if (current.empty() || current.size() > options.max_variants) return;
      if (capacity(current, variants, order) >= params.predicted_load_rps)
        out.push_back(current);
      return;
    }
    visit(i + 1, left);
    const Variant& v = variants[i];
    for (int n = params.min_cores_per_variant; n <= left; ++n) {
      if (predict_latency(v.model, n) > params.slo_ms) continue;
      current[v.id()] = n;
      visit(i + 1, left - n);
      current.erase(v.id());
    }
  };
  visit(0, params.budget_cores);
  return out;
}

Plan brute_force_solve(std::span<const Variant> variants,
                       const PlannerParams& params, const CoreMap& prev,
                       const SolveOptions& options) {
  const PlannerParams p = clamped(params);
  Plan best;
  bool found = false;
  for (const auto& c : enumerate_all_feasible(variants, p, options)) {
    Plan candidate = score_config(c, variants, p, prev);
    if (!found || plan_preferred(candidate, best)) {
      best = std::move(candidate);
      found = true;
    }
  }
  if (!found) throw Error(ErrorKind::kInfeasible, "no feasible configuration");
  return best;
}

nlohmann::json to_json(const Plan& plan) {
  nlohmann::json assignments = nlohmann::json::array();
  for (const auto& a : plan.assignments)
    assignments.push_back(
        {{"variant", a.variant_id}, {"cores", a.cores}, {"quota_rps", a.quota_rps}});
  nlohmann::json doc = {{"assignments", assignments},
                        {"aa", plan.avg_accuracy},
                        {"rc", plan.resource_cost_norm},
                        {"lc", plan.loading_cost_norm},
                        {"objective", plan.objective}};
  if (plan.under_provisioned) doc["under_provisioned"] = true;
  return doc;
}

Plan plan_from_json(const nlohmann::json& doc) {
  try {
    Plan plan;
    for (const auto& a : doc.at("assignments"))
      plan.assignments.push_back({a.at("variant").get<std::string>(),
                                  a.at("cores").get<int>(),
                                  a.value("quota_rps", 0.0)});
    plan.avg_accuracy = doc.value("aa", 0.0);
    plan.resource_cost_norm = doc.value("rc", 0.0);
    plan.loading_cost_norm = doc.value("lc", 0.0);
    plan.objective = doc.value("objective", 0.0);
    plan.under_provisioned = doc.value("under_provisioned", false);
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("plan: ") + e.what());
  }
}

}  // namespace mixserve
