#include "mixserve/baselines.hpp"

#include <algorithm>

#include "mixserve/error.hpp"

namespace mixserve {

void BaselineSpec::validate(std::span<const Variant> variants) const {
  if (kind != BaselineKind::kVpaPlus) return;
  for (const auto& v : variants)
    if (v.id() == fixed_variant_id) return;
  throw Error(ErrorKind::kInvalidParams,
              "vpa_plus variant '" + fixed_variant_id + "' is not profiled");
}

Plan solve_ms_plus(std::span<const Variant> variants, const PlannerParams& params,
                   const CoreMap& prev) {
  SolveOptions options;
  options.max_variants = 1;
  return solve(variants, params, prev, options);
}

Plan solve_vpa_plus(const Variant& fixed_variant, const PlannerParams& params,
                    std::span<const Variant> all_variants, const CoreMap& prev) {
  params.validate();
  const double load = std::max(1.0, params.predicted_load_rps);

  int cores = params.budget_cores;
  bool met = false;
  for (int n = params.min_cores_per_variant; n <= params.budget_cores; ++n) {
    if (predict_throughput(fixed_variant.model, n) >= load &&
        predict_latency(fixed_variant.model, n) <= params.slo_ms) {
      cores = n;
      met = true;
      break;
    }
  }

  Plan plan;
  plan.assignments.push_back({fixed_variant.id(), cores, load});
  plan.under_provisioned = !met;
  plan.avg_accuracy = fixed_variant.accuracy;
  plan.resource_cost_norm = static_cast<double>(cores) / params.budget_cores;
  const std::span<const Variant> scope =
      all_variants.empty() ? std::span<const Variant>(&fixed_variant, 1)
                           : all_variants;
  plan.loading_cost_norm = loading_cost(plan.config(), prev, scope);
  plan.objective = objective(plan.avg_accuracy, plan.resource_cost_norm,
                             plan.loading_cost_norm, params);
  return plan;
}

}  // namespace mixserve
