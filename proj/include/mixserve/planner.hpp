#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixserve/profiles.hpp"

namespace mixserve {

// A deployable model variant: its fitted performance model plus the two
// profile facts the planner scores with.
struct Variant {
  PerfModel model;
  double accuracy = 0.0;
  double readiness_time_s = 0.0;

  const std::string& id() const { return model.variant_id; }
};

Variant make_variant(const VariantProfile& profile);
std::vector<Variant> make_variants(const std::vector<VariantProfile>& profiles);

struct PlannerParams {
  double slo_ms = 750.0;
  int budget_cores = 16;
  double alpha = 1.0;
  double beta = 0.05;
  double gamma = 0.05;
  int min_cores_per_variant = 1;
  double predicted_load_rps = 1.0;

  // Throws Error(kInvalidParams).
  void validate() const;
};

// variant id -> allocated cores. Ordered by id, which is also the order used
// for the lexicographic tie-break between equally scored plans.
using CoreMap = std::map<std::string, int>;

struct Assignment {
  std::string variant_id;
  int cores = 0;
  double quota_rps = 0.0;

  bool operator==(const Assignment&) const = default;
};

struct Plan {
  // Ordered by descending accuracy (ties by id), i.e. quota-filling order.
  std::vector<Assignment> assignments;
  double avg_accuracy = 0.0;
  double resource_cost_norm = 0.0;
  double loading_cost_norm = 0.0;
  double objective = -std::numeric_limits<double>::infinity();
  // Set by fixed-variant scaling when the budget cannot carry the load.
  bool under_provisioned = false;

  CoreMap config() const;
  int total_cores() const;
  double total_quota() const;
};

// Upper limits for the exact solver.
inline constexpr std::size_t kMaxSolverVariants = 8;
inline constexpr int kMaxSolverBudget = 64;
// Upper limits for the exhaustive oracle.
inline constexpr std::size_t kMaxOracleVariants = 5;
inline constexpr int kMaxOracleBudget = 16;

struct SolveOptions {
  // 1 restricts the search to single-variant configurations.
  std::size_t max_variants = std::numeric_limits<std::size_t>::max();
};

// Recursive configuration generator. Variants are visited by descending
// accuracy (ties by id); a branch is recorded and no longer extended once its
// predicted capacity covers the load. Every recorded map respects the budget,
// the per-variant minimum, and the latency SLO.
std::vector<CoreMap> enumerate_configs(std::span<const Variant> variants,
                                       const PlannerParams& params,
                                       const SolveOptions& options = {});

// Greedy quota filling from the most accurate variant down. Every variant in
// the config receives an entry, possibly with zero quota.
std::vector<Assignment> assign_quotas(const CoreMap& config, double load_rps,
                                      std::span<const Variant> variants);

double average_accuracy(std::span<const Assignment> assignments,
                        std::span<const Variant> variants);

// Largest readiness time among variants that must be (re)loaded, divided by
// the largest readiness time of all variants.
double loading_cost(const CoreMap& next, const CoreMap& prev,
                    std::span<const Variant> variants);

double objective(double avg_accuracy, double resource_cost_norm,
                 double loading_cost_norm, const PlannerParams& params);

// Quotas and objective breakdown for one configuration. The load is taken
// from params.predicted_load_rps as given (no clamping).
Plan score_config(const CoreMap& config, std::span<const Variant> variants,
                  const PlannerParams& params, const CoreMap& prev);

// Returns true when `a` should be preferred over `b`: higher objective, then
// higher AA, then fewer cores, then the lexicographically smaller config.
bool plan_preferred(const Plan& a, const Plan& b);

// Exact optimum of the planning objective. The load is clamped to >= 1 rps.
// Throws Error(kInfeasible) when no configuration meets load and SLO.
Plan solve(std::span<const Variant> variants, const PlannerParams& params,
           const CoreMap& prev = {}, const SolveOptions& options = {});

// Exhaustive oracle over every allocation map, without pruning. Limited to
// kMaxOracleVariants variants and kMaxOracleBudget cores.
Plan brute_force_solve(std::span<const Variant> variants,
                       const PlannerParams& params, const CoreMap& prev = {},
                       const SolveOptions& options = {});

// Every feasible allocation map the oracle considers, in no particular order.
std::vector<CoreMap> enumerate_all_feasible(std::span<const Variant> variants,
                                            const PlannerParams& params,
                                            const SolveOptions& options = {});

nlohmann::json to_json(const Plan& plan);
Plan plan_from_json(const nlohmann::json& doc);

}  // namespace mixserve
