#pragma once

#include <random>
#include <string>
#include <vector>

#include "mixserve/planner.hpp"
#include "mixserve/profiles.hpp"

namespace mixserve::testing {

inline VariantProfile linear_profile(const std::string& id, double accuracy,
                                     double readiness_s, double rps_per_core,
                                     double intercept = 0.0, double p99_ms = 100.0) {
  VariantProfile p;
  p.variant_id = id;
  p.accuracy = accuracy;
  p.readiness_time_s = readiness_s;
  for (int c : {1, 2, 4, 8, 16})
    p.points.push_back({c, rps_per_core * c + intercept, p99_ms});
  return p;
}

// Exact line, no regression in between.
inline Variant linear_variant(const std::string& id, double accuracy, double readiness_s,
                              double rps_per_core, double intercept = 0.0,
                              double p99_ms = 100.0) {
  Variant v;
  v.model.variant_id = id;
  v.model.slope = rps_per_core;
  v.model.intercept = intercept;
  for (int c : {1, 2, 4, 8, 16}) v.model.latency_points.emplace_back(c, p99_ms);
  v.accuracy = accuracy;
  v.readiness_time_s = readiness_s;
  return v;
}

// Planner fixture with three linear variants: A fast and inaccurate, C slow
// and accurate.
inline std::vector<Variant> fixture_f1() {
  return {linear_variant("A", 0.70, 5, 10), linear_variant("B", 0.76, 10, 5),
          linear_variant("C", 0.78, 15, 2)};
}

inline std::string repo_path(const std::string& rel) {
  return std::string(MIXSERVE_SOURCE_DIR) + "/" + rel;
}

struct RandomInstance {
  std::vector<Variant> variants;
  PlannerParams params;
  CoreMap prev;
};

// Random linear-profile instance within the exhaustive oracle's limits.
// Latencies step down with cores and sometimes exceed the SLO at low cores.
inline RandomInstance random_instance(std::mt19937_64& rng, int max_variants = 4,
                                      int max_budget = 12, double max_load = 200.0) {
  std::uniform_int_distribution<int> n_variants(1, max_variants);
  std::uniform_int_distribution<int> budget(1, max_budget);
  std::uniform_real_distribution<double> slope(0.5, 30.0);
  std::uniform_real_distribution<double> intercept(-2.0, 5.0);
  std::uniform_int_distribution<int> acc_pick(0, 9);
  std::uniform_real_distribution<double> rt(0.0, 20.0);
  std::uniform_real_distribution<double> load(0.0, max_load);
  std::uniform_real_distribution<double> lat(300.0, 1100.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  RandomInstance inst;
  const int m = n_variants(rng);
  for (int i = 0; i < m; ++i) {
    VariantProfile p;
    p.variant_id = std::string(1, static_cast<char>('a' + i));
    // Coarse accuracy grid so accuracy ties occur.
    p.accuracy = 0.60 + 0.02 * acc_pick(rng);
    p.readiness_time_s = rt(rng);
    const double s = slope(rng);
    const double b = intercept(rng);
    double p99 = lat(rng);
    for (int c : {1, 2, 4, 8, 16}) {
      p.points.push_back({c, std::max(0.0, s * c + b), p99});
      p99 *= 0.85;
    }
    inst.variants.push_back(make_variant(p));
  }
  inst.params.budget_cores = budget(rng);
  inst.params.slo_ms = 750.0;
  inst.params.alpha = 1.0;
  const double betas[] = {0.0, 0.0125, 0.05, 0.2};
  inst.params.beta = betas[rng() % 4];
  const double gammas[] = {0.0, 0.01, 0.05};
  inst.params.gamma = gammas[rng() % 3];
  inst.params.predicted_load_rps = load(rng);
  for (const auto& v : inst.variants) {
    if (unit(rng) < 0.4) inst.prev[v.id()] = 1 + static_cast<int>(rng() % 6);
  }
  return inst;
}

}  // namespace mixserve::testing
