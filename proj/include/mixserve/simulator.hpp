#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixserve/forecaster.hpp"
#include "mixserve/planner.hpp"
#include "mixserve/profiles.hpp"
#include "mixserve/trace.hpp"

namespace mixserve {

enum class PolicyKind { kInfAdapter, kMsPlus, kVpaPlus };

struct Policy {
  PolicyKind kind = PolicyKind::kInfAdapter;
  std::string fixed_variant_id;  // kVpaPlus only

  // "infadapter", "ms_plus" or "vpa_plus:<variant>".
  std::string label() const;
  static Policy parse(const std::string& text);

  bool operator==(const Policy&) const = default;
};

struct SimConfig {
  WorkloadTrace trace;
  std::vector<VariantProfile> profiles;
  // predicted_load_rps is overwritten by the forecaster at every decision.
  PlannerParams planner;
  int adaptation_interval_s = 30;
  TrendMaxSettings forecaster;
  std::uint64_t seed = 0;
  Policy policy;
  // Load used for the warm-started plan at t = 0. Defaults to the first
  // second of the trace scaled by the forecaster headroom.
  std::optional<double> initial_load_rps;

  void validate() const;
};

struct RequestRecord {
  double arrival_s = 0.0;
  std::string variant_id;
  double latency_ms = 0.0;
  double accuracy = 0.0;
  bool violated = false;
  bool completed = false;
};

// One adaptation decision.
struct IntervalRecord {
  double time_s = 0.0;
  double predicted_load_rps = 0.0;
  Plan plan;
  bool fallback = false;
  // Time at which every station of `plan` is serving.
  double ready_at_s = 0.0;
  // Planner objective on the same load and previous configuration, without
  // and with the single-variant restriction. Empty when infeasible.
  std::optional<double> unrestricted_objective;
  std::optional<double> single_variant_objective;
};

struct SimReport {
  std::string policy;
  std::vector<RequestRecord> requests;
  std::vector<IntervalRecord> intervals;

  std::int64_t total_arrivals = 0;
  std::int64_t completed = 0;
  std::int64_t in_queue_at_end = 0;
  double p99_latency_ms = 0.0;
  double slo_violation_fraction = 0.0;
  double mean_accuracy = 0.0;
  double accuracy_loss = 0.0;
  double core_seconds = 0.0;
  std::int64_t fallback_count = 0;
};

// Trace-driven discrete-event run of the adaptation loop. Each deployed
// (variant, cores) pair is an FCFS station with `cores` parallel servers and
// a deterministic service time of cores / throughput(cores) seconds.
SimReport run(const SimConfig& config);

// Nearest-rank percentile, q in (0, 1]. Returns 0 for an empty sample.
double percentile(std::vector<double> values, double q);

struct ComparisonRow {
  std::string policy;
  double beta = 0.0;
  double accuracy_loss = 0.0;
  double core_seconds = 0.0;
  double p99_latency_ms = 0.0;
  double slo_violation_fraction = 0.0;
  double objective_sum = 0.0;
  std::int64_t fallback_count = 0;
};

// Runs every config (in parallel) and tabulates the aggregates in input
// order. Throws Error(kTraceMismatch) unless all configs share the trace and
// profiles.
std::vector<ComparisonRow> compare(const std::vector<SimConfig>& configs);

nlohmann::json summary_json(const SimReport& report);
nlohmann::json to_json(const ComparisonRow& row);

}  // namespace mixserve
