#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace mixserve {

// One profiled operating point: sustained throughput under the latency SLO
// and the p99 latency observed at saturation.
struct ProfilePoint {
  int cores = 1;
  double throughput_rps = 0.0;
  double p99_latency_ms = 1.0;

  bool operator==(const ProfilePoint&) const = default;
};

// Serving-runtime settings the profile was captured with. Informational only.
struct Parallelism {
  int batch = 1;
  int inter_op = 1;
  int intra_op = 1;

  bool operator==(const Parallelism&) const = default;
};

struct VariantProfile {
  std::string variant_id;
  double accuracy = 0.0;
  double readiness_time_s = 0.0;
  std::vector<ProfilePoint> points;
  Parallelism parallelism;

  bool operator==(const VariantProfile&) const = default;
};

// Throws Error(kInvalidProfile) when any VariantProfile invariant is broken.
void validate(const VariantProfile& profile);

// Fitted throughput line plus the raw latency points used for conservative
// latency lookup.
struct PerfModel {
  std::string variant_id;
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<std::pair<int, double>> latency_points;
  double r_squared = 1.0;
  bool slope_clamped = false;
};

// Ordinary least squares of throughput on cores. Requires at least two points
// with strictly increasing cores. A negative slope is clamped to 0 and the
// intercept refit to the mean throughput.
PerfModel fit_perf_model(const VariantProfile& profile);

// max(0, slope * cores + intercept); exactly 0 for cores == 0.
double predict_throughput(const PerfModel& model, int cores);

// p99 of the largest profiled allocation not above `cores`, or of the
// smallest profiled allocation when `cores` is below all of them.
double predict_latency(const PerfModel& model, int cores);

std::vector<VariantProfile> parse_profiles(const nlohmann::json& doc);
std::vector<VariantProfile> load_profiles(const std::filesystem::path& path);

nlohmann::json to_json(const VariantProfile& profile);
nlohmann::json to_json(const PerfModel& model);

}  // namespace mixserve
