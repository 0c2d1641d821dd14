#include "mixserve/report.hpp"

#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "mixserve/error.hpp"

namespace mixserve {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  return out;
}

std::string optional_field(const std::optional<double>& v) {
  return v ? fmt::format("{}", *v) : std::string();
}

}  // namespace

void write_requests_csv(std::ostream& out, const SimReport& report) {
  out << "arrival_s,variant,latency_ms,accuracy,violated\n";
  for (const auto& r : report.requests) {
    fmt::print(out, "{},{},{},{},{}\n", r.arrival_s, r.variant_id, r.latency_ms,
               r.accuracy, r.violated ? 1 : 0);
  }
}

void write_plans_csv(std::ostream& out, const SimReport& report) {
  out << "time_s,predicted_load_rps,assignments,total_cores,aa,rc,lc,objective,"
         "fallback,under_provisioned,ready_at_s,unrestricted_objective,"
         "single_variant_objective\n";
  for (const auto& iv : report.intervals) {
    std::string assignments;
    for (const auto& a : iv.plan.assignments) {
      if (!assignments.empty()) assignments += ';';
      assignments += fmt::format("{}:{}:{}", a.variant_id, a.cores, a.quota_rps);
    }
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{},{}\n", iv.time_s,
               iv.predicted_load_rps, assignments, iv.plan.total_cores(),
               iv.plan.avg_accuracy, iv.plan.resource_cost_norm,
               iv.plan.loading_cost_norm, iv.plan.objective, iv.fallback ? 1 : 0,
               iv.plan.under_provisioned ? 1 : 0, iv.ready_at_s,
               optional_field(iv.unrestricted_objective),
               optional_field(iv.single_variant_objective));
  }
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "policy,beta,accuracy_loss,core_seconds,p99_latency_ms,"
         "slo_violation_fraction,objective_sum,fallback_count\n";
  for (const auto& r : rows) {
    fmt::print(out, "{},{},{},{},{},{},{},{}\n", r.policy, r.beta, r.accuracy_loss,
               r.core_seconds, r.p99_latency_ms, r.slo_violation_fraction,
               r.objective_sum, r.fallback_count);
  }
}

void write_report(const std::filesystem::path& dir, const SimReport& report) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir.string() + ": " + ec.message());
  {
    auto out = open_out(dir / "summary.json");
    out << summary_json(report).dump(2) << '\n';
  }
  {
    auto out = open_out(dir / "requests.csv");
    write_requests_csv(out, report);
  }
  {
    auto out = open_out(dir / "plans.csv");
    write_plans_csv(out, report);
  }
}

}  // namespace mixserve
