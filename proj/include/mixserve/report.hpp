#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "mixserve/simulator.hpp"

namespace mixserve {

void write_requests_csv(std::ostream& out, const SimReport& report);
void write_plans_csv(std::ostream& out, const SimReport& report);
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

// summary.json, requests.csv and plans.csv under `dir` (created if needed).
void write_report(const std::filesystem::path& dir, const SimReport& report);

}  // namespace mixserve
