#pragma once

#include <span>
#include <string>

#include "mixserve/planner.hpp"

namespace mixserve {

enum class BaselineKind { kMsPlus, kVpaPlus };

struct BaselineSpec {
  BaselineKind kind = BaselineKind::kMsPlus;
  std::string fixed_variant_id;  // kVpaPlus only

  // Throws Error(kInvalidParams) if a VPA+ spec names an unknown variant.
  void validate(std::span<const Variant> variants) const;
};

// Model switching with predictive sizing: the planner objective restricted to
// single-variant configurations.
Plan solve_ms_plus(std::span<const Variant> variants, const PlannerParams& params,
                   const CoreMap& prev = {});

// Vertical scaling of one fixed variant: the fewest cores whose predicted
// throughput covers the load within the SLO, capped at the budget. A capped
// allocation that still falls short is returned with under_provisioned set.
// `prev` only feeds the reported loading cost.
Plan solve_vpa_plus(const Variant& fixed_variant, const PlannerParams& params,
                    std::span<const Variant> all_variants = {},
                    const CoreMap& prev = {});

}  // namespace mixserve
