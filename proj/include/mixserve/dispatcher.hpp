#pragma once

#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

namespace mixserve {

struct QuotaEntry {
  std::string variant_id;
  double weight = 0.0;  // quota in rps
};

// Quota in rps -> round-robin weight: nearest integer, at least 1 for any
// strictly positive quota, 0 otherwise.
std::int64_t integer_weight(double quota_rps);

// Smooth weighted round-robin over the active quota table. Selections and
// table swaps are serialized, so concurrent callers observe a linearizable
// sequence.
class Dispatcher {
 public:
  // Replaces the active table and returns the new epoch. Throws
  // Error(kInvalidTable) on negative weights or when no weight is positive;
  // the active table is left untouched in that case.
  std::uint64_t set_quotas(const std::vector<QuotaEntry>& table);

  // Throws Error(kNotConfigured) before the first successful set_quotas.
  std::string next_target();

  std::uint64_t epoch() const;

  // Active (variant, integer weight) pairs, ordered by variant id.
  std::vector<std::pair<std::string, std::int64_t>> weights() const;

 private:
  struct Slot {
    std::string variant_id;
    std::int64_t weight = 0;
    std::int64_t current = 0;
  };

  mutable std::mutex mu_;
  std::vector<Slot> slots_;
  std::int64_t total_ = 0;
  std::uint64_t epoch_ = 0;
};

}  // namespace mixserve
