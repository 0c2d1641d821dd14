#include "mixserve/dispatcher.hpp"

#include <algorithm>
#include <cmath>

#include "mixserve/error.hpp"

namespace mixserve {

std::int64_t integer_weight(double quota_rps) {
  if (!(quota_rps > 0.0)) return 0;
  return std::max<std::int64_t>(1, std::llround(quota_rps));
}

std::uint64_t Dispatcher::set_quotas(const std::vector<QuotaEntry>& table) {
  std::vector<Slot> slots;
  std::int64_t total = 0;
  for (const auto& e : table) {
    if (!(e.weight >= 0.0))
      throw Error(ErrorKind::kInvalidTable,
                  "negative weight for '" + e.variant_id + "'");
    const std::int64_t w = integer_weight(e.weight);
    if (w == 0) continue;
    auto it = std::find_if(slots.begin(), slots.end(),
                           [&](const Slot& s) { return s.variant_id == e.variant_id; });
    if (it != slots.end()) {
      throw Error(ErrorKind::kInvalidTable,
                  "duplicate entry for '" + e.variant_id + "'");
    }
    slots.push_back({e.variant_id, w, 0});
    total += w;
  }
  if (total == 0)
    throw Error(ErrorKind::kInvalidTable, "quota table has no positive weight");
  std::sort(slots.begin(), slots.end(),
            [](const Slot& a, const Slot& b) { return a.variant_id < b.variant_id; });

  std::lock_guard lock(mu_);
  slots_ = std::move(slots);
  total_ = total;
  return ++epoch_;
}

std::string Dispatcher::next_target() {
  std::lock_guard lock(mu_);
  if (slots_.empty())
    throw Error(ErrorKind::kNotConfigured, "dispatcher has no quota table");
  Slot* best = nullptr;
  for (auto& s : slots_) {
    s.current += s.weight;
    // Strict comparison keeps the lowest id on ties (slots are id-ordered).
    if (best == nullptr || s.current > best->current) best = &s;
  }
  best->current -= total_;
  return best->variant_id;
}

std::uint64_t Dispatcher::epoch() const {
  std::lock_guard lock(mu_);
  return epoch_;
}

std::vector<std::pair<std::string, std::int64_t>> Dispatcher::weights() const {
  std::lock_guard lock(mu_);
  std::vector<std::pair<std::string, std::int64_t>> out;
  out.reserve(slots_.size());
  for (const auto& s : slots_) out.emplace_back(s.variant_id, s.weight);
  return out;
}

}  // namespace mixserve
