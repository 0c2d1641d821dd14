#include "mixserve/forecaster.hpp"

#include <algorithm>
#include <string>

#include "mixserve/error.hpp"

namespace mixserve {

LoadHistory::LoadHistory(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0)
    throw Error(ErrorKind::kInvalidParams, "history capacity must be > 0");
}

void LoadHistory::record(std::int64_t timestamp_s, double count) {
  if (!(count >= 0.0))
    throw Error(ErrorKind::kInvalidParams, "negative load sample");
  if (!samples_.empty()) {
    const std::int64_t last = samples_.back().timestamp_s;
    if (timestamp_s <= last) {
      throw Error(ErrorKind::kOrdering,
                  "sample at t=" + std::to_string(timestamp_s) +
                      " is not after t=" + std::to_string(last));
    }
    // Only the zeros that can survive eviction are materialized.
    const std::int64_t gap_start = std::max<std::int64_t>(
        last + 1, timestamp_s - static_cast<std::int64_t>(capacity_));
    for (std::int64_t t = gap_start; t < timestamp_s; ++t) push(t, 0.0);
  }
  push(timestamp_s, count);
}

void LoadHistory::push(std::int64_t timestamp_s, double count) {
  samples_.push_back({timestamp_s, count});
  while (samples_.size() > capacity_) samples_.pop_front();
}

TrendMaxForecaster::TrendMaxForecaster(TrendMaxSettings settings)
    : settings_(settings) {
  if (!(settings_.headroom > 0.0) || !(settings_.horizon_s >= 0.0) ||
      settings_.window_s == 0) {
    throw Error(ErrorKind::kInvalidParams, "invalid forecaster settings");
  }
}

double TrendMaxForecaster::predict_next_max(const LoadHistory& history) const {
  if (history.empty())
    throw Error(ErrorKind::kNoData, "cannot forecast from an empty history");

  const auto& s = history.samples();
  const std::size_t n = std::min(settings_.window_s, s.size());
  const auto first = s.end() - static_cast<std::ptrdiff_t>(n);

  double window_max = 0.0;
  double mean_t = 0.0;
  double mean_y = 0.0;
  for (auto it = first; it != s.end(); ++it) {
    window_max = std::max(window_max, it->count);
    mean_t += static_cast<double>(it->timestamp_s);
    mean_y += it->count;
  }
  mean_t /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);

  double slope = 0.0;
  if (n >= 2) {
    double stt = 0.0;
    double sty = 0.0;
    for (auto it = first; it != s.end(); ++it) {
      const double dt = static_cast<double>(it->timestamp_s) - mean_t;
      stt += dt * dt;
      sty += dt * (it->count - mean_y);
    }
    slope = sty / stt;
  }

  const double extrapolated = s.back().count + settings_.horizon_s * slope;
  const double peak = std::max({window_max, extrapolated, 0.0});
  return std::max(1.0, settings_.headroom * peak);
}

double predict_next_max(const LoadHistory& history, double horizon_s,
                        double headroom) {
  TrendMaxSettings settings;
  settings.horizon_s = horizon_s;
  settings.headroom = headroom;
  return TrendMaxForecaster(settings).predict_next_max(history);
}

}  // namespace mixserve
