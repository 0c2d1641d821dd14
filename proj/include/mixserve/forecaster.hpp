#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>

namespace mixserve {

struct LoadSample {
  std::int64_t timestamp_s = 0;
  double count = 0.0;
};

// Per-second request counts over the most recent `capacity` seconds.
class LoadHistory {
 public:
  static constexpr std::size_t kDefaultCapacity = 600;

  explicit LoadHistory(std::size_t capacity = kDefaultCapacity);

  // Appends a sample; skipped seconds are filled with zero counts.
  // Throws Error(kOrdering) unless timestamp_s is after the last sample.
  void record(std::int64_t timestamp_s, double count);

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  std::size_t capacity() const { return capacity_; }
  const std::deque<LoadSample>& samples() const { return samples_; }

 private:
  void push(std::int64_t timestamp_s, double count);

  std::size_t capacity_;
  std::deque<LoadSample> samples_;
};

// Maps recent load history to the expected peak rate of the next window.
class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual double predict_next_max(const LoadHistory& history) const = 0;
};

struct TrendMaxSettings {
  double horizon_s = 60.0;
  double headroom = 1.1;
  std::size_t window_s = 120;
};

// headroom * max(window max, last + horizon * trend slope, 0), clamped to
// >= 1. The trend slope is the least-squares slope over the window.
class TrendMaxForecaster final : public Forecaster {
 public:
  explicit TrendMaxForecaster(TrendMaxSettings settings = {});

  double predict_next_max(const LoadHistory& history) const override;

  const TrendMaxSettings& settings() const { return settings_; }

 private:
  TrendMaxSettings settings_;
};

double predict_next_max(const LoadHistory& history, double horizon_s = 60.0,
                        double headroom = 1.1);

}  // namespace mixserve
