#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace mixserve {

// Per-second request counts; index i holds the arrivals of second i.
struct WorkloadTrace {
  std::vector<std::int64_t> counts;
  // Mixed into the simulator seed to place arrivals within each second.
  std::uint64_t arrival_seed = 0;

  std::int64_t duration_s() const { return static_cast<std::int64_t>(counts.size()); }
  std::int64_t total_requests() const;
  std::int64_t peak() const;

  bool operator==(const WorkloadTrace&) const = default;
};

// CSV `second,count`, optional header line. Seconds must increase; missing
// seconds (including any before the first row) become zero-count samples.
// Throws Error(kParse) with the offending line number, or
// Error(kNonContiguous) when a second repeats or goes backwards.
WorkloadTrace parse_trace(std::istream& in, const std::string& source = "<trace>");
WorkloadTrace load_trace(const std::filesystem::path& path);
void write_trace_csv(std::ostream& out, const WorkloadTrace& trace);

struct SteadyShape {
  double rate = 0.0;
};

// `base` outside [t_start, t_end) and `peak` inside. With decay_s > 0 the
// load falls linearly from peak back to base over decay_s seconds after
// t_end instead of stepping down.
struct SpikeShape {
  double base = 0.0;
  double peak = 0.0;
  std::int64_t t_start = 0;
  std::int64_t t_end = 0;
  std::int64_t decay_s = 0;
};

// Second k carries round(from + k * (to - from) / (duration - 1)).
struct RampShape {
  double from = 0.0;
  double to = 0.0;
};

using TraceShape = std::variant<SteadyShape, SpikeShape, RampShape>;

// Throws Error(kInvalidBounds) on negative rates, a non-positive duration, or
// spike bounds outside [0, duration].
WorkloadTrace synth_trace(const TraceShape& shape, std::int64_t duration_s,
                          std::uint64_t seed = 0);

// "steady:R", "spike:BASE,PEAK,START,END[,DECAY]" or "ramp:FROM,TO".
TraceShape parse_trace_shape(const std::string& text);

// Twenty-minute bursty scenario: steady, a spike over [600, 800), a gradual
// decrease until 1000 s and the initial load afterwards.
WorkloadTrace bursty_scenario(double base_rps, double peak_rps, std::uint64_t seed = 0);

// Twenty-minute non-bursty scenario: a slow linear ramp.
WorkloadTrace non_bursty_scenario(double from_rps, double to_rps,
                                  std::uint64_t seed = 0);

}  // namespace mixserve
