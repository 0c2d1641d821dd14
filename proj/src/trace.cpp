#include "mixserve/trace.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "mixserve/error.hpp"

namespace mixserve {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_int(const std::string& s, std::int64_t& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::int64_t to_count(double rate) {
  return static_cast<std::int64_t>(std::llround(rate));
}

std::vector<double> parse_numbers(const std::string& body, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (trim(item.substr(used)).size() != 0) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kParse, "bad number in trace shape '" + text + "'");
    }
  }
  return out;
}

}  // namespace

std::int64_t WorkloadTrace::total_requests() const {
  std::int64_t sum = 0;
  for (auto c : counts) sum += c;
  return sum;
}

std::int64_t WorkloadTrace::peak() const {
  return counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
}

WorkloadTrace parse_trace(std::istream& in, const std::string& source) {
  WorkloadTrace trace;
  std::string line;
  std::size_t line_no = 0;
  bool seen_row = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto where = source + ":" + std::to_string(line_no);
    const auto comma = text.find(',');
    if (comma == std::string::npos)
      throw Error(ErrorKind::kParse, where + ": expected 'second,count'");
    const std::string first = trim(std::string_view(text).substr(0, comma));
    const std::string second = trim(std::string_view(text).substr(comma + 1));

    std::int64_t sec = 0;
    std::int64_t count = 0;
    if (!parse_int(first, sec) || !parse_int(second, count)) {
      if (!seen_row && !first.empty() &&
          std::isalpha(static_cast<unsigned char>(first[0]))) {
        continue;  // header
      }
      throw Error(ErrorKind::kParse, where + ": malformed row '" + text + "'");
    }
    if (sec < 0 || count < 0)
      throw Error(ErrorKind::kParse, where + ": negative second or count");
    if (sec < trace.duration_s()) {
      throw Error(ErrorKind::kNonContiguous,
                  where + ": second " + std::to_string(sec) +
                      " does not follow second " +
                      std::to_string(trace.duration_s() - 1));
    }
    trace.counts.resize(static_cast<std::size_t>(sec), 0);
    trace.counts.push_back(count);
    seen_row = true;
  }
  return trace;
}

WorkloadTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open trace file " + path.string());
  return parse_trace(in, path.string());
}

void write_trace_csv(std::ostream& out, const WorkloadTrace& trace) {
  out << "second,count\n";
  for (std::size_t i = 0; i < trace.counts.size(); ++i)
    out << i << ',' << trace.counts[i] << '\n';
}

WorkloadTrace synth_trace(const TraceShape& shape, std::int64_t duration_s,
                          std::uint64_t seed) {
  if (duration_s <= 0)
    throw Error(ErrorKind::kInvalidBounds, "trace duration must be > 0");
  WorkloadTrace trace;
  trace.arrival_seed = seed;
  trace.counts.resize(static_cast<std::size_t>(duration_s));

  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, SteadyShape>) {
          if (!(s.rate >= 0.0)) throw Error(ErrorKind::kInvalidBounds, "negative rate");
          std::fill(trace.counts.begin(), trace.counts.end(), to_count(s.rate));
        } else if constexpr (std::is_same_v<T, SpikeShape>) {
          if (!(s.base >= 0.0 && s.peak >= 0.0))
            throw Error(ErrorKind::kInvalidBounds, "negative rate");
          if (s.t_start < 0 || s.t_end < s.t_start || s.t_end > duration_s ||
              s.decay_s < 0)
            throw Error(ErrorKind::kInvalidBounds, "spike bounds outside the trace");
          for (std::int64_t t = 0; t < duration_s; ++t) {
            double rate = s.base;
            if (t >= s.t_start && t < s.t_end) {
              rate = s.peak;
            } else if (t >= s.t_end && t < s.t_end + s.decay_s) {
              const double frac = static_cast<double>(t - s.t_end) / s.decay_s;
              rate = s.peak + (s.base - s.peak) * frac;
            }
            trace.counts[static_cast<std::size_t>(t)] = to_count(rate);
          }
        } else {
          if (!(s.from >= 0.0 && s.to >= 0.0))
            throw Error(ErrorKind::kInvalidBounds, "negative rate");
          const double span = duration_s > 1 ? static_cast<double>(duration_s - 1) : 1.0;
          for (std::int64_t k = 0; k < duration_s; ++k)
            trace.counts[static_cast<std::size_t>(k)] =
                to_count(s.from + static_cast<double>(k) * (s.to - s.from) / span);
        }
      },
      shape);
  return trace;
}

TraceShape parse_trace_shape(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw Error(ErrorKind::kParse, "trace shape '" + text + "' lacks ':'");
  const std::string kind = text.substr(0, colon);
  const auto v = parse_numbers(text.substr(colon + 1), text);
  if (kind == "steady" && v.size() == 1) return SteadyShape{v[0]};
  if (kind == "ramp" && v.size() == 2) return RampShape{v[0], v[1]};
  if (kind == "spike" && (v.size() == 4 || v.size() == 5)) {
    SpikeShape s{v[0], v[1], static_cast<std::int64_t>(v[2]),
                 static_cast<std::int64_t>(v[3]), 0};
    if (v.size() == 5) s.decay_s = static_cast<std::int64_t>(v[4]);
    return s;
  }
  throw Error(ErrorKind::kParse, "unrecognized trace shape '" + text + "'");
}

WorkloadTrace bursty_scenario(double base_rps, double peak_rps, std::uint64_t seed) {
  return synth_trace(SpikeShape{base_rps, peak_rps, 600, 800, 200}, 1200, seed);
}

WorkloadTrace non_bursty_scenario(double from_rps, double to_rps, std::uint64_t seed) {
  return synth_trace(RampShape{from_rps, to_rps}, 1200, seed);
}

}  // namespace mixserve
