#include "mixserve/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mixserve/error.hpp"

namespace mixserve {

namespace {

[[noreturn]] void invalid(const VariantProfile& p, const std::string& why) {
  throw Error(ErrorKind::kInvalidProfile,
              "variant '" + p.variant_id + "': " + why);
}

}  // namespace

void validate(const VariantProfile& profile) {
  if (profile.variant_id.empty()) invalid(profile, "empty variant_id");
  if (!(profile.accuracy >= 0.0 && profile.accuracy <= 1.0))
    invalid(profile, "accuracy outside [0,1]");
  if (!(profile.readiness_time_s >= 0.0))
    invalid(profile, "negative readiness_time_s");
  if (profile.points.empty()) invalid(profile, "no profile points");
  for (std::size_t i = 0; i < profile.points.size(); ++i) {
    const auto& pt = profile.points[i];
    if (pt.cores < 1) invalid(profile, "cores must be >= 1");
    if (!(pt.throughput_rps >= 0.0)) invalid(profile, "negative throughput");
    if (!(pt.p99_latency_ms > 0.0)) invalid(profile, "p99 latency must be > 0");
    if (i > 0) {
      const auto& prev = profile.points[i - 1];
      if (pt.cores <= prev.cores)
        invalid(profile, "cores not strictly increasing");
      if (pt.throughput_rps < prev.throughput_rps)
        invalid(profile, "throughput decreases with more cores");
    }
  }
}

PerfModel fit_perf_model(const VariantProfile& profile) {
  const auto& pts = profile.points;
  if (pts.size() < 2) {
    throw Error(ErrorKind::kProfileTooSmall,
                "variant '" + profile.variant_id +
                    "': need at least 2 profile points to fit, got " +
                    std::to_string(pts.size()));
  }
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].cores <= pts[i - 1].cores)
      invalid(profile, "cores not strictly increasing");
  }

  const double n = static_cast<double>(pts.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (const auto& pt : pts) {
    mean_x += pt.cores;
    mean_y += pt.throughput_rps;
  }
  mean_x /= n;
  mean_y /= n;

  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& pt : pts) {
    const double dx = pt.cores - mean_x;
    const double dy = pt.throughput_rps - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }

  PerfModel model;
  model.variant_id = profile.variant_id;
  model.slope = sxy / sxx;
  model.intercept = mean_y - model.slope * mean_x;
  if (model.slope < 0.0) {
    model.slope = 0.0;
    model.intercept = mean_y;
    model.slope_clamped = true;
  }

  double ss_res = 0.0;
  for (const auto& pt : pts) {
    const double r = pt.throughput_rps - (model.slope * pt.cores + model.intercept);
    ss_res += r * r;
  }
  // A flat profile is explained perfectly by its mean.
  model.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;

  model.latency_points.reserve(pts.size());
  for (const auto& pt : pts) model.latency_points.emplace_back(pt.cores, pt.p99_latency_ms);
  return model;
}

double predict_throughput(const PerfModel& model, int cores) {
  if (cores <= 0) return 0.0;
  return std::max(0.0, model.slope * cores + model.intercept);
}

double predict_latency(const PerfModel& model, int cores) {
  const auto& lp = model.latency_points;
  if (lp.empty()) return 0.0;
  double latency = lp.front().second;
  for (const auto& [c, p99] : lp) {
    if (c > cores) break;
    latency = p99;
  }
  return latency;
}

std::vector<VariantProfile> parse_profiles(const nlohmann::json& doc) {
  if (!doc.is_array())
    throw Error(ErrorKind::kParse, "profile document must be a JSON array");
  std::vector<VariantProfile> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& obj = doc[i];
    const std::string where = "profiles[" + std::to_string(i) + "]";
    try {
      VariantProfile p;
      p.variant_id = obj.at("variant_id").get<std::string>();
      p.accuracy = obj.at("accuracy").get<double>();
      p.readiness_time_s = obj.at("readiness_time_s").get<double>();
      for (const auto& pt : obj.at("points")) {
        p.points.push_back({pt.at("cores").get<int>(),
                            pt.at("throughput_rps").get<double>(),
                            pt.at("p99_latency_ms").get<double>()});
      }
      if (obj.contains("parallelism")) {
        const auto& par = obj["parallelism"];
        p.parallelism.batch = par.value("batch", 1);
        p.parallelism.inter_op = par.value("inter_op", 1);
        p.parallelism.intra_op = par.value("intra_op", 1);
      }
      validate(p);
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::kParse, where + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.kind(), where + ": " + e.what());
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (out[i].variant_id == out[j].variant_id)
        throw Error(ErrorKind::kInvalidProfile,
                    "duplicate variant_id '" + out[i].variant_id + "'");
  return out;
}

std::vector<VariantProfile> load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open profile file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParse, path.string() + ": " + e.what());
  }
  return parse_profiles(doc);
}

nlohmann::json to_json(const VariantProfile& profile) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& pt : profile.points)
    pts.push_back({{"cores", pt.cores},
                   {"throughput_rps", pt.throughput_rps},
                   {"p99_latency_ms", pt.p99_latency_ms}});
  return {{"variant_id", profile.variant_id},
          {"accuracy", profile.accuracy},
          {"readiness_time_s", profile.readiness_time_s},
          {"points", pts},
          {"parallelism",
           {{"batch", profile.parallelism.batch},
            {"inter_op", profile.parallelism.inter_op},
            {"intra_op", profile.parallelism.intra_op}}}};
}

nlohmann::json to_json(const PerfModel& model) {
  return {{"variant_id", model.variant_id},
          {"slope", model.slope},
          {"intercept", model.intercept},
          {"r_squared", model.r_squared},
          {"slope_clamped", model.slope_clamped}};
}

}  // namespace mixserve
