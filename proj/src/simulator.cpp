#include "mixserve/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <queue>
#include <random>

#include "mixserve/baselines.hpp"
#include "mixserve/dispatcher.hpp"
#include "mixserve/error.hpp"

namespace mixserve {

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

// FCFS station with `cores` identical servers and deterministic service.
// Arrivals reach a station in time order, so the start time of each request
// is fixed at arrival by the earliest-free server.
struct Station {
  std::size_t variant = 0;
  int cores = 0;
  double service_s = 0.0;
  double created_at = 0.0;
  double ready_at = 0.0;
  double retired_at = kNever;
  double last_completion = 0.0;
  std::priority_queue<double, std::vector<double>, std::greater<>> free_at;

  double serve(double arrival) {
    const double start = std::max(arrival, free_at.top());
    free_at.pop();
    const double done = start + service_s;
    free_at.push(done);
    last_completion = std::max(last_completion, done);
    return done;
  }
};

using StationMap = std::map<std::string, std::size_t>;

class Engine {
 public:
  explicit Engine(const SimConfig& config)
      : cfg_(config),
        variants_(make_variants(config.profiles)),
        forecaster_(config.forecaster),
        history_(LoadHistory::kDefaultCapacity),
        rng_(config.seed ^ (config.trace.arrival_seed * 0x9E3779B97F4A7C15ULL)) {
    report_.policy = config.policy.label();
  }

  SimReport run() {
    const std::int64_t duration = cfg_.trace.duration_s();
    const double initial =
        cfg_.initial_load_rps.value_or(cfg_.forecaster.headroom *
                                       (duration > 0 ? cfg_.trace.counts[0] : 0));
    decide(0.0, std::max(1.0, initial), /*warm=*/true);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::int64_t s = 0; s < duration; ++s) {
      const double second = static_cast<double>(s);
      if (s > 0 && s % cfg_.adaptation_interval_s == 0) {
        maybe_swap(second);
        decide(second, forecaster_.predict_next_max(history_), /*warm=*/false);
      }
      const std::int64_t count = cfg_.trace.counts[static_cast<std::size_t>(s)];
      const double phase = unit(rng_);
      for (std::int64_t i = 0; i < count; ++i) {
        const double t = second + (static_cast<double>(i) + phase) / count;
        maybe_swap(t);
        route(t, static_cast<double>(duration));
      }
      history_.record(s, static_cast<double>(count));
    }
    maybe_swap(static_cast<double>(duration));
    finish(static_cast<double>(duration));
    return std::move(report_);
  }

 private:
  std::size_t variant_index(const std::string& id) const {
    for (std::size_t i = 0; i < variants_.size(); ++i)
      if (variants_[i].id() == id) return i;
    throw Error(ErrorKind::kInvalidParams, "unknown variant '" + id + "'");
  }

  Plan fallback_plan(const PlannerParams& params, const CoreMap& prev) const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < variants_.size(); ++i) {
      if (predict_throughput(variants_[i].model, params.budget_cores) >
          predict_throughput(variants_[best].model, params.budget_cores))
        best = i;
    }
    const Variant& v = variants_[best];
    Plan plan;
    plan.assignments.push_back({v.id(), params.budget_cores, params.predicted_load_rps});
    plan.under_provisioned =
        predict_throughput(v.model, params.budget_cores) < params.predicted_load_rps;
    plan.avg_accuracy = v.accuracy;
    plan.resource_cost_norm = 1.0;
    plan.loading_cost_norm = loading_cost(plan.config(), prev, variants_);
    plan.objective = objective(plan.avg_accuracy, plan.resource_cost_norm,
                               plan.loading_cost_norm, params);
    return plan;
  }

  static std::optional<Plan> try_solve(std::span<const Variant> variants,
                                       const PlannerParams& params,
                                       const CoreMap& prev, std::size_t max_variants) {
    try {
      SolveOptions options;
      options.max_variants = max_variants;
      return solve(variants, params, prev, options);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kInfeasible) throw;
      return std::nullopt;
    }
  }

  void decide(double now, double load, bool warm) {
    PlannerParams params = cfg_.planner;
    params.predicted_load_rps = load;
    const CoreMap prev = pending_ ? pending_->plan.config() : active_config_;

    IntervalRecord rec;
    rec.time_s = now;
    rec.predicted_load_rps = load;

    auto unrestricted = try_solve(variants_, params, prev, kAnyCount);
    auto single = try_solve(variants_, params, prev, 1);
    if (unrestricted) rec.unrestricted_objective = unrestricted->objective;
    if (single) rec.single_variant_objective = single->objective;

    std::optional<Plan> chosen;
    switch (cfg_.policy.kind) {
      case PolicyKind::kInfAdapter: chosen = std::move(unrestricted); break;
      case PolicyKind::kMsPlus: chosen = std::move(single); break;
      case PolicyKind::kVpaPlus:
        chosen = solve_vpa_plus(variants_[variant_index(cfg_.policy.fixed_variant_id)],
                                params, variants_, prev);
        break;
    }
    if (!chosen) {
      chosen = fallback_plan(params, prev);
      rec.fallback = true;
      ++report_.fallback_count;
    }
    rec.plan = *chosen;

    StationMap target;
    double ready = now;
    for (const auto& a : chosen->assignments) {
      const std::size_t idx = station_for(a.variant_id, a.cores, now, warm);
      target[a.variant_id] = idx;
      ready = std::max(ready, stations_[idx].ready_at);
    }
    if (pending_) {
      for (const auto& [id, idx] : pending_->stations) {
        if (!holds(target, idx) && !holds(active_, idx)) stations_[idx].retired_at = now;
      }
    }
    pending_ = Pending{*chosen, std::move(target), ready};
    rec.ready_at_s = ready;
    report_.intervals.push_back(std::move(rec));
    maybe_swap(now);
  }

  static bool holds(const StationMap& m, std::size_t idx) {
    return std::any_of(m.begin(), m.end(), [&](const auto& kv) { return kv.second == idx; });
  }

  // Reuses a live station with the same shape, otherwise starts loading one.
  std::size_t station_for(const std::string& id, int cores, double now, bool warm) {
    for (const StationMap* m : {&active_, pending_ ? &pending_->stations : nullptr}) {
      if (m == nullptr) continue;
      auto it = m->find(id);
      if (it != m->end() && stations_[it->second].cores == cores) return it->second;
    }
    const std::size_t v = variant_index(id);
    Station st;
    st.variant = v;
    st.cores = cores;
    const double th = predict_throughput(variants_[v].model, cores);
    st.service_s = th > 0.0 ? cores / th : kNever;
    st.created_at = now;
    st.ready_at = warm ? now : now + variants_[v].readiness_time_s;
    for (int i = 0; i < cores; ++i) st.free_at.push(st.ready_at);
    stations_.push_back(std::move(st));
    return stations_.size() - 1;
  }

  void maybe_swap(double now) {
    if (!pending_ || pending_->ready_at > now) return;
    const double at = pending_->ready_at;
    for (const auto& [id, idx] : active_) {
      if (!holds(pending_->stations, idx)) stations_[idx].retired_at = at;
    }
    active_ = std::move(pending_->stations);
    active_config_ = pending_->plan.config();
    std::vector<QuotaEntry> table;
    for (const auto& a : pending_->plan.assignments)
      table.push_back({a.variant_id, a.quota_rps});
    dispatcher_.set_quotas(table);
    pending_.reset();
  }

  void route(double t, double end) {
    const std::string id = dispatcher_.next_target();
    Station& st = stations_[active_.at(id)];
    const double done = st.serve(t);
    RequestRecord r;
    r.arrival_s = t;
    r.variant_id = id;
    r.latency_ms = (done - t) * 1000.0;
    r.accuracy = variants_[st.variant].accuracy;
    r.violated = r.latency_ms > cfg_.planner.slo_ms;
    r.completed = done <= end;
    report_.requests.push_back(std::move(r));
  }

  void finish(double end) {
    for (const auto& st : stations_) {
      double stop = end;
      if (st.retired_at != kNever) stop = std::min(end, std::max(st.retired_at, st.last_completion));
      if (stop > st.created_at) report_.core_seconds += st.cores * (stop - st.created_at);
    }

    auto& rep = report_;
    rep.total_arrivals = static_cast<std::int64_t>(rep.requests.size());
    std::vector<double> latencies;
    latencies.reserve(rep.requests.size());
    double acc_sum = 0.0;
    std::int64_t violations = 0;
    for (const auto& r : rep.requests) {
      latencies.push_back(r.latency_ms);
      acc_sum += r.accuracy;
      if (r.violated) ++violations;
      if (r.completed) ++rep.completed;
    }
    rep.in_queue_at_end = rep.total_arrivals - rep.completed;
    rep.p99_latency_ms = percentile(std::move(latencies), 0.99);
    if (rep.total_arrivals > 0) {
      rep.slo_violation_fraction = static_cast<double>(violations) / rep.total_arrivals;
      rep.mean_accuracy = acc_sum / rep.total_arrivals;
      double best = 0.0;
      for (const auto& v : variants_) best = std::max(best, v.accuracy);
      rep.accuracy_loss = std::max(0.0, best - rep.mean_accuracy);
    }
  }

  struct Pending {
    Plan plan;
    StationMap stations;
    double ready_at = 0.0;
  };

  static constexpr std::size_t kAnyCount = std::numeric_limits<std::size_t>::max();

  const SimConfig& cfg_;
  std::vector<Variant> variants_;
  TrendMaxForecaster forecaster_;
  LoadHistory history_;
  std::mt19937_64 rng_;
  Dispatcher dispatcher_;
  std::vector<Station> stations_;
  StationMap active_;
  CoreMap active_config_;
  std::optional<Pending> pending_;
  SimReport report_;
};

}  // namespace

std::string Policy::label() const {
  switch (kind) {
    case PolicyKind::kInfAdapter: return "infadapter";
    case PolicyKind::kMsPlus: return "ms_plus";
    case PolicyKind::kVpaPlus: return "vpa_plus:" + fixed_variant_id;
  }
  return "unknown";
}

Policy Policy::parse(const std::string& text) {
  if (text == "infadapter") return {PolicyKind::kInfAdapter, {}};
  if (text == "ms_plus") return {PolicyKind::kMsPlus, {}};
  const std::string prefix = "vpa_plus:";
  if (text.rfind(prefix, 0) == 0 && text.size() > prefix.size())
    return {PolicyKind::kVpaPlus, text.substr(prefix.size())};
  throw Error(ErrorKind::kInvalidParams,
              "unknown policy '" + text +
                  "' (expected infadapter, ms_plus or vpa_plus:<variant>)");
}

void SimConfig::validate() const {
  planner.validate();
  if (adaptation_interval_s < 1)
    throw Error(ErrorKind::kInvalidParams, "adaptation interval must be >= 1 s");
  if (profiles.empty()) throw Error(ErrorKind::kInvalidParams, "no variant profiles");
  for (const auto& p : profiles) mixserve::validate(p);
  for (auto c : trace.counts)
    if (c < 0) throw Error(ErrorKind::kInvalidParams, "negative trace count");
  if (policy.kind == PolicyKind::kVpaPlus) {
    const auto it = std::find_if(profiles.begin(), profiles.end(), [&](const auto& p) {
      return p.variant_id == policy.fixed_variant_id;
    });
    if (it == profiles.end())
      throw Error(ErrorKind::kInvalidParams,
                  "vpa_plus variant '" + policy.fixed_variant_id + "' is not profiled");
  }
  for (const auto& v : make_variants(profiles)) {
    if (!(predict_throughput(v.model, planner.budget_cores) > 0.0))
      throw Error(ErrorKind::kInvalidParams,
                  "variant '" + v.id() + "' has no predicted throughput at the budget");
  }
  (void)TrendMaxForecaster(forecaster);
}

SimReport run(const SimConfig& config) {
  config.validate();
  return Engine(config).run();
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  const auto rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(values.size())));
  const std::size_t idx = std::clamp<std::size_t>(rank, 1, values.size()) - 1;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx),
                   values.end());
  return values[idx];
}

std::vector<ComparisonRow> compare(const std::vector<SimConfig>& configs) {
  for (const auto& c : configs) {
    if (!(c.trace == configs.front().trace))
      throw Error(ErrorKind::kTraceMismatch, "compared configs use different traces");
    if (!(c.profiles == configs.front().profiles))
      throw Error(ErrorKind::kTraceMismatch, "compared configs use different profiles");
  }
  std::vector<std::future<ComparisonRow>> jobs;
  jobs.reserve(configs.size());
  for (const auto& c : configs) {
    jobs.push_back(std::async(std::launch::async, [&c] {
      const SimReport r = run(c);
      ComparisonRow row;
      row.policy = r.policy;
      row.beta = c.planner.beta;
      row.accuracy_loss = r.accuracy_loss;
      row.core_seconds = r.core_seconds;
      row.p99_latency_ms = r.p99_latency_ms;
      row.slo_violation_fraction = r.slo_violation_fraction;
      row.fallback_count = r.fallback_count;
      for (const auto& iv : r.intervals) row.objective_sum += iv.plan.objective;
      return row;
    }));
  }
  std::vector<ComparisonRow> rows;
  rows.reserve(jobs.size());
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

nlohmann::json summary_json(const SimReport& report) {
  nlohmann::json intervals = nlohmann::json::array();
  for (const auto& iv : report.intervals) {
    nlohmann::json j = {{"time_s", iv.time_s},
                        {"predicted_load_rps", iv.predicted_load_rps},
                        {"plan", to_json(iv.plan)},
                        {"fallback", iv.fallback},
                        {"ready_at_s", iv.ready_at_s}};
    j["unrestricted_objective"] =
        iv.unrestricted_objective ? nlohmann::json(*iv.unrestricted_objective) : nlohmann::json();
    j["single_variant_objective"] = iv.single_variant_objective
                                        ? nlohmann::json(*iv.single_variant_objective)
                                        : nlohmann::json();
    intervals.push_back(std::move(j));
  }
  return {{"policy", report.policy},
          {"total_arrivals", report.total_arrivals},
          {"completed", report.completed},
          {"in_queue_at_end", report.in_queue_at_end},
          {"p99_latency_ms", report.p99_latency_ms},
          {"slo_violation_fraction", report.slo_violation_fraction},
          {"mean_accuracy", report.mean_accuracy},
          {"accuracy_loss", report.accuracy_loss},
          {"core_seconds", report.core_seconds},
          {"fallback_count", report.fallback_count},
          {"intervals", intervals}};
}

nlohmann::json to_json(const ComparisonRow& row) {
  return {{"policy", row.policy},
          {"beta", row.beta},
          {"accuracy_loss", row.accuracy_loss},
          {"core_seconds", row.core_seconds},
          {"p99_latency_ms", row.p99_latency_ms},
          {"slo_violation_fraction", row.slo_violation_fraction},
          {"objective_sum", row.objective_sum},
          {"fallback_count", row.fallback_count}};
}

}  // namespace mixserve
