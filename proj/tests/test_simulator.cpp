#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "mixserve/error.hpp"
#include "mixserve/report.hpp"
#include "mixserve/simulator.hpp"

using namespace mixserve;

namespace {

// One variant at 2.5 rps per core: every allocation has a 0.4 s service time.
SimConfig single_variant_config(const WorkloadTrace& trace, int budget) {
  SimConfig cfg;
  cfg.trace = trace;
  cfg.profiles = {testing::linear_profile("v", 0.75, 5, 2.5, 0.0, 300)};
  cfg.planner.budget_cores = budget;
  cfg.planner.slo_ms = 750;
  cfg.seed = 1;
  return cfg;
}

SimConfig fixture_config(const WorkloadTrace& trace, const std::string& policy) {
  SimConfig cfg;
  cfg.trace = trace;
  cfg.profiles = load_profiles(testing::repo_path("data/profiles_resnet_synthetic.json"));
  cfg.planner.budget_cores = 32;
  cfg.planner.beta = 0.05;
  cfg.policy = Policy::parse(policy);
  cfg.seed = 7;
  return cfg;
}

std::string dump(const SimReport& r) {
  std::ostringstream out;
  out << summary_json(r).dump();
  write_requests_csv(out, r);
  write_plans_csv(out, r);
  return out.str();
}

}  // namespace

TEST_SUITE("simulator") {
  TEST_CASE("light steady load sees no queueing") {
    const SimReport r = run(single_variant_config(synth_trace(SteadyShape{5}, 60), 4));
    CHECK(r.total_arrivals == 300);
    CHECK(r.p99_latency_ms == doctest::Approx(400.0).epsilon(1e-9));
    CHECK(r.slo_violation_fraction == 0.0);
    CHECK(r.accuracy_loss == 0.0);
    CHECK(r.fallback_count == 0);
    for (const auto& rec : r.requests) CHECK(rec.latency_ms == doctest::Approx(400.0).epsilon(1e-9));
  }

  TEST_CASE("an empty trace gives an empty report") {
    const SimReport r = run(single_variant_config(synth_trace(SteadyShape{0}, 30), 4));
    CHECK(r.total_arrivals == 0);
    CHECK(r.completed + r.in_queue_at_end == 0);
    CHECK(r.p99_latency_ms == 0.0);
    CHECK(r.slo_violation_fraction == 0.0);
  }

  TEST_CASE("overload grows the queue at the excess rate") {
    // 15 rps into 10 rps of capacity for 60 s. Request k arrives near k/15 s
    // and leaves near k/10 + 0.4 s, so from k = 11 on every request misses
    // the SLO and about (15 - 10) * 60 requests remain queued.
    const SimReport r = run(single_variant_config(synth_trace(SteadyShape{15}, 60), 4));
    CHECK(r.total_arrivals == 900);
    CHECK(r.fallback_count > 0);
    CHECK(r.slo_violation_fraction >= 0.98);
    CHECK(r.in_queue_at_end >= 290);
    CHECK(r.in_queue_at_end <= 310);
    CHECK(r.completed + r.in_queue_at_end == r.total_arrivals);
  }

  TEST_CASE("static plan occupies its cores for the whole run") {
    auto cfg = single_variant_config(synth_trace(SteadyShape{5}, 120), 8);
    const SimReport r = run(cfg);
    for (const auto& iv : r.intervals) CHECK(iv.plan.total_cores() == 3);
    CHECK(r.core_seconds == doctest::Approx(3 * 120.0));
  }

  TEST_CASE("new stations come up after their readiness time") {
    auto cfg = fixture_config(synth_trace(SpikeShape{20, 80, 60, 120}, 180), "infadapter");
    const SimReport r = run(cfg);
    bool saw_reload = false;
    for (const auto& iv : r.intervals) {
      CHECK(iv.ready_at_s >= iv.time_s);
      if (iv.ready_at_s > iv.time_s) {
        saw_reload = true;
        CHECK(iv.ready_at_s - iv.time_s <= 15.0);
      }
    }
    CHECK(saw_reload);
    CHECK(r.intervals.front().ready_at_s == 0.0);
  }

  TEST_CASE("conservation and determinism") {
    const auto trace = bursty_scenario(40, 120, 3);
    for (const char* policy : {"infadapter", "ms_plus", "vpa_plus:resnet50"}) {
      const auto cfg = fixture_config(trace, policy);
      const SimReport a = run(cfg);
      const SimReport b = run(cfg);
      CHECK(a.total_arrivals == trace.total_requests());
      CHECK(a.completed + a.in_queue_at_end == a.total_arrivals);
      CHECK(a.accuracy_loss >= 0.0);
      CHECK(dump(a) == dump(b));
    }
  }

  TEST_CASE("different seeds move arrivals") {
    auto cfg = fixture_config(synth_trace(SteadyShape{30}, 60), "infadapter");
    const SimReport a = run(cfg);
    cfg.seed = 99;
    const SimReport b = run(cfg);
    CHECK(a.requests.front().arrival_s != b.requests.front().arrival_s);
  }

  TEST_CASE("the most accurate variant alone has no accuracy loss") {
    const SimReport r =
        run(fixture_config(synth_trace(SteadyShape{30}, 120), "vpa_plus:resnet152"));
    CHECK(r.accuracy_loss == 0.0);
    for (const auto& rec : r.requests) CHECK(rec.variant_id == "resnet152");
  }

  TEST_CASE("per-interval objective dominates the single-variant planner") {
    for (const auto& trace : {bursty_scenario(40, 120), non_bursty_scenario(30, 90)}) {
      const SimReport r = run(fixture_config(trace, "infadapter"));
      REQUIRE(r.intervals.size() == 40);
      for (const auto& iv : r.intervals) {
        if (!iv.single_variant_objective) continue;
        REQUIRE(iv.unrestricted_objective.has_value());
        CHECK(*iv.unrestricted_objective >= *iv.single_variant_objective);
        CHECK(iv.plan.objective == *iv.unrestricted_objective);
      }
    }
  }

  TEST_CASE("config validation") {
    auto cfg = single_variant_config(synth_trace(SteadyShape{5}, 10), 4);
    cfg.adaptation_interval_s = 0;
    CHECK_THROWS_AS(run(cfg), Error);
    cfg = single_variant_config(synth_trace(SteadyShape{5}, 10), 4);
    cfg.policy = Policy::parse("vpa_plus:missing");
    CHECK_THROWS_AS(run(cfg), Error);
    cfg = single_variant_config(synth_trace(SteadyShape{5}, 10), 4);
    cfg.profiles.clear();
    CHECK_THROWS_AS(run(cfg), Error);
  }

  TEST_CASE("policy labels") {
    CHECK(Policy::parse("infadapter").label() == "infadapter");
    CHECK(Policy::parse("ms_plus").kind == PolicyKind::kMsPlus);
    CHECK(Policy::parse("vpa_plus:resnet18").fixed_variant_id == "resnet18");
    CHECK_THROWS_AS(Policy::parse("vpa_plus:"), Error);
    CHECK_THROWS_AS(Policy::parse("hpa"), Error);
  }

  TEST_CASE("percentile") {
    CHECK(percentile({}, 0.99) == 0.0);
    CHECK(percentile({5}, 0.99) == 5.0);
    std::vector<double> v;
    for (int i = 1; i <= 100; ++i) v.push_back(i);
    CHECK(percentile(v, 0.99) == 99.0);
    CHECK(percentile(v, 0.5) == 50.0);
    CHECK(percentile(v, 1.0) == 100.0);
  }

  TEST_CASE("comparison tables") {
    const auto trace = bursty_scenario(40, 120);
    std::vector<SimConfig> configs;
    for (const char* p : {"infadapter", "ms_plus", "vpa_plus:resnet18", "vpa_plus:resnet50",
                          "vpa_plus:resnet152"})
      configs.push_back(fixture_config(trace, p));
    const auto rows = compare(configs);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].policy == "infadapter");
    CHECK(rows[4].policy == "vpa_plus:resnet152");

    CHECK(compare({configs[0]}).size() == 1);

    auto other = configs[1];
    other.trace = non_bursty_scenario(40, 80);
    try {
      compare({configs[0], other});
      FAIL("expected mismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kTraceMismatch);
    }
  }
}
