#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;
using mixserve::testing::repo_path;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = mixserve::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mixserve_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kFixture = repo_path("data/profiles_resnet_synthetic.json");
const std::string kF1 = repo_path("data/profiles_f1.json");

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("profile-fit") {
    auto r = run_cli({"profile-fit", kFixture});
    CHECK(r.code == 0);
    const auto fits = nlohmann::json::parse(r.out);
    REQUIRE(fits.size() == 3);
    for (const auto& f : fits) CHECK(f.at("r_squared").get<double>() >= 0.99);

    CHECK(run_cli({"profile-fit", kFixture, "--r2-threshold", "1.0"}).code == 1);

    const auto dir = scratch("fit");
    std::ofstream(dir / "empty.json").close();
    CHECK(run_cli({"profile-fit", (dir / "empty.json").string()}).code == 2);
    CHECK(run_cli({"profile-fit", (dir / "missing.json").string()}).code == 2);
  }

  TEST_CASE("solve") {
    auto r = run_cli({"solve", kF1, "--lambda", "30", "--budget", "10", "--beta", "0.05",
                      "--gamma", "0.01"});
    REQUIRE(r.code == 0);
    const auto plan = nlohmann::json::parse(r.out);
    CHECK(plan.at("assignments").size() == 1);
    CHECK(plan.at("assignments")[0].at("variant") == "B");
    CHECK(plan.at("assignments")[0].at("cores") == 6);
    CHECK(plan.at("objective").get<double>() == doctest::Approx(0.7233333333333333));
    CHECK(r.err.find("objective=") != std::string::npos);

    CHECK(run_cli({"solve", kF1, "--lambda", "30", "--budget", "0"}).code == 2);
    CHECK(run_cli({"solve", kF1, "--lambda", "300", "--budget", "10"}).code == 1);
    CHECK(run_cli({"solve", kF1, "--lambda", "30", "--budget", "10", "--mode", "bogus"}).code == 2);
  }

  TEST_CASE("solve with a previous plan") {
    const auto dir = scratch("prev");
    const auto prev = (dir / "plan.json").string();
    REQUIRE(run_cli({"solve", kF1, "--lambda", "30", "--budget", "10", "--out", prev}).code == 0);
    auto r = run_cli({"solve", kF1, "--lambda", "30", "--budget", "10", "--prev", prev});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out).at("lc").get<double>() == 0.0);
    CHECK(run_cli({"solve", kF1, "--lambda", "30", "--prev", (dir / "nope.json").string()}).code == 2);
  }

  TEST_CASE("solve beta sweep lowers cores") {
    auto cores = [](const std::string& beta) {
      auto r = run_cli({"solve", kFixture, "--lambda", "60", "--budget", "32", "--beta", beta});
      REQUIRE(r.code == 0);
      int sum = 0;
      for (const auto& a : nlohmann::json::parse(r.out).at("assignments")) sum += a.at("cores").get<int>();
      return sum;
    };
    CHECK(cores("0.2") <= cores("0.0125"));
  }

  TEST_CASE("simulate") {
    const auto dir = scratch("simulate");
    auto r = run_cli({"simulate", "--profiles", kFixture, "--synth", "steady:40", "--duration",
                      "300", "--budget", "32", "--seed", "5", "--out", (dir / "a").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("violations=0.000000") != std::string::npos);
    const auto summary = nlohmann::json::parse(slurp(dir / "a" / "summary.json"));
    CHECK(summary.at("slo_violation_fraction").get<double>() == 0.0);
    CHECK(fs::exists(dir / "a" / "requests.csv"));
    CHECK(fs::exists(dir / "a" / "plans.csv"));

    REQUIRE(run_cli({"simulate", "--profiles", kFixture, "--synth", "steady:40", "--duration",
                     "300", "--budget", "32", "--seed", "5", "--out", (dir / "b").string()})
                .code == 0);
    for (const char* f : {"summary.json", "requests.csv", "plans.csv"})
      CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));

    CHECK(run_cli({"simulate", "--profiles", kFixture, "--trace", (dir / "missing.csv").string(),
                   "--out", (dir / "c").string()})
              .code == 2);
    CHECK(run_cli({"simulate", "--profiles", kFixture, "--out", (dir / "d").string()}).code == 2);
  }

  TEST_CASE("simulate from a trace file") {
    const auto dir = scratch("trace_file");
    {
      std::ofstream t(dir / "trace.csv");
      t << "second,count\n";
      for (int s = 0; s < 90; ++s) t << s << ",20\n";
    }
    auto r = run_cli({"simulate", "--profiles", kFixture, "--trace", (dir / "trace.csv").string(),
                      "--policy", "vpa_plus:resnet50", "--out", (dir / "out").string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("policy=vpa_plus:resnet50 arrivals=1800") != std::string::npos);
  }

  TEST_CASE("compare") {
    const auto dir = scratch("compare");
    auto r = run_cli({"compare", "--profiles", kFixture, "--synth", "bursty:40,120", "--budget",
                      "32", "--policies", "infadapter", "ms_plus", "vpa_plus:resnet18",
                      "vpa_plus:resnet50", "vpa_plus:resnet152", "--betas", "0.0125", "0.05",
                      "0.2", "--out", dir.string()});
    REQUIRE(r.code == 0);
    const auto rows = nlohmann::json::parse(slurp(dir / "comparison.json"));
    REQUIRE(rows.size() == 15);
    for (std::size_t i = 0; i < rows.size(); i += 5) {
      CHECK(rows[i].at("policy") == "infadapter");
      CHECK(rows[i + 1].at("policy") == "ms_plus");
      CHECK(rows[i].at("objective_sum").get<double>() >=
            rows[i + 1].at("objective_sum").get<double>());
    }
    std::istringstream csv(slurp(dir / "comparison.csv"));
    std::string line;
    int lines = 0;
    while (std::getline(csv, line)) ++lines;
    CHECK(lines == 16);

    auto one = run_cli({"compare", "--profiles", kFixture, "--synth", "steady:20", "--duration",
                        "60", "--policies", "infadapter", "--out", (dir / "one").string()});
    REQUIRE(one.code == 0);
    CHECK(nlohmann::json::parse(slurp(dir / "one" / "comparison.json")).size() == 1);
  }

  TEST_CASE("config file and environment") {
    const auto dir = scratch("config");
    {
      std::ofstream c(dir / "solve.json");
      c << R"({"lambda": 30, "budget": 10, "beta": 0.05, "gamma": 0.01})";
    }
    auto r = run_cli({"solve", kF1, "--config", (dir / "solve.json").string()});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out).at("assignments")[0].at("cores") == 6);

    // Explicit flags win over the config file.
    r = run_cli({"solve", kF1, "--config", (dir / "solve.json").string(), "--lambda", "10"});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out).at("assignments")[0].at("quota_rps") == 10.0);

    {
      std::ofstream c(dir / "bad.json");
      c << R"({"no-such-flag": 1})";
    }
    CHECK(run_cli({"solve", kF1, "--lambda", "5", "--config", (dir / "bad.json").string()}).code == 2);

    ::setenv("MIXSERVE_BUDGET", "2", 1);
    CHECK(run_cli({"solve", kF1, "--lambda", "30"}).code == 1);
    ::unsetenv("MIXSERVE_BUDGET");
    CHECK(run_cli({"solve", kF1, "--lambda", "30"}).code == 0);
  }

  TEST_CASE("usage errors") {
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"frobnicate"}).code == 2);
    CHECK(run_cli({"--help"}).code == 0);
  }
}
