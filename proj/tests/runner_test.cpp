#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "hsagg/runner.hpp"

using namespace hsagg;

namespace {

const std::string kBundle = std::string(HSAGG_DATA_DIR) + "/example_k5.json";

std::string write_file(const char* stem, const std::string& body) {
  std::string path = std::string("/tmp/") + stem;
  std::ofstream out(path);
  out << body;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("flat config files parse with comments and overrides") {
  auto path = write_file("cfg_flat.txt",
                         "# comment line\n"
                         "K = 4\n"
                         "d=2\n"
                         "s = 1\n"
                         "q = 2\n"
                         "L = 3\n"
                         "seed = 9\n"
                         "drop = bernoulli:0.1,0.2\n"
                         "trials = 7\n");
  ExperimentConfig ec = parse_config_file(path);
  CHECK(ec.K == 4);
  CHECK(ec.d == 2);
  CHECK(ec.s == 1);
  CHECK(ec.q == 2);
  CHECK(ec.L == 3);
  CHECK(ec.seed == 9);
  CHECK(ec.drop == "bernoulli:0.1,0.2");
  CHECK(ec.trials == 7);
  CHECK_FALSE(ec.p.has_value());
  std::remove(path.c_str());
}

TEST_CASE("json config files parse and reject unknown keys") {
  auto path = write_file("cfg_json.json", R"({"K": 6, "d": 3, "s": 2, "p": 17, "budget": 500})");
  ExperimentConfig ec = parse_config_file(path);
  CHECK(ec.K == 6);
  CHECK(ec.d == 3);
  CHECK(ec.s == 2);
  REQUIRE(ec.p.has_value());
  CHECK(*ec.p == 17);
  REQUIRE(ec.budget.has_value());
  CHECK(*ec.budget == 500);
  std::remove(path.c_str());

  auto bad = write_file("cfg_bad.json", R"({"K": 6, "mystery": 1})");
  CHECK_THROWS_AS(parse_config_file(bad), std::invalid_argument);
  std::remove(bad.c_str());
}

TEST_CASE("drop specifications parse into models") {
  DropModel ex = parse_drop_spec("exhaustive", 3);
  CHECK(ex.kind == DropModel::Kind::exhaustive);

  DropModel be = parse_drop_spec("bernoulli:0.25,0.5", 3);
  CHECK(be.kind == DropModel::Kind::bernoulli);
  CHECK(be.p_c2r == doctest::Approx(0.25));
  CHECK(be.p_r2s == doctest::Approx(0.5));
  CHECK(be.seed == 3);

  DropModel fx = parse_drop_spec("fixed:r2s=1,3;c2r=2-1,4-3", 3);
  CHECK(fx.kind == DropModel::Kind::fixed);
  CHECK(fx.failed_r2s == std::set<std::uint32_t>{1, 3});
  CHECK(fx.failed_c2r ==
        std::set<std::pair<std::uint32_t, std::uint32_t>>{{2, 1}, {4, 3}});

  CHECK(parse_drop_spec("fixed", 0).failed_r2s.empty());
  CHECK_THROWS_AS(parse_drop_spec("bernoulli:1.5,0", 0), std::invalid_argument);
  CHECK_THROWS_AS(parse_drop_spec("bernoulli:0.1", 0), std::invalid_argument);
  CHECK_THROWS_AS(parse_drop_spec("meteor", 0), std::invalid_argument);
}

TEST_CASE("bundle verification command succeeds on the shipped file") {
  ExperimentConfig ec;
  ec.vectors = kBundle;
  CHECK(cmd_verify_example(ec) == 0);
  ec.vectors = "/tmp/not_there.json";
  CHECK(cmd_verify_example(ec) == 2);
}

TEST_CASE("run command emits a full report and exits clean") {
  ExperimentConfig ec;
  ec.K = 4;
  ec.d = 2;
  ec.s = 1;
  ec.q = 2;
  ec.L = 2;
  ec.seed = 11;
  ec.drop = "fixed:r2s=2";
  ec.trials = 3;
  ec.out = "/tmp/run_report.json";
  REQUIRE(cmd_run(ec) == 0);
  auto j = nlohmann::json::parse(slurp(ec.out));
  CHECK(j.contains("config"));
  CHECK(j.contains("scheme"));
  CHECK(j.contains("episodes"));
  CHECK(j.contains("audit"));
  CHECK(j.contains("rates"));
  CHECK(j.contains("verdicts"));
  CHECK(j["episodes"].size() == 3);
  CHECK(j["verdicts"]["ok"] == true);
  CHECK(j["episodes"][0]["decoded"] == true);
  CHECK(j["episodes"][0]["sum_matches"] == true);
  std::remove(ec.out.c_str());
}

TEST_CASE("identical configs produce byte-identical reports") {
  ExperimentConfig ec;
  ec.K = 5;
  ec.d = 3;
  ec.s = 1;
  ec.q = 3;
  ec.L = 2;
  ec.seed = 21;
  ec.drop = "bernoulli:0.2,0.3";
  ec.trials = 12;
  ec.out = "/tmp/det_report.json";
  REQUIRE(cmd_run(ec) == 0);
  std::string first = slurp(ec.out);
  REQUIRE(cmd_run(ec) == 0);
  std::string second = slurp(ec.out);
  CHECK(first == second);
  CHECK_FALSE(first.empty());
  std::remove(ec.out.c_str());
}

TEST_CASE("invalid shapes exit with the config error code") {
  ExperimentConfig ec;
  ec.d = 9;  // d must stay below K
  ec.out = "/tmp/never_written.json";
  CHECK(cmd_run(ec) == 2);
  ExperimentConfig composite;
  composite.p = 9;  // not prime
  CHECK(cmd_run(composite) == 2);
}

TEST_CASE("sweep command reports the full enumeration") {
  ExperimentConfig ec;
  ec.K = 3;
  ec.d = 2;
  ec.s = 1;
  ec.q = 2;
  ec.L = 2;
  ec.seed = 5;
  ec.out = "/tmp/sweep_report.json";
  REQUIRE(cmd_sweep(ec) == 0);
  auto j = nlohmann::json::parse(slurp(ec.out));
  CHECK(j["episodes"].size() == 29);
  CHECK(j["verdicts"]["ok"] == true);
  CHECK(j["audit"]["episodes_total"] == 29);
  std::remove(ec.out.c_str());
}

TEST_CASE("audit command cross-checks ranks against enumeration") {
  ExperimentConfig ec;
  ec.K = 3;
  ec.d = 2;
  ec.s = 1;
  ec.q = 2;
  ec.p = 5;
  ec.L = 1;
  ec.seed = 6;
  ec.out = "/tmp/audit_report.json";
  REQUIRE(cmd_audit(ec) == 0);
  auto j = nlohmann::json::parse(slurp(ec.out));
  CHECK(j["audit"]["mi_agreement"] == "agreement");
  CHECK(j["audit"]["relays"].size() == 3);
  for (auto& r : j["audit"]["relays"]) {
    CHECK(r["rank_leakage"] == 0);
    CHECK(r["status"] == "zero");
    CHECK(r["agreement"] == true);
  }
  CHECK(j["audit"]["server"]["rank_leakage"] == 0);
  CHECK(j["audit"]["server"]["status"] == "zero");
  std::remove(ec.out.c_str());
}

TEST_CASE("audit skips enumeration when the state space is too large") {
  ExperimentConfig ec;
  ec.K = 5;
  ec.d = 3;
  ec.s = 1;
  ec.q = 3;
  ec.p = 13;
  ec.L = 2;
  ec.seed = 7;
  ec.budget = 1000;
  ec.out = "/tmp/audit_skip.json";
  REQUIRE(cmd_audit(ec) == 0);
  auto j = nlohmann::json::parse(slurp(ec.out));
  CHECK(j["audit"]["mi_agreement"] == "skipped");
  std::remove(ec.out.c_str());
}
