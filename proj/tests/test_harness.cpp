#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "scheq/harness/acceptance.hpp"
#include "scheq/harness/config.hpp"
#include "scheq/harness/records.hpp"

using namespace scheq;
using namespace scheq::harness;

TEST_CASE("config defaults and overrides") {
  ExperimentConfig d = parse_config("");
  CHECK(d.seed == 1);
  CHECK(d.sampler.count == 100000);
  ExperimentConfig c = parse_config(
      "experiment: demo\nseed: 9\nsim:\n  dt: 2.0e-4\n  spec: power:2\n  n: 8\nsampler:\n  n_grid: [2, 4]\n");
  CHECK(c.experiment == "demo");
  CHECK(c.seed == 9);
  CHECK(c.sim.seed == 9);
  CHECK(c.sim.spec.alpha == 2.0);
  CHECK(c.sampler.n_grid == std::vector<int>{2, 4});
}

TEST_CASE("config errors carry line numbers") {
  try {
    parse_config("seed: 1\nsim:\n  dt: 0.01\n  spec: power:2\n  n: 8\n", "cfg.yaml");
    FAIL("expected a stability error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("stability cap") != std::string::npos);
  }
  try {
    parse_config("seed: 1\nverification:\n  nodes: 32\n  knots: 3\n");
    FAIL("expected an unknown-key error");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 4);
  }
  CHECK_THROWS_AS(parse_config("sim: [1,\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("verification:\n  nodes: 12\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("sampler:\n  spec: cubic\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.yaml"), ConfigError);
}

TEST_CASE("config round trip") {
  ExperimentConfig c = parse_config("seed: 4\nscale: 0.5\nsampler:\n  c: 1.25\n  alpha_grid: [1, 4]\n");
  ExperimentConfig r = parse_config(c.to_yaml());
  CHECK(r.to_yaml() == c.to_yaml());
  CHECK(r.sampler.c == 1.25);
  CHECK(r.scale == 0.5);
}

TEST_CASE("records round trip") {
  MCEstimate e;
  e.value = 0.125;
  e.std_error = 1e-3;
  e.ess = 900.5;
  e.count = 1000;
  e.seed = 3;
  ResultRecord r = ResultRecord::from("x", "a/b", e);
  r.parameters["spec"] = "log";
  r.parameters["n"] = 8;
  r.pass = true;
  ResultRecord back = ResultRecord::from_json(Json::parse(r.to_json().dump()));
  CHECK(back.to_json() == r.to_json());
  CHECK(csv_row(r).rfind("x,a/b,", 0) == 0);
  CHECK(csv_header() == "experiment,name,parameters,estimate,stderr,ess,count,seed,pass");
}

TEST_CASE("recorder output") {
  std::string dir = std::string(SCHEQ_TEST_TMP) + "/recorder";
  std::filesystem::remove_all(dir);
  ExperimentConfig cfg;
  cfg.seed = 11;
  Recorder rec(dir, "demo", "exp");
  put(rec, cfg, "one", scalar(1.0), Json::object(), true);
  put(rec, cfg, "two", scalar(2.0));
  rec.note("line");
  rec.timing("one", 0.5);
  rec.write();
  auto recs = read_jsonl(rec.path(".jsonl"));
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].seed == 11);
  CHECK(recs[0].pass == std::optional<bool>(true));
  CHECK_FALSE(recs[1].pass.has_value());
  CHECK(std::filesystem::exists(rec.path("_timings.jsonl")));
  CHECK(rec.all_pass());
  put(rec, cfg, "three", scalar(3.0), Json::object(), false);
  CHECK_FALSE(rec.all_pass());
}

TEST_CASE("criterion bookkeeping") {
  CHECK(criterion_title(1) == "spectral algebra");
  CHECK_THROWS_AS(criterion_title(14), std::out_of_range);
  CriterionResult r{3, "mass conservation", true, "ok"};
  CHECK(format_result(r) == "[PASS] 03 mass conservation: ok");
  ExperimentConfig cfg;
  Recorder rec(std::string(SCHEQ_TEST_TMP) + "/c1", "c1", "t");
  CHECK(run_criterion(1, cfg, rec).pass);
  CHECK(rec.records().size() == 4);
}
