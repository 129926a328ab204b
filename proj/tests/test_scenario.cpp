#include "doctest.h"
#include "smpc/scenario.hpp"

#include <cstdio>
#include <fstream>
#include <string>

using namespace smpc;

namespace {

std::string temp_path(const char* name) {
  return std::string("/tmp/smpc_test_") + name;
}

}  // namespace

TEST_SUITE_BEGIN("scenario");

TEST_CASE("blank text yields defaults") {
  const ScenarioConfig parsed = parse_scenario("");
  CHECK(parsed == ScenarioConfig{});
  CHECK(parsed.dt == 0.02);
  CHECK(parsed.horizon == 100);
  CHECK(parsed.num_samples == 1024);
  CHECK(parsed.lambda == 1.0);
  CHECK(parsed.dynamics.kind == "diff_drive");
  CHECK(parsed.cost.kind == "diff_drive_nav");
  CHECK(parsed.controller.kind == "mppi");
  CHECK(parsed.feedback.kind == "none");
}

TEST_CASE("round trip preserves a fully customized config") {
  ScenarioConfig config;
  config.dt = 0.05;
  config.horizon = 32;
  config.num_samples = 256;
  config.iterations = 3;
  config.lambda = 0.7;
  config.control_std = {1.0, 0.5};
  config.rng_seed = 987654321;
  config.sampler.zero_mean_fraction = 0.25;
  config.sampler.include_mean_sample = false;
  config.sampler.importance_sampling = false;
  config.sampler.std_per_step = {{1.0, 0.5}, {0.9, 0.4}};
  config.dynamics.kind = "cartpole";
  config.dynamics.pole_length = 0.75;
  config.cost.kind = "quadratic";
  config.cost.target = {0.0, 0.0, 3.14159, 0.0};
  config.cost.weights = {1.0, 0.1, 10.0, 0.1};
  config.controller.kind = "dmd";
  config.controller.step_size = 0.6;
  config.controller.step_size_per_step = {0.5, 0.6};
  config.feedback.kind = "pid";
  config.feedback.kp = {{1.0, 0.0, 0.0, 0.0}};
  config.feedback.integral_limit = 2.5;
  config.plant.replan_rate = 20.0;
  config.plant.disturbance_std = 0.05;
  config.initial_state = {{"THETA", 3.0}, {"X", -1.0}};

  // std_per_step must span the horizon to validate; shrink the horizon.
  config.horizon = 2;

  const std::string text = scenario_to_json(config);
  CHECK(parse_scenario(text) == config);
}

TEST_CASE("defaults survive the round trip including infinities") {
  const ScenarioConfig config;
  CHECK(parse_scenario(scenario_to_json(config)) == config);
}

TEST_CASE("unknown keys are rejected with a qualified path") {
  CHECK_THROWS_WITH_AS(parse_scenario(R"({"dynamics": {"bogus": 1}})"),
                       doctest::Contains("dynamics.bogus"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_scenario(R"({"not_a_key": 1})"), doctest::Contains("not_a_key"),
                       ConfigError);
}

TEST_CASE("syntax errors carry the line number") {
  const std::string text = "{\n  \"dt\": 0.02,\n  \"horizon\" 100\n}\n";
  CHECK_THROWS_WITH_AS(parse_scenario(text), doctest::Contains("line 3"), ConfigError);
}

TEST_CASE("validation collects every violation") {
  ScenarioConfig config;
  config.num_samples = 0;
  config.lambda = 0.0;
  const auto errors = validate(config);
  REQUIRE(errors.size() == 2);

  std::string joined;
  for (const auto& e : errors) joined += e + "\n";
  CHECK(joined.find("num_samples") != std::string::npos);
  CHECK(joined.find("lambda") != std::string::npos);

  CHECK_THROWS_AS(parse_scenario(R"({"num_samples": 0, "lambda": 0})"), ConfigError);
}

TEST_CASE("negative lambda names the field") {
  ScenarioConfig config;
  config.lambda = -1.0;
  const auto errors = validate(config);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].find("lambda") != std::string::npos);
}

TEST_CASE("bad controller kind fails validation") {
  ScenarioConfig config;
  config.controller.kind = "gradient_descent";
  CHECK_FALSE(validate(config).empty());
}

TEST_CASE("file round trip") {
  const std::string path = temp_path("scenario.json");
  ScenarioConfig config;
  config.num_samples = 77;
  config.initial_state["X"] = 1.5;
  save_scenario(config, path);
  CHECK(load_scenario(path) == config);
  std::remove(path.c_str());

  CHECK_THROWS_AS(load_scenario("/nonexistent/dir/scenario.json"), ConfigError);
}

TEST_CASE("empty file yields defaults") {
  const std::string path = temp_path("scenario_empty.json");
  std::ofstream(path).close();
  CHECK(load_scenario(path) == ScenarioConfig{});
  std::remove(path.c_str());
}

TEST_SUITE_END();
