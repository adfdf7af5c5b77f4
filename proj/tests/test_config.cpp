#include "sepdyn/config.hpp"

#include <string>
#include <vector>

#include "doctest.h"
#include "sepdyn/errors.hpp"

using namespace sepdyn;

namespace {

// Returns the ConfigError message raised by `fn`, or "" when nothing threw.
template <typename Fn>
std::string config_error_of(Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("Config: parses dotted keys, comments, and blank lines") {
  const Config cfg = Config::parse_text(
      "# model section\n"
      "model.alpha = 0.25\n"
      "model.coupling = g0\n"
      "\n"
      "; task section\n"
      "task.z_list = -1, -10 -100\n"
      "output.format = csv\n");

  CHECK(cfg.has("model.alpha"));
  CHECK_FALSE(cfg.has("model.beta"));
  CHECK(cfg.get_number("model.alpha", 0.0) == 0.25);
  CHECK(cfg.get_number("model.beta", 1.5) == 1.5);
  CHECK(cfg.get_text("model.coupling", "cr") == "g0");
  CHECK(cfg.get_text("output.format", "json") == "csv");

  const std::vector<double> zs = cfg.get_numbers("task.z_list", {});
  REQUIRE(zs.size() == 3);
  CHECK(zs[0] == -1.0);
  CHECK(zs[1] == -10.0);
  CHECK(zs[2] == -100.0);

  const std::vector<double> fallback = cfg.get_numbers("task.nu_list",
                                                       {1.0, 2.0});
  CHECK(fallback.size() == 2);

  CHECK(cfg.keys() == std::vector<std::string>{"model.alpha",
                                               "model.coupling",
                                               "task.z_list",
                                               "output.format"});
}

TEST_CASE("Config: malformed lines fail with source and line number") {
  const std::string no_eq = config_error_of(
      [] { Config::parse_text("model.alpha = 0\nbroken line\n", "run.cfg"); });
  CHECK(no_eq.find("run.cfg:2") != std::string::npos);
  CHECK(no_eq.find("broken line") != std::string::npos);

  const std::string bad_key = config_error_of(
      [] { Config::parse_text("mo del = 1\n", "run.cfg"); });
  CHECK(bad_key.find("run.cfg:1") != std::string::npos);
  CHECK(bad_key.find("invalid key") != std::string::npos);

  const std::string no_value = config_error_of(
      [] { Config::parse_text("model.alpha =\n", "run.cfg"); });
  CHECK(no_value.find("no value") != std::string::npos);

  const std::string dup = config_error_of([] {
    Config::parse_text("a.b = 1\na.b = 2\n", "run.cfg");
  });
  CHECK(dup.find("run.cfg:2") != std::string::npos);
  CHECK(dup.find("duplicate") != std::string::npos);
}

TEST_CASE("Config: typed getters name the offending key") {
  const Config cfg = Config::parse_text(
      "model.alpha = zero\ntask.list = 1, x, 3\n");

  const std::string bad_num = config_error_of(
      [&] { cfg.get_number("model.alpha", 0.0); });
  CHECK(bad_num.find("model.alpha") != std::string::npos);
  CHECK(bad_num.find("zero") != std::string::npos);

  const std::string bad_list = config_error_of(
      [&] { cfg.get_numbers("task.list", {}); });
  CHECK(bad_list.find("task.list") != std::string::npos);

  // Trailing garbage after a number is rejected, not truncated.
  const Config partial = Config::parse_text("v = 1.5extra\n");
  CHECK(config_error_of([&] { partial.get_number("v", 0.0); }) != "");
}

TEST_CASE("Config: unknown keys are reported with their location") {
  const Config cfg = Config::parse_text(
      "model.alpha = 0\nmodel.alhpa = 1\n", "run.cfg");
  const std::string msg = config_error_of(
      [&] { cfg.require_known({"model.alpha", "model.beta"}); });
  CHECK(msg.find("run.cfg:2") != std::string::npos);
  CHECK(msg.find("model.alhpa") != std::string::npos);

  cfg.require_known({"model.alpha", "model.alhpa"});  // no throw
}

TEST_CASE("Config: missing file is a ConfigError") {
  CHECK_THROWS_AS(Config::parse_file("/nonexistent-dir/run.cfg"),
                  ConfigError);
}
