#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rlab/cli/config.hpp"
#include "rlab/cli/dispatch.hpp"
#include "rlab/cli/emit.hpp"

using namespace rlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("rlab_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct EnvGuard {
  explicit EnvGuard(const std::string& v) { setenv("RLAB_OUTPUT_DIR", v.c_str(), 1); }
  ~EnvGuard() { unsetenv("RLAB_OUTPUT_DIR"); }
};

}  // namespace

TEST(Config, DefaultsAreTheFlagship) {
  const ExperimentConfig c;
  EXPECT_EQ(c.mode, "deterministic");
  EXPECT_DOUBLE_EQ(c.gamma1, 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(c.c1, 1.0);
  EXPECT_EQ(c.roof, "affine:1,0.5");
  EXPECT_NEAR(c.derived_beta(), 0.75, 1e-15);
  EXPECT_NO_THROW(validate_config(c));
}

TEST(Config, TextRoundTrip) {
  ExperimentConfig c;
  c.gamma1 = 2.5;
  c.sigma = {0.01, 0.3};
  c.n_list = {10, 20};
  c.seed = 123456789012345ULL;
  c.refine_check = true;
  c.h = 0.1;
  const auto back = parse_config_text(config_to_text(c));
  EXPECT_TRUE(back == c);
  EXPECT_DOUBLE_EQ(back.h, 0.1);
  EXPECT_TRUE(parse_config_text(config_to_text(ExperimentConfig{})) == ExperimentConfig{});
}

TEST(Config, ParsingRules) {
  const auto c = parse_config_text("# comment\ngamma1 = 5/2   # trailing\n\nbeta = auto\nN = 1000\n");
  EXPECT_DOUBLE_EQ(c.gamma1, 2.5);
  EXPECT_NEAR(c.derived_beta(), 0.4, 1e-15);
  EXPECT_TRUE(std::isnan(c.beta));
  EXPECT_EQ(c.N, 1000u);
  EXPECT_THROW(parse_config_text("no_such_key = 1"), config_error);
  EXPECT_THROW(parse_config_text("gamma1"), config_error);
  EXPECT_THROW(parse_config_text("N = -3"), config_error);
  EXPECT_THROW(parse_config_text("gamma1 = abc"), config_error);
}

TEST(Config, ValidationRejectsOutOfRange) {
  auto bad = [](auto mutate) {
    ExperimentConfig c;
    mutate(c);
    EXPECT_THROW(validate_config(c), config_error);
  };
  bad([](auto& c) { c.c1 = 1.5; });
  bad([](auto& c) { c.gamma1 = 0.5; });
  bad([](auto& c) { c.mode = "other"; });
  bad([](auto& c) { c.t_start = 2e4; });
  bad([](auto& c) { c.shards = 0; });
  bad([](auto& c) { c.a1 = 2; });
}

TEST(Emit, JsonSchemaAndArtifacts) {
  ExperimentReport r;
  r.experiment_id = "demo";
  r.config = {{"N", "10"}};
  r.checks.push_back(band_check("x", 0.5, 0, 1, "in [0, 1]"));
  auto& t = r.table("rows", {"a", "b"});
  t.rows.push_back({1.0, 0.1});
  const auto j = report_to_json(r);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["verdict"], "PASS");
  EXPECT_EQ(j["verdicts"][0]["criterion"], "x");
  EXPECT_EQ(table_to_csv(t), "a,b\n1,0.10000000000000001\n");

  const auto dir = scratch("emit");
  EnvGuard env(dir.string());
  ExperimentConfig cfg;
  cfg.output_dir = "should_not_be_used";
  EXPECT_EQ(output_directory(cfg), dir);
  const auto files = write_artifacts(r, cfg);
  ASSERT_EQ(files.size(), 2u);
  EXPECT_TRUE(fs::exists(dir / "demo.json"));
  EXPECT_TRUE(fs::exists(dir / "demo_rows.csv"));
}

TEST(Emit, ReplayConfigFromJsonReport) {
  ExperimentConfig c;
  c.gamma1 = 2.5;
  c.seed = 42;
  c.sigma = {0.05, 0.5};
  ExperimentReport r;
  r.experiment_id = "replay";
  r.config = config_entries(c);
  const auto dir = scratch("replay");
  std::ofstream(dir / "r.json") << report_to_json(r).dump(2);
  EXPECT_TRUE(load_config((dir / "r.json").string()) == c);
  std::ofstream(dir / "c.txt") << config_to_text(c);
  EXPECT_TRUE(load_config((dir / "c.txt").string()) == c);
  EXPECT_THROW(load_config((dir / "missing.txt").string()), config_error);
}

TEST(Dispatch, ExitCodes) {
  const auto dir = scratch("dispatch");
  EnvGuard env(dir.string());
  std::ostringstream out, err;
  EXPECT_EQ(dispatch("nonsense", {}, out, err), exit_config);

  ExperimentConfig low;
  low.gamma1 = 2.5;
  EXPECT_EQ(dispatch("srt", low, out, err), exit_config);
  EXPECT_NE(err.str().find("refused"), std::string::npos);

  ExperimentConfig bad;
  bad.c1 = 1.5;
  EXPECT_EQ(dispatch("constants", bad, out, err), exit_config);

  ExperimentConfig ok;
  out.str("");
  EXPECT_EQ(dispatch("constants", ok, out, err), exit_pass);
  EXPECT_NE(out.str().find("PASS"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "constants.json"));

  EXPECT_EQ(exit_code(Verdict::fail), exit_fail);
  EXPECT_EQ(exit_code(Verdict::inconclusive), exit_inconclusive);
}
