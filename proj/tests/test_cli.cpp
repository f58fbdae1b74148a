#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hdtk/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json load(const std::string& name) {
  std::ifstream in(fs::path(HDTK_CONFIG_DIR) / name);
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("hdtk_cli_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump();
  return p;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(HDTK_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Experiment, CommandList) {
  const auto& c = hdtk::experiment_commands();
  for (const char* name : {"partition-check", "symbol-check", "norm-sweep", "hdist", "localization", "divcurl", "cz",
                           "commutator"})
    EXPECT_NE(std::find(c.begin(), c.end(), name), c.end()) << name;
}

TEST(Experiment, PartitionCheckReport) {
  const auto r = hdtk::run_experiment("partition-check", load("partition_d1.json"));
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.report["schema"], 1);
  EXPECT_EQ(r.report["config_hash"], hdtk::config_hash(load("partition_d1.json")));
  EXPECT_EQ(r.report["config_hash"].get<std::string>().size(), 64u);
  EXPECT_LE(r.report["results"]["max_deviation"].get<double>(), 1e-10);
  EXPECT_TRUE(r.report["tolerances"].contains("partition"));
  EXPECT_FALSE(r.report["seed"].is_null());
}

TEST(Experiment, HDistOracleReport) {
  const auto r = hdtk::run_experiment("hdist", load("hdist_oscillation.json"));
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.table_csv.substr(0, r.table_csv.find('\n')), "n,re_mu,im_mu,bound,residual");
}

TEST(Experiment, ConfigHashIsSha256OfCanonicalText) {
  // SHA-256 of "{}" (the canonical dump of an empty object)
  EXPECT_EQ(hdtk::config_hash(json::object()), "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a");
}

TEST(Experiment, MissingSeedNamesTheField) {
  json cfg = load("norm_sweep.json");
  cfg.erase("seed");
  try {
    hdtk::run_experiment("norm-sweep", cfg);
    FAIL() << "expected a config error";
  } catch (const hdtk::ConfigError& e) {
    EXPECT_EQ(e.field(), "seed");
  }
}

TEST(Experiment, InvalidFieldsNameTheirPath) {
  json cfg = load("hdist_oscillation.json");
  cfg["u"]["k"] = json::array({0});
  try {
    hdtk::run_experiment("hdist", cfg);
    FAIL();
  } catch (const hdtk::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("k"), std::string::npos);
  }
  json tol = load("partition_d1.json");
  tol["tolerances"] = {{"bogus", 1.0}};
  EXPECT_THROW(hdtk::run_experiment("partition-check", tol), hdtk::ConfigError);
  EXPECT_THROW(hdtk::run_experiment("teleport", json::object()), hdtk::ConfigError);
  EXPECT_THROW(hdtk::run_experiment("cz", load("partition_d1.json")), hdtk::ConfigError);
}

TEST(RunCli, ExitCodesAndFiles) {
  const fs::path dir = scratch("codes");
  std::ostringstream err;
  EXPECT_EQ(hdtk::run_cli("partition-check", (fs::path(HDTK_CONFIG_DIR) / "partition_d2.json").string(),
                          (dir / "ok").string(), err),
            0);
  EXPECT_TRUE(fs::exists(dir / "ok" / "report.json"));
  EXPECT_TRUE(fs::exists(dir / "ok" / "table.csv"));
  EXPECT_NE(err.str().find("PASS partition_of_unity"), std::string::npos);

  json cfg = load("norm_sweep.json");
  cfg.erase("seed");
  std::ostringstream err2;
  EXPECT_EQ(hdtk::run_cli("norm-sweep", write_config(dir, cfg).string(), (dir / "bad").string(), err2), 1);
  EXPECT_NE(err2.str().find("seed"), std::string::npos);

  // a failing criterion: zero tolerance against rounding-level deviation
  json strict = load("partition_d1.json");
  strict["tolerances"] = {{"partition", 0.0}};
  std::ostringstream err3;
  EXPECT_EQ(hdtk::run_cli("partition-check", write_config(dir, strict).string(), (dir / "fail").string(), err3), 2);
  EXPECT_NE(err3.str().find("FAIL partition_of_unity"), std::string::npos);
  fs::remove_all(dir);
}

TEST(RunCli, BinaryIsDeterministic) {
  const fs::path dir = scratch("det");
  const std::string cfg = (fs::path(HDTK_CONFIG_DIR) / "cz.json").string();
  ASSERT_EQ(run_binary("cz --config " + cfg + " --out " + (dir / "a").string()), 0);
  ASSERT_EQ(run_binary("cz --config " + cfg + " --out " + (dir / "b").string()), 0);
  EXPECT_EQ(slurp(dir / "a" / "table.csv"), slurp(dir / "b" / "table.csv"));
  EXPECT_EQ(slurp(dir / "a" / "report.json"), slurp(dir / "b" / "report.json"));
  EXPECT_FALSE(slurp(dir / "a" / "table.csv").empty());
  fs::remove_all(dir);
}

TEST(RunCli, BinaryUsageErrors) {
  EXPECT_EQ(run_binary("teleport --config x"), 1);
  EXPECT_EQ(run_binary("cz"), 1);
  EXPECT_EQ(run_binary("cz --config /nonexistent/config.json --out /tmp"), 1);
}
