#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "sbg/evolver.hpp"
#include "sbg/gdl.hpp"
#include "sbg/gdl_gen.hpp"
#include "sbg/text.hpp"
#include "test_support.hpp"

using namespace sbg;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string example_path() { return test::games_dir() + "/example_iv.sbg"; }

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("sbg_cli_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

class SeedEnv {
 public:
  explicit SeedEnv(const char* value) {
    if (value)
      setenv("SBG_SEED", value, 1);
    else
      unsetenv("SBG_SEED");
  }
  ~SeedEnv() { unsetenv("SBG_SEED"); }
};

}  // namespace

TEST(Cli, Usage) {
  EXPECT_EQ(run_cli({}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(run_cli({"perft", example_path()}).code, cli::kUsage);  // --depth is required
  EXPECT_EQ(run_cli({"translate", example_path(), "--repr", "tree"}).code, cli::kUsage);
  const auto help = run_cli({"--help"});
  EXPECT_EQ(help.code, cli::kOk);
  EXPECT_NE(help.out.find("translate"), std::string::npos);
}

TEST(Cli, Show) {
  const auto r = run_cli({"show", example_path()});
  EXPECT_EQ(r.code, cli::kOk);
  EXPECT_EQ(r.out, "qbknqq\nnkp.pn\n......\n.....P\nNKPPPN\nQBKNQ.\n");
}

TEST(Cli, Perft) {
  auto r = run_cli({"perft", example_path(), "--depth", "0"});
  ASSERT_EQ(r.code, cli::kOk);
  EXPECT_EQ(json::parse(r.out)["perft"][0]["nodes"], 1);
  r = run_cli({"perft", example_path(), "--depth", "2"});
  ASSERT_EQ(r.code, cli::kOk);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["perft"].size(), 3u);
  EXPECT_EQ(j["perft"][1]["nodes"], 20);
  EXPECT_EQ(j["perft"][2]["nodes"], 341);
}

TEST(Cli, InputErrors) {
  EXPECT_EQ(run_cli({"show", "/nonexistent/game.sbg"}).code, cli::kIo);
  const auto dir = scratch("errors");
  const auto bad = (dir / "bad.sbg").string();
  std::ofstream(bad) << "game broken\nboard 2\n";
  const auto r = run_cli({"show", bad});
  EXPECT_EQ(r.code, cli::kParse);
  EXPECT_NE(r.err.find("bad.sbg:2:"), std::string::npos);
  EXPECT_EQ(run_cli({"translate", example_path(), "-o", "/nonexistent/dir/out.kif"}).code, cli::kIo);
  EXPECT_EQ(run_cli({"evolve", "--config", "/nonexistent/cfg.txt"}).code, cli::kIo);
}

TEST(Cli, TranslateToStdoutAndFile) {
  auto r = run_cli({"translate", example_path(), "--repr", "piece-id", "--factor-prefixes", "off"});
  ASSERT_EQ(r.code, cli::kOk);
  TranslationOptions o;
  o.representation = Representation::PieceId;
  o.factor_prefixes = false;
  EXPECT_EQ(gdl::parse_document(r.out), translate(test::example_game(), o));
  EXPECT_EQ(json::parse(r.err)["representation"], "piece-id");

  const auto path = (scratch("translate") / "ex.kif").string();
  r = run_cli({"translate", example_path(), "-o", path});
  ASSERT_EQ(r.code, cli::kOk);
  const auto info = json::parse(r.out);
  EXPECT_EQ(info["representation"], "board");
  EXPECT_EQ(info["factor_prefixes"], true);
  EXPECT_EQ(gdl::parse_document(test::read_file(path)).rules.size(), info["rules"].get<std::size_t>());
}

TEST(Cli, CheckBothRepresentations) {
  const auto r = run_cli({"check", example_path(), "--seed", "4", "--samples", "30"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto j = json::parse(r.out);
  ASSERT_EQ(j["runs"].size(), 4u);
  for (const auto& run : j["runs"]) {
    EXPECT_TRUE(run["ok"].get<bool>());
    EXPECT_EQ(run["states"], 30);
  }
}

TEST(Cli, SimulateIsSeeded) {
  SeedEnv env(nullptr);
  const std::vector<std::string> args{"simulate", example_path(), "--seed", "12", "--n-mm", "2", "--n-mr", "2"};
  const auto a = run_cli(args), b = run_cli(args);
  ASSERT_EQ(a.code, cli::kOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto j = json::parse(a.out);
  EXPECT_EQ(j["seed"], 12);
  EXPECT_GE(j["fitness"].get<double>(), 0.0);
  EXPECT_LE(j["fitness"].get<double>(), 1.0);
  EXPECT_EQ(j["features"]["usefulness"].size(), 5u);
}

TEST(Cli, SeedFallbacks) {
  {
    SeedEnv env("77");
    const auto r = run_cli({"simulate", example_path(), "--n-mm", "1", "--n-mr", "2"});
    ASSERT_EQ(r.code, cli::kOk);
    EXPECT_EQ(json::parse(r.out)["seed"], 77);
  }
  {
    SeedEnv env("seven");
    EXPECT_EQ(run_cli({"simulate", example_path()}).code, cli::kUsage);
  }
  SeedEnv env(nullptr);
  const auto r = run_cli({"check", example_path(), "--samples", "5", "--repr", "board", "--factor-prefixes", "on"});
  ASSERT_EQ(r.code, cli::kOk);
  EXPECT_NE(r.err.find("seed: "), std::string::npos);
}

TEST(Cli, Evolve) {
  SeedEnv env(nullptr);
  const auto dir = scratch("evolve");
  GeneratorConfig cfg;
  cfg.population = 4;
  cfg.generations = 2;
  cfg.turnlimit = 30;
  cfg.plan.n_mm = 1;
  cfg.plan.n_mr = 2;
  cfg.plan.budget.node_budget = 50;
  cfg.plan.budget.max_depth = 1;
  std::ofstream(dir / "cfg.txt") << serialize_config(cfg);
  const auto r = run_cli({"evolve", "--config", (dir / "cfg.txt").string(), "--out", (dir / "run").string(), "--jobs", "2"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  double best = -1;
  int n = 0;
  while (std::getline(lines, line)) {
    const auto j = json::parse(line);
    EXPECT_GE(j["best"].get<double>(), best);
    best = j["best"].get<double>();
    EXPECT_EQ(j["size"], 4);
    ++n;
  }
  EXPECT_EQ(n, 3);  // generations 0, 1 and 2
  EXPECT_TRUE(std::filesystem::exists(dir / "run" / "log.jsonl"));

  std::ofstream(dir / "bad.txt") << "population = -3\n";
  EXPECT_EQ(run_cli({"evolve", "--config", (dir / "bad.txt").string()}).code, cli::kParse);
}
