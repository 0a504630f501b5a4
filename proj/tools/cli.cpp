#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>

#include "sbg/differential.hpp"
#include "sbg/evolver.hpp"
#include "sbg/fitness.hpp"
#include "sbg/gdl_gen.hpp"
#include "sbg/text.hpp"

namespace sbg::cli {

namespace {

using nlohmann::json;

struct Failure {
  int code;
  std::string message;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kIo, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text) || !out.flush()) throw Failure{kIo, "cannot write " + path};
}

GameSpec load_game(const std::string& path) {
  const std::string text = read_text(path);
  try {
    return parse_sbg(text);
  } catch (const ParseError& e) {
    throw Failure{kParse, e.diagnostic(path)};
  } catch (const ValidationError& e) {
    throw Failure{kParse, path + ": " + e.what()};
  }
}

GeneratorConfig load_config(const std::string& path) {
  const std::string text = read_text(path);
  try {
    return parse_config(text);
  } catch (const ConfigError& e) {
    throw Failure{kParse, path + ": " + e.what()};
  }
}

/// --seed, then SBG_SEED, then entropy (reported on stderr).
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::ostream& err) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SBG_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      const std::uint64_t v = std::stoull(env, &used);
      if (env[used] == '\0') return v;
    } catch (const std::exception&) {
    }
    throw Failure{kUsage, std::string("SBG_SEED is not an unsigned integer: ") + env};
  }
  std::random_device rd;
  const std::uint64_t v = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  err << "seed: " << v << '\n';
  return v;
}

json features_json(const FeatureVector& f) {
  return json{{"P", f.P},     {"L_M", f.L_M}, {"L_D", f.L_D}, {"W", f.W},
              {"B_M", f.B_M}, {"B_R", f.B_R}, {"S", f.S},     {"C", f.C},
              {"R", f.R},     {"usefulness", f.usefulness}};
}

Representation parse_repr(const std::string& s) {
  if (s == "board") return Representation::BoardPredicate;
  if (s == "piece-id") return Representation::PieceId;
  return Representation::Auto;
}

std::vector<Representation> repr_list(const std::string& s) {
  if (s == "both") return {Representation::BoardPredicate, Representation::PieceId};
  return {parse_repr(s)};
}

std::vector<bool> factor_list(const std::string& s) {
  if (s == "both") return {false, true};
  return {s == "on"};
}

struct EvolveArgs {
  std::string config, out_dir;
  bool resume = false;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<int> generations, population;
};

struct SimulateArgs {
  std::string game, config;
  std::optional<std::uint64_t> seed;
  std::optional<int> n_mm, n_mr, nodes, depth;
  int jobs = 1;
};

struct TranslateArgs {
  std::string game, output, repr = "auto", factor = "on";
};

struct CheckArgs {
  std::string game, repr = "both", factor = "both";
  std::optional<std::uint64_t> seed;
  int samples = 100;
};

struct PerftArgs {
  std::string game;
  int depth = 1;
};

int cmd_evolve(const EvolveArgs& a, std::ostream& out, std::ostream& err) {
  GeneratorConfig cfg = load_config(a.config);
  // The configuration's seed is the last fallback, so entropy is never drawn.
  if (a.seed || std::getenv("SBG_SEED")) cfg.seed = resolve_seed(a.seed, err);
  if (a.generations) cfg.generations = *a.generations;
  if (a.population) cfg.population = *a.population;
  try {
    validate(cfg);
  } catch (const ConfigError& e) {
    throw Failure{kParse, e.what()};
  }
  RunOptions opts;
  opts.out_dir = a.out_dir;
  opts.resume = a.resume;
  opts.jobs = a.jobs;
  opts.on_generation = [&](const GenerationSummary& s) {
    out << json{{"generation", s.generation}, {"best", s.best},         {"mean", s.mean},
                {"playable", s.playable},     {"size", s.size},         {"restarted", s.restarted}}
               .dump()
        << '\n'
        << std::flush;
  };
  try {
    const RunResult r = run(cfg, opts);
    err << "evolved " << r.generations.size() << " generations, seed " << cfg.seed << '\n';
  } catch (const ConfigError& e) {
    throw Failure{kParse, e.what()};
  } catch (const std::filesystem::filesystem_error& e) {
    throw Failure{kIo, e.what()};
  }
  return kOk;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  const Game game(load_game(a.game));
  SimulationPlan plan = a.config.empty() ? SimulationPlan{} : load_config(a.config).plan;
  const std::uint64_t seed = resolve_seed(a.seed, err);
  plan.base_seed = seed;
  if (a.n_mm) plan.n_mm = *a.n_mm;
  if (a.n_mr) plan.n_mr = *a.n_mr;
  if (a.nodes) plan.budget.node_budget = *a.nodes;
  if (a.depth) plan.budget.max_depth = *a.depth;
  plan.jobs = a.jobs;
  try {
    validate(plan);
  } catch (const std::invalid_argument& e) {
    throw Failure{kUsage, e.what()};
  }
  const Evaluation ev = evaluate(game, plan);
  json j{{"game", game.spec().name}, {"seed", seed}, {"fitness", ev.fitness}, {"features", features_json(ev.features)}};
  json results = json::object();
  for (const auto* set : {&ev.records.mm, &ev.records.mr})
    for (const auto& r : *set) results[result_name(r.result)] = results.value(result_name(r.result), 0) + 1;
  j["results"] = results;
  out << j.dump() << '\n';
  return kOk;
}

int cmd_translate(const TranslateArgs& a, std::ostream& out, std::ostream& err) {
  const GameSpec spec = load_game(a.game);
  TranslationOptions opts;
  opts.representation = parse_repr(a.repr);
  opts.factor_prefixes = a.factor == "on";
  gdl::Document doc;
  try {
    doc = translate(spec, opts);
  } catch (const TranslationError& e) {
    throw Failure{kParse, e.what()};
  }
  const Representation used =
      opts.representation == Representation::Auto ? choose_representation(spec) : opts.representation;
  const std::string kif = gdl::emit_kif(doc);
  json info{{"game", spec.name}, {"representation", representation_name(used)}, {"factor_prefixes", opts.factor_prefixes},
            {"rules", doc.rules.size()}, {"body_atoms", doc.body_atoms()}};
  if (a.output.empty()) {
    out << kif;
    err << info.dump() << '\n';
  } else {
    write_text(a.output, kif);
    info["output"] = a.output;
    out << info.dump() << '\n';
  }
  return kOk;
}

int cmd_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  const Game game(load_game(a.game));
  const std::uint64_t seed = resolve_seed(a.seed, err);
  json runs = json::array();
  int code = kOk;
  for (Representation r : repr_list(a.repr)) {
    for (bool factor : factor_list(a.factor)) {
      TranslationOptions opts;
      opts.representation = r;
      opts.factor_prefixes = factor;
      const Representation used = r == Representation::Auto ? choose_representation(game.spec()) : r;
      EquivalenceReport rep;
      try {
        rep = check_translation(game, opts, a.samples, seed);
      } catch (const TranslationError& e) {
        throw Failure{kParse, e.what()};
      }
      json j{{"representation", representation_name(used)}, {"factor_prefixes", factor}, {"states", rep.states},
             {"transitions", rep.transitions}, {"ok", rep.ok()}};
      if (!rep.ok()) {
        j["mismatch"] = rep.mismatch->what;
        err << "mismatch (" << representation_name(used) << ", factoring " << (factor ? "on" : "off")
            << "): " << rep.mismatch->what << '\n'
            << rep.mismatch->dump;
        code = kMismatch;
      }
      runs.push_back(j);
      if (code != kOk) break;
    }
    if (code != kOk) break;
  }
  out << json{{"game", game.spec().name}, {"seed", seed}, {"samples", a.samples}, {"runs", runs}}.dump() << '\n';
  return code;
}

int cmd_perft(const PerftArgs& a, std::ostream& out) {
  const Game game(load_game(a.game));
  const GameState s = game.initial_state();
  json counts = json::array();
  for (int d = 0; d <= a.depth; ++d) counts.push_back(json{{"depth", d}, {"nodes", game.perft(s, d)}});
  out << json{{"game", game.spec().name}, {"perft", counts}}.dump() << '\n';
  return kOk;
}

int cmd_show(const std::string& path, std::ostream& out) {
  const Game game(load_game(path));
  out << render_board(game, game.initial_state());
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simplified Boardgames: engine, generator and GDL compiler"};
  app.name("sbg");
  app.require_subcommand(1);

  EvolveArgs ev;
  auto* evolve = app.add_subcommand("evolve", "Run the evolutionary generator");
  evolve->add_option("--config", ev.config, "Generator configuration (key = value)")->required();
  evolve->add_option("--out", ev.out_dir, "Output directory for log.jsonl and checkpoints");
  evolve->add_flag("--resume", ev.resume, "Continue from the newest checkpoint in --out");
  evolve->add_option("--jobs", ev.jobs, "Concurrent evaluations")->check(CLI::PositiveNumber);
  evolve->add_option("--seed", ev.seed, "Master seed (overrides the configuration)");
  evolve->add_option("--generations", ev.generations, "Override the generation count")->check(CLI::NonNegativeNumber);
  evolve->add_option("--population", ev.population, "Override the population size")->check(CLI::PositiveNumber);

  SimulateArgs si;
  auto* simulate = app.add_subcommand("simulate", "Play the evaluation playouts and print features and fitness");
  simulate->add_option("game", si.game, "Game file (.sbg)")->required();
  simulate->add_option("--config", si.config, "Take the simulation plan from a generator configuration");
  simulate->add_option("--seed", si.seed, "Base seed of the playouts");
  simulate->add_option("--n-mm", si.n_mm, "Min-max vs min-max playouts");
  simulate->add_option("--n-mr", si.n_mr, "Min-max vs random playouts");
  simulate->add_option("--nodes", si.nodes, "Min-max node budget per move")->check(CLI::PositiveNumber);
  simulate->add_option("--depth", si.depth, "Min-max depth limit")->check(CLI::PositiveNumber);
  simulate->add_option("--jobs", si.jobs, "Concurrent playouts")->check(CLI::PositiveNumber);

  TranslateArgs tr;
  auto* translate_cmd = app.add_subcommand("translate", "Compile a game to GDL");
  translate_cmd->add_option("game", tr.game, "Game file (.sbg)")->required();
  translate_cmd->add_option("-o,--output", tr.output, "Write the .kif here instead of stdout");
  translate_cmd->add_option("--repr", tr.repr, "State representation")->check(CLI::IsMember({"board", "piece-id", "auto"}));
  translate_cmd->add_option("--factor-prefixes", tr.factor, "Hoist shared move prefixes")->check(CLI::IsMember({"on", "off"}));

  CheckArgs ch;
  auto* check = app.add_subcommand("check", "Compare the native engine with its GDL translation");
  check->add_option("game", ch.game, "Game file (.sbg)")->required();
  check->add_option("--seed", ch.seed, "Playout seed");
  check->add_option("--samples", ch.samples, "States to compare per configuration")->check(CLI::PositiveNumber);
  check->add_option("--repr", ch.repr, "Representation(s) to check")
      ->check(CLI::IsMember({"board", "piece-id", "auto", "both"}));
  check->add_option("--factor-prefixes", ch.factor, "Factoring setting(s) to check")
      ->check(CLI::IsMember({"on", "off", "both"}));

  PerftArgs pf;
  auto* perft_cmd = app.add_subcommand("perft", "Count move sequences from the initial position");
  perft_cmd->add_option("game", pf.game, "Game file (.sbg)")->required();
  perft_cmd->add_option("--depth", pf.depth, "Maximum depth")->required()->check(CLI::NonNegativeNumber);

  std::string show_game;
  auto* show = app.add_subcommand("show", "Print the initial board");
  show->add_option("game", show_game, "Game file (.sbg)")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*evolve) return cmd_evolve(ev, out, err);
    if (*simulate) return cmd_simulate(si, out, err);
    if (*translate_cmd) return cmd_translate(tr, out, err);
    if (*check) return cmd_check(ch, out, err);
    if (*perft_cmd) return cmd_perft(pf, out);
    if (*show) return cmd_show(show_game, out);
  } catch (const Failure& f) {
    err << "sbg: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    err << "sbg: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace sbg::cli
