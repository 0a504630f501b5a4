#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "sbg/evolver.hpp"
#include "sbg/text.hpp"

namespace sbg {

namespace {

using nlohmann::json;

struct Field {
  std::function<void(GeneratorConfig&, const std::string&)> set;
  std::function<std::string(const GeneratorConfig&)> get;
};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError("bad value for " + key + ": '" + v + "'");
  return out;
}

std::string format_double(double d) {
  std::ostringstream os;
  os.precision(17);
  os << d;
  return os.str();
}

template <typename T>
Field number_field(const std::string& key, T GeneratorConfig::*member) {
  return {[key, member](GeneratorConfig& c, const std::string& v) { c.*member = parse_number<T>(key, v); },
          [member](const GeneratorConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(c.*member);
            } else {
              return std::to_string(c.*member);
            }
          }};
}

template <typename T>
Field plan_field(const std::string& key, T SimulationPlan::*member) {
  return {[key, member](GeneratorConfig& c, const std::string& v) { c.plan.*member = parse_number<T>(key, v); },
          [member](const GeneratorConfig& c) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_double(c.plan.*member);
            } else {
              return std::to_string(c.plan.*member);
            }
          }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = [] {
    using G = GeneratorConfig;
    std::vector<std::pair<std::string, Field>> t;
    auto num = [&](const char* k, auto G::*m) { t.emplace_back(k, number_field(k, m)); };
    num("width", &G::width);
    num("height", &G::height);
    num("turnlimit", &G::turnlimit);
    num("weak_pieces", &G::weak_pieces);
    num("light_pieces", &G::light_pieces);
    num("strong_pieces", &G::strong_pieces);
    num("displacement_radius", &G::displacement_radius);
    num("letter_decay", &G::letter_decay);
    num("p_on_empty", &G::p_on_empty);
    num("p_on_opponent", &G::p_on_opponent);
    num("p_on_own", &G::p_on_own);
    t.emplace_back("word_length_weights",
                   Field{[](G& c, const std::string& v) {
                           c.word_length_weights.clear();
                           std::string part;
                           std::istringstream in(v);
                           while (std::getline(in, part, ','))
                             c.word_length_weights.push_back(parse_number<double>("word_length_weights", trim(part)));
                         },
                         [](const G& c) {
                           std::string s;
                           for (std::size_t i = 0; i < c.word_length_weights.size(); ++i)
                             s += (i ? "," : "") + format_double(c.word_length_weights[i]);
                           return s;
                         }});
    num("p_hmirror", &G::p_hmirror);
    num("p_vmirror", &G::p_vmirror);
    num("p_rotation", &G::p_rotation);
    num("p_star", &G::p_star);
    num("pool_blocks_per_class", &G::pool_blocks_per_class);
    num("max_blocks_per_piece", &G::max_blocks_per_piece);
    num("weak_max_mobility", &G::weak_max_mobility);
    num("light_max_mobility", &G::light_max_mobility);
    num("p_fill", &G::p_fill);
    num("strong_back", &G::strong_back);
    num("strong_front", &G::strong_front);
    num("light_share", &G::light_share);
    num("p_mirror_change", &G::p_mirror_change);
    num("p_black_regen", &G::p_black_regen);
    num("p_condition", &G::p_condition);
    num("p_extra_condition", &G::p_extra_condition);
    num("p_reach", &G::p_reach);
    num("p_asymmetric_conditions", &G::p_asymmetric_conditions);
    num("population", &G::population);
    num("generations", &G::generations);
    num("seed", &G::seed);
    num("max_redraws", &G::max_redraws);
    num("w_rules_lowest_usefulness", &G::w_rules_lowest_usefulness);
    num("w_rules_roulette", &G::w_rules_roulette);
    num("w_rules_swap", &G::w_rules_swap);
    num("w_conditions_both", &G::w_conditions_both);
    num("w_conditions_side", &G::w_conditions_side);
    using P = SimulationPlan;
    auto plan = [&](const char* k, auto P::*m) { t.emplace_back(k, plan_field(k, m)); };
    plan("plan.n_mm", &P::n_mm);
    plan("plan.n_mr", &P::n_mr);
    plan("plan.expected_branching", &P::expected_branching);
    plan("plan.desired_weak", &P::desired_weak);
    plan("plan.desired_light", &P::desired_light);
    plan("plan.desired_strong", &P::desired_strong);
    t.emplace_back("plan.node_budget", Field{[](G& c, const std::string& v) {
                                               c.plan.budget.node_budget = parse_number<int>("plan.node_budget", v);
                                             },
                                             [](const G& c) { return std::to_string(c.plan.budget.node_budget); }});
    t.emplace_back("plan.max_depth", Field{[](G& c, const std::string& v) {
                                             c.plan.budget.max_depth = parse_number<int>("plan.max_depth", v);
                                           },
                                           [](const G& c) { return std::to_string(c.plan.budget.max_depth); }});
    t.emplace_back("plan.wallclock_ms",
                   Field{[](G& c, const std::string& v) {
                           c.plan.budget.wallclock_guard = std::chrono::milliseconds(parse_number<long>("plan.wallclock_ms", v));
                         },
                         [](const G& c) { return std::to_string(c.plan.budget.wallclock_guard.count()); }});
    return t;
  }();
  return table;
}

}  // namespace

GeneratorConfig parse_config(const std::string& text) {
  GeneratorConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& table = fields();
    auto it = std::find_if(table.begin(), table.end(), [&](const auto& f) { return f.first == key; });
    if (it == table.end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    try {
      it->second.set(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  validate(cfg);
  return cfg;
}

std::string serialize_config(const GeneratorConfig& cfg) {
  std::string out;
  for (const auto& [key, f] : fields()) out += key + " = " + f.get(cfg) + "\n";
  return out;
}

namespace {

namespace fs = std::filesystem;

json features_json(const FeatureVector& f) {
  return json{{"P", f.P}, {"L_M", f.L_M}, {"L_D", f.L_D}, {"W", f.W}, {"B_M", f.B_M},
              {"B_R", f.B_R}, {"S", f.S}, {"C", f.C}, {"R", f.R}};
}

FeatureVector features_from(const json& j, const json& usefulness) {
  FeatureVector f;
  f.P = j.at("P");
  f.L_M = j.at("L_M");
  f.L_D = j.at("L_D");
  f.W = j.at("W");
  f.B_M = j.at("B_M");
  f.B_R = j.at("B_R");
  f.S = j.at("S");
  f.C = j.at("C");
  f.R = j.at("R");
  f.usefulness = usefulness.get<std::vector<double>>();
  return f;
}

json log_line(const LogEntry& e) {
  const Individual& ind = *e.individual;
  json j{{"generation", e.generation}, {"role", e.role},         {"id", ind.id},
         {"parents", ind.parents},     {"origin", ind.origin},   {"playable", ind.playable},
         {"fitness", ind.score()},     {"digest", spec_digest(ind.spec)}};
  if (ind.features) {
    j["features"] = features_json(*ind.features);
    j["usefulness"] = ind.features->usefulness;
  }
  return j;
}

json summary_json(const GenerationSummary& s) {
  return json{{"generation", s.generation}, {"best", s.best}, {"mean", s.mean},
              {"playable", s.playable},     {"size", s.size}, {"restarted", s.restarted}};
}

GenerationSummary summary_from(const json& j) {
  GenerationSummary s;
  s.generation = j.at("generation");
  s.best = j.at("best");
  s.mean = j.at("mean");
  s.playable = j.at("playable");
  s.size = j.at("size");
  s.restarted = j.at("restarted");
  return s;
}

std::string generation_dir_name(int g) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "gen_%04d", g);
  return buf;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_checkpoint(const fs::path& root, const EvolutionState& st, const std::vector<GenerationSummary>& history,
                      std::uintmax_t log_bytes, const GeneratorConfig& cfg) {
  const fs::path dir = root / "checkpoints" / generation_dir_name(st.generation);
  const fs::path tmp = root / "checkpoints" / (generation_dir_name(st.generation) + ".tmp");
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  json inds = json::array();
  for (std::size_t i = 0; i < st.population.size(); ++i) {
    const Individual& ind = st.population[i];
    char name[32];
    std::snprintf(name, sizeof name, "ind_%03zu.sbg", i);
    write_text(tmp / name, serialize_sbg(ind.spec));
    json j{{"file", name},           {"id", ind.id},       {"parents", ind.parents},
           {"origin", ind.origin},   {"playable", ind.playable}, {"digest", spec_digest(ind.spec)}};
    if (ind.fitness) j["fitness"] = *ind.fitness;
    if (ind.features) {
      j["features"] = features_json(*ind.features);
      j["usefulness"] = ind.features->usefulness;
    }
    inds.push_back(std::move(j));
  }
  json hist = json::array();
  for (const auto& s : history) hist.push_back(summary_json(s));
  json manifest{{"generation", st.generation},
                {"next_id", st.next_id},
                {"restarted", st.restarted},
                {"log_bytes", log_bytes},
                {"config", serialize_config(cfg)},
                {"history", hist},
                {"individuals", inds}};
  write_text(tmp / "manifest.json", manifest.dump(2) + "\n");
  fs::remove_all(dir);
  fs::rename(tmp, dir);
}

struct Loaded {
  EvolutionState state;
  std::vector<GenerationSummary> history;
  std::uintmax_t log_bytes = 0;
};

std::optional<Loaded> load_latest_checkpoint(const fs::path& root, const GeneratorConfig& cfg) {
  const fs::path dir = root / "checkpoints";
  if (!fs::exists(dir)) return std::nullopt;
  std::optional<fs::path> best;
  int best_gen = -1;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.size() != 8 || name.rfind("gen_", 0) != 0 || !fs::exists(e.path() / "manifest.json")) continue;
    const int g = std::stoi(name.substr(4));
    if (g > best_gen) {
      best_gen = g;
      best = e.path();
    }
  }
  if (!best) return std::nullopt;
  const json m = json::parse(read_text(*best / "manifest.json"));
  if (m.at("config").get<std::string>() != serialize_config(cfg))
    throw ConfigError("checkpoint in " + best->string() + " was written with a different configuration");
  Loaded out;
  out.state.generation = m.at("generation");
  out.state.next_id = m.at("next_id");
  out.state.restarted = m.at("restarted");
  out.log_bytes = m.at("log_bytes");
  for (const auto& h : m.at("history")) out.history.push_back(summary_from(h));
  for (const auto& j : m.at("individuals")) {
    Individual ind;
    ind.spec = parse_sbg(read_text(*best / j.at("file").get<std::string>()));
    ind.id = j.at("id");
    ind.parents = j.at("parents").get<std::vector<std::uint64_t>>();
    ind.origin = j.at("origin");
    ind.playable = j.at("playable");
    if (j.contains("fitness")) ind.fitness = j.at("fitness").get<double>();
    if (j.contains("features")) ind.features = features_from(j.at("features"), j.at("usefulness"));
    out.state.population.push_back(std::move(ind));
  }
  return out;
}

}  // namespace

RunResult run(const GeneratorConfig& cfg, const RunOptions& opts) {
  validate(cfg);
  const MoveSetPool pool = run_pool(cfg);

  const bool persist = !opts.out_dir.empty();
  const fs::path log_path = opts.out_dir / "log.jsonl";
  std::ofstream log_file;
  RunResult result;
  std::optional<EvolutionState> state;

  if (persist) {
    fs::create_directories(opts.out_dir / "checkpoints");
    if (opts.resume) {
      if (auto loaded = load_latest_checkpoint(opts.out_dir, cfg)) {
        if (fs::exists(log_path)) fs::resize_file(log_path, loaded->log_bytes);
        state = std::move(loaded->state);
        result.generations = std::move(loaded->history);
      }
    }
    if (!state) {
      fs::remove_all(opts.out_dir / "checkpoints");
      fs::create_directories(opts.out_dir / "checkpoints");
      write_text(log_path, "");
    }
    write_text(opts.out_dir / "config.txt", serialize_config(cfg));
    log_file.open(log_path, std::ios::binary | std::ios::app);
    if (!log_file) throw std::runtime_error("cannot open " + log_path.string());
  }

  const LogSink sink = [&](const LogEntry& e) {
    if (persist) log_file << log_line(e).dump() << '\n';
  };
  auto finish_generation = [&](const EvolutionState& st) {
    const GenerationSummary s = summarize(st);
    result.generations.push_back(s);
    if (persist) {
      log_file.flush();
      if (!log_file) throw std::runtime_error("cannot write " + log_path.string());
      write_checkpoint(opts.out_dir, st, result.generations, fs::file_size(log_path), cfg);
    }
    if (opts.on_generation) opts.on_generation(s);
  };

  if (!state) {
    state = initial_state(cfg, pool, opts.jobs, sink);
    finish_generation(*state);
  }
  while (state->generation < cfg.generations) {
    if (opts.stop_after >= 0 && state->generation >= opts.stop_after) break;
    state = step_generation(*state, cfg, pool, opts.jobs, sink);
    finish_generation(*state);
  }
  result.final_state = std::move(*state);
  return result;
}

}  // namespace sbg
