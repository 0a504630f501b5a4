#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbg/fitness.hpp"
#include "sbg/game.hpp"
#include "sbg/rng.hpp"

namespace sbg {

struct GeneratorConfig {
  int width = 6;
  int height = 6;
  int turnlimit = 60;
  // Piece types per class. Symbols come from fixed per-class alphabets.
  int weak_pieces = 2;
  int light_pieces = 2;
  int strong_pieces = 1;

  // Letters: displacements in [-radius, radius]^2 minus the origin, weight
  // letter_decay^(chebyshev distance - 1).
  int displacement_radius = 2;
  double letter_decay = 0.5;
  double p_on_empty = 0.5;
  double p_on_opponent = 0.4;
  double p_on_own = 0.1;
  std::vector<double> word_length_weights{0.6, 0.3, 0.1};  // lengths 1, 2, ...

  double p_hmirror = 0.4;
  double p_vmirror = 0.2;
  double p_rotation = 0.2;
  double p_star = 0.3;
  int pool_blocks_per_class = 40;
  int max_blocks_per_piece = 3;
  // Mobility buckets: <= weak_max weak, <= light_max light, strong above.
  int weak_max_mobility = 3;
  int light_max_mobility = 8;

  // Board: quarter fill probability, strong-piece probability at the
  // backrank falling linearly to strong_front at the front row of the half,
  // share of light pieces among the rest.
  double p_fill = 0.6;
  double strong_back = 0.5;
  double strong_front = 0.05;
  double light_share = 0.5;
  double p_mirror_change = 0.1;
  double p_black_regen = 0.1;

  // Winning conditions.
  double p_condition = 0.5;        // at least one explicit condition
  double p_extra_condition = 0.2;  // each further condition
  double p_reach = 0.5;            // Reach rather than CaptureAll
  double p_asymmetric_conditions = 0.2;

  int population = 20;
  int generations = 10;
  SimulationPlan plan{};
  std::uint64_t seed = 1;
  int max_redraws = 1000;

  // Mutation option weights.
  double w_rules_lowest_usefulness = 1;
  double w_rules_roulette = 1;
  double w_rules_swap = 1;
  double w_conditions_both = 1;
  double w_conditions_side = 1;  // scales 3|B_M| + |B_R|
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ConfigError on out-of-range values.
void validate(const GeneratorConfig& cfg);

/// Flat `key = value` file; `#` comments. Plan keys are prefixed `plan.`.
GeneratorConfig parse_config(const std::string& text);
std::string serialize_config(const GeneratorConfig& cfg);

/// Per-class piece symbols.
const std::string& class_symbols(PieceClass c);

struct MoveSetPool {
  std::array<std::vector<MoveRegex>, 3> blocks;  // indexed by PieceClass

  const std::vector<MoveRegex>& of(PieceClass c) const { return blocks[static_cast<std::size_t>(c)]; }
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Modifiers used by the building-block generator.
MoveRegex hmirror(const MoveRegex& r);    // r + r with dx negated
MoveRegex vmirror(const MoveRegex& r);    // r + r with dy negated
MoveRegex rotations(const MoveRegex& r);  // union of the four quarter turns
MoveRegex star_letter(const Word& word, std::size_t i);

PieceClass bucket(int mobility, const GeneratorConfig& cfg);

MoveSetPool generate_building_blocks(const GeneratorConfig& cfg, Rng& rng);
/// The pool a run with this configuration draws from.
MoveSetPool run_pool(const GeneratorConfig& cfg);
std::vector<Occupant> generate_board(const GeneratorConfig& cfg, const std::vector<PieceDef>& pieces, Rng& rng);

struct Individual {
  GameSpec spec;
  std::optional<FeatureVector> features;
  std::optional<double> fitness;
  bool playable = false;
  std::uint64_t id = 0;
  std::vector<std::uint64_t> parents;
  std::string origin = "random";  // random | crossover | mutation:<kind> | duplicate | restart

  bool evaluated() const { return fitness.has_value(); }
  double score() const { return fitness.value_or(0.0); }
};

/// Spec usable as an individual: valid, both sides have pieces and the
/// initial position is not already decided.
bool viable(const GameSpec& spec);

/// Sum of the piece's white rules, plus black's when asymmetric.
int rule_complexity(const PieceDef& p);

Individual generate_individual(const GeneratorConfig& cfg, const MoveSetPool& pool, Rng& rng);
std::vector<Individual> generate_population(const GeneratorConfig& cfg, const MoveSetPool& pool, Rng& rng);

/// Indices into `population`: playable members sorted by B_M + B_R, paired
/// from the ends towards the centre.
std::vector<std::pair<std::size_t, std::size_t>> select_parents(const std::vector<Individual>& population);

/// Cut points are column indices 0 <= c1 <= c2 <= width; columns c1+1..c2
/// are exchanged.
std::pair<GameSpec, GameSpec> crossover_with_cuts(const GameSpec& a, const GameSpec& b, int c1, int c2, Rng& rng);
std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b, Rng& rng);

class PairingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mutated copy, unevaluated. `origin` records which operator applied.
Individual mutate(const Individual& ind, const GeneratorConfig& cfg, const MoveSetPool& pool, Rng& rng);

// Individual mutation operators, exposed for testing.
GameSpec mutate_board(const GameSpec& spec, Rng& rng);
GameSpec redraw_piece_rules(const GameSpec& spec, int piece, const GeneratorConfig& cfg, const MoveSetPool& pool,
                            Rng& rng);
GameSpec swap_piece_rules(const GameSpec& spec, Rng& rng);  // unchanged if no class has two pieces

/// One line of the evaluation log.
struct LogEntry {
  int generation = 0;
  std::string role;  // parent | offspring | mutant | initial | restart
  const Individual* individual = nullptr;
};

using LogSink = std::function<void(const LogEntry&)>;

struct EvolutionState {
  int generation = 0;
  std::vector<Individual> population;
  std::uint64_t next_id = 0;
  bool restarted = false;  // the last step started over from random games
};

/// Evaluates unevaluated individuals in place; playouts of individual `id`
/// are seeded from (cfg.seed, id).
void evaluate_all(std::vector<Individual*> individuals, const GeneratorConfig& cfg, int jobs);

/// Generation 0: random population, evaluated.
EvolutionState initial_state(const GeneratorConfig& cfg, const MoveSetPool& pool, int jobs, const LogSink& log);
/// Generation g+1 from generation g.
EvolutionState step_generation(const EvolutionState& state, const GeneratorConfig& cfg, const MoveSetPool& pool,
                               int jobs, const LogSink& log);

/// The fixed-size elitist replacement: best n, duplicating the best when
/// fewer than n are playable. Exposed for testing.
std::vector<Individual> replacement(std::vector<Individual> candidates, int n);

struct GenerationSummary {
  int generation = 0;
  double best = 0;
  double mean = 0;
  int playable = 0;
  int size = 0;
  bool restarted = false;
};

GenerationSummary summarize(const EvolutionState& state);

struct RunOptions {
  std::filesystem::path out_dir;  // empty: keep everything in memory
  bool resume = false;
  int jobs = 1;
  int stop_after = -1;  // for tests: stop after this generation, as if interrupted
  std::function<void(const GenerationSummary&)> on_generation;
};

struct RunResult {
  std::vector<GenerationSummary> generations;
  EvolutionState final_state;
};

/// Runs the configured number of generations. With an output directory it
/// appends to log.jsonl, writes checkpoints/gen_NNNN/ after every
/// generation and, with `resume`, continues from the newest checkpoint.
RunResult run(const GeneratorConfig& cfg, const RunOptions& opts = {});

/// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string spec_digest(const GameSpec& spec);

}  // namespace sbg
