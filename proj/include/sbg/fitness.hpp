#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "sbg/agents.hpp"
#include "sbg/game.hpp"

namespace sbg {

struct SimulationPlan {
  int n_mm = 4;   // min-max vs min-max playouts
  int n_mr = 4;   // min-max vs random playouts, colours alternate
  AgentBudget budget{};
  std::uint64_t base_seed = 0;
  double expected_branching = 20.0;  // mu for the width feature
  /// Desired rule size per piece class, summed over the piece types.
  double desired_weak = 6, desired_light = 10, desired_strong = 16;
  int jobs = 1;  // concurrent playouts; never changes results
};

/// Throws std::invalid_argument when counts are out of range.
void validate(const SimulationPlan& plan);

struct FeatureVector {
  double P = 0;
  double L_M = 0;
  double L_D = 0;
  double W = 0;
  double B_M = 0;
  double B_R = 0;
  double S = 0;
  double C = 0;
  double R = 0;
  std::vector<double> usefulness;  // indexed like GameSpec::pieces

  bool operator==(const FeatureVector&) const = default;
};

class FeatureRangeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Min-max/min-max and min-max/random records of one evaluation.
struct PlayoutSet {
  std::vector<PlayoutRecord> mm;
  std::vector<PlayoutRecord> mr;
};

/// exp(-(x - mu)^2 / (2 sigma^2)) with sigma = mu / 4.
double gaussian_peak(double x, double mu);

double feature_P(std::span<const PlayoutRecord> records);
double feature_L_M(std::span<const PlayoutRecord> mm, int turnlimit);
double feature_L_D(std::span<const PlayoutRecord> mm, std::span<const PlayoutRecord> mr, int turnlimit);
/// `records` are all playouts of the evaluation; a game with no sampled
/// state has mean branching factor 0.
double feature_W(const PlayoutSet& records, double mu);
double feature_B_M(std::span<const PlayoutRecord> mm);
/// Wins of min-max as white minus wins of min-max as black, over all
/// min-max/random playouts.
double feature_B_R(std::span<const PlayoutRecord> mr);
double feature_S(std::span<const PlayoutRecord> mr);
/// Share of min-max moves made with each piece type, across both colours.
std::vector<double> usefulness(const PlayoutSet& records, int piece_count);
double feature_R(std::span<const double> usefulness);

/// Letter atoms plus Star/Power nodes of every piece's rules; black's rules
/// count separately only when they are not the rotation of white's.
int game_size(const GameSpec& spec);
double desired_size(const GameSpec& spec, const SimulationPlan& plan);
double feature_C(const GameSpec& spec, double desired);

/// (P/15)(L_M + L_D + 2|W| + 3S + 2C + (6 - 3|B_M| - |B_R| - 2R)).
/// Throws FeatureRangeError when a feature is outside its declared range.
double fitness(const FeatureVector& f);

struct Evaluation {
  FeatureVector features;
  double fitness = 0;
  PlayoutSet records;
};

/// Runs every playout of the plan; seeds derive from (base_seed, index) so
/// the result does not depend on `plan.jobs`.
PlayoutSet simulate(const Game& game, const SimulationPlan& plan);
FeatureVector compute_features(const Game& game, const PlayoutSet& records, const SimulationPlan& plan);
Evaluation evaluate(const Game& game, const SimulationPlan& plan);

}  // namespace sbg
