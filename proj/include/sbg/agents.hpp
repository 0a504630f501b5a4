#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sbg/game.hpp"
#include "sbg/rng.hpp"

namespace sbg {

enum class AgentKind : std::uint8_t { Random, MinMax };
const char* agent_name(AgentKind k);

/// Search limits for one min-max move decision. Node expansions, not time,
/// bound the search so results are reproducible; the wallclock guard only
/// stops runaway playouts.
struct AgentBudget {
  int node_budget = 4000;
  int max_depth = 3;
  std::chrono::milliseconds wallclock_guard{10000};
};

class NoMoveError : public std::logic_error {
 public:
  NoMoveError() : std::logic_error("agent asked to move in a position without legal moves") {}
};

/// Uniform choice over the legal moves.
Move random_agent_move(const Game& game, const GameState& state, Rng& rng);

/// Iterative-deepening alpha-beta (negamax) with a material plus
/// advancement evaluation; seeded tie-break among equally valued root moves.
Move minmax_agent_move(const Game& game, const GameState& state, const AgentBudget& budget, Rng& rng);

/// Leaf evaluation in [-1, 1] from the point of view of the side to move;
/// a draw sits at 0 and terminal wins/losses order beyond it.
class Evaluator {
 public:
  explicit Evaluator(const Game& game);
  double operator()(const GameState& state) const;
  double weight(int piece) const { return weights_[static_cast<std::size_t>(piece)]; }

 private:
  double side_score(const GameState& state, Side side) const;

  const Game* game_;
  std::vector<double> weights_;
  std::vector<int> reach_pieces_[2];
};

enum class PlayoutResult : std::uint8_t { WhiteWins, BlackWins, Draw, Timeout };
const char* result_name(PlayoutResult r);

struct PlayoutRecord {
  PlayoutResult result = PlayoutResult::Draw;
  int length = 0;
  std::vector<int> branching_samples;  // legal-move count of every state a move was made from
  std::vector<int> moves_by_piece;     // indexed like GameSpec::pieces, min-max sides only
  AgentKind white_agent = AgentKind::Random;
  AgentKind black_agent = AgentKind::Random;
  std::vector<Move> moves;
};

PlayoutRecord run_playout(const Game& game, AgentKind white, AgentKind black, const AgentBudget& budget,
                          std::uint64_t seed);

}  // namespace sbg
