#include "sbg/agents.hpp"

#include <algorithm>
#include <limits>

namespace sbg {

const char* agent_name(AgentKind k) { return k == AgentKind::Random ? "random" : "minmax"; }

const char* result_name(PlayoutResult r) {
  switch (r) {
    case PlayoutResult::WhiteWins:
      return "white";
    case PlayoutResult::BlackWins:
      return "black";
    case PlayoutResult::Draw:
      return "draw";
    case PlayoutResult::Timeout:
      return "timeout";
  }
  return "?";
}

Move random_agent_move(const Game& game, const GameState& state, Rng& rng) {
  auto moves = game.legal_moves(state);
  if (moves.empty()) throw NoMoveError();
  return std::move(moves[rng.index(moves.size())]);
}

Evaluator::Evaluator(const Game& game) : game_(&game) {
  const auto& spec = game.spec();
  for (const auto& p : spec.pieces)
    weights_.push_back(std::max(1, mobility(p.moves_white, spec.width, spec.height)));
  for (const auto& c : spec.conditions) {
    if (c.kind != WinKind::Reach) continue;
    auto& list = reach_pieces_[side_index(c.side)];
    const int k = spec.piece_index(c.piece);
    if (std::find(list.begin(), list.end(), k) == list.end()) list.push_back(k);
  }
}

double Evaluator::side_score(const GameState& state, Side side) const {
  double score = 0;
  for (int k = 0; k < game_->piece_count(); ++k)
    score += weights_[static_cast<std::size_t>(k)] * game_->count(state, side, k);
  const auto& reach = reach_pieces_[side_index(side)];
  if (!reach.empty()) {
    const int h = game_->height();
    for (int y = 1; y <= h; ++y) {
      for (int x = 1; x <= game_->width(); ++x) {
        const Cell c = game_->cell(state, Square{x, y});
        if (c == 0 || cell_owner(c) != side) continue;
        if (std::find(reach.begin(), reach.end(), cell_piece(c)) == reach.end()) continue;
        score += 0.1 * (side == Side::White ? y - 1 : h - y);
      }
    }
  }
  return score;
}

double Evaluator::operator()(const GameState& state) const {
  const double mine = side_score(state, state.to_move);
  const double theirs = side_score(state, opponent(state.to_move));
  const double total = mine + theirs;
  return total > 0 ? (mine - theirs) / total : 0.0;
}

namespace {

constexpr double kWin = 1e6;

class Search {
 public:
  Search(const Game& game, const AgentBudget& budget) : game_(game), eval_(game), budget_(budget) {}

  struct Aborted {};

  double negamax(const GameState& state, int depth, double alpha, double beta, int ply) {
    if (++nodes_ > budget_.node_budget && abortable_) throw Aborted{};
    auto moves = game_.legal_moves(state, false);
    const Status st = game_.status(state, moves);
    if (st != Status::Ongoing) return terminal_value(st, state.to_move, ply);
    if (depth == 0) return eval_(state);
    order(state, moves);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& m : moves) {
      const double v = -negamax(game_.apply_move_unchecked(state, m), depth - 1, -beta, -alpha, ply + 1);
      if (v > best) best = v;
      if (best > alpha) alpha = best;
      if (alpha >= beta) break;
    }
    return best;
  }

  // Captures first, most valuable victim first; stable so the caller's
  // order breaks ties.
  void order(const GameState& state, std::vector<Move>& moves) const {
    std::stable_sort(moves.begin(), moves.end(), [&](const Move& a, const Move& b) {
      return victim_value(state, a) > victim_value(state, b);
    });
  }

  double victim_value(const GameState& state, const Move& m) const {
    const Cell c = game_.cell(state, m.destination);
    if (c == 0) return 0;
    const double w = eval_.weight(cell_piece(c));
    return cell_owner(c) == state.to_move ? -w : w;
  }

  static double terminal_value(Status st, Side to_move, int ply) {
    if (st == Status::Draw) return 0.0;
    const bool to_move_wins = (st == Status::WhiteWins) == (to_move == Side::White);
    // Prefer quick wins and slow losses.
    return to_move_wins ? kWin - ply : -(kWin - ply);
  }

  const Game& game_;
  Evaluator eval_;
  const AgentBudget& budget_;
  long nodes_ = 0;
  bool abortable_ = false;
};

}  // namespace

Move minmax_agent_move(const Game& game, const GameState& state, const AgentBudget& budget, Rng& rng) {
  auto moves = game.legal_moves(state);
  if (moves.empty()) throw NoMoveError();
  if (moves.size() == 1) return moves.front();

  rng.shuffle(moves);
  Search search(game, budget);
  std::size_t best_index = 0;
  const int max_depth = std::max(1, budget.max_depth);
  for (int depth = 1; depth <= max_depth; ++depth) {
    search.abortable_ = depth > 1;
    // Search the previous iteration's choice first so an equal value keeps it.
    std::vector<std::size_t> order(moves.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::swap(order[0], order[best_index]);
    std::stable_sort(order.begin() + 1, order.end(), [&](std::size_t a, std::size_t b) {
      return search.victim_value(state, moves[a]) > search.victim_value(state, moves[b]);
    });
    try {
      double alpha = -std::numeric_limits<double>::infinity();
      std::size_t iteration_best = order[0];
      for (std::size_t i : order) {
        const double v = -search.negamax(game.apply_move_unchecked(state, moves[i]), depth - 1,
                                         -std::numeric_limits<double>::infinity(), -alpha, 1);
        if (v > alpha) {
          alpha = v;
          iteration_best = i;
        }
      }
      best_index = iteration_best;
      if (alpha >= kWin - depth) break;  // forced win found
    } catch (const Search::Aborted&) {
      break;
    }
    if (search.nodes_ >= budget.node_budget) break;
  }
  return moves[best_index];
}

PlayoutRecord run_playout(const Game& game, AgentKind white, AgentKind black, const AgentBudget& budget,
                          std::uint64_t seed) {
  PlayoutRecord rec;
  rec.white_agent = white;
  rec.black_agent = black;
  rec.moves_by_piece.assign(static_cast<std::size_t>(game.piece_count()), 0);
  Rng rngs[2] = {Rng(derive_seed(seed, {0})), Rng(derive_seed(seed, {1}))};

  const auto start = std::chrono::steady_clock::now();
  GameState state = game.initial_state();
  for (;;) {
    const auto moves = game.legal_moves(state, false);
    const Status st = game.status(state, moves);
    if (st != Status::Ongoing) {
      rec.result = st == Status::WhiteWins   ? PlayoutResult::WhiteWins
                   : st == Status::BlackWins ? PlayoutResult::BlackWins
                                             : PlayoutResult::Draw;
      break;
    }
    if (std::chrono::steady_clock::now() - start > budget.wallclock_guard) {
      rec.result = PlayoutResult::Timeout;
      break;
    }
    const Side side = state.to_move;
    const AgentKind kind = side == Side::White ? white : black;
    Rng& rng = rngs[side_index(side)];
    Move m = kind == AgentKind::Random ? random_agent_move(game, state, rng)
                                       : minmax_agent_move(game, state, budget, rng);
    rec.branching_samples.push_back(static_cast<int>(moves.size()));
    if (kind == AgentKind::MinMax) ++rec.moves_by_piece[static_cast<std::size_t>(game.moving_piece(state, m))];
    state = game.apply_move_unchecked(state, m);
    rec.moves.push_back(std::move(m));
    ++rec.length;
  }
  return rec;
}

}  // namespace sbg
