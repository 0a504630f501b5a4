#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sbg/game.hpp"
#include "sbg/gdl.hpp"
#include "sbg/gdl_gen.hpp"
#include "sbg/gdl_interp.hpp"

namespace sbg {

/// Board as text, top row first: '.' empty, uppercase white, lowercase black.
std::string render_board(const Game& game, const GameState& state);

struct Mismatch {
  std::string what;  // e.g. "legal moves differ"
  std::string dump;  // native board, side to move, ply and the GDL facts
};

struct EquivalenceReport {
  int states = 0;       // sampled states compared
  int transitions = 0;  // next-state comparisons
  std::optional<Mismatch> mismatch;
  bool ok() const { return !mismatch; }
};

/// Walks random playouts in lockstep on the native engine and on `doc`
/// until `samples` states have been compared. In every state the board,
/// side to move and ply, the legal (origin, destination) set, the terminal
/// flag and terminal goals must agree, and in non-terminal states the
/// successor of every legal move must agree. Stops at the first mismatch.
EquivalenceReport check_equivalence(const Game& game, const gdl::Document& doc, int samples, std::uint64_t seed,
                                    gdl::EvalMode mode = gdl::EvalMode::SemiNaive);

/// translate() followed by check_equivalence().
EquivalenceReport check_translation(const Game& game, const TranslationOptions& opts, int samples,
                                    std::uint64_t seed);

}  // namespace sbg
