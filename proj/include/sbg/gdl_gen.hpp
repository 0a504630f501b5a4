#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sbg/game.hpp"
#include "sbg/gdl.hpp"

namespace sbg {

enum class Representation : unsigned char { BoardPredicate, PieceId, Auto };

const char* representation_name(Representation r);

struct TranslationOptions {
  Representation representation = Representation::Auto;
  bool factor_prefixes = true;
  /// Upper bound on rules produced for piece moves.
  int rule_budget = 20000;
};

class TranslationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sizes of the state-fact domains of the two schemes: the board predicate
/// ranges over squares x piece types x owners, the piece-identifier scheme
/// over starting pieces x squares.
struct RepresentationEstimate {
  double board_facts = 0;
  double piece_id_facts = 0;
  Representation choice = Representation::BoardPredicate;
};

RepresentationEstimate estimate_representations(const GameSpec& spec);
/// The scheme with the smaller estimate; ties go to the board predicate.
Representation choose_representation(const GameSpec& spec);

/// Throws TranslationError when the move rules exceed the rule budget.
gdl::Document translate(const GameSpec& spec, const TranslationOptions& opts = {});

/// Rules of a starred fragment as a closure relation(?x0, ?y0, ?u, ?v): a base
/// rule seeded from `seed` (which must bind ?x0 and ?y0) and one inductive rule
/// per branch of the body, with content checks from white's point of view.
std::vector<gdl::Rule> lower_star(const MoveRegex& star, const std::string& relation, const gdl::Literal& seed);

/// Hoists shared body prefixes of `rules` into fresh relations named
/// `<prefix>N` whenever that lowers the total number of body literals.
/// Rule bodies are compared literally, so callers must name variables
/// consistently.
std::vector<gdl::Rule> factor_common_prefixes(std::vector<gdl::Rule> rules, const std::string& prefix);

}  // namespace sbg
