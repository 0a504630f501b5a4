#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbg/automaton.hpp"
#include "sbg/regex.hpp"

namespace sbg {

enum class Side : std::uint8_t { White, Black };

constexpr Side opponent(Side s) { return s == Side::White ? Side::Black : Side::White; }
constexpr int side_index(Side s) { return s == Side::White ? 0 : 1; }
const char* side_name(Side s);

enum class PieceClass : std::uint8_t { Weak, Light, Strong };
const char* class_name(PieceClass c);

/// Board coordinates: x = 1..width left to right, y = 1..height bottom to
/// top. White starts at the bottom.
struct Square {
  int x = 0;
  int y = 0;
  auto operator<=>(const Square&) const = default;
};

struct PieceDef {
  char symbol = 'A';  // uppercase
  PieceClass piece_class = PieceClass::Light;
  MoveRegex moves_white = MoveRegex::atom(0, 1, OnClass::Empty);
  MoveRegex moves_black = MoveRegex::atom(0, -1, OnClass::Empty);

  /// Rules for black that are not the 180 degree image of white's.
  bool asymmetric() const { return moves_black != rotated_180(moves_white); }
  const MoveRegex& moves(Side s) const { return s == Side::White ? moves_white : moves_black; }

  bool operator==(const PieceDef&) const = default;
};

/// Piece with both orientations derived from white's rules.
PieceDef make_piece(char symbol, PieceClass cls, MoveRegex white_moves);

enum class WinKind : std::uint8_t { Reach, CaptureAll };

/// `side` wins when its `piece` reaches the opponent's backrank (Reach) or
/// when the opponent has no `piece` left (CaptureAll).
struct WinCondition {
  Side side = Side::White;
  WinKind kind = WinKind::CaptureAll;
  char piece = 'A';
  auto operator<=>(const WinCondition&) const = default;
};

struct Occupant {
  char symbol = 0;  // 0 = empty, uppercase otherwise
  Side owner = Side::White;
  bool empty() const { return symbol == 0; }
  bool operator==(const Occupant&) const = default;
};

struct GameSpec {
  std::string name = "game";
  int width = 1;
  int height = 1;
  std::vector<Occupant> initial;  // row-major from y = 1, size width * height
  std::vector<PieceDef> pieces;
  int turnlimit = 1;
  std::vector<WinCondition> conditions;

  Occupant& at(Square s) { return initial[index(s)]; }
  const Occupant& at(Square s) const { return initial[index(s)]; }
  std::size_t index(Square s) const { return static_cast<std::size_t>((s.y - 1) * width + (s.x - 1)); }
  bool on_board(Square s) const { return s.x >= 1 && s.x <= width && s.y >= 1 && s.y <= height; }
  const PieceDef* find_piece(char symbol) const;
  int piece_index(char symbol) const;

  bool operator==(const GameSpec&) const = default;
};

/// Empty width x height board with no pieces defined.
GameSpec make_empty_spec(std::string name, int width, int height, int turnlimit);

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ValidationError describing the first violated invariant.
void validate(const GameSpec& spec);

/// Board cell encoding inside GameState: 0 empty, k + 1 for a white piece of
/// type k, -(k + 1) for black.
using Cell = std::int8_t;

struct GameState {
  std::vector<Cell> board;
  Side to_move = Side::White;
  int ply = 0;
  std::vector<int> counts;  // [side * piece_count + piece]

  bool operator==(const GameState&) const = default;
};

struct Move {
  Square origin;
  Square destination;
  Word word;  // shortest witness word

  /// Moves are identified by their endpoints; every word with the same
  /// endpoints has the same effect.
  bool operator==(const Move& o) const { return origin == o.origin && destination == o.destination; }
  auto operator<=>(const Move& o) const {
    if (auto c = origin.x <=> o.origin.x; c != 0) return c;
    if (auto c = origin.y <=> o.origin.y; c != 0) return c;
    if (auto c = destination.x <=> o.destination.x; c != 0) return c;
    return destination.y <=> o.destination.y;
  }
};

class IllegalMove : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Status : std::uint8_t { Ongoing, WhiteWins, BlackWins, Draw };
const char* status_name(Status s);

/// A validated spec with its move automata compiled. Immutable and safe to
/// share between threads.
class Game {
 public:
  explicit Game(GameSpec spec);

  const GameSpec& spec() const { return spec_; }
  int width() const { return spec_.width; }
  int height() const { return spec_.height; }
  int piece_count() const { return static_cast<int>(spec_.pieces.size()); }
  const MoveAutomaton& automaton(int piece, Side side) const {
    return automata_[static_cast<std::size_t>(piece * 2 + side_index(side))];
  }

  GameState initial_state() const;

  /// Distinct (origin, destination) moves sorted by origin then destination.
  /// With `with_words` false the witness words are left empty, which is all
  /// the search needs.
  std::vector<Move> legal_moves(const GameState& state, bool with_words = true) const;
  /// Piece type index of the piece making the move.
  int moving_piece(const GameState& state, const Move& m) const;

  /// Throws IllegalMove unless `m` is among legal_moves(state).
  GameState apply_move(const GameState& state, const Move& m) const;
  /// Trusts the caller that `m` is legal.
  GameState apply_move_unchecked(const GameState& state, const Move& m) const;

  Status status(const GameState& state) const;
  /// Same as status() with the legal moves of `state` already known.
  Status status(const GameState& state, const std::vector<Move>& moves) const;

  std::uint64_t perft(const GameState& state, int depth) const;

  Cell cell(const GameState& state, Square s) const { return state.board[spec_.index(s)]; }
  int count(const GameState& state, Side side, int piece) const {
    return state.counts[static_cast<std::size_t>(side_index(side) * piece_count() + piece)];
  }
  int total(const GameState& state, Side side) const;

 private:
  void append_piece_moves(const GameState& state, Square origin, int piece, bool with_words,
                          std::vector<Move>& out) const;
  bool condition_holds(const GameState& state, const WinCondition& c) const;
  // Status steps that do not depend on the legal move set.
  std::optional<Status> decided_before_moves(const GameState& state) const;

  GameSpec spec_;
  std::vector<MoveAutomaton> automata_;
  std::vector<int> symbol_to_piece_;  // indexed by symbol - 'A'
};

// Free-function forms of the core operations.
inline std::vector<Move> legal_moves(const Game& g, const GameState& s) { return g.legal_moves(s); }
inline GameState apply_move(const Game& g, const GameState& s, const Move& m) { return g.apply_move(s, m); }
inline Status status(const Game& g, const GameState& s) { return g.status(s); }
inline std::uint64_t perft(const Game& g, const GameState& s, int depth) { return g.perft(s, depth); }

Cell make_cell(int piece, Side owner);
inline bool cell_empty(Cell c) { return c == 0; }
inline Side cell_owner(Cell c) { return c > 0 ? Side::White : Side::Black; }
inline int cell_piece(Cell c) { return (c > 0 ? c : -c) - 1; }

/// Number of distinct destinations a move language reaches from the centre
/// of an otherwise unconstrained width x height board: every letter's content
/// requirement is taken as satisfiable except on the origin square, which
/// holds the mover. Words are capped at width + height letters.
int mobility(const MoveRegex& r, int width, int height);

}  // namespace sbg
