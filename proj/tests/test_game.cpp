#include <gtest/gtest.h>

#include <algorithm>

#include "oracles.hpp"
#include "sbg/game.hpp"
#include "sbg/text.hpp"
#include "test_support.hpp"

using namespace sbg;

namespace {

const char* kRookDoc = R"(game rook
board 8 8
. . . . . . . .
. . . . . . . .
. . . . . . . .
p . . . . . . .
. . . . . . . .
. . . . . . . .
. . . . . . . .
R . . . . . . .
piece R strong (0,1,e)*((0,1,e)+(0,1,p))+(0,-1,e)*((0,-1,e)+(0,-1,p))+(1,0,e)*((1,0,e)+(1,0,p))+(-1,0,e)*((-1,0,e)+(-1,0,p))
piece P weak (0,1,e)
turnlimit 20
)";

std::set<oracle::Endpoints> endpoints(const std::vector<Move>& moves) {
  std::set<oracle::Endpoints> out;
  for (const auto& m : moves) out.insert({m.origin, m.destination});
  return out;
}

// Replays a word against the board and checks every letter's content class.
bool word_matches(const Game& g, const GameState& s, const Move& m) {
  Square pos = m.origin;
  for (const Letter& l : m.word) {
    pos = Square{pos.x + l.dx, pos.y + l.dy};
    if (!g.spec().on_board(pos)) return false;
    if (!oracle::matches(g.cell(s, pos), l.on, s.to_move)) return false;
  }
  return pos == m.destination && !(pos == m.origin);
}

std::vector<int> tally(const Game& g, const GameState& s) {
  std::vector<int> counts(static_cast<std::size_t>(2 * g.piece_count()), 0);
  for (Cell c : s.board)
    if (c != 0) ++counts[static_cast<std::size_t>(side_index(cell_owner(c)) * g.piece_count() + cell_piece(c))];
  return counts;
}

}  // namespace

TEST(Rook, MovesUpwardAndRight) {
  Game g(parse_sbg(kRookDoc));
  auto s = g.initial_state();
  auto moves = g.legal_moves(s);
  std::set<oracle::Endpoints> expected;
  for (int y = 2; y <= 5; ++y) expected.insert({{1, 1}, {1, y}});
  for (int x = 2; x <= 8; ++x) expected.insert({{1, 1}, {x, 1}});
  EXPECT_EQ(endpoints(moves), expected);

  auto capture = std::find(moves.begin(), moves.end(), Move{{1, 1}, {1, 5}, {}});
  ASSERT_NE(capture, moves.end());
  const Word four{{0, 1, OnClass::Empty}, {0, 1, OnClass::Empty}, {0, 1, OnClass::Empty}, {0, 1, OnClass::Opponent}};
  EXPECT_EQ(capture->word, four);

  const int pawn = g.spec().piece_index('P');
  EXPECT_EQ(g.count(s, Side::Black, pawn), 1);
  auto after = g.apply_move(s, *capture);
  EXPECT_EQ(g.cell(after, {1, 5}), make_cell(g.spec().piece_index('R'), Side::White));
  EXPECT_EQ(g.cell(after, {1, 1}), 0);
  EXPECT_EQ(g.count(after, Side::Black, pawn), 0);
  EXPECT_EQ(after.to_move, Side::Black);
  EXPECT_EQ(after.ply, 1);
  EXPECT_EQ(g.status(after), Status::WhiteWins);
}

TEST(Rook, WitnessWordsAreShortest) {
  Game g(parse_sbg(kRookDoc));
  auto s = g.initial_state();
  for (const auto& m : g.legal_moves(s)) {
    const int dist = std::abs(m.destination.x - m.origin.x) + std::abs(m.destination.y - m.origin.y);
    EXPECT_EQ(static_cast<int>(m.word.size()), dist);
    EXPECT_TRUE(word_matches(g, s, m));
  }
}

TEST(Game, NoPiecesOfMoverMeansNoMoves) {
  GameSpec spec = make_empty_spec("lonely", 3, 3, 10);
  spec.pieces.push_back(make_piece('A', PieceClass::Weak, MoveRegex::atom(0, 1, OnClass::Empty)));
  spec.at({2, 2}) = Occupant{'A', Side::Black};
  Game g(spec);
  auto s = g.initial_state();
  EXPECT_TRUE(g.legal_moves(s).empty());
  // White has nothing left at all, so black wins before the move rule applies.
  EXPECT_EQ(g.status(s), Status::BlackWins);
}

TEST(Game, OriginMatchesOwnWhenRevisited) {
  GameSpec spec = make_empty_spec("bounce", 3, 3, 10);
  spec.pieces.push_back(make_piece('A', PieceClass::Light, parse_regex("(0,1,e)(0,-1,w)(1,0,e)")));
  spec.at({1, 1}) = Occupant{'A', Side::White};
  spec.at({3, 3}) = Occupant{'A', Side::Black};
  Game g(spec);
  auto moves = g.legal_moves(g.initial_state());
  ASSERT_EQ(moves.size(), 1u);
  EXPECT_EQ(moves[0].destination, (Square{2, 1}));
}

TEST(Game, ZeroDisplacementIsNotAMove) {
  GameSpec spec = make_empty_spec("loop", 3, 3, 10);
  spec.pieces.push_back(make_piece('A', PieceClass::Light, parse_regex("(0,1,e)(0,-1,w)")));
  spec.at({1, 1}) = Occupant{'A', Side::White};
  spec.at({3, 3}) = Occupant{'A', Side::Black};
  Game g(spec);
  EXPECT_TRUE(g.legal_moves(g.initial_state()).empty());
}

TEST(Game, BlackUsesRotatedRules) {
  GameSpec spec = make_empty_spec("rot", 3, 3, 10);
  spec.pieces.push_back(make_piece('A', PieceClass::Light, parse_regex("(1,1,e)")));
  spec.at({1, 1}) = Occupant{'A', Side::White};
  spec.at({3, 3}) = Occupant{'A', Side::Black};
  Game g(spec);
  auto s = g.apply_move(g.initial_state(), Move{{1, 1}, {2, 2}, {}});
  EXPECT_TRUE(g.legal_moves(s).empty());  // (−1,−1) from (3,3) is now occupied by white
  spec.at({1, 1}) = Occupant{};
  spec.at({1, 3}) = Occupant{'A', Side::White};
  Game g2(spec);
  GameState s2 = g2.initial_state();
  s2.to_move = Side::Black;
  auto moves = g2.legal_moves(s2);
  ASSERT_EQ(moves.size(), 1u);
  EXPECT_EQ(moves[0].destination, (Square{2, 2}));
}

TEST(Game, SelfCaptureRemovesOwnPiece) {
  GameSpec spec = make_empty_spec("self", 3, 3, 10);
  spec.pieces.push_back(make_piece('A', PieceClass::Light, parse_regex("(1,1,w)")));
  spec.at({1, 1}) = Occupant{'A', Side::White};
  spec.at({2, 2}) = Occupant{'A', Side::White};
  spec.at({3, 1}) = Occupant{'A', Side::Black};
  Game g(spec);
  auto s = g.initial_state();
  auto moves = g.legal_moves(s);
  ASSERT_EQ(moves.size(), 1u);
  auto after = g.apply_move(s, moves[0]);
  EXPECT_EQ(g.count(after, Side::White, 0), 1);
  EXPECT_EQ(g.cell(after, {2, 2}), make_cell(0, Side::White));
  EXPECT_EQ(after.counts, tally(g, after));
}

TEST(Game, IllegalMoveIsRejected) {
  Game g(parse_sbg(kRookDoc));
  auto s = g.initial_state();
  EXPECT_THROW(g.apply_move(s, Move{{1, 1}, {2, 2}, {}}), IllegalMove);
  EXPECT_THROW(g.apply_move(s, Move{{1, 1}, {1, 6}, {}}), IllegalMove);
}

TEST(Game, StatesAreValueSnapshots) {
  Game g(parse_sbg(kRookDoc));
  const auto s = g.initial_state();
  const auto copy = s;
  auto moves = g.legal_moves(s);
  (void)g.apply_move(s, moves.front());
  EXPECT_EQ(s, copy);
}

TEST(Status, TurnlimitDraws) {
  GameSpec spec = make_empty_spec("draw", 2, 4, 60);
  spec.pieces.push_back(make_piece('A', PieceClass::Weak, parse_regex("(1,0,e)+(-1,0,e)")));
  spec.at({1, 1}) = Occupant{'A', Side::White};
  spec.at({1, 4}) = Occupant{'A', Side::Black};
  Game g(spec);
  auto s = g.initial_state();
  s.ply = 59;
  auto after = g.apply_move(s, g.legal_moves(s).front());
  EXPECT_EQ(after.ply, 60);
  EXPECT_EQ(g.status(after), Status::Draw);
}

TEST(Status, CaptureAllPiecesWins) {
  GameSpec spec = test::example_game();
  for (auto& o : spec.initial) o = Occupant{};
  spec.at({1, 1}) = Occupant{'Q', Side::White};
  spec.at({1, 2}) = Occupant{'P', Side::Black};
  Game g(spec);
  auto s = g.initial_state();
  EXPECT_EQ(g.status(s), Status::Ongoing);
  auto after = g.apply_move(s, Move{{1, 1}, {1, 2}, {}});
  EXPECT_EQ(g.total(after, Side::Black), 0);
  EXPECT_EQ(g.status(after), Status::WhiteWins);
}

TEST(Status, ReachConditionWins) {
  GameSpec spec = make_empty_spec("reach", 3, 3, 10);
  spec.pieces.push_back(make_piece('Q', PieceClass::Weak, parse_regex("(0,1,e)")));
  spec.conditions.push_back({Side::White, WinKind::Reach, 'Q'});
  spec.at({1, 2}) = Occupant{'Q', Side::White};
  spec.at({3, 3}) = Occupant{'Q', Side::Black};
  Game g(spec);
  auto after = g.apply_move(g.initial_state(), Move{{1, 2}, {1, 3}, {}});
  EXPECT_EQ(g.status(after), Status::WhiteWins);
}

TEST(Status, MoverConditionTakesPrecedence) {
  // White captures black's last A while white's only A is already gone:
  // both CaptureAll conditions hold and the mover is credited.
  GameSpec spec = make_empty_spec("both", 3, 3, 10);
  spec.pieces.push_back(make_piece('A', PieceClass::Weak, parse_regex("(0,1,e)")));
  spec.pieces.push_back(make_piece('B', PieceClass::Weak, parse_regex("(0,1,p)")));
  spec.conditions.push_back({Side::White, WinKind::CaptureAll, 'A'});
  spec.conditions.push_back({Side::Black, WinKind::CaptureAll, 'A'});
  spec.at({1, 1}) = Occupant{'B', Side::White};
  spec.at({1, 2}) = Occupant{'A', Side::Black};
  spec.at({3, 3}) = Occupant{'B', Side::Black};
  spec.at({3, 1}) = Occupant{'A', Side::White};
  Game g(spec);
  GameState s = g.initial_state();
  EXPECT_EQ(g.status(s), Status::Ongoing);
  s.board[spec.index({3, 1})] = 0;
  s.counts[0] = 0;  // drop white's A by hand
  auto after = g.apply_move_unchecked(s, Move{{1, 1}, {1, 2}, {}});
  EXPECT_EQ(g.status(after), Status::WhiteWins);
}

TEST(Status, SideWithoutMovesLoses) {
  GameSpec spec = make_empty_spec("stuck", 2, 3, 10);
  spec.pieces.push_back(make_piece('A', PieceClass::Weak, parse_regex("(0,1,e)")));
  spec.at({1, 1}) = Occupant{'A', Side::White};
  spec.at({1, 2}) = Occupant{'A', Side::Black};
  Game g(spec);
  EXPECT_EQ(g.status(g.initial_state()), Status::BlackWins);
}

TEST(Perft, DepthZeroIsOne) {
  Game g(test::example_game());
  EXPECT_EQ(g.perft(g.initial_state(), 0), 1u);
}

TEST(Perft, SumsOverChildren) {
  Game g(test::example_game());
  auto s = g.initial_state();
  std::uint64_t sum = 0;
  for (const auto& m : g.legal_moves(s)) sum += g.perft(g.apply_move(s, m), 1);
  EXPECT_EQ(sum, g.perft(s, 2));
}

TEST(Perft, TerminalStateCountsZero) {
  GameSpec spec = make_empty_spec("stuck", 2, 3, 10);
  spec.pieces.push_back(make_piece('A', PieceClass::Weak, parse_regex("(0,1,e)")));
  spec.at({1, 1}) = Occupant{'A', Side::White};
  spec.at({1, 2}) = Occupant{'A', Side::Black};
  Game g(spec);
  EXPECT_EQ(g.perft(g.initial_state(), 1), 0u);
}

TEST(ExampleGame, InitialMovesMatchBothOracles) {
  GameSpec spec = test::example_game();
  Game g(spec);
  auto s = g.initial_state();
  auto moves = g.legal_moves(s);
  EXPECT_EQ(endpoints(moves), oracle::positional_moves(spec, s));
  auto enumerated = oracle::enumerate_moves(spec, s, spec.width + spec.height);
  std::set<oracle::Endpoints> from_words;
  for (const auto& [e, len] : enumerated) from_words.insert(e);
  EXPECT_EQ(endpoints(moves), from_words);
}

TEST(ExampleGame, PerftMatchesOracleConstants) {
  // Frozen after agreement with the word-enumeration oracle.
  Game g(test::example_game());
  auto s = g.initial_state();
  EXPECT_EQ(g.perft(s, 1), 20u);
  EXPECT_EQ(g.perft(s, 2), 341u);

  GameSpec spec = test::example_game();
  std::uint64_t oracle_depth2 = 0;
  for (const auto& m : g.legal_moves(s))
    oracle_depth2 += oracle::positional_moves(spec, g.apply_move(s, m)).size();
  EXPECT_EQ(oracle_depth2, 341u);
}

TEST(Mobility, CentreDestinations) {
  EXPECT_EQ(mobility(parse_regex("(0,1,e)"), 6, 6), 1);
  EXPECT_EQ(mobility(parse_regex("(0,1,e)*"), 6, 6), 3);  // centre (3,3) zero-based (2,2)
  // Knight-style rotation union.
  EXPECT_EQ(mobility(parse_regex("(1,2,e)+(2,-1,e)+(-1,-2,e)+(-2,1,e)"), 6, 6), 4);
  // A word passing over the origin needs an own piece there.
  EXPECT_EQ(mobility(parse_regex("(1,0,e)(-1,0,w)(-1,0,e)"), 6, 6), 1);
  EXPECT_EQ(mobility(parse_regex("(1,0,e)(-1,0,e)(-1,0,e)"), 6, 6), 0);
}

TEST(Property, LegalMovesMatchOraclesOnRandomSpecs) {
  Rng rng(2024);
  int checked = 0;
  for (int i = 0; i < 600; ++i) {
    GameSpec spec = oracle::random_spec(rng, 4);
    Game g(spec);
    GameState s = g.initial_state();
    // Walk a few random plies so both colours and mid-game boards are covered.
    const int walk = rng.between(0, 3);
    for (int k = 0; k < walk; ++k) {
      auto moves = g.legal_moves(s);
      if (moves.empty() || g.status(s, moves) != Status::Ongoing) break;
      s = g.apply_move(s, moves[rng.index(moves.size())]);
    }
    auto moves = g.legal_moves(s);
    ASSERT_EQ(endpoints(moves), oracle::positional_moves(spec, s)) << serialize_sbg(spec);
    const int bound = spec.width + spec.height;
    auto enumerated = oracle::enumerate_moves(spec, s, bound);
    for (const auto& m : moves) {
      EXPECT_TRUE(word_matches(g, s, m));
      EXPECT_TRUE(std::is_sorted(moves.begin(), moves.end()));
      if (static_cast<int>(m.word.size()) <= bound) {
        auto it = enumerated.find({m.origin, m.destination});
        ASSERT_NE(it, enumerated.end());
        EXPECT_EQ(it->second, static_cast<int>(m.word.size()));
      }
    }
    for (const auto& [e, len] : enumerated)
      EXPECT_TRUE(std::binary_search(moves.begin(), moves.end(), Move{e.first, e.second, {}}));
    for (const auto& m : moves) EXPECT_EQ(g.apply_move(s, m).counts, tally(g, g.apply_move(s, m)));
    ++checked;
  }
  EXPECT_GE(checked, 500);
}

TEST(Validation, RejectsBrokenSpecs) {
  GameSpec spec = make_empty_spec("v", 3, 3, 10);
  EXPECT_THROW(validate(spec), ValidationError);  // no pieces
  spec.pieces.push_back(make_piece('A', PieceClass::Weak, parse_regex("(0,1,e)")));
  EXPECT_NO_THROW(validate(spec));
  spec.at({1, 1}) = Occupant{'Z', Side::White};
  EXPECT_THROW(validate(spec), ValidationError);
  spec.at({1, 1}) = Occupant{};
  spec.conditions.push_back({Side::White, WinKind::CaptureAll, 'A'});
  EXPECT_THROW(validate(spec), ValidationError);  // black has no A
  spec.at({2, 3}) = Occupant{'A', Side::Black};
  EXPECT_NO_THROW(validate(spec));
  spec.pieces[0].moves_white = parse_regex("(0,1,e)*");
  spec.pieces[0].moves_black = MoveRegex::star(MoveRegex::star(MoveRegex::atom(0, -1, OnClass::Empty)));
  EXPECT_NO_THROW(validate(spec));
  spec.turnlimit = 0;
  EXPECT_THROW(validate(spec), ValidationError);
}
