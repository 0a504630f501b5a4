#include <gtest/gtest.h>

#include <filesystem>

#include "oracles.hpp"
#include "sbg/text.hpp"
#include "test_support.hpp"

using namespace sbg;

namespace {

const char* kMinimal = R"(game tiny
board 2 2
. .
. .
piece A weak (0,1,e)
turnlimit 10
)";

int error_line(std::string_view doc) {
  try {
    (void)parse_sbg(doc);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Text, ParsesExampleGame) {
  GameSpec g = test::example_game();
  EXPECT_EQ(g.name, "example_iv");
  EXPECT_EQ(g.width, 6);
  EXPECT_EQ(g.height, 6);
  EXPECT_EQ(g.pieces.size(), 5u);
  EXPECT_EQ(g.turnlimit, 60);
  EXPECT_TRUE(g.conditions.empty());
  EXPECT_EQ(g.at({1, 1}), (Occupant{'Q', Side::White}));
  EXPECT_EQ(g.at({6, 6}), (Occupant{'Q', Side::Black}));
  EXPECT_TRUE(g.at({6, 1}).empty());
  EXPECT_EQ(g.at({6, 3}), (Occupant{'P', Side::White}));
}

TEST(Text, ExampleGameMatchesDiagram) {
  // Rows top first, as in the figure of the evolved game.
  const char* rows[6] = {"qbknqq", "nkp.pn", "......", ".....P", "NKPPPN", "QBKNQ."};
  GameSpec g = test::example_game();
  for (int r = 0; r < 6; ++r) {
    for (int x = 1; x <= 6; ++x) {
      const char c = rows[r][x - 1];
      const Occupant& o = g.at({x, 6 - r});
      if (c == '.') {
        EXPECT_TRUE(o.empty());
      } else {
        EXPECT_EQ(o.symbol, static_cast<char>(std::toupper(c)));
        EXPECT_EQ(o.owner, std::isupper(c) ? Side::White : Side::Black);
      }
    }
  }
  int white = 0, black = 0;
  for (const auto& o : g.initial) {
    if (o.empty()) continue;
    (o.owner == Side::White ? white : black)++;
  }
  EXPECT_EQ(white, 12);
  EXPECT_EQ(black, 11);
}

TEST(Text, MinimalDocumentHasSixLines) {
  GameSpec g = make_empty_spec("tiny", 2, 2, 10);
  g.pieces.push_back(make_piece('A', PieceClass::Weak, MoveRegex::atom(0, 1, OnClass::Empty)));
  const std::string text = serialize_sbg(g);
  EXPECT_EQ(text, kMinimal);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
  EXPECT_EQ(parse_sbg(text), g);
}

TEST(Text, SerializesAssetsCanonically) {
  int n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(test::games_dir())) {
    if (entry.path().extension() != ".sbg") continue;
    const std::string text = test::read_file(entry.path().string());
    EXPECT_EQ(serialize_sbg(parse_sbg(text)), test::canonical_text(text)) << entry.path();
    ++n;
  }
  EXPECT_GE(n, 1);
}

TEST(Text, RoundTripsRandomSpecs) {
  Rng rng(99);
  for (int i = 0; i < 400; ++i) {
    GameSpec g = oracle::random_spec(rng, 6);
    g.pieces[0].piece_class = static_cast<PieceClass>(rng.index(3));
    if (rng.chance(0.5)) {
      Side s = rng.chance(0.5) ? Side::White : Side::Black;
      g.conditions.push_back({s, WinKind::Reach, g.pieces[0].symbol});
    }
    const std::string text = serialize_sbg(g);
    EXPECT_EQ(parse_sbg(text), g) << text;
  }
}

TEST(Text, AsymOverridesBlackRules) {
  std::string doc = kMinimal;
  doc += "asym A (1,0,e)\n";
  GameSpec g = parse_sbg(doc);
  EXPECT_EQ(g.pieces[0].moves_black, parse_regex("(1,0,e)"));
  EXPECT_TRUE(g.pieces[0].asymmetric());
  EXPECT_EQ(parse_sbg(serialize_sbg(g)), g);
}

TEST(Text, ClassInferredFromMobility) {
  GameSpec g = parse_sbg("game t\nboard 6 6\n"
                         ". . . . . .\n. . . . . .\n. . . . . .\n. . . . . .\n. . . . . .\n. . . . . .\n"
                         "piece A (0,1,e)\npiece B (1,1,e)*+(-1,-1,e)*+(1,-1,e)*+(-1,1,e)*\nturnlimit 10\n");
  EXPECT_EQ(g.pieces[0].piece_class, PieceClass::Weak);
  EXPECT_EQ(g.pieces[1].piece_class, PieceClass::Strong);
}

TEST(TextErrors, UndefinedGoalSymbol) {
  std::string doc = kMinimal;
  doc += "win white capture Z\n";
  try {
    (void)parse_sbg(doc);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7);
    EXPECT_EQ(e.column(), 19);
    EXPECT_EQ(e.diagnostic("g.sbg"), std::string("g.sbg:7:19: ") + e.what());
  }
}

TEST(TextErrors, UndefinedBoardSymbol) {
  EXPECT_EQ(error_line("game t\nboard 2 2\n. .\n. Z\npiece A (0,1,e)\nturnlimit 3\n"), 4);
}

TEST(TextErrors, BadDimensions) {
  EXPECT_EQ(error_line("game t\nboard 0 2\n"), 2);
  EXPECT_EQ(error_line("game t\nboard 2 2\n. .\npiece A (0,1,e)\nturnlimit 3\n"), 4);
}

TEST(TextErrors, EmptyWordLanguage) {
  // The grammar has no way to write the empty word on its own.
  EXPECT_THROW(parse_regex("()"), ParseError);
  EXPECT_THROW(parse_regex("(1,0,e)^0"), ParseError);
}

TEST(TextErrors, CaptureConditionOnAbsentPiece) {
  std::string doc = kMinimal;
  doc += "win white capture A\n";
  EXPECT_THROW(parse_sbg(doc), ParseError);
}

TEST(TextErrors, SyntaxErrorsCarryPositions) {
  try {
    (void)parse_sbg("game t\nboard 2 2\n. .\n. .\npiece A (0,1,x)\nturnlimit 3\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5);
    EXPECT_EQ(e.column(), 14);
  }
  EXPECT_EQ(error_line("game t\nboard 2 2\n. .\n. .\npiece a (0,1,e)\nturnlimit 3\n"), 5);
  EXPECT_EQ(error_line("game t\nboard 2 2\n. .\n. .\nbogus\n"), 5);
  EXPECT_EQ(error_line("game t\nboard 2 2\n. .\n. .\npiece A (0,1,e)\npiece A (0,1,e)\nturnlimit 3\n"), 6);
}

TEST(TextErrors, DeletingAnyRequiredSectionFails) {
  const std::string text = test::read_file(test::games_dir() + "/example_iv.sbg");
  std::vector<std::string> lines;
  {
    std::istringstream in(test::canonical_text(text));
    for (std::string l; std::getline(in, l);) lines.push_back(l);
  }
  auto without = [&](auto drop) {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i)
      if (!drop(i, lines[i])) out += lines[i] + '\n';
    return out;
  };
  auto starts = [](const std::string& l, const char* p) { return l.rfind(p, 0) == 0; };
  EXPECT_THROW(parse_sbg(without([&](std::size_t, const std::string& l) { return starts(l, "game "); })), ParseError);
  EXPECT_THROW(parse_sbg(without([&](std::size_t, const std::string& l) { return starts(l, "piece "); })), ParseError);
  EXPECT_THROW(parse_sbg(without([&](std::size_t, const std::string& l) { return starts(l, "turnlimit "); })), ParseError);
  // The board header plus its rows.
  EXPECT_THROW(parse_sbg(without([&](std::size_t i, const std::string&) { return i >= 1 && i <= 7; })), ParseError);
  // Only the header, leaving orphan rows.
  EXPECT_THROW(parse_sbg(without([&](std::size_t i, const std::string&) { return i == 1; })), ParseError);
  // Any single board row.
  for (std::size_t r = 2; r <= 7; ++r)
    EXPECT_THROW(parse_sbg(without([&](std::size_t i, const std::string&) { return i == r; })), ParseError);
}
