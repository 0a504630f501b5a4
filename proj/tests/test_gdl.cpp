#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "sbg/differential.hpp"
#include "sbg/evolver.hpp"
#include "sbg/gdl.hpp"
#include "sbg/gdl_gen.hpp"
#include "sbg/gdl_interp.hpp"
#include "sbg/text.hpp"
#include "test_support.hpp"

using namespace sbg;
using sbg::test::example_game;
using gdl::Literal;
using gdl::Term;

namespace {

Term C(const std::string& s) { return Term::constant(s); }
Term F(const std::string& f, std::vector<Term> a) { return Term::compound(f, std::move(a)); }

GameSpec one_piece_game(int w, int h, const std::string& regex) {
  std::string text = "game t\nboard " + std::to_string(w) + " " + std::to_string(h) + "\n";
  for (int y = h; y >= 1; --y) {
    for (int x = 1; x <= w; ++x) {
      std::string c = ".";
      if (x == 1 && y == 1) c = "A";
      if (x == w && y == h) c = "a";
      text += c + (x == w ? "\n" : " ");
    }
  }
  text += "piece A light " + regex + "\nturnlimit 10\n";
  return parse_sbg(text);
}

TranslationOptions options(Representation r, bool factor) {
  TranslationOptions o;
  o.representation = r;
  o.factor_prefixes = factor;
  return o;
}

std::vector<gdl::Rule> rules_with_head(const gdl::Document& d, const std::string& functor) {
  std::vector<gdl::Rule> out;
  for (const auto& r : d.rules)
    if (r.head.name == functor && !r.body.empty()) out.push_back(r);
  return out;
}

int count_literals(const gdl::Rule& r, const std::string& functor, Literal::Kind kind) {
  return static_cast<int>(std::count_if(r.body.begin(), r.body.end(), [&](const Literal& l) {
    return l.kind == kind && l.atom.name == functor;
  }));
}

bool recursive(const gdl::Rule& r) {
  return std::any_of(r.body.begin(), r.body.end(), [&](const Literal& l) { return l.atom.name == r.head.name; });
}

bool has_fact(const gdl::GdlState& s, const Term& t) {
  return std::find(s.facts.begin(), s.facts.end(), t) != s.facts.end();
}

}  // namespace

TEST(Kif, EmptyDocumentIsEmptyText) { EXPECT_EQ(gdl::emit_kif(gdl::Document{}), ""); }

TEST(Kif, FactSyntax) {
  gdl::Document d;
  d.rules.push_back({F("role", {C("white")}), {}});
  EXPECT_EQ(gdl::to_kif(d.rules[0]), "(role white)");
  EXPECT_EQ(gdl::emit_kif(d), "(role white)\n");
}

TEST(Kif, RuleSyntax) {
  gdl::Rule r{F("p", {Term::variable("x")}),
              {Literal::positive(F("q", {Term::variable("x")})), Literal::negative(F("r", {Term::variable("x")})),
               Literal::distinct(Term::variable("x"), C("a"))}};
  EXPECT_EQ(gdl::to_kif(r), "(<= (p ?x) (q ?x) (not (r ?x)) (distinct ?x a))");
  EXPECT_EQ(gdl::parse_document(gdl::to_kif(r)).rules.at(0), r);
}

TEST(Kif, RoundTripTranslatedDocuments) {
  const GameSpec g = example_game();
  for (auto repr : {Representation::BoardPredicate, Representation::PieceId}) {
    for (bool factor : {false, true}) {
      const gdl::Document d = translate(g, options(repr, factor));
      EXPECT_EQ(gdl::parse_document(gdl::emit_kif(d)), d);
    }
  }
}

TEST(Kif, SyntaxErrorsCarryPositions) {
  try {
    gdl::parse_document("(role white)\n  (<= (p ?x)");
    FAIL();
  } catch (const gdl::KifSyntaxError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 3);
  }
  EXPECT_THROW(gdl::parse_document("(<= p (or q r))"), gdl::KifSyntaxError);
  EXPECT_THROW(gdl::parse_document(")"), gdl::KifSyntaxError);
  EXPECT_THROW(gdl::parse_document("(<= ?x p)"), gdl::KifSyntaxError);
  EXPECT_EQ(gdl::parse_document("; comment only\n").rules.size(), 0u);
}

TEST(Translate, SingleLetterGivesOneRule) {
  const auto d = translate(one_piece_game(3, 3, "(0,1,e)"), options(Representation::BoardPredicate, false));
  std::vector<gdl::Rule> moves;
  for (const auto& r : rules_with_head(d, "legal"))
    if (r.head.args.at(0) == C("white") && r.head.args.at(1).name == "move") moves.push_back(r);
  ASSERT_EQ(moves.size(), 1u);
  EXPECT_EQ(count_literals(moves[0], "sumx", Literal::Kind::Positive), 1);
  EXPECT_EQ(count_literals(moves[0], "sumy", Literal::Kind::Positive), 1);
  EXPECT_EQ(count_literals(moves[0], "occupied", Literal::Kind::Negative), 1);
}

TEST(Translate, SumFactsOnlyForUsedDisplacements) {
  const auto d = translate(one_piece_game(3, 3, "(0,1,e)"), options(Representation::BoardPredicate, false));
  std::set<std::string> dx, dy;
  for (const auto& r : d.rules) {
    if (!r.body.empty()) continue;
    if (r.head.name == "sumx") dx.insert(r.head.args.at(1).name);
    if (r.head.name == "sumy") dy.insert(r.head.args.at(1).name);
  }
  // Black's rules are the rotation, so -1 appears as well.
  EXPECT_EQ(dx, (std::set<std::string>{"0"}));
  EXPECT_EQ(dy, (std::set<std::string>{"-1", "1"}));
}

TEST(Translate, StarBecomesRecursiveRelation) {
  const auto d = translate(one_piece_game(8, 8, "(0,1,e)*((0,1,e)+(0,1,p))"), options(Representation::BoardPredicate, false));
  EXPECT_TRUE(std::any_of(d.rules.begin(), d.rules.end(), recursive));
  gdl::check_safety(d);
  gdl::check_stratification(d);
}

TEST(Translate, PowerIsExpanded) {
  const auto d = translate(one_piece_game(4, 6, "(0,1,e)^3(0,1,p)"), options(Representation::BoardPredicate, false));
  EXPECT_FALSE(std::any_of(d.rules.begin(), d.rules.end(), recursive));
  int white_moves = 0;
  for (const auto& r : rules_with_head(d, "legal")) {
    if (r.head.args.at(0) != C("white") || r.head.args.at(1).name != "move") continue;
    ++white_moves;
    EXPECT_EQ(count_literals(r, "sumy", Literal::Kind::Positive), 4);
    EXPECT_EQ(count_literals(r, "occupied", Literal::Kind::Negative), 3);
    EXPECT_EQ(count_literals(r, "owned", Literal::Kind::Positive), 1);
  }
  EXPECT_EQ(white_moves, 1);
}

TEST(Translate, RuleBudget) {
  TranslationOptions o = options(Representation::BoardPredicate, false);
  o.rule_budget = 100;
  EXPECT_THROW(translate(one_piece_game(5, 5, "(((1,0,e)+(0,1,e)+(1,1,e))^3)^2"), o), TranslationError);
  o.rule_budget = 20000;
  EXPECT_NO_THROW(translate(one_piece_game(5, 5, "(((1,0,e)+(0,1,e)+(1,1,e))^3)^2"), o));
}

TEST(LowerStar, SingleLetter) {
  const Literal seed = Literal::positive(F("start", {Term::variable("x0"), Term::variable("y0")}));
  const auto rules = lower_star(parse_regex("(0,1,e)*"), "reach", seed);
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_EQ(gdl::to_kif(rules[0]), "(<= (reach ?x0 ?y0 ?x0 ?y0) (start ?x0 ?y0))");
  EXPECT_TRUE(recursive(rules[1]));
  EXPECT_EQ(count_literals(rules[1], "sumy", Literal::Kind::Positive), 1);
  EXPECT_EQ(count_literals(rules[1], "occupied", Literal::Kind::Negative), 1);
}

TEST(LowerStar, NestedBodyAdvancesTwoLetters) {
  const Literal seed = Literal::positive(F("start", {Term::variable("x0"), Term::variable("y0")}));
  const auto rules = lower_star(parse_regex("((1,0,e)(0,1,e))*"), "reach", seed);
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_TRUE(recursive(rules[1]));
  EXPECT_EQ(count_literals(rules[1], "sumx", Literal::Kind::Positive), 2);
  EXPECT_EQ(count_literals(rules[1], "occupied", Literal::Kind::Negative), 2);
}

TEST(LowerStar, UnionBodyGivesOneStepRulePerBranch) {
  const Literal seed = Literal::positive(F("start", {Term::variable("x0"), Term::variable("y0")}));
  const auto rules = lower_star(parse_regex("((1,0,e)+(0,1,p))*"), "reach", seed);
  ASSERT_EQ(rules.size(), 3u);
  EXPECT_EQ(count_literals(rules[2], "owned", Literal::Kind::Positive), 1);
  EXPECT_THROW(lower_star(parse_regex("(1,0,e)"), "reach", seed), std::invalid_argument);
}

TEST(Factoring, TwoBranchExample) {
  const GameSpec g = one_piece_game(6, 6, "(1,2,e)(2,0,e)+(1,2,e)(2,3,e)");
  const auto plain = translate(g, options(Representation::BoardPredicate, false));
  const auto factored = translate(g, options(Representation::BoardPredicate, true));
  EXPECT_LT(factored.body_atoms(), plain.body_atoms());
  // Per side, two words of 8 literals sharing 6 become 6 + 2 * 3.
  EXPECT_EQ(plain.body_atoms() - factored.body_atoms(), 8u);
  EXPECT_EQ(rules_with_head(factored, "m_a_w_t1").size(), 1u);
  EXPECT_TRUE(check_equivalence(Game(g), factored, 40, 3).ok());
}

TEST(Factoring, RookFamily) {
  const GameSpec g = one_piece_game(
      8, 8, "(0,1,e)*((0,1,e)+(0,1,p))+(0,-1,e)*((0,-1,e)+(0,-1,p))+(1,0,e)*((1,0,e)+(1,0,p))+(-1,0,e)*((-1,0,e)+(-1,0,p))");
  const auto plain = translate(g, options(Representation::BoardPredicate, false));
  const auto factored = translate(g, options(Representation::BoardPredicate, true));
  EXPECT_LT(factored.body_atoms(), plain.body_atoms());
  EXPECT_TRUE(check_equivalence(Game(g), factored, 40, 3).ok());
}

TEST(Factoring, NoSharedPrefixIsUnchanged) {
  std::vector<gdl::Rule> rules{
      {F("h", {Term::variable("x")}), {Literal::positive(F("a", {Term::variable("x")})), Literal::positive(F("b", {Term::variable("x")}))}},
      {F("h", {Term::variable("x")}), {Literal::positive(F("c", {Term::variable("x")})), Literal::positive(F("b", {Term::variable("x")}))}}};
  EXPECT_EQ(factor_common_prefixes(rules, "t"), rules);
}

TEST(Factoring, SharedPrefixTooShortToPay) {
  // Two rules sharing one literal: 2 * 1 literals before, 1 + 2 after.
  std::vector<gdl::Rule> rules{
      {C("h"), {Literal::positive(C("a")), Literal::positive(C("b"))}},
      {C("h"), {Literal::positive(C("a")), Literal::positive(C("c"))}}};
  EXPECT_EQ(factor_common_prefixes(rules, "t"), rules);
}

TEST(Factoring, NestedHoists) {
  auto lit = [](const char* n) { return Literal::positive(F(n, {Term::variable("x")})); };
  const Term h = F("h", {Term::variable("x")});
  std::vector<gdl::Rule> rules;
  for (const char* tail : {"d", "e", "f"}) rules.push_back({h, {lit("a"), lit("b"), lit("c"), lit(tail)}});
  for (const char* tail : {"g", "i"}) rules.push_back({h, {lit("a"), lit("b"), lit("k"), lit(tail)}});
  const auto out = factor_common_prefixes(rules, "t");
  gdl::Document before{rules}, after{out};
  EXPECT_LT(after.body_atoms(), before.body_atoms());
  // Same extension of h for every interpretation of the body relations.
  std::string facts;
  for (const char* n : {"a", "b", "c", "k", "d", "g"}) facts += std::string("(") + n + " 1)\n";
  facts += "(a 2)\n(b 2)\n(c 2)\n(f 2)\n(k 3)\n(i 3)\n";
  auto extension = [&](const gdl::Document& d) {
    const auto m = gdl::StateMachine::from_kif(facts + gdl::emit_kif(d));
    std::vector<Term> hs;
    for (const auto& t : m.model(gdl::GdlState{}))
      if (t.name == "h") hs.push_back(t);
    return hs;
  };
  EXPECT_EQ(extension(after), extension(before));
  EXPECT_EQ(extension(before).size(), 2u);
}

TEST(Representation, Estimates) {
  const auto single = estimate_representations(one_piece_game(10, 10, "(0,1,e)"));
  EXPECT_EQ(single.board_facts, 200);
  EXPECT_EQ(single.piece_id_facts, 200);
  GameSpec lone = one_piece_game(10, 10, "(0,1,e)");
  lone.at({10, 10}) = Occupant{};
  EXPECT_EQ(choose_representation(lone), Representation::PieceId);

  std::string chess = "game chess\nboard 8 8\n"
                      "r n b q k b n r\np p p p p p p p\n. . . . . . . .\n. . . . . . . .\n"
                      ". . . . . . . .\n. . . . . . . .\nP P P P P P P P\nR N B Q K B N R\n";
  for (const char* s : {"P", "R", "N", "B", "Q", "K"}) chess += std::string("piece ") + s + " (0,1,e)\n";
  chess += "turnlimit 100\n";
  const auto c = estimate_representations(parse_sbg(chess));
  EXPECT_EQ(c.board_facts, 768);
  EXPECT_EQ(c.piece_id_facts, 2048);
  EXPECT_EQ(c.choice, Representation::BoardPredicate);

  const auto ex = estimate_representations(example_game());
  EXPECT_EQ(ex.board_facts, 360);
  EXPECT_EQ(ex.piece_id_facts, 828);
  EXPECT_EQ(ex.choice, Representation::BoardPredicate);
}

TEST(Representation, ExplicitChoiceBypassesEstimate) {
  GameSpec lone = one_piece_game(10, 10, "(0,1,e)");
  lone.at({10, 10}) = Occupant{};
  const auto board = translate(lone, options(Representation::BoardPredicate, true));
  const auto automatic = translate(lone, options(Representation::Auto, true));
  auto uses = [](const gdl::Document& d, const std::string& f) {
    return std::any_of(d.rules.begin(), d.rules.end(), [&](const gdl::Rule& r) {
      return r.head.name == "init" && r.head.args.at(0).name == f;
    });
  };
  EXPECT_TRUE(uses(board, "cell"));
  EXPECT_TRUE(uses(automatic, "cellof"));
}

TEST(Interp, UnsafeRuleRejected) {
  EXPECT_THROW(gdl::StateMachine::from_kif("(q 1)\n(<= (p ?x) (not (q ?x)))"), gdl::ProgramError);
  EXPECT_THROW(gdl::StateMachine::from_kif("(q 1)\n(<= (p ?x ?y) (q ?x))"), gdl::ProgramError);
  EXPECT_THROW(gdl::StateMachine::from_kif("(q 1)\n(<= (p ?x) (q ?x) (distinct ?x ?y))"), gdl::ProgramError);
  try {
    gdl::check_safety(gdl::parse_document("(<= (p ?x) (not (q ?x)))"));
    FAIL();
  } catch (const gdl::ProgramError& e) {
    EXPECT_NE(std::string(e.what()).find("(<= (p ?x) (not (q ?x)))"), std::string::npos);
  }
}

TEST(Interp, NegationThroughRecursionRejected) {
  EXPECT_THROW(gdl::StateMachine::from_kif("(<= p (not q))\n(<= q (not p))"), gdl::ProgramError);
  EXPECT_THROW(gdl::StateMachine::from_kif("(e 1)\n(<= (p ?x) (e ?x) (not (p ?x)))"), gdl::ProgramError);
  EXPECT_NO_THROW(gdl::StateMachine::from_kif("(e 1)\n(<= (p ?x) (e ?x) (not (r ?x)))\n(<= (r ?x) (e ?x) (e 2))"));
}

TEST(Interp, UnsupportedConstructsRejected) {
  EXPECT_THROW(gdl::StateMachine::from_kif("(legal white (move 1 1 1 2))\n(<= (r ?m) (legal white ?m))"),
               gdl::ProgramError);
  EXPECT_THROW(gdl::StateMachine::from_kif("(<= (true (control white)) (role white))"), gdl::ProgramError);
}

TEST(Interp, TransitiveClosure) {
  std::string text = "(<= (path ?x ?y) (edge ?x ?y))\n(<= (path ?x ?z) (path ?x ?y) (edge ?y ?z))\n";
  for (int i = 1; i < 20; ++i) text += "(edge " + std::to_string(i) + " " + std::to_string(i + 1) + ")\n";
  for (auto mode : {gdl::EvalMode::SemiNaive, gdl::EvalMode::Naive}) {
    const auto m = gdl::StateMachine::from_kif(text, mode);
    const auto model = m.model(gdl::GdlState{});
    EXPECT_EQ(std::count_if(model.begin(), model.end(), [](const Term& t) { return t.name == "path"; }), 190);
  }
}

TEST(Interp, ZeroArityAndConstants) {
  const auto m = gdl::StateMachine::from_kif(
      "(role a)\n(role b)\n(init on)\n(<= ready (true on))\n(<= terminal ready)\n"
      "(<= (goal a 100) ready)\n(<= (goal b 0) ready)\n(<= (goal b 50) ready (not ready))\n");
  EXPECT_EQ(m.roles(), (std::vector<Term>{C("a"), C("b")}));
  const auto s = m.initial_state();
  EXPECT_EQ(s.facts, std::vector<Term>{C("on")});
  EXPECT_TRUE(m.terminal(s));
  EXPECT_EQ(m.goal(s, C("a")), 100);
  EXPECT_EQ(m.goal(s, C("b")), 0);
  EXPECT_FALSE(m.terminal(gdl::GdlState{}));
  EXPECT_THROW(m.goal(gdl::GdlState{}, C("a")), gdl::StateError);
}

TEST(Interp, NextNeedsOneMovePerRole) {
  const auto m = gdl::StateMachine::from_kif(gdl::emit_kif(translate(example_game())));
  EXPECT_THROW(m.next(m.initial_state(), {C("noop")}), gdl::StateError);
}

TEST(Interp, SemiNaiveMatchesNaive) {
  for (auto repr : {Representation::BoardPredicate, Representation::PieceId}) {
    const auto doc = translate(example_game(), options(repr, true));
    const gdl::StateMachine fast(doc, gdl::EvalMode::SemiNaive), slow(doc, gdl::EvalMode::Naive);
    const auto trace = gdl::random_playthrough(fast, 4, 30);
    for (const auto& step : trace.steps) {
      EXPECT_EQ(fast.model(step.state), slow.model(step.state));
      if (!step.joint.empty()) EXPECT_EQ(fast.model(step.state, step.joint), slow.model(step.state, step.joint));
    }
  }
}

TEST(Interp, InitialStateMatchesBoard) {
  const GameSpec spec = example_game();
  const auto m = gdl::StateMachine(translate(spec, options(Representation::BoardPredicate, true)));
  const auto s = m.initial_state();
  EXPECT_TRUE(has_fact(s, F("cell", {Term::number(1), Term::number(1), C("q"), C("white")})));
  EXPECT_TRUE(has_fact(s, F("cell", {Term::number(6), Term::number(6), C("q"), C("black")})));
  EXPECT_TRUE(has_fact(s, F("control", {C("white")})));
  EXPECT_TRUE(has_fact(s, F("step", {Term::number(0)})));
  int pieces = 0;
  for (const auto& o : spec.initial) pieces += !o.empty();
  EXPECT_EQ(s.facts.size(), static_cast<std::size_t>(pieces + 2));
}

TEST(Interp, IdleSideOnlyHasNoop) {
  const auto m = gdl::StateMachine(translate(example_game()));
  const auto s = m.initial_state();
  EXPECT_EQ(m.legal(s, C("black")), std::vector<Term>{C("noop")});
  const auto white = m.legal(s, C("white"));
  EXPECT_FALSE(white.empty());
  EXPECT_TRUE(std::none_of(white.begin(), white.end(), [](const Term& t) { return t == C("noop"); }));
  const auto after = m.next(s, {C("noop"), white.front()});
  EXPECT_EQ(m.legal(after, C("white")), std::vector<Term>{C("noop")});
}

TEST(Interp, CaptureAllGoals) {
  const GameSpec spec = parse_sbg(
      "game c\nboard 3 3\n. . .\na . .\nA . .\npiece A light (0,1,p)+(1,0,e)\nturnlimit 10\n"
      "win white capture A\nwin black capture A\n");
  for (auto repr : {Representation::BoardPredicate, Representation::PieceId}) {
    const auto m = gdl::StateMachine(translate(spec, options(repr, true)));
    const auto s0 = m.initial_state();
    EXPECT_FALSE(m.terminal(s0));
    const Term capture = F("move", {Term::number(1), Term::number(1), Term::number(1), Term::number(2)});
    const auto legal = m.legal(s0, C("white"));
    ASSERT_TRUE(std::find(legal.begin(), legal.end(), capture) != legal.end());
    const auto s1 = m.next(s0, {C("noop"), capture});
    EXPECT_TRUE(m.terminal(s1));
    EXPECT_EQ(m.goal(s1, C("white")), 100);
    EXPECT_EQ(m.goal(s1, C("black")), 0);
  }
}

TEST(Interp, PlaythroughTrace) {
  const auto m = gdl::StateMachine(translate(example_game()));
  const auto tr = gdl::random_playthrough(m, 9, 12);
  EXPECT_LE(tr.steps.size(), 13u);
  for (const auto& step : tr.steps) {
    for (std::size_t r = 0; r < step.joint.size(); ++r) {
      const auto& options = step.legal[r];
      EXPECT_TRUE(std::find(options.begin(), options.end(), step.joint[r]) != options.end());
    }
  }
  std::ostringstream os;
  gdl::write_trace_jsonl(tr, os);
  const std::string text = os.str();
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), tr.steps.size());
  EXPECT_EQ(text.rfind("{", 0), 0u);
}

TEST(Interp, EmittedDocumentsAreSafeAndStratified) {
  for (auto repr : {Representation::BoardPredicate, Representation::PieceId}) {
    for (bool factor : {false, true}) {
      const auto d = translate(example_game(), options(repr, factor));
      EXPECT_NO_THROW(gdl::check_safety(d));
      EXPECT_NO_THROW(gdl::check_stratification(d));
    }
  }
}

TEST(Differential, ExampleGameAllConfigurations) {
  const Game g(example_game());
  for (auto repr : {Representation::BoardPredicate, Representation::PieceId}) {
    for (bool factor : {false, true}) {
      const auto rep = check_translation(g, options(repr, factor), 60, 2);
      EXPECT_TRUE(rep.ok()) << (rep.mismatch ? rep.mismatch->what + "\n" + rep.mismatch->dump : "");
      EXPECT_EQ(rep.states, 60);
      EXPECT_GT(rep.transitions, 0);
    }
  }
}

TEST(Differential, GeneratedGames) {
  GeneratorConfig cfg;
  cfg.seed = 21;
  const auto pool = run_pool(cfg);
  for (std::uint64_t k = 0; k < 3; ++k) {
    Rng rng(derive_seed(cfg.seed, {50, k}));
    const Game g(generate_individual(cfg, pool, rng).spec);
    for (auto repr : {Representation::BoardPredicate, Representation::PieceId}) {
      const auto rep = check_translation(g, options(repr, true), 40, k);
      EXPECT_TRUE(rep.ok()) << (rep.mismatch ? rep.mismatch->what + "\n" + rep.mismatch->dump : "");
    }
  }
}

TEST(Differential, DetectsBrokenTranslation) {
  const Game g(example_game());
  auto d = translate(g.spec(), options(Representation::BoardPredicate, false));
  // Dropping the rule that advances the step counter breaks every successor.
  d.rules.erase(std::remove_if(d.rules.begin(), d.rules.end(),
                               [](const gdl::Rule& r) {
                                 return r.head.name == "next" && r.head.args.at(0).name == "step";
                               }),
                d.rules.end());
  const auto rep = check_equivalence(g, d, 10, 1);
  ASSERT_FALSE(rep.ok());
  EXPECT_NE(rep.mismatch->what.find("next state"), std::string::npos);
  EXPECT_NE(rep.mismatch->dump.find("(control white)"), std::string::npos);
}

TEST(Differential, RenderBoard) {
  const Game g(one_piece_game(3, 2, "(0,1,e)"));
  EXPECT_EQ(render_board(g, g.initial_state()), "..a\nA..\n");
}
