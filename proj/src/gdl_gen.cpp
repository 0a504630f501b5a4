#include "sbg/gdl_gen.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <unordered_map>

namespace sbg {

using gdl::Literal;
using gdl::Rule;
using gdl::Term;

const char* representation_name(Representation r) {
  switch (r) {
    case Representation::BoardPredicate:
      return "board";
    case Representation::PieceId:
      return "piece-id";
    case Representation::Auto:
      return "auto";
  }
  return "?";
}

RepresentationEstimate estimate_representations(const GameSpec& spec) {
  RepresentationEstimate e;
  const double squares = static_cast<double>(spec.width) * spec.height;
  const double pieces = static_cast<double>(
      std::count_if(spec.initial.begin(), spec.initial.end(), [](const Occupant& o) { return !o.empty(); }));
  e.board_facts = squares * 2.0 * static_cast<double>(spec.pieces.size());
  e.piece_id_facts = pieces * squares;
  e.choice = e.piece_id_facts < e.board_facts ? Representation::PieceId : Representation::BoardPredicate;
  return e;
}

Representation choose_representation(const GameSpec& spec) { return estimate_representations(spec).choice; }

namespace {

Term C(std::string s) { return Term::constant(std::move(s)); }
Term V(std::string s) { return Term::variable(std::move(s)); }
Term N(long v) { return Term::number(v); }
Term F(std::string f, std::vector<Term> args) { return Term::compound(std::move(f), std::move(args)); }
Literal P(Term t) { return Literal::positive(std::move(t)); }
Literal Neg(Term t) { return Literal::negative(std::move(t)); }
Term True(Term t) { return F("true", {std::move(t)}); }
Rule fact(Term t) { return Rule{std::move(t), {}}; }
Rule rule(Term head, std::vector<Literal> body) { return Rule{std::move(head), std::move(body)}; }

Term side_term(Side s) { return C(s == Side::White ? "white" : "black"); }
Term type_term(char symbol) {
  return C(std::string(1, static_cast<char>(std::tolower(static_cast<unsigned char>(symbol)))));
}
std::string id_name(int k) { return "i" + std::to_string(k); }

/// Literals asserting that a piece of `type` owned by `owner` stands on (x, y).
std::vector<Literal> piece_at(Representation repr, Term x, Term y, Term type, Term owner) {
  if (repr == Representation::BoardPredicate) return {P(True(F("cell", {std::move(x), std::move(y), type, owner})))};
  return {P(F("piece", {V("i"), std::move(type), std::move(owner)})), P(True(F("cellof", {V("i"), std::move(x), std::move(y)})))};
}

struct Displacements {
  std::set<int> dx;
  std::set<int> dy;
};

/// Sign information of the letters inside starred fragments.
struct Signs {
  bool pos_x = false, neg_x = false, pos_y = false, neg_y = false;
};

void collect_signs(const MoveRegex& r, Signs& s) {
  if (r.kind() == MoveRegex::Kind::Atom) {
    s.pos_x |= r.letter().dx > 0;
    s.neg_x |= r.letter().dx < 0;
    s.pos_y |= r.letter().dy > 0;
    s.neg_y |= r.letter().dy < 0;
    return;
  }
  for (const auto& c : r.children()) collect_signs(c, s);
}

class MoveCompiler {
 public:
  MoveCompiler(Side mover, std::string prefix, Displacements& used, std::vector<Rule>& out, long& budget)
      : mover_(mover), prefix_(std::move(prefix)), used_(used), out_(out), budget_(budget) {}

  /// Legal rules for a whole piece language starting from `origin_body`.
  void compile_legal(const MoveRegex& r, std::vector<Literal> origin_body) {
    Path p;
    p.body = std::move(origin_body);
    walk({&r}, std::move(p), Target{true, {}});
  }

  /// Closure rules for `star` seeded from `seed_body`.
  void compile_star(const MoveRegex& star, const std::string& relation, std::vector<Literal> seed_body) {
    Path p;
    p.body = std::move(seed_body);
    lower(star, relation, p);
  }

 private:
  struct Path {
    std::vector<Literal> body;
    int index = 0;  // position variables are ?x<index>, ?y<index>
    int sum_dx = 0, sum_dy = 0;
    bool starred = false;
    Signs signs;
  };

  struct Target {
    bool legal = false;
    std::string relation;  // when not legal
  };

  static Term x(int i) { return V("x" + std::to_string(i)); }
  static Term y(int i) { return V("y" + std::to_string(i)); }

  void emit(Rule r) {
    if (--budget_ < 0) throw TranslationError("translation exceeds the rule budget");
    out_.push_back(std::move(r));
  }

  Term head(const Target& t, const Path& p) const {
    if (!t.legal) return F(t.relation, {x(0), y(0), x(p.index), y(p.index)});
    return F("legal", {side_term(mover_), F("move", {x(0), y(0), x(p.index), y(p.index)})});
  }

  void finish(const Target& t, Path p) {
    if (!t.legal) {
      emit(rule(head(t, p), std::move(p.body)));
      return;
    }
    if (p.index == 0) return;  // the empty word never moves the piece
    if (!p.starred) {
      if (p.sum_dx != 0 || p.sum_dy != 0) emit(rule(head(t, p), std::move(p.body)));
      return;
    }
    const Signs& s = p.signs;
    const bool moves = (p.sum_dx > 0 && !s.neg_x) || (p.sum_dx < 0 && !s.pos_x) || (p.sum_dy > 0 && !s.neg_y) ||
                       (p.sum_dy < 0 && !s.pos_y);
    if (moves) {
      emit(rule(head(t, p), std::move(p.body)));
      return;
    }
    // Origin and destination may coincide: one rule per coordinate that differs.
    auto bx = p.body;
    bx.push_back(Literal::distinct(x(0), x(p.index)));
    emit(rule(head(t, p), std::move(bx)));
    p.body.push_back(Literal::distinct(y(0), y(p.index)));
    emit(rule(head(t, p), std::move(p.body)));
  }

  void step(const Letter& l, Path& p) {
    used_.dx.insert(l.dx);
    used_.dy.insert(l.dy);
    const int i = p.index, k = p.index + 1;
    p.body.push_back(P(F("sumx", {x(i), N(l.dx), x(k)})));
    p.body.push_back(P(F("sumy", {y(i), N(l.dy), y(k)})));
    const Side enemy = opponent(mover_);
    switch (l.on) {
      case OnClass::Empty:
        p.body.push_back(Neg(F("occupied", {x(k), y(k)})));
        break;
      case OnClass::Opponent:
        p.body.push_back(P(F("owned", {x(k), y(k), side_term(enemy)})));
        break;
      case OnClass::Own:
        p.body.push_back(P(F("owned", {x(k), y(k), side_term(mover_)})));
        break;
    }
    p.index = k;
    p.sum_dx += l.dx;
    p.sum_dy += l.dy;
  }

  /// Base and step rules of `star` for paths arriving as `p`; returns the
  /// path continuing from the closure.
  Path lower(const MoveRegex& star, const std::string& relation, const Path& p) {
    emit(rule(F(relation, {x(0), y(0), x(p.index), y(p.index)}), p.body));
    Path inner;
    inner.index = 1;
    inner.body.push_back(P(F(relation, {x(0), y(0), x(1), y(1)})));
    walk({&star.body()}, std::move(inner), Target{false, relation});

    Path next;
    next.index = p.index + 1;
    next.body.push_back(P(F(relation, {x(0), y(0), x(next.index), y(next.index)})));
    next.sum_dx = p.sum_dx;
    next.sum_dy = p.sum_dy;
    next.starred = true;
    next.signs = p.signs;
    collect_signs(star.body(), next.signs);
    return next;
  }

  // `rest` holds the remaining concatenation in reverse order.
  void walk(std::vector<const MoveRegex*> rest, Path p, const Target& t) {
    while (!rest.empty()) {
      const MoveRegex* r = rest.back();
      rest.pop_back();
      switch (r->kind()) {
        case MoveRegex::Kind::Atom:
          step(r->letter(), p);
          break;
        case MoveRegex::Kind::Concat:
          for (auto it = r->children().rbegin(); it != r->children().rend(); ++it) rest.push_back(&*it);
          break;
        case MoveRegex::Kind::Union:
          for (const auto& c : r->children()) {
            auto branch = rest;
            branch.push_back(&c);
            walk(std::move(branch), p, t);
          }
          return;
        case MoveRegex::Kind::Star:
          p = lower(*r, prefix_ + "_r" + std::to_string(++stars_), p);
          break;
        case MoveRegex::Kind::Power:
          throw std::logic_error("powers must be expanded before translation");
      }
    }
    finish(t, std::move(p));
  }

  Side mover_;
  std::string prefix_;
  Displacements& used_;
  std::vector<Rule>& out_;
  long& budget_;
  int stars_ = 0;
};

void add_variables(const Literal& l, std::vector<std::string>& out) {
  gdl::collect_variables(l.atom, out);
  gdl::collect_variables(l.rhs, out);
}

}  // namespace

std::vector<Rule> lower_star(const MoveRegex& star, const std::string& relation, const Literal& seed) {
  if (star.kind() != MoveRegex::Kind::Star) throw std::invalid_argument("lower_star expects a starred fragment");
  Displacements used;
  std::vector<Rule> out;
  long budget = 1 << 20;
  MoveCompiler mc(Side::White, relation, used, out, budget);
  mc.compile_star(expand_powers(star), relation, {seed});
  return out;
}

std::vector<Rule> factor_common_prefixes(std::vector<Rule> rules, const std::string& prefix) {
  // Trie over rule bodies, literals compared through interned ids.
  struct Node {
    std::map<int, int> child;
    int depth = 0;
    int count = 0;  // rules whose body passes through or ends here
    int ends = 0;
    bool hoist = false;
    int parent = -1;
    std::vector<std::size_t> members;  // filled for hoisted nodes
  };
  std::unordered_map<std::string, int> ids;
  std::vector<Node> trie(1);
  std::vector<std::vector<int>> paths(rules.size());
  for (std::size_t r = 0; r < rules.size(); ++r) {
    int v = 0;
    ++trie[0].count;
    paths[r].push_back(0);
    for (const auto& l : rules[r].body) {
      const int id = ids.emplace(gdl::to_kif(l), static_cast<int>(ids.size())).first->second;
      auto it = trie[static_cast<std::size_t>(v)].child.find(id);
      int w;
      if (it == trie[static_cast<std::size_t>(v)].child.end()) {
        w = static_cast<int>(trie.size());
        trie[static_cast<std::size_t>(v)].child.emplace(id, w);
        Node n;
        n.depth = trie[static_cast<std::size_t>(v)].depth + 1;
        n.parent = v;
        trie.push_back(std::move(n));
      } else {
        w = it->second;
      }
      v = w;
      ++trie[static_cast<std::size_t>(v)].count;
      paths[r].push_back(v);
    }
    ++trie[static_cast<std::size_t>(v)].ends;
  }

  // Hoist at branch points: m rules sharing p literals cost m*p literals
  // before and p + m after (the new rule plus one reference each). Below a
  // hoisted node the reference itself is part of the shared prefix.
  struct Frame {
    int node, anchor_depth;
    bool anchored;
  };
  std::vector<Frame> stack{{0, 0, false}};
  while (!stack.empty()) {
    auto [v, anchor_depth, anchored] = stack.back();
    stack.pop_back();
    Node& n = trie[static_cast<std::size_t>(v)];
    if (v != 0 && n.count >= 2 && (n.child.size() != 1 || n.ends > 0)) {
      const long p = n.depth - anchor_depth + (anchored ? 1 : 0), m = n.count;
      if (m * p - (p + m) > 0) {
        n.hoist = true;
        anchor_depth = n.depth;
        anchored = true;
      }
    }
    for (const auto& [id, w] : n.child) stack.push_back({w, anchor_depth, anchored});
  }

  std::vector<int> made(trie.size(), 0);
  int next_name = 0;
  for (std::size_t r = 0; r < rules.size(); ++r)
    for (int v : paths[r])
      if (trie[static_cast<std::size_t>(v)].hoist) {
        trie[static_cast<std::size_t>(v)].members.push_back(r);
        if (!made[static_cast<std::size_t>(v)]) made[static_cast<std::size_t>(v)] = ++next_name;
      }
  if (next_name == 0) return rules;

  // Head of each hoisted relation: prefix variables still used afterwards.
  std::vector<Term> heads(trie.size());
  for (std::size_t v = 0; v < trie.size(); ++v) {
    if (!trie[v].hoist) continue;
    const std::size_t d = static_cast<std::size_t>(trie[v].depth);
    const auto& some = rules[trie[v].members.front()].body;
    std::vector<std::string> prefix_vars, later_vars;
    for (std::size_t k = 0; k < d; ++k) add_variables(some[k], prefix_vars);
    for (std::size_t j : trie[v].members) {
      gdl::collect_variables(rules[j].head, later_vars);
      for (std::size_t k = d; k < rules[j].body.size(); ++k) add_variables(rules[j].body[k], later_vars);
    }
    std::vector<Term> live;
    for (const auto& x : prefix_vars)
      if (std::find(later_vars.begin(), later_vars.end(), x) != later_vars.end()) live.push_back(V(x));
    const std::string name = prefix + std::to_string(made[v]);
    heads[v] = live.empty() ? C(name) : F(name, live);
  }

  // Body of a rule or hoisted relation ending at depth `d` along `path`:
  // a reference to the deepest hoisted node above it, then the remaining literals.
  auto rewrite = [&](const std::vector<Literal>& body, const std::vector<int>& path, std::size_t d) {
    std::size_t from = 0;
    std::vector<Literal> out;
    for (std::size_t k = d; k-- > 1;) {
      if (trie[static_cast<std::size_t>(path[k])].hoist) {
        out.push_back(P(heads[static_cast<std::size_t>(path[k])]));
        from = k;
        break;
      }
    }
    out.insert(out.end(), body.begin() + static_cast<std::ptrdiff_t>(from),
               body.begin() + static_cast<std::ptrdiff_t>(std::min(d, body.size())));
    return out;
  };

  std::vector<Rule> out;
  std::vector<char> emitted(trie.size(), 0);
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const auto& path = paths[r];
    for (std::size_t k = 1; k < path.size(); ++k) {
      const auto v = static_cast<std::size_t>(path[k]);
      if (!trie[v].hoist || emitted[v]) continue;
      emitted[v] = 1;
      out.push_back(rule(heads[v], rewrite(rules[r].body, path, k)));
    }
    out.push_back(rule(rules[r].head, rewrite(rules[r].body, path, path.size())));
  }
  return out;
}

gdl::Document translate(const GameSpec& spec, const TranslationOptions& opts) {
  validate(spec);
  Representation repr = opts.representation;
  if (repr == Representation::Auto) repr = choose_representation(spec);
  const bool board = repr == Representation::BoardPredicate;

  std::vector<Rule> out;
  const Term white = C("white"), black = C("black");
  out.push_back(fact(F("role", {white})));
  out.push_back(fact(F("role", {black})));
  out.push_back(fact(F("opp", {white, black})));
  out.push_back(fact(F("opp", {black, white})));

  // Starting pieces in row-major order, for the identifier scheme.
  std::vector<std::pair<Square, Occupant>> placed;
  for (int yy = 1; yy <= spec.height; ++yy)
    for (int xx = 1; xx <= spec.width; ++xx)
      if (!spec.at({xx, yy}).empty()) placed.emplace_back(Square{xx, yy}, spec.at({xx, yy}));
  if (!board)
    for (std::size_t k = 0; k < placed.size(); ++k)
      out.push_back(fact(F("piece", {C(id_name(static_cast<int>(k) + 1)), type_term(placed[k].second.symbol),
                                     side_term(placed[k].second.owner)})));

  out.push_back(fact(F("init", {F("control", {white})})));
  out.push_back(fact(F("init", {F("step", {N(0)})})));
  for (std::size_t k = 0; k < placed.size(); ++k) {
    const auto& [sq, occ] = placed[k];
    out.push_back(fact(F("init", {board ? F("cell", {N(sq.x), N(sq.y), type_term(occ.symbol), side_term(occ.owner)})
                                        : F("cellof", {C(id_name(static_cast<int>(k) + 1)), N(sq.x), N(sq.y)})})));
  }
  for (int n = 0; n < spec.turnlimit; ++n) out.push_back(fact(F("succ", {N(n), N(n + 1)})));

  // Move rules first, so the arithmetic tables cover exactly what they use.
  Displacements used;
  std::vector<Rule> moves;
  long budget = opts.rule_budget;
  for (Side side : {Side::White, Side::Black}) {
    for (const auto& piece : spec.pieces) {
      const std::string prefix =
          std::string("m_") + type_term(piece.symbol).name + (side == Side::White ? "_w" : "_b");
      std::vector<Rule> rules;
      MoveCompiler mc(side, prefix, used, rules, budget);
      std::vector<Literal> origin{P(True(F("control", {side_term(side)})))};
      for (auto& l : piece_at(repr, V("x0"), V("y0"), type_term(piece.symbol), side_term(side))) origin.push_back(l);
      mc.compile_legal(expand_powers(piece.moves(side)), origin);
      if (opts.factor_prefixes) rules = factor_common_prefixes(std::move(rules), prefix + "_t");
      moves.insert(moves.end(), rules.begin(), rules.end());
    }
  }
  for (int d : used.dx)
    for (int xx = 1; xx <= spec.width; ++xx)
      if (xx + d >= 1 && xx + d <= spec.width) out.push_back(fact(F("sumx", {N(xx), N(d), N(xx + d)})));
  for (int d : used.dy)
    for (int yy = 1; yy <= spec.height; ++yy)
      if (yy + d >= 1 && yy + d <= spec.height) out.push_back(fact(F("sumy", {N(yy), N(d), N(yy + d)})));

  // Board views.
  const Term vx = V("x"), vy = V("y"), vp = V("p"), vo = V("o"), vr = V("r"), vi = V("i");
  auto at_any = [&](Term type, Term owner) { return piece_at(repr, vx, vy, std::move(type), std::move(owner)); };
  out.push_back(rule(F("occupied", {vx, vy}),
                     {P(board ? True(F("cell", {vx, vy, vp, vo})) : True(F("cellof", {vi, vx, vy})))}));
  out.push_back(rule(F("owned", {vx, vy, vo}), at_any(vp, vo)));
  out.push_back(rule(F("hastype", {vo, vp}), at_any(vp, vo)));
  out.push_back(rule(F("hasany", {vo}), {P(F("hastype", {vo, vp}))}));

  out.insert(out.end(), moves.begin(), moves.end());
  out.push_back(rule(F("legal", {white, C("noop")}), {P(True(F("control", {black})))}));
  out.push_back(rule(F("legal", {black, C("noop")}), {P(True(F("control", {white})))}));

  // Transitions.
  const Term x0 = V("x0"), y0 = V("y0"), u = V("u"), v = V("v");
  if (board) {
    out.push_back(rule(F("next", {F("cell", {vx, vy, vp, vo})}),
                       {P(F("does", {vo, F("move", {x0, y0, vx, vy})})), P(True(F("cell", {x0, y0, vp, vo})))}));
    out.push_back(rule(F("next", {F("cell", {vx, vy, vp, vo})}),
                       {P(True(F("cell", {vx, vy, vp, vo}))), Neg(F("touched", {vx, vy}))}));
  } else {
    out.push_back(rule(F("next", {F("cellof", {vi, vx, vy})}),
                       {P(F("does", {vr, F("move", {x0, y0, vx, vy})})), P(True(F("cellof", {vi, x0, y0})))}));
    out.push_back(rule(F("next", {F("cellof", {vi, vx, vy})}),
                       {P(True(F("cellof", {vi, vx, vy}))), Neg(F("touched", {vx, vy}))}));
  }
  out.push_back(rule(F("touched", {vx, vy}), {P(F("does", {vr, F("move", {vx, vy, u, v})}))}));
  out.push_back(rule(F("touched", {vx, vy}), {P(F("does", {vr, F("move", {u, v, vx, vy})}))}));
  out.push_back(rule(F("next", {F("control", {black})}), {P(True(F("control", {white})))}));
  out.push_back(rule(F("next", {F("control", {white})}), {P(True(F("control", {black})))}));
  out.push_back(rule(F("next", {F("step", {V("m")})}), {P(True(F("step", {V("n")}))), P(F("succ", {V("n"), V("m")}))}));

  // Status, in the order the native model decides it.
  out.push_back(rule(F("mover", {white}), {P(True(F("control", {black})))}));
  out.push_back(rule(F("mover", {black}), {P(True(F("control", {white})))}));
  for (const auto& c : spec.conditions) {
    const Term s = side_term(c.side);
    if (c.kind == WinKind::CaptureAll) {
      out.push_back(rule(F("condwin", {s}), {Neg(F("hastype", {side_term(opponent(c.side)), type_term(c.piece)}))}));
    } else {
      const int row = c.side == Side::White ? spec.height : 1;
      out.push_back(rule(F("condwin", {s}), piece_at(repr, vx, N(row), type_term(c.piece), s)));
    }
  }
  out.push_back(rule(C("anycond"), {P(F("condwin", {vr}))}));
  out.push_back(rule(C("moverwins"), {P(F("mover", {vr})), P(F("condwin", {vr}))}));
  out.push_back(rule(C("nopieces"), {P(True(F("control", {vr}))), Neg(F("hasany", {vr}))}));
  out.push_back(rule(C("timeout"), {P(True(F("step", {N(spec.turnlimit)})))}));
  out.push_back(rule(C("anylegal"), {P(F("legal", {vr, F("move", {V("a"), V("b"), V("c"), V("d")})}))}));
  out.push_back(rule(F("wins", {vr}), {P(F("mover", {vr})), P(F("condwin", {vr}))}));
  out.push_back(rule(F("wins", {vr}), {P(True(F("control", {vr}))), P(F("condwin", {vr})), Neg(C("moverwins"))}));
  out.push_back(rule(F("wins", {vr}), {P(F("mover", {vr})), P(C("nopieces")), Neg(C("anycond"))}));
  out.push_back(rule(C("drawn"), {P(C("timeout")), Neg(C("anycond")), Neg(C("nopieces"))}));
  out.push_back(rule(F("wins", {vr}), {P(F("mover", {vr})), Neg(C("anylegal")), Neg(C("anycond")),
                                       Neg(C("nopieces")), Neg(C("timeout"))}));
  out.push_back(rule(C("terminal"), {P(F("wins", {vr}))}));
  out.push_back(rule(C("terminal"), {P(C("drawn"))}));
  out.push_back(rule(F("goal", {vr, N(100)}), {P(F("wins", {vr}))}));
  out.push_back(rule(F("goal", {vr, N(0)}), {P(F("opp", {vr, vo})), P(F("wins", {vo}))}));
  out.push_back(rule(F("goal", {vr, N(50)}), {P(F("role", {vr})), P(C("drawn"))}));

  gdl::Document doc;
  doc.rules = std::move(out);
  return doc;
}

}  // namespace sbg
