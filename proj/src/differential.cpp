#include "sbg/differential.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "sbg/rng.hpp"

namespace sbg {

using gdl::Term;

std::string render_board(const Game& game, const GameState& state) {
  std::string out;
  for (int y = game.height(); y >= 1; --y) {
    for (int x = 1; x <= game.width(); ++x) {
      const Cell c = game.cell(state, {x, y});
      char ch = '.';
      if (!cell_empty(c)) {
        ch = game.spec().pieces[static_cast<std::size_t>(cell_piece(c))].symbol;
        if (cell_owner(c) == Side::Black) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      }
      out += ch;
    }
    out += '\n';
  }
  return out;
}

namespace {

using Endpoints = std::tuple<int, int, int, int>;

struct Decoded {
  std::vector<Cell> board;
  Side to_move = Side::White;
  int ply = -1;
};

std::optional<int> as_int(const Term& t) {
  if (t.kind != Term::Kind::Constant || t.name.empty()) return std::nullopt;
  for (char c : t.name)
    if (!std::isdigit(static_cast<unsigned char>(c)) && c != '-') return std::nullopt;
  return std::stoi(t.name);
}

std::optional<Side> as_side(const Term& t) {
  if (t == Term::constant("white")) return Side::White;
  if (t == Term::constant("black")) return Side::Black;
  return std::nullopt;
}

class Harness {
 public:
  Harness(const Game& game, const gdl::Document& doc, gdl::EvalMode mode) : game_(game), machine_(doc, mode) {
    for (const auto& r : doc.rules) {
      if (!r.body.empty() || r.head.name != "piece" || r.head.args.size() != 3) continue;
      pieces_[r.head.args[0].name] = {r.head.args[1], r.head.args[2]};
    }
    white_ = Term::constant("white");
    black_ = Term::constant("black");
  }

  EquivalenceReport run(int samples, std::uint64_t seed) {
    EquivalenceReport rep;
    Rng rng(seed);
    if (machine_.roles() != std::vector<Term>{black_, white_}) {
      rep.mismatch = Mismatch{"roles are not {black, white}", ""};
      return rep;
    }
    while (rep.states < samples) {
      GameState s = game_.initial_state();
      gdl::GdlState g = machine_.initial_state();
      for (;;) {
        if (auto m = compare(s, g, rep); m) {
          rep.mismatch = std::move(m);
          return rep;
        }
        ++rep.states;
        const auto moves = game_.legal_moves(s, false);
        if (game_.status(s, moves) != Status::Ongoing || rep.states >= samples) break;
        const Move& pick = moves[rng.index(moves.size())];
        g = machine_.next(g, joint(s.to_move, pick));
        s = game_.apply_move_unchecked(s, pick);
      }
    }
    return rep;
  }

 private:
  std::vector<Term> joint(Side mover, const Move& m) const {
    Term move = Term::compound("move", {Term::number(m.origin.x), Term::number(m.origin.y),
                                        Term::number(m.destination.x), Term::number(m.destination.y)});
    // roles() order is (black, white).
    if (mover == Side::White) return {Term::constant("noop"), move};
    return {move, Term::constant("noop")};
  }

  std::optional<Cell> cell_of(const Term& type, const Term& owner) const {
    const auto side = as_side(owner);
    if (!side || type.kind != Term::Kind::Constant || type.name.size() != 1) return std::nullopt;
    const int k = game_.spec().piece_index(static_cast<char>(std::toupper(static_cast<unsigned char>(type.name[0]))));
    if (k < 0) return std::nullopt;
    return make_cell(k, *side);
  }

  /// Empty string on success, otherwise the reason decoding failed.
  std::string decode(const gdl::GdlState& g, Decoded& d) const {
    const GameSpec& spec = game_.spec();
    d.board.assign(static_cast<std::size_t>(spec.width * spec.height), 0);
    std::vector<char> seen(d.board.size(), 0);
    int controls = 0, steps = 0;
    for (const auto& f : g.facts) {
      const auto bad = "unexpected state fact " + gdl::to_kif(f);
      std::optional<Cell> c;
      std::optional<int> x, y;
      if (f.name == "cell" && f.args.size() == 4) {
        x = as_int(f.args[0]);
        y = as_int(f.args[1]);
        c = cell_of(f.args[2], f.args[3]);
      } else if (f.name == "cellof" && f.args.size() == 3) {
        auto it = pieces_.find(f.args[0].name);
        if (it == pieces_.end()) return bad;
        x = as_int(f.args[1]);
        y = as_int(f.args[2]);
        c = cell_of(it->second.first, it->second.second);
      } else if (f.name == "control" && f.args.size() == 1) {
        const auto side = as_side(f.args[0]);
        if (!side) return bad;
        d.to_move = *side;
        ++controls;
        continue;
      } else if (f.name == "step" && f.args.size() == 1) {
        const auto n = as_int(f.args[0]);
        if (!n) return bad;
        d.ply = *n;
        ++steps;
        continue;
      } else {
        return bad;
      }
      if (!x || !y || !c || !spec.on_board({*x, *y})) return bad;
      const std::size_t i = spec.index({*x, *y});
      if (seen[i]++) return "two pieces on " + std::to_string(*x) + "," + std::to_string(*y);
      d.board[i] = *c;
    }
    if (controls != 1) return "expected one control fact, found " + std::to_string(controls);
    if (steps != 1) return "expected one step fact, found " + std::to_string(steps);
    return "";
  }

  std::string dump(const GameState& s, const gdl::GdlState& g) const {
    std::ostringstream os;
    os << render_board(game_, s) << "to move: " << side_name(s.to_move) << "\nply: " << s.ply << "\ngdl state:\n";
    for (const auto& f : g.facts) os << "  " << gdl::to_kif(f) << '\n';
    return os.str();
  }

  std::string same_position(const GameState& s, const gdl::GdlState& g) const {
    Decoded d;
    if (auto err = decode(g, d); !err.empty()) return err;
    if (d.board != s.board) return "board differs";
    if (d.to_move != s.to_move) return "side to move differs";
    if (d.ply != s.ply) return "ply differs";
    return "";
  }

  static std::string list(const std::set<Endpoints>& ms) {
    std::string out;
    for (const auto& [a, b, c, e] : ms)
      out += " (" + std::to_string(a) + "," + std::to_string(b) + ")->(" + std::to_string(c) + "," + std::to_string(e) + ")";
    return out;
  }

  std::optional<Mismatch> compare(const GameState& s, const gdl::GdlState& g, EquivalenceReport& rep) const {
    auto fail = [&](std::string what) { return Mismatch{std::move(what), dump(s, g)}; };
    if (auto err = same_position(s, g); !err.empty()) return fail("state: " + err);

    const auto moves = game_.legal_moves(s, false);
    std::set<Endpoints> native;
    for (const auto& m : moves) native.emplace(m.origin.x, m.origin.y, m.destination.x, m.destination.y);
    const Term& mover = s.to_move == Side::White ? white_ : black_;
    const Term& idle = s.to_move == Side::White ? black_ : white_;
    std::set<Endpoints> translated;
    for (const auto& t : machine_.legal(g, mover)) {
      std::optional<int> a, b, c, e;
      if (t.name == "move" && t.args.size() == 4) {
        a = as_int(t.args[0]);
        b = as_int(t.args[1]);
        c = as_int(t.args[2]);
        e = as_int(t.args[3]);
      }
      if (!a || !b || !c || !e) return fail("unexpected legal term " + gdl::to_kif(t));
      translated.emplace(*a, *b, *c, *e);
    }
    if (native != translated) {
      std::set<Endpoints> only_native, only_gdl;
      std::set_difference(native.begin(), native.end(), translated.begin(), translated.end(),
                          std::inserter(only_native, only_native.end()));
      std::set_difference(translated.begin(), translated.end(), native.begin(), native.end(),
                          std::inserter(only_gdl, only_gdl.end()));
      return fail("legal moves differ; native only:" + list(only_native) + "; gdl only:" + list(only_gdl));
    }
    if (machine_.legal(g, idle) != std::vector<Term>{Term::constant("noop")})
      return fail("side without control must have exactly noop");

    const Status st = game_.status(s, moves);
    const bool term = machine_.terminal(g);
    if (term != (st != Status::Ongoing))
      return fail(std::string("terminal differs; native status ") + status_name(st));
    if (term) {
      int want_w = 50, want_b = 50;
      if (st == Status::WhiteWins) want_w = 100, want_b = 0;
      if (st == Status::BlackWins) want_w = 0, want_b = 100;
      try {
        const int gw = machine_.goal(g, white_), gb = machine_.goal(g, black_);
        if (gw != want_w || gb != want_b)
          return fail("goals differ: gdl " + std::to_string(gw) + "/" + std::to_string(gb) + ", native " +
                      std::to_string(want_w) + "/" + std::to_string(want_b));
      } catch (const gdl::StateError& e) {
        return fail(std::string("goal: ") + e.what());
      }
      return std::nullopt;
    }
    for (const auto& m : moves) {
      const gdl::GdlState gn = machine_.next(g, joint(s.to_move, m));
      const GameState sn = game_.apply_move_unchecked(s, m);
      ++rep.transitions;
      if (auto err = same_position(sn, gn); !err.empty()) {
        return fail("next state after (" + std::to_string(m.origin.x) + "," + std::to_string(m.origin.y) + ")->(" +
                    std::to_string(m.destination.x) + "," + std::to_string(m.destination.y) + "): " + err);
      }
    }
    return std::nullopt;
  }

  const Game& game_;
  gdl::StateMachine machine_;
  std::map<std::string, std::pair<Term, Term>> pieces_;  // id -> (type, owner)
  Term white_, black_;
};

}  // namespace

EquivalenceReport check_equivalence(const Game& game, const gdl::Document& doc, int samples, std::uint64_t seed,
                                    gdl::EvalMode mode) {
  return Harness(game, doc, mode).run(samples, seed);
}

EquivalenceReport check_translation(const Game& game, const TranslationOptions& opts, int samples,
                                    std::uint64_t seed) {
  return check_equivalence(game, translate(game.spec(), opts), samples, seed);
}

}  // namespace sbg
