#include "sbg/automaton.hpp"

#include <algorithm>
#include <set>

namespace sbg {

namespace {

struct PositionSets {
  bool nullable = false;
  std::vector<int> first;
  std::vector<int> last;
};

class Glushkov {
 public:
  std::vector<Letter> letters;           // position i + 1
  std::vector<std::set<int>> follow;     // indexed by position

  PositionSets visit(const MoveRegex& r) {
    using K = MoveRegex::Kind;
    switch (r.kind()) {
      case K::Atom: {
        letters.push_back(r.letter());
        follow.emplace_back();
        const int pos = static_cast<int>(letters.size());
        return {false, {pos}, {pos}};
      }
      case K::Union: {
        PositionSets out;
        for (const auto& c : r.children()) {
          PositionSets s = visit(c);
          out.nullable = out.nullable || s.nullable;
          out.first.insert(out.first.end(), s.first.begin(), s.first.end());
          out.last.insert(out.last.end(), s.last.begin(), s.last.end());
        }
        return out;
      }
      case K::Concat: {
        PositionSets out;
        out.nullable = true;
        for (const auto& c : r.children()) {
          PositionSets s = visit(c);
          for (int l : out.last)
            for (int f : s.first) follow[l - 1].insert(f);
          if (out.nullable) out.first.insert(out.first.end(), s.first.begin(), s.first.end());
          if (s.nullable) {
            out.last.insert(out.last.end(), s.last.begin(), s.last.end());
          } else {
            out.last = s.last;
          }
          out.nullable = out.nullable && s.nullable;
        }
        return out;
      }
      case K::Star: {
        PositionSets s = visit(r.body());
        for (int l : s.last)
          for (int f : s.first) follow[l - 1].insert(f);
        s.nullable = true;
        return s;
      }
      case K::Power:
        break;
    }
    throw RegexError("power nodes must be expanded before automaton construction");
  }
};

}  // namespace

MoveAutomaton compile_regex(const MoveRegex& r) {
  Glushkov g;
  PositionSets top = g.visit(expand_powers(r));
  if (top.last.empty()) throw RegexError("move language contains no non-empty word");

  const std::size_t n = g.letters.size() + 1;
  MoveAutomaton a;
  a.transitions_.resize(n);
  a.accepting_.assign(n, false);
  for (int l : top.last) a.accepting_[l] = true;

  std::sort(top.first.begin(), top.first.end());
  top.first.erase(std::unique(top.first.begin(), top.first.end()), top.first.end());
  for (int f : top.first) a.transitions_[0].push_back({g.letters[f - 1], f});
  for (std::size_t p = 1; p < n; ++p)
    for (int f : g.follow[p - 1]) a.transitions_[p].push_back({g.letters[f - 1], f});
  return a;
}

bool MoveAutomaton::accepts(const Word& word) const {
  if (word.empty()) return false;
  std::vector<int> current{kStart};
  for (const Letter& l : word) {
    std::vector<int> next;
    for (int s : current)
      for (const auto& t : transitions_[s])
        if (t.letter == l) next.push_back(t.target);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    if (next.empty()) return false;
    current = std::move(next);
  }
  return std::any_of(current.begin(), current.end(), [&](int s) { return accepting_[s]; });
}

}  // namespace sbg
