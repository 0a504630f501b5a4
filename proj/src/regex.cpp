#include "sbg/regex.hpp"

#include <stdexcept>

namespace sbg {

char on_class_char(OnClass on) {
  switch (on) {
    case OnClass::Empty:
      return 'e';
    case OnClass::Opponent:
      return 'p';
    case OnClass::Own:
      return 'w';
  }
  return '?';
}

Letter rotated_180(Letter l) { return Letter{-l.dx, -l.dy, l.on}; }

MoveRegex MoveRegex::atom(Letter l) {
  MoveRegex r;
  r.kind_ = Kind::Atom;
  r.letter_ = l;
  return r;
}

namespace {

std::vector<MoveRegex> flatten_kind(std::vector<MoveRegex> parts, MoveRegex::Kind kind) {
  std::vector<MoveRegex> out;
  out.reserve(parts.size());
  for (auto& p : parts) {
    if (p.kind() == kind) {
      for (const auto& c : p.children()) out.push_back(c);
    } else {
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace

MoveRegex MoveRegex::concat(std::vector<MoveRegex> parts) {
  if (parts.empty()) throw std::invalid_argument("concatenation of zero expressions");
  parts = flatten_kind(std::move(parts), Kind::Concat);
  if (parts.size() == 1) return std::move(parts.front());
  MoveRegex r;
  r.kind_ = Kind::Concat;
  r.children_ = std::move(parts);
  return r;
}

MoveRegex MoveRegex::alt(std::vector<MoveRegex> parts) {
  if (parts.empty()) throw std::invalid_argument("union of zero expressions");
  parts = flatten_kind(std::move(parts), Kind::Union);
  if (parts.size() == 1) return std::move(parts.front());
  MoveRegex r;
  r.kind_ = Kind::Union;
  r.children_ = std::move(parts);
  return r;
}

MoveRegex MoveRegex::star(MoveRegex body) {
  MoveRegex r;
  r.kind_ = Kind::Star;
  r.children_.push_back(std::move(body));
  return r;
}

MoveRegex MoveRegex::power(MoveRegex body, int exponent) {
  if (exponent < 1) throw std::invalid_argument("power exponent must be at least 1");
  MoveRegex r;
  r.kind_ = Kind::Power;
  r.exponent_ = exponent;
  r.children_.push_back(std::move(body));
  return r;
}

MoveRegex rotated_180(const MoveRegex& r) {
  return map_letters(r, [](Letter l) { return rotated_180(l); });
}

MoveRegex expand_powers(const MoveRegex& r) {
  using K = MoveRegex::Kind;
  switch (r.kind()) {
    case K::Atom:
      return r;
    case K::Concat:
    case K::Union: {
      std::vector<MoveRegex> parts;
      for (const auto& c : r.children()) parts.push_back(expand_powers(c));
      return r.kind() == K::Concat ? MoveRegex::concat(std::move(parts))
                                   : MoveRegex::alt(std::move(parts));
    }
    case K::Star:
      return MoveRegex::star(expand_powers(r.body()));
    case K::Power: {
      MoveRegex inner = expand_powers(r.body());
      return MoveRegex::concat(std::vector<MoveRegex>(static_cast<std::size_t>(r.exponent()), inner));
    }
  }
  return r;
}

int regex_size(const MoveRegex& r) {
  using K = MoveRegex::Kind;
  switch (r.kind()) {
    case K::Atom:
      return 1;
    case K::Concat:
    case K::Union: {
      int n = 0;
      for (const auto& c : r.children()) n += regex_size(c);
      return n;
    }
    case K::Star:
    case K::Power:
      return 1 + regex_size(r.body());
  }
  return 0;
}

bool nullable(const MoveRegex& r) {
  using K = MoveRegex::Kind;
  switch (r.kind()) {
    case K::Atom:
      return false;
    case K::Concat:
      for (const auto& c : r.children())
        if (!nullable(c)) return false;
      return true;
    case K::Union:
      for (const auto& c : r.children())
        if (nullable(c)) return true;
      return false;
    case K::Star:
      return true;
    case K::Power:
      return nullable(r.body());
  }
  return false;
}

std::string to_string(const Letter& l) {
  return "(" + std::to_string(l.dx) + "," + std::to_string(l.dy) + "," + on_class_char(l.on) + ")";
}

namespace {

// Precedence: union 0, sequence 1, postfix term 2.
void print(const MoveRegex& r, int context, std::string& out) {
  using K = MoveRegex::Kind;
  switch (r.kind()) {
    case K::Atom:
      out += to_string(r.letter());
      return;
    case K::Union: {
      if (context > 0) out += '(';
      bool first = true;
      for (const auto& c : r.children()) {
        if (!first) out += '+';
        first = false;
        print(c, 1, out);
      }
      if (context > 0) out += ')';
      return;
    }
    case K::Concat: {
      if (context > 1) out += '(';
      for (const auto& c : r.children()) print(c, 2, out);
      if (context > 1) out += ')';
      return;
    }
    case K::Star:
    case K::Power: {
      // A postfix operator binds to the whole operand only when the operand
      // is an atom; anything else, including another postfix term, needs
      // parentheses to stay unambiguous.
      const bool wrap = r.body().kind() != K::Atom;
      if (wrap) out += '(';
      print(r.body(), 0, out);
      if (wrap) out += ')';
      if (r.kind() == K::Star) {
        out += '*';
      } else {
        out += '^';
        out += std::to_string(r.exponent());
      }
      return;
    }
  }
}

// Splits an alternative into its first term and the remaining sequence.
// Returns false when the alternative is a single term.
bool split_head(const MoveRegex& alt, MoveRegex& head, std::vector<MoveRegex>& rest) {
  if (alt.kind() != MoveRegex::Kind::Concat) return false;
  head = alt.children().front();
  rest.assign(alt.children().begin() + 1, alt.children().end());
  return true;
}

}  // namespace

std::string to_string(const MoveRegex& r) {
  std::string out;
  print(r, 0, out);
  return out;
}

MoveRegex factor_common_prefixes(const MoveRegex& r) {
  using K = MoveRegex::Kind;
  switch (r.kind()) {
    case K::Atom:
      return r;
    case K::Star:
      return MoveRegex::star(factor_common_prefixes(r.body()));
    case K::Power:
      return MoveRegex::power(factor_common_prefixes(r.body()), r.exponent());
    case K::Concat: {
      std::vector<MoveRegex> parts;
      for (const auto& c : r.children()) parts.push_back(factor_common_prefixes(c));
      return MoveRegex::concat(std::move(parts));
    }
    case K::Union:
      break;
  }

  // Group alternatives of length >= 2 by their first term, keeping the order
  // in which each group first appears. Identical alternatives are merged.
  struct Group {
    MoveRegex head;
    std::vector<MoveRegex> tails;
    bool single;
  };
  std::vector<Group> groups;
  for (const auto& alt : r.children()) {
    MoveRegex head = alt;
    std::vector<MoveRegex> rest;
    if (!split_head(alt, head, rest)) {
      bool seen = false;
      for (const auto& g : groups) seen = seen || (g.single && g.head == alt);
      if (!seen) groups.push_back({alt, {}, true});
      continue;
    }
    MoveRegex tail = MoveRegex::concat(std::move(rest));
    bool placed = false;
    for (auto& g : groups) {
      if (!g.single && g.head == head) {
        bool dup = false;
        for (const auto& t : g.tails) dup = dup || t == tail;
        if (!dup) g.tails.push_back(std::move(tail));
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({std::move(head), {std::move(tail)}, false});
  }

  std::vector<MoveRegex> alts;
  for (auto& g : groups) {
    MoveRegex head = factor_common_prefixes(g.head);
    if (g.single) {
      alts.push_back(std::move(head));
    } else {
      MoveRegex tails = factor_common_prefixes(MoveRegex::alt(std::move(g.tails)));
      alts.push_back(MoveRegex::concat({std::move(head), std::move(tails)}));
    }
  }
  return MoveRegex::alt(std::move(alts));
}

}  // namespace sbg
