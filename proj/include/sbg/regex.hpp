#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace sbg {

/// Content a letter requires on the square it lands on.
enum class OnClass : std::uint8_t { Empty, Opponent, Own };

char on_class_char(OnClass on);

/// One relative step of a move word: displacement plus the content the
/// destination square must hold.
struct Letter {
  int dx = 0;
  int dy = 0;
  OnClass on = OnClass::Empty;

  auto operator<=>(const Letter&) const = default;
};

/// Letter with both displacements negated (180 degree rotation).
Letter rotated_180(Letter l);

using Word = std::vector<Letter>;

/// Regular expression over letters.
///
/// Constructed only through the factory functions below, which keep the
/// tree in a normal form: nested concatenations and unions are flattened and
/// single-element lists collapse to their element. Structural equality on
/// normalized trees is what the text round trip preserves.
class MoveRegex {
 public:
  enum class Kind : std::uint8_t { Atom, Concat, Union, Star, Power };

  static MoveRegex atom(Letter l);
  static MoveRegex atom(int dx, int dy, OnClass on) { return atom(Letter{dx, dy, on}); }
  static MoveRegex concat(std::vector<MoveRegex> parts);
  static MoveRegex alt(std::vector<MoveRegex> parts);
  static MoveRegex star(MoveRegex body);
  static MoveRegex power(MoveRegex body, int exponent);

  Kind kind() const { return kind_; }
  const Letter& letter() const { return letter_; }
  const std::vector<MoveRegex>& children() const { return children_; }
  const MoveRegex& body() const { return children_.front(); }
  int exponent() const { return exponent_; }

  bool operator==(const MoveRegex&) const = default;

 private:
  MoveRegex() = default;

  Kind kind_ = Kind::Atom;
  Letter letter_{};
  std::vector<MoveRegex> children_;
  int exponent_ = 0;
};

/// Applies `f` to every letter, preserving structure.
template <typename F>
MoveRegex map_letters(const MoveRegex& r, F&& f) {
  using K = MoveRegex::Kind;
  switch (r.kind()) {
    case K::Atom:
      return MoveRegex::atom(f(r.letter()));
    case K::Concat:
    case K::Union: {
      std::vector<MoveRegex> parts;
      parts.reserve(r.children().size());
      for (const auto& c : r.children()) parts.push_back(map_letters(c, f));
      return r.kind() == K::Concat ? MoveRegex::concat(std::move(parts))
                                   : MoveRegex::alt(std::move(parts));
    }
    case K::Star:
      return MoveRegex::star(map_letters(r.body(), f));
    case K::Power:
      return MoveRegex::power(map_letters(r.body(), f), r.exponent());
  }
  return r;
}

MoveRegex rotated_180(const MoveRegex& r);

/// Replaces every Power node by repeated concatenation.
MoveRegex expand_powers(const MoveRegex& r);

/// Number of letter atoms plus Star and Power operator nodes.
int regex_size(const MoveRegex& r);

/// True when the empty word belongs to the language.
bool nullable(const MoveRegex& r);

/// Canonical text form: unions as `+`, sequences by juxtaposition, minimal
/// parentheses.
std::string to_string(const MoveRegex& r);
std::string to_string(const Letter& l);

/// Left-factors unions: alternatives that start with the same term are merged
/// into `head (rest1 + rest2 ...)`, recursively. The language is unchanged.
MoveRegex factor_common_prefixes(const MoveRegex& r);

}  // namespace sbg
