#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "sbg/game.hpp"

namespace sbg {

/// Syntax or semantic error in a .sbg document, with a 1-based position.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message)
      : std::runtime_error(message), line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

  /// `file:line:col: message`
  std::string diagnostic(std::string_view file) const;

 private:
  int line_;
  int column_;
};

/// Parses and validates a .sbg document.
///
/// Line-oriented grammar, `#` starts a comment:
///
///     game <name>
///     board <width> <height>
///     <height rows, top row first: '.' empty, uppercase white, lowercase black>
///     piece <SYMBOL> [weak|light|strong] <regex>
///     asym <SYMBOL> <regex>          # black's rules in board coordinates
///     turnlimit <plies>
///     win <white|black> <reach|capture> <SYMBOL>
///
/// Regexes: `regex := seq ('+' seq)*`, `seq := term+`,
/// `term := atom ('*' | '^' int)?`,
/// `atom := '(' int ',' int ',' (e|p|w) ')' | '(' regex ')'`.
/// A piece without an explicit class is classified by its mobility.
GameSpec parse_sbg(std::string_view text);

/// Parses a regex on its own; errors report line 1.
MoveRegex parse_regex(std::string_view text);

/// Canonical document. parse_sbg(serialize_sbg(g)) == g for every valid g.
std::string serialize_sbg(const GameSpec& g);

/// Mobility-based class used when a document omits the class keyword.
PieceClass infer_class(const MoveRegex& moves, int width, int height);

}  // namespace sbg
