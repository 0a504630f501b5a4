#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbg::gdl {

/// KIF term: constant, variable (name stored without the `?`) or compound.
struct Term {
  enum class Kind : unsigned char { Constant, Variable, Compound };

  Kind kind = Kind::Constant;
  std::string name;
  std::vector<Term> args;

  static Term constant(std::string name);
  static Term number(long value) { return constant(std::to_string(value)); }
  static Term variable(std::string name);
  static Term compound(std::string functor, std::vector<Term> args);

  bool is_variable() const { return kind == Kind::Variable; }
  bool ground() const;
};

bool operator==(const Term& a, const Term& b);
inline bool operator!=(const Term& a, const Term& b) { return !(a == b); }
/// Total order: kind, then name, then arguments.
bool operator<(const Term& a, const Term& b);

struct Literal {
  enum class Kind : unsigned char { Positive, Negative, Distinct };

  Kind kind = Kind::Positive;
  Term atom;  // for Distinct: left operand
  Term rhs;   // for Distinct: right operand

  static Literal positive(Term atom) { return {Kind::Positive, std::move(atom), {}}; }
  static Literal negative(Term atom) { return {Kind::Negative, std::move(atom), {}}; }
  static Literal distinct(Term a, Term b) { return {Kind::Distinct, std::move(a), std::move(b)}; }
};

bool operator==(const Literal& a, const Literal& b);

struct Rule {
  Term head;
  std::vector<Literal> body;  // empty for facts
};

bool operator==(const Rule& a, const Rule& b);

struct Document {
  std::vector<Rule> rules;

  /// Literals over all rule bodies.
  std::size_t body_atoms() const;
  bool operator==(const Document&) const = default;
};

std::string to_kif(const Term& t);
std::string to_kif(const Literal& l);
std::string to_kif(const Rule& r);

/// One form per line, in document order.
std::string emit_kif(const Document& doc);

class KifSyntaxError : public std::runtime_error {
 public:
  KifSyntaxError(const std::string& message, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Structural parse of the KIF subset emit_kif produces: facts, `<=` rules,
/// `not` and `distinct` literals, `;` comments.
Document parse_document(const std::string& text);

/// Variables of `t` in first-occurrence order, without duplicates.
void collect_variables(const Term& t, std::vector<std::string>& out);

}  // namespace sbg::gdl
