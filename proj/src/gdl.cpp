#include "sbg/gdl.hpp"

#include <algorithm>
#include <cctype>

namespace sbg::gdl {

Term Term::constant(std::string name) { return Term{Kind::Constant, std::move(name), {}}; }
Term Term::variable(std::string name) { return Term{Kind::Variable, std::move(name), {}}; }
Term Term::compound(std::string functor, std::vector<Term> args) {
  return Term{Kind::Compound, std::move(functor), std::move(args)};
}

bool Term::ground() const {
  if (kind == Kind::Variable) return false;
  return std::all_of(args.begin(), args.end(), [](const Term& a) { return a.ground(); });
}

bool operator==(const Term& a, const Term& b) { return a.kind == b.kind && a.name == b.name && a.args == b.args; }

bool operator<(const Term& a, const Term& b) {
  if (a.kind != b.kind) return a.kind < b.kind;
  if (a.name != b.name) return a.name < b.name;
  return std::lexicographical_compare(a.args.begin(), a.args.end(), b.args.begin(), b.args.end());
}

bool operator==(const Literal& a, const Literal& b) {
  return a.kind == b.kind && a.atom == b.atom && a.rhs == b.rhs;
}

bool operator==(const Rule& a, const Rule& b) { return a.head == b.head && a.body == b.body; }

std::size_t Document::body_atoms() const {
  std::size_t n = 0;
  for (const auto& r : rules) n += r.body.size();
  return n;
}

std::string to_kif(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Constant:
      return t.name;
    case Term::Kind::Variable:
      return "?" + t.name;
    case Term::Kind::Compound:
      break;
  }
  std::string s = "(" + t.name;
  for (const auto& a : t.args) s += " " + to_kif(a);
  return s + ")";
}

std::string to_kif(const Literal& l) {
  switch (l.kind) {
    case Literal::Kind::Positive:
      return to_kif(l.atom);
    case Literal::Kind::Negative:
      return "(not " + to_kif(l.atom) + ")";
    case Literal::Kind::Distinct:
      break;
  }
  return "(distinct " + to_kif(l.atom) + " " + to_kif(l.rhs) + ")";
}

std::string to_kif(const Rule& r) {
  if (r.body.empty()) return to_kif(r.head);
  std::string s = "(<= " + to_kif(r.head);
  for (const auto& l : r.body) s += " " + to_kif(l);
  return s + ")";
}

std::string emit_kif(const Document& doc) {
  std::string out;
  for (const auto& r : doc.rules) out += to_kif(r) + "\n";
  return out;
}

KifSyntaxError::KifSyntaxError(const std::string& message, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

namespace {

// S-expression tree with source positions.
struct Sexp {
  bool list = false;
  std::string atom;
  std::vector<Sexp> items;
  int line = 1;
  int column = 1;
};

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  std::vector<Sexp> read_all() {
    std::vector<Sexp> out;
    for (skip(); pos_ < text_.size(); skip()) out.push_back(read());
    return out;
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  Sexp read() {
    Sexp s;
    s.line = line_;
    s.column = col_;
    const char c = text_[pos_];
    if (c == ')') throw KifSyntaxError("unexpected ')'", line_, col_);
    if (c == '(') {
      s.list = true;
      advance();
      for (;;) {
        skip();
        if (pos_ >= text_.size()) throw KifSyntaxError("unterminated list", s.line, s.column);
        if (text_[pos_] == ')') {
          advance();
          return s;
        }
        s.items.push_back(read());
      }
    }
    while (pos_ < text_.size()) {
      const char d = text_[pos_];
      if (d == '(' || d == ')' || d == ';' || std::isspace(static_cast<unsigned char>(d))) break;
      s.atom += d;
      advance();
    }
    return s;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

Term to_term(const Sexp& s) {
  if (!s.list) {
    if (s.atom[0] == '?') {
      if (s.atom.size() == 1) throw KifSyntaxError("empty variable name", s.line, s.column);
      return Term::variable(s.atom.substr(1));
    }
    return Term::constant(s.atom);
  }
  if (s.items.empty()) throw KifSyntaxError("empty list", s.line, s.column);
  const Sexp& f = s.items.front();
  if (f.list || f.atom[0] == '?') throw KifSyntaxError("expected a relation or function name", f.line, f.column);
  std::vector<Term> args;
  for (std::size_t i = 1; i < s.items.size(); ++i) args.push_back(to_term(s.items[i]));
  return Term::compound(f.atom, std::move(args));
}

bool is_keyword(const Sexp& s, const char* word) {
  return s.list && !s.items.empty() && !s.items.front().list && s.items.front().atom == word;
}

Literal to_literal(const Sexp& s) {
  if (is_keyword(s, "not")) {
    if (s.items.size() != 2) throw KifSyntaxError("'not' takes one argument", s.line, s.column);
    return Literal::negative(to_term(s.items[1]));
  }
  if (is_keyword(s, "distinct")) {
    if (s.items.size() != 3) throw KifSyntaxError("'distinct' takes two arguments", s.line, s.column);
    return Literal::distinct(to_term(s.items[1]), to_term(s.items[2]));
  }
  if (is_keyword(s, "or")) throw KifSyntaxError("'or' is not supported", s.line, s.column);
  const Term t = to_term(s);
  if (t.is_variable()) throw KifSyntaxError("a literal cannot be a variable", s.line, s.column);
  return Literal::positive(t);
}

}  // namespace

Document parse_document(const std::string& text) {
  Document doc;
  for (const Sexp& form : Reader(text).read_all()) {
    Rule r;
    if (is_keyword(form, "<=")) {
      if (form.items.size() < 2) throw KifSyntaxError("rule without head", form.line, form.column);
      r.head = to_term(form.items[1]);
      for (std::size_t i = 2; i < form.items.size(); ++i) r.body.push_back(to_literal(form.items[i]));
    } else {
      r.head = to_term(form);
    }
    if (r.head.is_variable()) throw KifSyntaxError("a rule head cannot be a variable", form.line, form.column);
    doc.rules.push_back(std::move(r));
  }
  return doc;
}

void collect_variables(const Term& t, std::vector<std::string>& out) {
  if (t.is_variable()) {
    if (std::find(out.begin(), out.end(), t.name) == out.end()) out.push_back(t.name);
    return;
  }
  for (const auto& a : t.args) collect_variables(a, out);
}

}  // namespace sbg::gdl
