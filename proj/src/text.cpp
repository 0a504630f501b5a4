#include "sbg/text.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <sstream>
#include <vector>

namespace sbg {

std::string ParseError::diagnostic(std::string_view file) const {
  std::ostringstream os;
  os << file << ':' << line_ << ':' << column_ << ": " << what();
  return os.str();
}

PieceClass infer_class(const MoveRegex& moves, int width, int height) {
  const int m = mobility(moves, width, height);
  if (m <= 3) return PieceClass::Weak;
  if (m <= 8) return PieceClass::Light;
  return PieceClass::Strong;
}

namespace {

class RegexParser {
 public:
  RegexParser(std::string_view text, int line, int column_offset)
      : text_(text), line_(line), offset_(column_offset) {}

  MoveRegex parse_all() {
    MoveRegex r = parse_union();
    skip_space();
    if (pos_ != text_.size()) fail("expected '+', '(' or end of expression");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_, offset_ + static_cast<int>(pos_) + 1, msg);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  int parse_int() {
    skip_space();
    const std::size_t start = pos_;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    int value = 0;
    const char* b = text_.data() + start;
    if (pos_ > start && *b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_ || pos_ == start) {
      pos_ = start;
      fail("expected integer");
    }
    return value;
  }

  MoveRegex parse_union() {
    std::vector<MoveRegex> alts{parse_seq()};
    while (peek('+')) {
      ++pos_;
      alts.push_back(parse_seq());
    }
    return MoveRegex::alt(std::move(alts));
  }

  MoveRegex parse_seq() {
    std::vector<MoveRegex> terms{parse_term()};
    while (peek('(')) terms.push_back(parse_term());
    return MoveRegex::concat(std::move(terms));
  }

  MoveRegex parse_term() {
    MoveRegex a = parse_atom();
    if (peek('*')) {
      ++pos_;
      return MoveRegex::star(std::move(a));
    }
    if (peek('^')) {
      ++pos_;
      const std::size_t at = pos_;
      const int n = parse_int();
      if (n < 1) {
        pos_ = at;
        fail("power exponent must be at least 1");
      }
      return MoveRegex::power(std::move(a), n);
    }
    return a;
  }

  MoveRegex parse_atom() {
    expect('(');
    skip_space();
    if (pos_ < text_.size() &&
        (text_[pos_] == '-' || text_[pos_] == '+' || std::isdigit(static_cast<unsigned char>(text_[pos_])))) {
      Letter l;
      l.dx = parse_int();
      expect(',');
      l.dy = parse_int();
      expect(',');
      skip_space();
      if (pos_ >= text_.size()) fail("expected one of 'e', 'p', 'w'");
      switch (text_[pos_]) {
        case 'e':
          l.on = OnClass::Empty;
          break;
        case 'p':
          l.on = OnClass::Opponent;
          break;
        case 'w':
          l.on = OnClass::Own;
          break;
        default:
          fail("expected one of 'e', 'p', 'w'");
      }
      ++pos_;
      expect(')');
      return MoveRegex::atom(l);
    }
    MoveRegex inner = parse_union();
    expect(')');
    return inner;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
  int offset_;
};

struct Token {
  std::string_view text;
  int column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

int parse_positive(const Token& t, int line, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
  if (ec != std::errc() || ptr != t.text.data() + t.text.size() || v < 1)
    throw ParseError(line, t.column, std::string("expected positive integer for ") + what);
  return v;
}

char parse_symbol(const Token& t, int line) {
  if (t.text.size() != 1 || t.text[0] < 'A' || t.text[0] > 'Z')
    throw ParseError(line, t.column, "expected uppercase piece symbol");
  return t.text[0];
}

struct PieceLine {
  int line;
  int column;
};

}  // namespace

MoveRegex parse_regex(std::string_view text) { return RegexParser(text, 1, 0).parse_all(); }

GameSpec parse_sbg(std::string_view text) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view l = text.substr(start, end - start);
      if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
      if (auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
      lines.push_back(l);
      if (end == text.size()) break;
      start = end + 1;
    }
  }

  GameSpec g;
  bool have_game = false, have_board = false, have_turnlimit = false;
  struct AsymLine {
    char symbol;
    MoveRegex moves;
    PieceLine pos;
  };
  std::vector<AsymLine> asym_lines;
  std::vector<PieceLine> win_lines;
  std::vector<std::vector<PieceLine>> square_pos;  // for undefined-symbol diagnostics
  std::vector<std::optional<PieceClass>> explicit_class;

  const int n = static_cast<int>(lines.size());
  for (int i = 0; i < n; ++i) {
    const int lineno = i + 1;
    auto toks = tokenize(lines[static_cast<std::size_t>(i)]);
    if (toks.empty()) continue;
    const std::string_view kw = toks[0].text;

    auto need = [&](std::size_t count, const char* usage) {
      if (toks.size() != count)
        throw ParseError(lineno, toks.size() > count ? toks[count].column : toks.back().column,
                         std::string("expected ") + usage);
    };

    if (kw == "game") {
      if (have_game) throw ParseError(lineno, 1, "duplicate 'game' line");
      need(2, "'game <name>'");
      g.name = std::string(toks[1].text);
      have_game = true;
    } else if (kw == "board") {
      if (have_board) throw ParseError(lineno, 1, "duplicate 'board' section");
      need(3, "'board <width> <height>'");
      g.width = parse_positive(toks[1], lineno, "width");
      g.height = parse_positive(toks[2], lineno, "height");
      if (g.width > 64 || g.height > 64) throw ParseError(lineno, toks[1].column, "board dimensions above 64");
      g.initial.assign(static_cast<std::size_t>(g.width * g.height), Occupant{});
      square_pos.assign(static_cast<std::size_t>(g.height), std::vector<PieceLine>(static_cast<std::size_t>(g.width)));
      int rows_read = 0;
      while (rows_read < g.height) {
        ++i;
        if (i >= n) throw ParseError(n, 1, "expected " + std::to_string(g.height - rows_read) + " more board rows");
        auto row = tokenize(lines[static_cast<std::size_t>(i)]);
        if (row.empty()) continue;
        const int rl = i + 1;
        if (static_cast<int>(row.size()) != g.width)
          throw ParseError(rl, row.front().column,
                           "expected board row of " + std::to_string(g.width) + " squares");
        const int y = g.height - rows_read;
        for (int x = 1; x <= g.width; ++x) {
          const Token& t = row[static_cast<std::size_t>(x - 1)];
          if (t.text.size() != 1 || !(t.text[0] == '.' || std::isalpha(static_cast<unsigned char>(t.text[0]))))
            throw ParseError(rl, t.column, "expected '.', uppercase or lowercase piece letter");
          const char c = t.text[0];
          Occupant o;
          if (c != '.') {
            o.symbol = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            o.owner = std::isupper(static_cast<unsigned char>(c)) ? Side::White : Side::Black;
          }
          g.at(Square{x, y}) = o;
          square_pos[static_cast<std::size_t>(y - 1)][static_cast<std::size_t>(x - 1)] = {rl, t.column};
        }
        ++rows_read;
      }
      have_board = true;
    } else if (kw == "piece") {
      if (toks.size() < 3) throw ParseError(lineno, toks.back().column, "expected 'piece <SYMBOL> [class] <regex>'");
      PieceDef p;
      p.symbol = parse_symbol(toks[1], lineno);
      if (g.find_piece(p.symbol))
        throw ParseError(lineno, toks[1].column, std::string("piece ") + p.symbol + " defined twice");
      std::size_t regex_tok = 2;
      std::optional<PieceClass> cls;
      if (toks[2].text == "weak") cls = PieceClass::Weak;
      if (toks[2].text == "light") cls = PieceClass::Light;
      if (toks[2].text == "strong") cls = PieceClass::Strong;
      if (cls) {
        regex_tok = 3;
        if (toks.size() < 4) throw ParseError(lineno, toks.back().column, "expected move regex after class");
      }
      const int col = toks[regex_tok].column;
      const std::string_view rest = lines[static_cast<std::size_t>(i)].substr(static_cast<std::size_t>(col - 1));
      p.moves_white = RegexParser(rest, lineno, col - 1).parse_all();
      p.moves_black = rotated_180(p.moves_white);
      try {
        (void)compile_regex(p.moves_white);
      } catch (const RegexError& e) {
        throw ParseError(lineno, col, e.what());
      }
      g.pieces.push_back(std::move(p));
      explicit_class.push_back(cls);
    } else if (kw == "asym") {
      if (toks.size() < 3) throw ParseError(lineno, toks.back().column, "expected 'asym <SYMBOL> <regex>'");
      const char sym = parse_symbol(toks[1], lineno);
      for (const auto& a : asym_lines)
        if (a.symbol == sym) throw ParseError(lineno, toks[1].column, std::string("duplicate asym rules for ") + sym);
      const int col = toks[2].column;
      const std::string_view rest = lines[static_cast<std::size_t>(i)].substr(static_cast<std::size_t>(col - 1));
      MoveRegex black = RegexParser(rest, lineno, col - 1).parse_all();
      try {
        (void)compile_regex(black);
      } catch (const RegexError& e) {
        throw ParseError(lineno, col, e.what());
      }
      asym_lines.push_back({sym, std::move(black), {lineno, toks[1].column}});
    } else if (kw == "turnlimit") {
      if (have_turnlimit) throw ParseError(lineno, 1, "duplicate 'turnlimit' line");
      need(2, "'turnlimit <plies>'");
      g.turnlimit = parse_positive(toks[1], lineno, "turnlimit");
      have_turnlimit = true;
    } else if (kw == "win") {
      need(4, "'win <white|black> <reach|capture> <SYMBOL>'");
      WinCondition c;
      if (toks[1].text == "white") {
        c.side = Side::White;
      } else if (toks[1].text == "black") {
        c.side = Side::Black;
      } else {
        throw ParseError(lineno, toks[1].column, "expected 'white' or 'black'");
      }
      if (toks[2].text == "reach") {
        c.kind = WinKind::Reach;
      } else if (toks[2].text == "capture") {
        c.kind = WinKind::CaptureAll;
      } else {
        throw ParseError(lineno, toks[2].column, "expected 'reach' or 'capture'");
      }
      c.piece = parse_symbol(toks[3], lineno);
      g.conditions.push_back(c);
      win_lines.push_back({lineno, toks[3].column});
    } else {
      throw ParseError(lineno, toks[0].column,
                       "expected one of 'game', 'board', 'piece', 'asym', 'turnlimit', 'win'");
    }
  }

  const int eof_line = n;
  if (!have_game) throw ParseError(eof_line, 1, "missing 'game' line");
  if (!have_board) throw ParseError(eof_line, 1, "missing 'board' section");
  if (!have_turnlimit) throw ParseError(eof_line, 1, "missing 'turnlimit' line");

  // asym lines may precede or follow the piece they override.
  for (const auto& a : asym_lines) {
    const int k = g.piece_index(a.symbol);
    if (k < 0) throw ParseError(a.pos.line, a.pos.column, std::string("asym rules for undefined piece ") + a.symbol);
    g.pieces[static_cast<std::size_t>(k)].moves_black = a.moves;
  }
  if (g.pieces.empty()) throw ParseError(eof_line, 1, "missing 'piece' section");
  for (std::size_t k = 0; k < g.pieces.size(); ++k)
    g.pieces[k].piece_class = explicit_class[k] ? *explicit_class[k] : infer_class(g.pieces[k].moves_white, g.width, g.height);

  for (int y = 1; y <= g.height; ++y) {
    for (int x = 1; x <= g.width; ++x) {
      const auto& o = g.at(Square{x, y});
      if (!o.empty() && !g.find_piece(o.symbol)) {
        const auto& p = square_pos[static_cast<std::size_t>(y - 1)][static_cast<std::size_t>(x - 1)];
        throw ParseError(p.line, p.column, std::string("undefined piece ") + o.symbol);
      }
    }
  }
  for (std::size_t k = 0; k < g.conditions.size(); ++k) {
    const auto& c = g.conditions[k];
    if (!g.find_piece(c.piece))
      throw ParseError(win_lines[k].line, win_lines[k].column, std::string("undefined piece ") + c.piece);
  }

  try {
    validate(g);
  } catch (const ValidationError& e) {
    const int line = win_lines.empty() ? 1 : win_lines.front().line;
    throw ParseError(line, 1, e.what());
  }
  return g;
}

std::string serialize_sbg(const GameSpec& g) {
  std::ostringstream os;
  os << "game " << g.name << '\n';
  os << "board " << g.width << ' ' << g.height << '\n';
  for (int y = g.height; y >= 1; --y) {
    for (int x = 1; x <= g.width; ++x) {
      const auto& o = g.at(Square{x, y});
      if (x > 1) os << ' ';
      if (o.empty()) {
        os << '.';
      } else {
        os << (o.owner == Side::White ? o.symbol
                                      : static_cast<char>(std::tolower(static_cast<unsigned char>(o.symbol))));
      }
    }
    os << '\n';
  }
  for (const auto& p : g.pieces)
    os << "piece " << p.symbol << ' ' << class_name(p.piece_class) << ' ' << to_string(p.moves_white) << '\n';
  for (const auto& p : g.pieces)
    if (p.asymmetric()) os << "asym " << p.symbol << ' ' << to_string(p.moves_black) << '\n';
  os << "turnlimit " << g.turnlimit << '\n';
  for (const auto& c : g.conditions)
    os << "win " << side_name(c.side) << ' ' << (c.kind == WinKind::Reach ? "reach" : "capture") << ' ' << c.piece
       << '\n';
  return os.str();
}

}  // namespace sbg
