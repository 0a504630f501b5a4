#include "sbg/game.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>

namespace sbg {

const char* side_name(Side s) { return s == Side::White ? "white" : "black"; }

const char* class_name(PieceClass c) {
  switch (c) {
    case PieceClass::Weak:
      return "weak";
    case PieceClass::Light:
      return "light";
    case PieceClass::Strong:
      return "strong";
  }
  return "?";
}

const char* status_name(Status s) {
  switch (s) {
    case Status::Ongoing:
      return "ongoing";
    case Status::WhiteWins:
      return "white";
    case Status::BlackWins:
      return "black";
    case Status::Draw:
      return "draw";
  }
  return "?";
}

PieceDef make_piece(char symbol, PieceClass cls, MoveRegex white_moves) {
  PieceDef p;
  p.symbol = symbol;
  p.piece_class = cls;
  p.moves_black = rotated_180(white_moves);
  p.moves_white = std::move(white_moves);
  return p;
}

const PieceDef* GameSpec::find_piece(char symbol) const {
  for (const auto& p : pieces)
    if (p.symbol == symbol) return &p;
  return nullptr;
}

int GameSpec::piece_index(char symbol) const {
  for (std::size_t i = 0; i < pieces.size(); ++i)
    if (pieces[i].symbol == symbol) return static_cast<int>(i);
  return -1;
}

GameSpec make_empty_spec(std::string name, int width, int height, int turnlimit) {
  GameSpec g;
  g.name = std::move(name);
  g.width = width;
  g.height = height;
  g.turnlimit = turnlimit;
  g.initial.assign(static_cast<std::size_t>(width * height), Occupant{});
  return g;
}

Cell make_cell(int piece, Side owner) {
  const int v = piece + 1;
  return static_cast<Cell>(owner == Side::White ? v : -v);
}

void validate(const GameSpec& g) {
  constexpr int kMaxDim = 64;
  if (g.width < 1 || g.height < 1 || g.width > kMaxDim || g.height > kMaxDim)
    throw ValidationError("board dimensions must be between 1 and 64");
  if (g.initial.size() != static_cast<std::size_t>(g.width * g.height))
    throw ValidationError("initial position does not match board dimensions");
  if (g.turnlimit < 1) throw ValidationError("turnlimit must be positive");
  if (g.name.empty() || g.name.find_first_of(" \t\r\n#") != std::string::npos)
    throw ValidationError("game name must be a single non-empty token");

  if (g.pieces.empty()) throw ValidationError("at least one piece type must be defined");
  for (std::size_t i = 0; i < g.pieces.size(); ++i) {
    const auto& p = g.pieces[i];
    if (p.symbol < 'A' || p.symbol > 'Z')
      throw ValidationError(std::string("piece symbol must be an uppercase letter, got '") + p.symbol + "'");
    for (std::size_t j = 0; j < i; ++j)
      if (g.pieces[j].symbol == p.symbol)
        throw ValidationError(std::string("piece ") + p.symbol + " defined twice");
    try {
      (void)compile_regex(p.moves_white);
      (void)compile_regex(p.moves_black);
    } catch (const RegexError& e) {
      throw ValidationError(std::string("piece ") + p.symbol + ": " + e.what());
    }
  }

  for (const auto& o : g.initial)
    if (!o.empty() && g.find_piece(o.symbol) == nullptr)
      throw ValidationError(std::string("board uses undefined piece ") + o.symbol);

  for (const auto& c : g.conditions) {
    if (g.find_piece(c.piece) == nullptr)
      throw ValidationError(std::string("winning condition references undefined piece ") + c.piece);
    if (c.kind == WinKind::CaptureAll) {
      const Side victim = opponent(c.side);
      const bool present = std::any_of(g.initial.begin(), g.initial.end(), [&](const Occupant& o) {
        return !o.empty() && o.symbol == c.piece && o.owner == victim;
      });
      if (!present)
        throw ValidationError(std::string("capture condition for ") + side_name(c.side) + " on " + c.piece +
                              " but " + side_name(victim) + " has no such piece");
    }
  }
}

Game::Game(GameSpec spec) : spec_(std::move(spec)) {
  validate(spec_);
  symbol_to_piece_.assign(26, -1);
  for (std::size_t i = 0; i < spec_.pieces.size(); ++i) {
    const auto& p = spec_.pieces[i];
    symbol_to_piece_[static_cast<std::size_t>(p.symbol - 'A')] = static_cast<int>(i);
    automata_.push_back(compile_regex(p.moves_white));
    automata_.push_back(compile_regex(p.moves_black));
  }
}

GameState Game::initial_state() const {
  GameState s;
  s.board.assign(spec_.initial.size(), 0);
  s.counts.assign(static_cast<std::size_t>(2 * piece_count()), 0);
  for (std::size_t i = 0; i < spec_.initial.size(); ++i) {
    const auto& o = spec_.initial[i];
    if (o.empty()) continue;
    const int k = symbol_to_piece_[static_cast<std::size_t>(o.symbol - 'A')];
    s.board[i] = make_cell(k, o.owner);
    ++s.counts[static_cast<std::size_t>(side_index(o.owner) * piece_count() + k)];
  }
  return s;
}

namespace {

bool content_matches(Cell c, OnClass on, Side mover) {
  switch (on) {
    case OnClass::Empty:
      return c == 0;
    case OnClass::Opponent:
      return c != 0 && cell_owner(c) != mover;
    case OnClass::Own:
      return c != 0 && cell_owner(c) == mover;
  }
  return false;
}

struct SearchNode {
  int square;
  int state;
  int parent;
  Letter letter;
};

// Per-thread BFS buffers; visit marks use a stamp so they never need clearing.
struct BfsScratch {
  std::vector<std::uint32_t> visited;
  std::vector<std::uint32_t> found;
  std::vector<SearchNode> nodes;
  std::uint32_t stamp = 0;

  void begin(std::size_t node_slots, std::size_t squares) {
    if (visited.size() < node_slots) visited.assign(node_slots, 0);
    if (found.size() < squares) found.assign(squares, 0);
    if (++stamp == 0) {
      std::fill(visited.begin(), visited.end(), 0);
      std::fill(found.begin(), found.end(), 0);
      stamp = 1;
    }
    nodes.clear();
  }
};

thread_local BfsScratch g_scratch;

}  // namespace

void Game::append_piece_moves(const GameState& state, Square origin, int piece, bool with_words,
                              std::vector<Move>& out) const {
  const Side mover = state.to_move;
  const MoveAutomaton& a = automaton(piece, mover);
  const int w = spec_.width;
  const int h = spec_.height;
  const int squares = w * h;
  const int origin_index = static_cast<int>(spec_.index(origin));

  BfsScratch& sc = g_scratch;
  sc.begin(static_cast<std::size_t>(squares * a.state_count()), static_cast<std::size_t>(squares));
  sc.nodes.push_back({origin_index, MoveAutomaton::kStart, -1, {}});
  sc.visited[static_cast<std::size_t>(origin_index * a.state_count())] = sc.stamp;

  for (std::size_t head = 0; head < sc.nodes.size(); ++head) {
    const SearchNode node = sc.nodes[head];
    const int x = node.square % w;
    const int y = node.square / w;
    for (const auto& t : a.transitions(node.state)) {
      const int nx = x + t.letter.dx;
      const int ny = y + t.letter.dy;
      if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
      const int sq = ny * w + nx;
      if (!content_matches(state.board[static_cast<std::size_t>(sq)], t.letter.on, mover)) continue;
      auto& mark = sc.visited[static_cast<std::size_t>(sq * a.state_count() + t.target)];
      if (mark == sc.stamp) continue;
      mark = sc.stamp;
      const int id = static_cast<int>(sc.nodes.size());
      sc.nodes.push_back({sq, t.target, static_cast<int>(head), t.letter});
      if (!a.accepting(t.target) || sq == origin_index) continue;
      if (sc.found[static_cast<std::size_t>(sq)] == sc.stamp) continue;
      sc.found[static_cast<std::size_t>(sq)] = sc.stamp;
      Move m;
      m.origin = origin;
      m.destination = Square{nx + 1, ny + 1};
      if (with_words) {
        for (int n = id; sc.nodes[static_cast<std::size_t>(n)].parent >= 0;
             n = sc.nodes[static_cast<std::size_t>(n)].parent)
          m.word.push_back(sc.nodes[static_cast<std::size_t>(n)].letter);
        std::reverse(m.word.begin(), m.word.end());
      }
      out.push_back(std::move(m));
    }
  }
}

std::vector<Move> Game::legal_moves(const GameState& state, bool with_words) const {
  std::vector<Move> out;
  for (int x = 1; x <= spec_.width; ++x) {
    for (int y = 1; y <= spec_.height; ++y) {
      const Square sq{x, y};
      const Cell c = cell(state, sq);
      if (c == 0 || cell_owner(c) != state.to_move) continue;
      const std::size_t first = out.size();
      append_piece_moves(state, sq, cell_piece(c), with_words, out);
      std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end());
    }
  }
  return out;
}

int Game::moving_piece(const GameState& state, const Move& m) const {
  return cell_piece(cell(state, m.origin));
}

GameState Game::apply_move_unchecked(const GameState& state, const Move& m) const {
  GameState next = state;
  const std::size_t from = spec_.index(m.origin);
  const std::size_t to = spec_.index(m.destination);
  const Cell moving = next.board[from];
  const Cell captured = next.board[to];
  if (captured != 0)
    --next.counts[static_cast<std::size_t>(side_index(cell_owner(captured)) * piece_count() + cell_piece(captured))];
  next.board[to] = moving;
  next.board[from] = 0;
  next.to_move = opponent(state.to_move);
  ++next.ply;
  return next;
}

GameState Game::apply_move(const GameState& state, const Move& m) const {
  if (!spec_.on_board(m.origin) || !spec_.on_board(m.destination))
    throw IllegalMove("move leaves the board");
  const auto moves = legal_moves(state, false);
  if (!std::binary_search(moves.begin(), moves.end(), m))
    throw IllegalMove("move is not legal in this state");
  return apply_move_unchecked(state, m);
}

int Game::total(const GameState& state, Side side) const {
  int n = 0;
  for (int k = 0; k < piece_count(); ++k) n += count(state, side, k);
  return n;
}

bool Game::condition_holds(const GameState& state, const WinCondition& c) const {
  const int k = symbol_to_piece_[static_cast<std::size_t>(c.piece - 'A')];
  if (c.kind == WinKind::CaptureAll) return count(state, opponent(c.side), k) == 0;
  const int row = c.side == Side::White ? spec_.height : 1;
  const Cell want = make_cell(k, c.side);
  for (int x = 1; x <= spec_.width; ++x)
    if (cell(state, Square{x, row}) == want) return true;
  return false;
}

namespace {
Status win_for(Side s) { return s == Side::White ? Status::WhiteWins : Status::BlackWins; }
}  // namespace

std::optional<Status> Game::decided_before_moves(const GameState& state) const {
  const Side mover = opponent(state.to_move);
  const Side next = state.to_move;
  for (const auto& c : spec_.conditions)
    if (c.side == mover && condition_holds(state, c)) return win_for(mover);
  for (const auto& c : spec_.conditions)
    if (c.side == next && condition_holds(state, c)) return win_for(next);
  if (total(state, next) == 0) return win_for(mover);
  if (state.ply >= spec_.turnlimit) return Status::Draw;
  return std::nullopt;
}

Status Game::status(const GameState& state, const std::vector<Move>& moves) const {
  if (auto s = decided_before_moves(state)) return *s;
  return moves.empty() ? win_for(opponent(state.to_move)) : Status::Ongoing;
}

Status Game::status(const GameState& state) const {
  if (auto s = decided_before_moves(state)) return *s;
  return legal_moves(state, false).empty() ? win_for(opponent(state.to_move)) : Status::Ongoing;
}

std::uint64_t Game::perft(const GameState& state, int depth) const {
  if (depth <= 0) return 1;
  const auto moves = legal_moves(state, false);
  if (status(state, moves) != Status::Ongoing) return 0;
  if (depth == 1) return moves.size();
  std::uint64_t n = 0;
  for (const auto& m : moves) n += perft(apply_move_unchecked(state, m), depth - 1);
  return n;
}

int mobility(const MoveRegex& r, int width, int height) {
  const MoveAutomaton a = compile_regex(r);
  const int cx = (width - 1) / 2;
  const int cy = (height - 1) / 2;
  const int origin = cy * width + cx;
  const int max_len = width + height;
  const int states = a.state_count();

  std::vector<char> visited(static_cast<std::size_t>(width * height * states), 0);
  std::vector<char> dest(static_cast<std::size_t>(width * height), 0);
  std::vector<std::pair<int, int>> frontier{{origin, MoveAutomaton::kStart}};
  visited[static_cast<std::size_t>(origin * states)] = 1;
  int count = 0;
  for (int len = 1; len <= max_len && !frontier.empty(); ++len) {
    std::vector<std::pair<int, int>> next;
    for (const auto& [sq, st] : frontier) {
      for (const auto& t : a.transitions(st)) {
        const int nx = sq % width + t.letter.dx;
        const int ny = sq / width + t.letter.dy;
        if (nx < 0 || nx >= width || ny < 0 || ny >= height) continue;
        const int nsq = ny * width + nx;
        if (nsq == origin && t.letter.on != OnClass::Own) continue;
        auto& v = visited[static_cast<std::size_t>(nsq * states + t.target)];
        if (v) continue;
        v = 1;
        next.emplace_back(nsq, t.target);
        if (a.accepting(t.target) && nsq != origin && !dest[static_cast<std::size_t>(nsq)]) {
          dest[static_cast<std::size_t>(nsq)] = 1;
          ++count;
        }
      }
    }
    frontier = std::move(next);
  }
  return count;
}

}  // namespace sbg
