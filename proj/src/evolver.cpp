#include "sbg/evolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "sbg/parallel.hpp"
#include "sbg/text.hpp"

namespace sbg {

namespace {

// Seed stream tags; see derive_seed.
enum Stream : std::uint64_t { kPool = 1, kInitial, kEval, kCross, kMutate, kRestart };

void check_probability(double p, const char* name) {
  if (!(p >= 0 && p <= 1)) throw ConfigError(std::string(name) + " must be a probability in [0, 1]");
}

}  // namespace

void validate(const GeneratorConfig& c) {
  if (c.width < 1 || c.height < 2 || c.width > 64 || c.height > 64)
    throw ConfigError("board must be 1..64 wide and 2..64 high");
  if (c.turnlimit < 1) throw ConfigError("turnlimit must be positive");
  for (int n : {c.weak_pieces, c.light_pieces, c.strong_pieces})
    if (n < 0 || n > 5) throw ConfigError("piece counts per class must be in 0..5");
  if (c.weak_pieces + c.light_pieces + c.strong_pieces < 1) throw ConfigError("at least one piece type is required");
  if (c.displacement_radius < 1) throw ConfigError("displacement_radius must be positive");
  if (!(c.letter_decay > 0)) throw ConfigError("letter_decay must be positive");
  if (c.word_length_weights.empty()) throw ConfigError("word_length_weights must not be empty");
  double total = 0;
  for (double w : c.word_length_weights) {
    if (!(w >= 0)) throw ConfigError("word_length_weights must be non-negative");
    total += w;
  }
  if (!(total > 0)) throw ConfigError("word_length_weights must not all be zero");
  if (!(c.p_on_empty >= 0 && c.p_on_opponent >= 0 && c.p_on_own >= 0) ||
      !(c.p_on_empty + c.p_on_opponent + c.p_on_own > 0))
    throw ConfigError("on-class probabilities must be non-negative and not all zero");
  const std::pair<double, const char*> probs[] = {
      {c.p_hmirror, "p_hmirror"},         {c.p_vmirror, "p_vmirror"},
      {c.p_rotation, "p_rotation"},       {c.p_star, "p_star"},
      {c.p_fill, "p_fill"},               {c.strong_back, "strong_back"},
      {c.strong_front, "strong_front"},   {c.light_share, "light_share"},
      {c.p_mirror_change, "p_mirror_change"}, {c.p_black_regen, "p_black_regen"},
      {c.p_condition, "p_condition"},     {c.p_extra_condition, "p_extra_condition"},
      {c.p_reach, "p_reach"},             {c.p_asymmetric_conditions, "p_asymmetric_conditions"},
  };
  for (const auto& [p, name] : probs) check_probability(p, name);
  if (c.pool_blocks_per_class < 1) throw ConfigError("pool_blocks_per_class must be positive");
  if (c.max_blocks_per_piece < 1) throw ConfigError("max_blocks_per_piece must be positive");
  if (c.weak_max_mobility < 1 || c.light_max_mobility <= c.weak_max_mobility)
    throw ConfigError("mobility thresholds must satisfy 1 <= weak_max < light_max");
  if (c.population < 2) throw ConfigError("population must be at least 2");
  if (c.generations < 0) throw ConfigError("generations must be non-negative");
  if (c.max_redraws < 1) throw ConfigError("max_redraws must be positive");
  for (double w : {c.w_rules_lowest_usefulness, c.w_rules_roulette, c.w_rules_swap, c.w_conditions_both,
                   c.w_conditions_side})
    if (!(w >= 0)) throw ConfigError("mutation weights must be non-negative");
  try {
    validate(c.plan);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

const std::string& class_symbols(PieceClass c) {
  static const std::string symbols[3] = {"PKWVU", "NBLMH", "QRSTG"};
  return symbols[static_cast<std::size_t>(c)];
}

namespace {

/// Union of the alternatives of all parts, duplicates dropped, order kept.
MoveRegex union_unique(const std::vector<MoveRegex>& parts) {
  std::vector<MoveRegex> alts;
  for (const auto& p : parts) {
    const auto add = [&](const MoveRegex& r) {
      if (std::find(alts.begin(), alts.end(), r) == alts.end()) alts.push_back(r);
    };
    if (p.kind() == MoveRegex::Kind::Union) {
      for (const auto& c : p.children()) add(c);
    } else {
      add(p);
    }
  }
  return MoveRegex::alt(std::move(alts));
}

struct LetterTable {
  std::vector<std::pair<int, int>> displacements;
  std::vector<double> weights;
};

LetterTable letter_table(const GeneratorConfig& cfg) {
  LetterTable t;
  const int r = cfg.displacement_radius;
  for (int dx = -r; dx <= r; ++dx) {
    for (int dy = -r; dy <= r; ++dy) {
      if (dx == 0 && dy == 0) continue;
      const int d = std::max(std::abs(dx), std::abs(dy));
      t.displacements.emplace_back(dx, dy);
      t.weights.push_back(std::pow(cfg.letter_decay, d - 1));
    }
  }
  return t;
}

Word random_word(const GeneratorConfig& cfg, const LetterTable& table, Rng& rng) {
  const std::size_t len = rng.weighted(cfg.word_length_weights) + 1;
  const double on_weights[3] = {cfg.p_on_empty, cfg.p_on_opponent, cfg.p_on_own};
  Word w;
  for (std::size_t i = 0; i < len; ++i) {
    const auto [dx, dy] = table.displacements[rng.weighted(table.weights)];
    w.push_back(Letter{dx, dy, static_cast<OnClass>(rng.weighted(on_weights))});
  }
  return w;
}

MoveRegex word_regex(const Word& w) {
  std::vector<MoveRegex> atoms;
  for (const auto& l : w) atoms.push_back(MoveRegex::atom(l));
  return MoveRegex::concat(std::move(atoms));
}

MoveRegex random_rules(PieceClass cls, const GeneratorConfig& cfg, const MoveSetPool& pool, Rng& rng) {
  const auto& blocks = pool.of(cls);
  if (blocks.empty()) throw GenerationError(std::string("no building blocks for class ") + class_name(cls));
  const int k = rng.between(1, cfg.max_blocks_per_piece);
  std::vector<MoveRegex> parts;
  for (int i = 0; i < k; ++i) parts.push_back(blocks[rng.index(blocks.size())]);
  return union_unique(parts);
}

std::vector<int> pieces_of_class(const std::vector<PieceDef>& pieces, PieceClass c) {
  std::vector<int> out;
  for (std::size_t i = 0; i < pieces.size(); ++i)
    if (pieces[i].piece_class == c) out.push_back(static_cast<int>(i));
  return out;
}

WinCondition random_condition(Side side, const GameSpec& spec, const GeneratorConfig& cfg, Rng& rng) {
  WinCondition c;
  c.side = side;
  c.kind = rng.chance(cfg.p_reach) ? WinKind::Reach : WinKind::CaptureAll;
  c.piece = spec.pieces[rng.index(spec.pieces.size())].symbol;
  return c;
}

void add_unique(std::vector<WinCondition>& list, const WinCondition& c) {
  if (std::find(list.begin(), list.end(), c) == list.end()) list.push_back(c);
}

std::vector<WinCondition> random_conditions(const GameSpec& spec, const GeneratorConfig& cfg, Rng& rng) {
  std::vector<WinCondition> out;
  if (!rng.chance(cfg.p_condition)) return out;
  int n = 1;
  while (n < 4 && rng.chance(cfg.p_extra_condition)) ++n;
  for (int i = 0; i < n; ++i) {
    const WinCondition w = random_condition(Side::White, spec, cfg, rng);
    WinCondition b = w;
    b.side = Side::Black;
    if (rng.chance(cfg.p_asymmetric_conditions)) b = random_condition(Side::Black, spec, cfg, rng);
    add_unique(out, w);
    add_unique(out, b);
  }
  return out;
}

}  // namespace

MoveRegex hmirror(const MoveRegex& r) {
  return union_unique({r, map_letters(r, [](Letter l) { return Letter{-l.dx, l.dy, l.on}; })});
}

MoveRegex vmirror(const MoveRegex& r) {
  return union_unique({r, map_letters(r, [](Letter l) { return Letter{l.dx, -l.dy, l.on}; })});
}

MoveRegex rotations(const MoveRegex& r) {
  std::vector<MoveRegex> parts{r};
  for (int i = 0; i < 3; ++i)
    parts.push_back(map_letters(parts.back(), [](Letter l) { return Letter{l.dy, -l.dx, l.on}; }));
  return union_unique(parts);
}

MoveRegex star_letter(const Word& word, std::size_t i) {
  std::vector<MoveRegex> atoms;
  for (std::size_t k = 0; k < word.size(); ++k) {
    MoveRegex a = MoveRegex::atom(word[k]);
    atoms.push_back(k == i ? MoveRegex::star(a) : a);
  }
  return MoveRegex::concat(std::move(atoms));
}

PieceClass bucket(int mobility, const GeneratorConfig& cfg) {
  if (mobility <= cfg.weak_max_mobility) return PieceClass::Weak;
  if (mobility <= cfg.light_max_mobility) return PieceClass::Light;
  return PieceClass::Strong;
}

MoveSetPool generate_building_blocks(const GeneratorConfig& cfg, Rng& rng) {
  const LetterTable table = letter_table(cfg);
  const int wanted[3] = {cfg.weak_pieces, cfg.light_pieces, cfg.strong_pieces};
  MoveSetPool pool;
  const std::size_t target = static_cast<std::size_t>(cfg.pool_blocks_per_class);
  auto full = [&] {
    for (int c = 0; c < 3; ++c)
      if (wanted[c] > 0 && pool.blocks[static_cast<std::size_t>(c)].size() < target) return false;
    return true;
  };
  const long max_attempts = 2000L * cfg.pool_blocks_per_class;
  for (long attempt = 0; attempt < max_attempts && !full(); ++attempt) {
    const Word w = random_word(cfg, table, rng);
    MoveRegex r = rng.chance(cfg.p_star) ? star_letter(w, rng.index(w.size())) : word_regex(w);
    if (rng.chance(cfg.p_hmirror)) r = hmirror(r);
    if (rng.chance(cfg.p_vmirror)) r = vmirror(r);
    if (rng.chance(cfg.p_rotation)) r = rotations(r);
    const int m = mobility(r, cfg.width, cfg.height);
    if (m == 0) continue;
    auto& bin = pool.blocks[static_cast<std::size_t>(bucket(m, cfg))];
    if (bin.size() >= target || std::find(bin.begin(), bin.end(), r) != bin.end()) continue;
    bin.push_back(std::move(r));
  }
  for (int c = 0; c < 3; ++c)
    if (wanted[c] > 0 && pool.blocks[static_cast<std::size_t>(c)].empty())
      throw GenerationError(std::string("configuration infeasible: no ") + class_name(static_cast<PieceClass>(c)) +
                            " building blocks found");
  return pool;
}

MoveSetPool run_pool(const GeneratorConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, {kPool}));
  return generate_building_blocks(cfg, rng);
}

std::vector<Occupant> generate_board(const GeneratorConfig& cfg, const std::vector<PieceDef>& pieces, Rng& rng) {
  const int w = cfg.width, h = cfg.height;
  const int half = h / 2;
  const int quarter = (w + 1) / 2;
  std::vector<Occupant> board(static_cast<std::size_t>(w * h));
  auto at = [&](int x, int y) -> Occupant& { return board[static_cast<std::size_t>((y - 1) * w + (x - 1))]; };

  std::array<std::vector<int>, 3> by_class;
  for (int c = 0; c < 3; ++c) by_class[static_cast<std::size_t>(c)] = pieces_of_class(pieces, static_cast<PieceClass>(c));

  auto draw = [&](int y) -> Occupant {
    if (pieces.empty() || !rng.chance(cfg.p_fill)) return {};
    const double t = half > 1 ? static_cast<double>(y - 1) / (half - 1) : 0.0;
    const double p_strong = cfg.strong_back + (cfg.strong_front - cfg.strong_back) * t;
    PieceClass cls = rng.chance(p_strong) ? PieceClass::Strong
                     : rng.chance(cfg.light_share) ? PieceClass::Light
                                                   : PieceClass::Weak;
    const auto& options = by_class[static_cast<std::size_t>(cls)];
    const int k = options.empty() ? static_cast<int>(rng.index(pieces.size())) : options[rng.index(options.size())];
    return Occupant{pieces[static_cast<std::size_t>(k)].symbol, Side::White};
  };

  for (int y = 1; y <= half; ++y) {
    for (int x = 1; x <= quarter; ++x) at(x, y) = draw(y);
    for (int x = quarter + 1; x <= w; ++x) at(x, y) = rng.chance(cfg.p_mirror_change) ? draw(y) : at(w + 1 - x, y);
  }
  for (int y = 1; y <= half; ++y) {
    for (int x = 1; x <= w; ++x) {
      Occupant o = at(x, y);
      if (!o.empty()) {
        o.owner = Side::Black;
        if (rng.chance(cfg.p_black_regen)) {
          const PieceDef* p = nullptr;
          for (const auto& d : pieces)
            if (d.symbol == o.symbol) p = &d;
          const auto& same = by_class[static_cast<std::size_t>(p->piece_class)];
          o.symbol = pieces[static_cast<std::size_t>(same[rng.index(same.size())])].symbol;
        }
      }
      at(w + 1 - x, h + 1 - y) = o;
    }
  }
  return board;
}

bool viable(const GameSpec& spec) {
  try {
    validate(spec);
    Game g(spec);
    const GameState s = g.initial_state();
    if (g.total(s, Side::White) == 0 || g.total(s, Side::Black) == 0) return false;
    return g.status(s) == Status::Ongoing;
  } catch (const ValidationError&) {
    return false;
  }
}

int rule_complexity(const PieceDef& p) {
  return regex_size(p.moves_white) + (p.asymmetric() ? regex_size(p.moves_black) : 0);
}

Individual generate_individual(const GeneratorConfig& cfg, const MoveSetPool& pool, Rng& rng) {
  for (int attempt = 0; attempt < cfg.max_redraws; ++attempt) {
    GameSpec g = make_empty_spec("evolved", cfg.width, cfg.height, cfg.turnlimit);
    const int counts[3] = {cfg.weak_pieces, cfg.light_pieces, cfg.strong_pieces};
    for (int c = 0; c < 3; ++c) {
      const auto cls = static_cast<PieceClass>(c);
      for (int i = 0; i < counts[c]; ++i)
        g.pieces.push_back(make_piece(class_symbols(cls)[static_cast<std::size_t>(i)], cls, random_rules(cls, cfg, pool, rng)));
    }
    g.initial = generate_board(cfg, g.pieces, rng);
    g.conditions = random_conditions(g, cfg, rng);
    if (!viable(g)) continue;
    Individual ind;
    ind.spec = std::move(g);
    return ind;
  }
  throw GenerationError("configuration infeasible: no viable game after " + std::to_string(cfg.max_redraws) +
                        " draws");
}

std::vector<Individual> generate_population(const GeneratorConfig& cfg, const MoveSetPool& pool, Rng& rng) {
  std::vector<Individual> out;
  for (int i = 0; i < cfg.population; ++i) out.push_back(generate_individual(cfg, pool, rng));
  return out;
}

namespace {
double balance_key(const Individual& ind) { return ind.features ? ind.features->B_M + ind.features->B_R : 0.0; }
}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> select_parents(const std::vector<Individual>& population) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < population.size(); ++i)
    if (population[i].playable) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return balance_key(population[a]) < balance_key(population[b]);
  });
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (idx.size() < 2) return pairs;
  for (std::size_t i = 0, j = idx.size() - 1; i < j; ++i, --j) pairs.emplace_back(idx[i], idx[j]);
  return pairs;
}

std::pair<GameSpec, GameSpec> crossover_with_cuts(const GameSpec& a, const GameSpec& b, int c1, int c2, Rng& rng) {
  if (a.width != b.width || a.height != b.height) throw PairingError("crossover parents differ in board size");
  if (a.pieces.size() != b.pieces.size()) throw PairingError("crossover parents differ in piece sets");
  for (const auto& p : a.pieces)
    if (!b.find_piece(p.symbol)) throw PairingError(std::string("piece ") + p.symbol + " missing from second parent");
  if (c1 < 0 || c2 < c1 || c2 > a.width) throw std::invalid_argument("crossover cut points out of range");

  GameSpec x = a, y = b;
  for (int col = c1 + 1; col <= c2; ++col)
    for (int row = 1; row <= a.height; ++row) std::swap(x.at({col, row}), y.at({col, row}));

  for (auto& p : x.pieces) {
    const PieceDef& other = *b.find_piece(p.symbol);
    if (rng.chance(0.5)) {
      PieceDef& q = y.pieces[static_cast<std::size_t>(y.piece_index(p.symbol))];
      q = p;
      p = other;
    }
  }

  x.conditions.clear();
  y.conditions.clear();
  const std::size_t common = std::min(a.conditions.size(), b.conditions.size());
  for (std::size_t i = 0; i < common; ++i) {
    const bool keep = rng.chance(0.5);
    add_unique(x.conditions, keep ? a.conditions[i] : b.conditions[i]);
    add_unique(y.conditions, keep ? b.conditions[i] : a.conditions[i]);
  }
  const auto& longer = a.conditions.size() > b.conditions.size() ? a.conditions : b.conditions;
  for (std::size_t i = common; i < longer.size(); ++i) add_unique(rng.chance(0.5) ? x.conditions : y.conditions, longer[i]);
  return {std::move(x), std::move(y)};
}

std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b, Rng& rng) {
  int c1 = rng.between(0, a.spec.width);
  int c2 = rng.between(0, a.spec.width);
  if (c1 > c2) std::swap(c1, c2);
  auto [x, y] = crossover_with_cuts(a.spec, b.spec, c1, c2, rng);
  std::pair<Individual, Individual> out;
  out.first.spec = std::move(x);
  out.second.spec = std::move(y);
  for (Individual* c : {&out.first, &out.second}) {
    c->parents = {a.id, b.id};
    c->origin = "crossover";
  }
  return out;
}

GameSpec mutate_board(const GameSpec& spec, Rng& rng) {
  GameSpec out = spec;
  const Square s{rng.between(1, spec.width), rng.between(1, spec.height)};
  const std::size_t choice = rng.index(spec.pieces.size() + 1);
  if (choice == 0) {
    out.at(s) = Occupant{};
  } else {
    out.at(s) = Occupant{spec.pieces[choice - 1].symbol, 2 * s.y <= spec.height ? Side::White : Side::Black};
  }
  return out;
}

GameSpec redraw_piece_rules(const GameSpec& spec, int piece, const GeneratorConfig& cfg, const MoveSetPool& pool,
                            Rng& rng) {
  GameSpec out = spec;
  PieceDef& p = out.pieces[static_cast<std::size_t>(piece)];
  for (int i = 0; i < 8; ++i) {
    MoveRegex r = random_rules(p.piece_class, cfg, pool, rng);
    if (r == p.moves_white && i < 7) continue;
    p.moves_white = r;
    p.moves_black = rotated_180(r);
    break;
  }
  return out;
}

GameSpec swap_piece_rules(const GameSpec& spec, Rng& rng) {
  std::vector<std::vector<int>> groups;
  for (int c = 0; c < 3; ++c) {
    auto ids = pieces_of_class(spec.pieces, static_cast<PieceClass>(c));
    if (ids.size() >= 2) groups.push_back(std::move(ids));
  }
  GameSpec out = spec;
  if (groups.empty()) return out;
  auto& g = groups[rng.index(groups.size())];
  const std::size_t i = rng.index(g.size());
  std::size_t j = rng.index(g.size() - 1);
  if (j >= i) ++j;
  auto& a = out.pieces[static_cast<std::size_t>(g[i])];
  auto& b = out.pieces[static_cast<std::size_t>(g[j])];
  std::swap(a.moves_white, b.moves_white);
  std::swap(a.moves_black, b.moves_black);
  return out;
}

namespace {

bool has_swappable(const GameSpec& spec) {
  for (int c = 0; c < 3; ++c)
    if (pieces_of_class(spec.pieces, static_cast<PieceClass>(c)).size() >= 2) return true;
  return false;
}

GameSpec mutate_rules(const Individual& ind, const GeneratorConfig& cfg, const MoveSetPool& pool, Rng& rng,
                      std::string& kind) {
  const GameSpec& spec = ind.spec;
  double w[3] = {cfg.w_rules_lowest_usefulness, cfg.w_rules_roulette, cfg.w_rules_swap};
  if (ind.features) {
    w[0] *= ind.features->R;
    w[1] *= 1.0 - ind.features->C;
  }
  if (!has_swappable(spec)) w[2] = 0;
  std::size_t option = rng.weighted(w);
  if (option == 2 && !has_swappable(spec)) option = 1;  // all-zero fallback drew the swap
  if (option == 0) {
    kind = "rules-lowest-usefulness";
    int piece = static_cast<int>(rng.index(spec.pieces.size()));
    if (ind.features && ind.features->usefulness.size() == spec.pieces.size()) {
      const auto& u = ind.features->usefulness;
      piece = static_cast<int>(std::min_element(u.begin(), u.end()) - u.begin());
    }
    return redraw_piece_rules(spec, piece, cfg, pool, rng);
  }
  if (option == 1) {
    kind = "rules-roulette";
    std::vector<double> sizes;
    for (const auto& p : spec.pieces) sizes.push_back(rule_complexity(p));
    return redraw_piece_rules(spec, static_cast<int>(rng.weighted(sizes)), cfg, pool, rng);
  }
  kind = "rules-swap";
  return swap_piece_rules(spec, rng);
}

GameSpec mutate_conditions(const Individual& ind, const GeneratorConfig& cfg, Rng& rng, std::string& kind) {
  GameSpec out = ind.spec;
  double side_weight = 0;
  double advantage = 0;  // positive favours white
  if (ind.features) {
    side_weight = cfg.w_conditions_side * (3 * std::abs(ind.features->B_M) + std::abs(ind.features->B_R));
    advantage = 3 * ind.features->B_M + ind.features->B_R;
  }
  const double w[2] = {cfg.w_conditions_both, side_weight};
  auto& conds = out.conditions;
  if (rng.weighted(w) == 0) {
    kind = "conditions-both";
    if (conds.empty() || rng.chance(0.5)) {
      WinCondition c = random_condition(Side::White, out, cfg, rng);
      add_unique(conds, c);
      c.side = Side::Black;
      add_unique(conds, c);
    } else {
      const WinCondition c = conds[rng.index(conds.size())];
      std::erase_if(conds, [&](const WinCondition& d) { return d.kind == c.kind && d.piece == c.piece; });
    }
    return out;
  }
  kind = "conditions-side";
  const Side weak = advantage > 0 ? Side::Black : advantage < 0 ? Side::White : (rng.chance(0.5) ? Side::White : Side::Black);
  std::vector<std::size_t> own;
  for (std::size_t i = 0; i < conds.size(); ++i)
    if (conds[i].side == weak) own.push_back(i);
  if (own.empty() || rng.chance(0.5)) {
    add_unique(conds, random_condition(weak, out, cfg, rng));
  } else {
    conds.erase(conds.begin() + static_cast<std::ptrdiff_t>(own[rng.index(own.size())]));
  }
  return out;
}

}  // namespace

Individual mutate(const Individual& ind, const GeneratorConfig& cfg, const MoveSetPool& pool, Rng& rng) {
  const double p_rules = 1.0 / (ind.spec.width + ind.spec.height);
  Individual out;
  out.parents = {ind.id};
  for (int attempt = 0; attempt < 50; ++attempt) {
    std::string kind;
    GameSpec spec;
    if (rng.chance(p_rules)) {
      spec = rng.chance(0.5) ? mutate_rules(ind, cfg, pool, rng, kind) : mutate_conditions(ind, cfg, rng, kind);
    } else {
      kind = "board";
      spec = mutate_board(ind.spec, rng);
    }
    if (!viable(spec)) continue;
    out.spec = std::move(spec);
    out.origin = "mutation:" + kind;
    return out;
  }
  out.spec = ind.spec;
  out.origin = "mutation:none";
  return out;
}

void evaluate_all(std::vector<Individual*> individuals, const GeneratorConfig& cfg, int jobs) {
  std::erase_if(individuals, [](const Individual* i) { return i->evaluated(); });
  parallel_for(individuals.size(), jobs, [&](std::size_t k) {
    Individual& ind = *individuals[k];
    SimulationPlan plan = cfg.plan;
    plan.base_seed = derive_seed(cfg.seed, {kEval, ind.id});
    plan.jobs = 1;
    Game game(ind.spec);
    Evaluation e = evaluate(game, plan);
    ind.features = std::move(e.features);
    ind.fitness = e.fitness;
    ind.playable = ind.features->P == 1.0;
  });
}

namespace {

void assign_id(Individual& ind, std::uint64_t& next_id) {
  ind.id = next_id++;
  ind.spec.name = "g" + std::to_string(ind.id);
}

std::vector<Individual> fresh_population(const GeneratorConfig& cfg, const MoveSetPool& pool, Rng& rng,
                                         std::uint64_t& next_id, const char* origin, int jobs) {
  auto pop = generate_population(cfg, pool, rng);
  std::vector<Individual*> ptrs;
  for (auto& ind : pop) {
    assign_id(ind, next_id);
    ind.origin = origin;
    ptrs.push_back(&ind);
  }
  evaluate_all(ptrs, cfg, jobs);
  return pop;
}

void log_all(const LogSink& log, int generation, const char* role, const std::vector<Individual>& inds) {
  if (!log) return;
  for (const auto& ind : inds) log(LogEntry{generation, role, &ind});
}

}  // namespace

EvolutionState initial_state(const GeneratorConfig& cfg, const MoveSetPool& pool, int jobs, const LogSink& log) {
  EvolutionState st;
  for (int round = 0;; ++round) {
    Rng rng(derive_seed(cfg.seed, {kInitial, static_cast<std::uint64_t>(round)}));
    st.population = fresh_population(cfg, pool, rng, st.next_id, round == 0 ? "random" : "restart", jobs);
    log_all(log, 0, round == 0 ? "initial" : "restart", st.population);
    const bool any = std::any_of(st.population.begin(), st.population.end(), [](const auto& i) { return i.playable; });
    st.restarted = round > 0;
    if (any || round >= 10) break;
  }
  return st;
}

std::vector<Individual> replacement(std::vector<Individual> candidates, int n) {
  std::stable_sort(candidates.begin(), candidates.end(), [](const Individual& a, const Individual& b) {
    if (a.playable != b.playable) return a.playable;
    if (a.score() != b.score()) return a.score() > b.score();
    return a.id < b.id;
  });
  const std::size_t size = static_cast<std::size_t>(n);
  const std::size_t playable = static_cast<std::size_t>(
      std::count_if(candidates.begin(), candidates.end(), [](const Individual& i) { return i.playable; }));
  std::vector<Individual> out;
  const std::size_t keep = playable > 0 ? std::min(playable, size) : std::min(candidates.size(), size);
  out.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep));
  for (std::size_t i = 0; out.size() < size && keep > 0; ++i) out.push_back(out[i % keep]);
  return out;
}

EvolutionState step_generation(const EvolutionState& state, const GeneratorConfig& cfg, const MoveSetPool& pool,
                               int jobs, const LogSink& log) {
  EvolutionState next;
  next.generation = state.generation + 1;
  next.next_id = state.next_id;
  const auto gen = static_cast<std::uint64_t>(next.generation);

  std::vector<Individual> parents = state.population;
  {
    std::vector<Individual*> ptrs;
    for (auto& p : parents) ptrs.push_back(&p);
    evaluate_all(ptrs, cfg, jobs);
  }
  log_all(log, next.generation, "parent", parents);

  std::vector<Individual> mutants;
  for (std::size_t k = 0; k < parents.size(); ++k) {
    Rng rng(derive_seed(cfg.seed, {kMutate, gen, k}));
    Individual m = mutate(parents[k], cfg, pool, rng);
    assign_id(m, next.next_id);
    mutants.push_back(std::move(m));
  }
  std::erase_if(parents, [](const Individual& i) { return !i.playable; });

  std::vector<Individual> offspring;
  const auto pairs = select_parents(parents);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    Rng rng(derive_seed(cfg.seed, {kCross, gen, k}));
    auto [x, y] = crossover(parents[pairs[k].first], parents[pairs[k].second], rng);
    for (Individual* c : {&x, &y}) {
      if (!viable(c->spec)) continue;
      assign_id(*c, next.next_id);
      offspring.push_back(std::move(*c));
    }
  }
  {
    std::vector<Individual*> ptrs;
    for (auto& o : offspring) ptrs.push_back(&o);
    for (auto& m : mutants) ptrs.push_back(&m);
    evaluate_all(ptrs, cfg, jobs);
  }
  log_all(log, next.generation, "offspring", offspring);
  log_all(log, next.generation, "mutant", mutants);

  std::vector<Individual> pool_all = std::move(parents);
  for (auto* group : {&offspring, &mutants})
    for (auto& i : *group)
      if (i.playable) pool_all.push_back(std::move(i));

  if (pool_all.empty()) {
    Rng rng(derive_seed(cfg.seed, {kRestart, gen}));
    auto fresh = fresh_population(cfg, pool, rng, next.next_id, "restart", jobs);
    log_all(log, next.generation, "restart", fresh);
    next.population = replacement(std::move(fresh), cfg.population);
    next.restarted = true;
    return next;
  }
  next.population = replacement(std::move(pool_all), cfg.population);
  return next;
}

GenerationSummary summarize(const EvolutionState& state) {
  GenerationSummary s;
  s.generation = state.generation;
  s.size = static_cast<int>(state.population.size());
  s.restarted = state.restarted;
  double sum = 0;
  for (const auto& ind : state.population) {
    s.best = std::max(s.best, ind.score());
    sum += ind.score();
    s.playable += ind.playable;
  }
  s.mean = state.population.empty() ? 0 : sum / static_cast<double>(state.population.size());
  return s;
}

std::string spec_digest(const GameSpec& spec) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_sbg(spec)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = hex[h & 0xf];
  return out;
}

}  // namespace sbg
