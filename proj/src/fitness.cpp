#include "sbg/fitness.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "sbg/parallel.hpp"

namespace sbg {

void validate(const SimulationPlan& plan) {
  if (plan.n_mm < 1) throw std::invalid_argument("at least one min-max/min-max playout is required");
  if (plan.n_mr < 2 || plan.n_mr % 2 != 0)
    throw std::invalid_argument("min-max/random playouts must be a positive even count");
  if (plan.budget.node_budget < 1) throw std::invalid_argument("node budget must be positive");
  if (plan.budget.max_depth < 1) throw std::invalid_argument("search depth must be positive");
  if (!(plan.expected_branching > 0)) throw std::invalid_argument("expected branching factor must be positive");
}

double gaussian_peak(double x, double mu) {
  const double sigma = mu / 4.0;
  const double d = x - mu;
  return std::exp(-(d * d) / (2.0 * sigma * sigma));
}

namespace {

double mean_length(std::span<const PlayoutRecord> records) {
  double sum = 0;
  for (const auto& r : records) sum += r.length;
  return sum / static_cast<double>(records.size());
}

void require_nonempty(std::span<const PlayoutRecord> records, const char* what) {
  if (records.empty()) throw std::invalid_argument(std::string(what) + ": no playout records");
}

bool minmax_won(const PlayoutRecord& r) {
  if (r.result == PlayoutResult::WhiteWins) return r.white_agent == AgentKind::MinMax;
  if (r.result == PlayoutResult::BlackWins) return r.black_agent == AgentKind::MinMax;
  return false;
}

}  // namespace

double feature_P(std::span<const PlayoutRecord> records) {
  require_nonempty(records, "P");
  for (const auto& r : records)
    if (r.result == PlayoutResult::Timeout) return 0.0;
  return 1.0;
}

double feature_L_M(std::span<const PlayoutRecord> mm, int turnlimit) {
  require_nonempty(mm, "L_M");
  const double l = mean_length(mm) / turnlimit;
  return l < 0.5 ? 2.0 * l : 1.0;
}

double feature_L_D(std::span<const PlayoutRecord> mm, std::span<const PlayoutRecord> mr, int turnlimit) {
  require_nonempty(mm, "L_D");
  require_nonempty(mr, "L_D");
  const double z = (mean_length(mm) - mean_length(mr)) / turnlimit;
  if (z > 0.25) return 1.0;
  if (z < 0) return 0.0;
  return 4.0 * z;
}

double feature_W(const PlayoutSet& records, double mu) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto* set : {&records.mm, &records.mr}) {
    for (const auto& r : *set) {
      for (int b : r.branching_samples) sum += b;
      n += r.branching_samples.size();
    }
  }
  const double x = n == 0 ? 0.0 : sum / static_cast<double>(n);
  return gaussian_peak(x, mu);
}

double feature_B_M(std::span<const PlayoutRecord> mm) {
  require_nonempty(mm, "B_M");
  int white = 0, black = 0;
  for (const auto& r : mm) {
    white += r.result == PlayoutResult::WhiteWins;
    black += r.result == PlayoutResult::BlackWins;
  }
  return static_cast<double>(white - black) / static_cast<double>(mm.size());
}

double feature_B_R(std::span<const PlayoutRecord> mr) {
  require_nonempty(mr, "B_R");
  int as_white = 0, as_black = 0;
  for (const auto& r : mr) {
    if (!minmax_won(r)) continue;
    if (r.result == PlayoutResult::WhiteWins) ++as_white;
    else ++as_black;
  }
  return static_cast<double>(as_white - as_black) / static_cast<double>(mr.size());
}

double feature_S(std::span<const PlayoutRecord> mr) {
  require_nonempty(mr, "S");
  int wins = 0;
  for (const auto& r : mr) wins += minmax_won(r);
  return static_cast<double>(wins) / static_cast<double>(mr.size());
}

std::vector<double> usefulness(const PlayoutSet& records, int piece_count) {
  std::vector<double> counts(static_cast<std::size_t>(piece_count), 0.0);
  double total = 0;
  for (const auto* set : {&records.mm, &records.mr}) {
    for (const auto& r : *set) {
      for (std::size_t k = 0; k < counts.size() && k < r.moves_by_piece.size(); ++k) {
        counts[k] += r.moves_by_piece[k];
        total += r.moves_by_piece[k];
      }
    }
  }
  for (auto& c : counts) c = total > 0 ? c / total : 1.0 / piece_count;
  return counts;
}

double feature_R(std::span<const double> u) {
  const double k = static_cast<double>(u.size());
  double sum = 0;
  for (double ui : u) {
    const double d = 1.0 / k - ui;
    sum += d * d;
  }
  return sum;
}

int game_size(const GameSpec& spec) {
  int n = 0;
  for (const auto& p : spec.pieces) {
    n += regex_size(p.moves_white);
    if (p.asymmetric()) n += regex_size(p.moves_black);
  }
  return n;
}

double desired_size(const GameSpec& spec, const SimulationPlan& plan) {
  double s = 0;
  for (const auto& p : spec.pieces) {
    switch (p.piece_class) {
      case PieceClass::Weak:
        s += plan.desired_weak;
        break;
      case PieceClass::Light:
        s += plan.desired_light;
        break;
      case PieceClass::Strong:
        s += plan.desired_strong;
        break;
    }
  }
  return s;
}

double feature_C(const GameSpec& spec, double desired) { return gaussian_peak(game_size(spec), desired); }

namespace {
void check_range(double v, double lo, double hi, bool hi_open, const char* name) {
  const bool ok = std::isfinite(v) && v >= lo && (hi_open ? v < hi : v <= hi);
  if (!ok) throw FeatureRangeError(std::string("feature ") + name + " out of range: " + std::to_string(v));
}
}  // namespace

double fitness(const FeatureVector& f) {
  if (f.P != 0.0 && f.P != 1.0) throw FeatureRangeError("feature P must be 0 or 1");
  check_range(f.L_M, 0, 1, false, "L_M");
  check_range(f.L_D, 0, 1, false, "L_D");
  check_range(f.W, -1, 1, false, "W");
  check_range(f.B_M, -1, 1, false, "B_M");
  check_range(f.B_R, -1, 1, false, "B_R");
  check_range(f.S, 0, 1, false, "S");
  check_range(f.C, 0, 1, false, "C");
  check_range(f.R, 0, 1, true, "R");
  return f.P / 15.0 *
         (f.L_M + f.L_D + 2.0 * std::abs(f.W) + 3.0 * f.S + 2.0 * f.C +
          (6.0 - 3.0 * std::abs(f.B_M) - std::abs(f.B_R) - 2.0 * f.R));
}

PlayoutSet simulate(const Game& game, const SimulationPlan& plan) {
  validate(plan);
  const std::size_t n_mm = static_cast<std::size_t>(plan.n_mm);
  const std::size_t total = n_mm + static_cast<std::size_t>(plan.n_mr);
  std::vector<PlayoutRecord> all(total);
  parallel_for(total, plan.jobs, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(plan.base_seed, {i});
    if (i < n_mm) {
      all[i] = run_playout(game, AgentKind::MinMax, AgentKind::MinMax, plan.budget, seed);
    } else {
      const bool minmax_white = (i - n_mm) % 2 == 0;
      all[i] = minmax_white ? run_playout(game, AgentKind::MinMax, AgentKind::Random, plan.budget, seed)
                            : run_playout(game, AgentKind::Random, AgentKind::MinMax, plan.budget, seed);
    }
  });
  PlayoutSet out;
  out.mm.assign(std::make_move_iterator(all.begin()), std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(n_mm)));
  out.mr.assign(std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(n_mm)), std::make_move_iterator(all.end()));
  return out;
}

FeatureVector compute_features(const Game& game, const PlayoutSet& rec, const SimulationPlan& plan) {
  const int turnlimit = game.spec().turnlimit;
  std::vector<PlayoutRecord> all = rec.mm;
  all.insert(all.end(), rec.mr.begin(), rec.mr.end());
  FeatureVector f;
  f.P = feature_P(all);
  f.L_M = feature_L_M(rec.mm, turnlimit);
  f.L_D = feature_L_D(rec.mm, rec.mr, turnlimit);
  f.W = feature_W(rec, plan.expected_branching);
  f.B_M = feature_B_M(rec.mm);
  f.B_R = feature_B_R(rec.mr);
  f.S = feature_S(rec.mr);
  f.C = feature_C(game.spec(), desired_size(game.spec(), plan));
  f.usefulness = usefulness(rec, game.piece_count());
  f.R = feature_R(f.usefulness);
  return f;
}

Evaluation evaluate(const Game& game, const SimulationPlan& plan) {
  Evaluation e;
  e.records = simulate(game, plan);
  e.features = compute_features(game, e.records, plan);
  e.fitness = fitness(e.features);
  return e;
}

}  // namespace sbg
