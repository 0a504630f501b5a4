#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "sbg/gdl.hpp"

namespace sbg::gdl {

/// Program rejected by the interpreter: unsafe rule, negation through
/// recursion, or a construct outside the supported subset.
class ProgramError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runtime misuse: missing does facts, undefined goal values.
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Set of ground state terms, e.g. (cell 1 2 q white), sorted.
struct GdlState {
  std::vector<Term> facts;
  bool operator==(const GdlState& o) const { return facts == o.facts; }
};

enum class EvalMode : unsigned char { SemiNaive, Naive };

/// Variables in the head, in negated literals and in `distinct` must occur
/// in a positive body literal. Throws ProgramError naming the rule.
void check_safety(const Document& doc);
/// Throws ProgramError when a relation depends negatively on itself.
void check_stratification(const Document& doc);

/// Bottom-up GDL reasoner for the function-free-up-to-fixed-shapes subset
/// that the translator emits. Atoms are flattened by shape, so a variable
/// never stands for a compound term; the constructor rejects programs that
/// would need it.
class StateMachine {
 public:
  explicit StateMachine(const Document& doc, EvalMode mode = EvalMode::SemiNaive);
  ~StateMachine();
  StateMachine(StateMachine&&) noexcept;
  StateMachine& operator=(StateMachine&&) noexcept;

  static StateMachine from_kif(const std::string& text, EvalMode mode = EvalMode::SemiNaive);

  const std::vector<Term>& roles() const;
  GdlState initial_state() const;
  /// Legal move terms of `role`, sorted.
  std::vector<Term> legal(const GdlState& state, const Term& role) const;
  /// `joint` holds one move per role, in roles() order.
  GdlState next(const GdlState& state, const std::vector<Term>& joint) const;
  bool terminal(const GdlState& state) const;
  int goal(const GdlState& state, const Term& role) const;

  /// Every derived ground atom (including true/does inputs), sorted. Used to
  /// compare evaluation strategies.
  std::vector<Term> model(const GdlState& state, const std::vector<Term>& joint = {}) const;

  std::size_t stratum_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct TraceStep {
  GdlState state;
  std::vector<std::vector<Term>> legal;  // per role
  std::vector<Term> joint;               // empty on the final step
};

struct Trace {
  std::vector<TraceStep> steps;
  bool terminal = false;
  std::vector<int> goals;  // per role, when terminal
};

/// Uniformly random legal moves per role until terminal or `max_plies`.
Trace random_playthrough(const StateMachine& m, std::uint64_t seed, int max_plies);
/// One JSON object per step.
void write_trace_jsonl(const Trace& trace, std::ostream& out);

}  // namespace sbg::gdl
