#pragma once

#include <stdexcept>
#include <vector>

#include "sbg/regex.hpp"

namespace sbg {

class RegexError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Epsilon-free nondeterministic automaton over letters.
///
/// Built with the position (Glushkov) construction, so state 0 is the start
/// state and every other state corresponds to one letter occurrence of the
/// power-expanded expression. The start state is never accepting: the empty
/// word is not a move.
class MoveAutomaton {
 public:
  struct Transition {
    Letter letter;
    int target;
  };

  static constexpr int kStart = 0;

  int state_count() const { return static_cast<int>(transitions_.size()); }
  const std::vector<Transition>& transitions(int state) const { return transitions_[state]; }
  bool accepting(int state) const { return accepting_[state]; }

  /// Word membership, used by tests and by checked move application.
  bool accepts(const Word& word) const;

  friend MoveAutomaton compile_regex(const MoveRegex& r);

 private:
  std::vector<std::vector<Transition>> transitions_;
  std::vector<bool> accepting_;
};

/// Throws RegexError when the expression accepts no non-empty word.
MoveAutomaton compile_regex(const MoveRegex& r);

}  // namespace sbg
