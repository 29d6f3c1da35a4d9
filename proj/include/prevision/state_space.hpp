#pragma once

#include <string>
#include <tuple>

#include "prevision/errors.hpp"

namespace prevision {

// A state is a column k (0-based) together with an index j >= 1 within it.
// The space is the disjoint union of countably many such columns.
struct State {
  int k;
  long j;

  friend bool operator==(const State& a, const State& b) { return a.k == b.k && a.j == b.j; }
  friend bool operator<(const State& a, const State& b) {
    return std::tie(a.k, a.j) < std::tie(b.k, b.j);
  }
  std::string to_string() const {
    return "(" + std::to_string(k) + "," + std::to_string(j) + ")";
  }
};

struct StateSpace {
  int n_columns;

  explicit StateSpace(int n) : n_columns(n) {
    if (n < 1) throw ValidationError("state space needs at least one column");
  }
  void require_state(const State& s) const {
    if (s.k < 0 || s.k >= n_columns || s.j < 1)
      throw ValidationError("state " + s.to_string() + " outside a space with " +
                            std::to_string(n_columns) + " columns");
  }
};

}  // namespace prevision
