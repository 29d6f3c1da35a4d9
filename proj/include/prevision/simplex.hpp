#pragma once

#include <vector>

#include "prevision/rational.hpp"
#include "prevision/errors.hpp"

namespace prevision {

// Exact linear programming over the rationals: maximize c.z subject to
// A z = b, z >= 0. Two-phase tableau method; the smallest-index pivot rule
// rules out cycling, so every solve terminates.
struct LpResult {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  Rational objective;
  std::vector<Rational> solution;
};

namespace detail {

class Tableau {
 public:
  Tableau(std::vector<std::vector<Rational>> rows, std::vector<int> basis)
      : rows_(std::move(rows)), basis_(std::move(basis)) {}

  // maximize the costs in `c` (one per column, RHS excluded) over the columns
  // in [0, width); returns false when unbounded
  bool optimize(const std::vector<Rational>& c, std::size_t width) {
    for (int guard = 0; guard < 100000; ++guard) {
      std::size_t enter = width;
      for (std::size_t j = 0; j < width; ++j) {
        Rational reduced = c[j];
        for (std::size_t i = 0; i < rows_.size(); ++i)
          reduced -= c[std::size_t(basis_[i])] * rows_[i][j];
        if (reduced > 0) {
          enter = j;
          break;  // smallest index enters
        }
      }
      if (enter == width) return true;
      std::size_t leave = rows_.size();
      Rational ratio;
      for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i][enter] <= 0) continue;
        Rational r = rhs(i) / rows_[i][enter];
        if (leave == rows_.size() || r < ratio ||
            (r == ratio && basis_[i] < basis_[leave])) {
          leave = i;
          ratio = r;
        }
      }
      if (leave == rows_.size()) return false;
      pivot(leave, enter);
    }
    throw PreconditionFailed("pivot budget exhausted");
  }

  void pivot(std::size_t row, std::size_t col) {
    Rational inv = rows_[row][col];
    for (auto& v : rows_[row]) v /= inv;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i == row || rows_[i][col] == 0) continue;
      Rational f = rows_[i][col];
      for (std::size_t j = 0; j < rows_[i].size(); ++j) rows_[i][j] -= f * rows_[row][j];
    }
    basis_[row] = int(col);
  }

  const Rational& rhs(std::size_t i) const { return rows_[i].back(); }
  std::vector<std::vector<Rational>>& rows() { return rows_; }
  std::vector<int>& basis() { return basis_; }

 private:
  std::vector<std::vector<Rational>> rows_;
  std::vector<int> basis_;
};

}  // namespace detail

inline LpResult solve_lp_max(std::vector<std::vector<Rational>> A, std::vector<Rational> b,
                             const std::vector<Rational>& c) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  for (auto& row : A)
    if (row.size() != n) throw ValidationError("constraint width disagrees with cost vector");
  if (b.size() != m) throw ValidationError("one right-hand side per constraint is required");

  // phase 1: feasibility via artificial variables
  std::vector<std::vector<Rational>> rows(m);
  std::vector<int> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    bool neg = b[i] < 0;
    rows[i].resize(n + m + 1);
    for (std::size_t j = 0; j < n; ++j) rows[i][j] = neg ? Rational(-A[i][j]) : A[i][j];
    rows[i][n + i] = 1;
    rows[i][n + m] = neg ? Rational(-b[i]) : b[i];
    basis[i] = int(n + i);
  }
  detail::Tableau t(std::move(rows), std::move(basis));
  std::vector<Rational> phase1(n + m, Rational(0));
  for (std::size_t j = n; j < n + m; ++j) phase1[j] = -1;
  t.optimize(phase1, n + m);
  Rational infeasibility(0);
  for (std::size_t i = 0; i < t.rows().size(); ++i)
    if (t.basis()[i] >= int(n)) infeasibility += t.rhs(i);
  if (infeasibility != 0) return {LpResult::Status::infeasible, Rational(0), {}};

  // drive leftover artificials out of the basis; rows that cannot pivot are
  // redundant constraints
  for (std::size_t i = 0; i < t.rows().size();) {
    if (t.basis()[i] < int(n)) {
      ++i;
      continue;
    }
    std::size_t j = 0;
    while (j < n && t.rows()[i][j] == 0) ++j;
    if (j < n) {
      t.pivot(i, j);
      ++i;
    } else {
      t.rows().erase(t.rows().begin() + long(i));
      t.basis().erase(t.basis().begin() + long(i));
    }
  }

  // phase 2 on the original columns only
  std::vector<Rational> costs(n + m, Rational(0));
  for (std::size_t j = 0; j < n; ++j) costs[j] = c[j];
  if (!t.optimize(costs, n)) return {LpResult::Status::unbounded, Rational(0), {}};

  LpResult out;
  out.status = LpResult::Status::optimal;
  out.solution.assign(n, Rational(0));
  for (std::size_t i = 0; i < t.rows().size(); ++i)
    if (t.basis()[i] < int(n)) out.solution[std::size_t(t.basis()[i])] = t.rhs(i);
  for (std::size_t j = 0; j < n; ++j) out.objective += c[j] * out.solution[j];
  return out;
}

}  // namespace prevision
