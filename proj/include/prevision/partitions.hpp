#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prevision/charge.hpp"

namespace prevision {

// Partition of the state space into conditioning cells. Three shapes arise:
// rows (cell j collects index j of every column), columns, and a finite
// explicit list of events that must tile the space.
class Partition {
 public:
  enum class Kind { cross_section, columns, explicit_cells };

  static Partition cross_section(int n_columns) {
    return Partition(Kind::cross_section, n_columns, {});
  }
  static Partition columns(int n_columns) {
    return Partition(Kind::columns, n_columns, {});
  }
  static Partition explicit_cells(std::vector<StructuredEvent> cells) {
    if (cells.empty()) throw ValidationError("partition needs at least one cell");
    int n = cells.front().n_columns();
    auto seen = StructuredEvent::none(n);
    for (auto& c : cells) {
      if (c.n_columns() != n)
        throw ValidationError("partition cells live on different state spaces");
      if (c.is_empty()) throw ValidationError("partition cell is empty");
      if (!intersect(seen, c).is_empty())
        throw ValidationError("partition cells overlap");
      seen = unite(seen, c);
    }
    if (!seen.is_whole()) throw ValidationError("partition cells do not cover the space");
    return Partition(Kind::explicit_cells, n, std::move(cells));
  }

  Kind kind() const { return kind_; }
  int n_columns() const { return n_columns_; }
  const std::vector<StructuredEvent>& cells() const { return cells_; }

  StructuredEvent row_cell(long j) const {
    std::vector<State> members;
    for (int k = 0; k < n_columns_; ++k) members.push_back(State{k, j});
    return StructuredEvent::states(n_columns_, members);
  }

 private:
  Partition(Kind kind, int n, std::vector<StructuredEvent> cells)
      : kind_(kind), n_columns_(n), cells_(std::move(cells)) {
    if (n < 1) throw ValidationError("partition needs at least one column");
  }
  Kind kind_;
  int n_columns_;
  std::vector<StructuredEvent> cells_;
};

// Conditional previsions of x across a partition's cells, together with the
// variable that takes the cell's prevision on the cell.
struct PartitionProfile {
  // finite kinds: one entry per cell in order
  std::vector<Rational> cell_probability_list;
  std::vector<Rational> cell_prevision_list;
  // row kind: cell j's probability and prevision as single-column sequences
  std::optional<StructuredRV> cell_probabilities;
  std::optional<StructuredRV> cell_previsions;
  StructuredRV composed;  // equals the cell's prevision throughout each cell

  // Range of the conditional previsions over all cells.
  struct Range {
    ExtRational lower, upper;
    bool lower_attained = false, upper_attained = false;
  };
  Range range() const {
    Range r;
    if (cell_previsions) {
      auto lo = cell_previsions->inf_all(), hi = cell_previsions->sup_all();
      r.lower = lo.value;
      r.upper = hi.value;
      r.lower_attained = lo.attained;
      r.upper_attained = hi.attained;
      return r;
    }
    r.lower = ExtRational(cell_prevision_list.front());
    r.upper = r.lower;
    r.lower_attained = r.upper_attained = true;
    for (auto& v : cell_prevision_list) {
      if (ExtRational(v) < r.lower) r.lower = ExtRational(v);
      if (r.upper < ExtRational(v)) r.upper = ExtRational(v);
    }
    return r;
  }
};

namespace detail {

// Conditional prevision of x on one explicitly given cell.
inline Rational cell_prevision(const Charge& prob, const StructuredRV& x,
                               const StructuredEvent& cell, const Rational& p) {
  if (p > 0) return prob.prevision(masked(x, cell)) / p;
  for (auto& [event, charge] : prob.attached()) {
    if (event == cell) return charge.prevision(masked(x, cell));
  }
  throw NullConditioningEvent("partition cell has probability 0 and no attached charge");
}

inline PartitionProfile finite_cells_profile(const Charge& prob, const StructuredRV& x,
                                             const std::vector<StructuredEvent>& cells) {
  PartitionProfile out{{}, {}, std::nullopt, std::nullopt,
                       StructuredRV::constant(x.n_columns(), Rational(0))};
  StructuredRV composed = StructuredRV::constant(x.n_columns(), Rational(0));
  for (auto& cell : cells) {
    Rational p = prob.probability(cell);
    Rational q = cell_prevision(prob, x, cell, p);
    out.cell_probability_list.push_back(p);
    out.cell_prevision_list.push_back(q);
    composed = composed + q * StructuredRV::indicator(cell);
  }
  out.composed = composed;
  return out;
}

inline PartitionProfile cross_section_profile(const Charge& prob, const StructuredRV& x) {
  const int n = x.n_columns();
  // Tail-bearing columns drive the remote cells; their ratios must agree or
  // the cell previsions have no sequence form.
  std::optional<Rational> ratio;
  Rational total_coef(0);
  GeoSeq numerator_tail;  // remote numerator divided by ratio^j
  long horizon = 0;
  for (int k = 0; k < n; ++k) {
    const auto& c = prob.col(k);
    for (auto& [j, w] : c.atoms) horizon = std::max(horizon, j);
    if (c.tail) {
      if (ratio && *ratio != c.tail->ratio)
        throw UnstructuredResult("column tail ratios differ across the partition");
      ratio = c.tail->ratio;
      total_coef += c.tail->coef;
      horizon = std::max(horizon, c.tail->start);
      numerator_tail = numerator_tail + c.tail->coef * x.col(k).tail;
    }
    for (auto& [j, v] : x.col(k).exceptions) horizon = std::max(horizon, j);
  }
  if (!ratio)
    throw NullConditioningEvent(
        "every remote row has probability 0 and no attached charge");

  GeoSeq p_tail = GeoSeq::geometric(total_coef, *ratio);
  GeoSeq q_tail = Rational(1) / total_coef * numerator_tail;

  std::map<long, Rational> p_exc, q_exc;
  Partition shape = Partition::cross_section(n);
  for (long j = 1; j <= horizon; ++j) {
    auto cell = shape.row_cell(j);
    Rational p = prob.probability(cell);
    Rational q = cell_prevision(prob, x, cell, p);
    p_exc[j] = p;
    q_exc[j] = q;
  }

  std::vector<StructuredRV::Column> pcol(1), qcol(1);
  pcol[0] = {p_exc, p_tail};
  qcol[0] = {q_exc, q_tail};
  PartitionProfile out{{}, {}, StructuredRV(std::move(pcol)), StructuredRV(std::move(qcol)),
                       StructuredRV::constant(n, Rational(0))};

  std::vector<StructuredRV::Column> ycols(static_cast<std::size_t>(n));
  const auto& qc = out.cell_previsions->col(0);
  for (auto& yc : ycols) yc = {qc.exceptions, qc.tail};
  out.composed = StructuredRV(std::move(ycols));
  return out;
}

}  // namespace detail

inline PartitionProfile prevision_given_partition(const Charge& prob, const StructuredRV& x,
                                                  const Partition& partition) {
  if (x.n_columns() != prob.n_columns() || partition.n_columns() != prob.n_columns())
    throw ValidationError("charge, variable, and partition must share the state space");
  switch (partition.kind()) {
    case Partition::Kind::columns: {
      std::vector<StructuredEvent> cells;
      for (int k = 0; k < prob.n_columns(); ++k)
        cells.push_back(StructuredEvent::column(prob.n_columns(), k));
      return detail::finite_cells_profile(prob, x, cells);
    }
    case Partition::Kind::explicit_cells:
      return detail::finite_cells_profile(prob, x, partition.cells());
    case Partition::Kind::cross_section:
      return detail::cross_section_profile(prob, x);
  }
  throw PreconditionFailed("unreachable partition kind");
}

// Does the prevision of x sit inside the closed range spanned by its
// conditional previsions across the partition?
struct ConglomerabilityVerdict {
  Rational value;  // prevision of x
  PartitionProfile::Range range;
  bool holds = false;
};

inline ConglomerabilityVerdict conglomerability_verdict(const Charge& prob,
                                                        const StructuredRV& x,
                                                        const Partition& partition) {
  auto profile = prevision_given_partition(prob, x, partition);
  ConglomerabilityVerdict v{prob.prevision(x), profile.range(), false};
  v.holds = !(ExtRational(v.value) < v.range.lower) && !(v.range.upper < ExtRational(v.value));
  return v;
}

// Law of total previsions: the prevision of x against the prevision of the
// composed cell-prevision variable.
struct TotalPrevisionsVerdict {
  Rational direct;    // prevision of x
  Rational composed;  // prevision of the variable carrying cell previsions
  bool holds = false;
};

inline TotalPrevisionsVerdict total_previsions_verdict(const Charge& prob,
                                                       const StructuredRV& x,
                                                       const Partition& partition) {
  auto profile = prevision_given_partition(prob, x, partition);
  TotalPrevisionsVerdict v{prob.prevision(x), prob.prevision(profile.composed), false};
  v.holds = v.direct == v.composed;
  return v;
}

}  // namespace prevision
