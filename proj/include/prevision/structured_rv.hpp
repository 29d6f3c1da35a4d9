#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "prevision/geoseq.hpp"
#include "prevision/state_space.hpp"

namespace prevision {

// Event with a finitely describable trace on every column: either finitely
// many member indices or all but finitely many.
class StructuredEvent {
 public:
  struct Column {
    bool cofinite = false;            // true: indices lists the non-members
    std::set<long> indices;
  };

  explicit StructuredEvent(std::vector<Column> cols) : cols_(std::move(cols)) {
    if (cols_.empty()) throw ValidationError("event needs at least one column");
    for (auto& c : cols_)
      for (long j : c.indices)
        if (j < 1) throw ValidationError("event index below 1");
  }

  static StructuredEvent none(int n_columns) {
    return StructuredEvent(std::vector<Column>(n_columns));
  }
  static StructuredEvent whole(int n_columns) {
    std::vector<Column> cols(n_columns);
    for (auto& c : cols) c.cofinite = true;
    return StructuredEvent(std::move(cols));
  }
  // The event "the state lies in column k".
  static StructuredEvent column(int n_columns, int k) {
    std::vector<Column> cols(n_columns);
    cols.at(k).cofinite = true;
    return StructuredEvent(std::move(cols));
  }
  static StructuredEvent states(int n_columns, const std::vector<State>& members) {
    std::vector<Column> cols(n_columns);
    for (auto& s : members) {
      StateSpace(n_columns).require_state(s);
      cols[s.k].indices.insert(s.j);
    }
    return StructuredEvent(std::move(cols));
  }

  int n_columns() const { return int(cols_.size()); }
  const Column& col(int k) const { return cols_.at(k); }

  bool contains(const State& s) const {
    const Column& c = cols_.at(s.k);
    bool listed = c.indices.count(s.j) > 0;
    return c.cofinite ? !listed : listed;
  }
  bool is_empty() const {
    for (auto& c : cols_)
      if (c.cofinite || !c.indices.empty()) return false;
    return true;
  }
  bool is_whole() const {
    for (auto& c : cols_)
      if (!c.cofinite || !c.indices.empty()) return false;
    return true;
  }

  StructuredEvent complement() const {
    std::vector<Column> cols = cols_;
    for (auto& c : cols) c.cofinite = !c.cofinite;
    return StructuredEvent(std::move(cols));
  }

  friend StructuredEvent intersect(const StructuredEvent& a, const StructuredEvent& b) {
    require_same_columns(a, b);
    std::vector<Column> cols(a.cols_.size());
    for (size_t k = 0; k < cols.size(); ++k) {
      const Column &x = a.cols_[k], &y = b.cols_[k];
      Column& out = cols[k];
      if (!x.cofinite && !y.cofinite) {
        for (long j : x.indices)
          if (y.indices.count(j)) out.indices.insert(j);
      } else if (x.cofinite && y.cofinite) {
        out.cofinite = true;
        out.indices = x.indices;
        out.indices.insert(y.indices.begin(), y.indices.end());
      } else {
        const Column& fin = x.cofinite ? y : x;
        const Column& cof = x.cofinite ? x : y;
        for (long j : fin.indices)
          if (!cof.indices.count(j)) out.indices.insert(j);
      }
    }
    return StructuredEvent(std::move(cols));
  }
  friend StructuredEvent unite(const StructuredEvent& a, const StructuredEvent& b) {
    return intersect(a.complement(), b.complement()).complement();
  }
  friend StructuredEvent subtract(const StructuredEvent& a, const StructuredEvent& b) {
    return intersect(a, b.complement());
  }

  friend bool operator==(const StructuredEvent& a, const StructuredEvent& b) {
    if (a.cols_.size() != b.cols_.size()) return false;
    for (size_t k = 0; k < a.cols_.size(); ++k) {
      if (a.cols_[k].cofinite != b.cols_[k].cofinite ||
          a.cols_[k].indices != b.cols_[k].indices)
        return false;
    }
    return true;
  }
  friend bool operator!=(const StructuredEvent& a, const StructuredEvent& b) {
    return !(a == b);
  }

 private:
  static void require_same_columns(const StructuredEvent& a, const StructuredEvent& b) {
    if (a.cols_.size() != b.cols_.size())
      throw ValidationError("events live on different state spaces");
  }
  std::vector<Column> cols_;
};

// Random variable whose trace on every column is a geometric-tail sequence
// with finitely many exceptional indices. Tails must converge, so variables
// are bounded and have a definite value at the remote end of each column.
class StructuredRV {
 public:
  struct Column {
    std::map<long, Rational> exceptions;
    GeoSeq tail;
  };

  explicit StructuredRV(std::vector<Column> cols) : cols_(std::move(cols)) {
    if (cols_.empty()) throw ValidationError("variable needs at least one column");
    for (auto& c : cols_) {
      if (!c.tail.contracting())
        throw ValidationError("variable tail must converge: " + c.tail.to_string());
      for (auto& [j, v] : c.exceptions)
        if (j < 1) throw ValidationError("variable exception index below 1");
      // canonical form: exceptions that merely restate the tail are dropped
      for (auto it = c.exceptions.begin(); it != c.exceptions.end();) {
        if (it->second == c.tail.at(it->first))
          it = c.exceptions.erase(it);
        else
          ++it;
      }
    }
  }

  static StructuredRV constant(int n_columns, const Rational& v) {
    return StructuredRV(std::vector<Column>(std::size_t(n_columns), Column{{}, GeoSeq(v)}));
  }
  static StructuredRV indicator(const StructuredEvent& e) {
    std::vector<Column> cols(std::size_t(e.n_columns()));
    for (int k = 0; k < e.n_columns(); ++k) {
      const auto& ec = e.col(k);
      cols[k].tail = GeoSeq(Rational(ec.cofinite ? 1 : 0));
      for (long j : ec.indices) cols[k].exceptions[j] = Rational(ec.cofinite ? 0 : 1);
    }
    return StructuredRV(std::move(cols));
  }

  int n_columns() const { return int(cols_.size()); }
  const Column& col(int k) const { return cols_.at(k); }

  Rational at(const State& s) const {
    const Column& c = cols_.at(s.k);
    if (s.j < 1) throw ValidationError("state index below 1");
    auto it = c.exceptions.find(s.j);
    return it != c.exceptions.end() ? it->second : c.tail.at(s.j);
  }

  friend StructuredRV operator+(const StructuredRV& a, const StructuredRV& b) {
    return combine(a, b, [](const GeoSeq& x, const GeoSeq& y) { return x + y; },
                   [](const Rational& x, const Rational& y) { return x + y; });
  }
  friend StructuredRV operator-(const StructuredRV& a, const StructuredRV& b) {
    return combine(a, b, [](const GeoSeq& x, const GeoSeq& y) { return x - y; },
                   [](const Rational& x, const Rational& y) { return x - y; });
  }
  friend StructuredRV operator*(const StructuredRV& a, const StructuredRV& b) {
    return combine(a, b, [](const GeoSeq& x, const GeoSeq& y) { return x * y; },
                   [](const Rational& x, const Rational& y) { return x * y; });
  }
  StructuredRV operator-() const { return constant(n_columns(), Rational(0)) - *this; }
  friend StructuredRV operator*(const Rational& s, const StructuredRV& a) {
    return constant(a.n_columns(), s) * a;
  }
  friend StructuredRV operator+(const StructuredRV& a, const Rational& s) {
    return a + constant(a.n_columns(), s);
  }
  friend StructuredRV operator-(const StructuredRV& a, const Rational& s) {
    return a - constant(a.n_columns(), s);
  }

  friend bool operator==(const StructuredRV& a, const StructuredRV& b) {
    if (a.cols_.size() != b.cols_.size()) return false;
    for (size_t k = 0; k < a.cols_.size(); ++k) {
      if (a.cols_[k].exceptions != b.cols_[k].exceptions || a.cols_[k].tail != b.cols_[k].tail)
        return false;
    }
    return true;
  }
  friend bool operator!=(const StructuredRV& a, const StructuredRV& b) { return !(a == b); }

  // Pointwise absolute value. Indices where the tail sign is not yet settled
  // become explicit exceptions; past the sign threshold the tail is flipped
  // or kept whole.
  friend StructuredRV abs(const StructuredRV& a) {
    std::vector<Column> cols(a.cols_.size());
    for (size_t k = 0; k < a.cols_.size(); ++k) {
      const Column& c = a.cols_[k];
      auto es = c.tail.eventual_sign();
      Column& out = cols[k];
      out.tail = es.sign < 0 ? -c.tail : c.tail;
      for (long j = 1; j <= es.threshold; ++j)
        if (!c.exceptions.count(j)) out.exceptions[j] = abs(c.tail.at(j));
      for (auto& [j, v] : c.exceptions) out.exceptions[j] = abs(v);
    }
    return StructuredRV(std::move(cols));
  }

  struct Extremum {
    ExtRational value;
    bool attained;
    State witness;  // meaningful when attained
  };

  Extremum inf_all() const {
    std::optional<Extremum> best;
    for (int k = 0; k < n_columns(); ++k) {
      const Column& c = cols_[std::size_t(k)];
      std::set<long> skip;
      for (auto& [j, v] : c.exceptions) skip.insert(j);
      auto tail_ext = c.tail.inf_over(1, skip);
      consider(best, {tail_ext.value, tail_ext.attained, State{k, tail_ext.witness}});
      for (auto& [j, v] : c.exceptions) consider(best, {ExtRational(v), true, State{k, j}});
    }
    return *best;
  }
  Extremum sup_all() const {
    Extremum e = (-*this).inf_all();
    ExtRational v = e.value.is_minus_inf() ? ExtRational::plus_inf()
                    : e.value.is_plus_inf() ? ExtRational::minus_inf()
                                            : ExtRational(-e.value.value());
    return {v, e.attained, e.witness};
  }

 private:
  template <class SeqOp, class ValOp>
  static StructuredRV combine(const StructuredRV& a, const StructuredRV& b, SeqOp sop,
                              ValOp vop) {
    if (a.cols_.size() != b.cols_.size())
      throw ValidationError("variables live on different state spaces");
    std::vector<Column> cols(a.cols_.size());
    for (size_t k = 0; k < a.cols_.size(); ++k) {
      const Column &x = a.cols_[k], &y = b.cols_[k];
      Column& out = cols[k];
      out.tail = sop(x.tail, y.tail);
      std::set<long> idx;
      for (auto& [j, v] : x.exceptions) idx.insert(j);
      for (auto& [j, v] : y.exceptions) idx.insert(j);
      for (long j : idx) {
        auto xv = x.exceptions.count(j) ? x.exceptions.at(j) : x.tail.at(j);
        auto yv = y.exceptions.count(j) ? y.exceptions.at(j) : y.tail.at(j);
        out.exceptions[j] = vop(xv, yv);
      }
    }
    return StructuredRV(std::move(cols));
  }

  static void consider(std::optional<Extremum>& best, Extremum cand) {
    if (!best || cand.value < best->value ||
        (cand.value == best->value && cand.attained && !best->attained))
      best = cand;
  }

  std::vector<Column> cols_;
};

inline StructuredRV masked(const StructuredRV& x, const StructuredEvent& h) {
  return StructuredRV::indicator(h) * x;
}

// Does rival improve on announced at every state, and by how much? The gap
// variable is announced minus rival; positivity everywhere gives pointwise
// dominance, a positive infimum gives a uniform margin.
enum class DominanceKind { none, simple, uniform };

struct DominanceResult {
  DominanceKind kind = DominanceKind::none;
  ExtRational margin;           // inf of the gap (uniform case: positive)
  bool margin_attained = false;
  std::optional<State> counterexample;  // state with gap <= 0 in the none case
};

inline DominanceResult dominance(const StructuredRV& announced, const StructuredRV& rival) {
  StructuredRV gap = announced - rival;
  auto inf = gap.inf_all();
  DominanceResult out;
  out.margin = inf.value;
  out.margin_attained = inf.attained;
  if (inf.attained && inf.value.is_finite() && inf.value.value() <= 0) {
    out.kind = DominanceKind::none;
    out.counterexample = inf.witness;
    return out;
  }
  if (inf.value.is_finite() && inf.value.value() > 0) {
    out.kind = DominanceKind::uniform;
    return out;
  }
  // Unattained nonpositive infimum: dominance is simple exactly when the gap
  // is still positive at every state.
  for (int k = 0; k < gap.n_columns(); ++k) {
    const auto& c = gap.col(k);
    for (auto& [j, v] : c.exceptions) {
      if (v <= 0) {
        out.kind = DominanceKind::none;
        out.counterexample = State{k, j};
        return out;
      }
    }
    auto es = c.tail.eventual_sign();
    if (es.sign <= 0) {
      long j = es.threshold + 1;
      while (c.exceptions.count(j)) ++j;
      out.kind = DominanceKind::none;
      out.counterexample = State{k, j};
      return out;
    }
    for (long j = 1; j <= es.threshold; ++j) {
      if (!c.exceptions.count(j) && c.tail.at(j) <= 0) {
        out.kind = DominanceKind::none;
        out.counterexample = State{k, j};
        return out;
      }
    }
  }
  out.kind = DominanceKind::simple;
  return out;
}

}  // namespace prevision
