#pragma once

#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "prevision/scoring.hpp"

namespace prevision {

// One forecast: a variable, the event the forecast is conditional on, the
// announced value, the rule scoring it, and a positive weight in the combined
// score.
struct ForecastEntry {
  StructuredRV variable;
  StructuredEvent conditioning;
  Rational forecast;
  LambdaMeasure rule;
  Rational coefficient = Rational(1);
};

// Infinitely many forecasts in one template, one per index j at and past
// start. Two supports arise: cells (a shared variable forecast conditional on
// row j) and diagonal (unconditional variables worth off(j) away from row j
// and on[k](j) at the state (k, j)).
struct FamilyTail {
  enum class Support { cells, diagonal };
  Support support = Support::cells;
  long start = 1;
  std::optional<StructuredRV> variable;  // cells
  GeoSeq off_value;                      // diagonal
  std::vector<GeoSeq> on_values;         // diagonal, one per column
  GeoSeq forecast;
  GeoSeq coefficient = GeoSeq(Rational(1));
  MeasureFamily rule = MeasureFamily::constant(LambdaMeasure::brier());
};

class ForecastSystem {
 public:
  ForecastSystem(int n_columns, std::vector<ForecastEntry> entries,
                 std::optional<FamilyTail> tail = std::nullopt)
      : n_columns_(n_columns), entries_(std::move(entries)), tail_(std::move(tail)) {
    if (n_columns_ < 1) throw ValidationError("forecast system needs at least one column");
    if (entries_.empty() && !tail_) throw EmptySystem("forecast system holds no forecasts");
    for (auto& e : entries_) {
      if (e.variable.n_columns() != n_columns_ || e.conditioning.n_columns() != n_columns_)
        throw ValidationError("forecast entry lives on a different state space");
      if (e.coefficient <= 0) throw ValidationError("entry coefficient must be positive");
    }
    if (tail_) {
      if (tail_->start < 1) throw ValidationError("family start must be at least 1");
      if (tail_->support == FamilyTail::Support::cells) {
        if (!tail_->variable)
          throw ValidationError("cells family needs its shared variable");
        if (tail_->variable->n_columns() != n_columns_)
          throw ValidationError("family variable lives on a different state space");
      } else {
        if (int(tail_->on_values.size()) != n_columns_)
          throw ValidationError("diagonal family needs one on-value sequence per column");
      }
      auto cs = tail_->coefficient.eventual_sign();
      if (cs.sign <= 0)
        throw ValidationError("family coefficients must stay positive");
      for (long j = tail_->start; j <= cs.threshold; ++j)
        if (tail_->coefficient.at(j) <= 0)
          throw ValidationError("family coefficients must stay positive");
    }
  }

  int n_columns() const { return n_columns_; }
  const std::vector<ForecastEntry>& entries() const { return entries_; }
  const std::optional<FamilyTail>& tail() const { return tail_; }

 private:
  int n_columns_;
  std::vector<ForecastEntry> entries_;
  std::optional<FamilyTail> tail_;
};

// Replacement announcements for the same system: one per entry, plus the
// sequence for the family when there is one.
struct RivalForecasts {
  std::vector<Rational> entry_forecasts;
  std::optional<GeoSeq> tail_forecast;
};

// Stake sizes for a book of fair bets on the system's forecasts, any sign.
struct SignedWeights {
  std::vector<Rational> entry_weights;
  std::optional<GeoSeq> tail_weight;
};

namespace detail {

// Score of the announcement q(j) against the outcome x(j) under the rule at
// j, as a formula valid from settled_from on; earlier indices must be
// evaluated concretely. Works by fixing the eventual layout of x, q, and the
// breakpoints, then integrating piece by piece in sequence arithmetic.
struct SeqScore {
  long settled_from;
  GeoSeq tail;
};

inline SeqScore score_of_seq(const GeoSeq& x, const GeoSeq& q, const MeasureFamily& fam) {
  if (fam.is_constant() && fam.base().kind() == LambdaMeasure::Kind::sqrt_scaled) {
    if (x.is_constant() && q.is_constant())
      return {1, GeoSeq(fam.base().score(x.limit(), q.limit()))};
    throw UnsupportedRule("square-root rules cannot be scored along a varying sequence");
  }
  if (x == q) return {1, GeoSeq()};

  std::vector<GeoSeq> bp, dens;
  if (fam.is_constant()) {
    for (auto& b : fam.base().breakpoints()) bp.push_back(GeoSeq(b));
    for (auto& f : fam.base().densities()) dens.push_back(GeoSeq(f));
  } else {
    bp = fam.breakpoint_seqs();
    dens = fam.density_seqs();
  }

  auto ds = (x - q).eventual_sign();
  long settle = ds.threshold + 1;
  for (size_t i = 0; i + 1 < bp.size(); ++i) {
    auto os = (bp[i + 1] - bp[i]).eventual_sign();
    if (os.sign <= 0) throw ValidationError("family breakpoints fail to stay ordered");
    settle = std::max(settle, os.threshold + 1);
  }
  for (auto& f : dens) {
    auto fs = f.eventual_sign();
    if (fs.sign <= 0) throw ValidationError("family densities fail to stay positive");
    settle = std::max(settle, fs.threshold + 1);
  }

  GeoSeq lo = ds.sign > 0 ? q : x;
  GeoSeq hi = ds.sign > 0 ? x : q;
  size_t below = 0;
  std::vector<size_t> inside;
  for (size_t i = 0; i < bp.size(); ++i) {
    GeoSeq rel_lo = bp[i] - lo, rel_hi = bp[i] - hi;
    int s_lo = 0, s_hi = 0;
    if (!rel_lo.is_zero()) {
      auto e = rel_lo.eventual_sign();
      s_lo = e.sign;
      settle = std::max(settle, e.threshold + 1);
    }
    if (!rel_hi.is_zero()) {
      auto e = rel_hi.eventual_sign();
      s_hi = e.sign;
      settle = std::max(settle, e.threshold + 1);
    }
    if (s_lo <= 0)
      ++below;
    else if (s_hi < 0)
      inside.push_back(i);
  }

  std::vector<GeoSeq> walls = {lo};
  for (size_t i : inside) walls.push_back(bp[i]);
  walls.push_back(hi);
  GeoSeq total;
  Rational half = Rational(1) / 2;
  for (size_t t = 0; t + 1 < walls.size(); ++t) {
    const GeoSeq& f = dens[below + t];
    GeoSeq len = walls[t + 1] - walls[t];
    GeoSeq sq = walls[t + 1] * walls[t + 1] - walls[t] * walls[t];
    GeoSeq piece = f * (x * len - half * sq);
    total = ds.sign > 0 ? total + piece : total - piece;
  }
  return {settle, total};
}

// Column whose values are concrete below settle (and at the listed extra
// indices) and follow the formula tail beyond.
inline StructuredRV::Column assemble_column(long settle, const std::set<long>& extra,
                                            const std::function<Rational(long)>& value_at,
                                            const GeoSeq& tail) {
  if (!tail.contracting())
    throw DivergentCombination("combined column values diverge: " + tail.to_string());
  StructuredRV::Column col;
  col.tail = tail;
  for (long j = 1; j < settle; ++j) col.exceptions[j] = value_at(j);
  for (long j : extra)
    if (j >= settle) col.exceptions[j] = value_at(j);
  return col;
}

inline std::set<long> exception_indices(const StructuredRV& x, int k) {
  std::set<long> out;
  for (auto& [j, v] : x.col(k).exceptions) out.insert(j);
  return out;
}

}  // namespace detail

// Net payout of the book of fair bets w_i * 1_H_i * (X_i - p_i), positive
// when the forecaster pays.
inline StructuredRV combined_fair_loss(const ForecastSystem& sys, const SignedWeights& w) {
  const int n = sys.n_columns();
  if (w.entry_weights.size() != sys.entries().size())
    throw ValidationError("one weight per forecast entry is required");
  if (w.tail_weight.has_value() != sys.tail().has_value())
    throw ValidationError("tail weight must be given exactly when the system has a family");
  StructuredRV total = StructuredRV::constant(n, Rational(0));
  for (size_t i = 0; i < sys.entries().size(); ++i) {
    const auto& e = sys.entries()[i];
    total = total + w.entry_weights[i] * masked(e.variable - e.forecast, e.conditioning);
  }
  if (sys.tail()) {
    const FamilyTail& ft = *sys.tail();
    const GeoSeq& weight = *w.tail_weight;
    std::vector<StructuredRV::Column> cols(static_cast<std::size_t>(n));
    if (ft.support == FamilyTail::Support::cells) {
      for (int k = 0; k < n; ++k) {
        const auto& xc = ft.variable->col(k);
        GeoSeq tail = weight * (xc.tail - ft.forecast);
        auto value_at = [&, k](long j) {
          if (j < ft.start) return Rational(0);
          return Rational(weight.at(j) * (ft.variable->at(State{k, j}) - ft.forecast.at(j)));
        };
        cols[std::size_t(k)] =
            detail::assemble_column(ft.start, detail::exception_indices(*ft.variable, k),
                                    value_at, tail);
      }
    } else {
      GeoSeq offterm = weight * (ft.off_value - ft.forecast);
      Rational t_off = offterm.series_sum(ft.start);
      for (int k = 0; k < n; ++k) {
        GeoSeq tail =
            GeoSeq(t_off) - offterm + weight * (ft.on_values[std::size_t(k)] - ft.forecast);
        auto value_at = [&, k](long j) {
          if (j < ft.start) return t_off;
          return Rational(t_off - offterm.at(j) +
                          weight.at(j) *
                              (ft.on_values[std::size_t(k)].at(j) - ft.forecast.at(j)));
        };
        cols[std::size_t(k)] = detail::assemble_column(ft.start, {}, value_at, tail);
      }
    }
    total = total + StructuredRV(std::move(cols));
  }
  return total;
}

inline StructuredRV combined_fair_loss(const ForecastSystem& sys) {
  SignedWeights w;
  for (auto& e : sys.entries()) w.entry_weights.push_back(e.coefficient);
  if (sys.tail()) w.tail_weight = sys.tail()->coefficient;
  return combined_fair_loss(sys, w);
}

// Total weighted score of announcements across the whole system, as a
// variable on the state space. Passing rivals scores their announcements on
// the same variables, events, rules, and weights.
inline StructuredRV combined_score(const ForecastSystem& sys,
                                   const RivalForecasts* rival = nullptr) {
  const int n = sys.n_columns();
  if (rival) {
    if (rival->entry_forecasts.size() != sys.entries().size())
      throw ValidationError("one rival forecast per entry is required");
    if (rival->tail_forecast.has_value() != sys.tail().has_value())
      throw ValidationError("rival tail forecast must be given exactly when there is a family");
  }
  StructuredRV total = StructuredRV::constant(n, Rational(0));
  for (size_t i = 0; i < sys.entries().size(); ++i) {
    const auto& e = sys.entries()[i];
    const Rational f = rival ? rival->entry_forecasts[i] : e.forecast;
    MeasureFamily fam = MeasureFamily::constant(e.rule);
    std::vector<StructuredRV::Column> cols(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const auto& xc = e.variable.col(k);
      auto s = detail::score_of_seq(xc.tail, GeoSeq(f), fam);
      auto value_at = [&, k](long j) { return e.rule.score(e.variable.at(State{k, j}), f); };
      cols[std::size_t(k)] = detail::assemble_column(
          s.settled_from, detail::exception_indices(e.variable, k), value_at, s.tail);
    }
    total = total + e.coefficient * masked(StructuredRV(std::move(cols)), e.conditioning);
  }
  if (sys.tail()) {
    const FamilyTail& ft = *sys.tail();
    const GeoSeq q = rival ? *rival->tail_forecast : ft.forecast;
    std::vector<StructuredRV::Column> cols(static_cast<std::size_t>(n));
    if (ft.support == FamilyTail::Support::cells) {
      for (int k = 0; k < n; ++k) {
        const auto& xc = ft.variable->col(k);
        auto s = detail::score_of_seq(xc.tail, q, ft.rule);
        long settle = std::max(s.settled_from, ft.start);
        GeoSeq tail = ft.coefficient * s.tail;
        auto value_at = [&, k](long j) {
          if (j < ft.start) return Rational(0);
          return Rational(ft.coefficient.at(j) *
                          ft.rule.instantiate(j).score(ft.variable->at(State{k, j}), q.at(j)));
        };
        cols[std::size_t(k)] = detail::assemble_column(
            settle, detail::exception_indices(*ft.variable, k), value_at, tail);
      }
    } else {
      auto s_off = detail::score_of_seq(ft.off_value, q, ft.rule);
      GeoSeq offscore = ft.coefficient * s_off.tail;
      long series_from = std::max(ft.start, s_off.settled_from);
      Rational t_offscore = offscore.series_sum(series_from);
      for (long j = ft.start; j < series_from; ++j)
        t_offscore += ft.coefficient.at(j) * ft.rule.instantiate(j).score(ft.off_value.at(j), q.at(j));
      auto offscore_at = [&](long j) {
        return Rational(ft.coefficient.at(j) *
                        ft.rule.instantiate(j).score(ft.off_value.at(j), q.at(j)));
      };
      for (int k = 0; k < n; ++k) {
        auto s_on = detail::score_of_seq(ft.on_values[std::size_t(k)], q, ft.rule);
        long settle = std::max({s_off.settled_from, s_on.settled_from, ft.start});
        GeoSeq tail = GeoSeq(t_offscore) - offscore + ft.coefficient * s_on.tail;
        auto value_at = [&, k](long j) {
          if (j < ft.start) return t_offscore;
          return Rational(t_offscore - offscore_at(j) +
                          ft.coefficient.at(j) *
                              ft.rule.instantiate(j).score(
                                  ft.on_values[std::size_t(k)].at(j), q.at(j)));
        };
        cols[std::size_t(k)] = detail::assemble_column(settle, {}, value_at, tail);
      }
    }
    total = total + StructuredRV(std::move(cols));
  }
  return total;
}

// Sum of w_i * 1_H_i * |X_i - p_i|: the total stake the system puts at risk.
inline StructuredRV combined_absolute_deviation(const ForecastSystem& sys) {
  const int n = sys.n_columns();
  StructuredRV total = StructuredRV::constant(n, Rational(0));
  for (auto& e : sys.entries()) {
    total = total + e.coefficient * masked(abs(e.variable - e.forecast), e.conditioning);
  }
  if (sys.tail()) {
    const FamilyTail& ft = *sys.tail();
    std::vector<StructuredRV::Column> cols(static_cast<std::size_t>(n));
    if (ft.support == FamilyTail::Support::cells) {
      // row cells are disjoint, so the family's contribution is the absolute
      // value of its fair-loss part
      ForecastSystem tail_only(n, {}, ft);
      SignedWeights w;
      w.tail_weight = ft.coefficient;
      total = total + abs(combined_fair_loss(tail_only, w));
    } else {
      GeoSeq offterm = ft.coefficient * (ft.off_value - ft.forecast);
      auto es = offterm.eventual_sign();
      GeoSeq absoff = es.sign < 0 ? -offterm : offterm;
      long series_from = std::max(ft.start, es.threshold + 1);
      Rational t_abs = absoff.series_sum(series_from);
      for (long j = ft.start; j < series_from; ++j) t_abs += abs(offterm.at(j));
      for (int k = 0; k < n; ++k) {
        GeoSeq onterm = ft.coefficient * (ft.on_values[std::size_t(k)] - ft.forecast);
        auto on_es = onterm.eventual_sign();
        GeoSeq abson = on_es.sign < 0 ? -onterm : onterm;
        long settle = std::max({series_from, on_es.threshold + 1, ft.start});
        GeoSeq tail = GeoSeq(t_abs) - absoff + abson;
        auto value_at = [&, k](long j) {
          if (j < ft.start) return t_abs;
          return Rational(t_abs - abs(offterm.at(j)) + abs(onterm.at(j)));
        };
        cols[std::size_t(k)] = detail::assemble_column(settle, {}, value_at, tail);
      }
      total = total + StructuredRV(std::move(cols));
    }
  }
  return total;
}

// Margin by which refusing every option beats the combined loss: the exact
// infimum over all states when positive, nothing otherwise.
inline std::optional<Rational> abstain_margin(const StructuredRV& loss) {
  auto lo = loss.inf_all();
  if (lo.value > ExtRational(Rational(0))) return lo.value.value();
  return std::nullopt;
}

}  // namespace prevision
