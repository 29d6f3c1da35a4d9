#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "prevision/forecast_system.hpp"
#include "prevision/simplex.hpp"

namespace prevision {

// Verdict on a finite book of forecasts. Incoherent means some normalized
// choice of stakes wins at least `margin` in every state; the stakes and the
// audited whole-space minimum are included. Coherent comes with a probability
// vector on representative states under which every bet breaks even.
struct CoherenceReport {
  bool coherent = true;
  Rational margin;
  std::vector<Rational> stakes;
  ExtRational verified_margin = ExtRational(Rational(0));
  std::vector<std::pair<State, Rational>> supporting_weights;
};

// Rival found by projecting the announced vector onto the hull of the
// realizable outcome vectors under the score-weighted metric. epsilon is the
// squared distance: a uniform bound on how much every state's total score
// improves. inside means the announcement is already in the hull.
struct ProjectionReport {
  bool inside = true;
  std::vector<Rational> rival;
  Rational epsilon;
};

namespace detail {

// Finitely many states that realize every payoff vector the system can
// produce: all irregular indices of each bet's payout, plus one
// representative beyond them in each column. Requires every payout to settle
// to a constant along each column.
inline std::vector<State> representative_states(const ForecastSystem& sys,
                                                const std::vector<StructuredRV>& payoffs) {
  std::vector<State> states;
  for (int k = 0; k < sys.n_columns(); ++k) {
    std::set<long> special = {1};
    for (auto& g : payoffs) {
      if (!g.col(k).tail.is_constant())
        throw PreconditionFailed("payouts must settle to constants column by column");
      for (auto& [j, v] : g.col(k).exceptions) special.insert(j);
    }
    long rep = *special.rbegin() + 1;
    special.insert(rep);
    for (long j : special) states.push_back({k, j});
  }
  return states;
}

inline std::vector<StructuredRV> entry_payoffs(const ForecastSystem& sys) {
  if (sys.tail())
    throw PreconditionFailed("finite reduction needs finitely many forecasts");
  std::vector<StructuredRV> payoffs;
  for (auto& e : sys.entries())
    payoffs.push_back(masked(e.variable - e.forecast, e.conditioning));
  return payoffs;
}

// Exact Gaussian elimination on an augmented system; empty when singular.
inline std::optional<std::vector<Rational>> solve_linear(
    std::vector<std::vector<Rational>> a) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv][col] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(a[col], a[piv]);
    Rational inv = a[col][col];
    for (auto& v : a[col]) v /= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || a[i][col] == 0) continue;
      Rational f = a[i][col];
      for (std::size_t j = col; j <= n; ++j) a[i][j] -= f * a[col][j];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a[i][n];
  return x;
}

}  // namespace detail

inline CoherenceReport coherence_check(const ForecastSystem& sys) {
  auto payoffs = detail::entry_payoffs(sys);
  auto states = detail::representative_states(sys, payoffs);
  const std::size_t m = payoffs.size();
  const std::size_t S = states.size();
  std::vector<std::vector<Rational>> G(S, std::vector<Rational>(m));
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t i = 0; i < m; ++i) G[s][i] = payoffs[i].at(states[s]);

  // stakes split into signs, a uniform floor eps, one slack per state;
  // maximize the floor subject to total stake one
  const std::size_t n_lp = 2 * m + 1 + S;
  std::vector<std::vector<Rational>> A;
  std::vector<Rational> b;
  for (std::size_t s = 0; s < S; ++s) {
    std::vector<Rational> row(n_lp, Rational(0));
    for (std::size_t i = 0; i < m; ++i) {
      row[i] = G[s][i];
      row[m + i] = -G[s][i];
    }
    row[2 * m] = -1;
    row[2 * m + 1 + s] = -1;
    A.push_back(std::move(row));
    b.push_back(Rational(0));
  }
  std::vector<Rational> norm(n_lp, Rational(0));
  for (std::size_t i = 0; i < 2 * m; ++i) norm[i] = 1;
  A.push_back(std::move(norm));
  b.push_back(Rational(1));
  std::vector<Rational> c(n_lp, Rational(0));
  c[2 * m] = 1;
  LpResult lp = solve_lp_max(A, b, c);

  CoherenceReport out;
  if (lp.status == LpResult::Status::optimal && lp.objective > 0) {
    out.coherent = false;
    out.margin = lp.objective;
    for (std::size_t i = 0; i < m; ++i)
      out.stakes.push_back(lp.solution[i] - lp.solution[m + i]);
    StructuredRV book = combined_fair_loss(sys, SignedWeights{out.stakes, {}});
    out.verified_margin = book.inf_all().value;
    if (!(out.verified_margin > ExtRational(Rational(0))))
      throw PreconditionFailed("winning book failed the whole-space audit");
    return out;
  }

  // break-even weights exist exactly when no book wins uniformly
  std::vector<std::vector<Rational>> A2;
  std::vector<Rational> b2;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<Rational> row(S);
    for (std::size_t s = 0; s < S; ++s) row[s] = G[s][i];
    A2.push_back(std::move(row));
    b2.push_back(Rational(0));
  }
  A2.push_back(std::vector<Rational>(S, Rational(1)));
  b2.push_back(Rational(1));
  LpResult feas = solve_lp_max(A2, b2, std::vector<Rational>(S, Rational(0)));
  if (feas.status != LpResult::Status::optimal)
    throw PreconditionFailed("no break-even weights despite no winning book");
  for (std::size_t s = 0; s < S; ++s)
    if (feas.solution[s] != 0) out.supporting_weights.push_back({states[s], feas.solution[s]});
  return out;
}

inline ProjectionReport brier_projection_rival(const ForecastSystem& sys) {
  auto payoffs = detail::entry_payoffs(sys);
  auto states = detail::representative_states(sys, payoffs);
  const std::size_t m = sys.entries().size();
  std::vector<Rational> weight(m), target(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& e = sys.entries()[i];
    if (e.rule.kind() != LambdaMeasure::Kind::piecewise || !e.rule.breakpoints().empty())
      throw UnsupportedRule("projection needs one flat density per rule");
    weight[i] = e.coefficient * e.rule.densities()[0] / 2;
    target[i] = e.forecast;
  }

  // realizable outcome vectors, announced values filled in off the
  // conditioning events
  std::vector<std::vector<Rational>> points;
  for (const State& s : states) {
    std::vector<Rational> z(m);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& e = sys.entries()[i];
      z[i] = e.conditioning.contains(s) ? e.variable.at(s) : e.forecast;
    }
    if (std::find(points.begin(), points.end(), z) == points.end())
      points.push_back(std::move(z));
  }

  auto inner = [&](const std::vector<Rational>& a, const std::vector<Rational>& b) {
    Rational r(0);
    for (std::size_t i = 0; i < m; ++i) r += weight[i] * a[i] * b[i];
    return r;
  };
  auto minus = [&](const std::vector<Rational>& a, const std::vector<Rational>& b) {
    std::vector<Rational> r(m);
    for (std::size_t i = 0; i < m; ++i) r[i] = a[i] - b[i];
    return r;
  };

  // examine candidate supports by size then position; the projection's
  // minimal face is affinely independent, so some such subset is accepted
  const std::size_t P = points.size();
  long examined = 0;
  std::vector<std::size_t> subset;
  std::function<std::optional<ProjectionReport>(std::size_t, std::size_t)> search =
      [&](std::size_t size, std::size_t from) -> std::optional<ProjectionReport> {
    if (subset.size() == size) {
      if (++examined > 200000) throw PreconditionFailed("candidate budget exhausted");
      const std::size_t K = subset.size();
      std::vector<std::vector<Rational>> sys_eq(K + 1, std::vector<Rational>(K + 2, Rational(0)));
      for (std::size_t u = 0; u < K; ++u) {
        for (std::size_t t = 0; t < K; ++t)
          sys_eq[u][t] = 2 * inner(points[subset[t]], points[subset[u]]);
        sys_eq[u][K] = 1;
        sys_eq[u][K + 1] = 2 * inner(target, points[subset[u]]);
      }
      for (std::size_t t = 0; t < K; ++t) sys_eq[K][t] = 1;
      sys_eq[K][K + 1] = 1;
      auto sol = detail::solve_linear(std::move(sys_eq));
      if (!sol) return std::nullopt;
      for (std::size_t t = 0; t < K; ++t)
        if ((*sol)[t] < 0) return std::nullopt;
      std::vector<Rational> v(m, Rational(0));
      for (std::size_t t = 0; t < K; ++t)
        for (std::size_t i = 0; i < m; ++i) v[i] += (*sol)[t] * points[subset[t]][i];
      std::vector<Rational> d = minus(target, v);
      for (auto& z : points)
        if (inner(d, minus(z, v)) > 0) return std::nullopt;
      ProjectionReport rep;
      rep.epsilon = inner(d, d);
      rep.inside = rep.epsilon == 0;
      rep.rival = std::move(v);
      return rep;
    }
    for (std::size_t p = from; p + (size - subset.size()) <= P; ++p) {
      subset.push_back(p);
      if (auto r = search(size, p + 1)) return r;
      subset.pop_back();
    }
    return std::nullopt;
  };
  for (std::size_t size = 1; size <= std::min(P, m + 1); ++size)
    if (auto r = search(size, 0)) return *r;
  throw PreconditionFailed("no candidate support accepted");
}

}  // namespace prevision
