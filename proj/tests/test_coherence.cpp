#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "prevision/charge.hpp"
#include "prevision/coherence.hpp"

using namespace prevision;

namespace {

StructuredEvent random_event(std::mt19937_64& rng, int n_columns) {
  std::uniform_int_distribution<int> flag(0, 1), count(0, 2);
  std::uniform_int_distribution<long> idx(1, 6);
  std::vector<StructuredEvent::Column> cols(static_cast<std::size_t>(n_columns));
  for (auto& c : cols) {
    c.cofinite = flag(rng) == 1;
    int m = count(rng);
    for (int i = 0; i < m; ++i) c.indices.insert(idx(rng));
  }
  return StructuredEvent(std::move(cols));
}

Charge random_charge(std::mt19937_64& rng, int n_columns) {
  std::uniform_int_distribution<int> natoms(1, 3), wnum(1, 5);
  std::uniform_int_distribution<long> idx(1, 6);
  std::vector<Charge::Column> cols(static_cast<std::size_t>(n_columns));
  Rational mass(0);
  for (auto& c : cols) {
    int m = natoms(rng);
    for (int i = 0; i < m; ++i) {
      Rational w = Rational(wnum(rng)) / 7;
      c.atoms[idx(rng)] += w;
      mass += w;
    }
  }
  for (auto& c : cols)
    for (auto& [j, w] : c.atoms) w /= mass;
  return Charge(std::move(cols));
}

// Brute-force oracle: enumerate every basis of the boxed program
// A z = b, z_j + w_j = box, all variables nonnegative.
struct BoxedOracle {
  bool feasible = false;
  Rational best;
};

BoxedOracle enumerate_boxed(const std::vector<std::vector<Rational>>& A,
                            const std::vector<Rational>& b, const std::vector<Rational>& c,
                            const Rational& box) {
  const std::size_t m = A.size(), n = c.size();
  const std::size_t rows = m + n, cols = 2 * n;
  std::vector<std::vector<Rational>> full(rows, std::vector<Rational>(cols, Rational(0)));
  std::vector<Rational> rhs(rows);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) full[i][j] = A[i][j];
    rhs[i] = b[i];
  }
  for (std::size_t j = 0; j < n; ++j) {
    full[m + j][j] = 1;
    full[m + j][n + j] = 1;
    rhs[m + j] = box;
  }
  BoxedOracle out;
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (pick.size() == rows) {
      std::vector<std::vector<Rational>> aug(rows, std::vector<Rational>(rows + 1));
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t t = 0; t < rows; ++t) aug[i][t] = full[i][pick[t]];
        aug[i][rows] = rhs[i];
      }
      auto sol = detail::solve_linear(std::move(aug));
      if (!sol) return;
      for (auto& v : *sol)
        if (v < 0) return;
      Rational obj(0);
      for (std::size_t t = 0; t < rows; ++t)
        if (pick[t] < n) obj += c[pick[t]] * (*sol)[t];
      if (!out.feasible || obj > out.best) {
        out.feasible = true;
        out.best = obj;
      }
      return;
    }
    for (std::size_t j = from; j + (rows - pick.size()) <= cols; ++j) {
      pick.push_back(j);
      rec(j + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return out;
}

// One column; the first-row event forecast at pa, its complement at pb.
ForecastSystem complementary_pair(const Rational& pa, const Rational& pb) {
  StructuredEvent a = StructuredEvent::states(1, {{0, 1}});
  std::vector<ForecastEntry> entries = {
      {StructuredRV::indicator(a), StructuredEvent::whole(1), pa, LambdaMeasure::brier(),
       Rational(1)},
      {StructuredRV::indicator(a.complement()), StructuredEvent::whole(1), pb,
       LambdaMeasure::brier(), Rational(1)}};
  return ForecastSystem(1, std::move(entries));
}

}  // namespace

TEST_CASE("exact elimination solves and rejects") {
  auto sol = detail::solve_linear({{Rational(2), Rational(1), Rational(5)},
                                   {Rational(1), Rational(-1), Rational(1)}});
  REQUIRE(sol);
  REQUIRE((*sol)[0] == Rational(2));
  REQUIRE((*sol)[1] == Rational(1));
  REQUIRE_FALSE(detail::solve_linear({{Rational(1), Rational(2), Rational(0)},
                                      {Rational(2), Rational(4), Rational(1)}}));
  std::mt19937_64 rng(5200);
  std::uniform_int_distribution<int> val(-4, 4);
  for (int t = 0; t < 100; ++t) {
    std::size_t n = 1 + rng() % 4;
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1));
    for (auto& row : a)
      for (auto& v : row) v = Rational(val(rng)) / 2;
    auto orig = a;
    auto x = detail::solve_linear(std::move(a));
    if (!x) continue;
    for (std::size_t i = 0; i < n; ++i) {
      Rational lhs(0);
      for (std::size_t j = 0; j < n; ++j) lhs += orig[i][j] * (*x)[j];
      REQUIRE(lhs == orig[i][n]);
    }
  }
}

TEST_CASE("linear programs solve exactly") {
  // max 3x+2y with x+y <= 4, x <= 2 in equality form
  LpResult r = solve_lp_max({{Rational(1), Rational(1), Rational(1), Rational(0)},
                             {Rational(1), Rational(0), Rational(0), Rational(1)}},
                            {Rational(4), Rational(2)},
                            {Rational(3), Rational(2), Rational(0), Rational(0)});
  REQUIRE(r.status == LpResult::Status::optimal);
  REQUIRE(r.objective == Rational(10));
  REQUIRE(r.solution[0] == Rational(2));
  REQUIRE(r.solution[1] == Rational(2));

  LpResult inf = solve_lp_max({{Rational(1), Rational(1)}}, {Rational(-1)},
                              {Rational(0), Rational(0)});
  REQUIRE(inf.status == LpResult::Status::infeasible);

  LpResult unb = solve_lp_max({{Rational(1), Rational(-1)}}, {Rational(0)},
                              {Rational(1), Rational(0)});
  REQUIRE(unb.status == LpResult::Status::unbounded);
}

TEST_CASE("simplex agrees with basis enumeration on boxed programs") {
  std::mt19937_64 rng(5201);
  std::uniform_int_distribution<int> val(-3, 3), msel(1, 2), nsel(2, 4);
  const Rational box(3);
  for (int t = 0; t < 150; ++t) {
    std::size_t m = std::size_t(msel(rng)), n = std::size_t(nsel(rng));
    std::vector<std::vector<Rational>> A(m, std::vector<Rational>(n));
    std::vector<Rational> b(m), c(n);
    for (auto& row : A)
      for (auto& v : row) v = Rational(val(rng));
    for (auto& v : b) v = Rational(val(rng));
    for (auto& v : c) v = Rational(val(rng));
    // boxed equality form: A z = b plus z_j + w_j = box
    std::vector<std::vector<Rational>> full(m + n, std::vector<Rational>(2 * n, Rational(0)));
    std::vector<Rational> fb(m + n), fc(2 * n, Rational(0));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) full[i][j] = A[i][j];
      fb[i] = b[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
      full[m + j][j] = 1;
      full[m + j][n + j] = 1;
      fb[m + j] = box;
      fc[j] = c[j];
    }
    LpResult r = solve_lp_max(full, fb, fc);
    BoxedOracle oracle = enumerate_boxed(A, b, c, box);
    if (!oracle.feasible) {
      REQUIRE(r.status == LpResult::Status::infeasible);
    } else {
      REQUIRE(r.status == LpResult::Status::optimal);
      REQUIRE(r.objective == oracle.best);
    }
  }
}

TEST_CASE("complementary events forecast too high are incoherent") {
  ForecastSystem sys = complementary_pair(Rational(3) / 5, Rational(3) / 5);
  CoherenceReport rep = coherence_check(sys);
  REQUIRE_FALSE(rep.coherent);
  REQUIRE(rep.margin == Rational(1) / 10);
  REQUIRE(rep.stakes == std::vector<Rational>{Rational(-1) / 2, Rational(-1) / 2});
  REQUIRE(rep.verified_margin.value() == Rational(1) / 10);
}

TEST_CASE("complementary events forecast additively are coherent") {
  ForecastSystem sys = complementary_pair(Rational(3) / 5, Rational(2) / 5);
  CoherenceReport rep = coherence_check(sys);
  REQUIRE(rep.coherent);
  REQUIRE(rep.supporting_weights.size() == 2);
  REQUIRE(rep.supporting_weights[0] == std::pair<State, Rational>({0, 1}, Rational(3) / 5));
  REQUIRE(rep.supporting_weights[1] == std::pair<State, Rational>({0, 2}, Rational(2) / 5));
}

TEST_CASE("projection splits the overcommitted pair down the middle") {
  ForecastSystem sys = complementary_pair(Rational(3) / 5, Rational(3) / 5);
  ProjectionReport rep = brier_projection_rival(sys);
  REQUIRE_FALSE(rep.inside);
  REQUIRE(rep.rival == std::vector<Rational>{Rational(1) / 2, Rational(1) / 2});
  REQUIRE(rep.epsilon == Rational(1) / 50);
  RivalForecasts rival{rep.rival, {}};
  auto d = dominance(combined_score(sys), combined_score(sys, &rival));
  REQUIRE(d.kind == DominanceKind::uniform);
  REQUIRE(d.margin.value() == Rational(1) / 50);

  ProjectionReport ok = brier_projection_rival(complementary_pair(Rational(3) / 5, Rational(2) / 5));
  REQUIRE(ok.inside);
  REQUIRE(ok.epsilon == 0);
}

TEST_CASE("winning books and hull membership give the same verdict") {
  std::mt19937_64 rng(5202);
  std::uniform_int_distribution<int> fnum(-1, 4);
  int incoherent_seen = 0, coherent_seen = 0;
  for (int t = 0; t < 60; ++t) {
    int n = 1 + int(rng() % 2);
    std::vector<ForecastEntry> entries;
    int m = 1 + int(rng() % 3);
    for (int i = 0; i < m; ++i) {
      StructuredEvent target = random_event(rng, n);
      StructuredEvent given = rng() % 3 == 0 ? random_event(rng, n) : StructuredEvent::whole(n);
      entries.push_back({StructuredRV::indicator(target), given, Rational(fnum(rng)) / 3,
                         LambdaMeasure::brier(), Rational(1 + int(rng() % 2))});
    }
    ForecastSystem sys(n, std::move(entries));
    CoherenceReport book = coherence_check(sys);
    ProjectionReport hull = brier_projection_rival(sys);
    REQUIRE(book.coherent == hull.inside);
    if (book.coherent) {
      ++coherent_seen;
      Rational total(0);
      auto payoffs = detail::entry_payoffs(sys);
      for (auto& [s, w] : book.supporting_weights) {
        REQUIRE(w > 0);
        total += w;
      }
      REQUIRE(total == 1);
      for (auto& g : payoffs) {
        Rational e(0);
        for (auto& [s, w] : book.supporting_weights) e += w * g.at(s);
        REQUIRE(e == 0);
      }
    } else {
      ++incoherent_seen;
      StructuredRV loss = combined_fair_loss(sys, SignedWeights{book.stakes, {}});
      auto lo = loss.inf_all();
      REQUIRE(lo.value.value() == book.margin);
      RivalForecasts rival{hull.rival, {}};
      auto d = dominance(combined_score(sys), combined_score(sys, &rival));
      REQUIRE(d.kind == DominanceKind::uniform);
      REQUIRE(d.margin.value() >= hull.epsilon);
      // for unconditional books the outcome cloud is fixed, so the projected
      // announcement itself sits in the hull
      bool unconditional = true;
      for (auto& e : sys.entries())
        if (!e.conditioning.is_whole()) unconditional = false;
      if (unconditional) {
        std::vector<ForecastEntry> fixed = sys.entries();
        for (std::size_t i = 0; i < fixed.size(); ++i) fixed[i].forecast = hull.rival[i];
        REQUIRE(coherence_check(ForecastSystem(n, std::move(fixed))).coherent);
      }
    }
  }
  REQUIRE(incoherent_seen >= 10);
  REQUIRE(coherent_seen >= 10);
}

TEST_CASE("forecasting the conditional previsions of a charge is coherent") {
  std::mt19937_64 rng(5203);
  int checked = 0;
  for (int t = 0; t < 80 && checked < 50; ++t) {
    int n = 1 + int(rng() % 2);
    Charge mu = random_charge(rng, n);
    std::vector<ForecastEntry> entries;
    int m = 1 + int(rng() % 3);
    for (int i = 0; i < m; ++i) {
      StructuredEvent target = random_event(rng, n);
      StructuredEvent given = rng() % 2 ? random_event(rng, n) : StructuredEvent::whole(n);
      Rational ph = mu.probability(given);
      if (ph == 0) continue;
      entries.push_back({StructuredRV::indicator(target), given,
                         mu.conditional_probability(target, given), LambdaMeasure::brier(),
                         Rational(1)});
    }
    if (entries.empty()) continue;
    ++checked;
    REQUIRE(coherence_check(ForecastSystem(n, std::move(entries))).coherent);
  }
  REQUIRE(checked >= 50);
}

TEST_CASE("finite reductions refuse what they cannot represent") {
  FamilyTail ft;
  ft.support = FamilyTail::Support::cells;
  ft.variable = StructuredRV::constant(1, Rational(1));
  ft.forecast = GeoSeq(Rational(1));
  ForecastSystem with_tail(1, {}, ft);
  REQUIRE_THROWS_AS(coherence_check(with_tail), PreconditionFailed);

  StructuredRV sloped(std::vector<StructuredRV::Column>{
      {{}, GeoSeq::geometric(Rational(1), Rational(1) / 2)}});
  ForecastSystem moving(1, {{sloped, StructuredEvent::whole(1), Rational(0),
                             LambdaMeasure::brier(), Rational(1)}});
  REQUIRE_THROWS_AS(coherence_check(moving), PreconditionFailed);

  ForecastSystem stepped(1, {{StructuredRV::constant(1, Rational(1)), StructuredEvent::whole(1),
                              Rational(1) / 2,
                              LambdaMeasure::piecewise({Rational(1) / 2}, {Rational(1), Rational(2)}),
                              Rational(1)}});
  REQUIRE_THROWS_AS(brier_projection_rival(stepped), UnsupportedRule);
}
