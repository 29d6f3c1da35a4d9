#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "prevision/construction.hpp"

using namespace prevision;

namespace {

ForecastSystem one_variable_system(const Rational& p_x, GeoSeq p_row,
                                   MeasureFamily fam = MeasureFamily::constant(LambdaMeasure::brier())) {
  StructuredRV f = StructuredRV::indicator(StructuredEvent::column(2, 0));
  std::vector<ForecastEntry> entries = {
      {f, StructuredEvent::whole(2), p_x, LambdaMeasure::brier(), Rational(1)}};
  FamilyTail ft;
  ft.support = FamilyTail::Support::cells;
  ft.start = 1;
  ft.variable = f;
  ft.forecast = std::move(p_row);
  ft.coefficient = GeoSeq(Rational(1));
  ft.rule = std::move(fam);
  return ForecastSystem(2, std::move(entries), std::move(ft));
}

ForecastSystem dubins_system() {
  return one_variable_system(Rational(1) / 2, GeoSeq(Rational(1)));
}

Charge dubins_charge() {
  std::vector<Charge::Column> cols(2);
  cols[0].tail = Charge::GeometricTail{Rational(1) / 2, Rational(1) / 2, 0};
  cols[1].diffuse = Rational(1) / 2;
  return Charge(std::move(cols));
}

// both columns carry matched geometric tails, so rows condition classically
Charge matched_tail_charge() {
  std::vector<Charge::Column> cols(2);
  cols[0].tail = Charge::GeometricTail{Rational(3) / 4, Rational(1) / 2, 0};
  cols[1].tail = Charge::GeometricTail{Rational(1) / 4, Rational(1) / 2, 0};
  return Charge(std::move(cols));
}

}  // namespace

TEST_CASE("reflection mirrors mass") {
  std::mt19937_64 rng(6301);
  std::uniform_int_distribution<int> num(-4, 4), den(1, 3), fnum(1, 4);
  for (int t = 0; t < 100; ++t) {
    std::vector<Rational> bp;
    int n = int(rng() % 3);
    for (int i = 0; i < n; ++i) bp.push_back(Rational(num(rng)) / den(rng));
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    std::vector<Rational> f;
    for (std::size_t i = 0; i <= bp.size(); ++i) f.push_back(Rational(fnum(rng)) / den(rng));
    LambdaMeasure rule = LambdaMeasure::piecewise(bp, f);
    LambdaMeasure mirrored = detail::reflect(rule);
    Rational a = Rational(num(rng)) / 2, b = a + 1 + Rational(fnum(rng)) / 2;
    REQUIRE(mirrored.mass(-b, -a) == rule.mass(a, b));
    REQUIRE(detail::reflect(mirrored) == rule);
  }
}

TEST_CASE("similarity of matching and thinning families") {
  SimilarityReport same =
      check_similarity(LambdaMeasure::brier(), MeasureFamily::constant(LambdaMeasure::brier()));
  REQUIRE(same.satisfied);
  REQUIRE(same.factor == 1);

  SimilarityReport stepped = check_similarity(
      LambdaMeasure::piecewise({Rational(0)}, {Rational(1), Rational(3)}),
      MeasureFamily::constant(LambdaMeasure::piecewise({Rational(0)}, {Rational(2), Rational(6)})));
  REQUIRE(stepped.satisfied);
  REQUIRE(stepped.factor == 2);

  SimilarityReport thin = check_similarity(
      LambdaMeasure::brier(),
      MeasureFamily::varying({}, {GeoSeq::geometric(Rational(2), Rational(1) / 2)}));
  REQUIRE_FALSE(thin.satisfied);
  REQUIRE(thin.factor == 0);
  REQUIRE(thin.witness_index == 21);
  REQUIRE(thin.witness_ratio < Rational(1) / 1048576);

  SimilarityReport mixed = check_similarity(
      LambdaMeasure::brier(), MeasureFamily::constant(LambdaMeasure::sqrt_scaled(Rational(1))));
  REQUIRE_FALSE(mixed.satisfied);

  SimilarityReport roots = check_similarity(
      LambdaMeasure::sqrt_scaled(Rational(2)),
      MeasureFamily::constant(LambdaMeasure::sqrt_scaled(Rational(3))));
  REQUIRE(roots.satisfied);
  REQUIRE(roots.factor == Rational(3) / 2);
}

TEST_CASE("spread holds for bounded densities and fails for growing ones") {
  SpreadReport flat = check_spread(dubins_system(), Rational(1) / 2);
  REQUIRE(flat.satisfied);
  REQUIRE(flat.delta == Rational(1) / 8);  // (1/2) / (2 * 2)

  ForecastSystem growing = one_variable_system(
      Rational(1) / 2, GeoSeq(Rational(1)),
      MeasureFamily::varying({}, {GeoSeq::geometric(Rational(1), Rational(2))}));
  SpreadReport burst = check_spread(growing, Rational(1) / 2);
  REQUIRE_FALSE(burst.satisfied);
  REQUIRE(burst.witness_index == 21);
  REQUIRE(burst.witness_density == Rational(2097152));
  REQUIRE(burst.witness_lo == 0);
  REQUIRE(burst.witness_hi == Rational(1) / 4194304);
  REQUIRE(burst.witness_barycenter == Rational(1) / 8388608);

  StructuredRV x = StructuredRV::indicator(StructuredEvent::column(1, 0));
  ForecastSystem rooted(1, {{x, StructuredEvent::whole(1), Rational(1),
                             LambdaMeasure::sqrt_scaled(Rational(2)), Rational(1)}});
  SpreadReport root = check_spread(rooted, Rational(1));
  REQUIRE(root.satisfied);
  REQUIRE(root.delta == Rational(1) / 24);
}

TEST_CASE("rival construction on the Dubins-style book") {
  ConstructionReport rep = construct_dominating_rival(dubins_system());
  REQUIRE_FALSE(rep.reflected);
  REQUIRE(rep.epsilon == Rational(1) / 2);
  REQUIRE(rep.w0 == Rational(1) / 2);
  REQUIRE(rep.similarity == 1);
  REQUIRE(rep.w1 == Rational(1) / 2);
  REQUIRE(rep.w2 == Rational(9) / 20);
  REQUIRE(rep.q_prime == Rational(3) / 4);
  REQUIRE(rep.rival.entry_forecasts == std::vector<Rational>{Rational(29) / 40});
  REQUIRE(*rep.rival.tail_forecast == GeoSeq(Rational(31) / 40));
  REQUIRE(rep.delta == Rational(9) / 800);
  REQUIRE(rep.margin.value() == Rational(99) / 800);
  REQUIRE(rep.margin_attained);
}

TEST_CASE("rival construction respects the safety factor") {
  ConstructionReport rep = construct_dominating_rival(dubins_system(), Rational(1) / 2);
  REQUIRE(rep.w2 == Rational(1) / 4);
  REQUIRE(*rep.rival.tail_forecast == GeoSeq(Rational(7) / 8));
  REQUIRE(rep.rival.entry_forecasts[0] == Rational(5) / 8);
  REQUIRE(rep.delta == Rational(1) / 32);
  REQUIRE(rep.margin.value() == Rational(3) / 32);
}

TEST_CASE("rival construction mirrors when the family sits below") {
  ConstructionReport rep =
      construct_dominating_rival(one_variable_system(Rational(1) / 2, GeoSeq(Rational(0))));
  REQUIRE(rep.reflected);
  REQUIRE(rep.epsilon == Rational(1) / 2);
  REQUIRE(rep.rival.entry_forecasts == std::vector<Rational>{Rational(11) / 40});
  REQUIRE(*rep.rival.tail_forecast == GeoSeq(Rational(9) / 40));
  REQUIRE(rep.delta == Rational(9) / 800);
  REQUIRE(rep.margin.value() == Rational(99) / 800);
}

TEST_CASE("construction refuses books with no separation") {
  REQUIRE_THROWS_AS(
      construct_dominating_rival(one_variable_system(Rational(1) / 2, GeoSeq(Rational(1) / 2))),
      NotNonconglomerable);
  GeoSeq straddle = GeoSeq(Rational(1) / 4) + GeoSeq::geometric(Rational(1), Rational(1) / 2);
  REQUIRE_THROWS_AS(construct_dominating_rival(one_variable_system(Rational(1) / 2, straddle)),
                    NotNonconglomerable);
}

TEST_CASE("construction propagates rule obstructions") {
  REQUIRE_THROWS_AS(
      construct_dominating_rival(one_variable_system(
          Rational(1) / 2, GeoSeq(Rational(1)),
          MeasureFamily::varying({}, {GeoSeq::geometric(Rational(2), Rational(1) / 2)}))),
      SimilarityViolated);
  REQUIRE_THROWS_AS(
      construct_dominating_rival(one_variable_system(
          Rational(1) / 2, GeoSeq(Rational(1)),
          MeasureFamily::constant(LambdaMeasure::sqrt_scaled(Rational(1))))),
      UnsupportedRule);
  REQUIRE_THROWS_AS(
      construct_dominating_rival(one_variable_system(
          Rational(1) / 2, GeoSeq(Rational(1)),
          MeasureFamily::varying(
              {}, {GeoSeq(Rational(2)) + GeoSeq::geometric(Rational(1), Rational(1) / 2)}))),
      UnsupportedRule);
  ForecastSystem plain(1, {{StructuredRV::constant(1, Rational(1)), StructuredEvent::whole(1),
                            Rational(1), LambdaMeasure::brier(), Rational(1)}});
  REQUIRE_THROWS_AS(construct_dominating_rival(plain), PreconditionFailed);
  REQUIRE_THROWS_AS(construct_dominating_rival(dubins_system(), Rational(1)), OutOfRange);
}

TEST_CASE("expected totals can prefer a rival under a one-sided charge") {
  ForecastSystem sys = dubins_system();
  RivalForecasts rival{{Rational(3) / 4}, GeoSeq(Rational(3) / 4)};
  SumProprietyReport rep = check_sum_propriety(sys, dubins_charge(), {rival});
  REQUIRE(rep.announced == Rational(3) / 4);
  REQUIRE(rep.rivals == std::vector<Rational>{Rational(5) / 8});
  REQUIRE_FALSE(rep.proper);
  REQUIRE(rep.beating_rival == 0);
}

TEST_CASE("expected totals stay proper when rows condition classically") {
  Charge mu = matched_tail_charge();
  ForecastSystem sys = one_variable_system(Rational(3) / 4, GeoSeq(Rational(3) / 4));
  std::vector<RivalForecasts> rivals;
  for (int i = 0; i <= 8; ++i)
    rivals.push_back({{Rational(i) / 8}, GeoSeq(Rational(i) / 8)});
  SumProprietyReport rep = check_sum_propriety(sys, mu, rivals);
  REQUIRE(rep.proper);
  REQUIRE(rep.announced == Rational(3) / 8);
}

TEST_CASE("stake and score totals for the Dubins-style book") {
  SumConditionReport rep = check_score_sum_conditions(dubins_system(), dubins_charge());
  REQUIRE(rep.both_finite);
  REQUIRE(rep.stake_total.value() == Rational(1));
  REQUIRE(rep.score_total.value() == Rational(3) / 4);
}

TEST_CASE("diverging families report infinite totals") {
  FamilyTail ft;
  ft.support = FamilyTail::Support::diagonal;
  ft.off_value = GeoSeq(Rational(1));
  ft.forecast = GeoSeq(Rational(0));
  ft.on_values = {GeoSeq(Rational(2)), GeoSeq(Rational(2))};
  ForecastSystem sys(2, {}, ft);
  SumConditionReport rep = check_score_sum_conditions(sys, dubins_charge());
  REQUIRE_FALSE(rep.both_finite);
  REQUIRE(rep.stake_total.is_plus_inf());
  REQUIRE(rep.score_total.is_plus_inf());
}

TEST_CASE("probing the Dubins-style book finds the best uniform rival") {
  ProbeOptions opt;
  opt.grid = Rational(1) / 4;
  ProbeReport rep = probe_no_dominance(dubins_system(), opt);
  REQUIRE(rep.uniform_count >= 1);
  REQUIRE(rep.best);
  REQUIRE(rep.best->kind == DominanceKind::uniform);
  REQUIRE(rep.best->margin.value() == Rational(1) / 8);
}

TEST_CASE("probing a classically conditioned book finds nothing") {
  ForecastSystem sys = one_variable_system(Rational(3) / 4, GeoSeq(Rational(3) / 4));
  ProbeOptions opt;
  opt.grid = Rational(1) / 4;
  ProbeReport rep = probe_no_dominance(sys, opt);
  REQUIRE(rep.uniform_count == 0);
  REQUIRE(rep.simple_count == 0);
  REQUIRE(rep.divergent_count == 0);
  REQUIRE(rep.best);
  REQUIRE(rep.best->kind == DominanceKind::none);
}

TEST_CASE("probing counts diverging rivals") {
  FamilyTail ft;
  ft.support = FamilyTail::Support::diagonal;
  ft.start = 1;
  ft.off_value = GeoSeq(Rational(0));
  ft.forecast = GeoSeq(Rational(0));
  ft.on_values = {GeoSeq(Rational(1))};
  ForecastSystem sys(1, {}, ft);
  ProbeOptions opt;
  opt.grid = Rational(1) / 2;
  opt.samples = 10;
  ProbeReport rep = probe_no_dominance(sys, opt);
  REQUIRE(rep.divergent_count > 0);
  REQUIRE(rep.uniform_count == 0);
}

TEST_CASE("window mass ratios and the infinite edge") {
  LogScoreDemo mid = log_score_demo(Rational(0), Rational(1), Rational(1) / 2);
  REQUIRE_FALSE(mid.infinite);
  REQUIRE(mid.ratio == 2);
  REQUIRE_THAT(mid.nats, Catch::Matchers::WithinAbs(0.6931471805599453, 1e-12));
  REQUIRE(log_score_demo(Rational(0), Rational(1), Rational(0)).infinite);
  REQUIRE_THROWS_AS(log_score_demo(Rational(0), Rational(1), Rational(1)), OutOfRange);
  REQUIRE_THROWS_AS(log_score_demo(Rational(1), Rational(1), Rational(1)), OutOfRange);
  REQUIRE_THROWS_AS(log_score_demo(Rational(0), Rational(1), Rational(-1)), OutOfRange);
}
