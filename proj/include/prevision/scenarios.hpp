#pragma once

#include <string>
#include <vector>

#include "prevision/case_file.hpp"
#include "prevision/construction.hpp"

// Built-in check suites. Every expected value below is frozen from a closed
// form worked out by hand, so a run re-derives each number through the full
// machinery and compares exactly.

namespace prevision {

struct ScenarioParams {
  Rational c = Rational(0);  // announced total mass in the abstention suite
};

inline std::vector<std::string> scenario_ids() {
  return {"ex1_abstain",  "ex3_purely_fa_brier",   "ctrex_thm1_spread",
          "ex2_dubins",   "ctrex_thm2_similarity", "control_ca"};
}

inline std::string scenario_title(const std::string& id) {
  if (id == "ex1_abstain") return "Example 1 (combined fair options, sure loss 1 - c)";
  if (id == "ex3_purely_fa_brier") return "Example 3 (weighted Brier, diffuse charge)";
  if (id == "ctrex_thm1_spread") return "Theorem 1 counterexample (spread condition fails)";
  if (id == "ex2_dubins") return "Example 2 (Dubins)";
  if (id == "ctrex_thm2_similarity") return "Theorem 2 counterexample (similarity fails)";
  if (id == "control_ca") return "Countably additive control";
  throw UnknownScenario("no scenario named '" + id + "'");
}

namespace detail {

inline StructuredRV rv_const_cols(std::vector<Rational> vals) {
  std::vector<StructuredRV::Column> cols;
  for (auto& v : vals) cols.push_back({{}, GeoSeq(std::move(v))});
  return StructuredRV(std::move(cols));
}

inline StructuredRV rv_tails(std::vector<GeoSeq> tails) {
  std::vector<StructuredRV::Column> cols;
  for (auto& t : tails) cols.push_back({{}, std::move(t)});
  return StructuredRV(std::move(cols));
}

inline GeoSeq seq(Rational limit, Rational coef, Rational ratio) {
  return GeoSeq(std::move(limit), {{std::move(coef), std::move(ratio)}});
}

inline Json weights1_json() {
  SignedWeights w;
  w.tail_weight = GeoSeq(Rational(1));
  return to_json(w);
}

inline Charge dubins_charge() {
  std::vector<Charge::Column> cols(2);
  cols[0].tail = Charge::GeometricTail{Rational(1) / 2, Rational(1) / 2, 0};
  cols[1].diffuse = Rational(1) / 2;
  return Charge(std::move(cols));
}

inline Charge diffuse_charge() {
  std::vector<Charge::Column> cols(1);
  cols[0].diffuse = Rational(1);
  return Charge(std::move(cols));
}

inline CaseData build_ex1(const Rational& c) {
  if (c < 0 || c >= 1) throw OutOfRange("the abstention suite needs total mass in [0, 1)");
  CaseData data;
  data.scenario_id = "ex1_abstain";
  data.title = scenario_title(data.scenario_id);
  data.columns = 1;
  {
    std::vector<Charge::Column> cols(1);
    if (c > 0) cols[0].tail = Charge::GeometricTail{c, Rational(1) / 2, 0};
    cols[0].diffuse = 1 - c;
    data.charge = Charge(std::move(cols));
  }
  FamilyTail ft;
  ft.support = FamilyTail::Support::diagonal;
  ft.off_value = GeoSeq(Rational(0));
  ft.on_values = {GeoSeq(Rational(1))};
  ft.forecast = c == 0 ? GeoSeq(Rational(0)) : seq(Rational(0), c, Rational(1) / 2);
  data.system = ForecastSystem(1, {}, ft);

  Json w1 = weights1_json();
  data.checks.push_back({"fair_loss", Json{{"weights", w1}},
                         Json{{"value", to_json(rv_const_cols({1 - c}))}},
                         "one winning indicator against announced mass c"});
  data.checks.push_back({"abstain_margin", Json{{"weights", w1}},
                         Json{{"epsilon", to_json(Rational(1 - c))}},
                         "the loss is constant, so the floor equals it"});
  GeoSeq score_tail = c == 0 ? GeoSeq(Rational(1))
                             : seq(1 + c * c / 3, Rational(-2) * c, Rational(1) / 2);
  data.checks.push_back({"score_total", Json::object(),
                         Json{{"value", to_json(rv_tails({score_tail}))}},
                         "sum p_i^2 + 1 - 2 p_j with p_i = c 2^-i"});
  data.checks.push_back(
      {"sum_conditions", Json::object(),
       Json{{"stake", to_json(ExtRational(Rational(1 + c)))},
            {"score", to_json(ExtRational(Rational(1 + c * c / 3)))},
            {"finite", true}},
       "remote values of 1 + c - 2 p_j and of the score total"});
  data.checks.push_back({"probe", Json::object(),
                         Json{{"found_uniform", false},
                              {"found_simple", false},
                              {"some_divergent", true},
                              {"best_kind", "none"},
                              {"best_margin", "0"}},
                         "every constant rival away from 0 has a divergent score series"});
  return data;
}

inline CaseData build_ex3() {
  CaseData data;
  data.scenario_id = "ex3_purely_fa_brier";
  data.title = scenario_title(data.scenario_id);
  data.columns = 1;
  data.charge = diffuse_charge();
  FamilyTail ft;
  ft.support = FamilyTail::Support::diagonal;
  ft.off_value = GeoSeq(Rational(0));
  ft.on_values = {GeoSeq(Rational(1))};
  ft.forecast = GeoSeq(Rational(0));
  // weight 1 + 2^-j folded into the density, twice that of plain Brier
  ft.rule = MeasureFamily::varying({}, {seq(Rational(2), Rational(2), Rational(1) / 2)});
  data.system = ForecastSystem(1, {}, ft);

  Json w1 = weights1_json();
  Json rival_d = to_json(RivalForecasts{{}, seq(Rational(0), Rational(1), Rational(1) / 2)});
  data.checks.push_back({"fair_loss", Json{{"weights", w1}},
                         Json{{"value", to_json(rv_const_cols({Rational(1)}))}}, ""});
  data.checks.push_back({"abstain_margin", Json{{"weights", w1}},
                         Json{{"epsilon", "1"}}, ""});
  data.checks.push_back({"sum_conditions", Json::object(),
                         Json{{"stake", "1"}, {"score", "1"}, {"finite", true}},
                         "remote values of the deviation and score totals"});
  data.checks.push_back({"spread", Json{{"epsilon", "1"}},
                         Json{{"satisfied", true}, {"delta", "1/6"}},
                         "densities peak at 3, so strips keep 1/(2*3) of room"});
  data.checks.push_back({"similarity", Json{{"base", to_json(LambdaMeasure::brier())}},
                         Json{{"satisfied", true}, {"factor", "1"}},
                         "density ratio (1 + 2^-j) floors at 1"});
  data.checks.push_back(
      {"score_total", Json::object(),
       Json{{"value", to_json(rv_tails({seq(Rational(1), Rational(1), Rational(1) / 2)}))}},
       "the winning indicator scores its own weight 1 + 2^-j"});
  data.checks.push_back(
      {"score_total", Json{{"rival", rival_d}},
       Json{{"value",
             to_json(rv_tails({GeoSeq(Rational(31) / 21,
                                      {{Rational(-1), Rational(1) / 2},
                                       {Rational(-2), Rational(1) / 4}})}))}},
       "weight - 2 weight q_j + d with q_j = 2^-j and d = 10/21"});
  data.checks.push_back(
      {"score_difference", Json{{"rival", rival_d}},
       Json{{"value",
             to_json(rv_tails({GeoSeq(Rational(-10) / 21,
                                      {{Rational(2), Rational(1) / 2},
                                       {Rational(2), Rational(1) / 4}})}))},
            {"dominance", "none"},
            {"margin", "-10/21"},
            {"attained", false}},
       "positive early, negative in the limit: no dominance either way"});
  data.checks.push_back({"sum_propriety", Json{{"rivals", Json::array({rival_d})}},
                         Json{{"proper", true}, {"announced", "1"},
                              {"rivals", Json::array({"31/21"})}},
                         ""});
  data.checks.push_back({"probe", Json::object(),
                         Json{{"found_uniform", false},
                              {"found_simple", false},
                              {"some_divergent", true},
                              {"best_kind", "none"},
                              {"best_margin", "0"}},
                         "constant rivals away from 0 make d infinite"});
  data.checks.push_back({"construction", Json::object(),
                         Json{{"error", "PreconditionFailed"}}, ""});
  return data;
}

inline CaseData build_thm1() {
  CaseData data;
  data.scenario_id = "ctrex_thm1_spread";
  data.title = scenario_title(data.scenario_id);
  data.columns = 1;
  data.charge = diffuse_charge();
  FamilyTail ft;
  ft.support = FamilyTail::Support::diagonal;
  ft.off_value = seq(Rational(0), Rational(1), Rational(1) / 2);
  ft.on_values = {seq(Rational(-1), Rational(1) / 2, Rational(1) / 2)};
  ft.forecast = seq(Rational(0), Rational(1), Rational(1) / 2);
  ft.rule = MeasureFamily::varying({seq(Rational(0), Rational(1) / 2, Rational(1) / 2)},
                                   {GeoSeq(Rational(2)), seq(Rational(0), Rational(4), Rational(2))});
  data.system = ForecastSystem(1, {}, ft);

  Json rival = to_json(RivalForecasts{{}, seq(Rational(0), Rational(1) / 2, Rational(1) / 2)});
  data.checks.push_back({"sum_conditions", Json::object(),
                         Json{{"stake", "1"}, {"score", "3"}, {"finite", true}},
                         "deviation total 1 + 2^-j-1, score total 3 + 2^-j-1"});
  data.checks.push_back(
      {"spread", Json{{"epsilon", "1"}},
       Json{{"satisfied", false},
            {"witness_index", 19},
            {"witness_density", "2097152"},
            {"witness_lo", "1/1048576"},
            {"witness_hi", "3/2097152"},
            {"witness_barycenter", "5/4194304"}},
       "the upper density 2^(j+2) first passes 2^20 at j = 19"});
  data.checks.push_back(
      {"score_total", Json::object(),
       Json{{"value", to_json(rv_tails({seq(Rational(3), Rational(1) / 2, Rational(1) / 2)}))}},
       ""});
  data.checks.push_back(
      {"score_total", Json{{"rival", rival}},
       Json{{"value",
             to_json(rv_tails({seq(Rational(3) / 2, Rational(-1) / 2, Rational(1) / 2)}))}},
       ""});
  data.checks.push_back(
      {"score_difference", Json{{"rival", rival}},
       Json{{"value",
             to_json(rv_tails({seq(Rational(3) / 2, Rational(1), Rational(1) / 2)}))},
            {"dominance", "uniform"},
            {"margin", "3/2"},
            {"attained", false}},
       "difference 3/2 + 2^-j stays above its remote value 3/2"});
  data.checks.push_back({"sum_propriety", Json{{"rivals", Json::array({rival})}},
                         Json{{"proper", false}, {"announced", "3"},
                              {"rivals", Json::array({"3/2"})}, {"beating", 0}},
                         ""});
  data.checks.push_back({"construction", Json::object(),
                         Json{{"error", "PreconditionFailed"}}, ""});
  data.checks.push_back({"probe", Json::object(),
                         Json{{"found_uniform", true},
                              {"found_simple", false},
                              {"some_divergent", true},
                              {"best_kind", "uniform"},
                              {"best_margin", "5/4"}},
                         "the constant rival 0 wins 5/4 + 2*2^-j + 4^-j/2 everywhere"});
  return data;
}

inline CaseData build_dubins() {
  CaseData data;
  data.scenario_id = "ex2_dubins";
  data.title = scenario_title(data.scenario_id);
  data.columns = 2;
  data.charge = dubins_charge();
  StructuredRV f = StructuredRV::indicator(StructuredEvent::column(2, 0));
  data.variable = f;
  data.partition = Partition::cross_section(2);
  FamilyTail ft;
  ft.support = FamilyTail::Support::cells;
  ft.variable = f;
  ft.forecast = GeoSeq(Rational(1));
  data.system = ForecastSystem(
      2, {{f, StructuredEvent::whole(2), Rational(1) / 2, LambdaMeasure::brier(), Rational(1)}},
      ft);

  SignedWeights w;
  w.entry_weights = {Rational(1)};
  w.tail_weight = GeoSeq(Rational(-1));
  Json rival = to_json(RivalForecasts{{Rational(3) / 4}, GeoSeq(Rational(3) / 4)});

  data.checks.push_back({"prevision", Json::object(), Json{{"value", "1/2"}}, ""});
  data.checks.push_back({"conglomerability", Json::object(),
                         Json{{"holds", false},
                              {"value", "1/2"},
                              {"lower", "1"},
                              {"upper", "1"},
                              {"lower_attained", true},
                              {"upper_attained", true},
                              {"gap", "1/2"},
                              {"side", "below"}},
                         "every row conditions the first column to probability 1"});
  data.checks.push_back({"total_previsions", Json::object(),
                         Json{{"holds", false}, {"direct", "1/2"}, {"composed", "1"}}, ""});
  data.checks.push_back({"fair_loss", Json{{"weights", to_json(w)}},
                         Json{{"value", to_json(rv_const_cols({Rational(1) / 2, Rational(1) / 2}))}},
                         "buy the unconditional claim, sell each conditional one"});
  data.checks.push_back(
      {"score_total", Json::object(),
       Json{{"value", to_json(rv_const_cols({Rational(1) / 4, Rational(5) / 4}))}}, ""});
  data.checks.push_back(
      {"score_total", Json{{"rival", rival}},
       Json{{"value", to_json(rv_const_cols({Rational(1) / 8, Rational(9) / 8}))}}, ""});
  data.checks.push_back({"score_difference", Json{{"rival", rival}},
                         Json{{"value", to_json(rv_const_cols({Rational(1) / 8, Rational(1) / 8}))},
                              {"dominance", "uniform"},
                              {"margin", "1/8"},
                              {"attained", true}},
                         "the midway rival wins exactly 1/8 in every state"});
  data.checks.push_back({"sum_conditions", Json::object(),
                         Json{{"stake", "1"}, {"score", "3/4"}, {"finite", true}}, ""});
  data.checks.push_back({"spread", Json{{"epsilon", "1/2"}},
                         Json{{"satisfied", true}, {"delta", "1/8"}}, ""});
  data.checks.push_back({"similarity", Json::object(),
                         Json{{"satisfied", true}, {"factor", "1"}}, ""});
  data.checks.push_back({"construction", Json::object(),
                         Json{{"reflected", false},
                              {"epsilon", "1/2"},
                              {"w0", "1/2"},
                              {"similarity", "1"},
                              {"w1", "1/2"},
                              {"w2", "9/20"},
                              {"q_prime", "3/4"},
                              {"q_x", "29/40"},
                              {"q_tail", "31/40"},
                              {"delta", "9/800"},
                              {"margin", "99/800"},
                              {"attained", true}},
                         "recipe output, audited against the uniform gap 99/800"});
  data.checks.push_back({"sum_propriety", Json{{"rivals", Json::array({rival})}},
                         Json{{"proper", false}, {"announced", "3/4"},
                              {"rivals", Json::array({"5/8"})}, {"beating", 0}},
                         ""});
  data.checks.push_back({"sum_propriety", Json{{"rivals", "construction"}},
                         Json{{"proper", false}, {"announced", "3/4"},
                              {"rivals", Json::array({"501/800"})}, {"beating", 0}},
                         "the built rival expects 501/800 against the announced 600/800"});
  data.checks.push_back({"probe", Json::object(),
                         Json{{"found_uniform", true},
                              {"found_simple", false},
                              {"some_divergent", false},
                              {"best_kind", "uniform"},
                              {"best_margin", "1/8"}},
                         "1/8 is the exact optimum over all rival pairs"});
  return data;
}

inline CaseData build_ctrex2() {
  CaseData data;
  data.scenario_id = "ctrex_thm2_similarity";
  data.title = scenario_title(data.scenario_id);
  data.columns = 2;
  data.charge = dubins_charge();
  StructuredRV f = StructuredRV::indicator(StructuredEvent::column(2, 0));
  data.variable = f;
  data.partition = Partition::cross_section(2);
  FamilyTail ft;
  ft.support = FamilyTail::Support::cells;
  ft.variable = f;
  ft.forecast = GeoSeq(Rational(1));
  // conditional rules shrink like 2^-j-1 against the unconditional Brier
  ft.rule = MeasureFamily::varying({}, {seq(Rational(0), Rational(1), Rational(1) / 2)});
  data.system = ForecastSystem(
      2, {{f, StructuredEvent::whole(2), Rational(1) / 2, LambdaMeasure::brier(), Rational(1)}},
      ft);

  Json rival_half = to_json(RivalForecasts{{Rational(1) / 2}, GeoSeq(Rational(3) / 4)});
  data.checks.push_back({"similarity", Json::object(),
                         Json{{"satisfied", false},
                              {"factor", "0"},
                              {"witness_index", 20},
                              {"witness_ratio", "1/2097152"}},
                         "the density ratio 2^-j-1 falls under 2^-20 at j = 20"});
  data.checks.push_back({"construction", Json::object(),
                         Json{{"error", "SimilarityViolated"}}, ""});
  data.checks.push_back(
      {"score_total", Json::object(),
       Json{{"value",
             to_json(rv_tails({GeoSeq(Rational(1) / 4),
                               seq(Rational(1) / 4, Rational(1) / 2, Rational(1) / 2)}))}},
       ""});
  data.checks.push_back(
      {"score_difference", Json{{"rival", rival_half}},
       Json{{"value",
             to_json(rv_tails({seq(Rational(0), Rational(-1) / 32, Rational(1) / 2),
                               seq(Rational(0), Rational(7) / 32, Rational(1) / 2)}))},
            {"dominance", "none"},
            {"margin", "-1/64"},
            {"attained", true}},
       "matching the unconditional announcement loses on the first column"});
  data.checks.push_back({"difference_at_state",
                         Json{{"rival", rival_half}, {"column", 0}, {"index", 1}},
                         Json{{"value", "-1/64"}, {"negative", true}}, ""});
  data.checks.push_back({"threshold_case", Json{{"q", "9/16"}, {"tail", "0"}},
                         Json{{"delta_abs", "17/256"},
                              {"j_star", 4},
                              {"witness_column", 1},
                              {"witness_value", "-9/256"}},
                         "off-center rivals lose once 2^-j falls under the square gap"});
  data.checks.push_back({"sum_conditions", Json::object(),
                         Json{{"stake", "1"}, {"score", "1/4"}, {"finite", true}}, ""});
  data.checks.push_back({"probe", Json::object(),
                         Json{{"found_uniform", false},
                              {"found_simple", false},
                              {"some_divergent", false},
                              {"best_kind", "none"},
                              {"best_margin", "0"}},
                         ""});
  return data;
}

inline CaseData build_control() {
  CaseData data;
  data.scenario_id = "control_ca";
  data.title = scenario_title(data.scenario_id);
  data.columns = 2;
  {
    std::vector<Charge::Column> cols(2);
    cols[0].tail = Charge::GeometricTail{Rational(3) / 4, Rational(1) / 2, 0};
    cols[1].tail = Charge::GeometricTail{Rational(1) / 4, Rational(1) / 2, 0};
    data.charge = Charge(std::move(cols));
  }
  StructuredRV f = StructuredRV::indicator(StructuredEvent::column(2, 0));
  data.variable = f;
  data.partition = Partition::cross_section(2);
  FamilyTail ft;
  ft.support = FamilyTail::Support::cells;
  ft.variable = f;
  ft.forecast = GeoSeq(Rational(3) / 4);
  data.system = ForecastSystem(
      2, {{f, StructuredEvent::whole(2), Rational(3) / 4, LambdaMeasure::brier(), Rational(1)}},
      ft);

  SignedWeights sell;
  sell.entry_weights = {Rational(1)};
  sell.tail_weight = GeoSeq(Rational(-1));
  SignedWeights buy;
  buy.entry_weights = {Rational(1)};
  buy.tail_weight = GeoSeq(Rational(1));

  data.checks.push_back({"prevision", Json::object(), Json{{"value", "3/4"}}, ""});
  data.checks.push_back({"conglomerability", Json::object(),
                         Json{{"holds", true},
                              {"value", "3/4"},
                              {"lower", "3/4"},
                              {"upper", "3/4"},
                              {"lower_attained", true},
                              {"upper_attained", true}},
                         "matched geometric tails keep every row at 3/4"});
  data.checks.push_back({"total_previsions", Json::object(),
                         Json{{"holds", true}, {"direct", "3/4"}, {"composed", "3/4"}}, ""});
  data.checks.push_back({"fair_loss", Json{{"weights", to_json(sell)}},
                         Json{{"value", to_json(rv_const_cols({Rational(0), Rational(0)}))}},
                         "the conditional claims cancel the unconditional one exactly"});
  data.checks.push_back({"abstain_margin", Json{{"weights", to_json(sell)}},
                         Json{{"none", true}}, ""});
  data.checks.push_back({"fair_loss_prevision", Json{{"weights", to_json(buy)}},
                         Json{{"value", "0"}}, ""});
  data.checks.push_back(
      {"score_total", Json::object(),
       Json{{"value", to_json(rv_const_cols({Rational(1) / 8, Rational(9) / 8}))}}, ""});
  data.checks.push_back({"sum_conditions", Json::object(),
                         Json{{"stake", "3/4"}, {"score", "3/8"}, {"finite", true}}, ""});
  data.checks.push_back({"construction", Json::object(),
                         Json{{"error", "NotNonconglomerable"}}, ""});
  {
    Json rivals = Json::array();
    Json values = Json::array();
    for (int i = 0; i <= 8; ++i) {
      Rational q = Rational(i) / 8;
      rivals.push_back(to_json(RivalForecasts{{q}, GeoSeq(q)}));
      // twice the expected Brier distance: (3 (1-q)^2 + q^2) / 2
      values.push_back(to_json(Rational((3 * (1 - q) * (1 - q) + q * q) / 2)));
    }
    data.checks.push_back({"sum_propriety", Json{{"rivals", rivals}},
                           Json{{"proper", true}, {"announced", "3/8"}, {"rivals", values}},
                           "each grid rival expects at least the announced 3/8"});
  }
  data.checks.push_back({"probe", Json::object(),
                         Json{{"found_uniform", false},
                              {"found_simple", false},
                              {"some_divergent", false},
                              {"best_kind", "none"},
                              {"best_margin", "0"}},
                         ""});
  return data;
}

}  // namespace detail

inline CaseData build_scenario(const std::string& id, const ScenarioParams& params = {}) {
  if (id == "ex1_abstain") return detail::build_ex1(params.c);
  if (id == "ex3_purely_fa_brier") return detail::build_ex3();
  if (id == "ctrex_thm1_spread") return detail::build_thm1();
  if (id == "ex2_dubins") return detail::build_dubins();
  if (id == "ctrex_thm2_similarity") return detail::build_ctrex2();
  if (id == "control_ca") return detail::build_control();
  throw UnknownScenario("no scenario named '" + id + "'");
}

}  // namespace prevision
