#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "prevision/serialize.hpp"

// The check document: a state space, a charge, forecast systems and named
// helpers, plus a list of check invocations with frozen expected payloads.
// Documents are JSON with every number an exact rational string; measures,
// rules, variables, and events live in id-keyed tables that the forecasts
// section references.

namespace prevision {

struct CheckSpec {
  std::string kind;
  Json params = Json::object();
  Json expected = Json::object();
  std::string note;  // where the expected value comes from, in plain words
};

struct CaseData {
  std::string scenario_id;  // empty for hand-written documents
  std::string title;
  int columns = 1;
  std::optional<Charge> charge;
  std::optional<ForecastSystem> system;
  std::optional<StructuredRV> variable;  // subject of partition checks
  std::optional<Partition> partition;
  std::vector<CheckSpec> checks;
};

namespace detail {

template <class T>
std::string intern(std::vector<std::pair<std::string, T>>& table, const char* prefix,
                   const T& value) {
  for (auto& [id, v] : table)
    if (v == value) return id;
  std::string id = prefix + std::to_string(table.size());
  table.emplace_back(id, value);
  return id;
}

template <class T>
const T& resolve(const std::map<std::string, T>& table, const std::string& id,
                 const char* what) {
  auto it = table.find(id);
  if (it == table.end()) throw ParseError(std::string(what) + ": unknown id '" + id + "'");
  return it->second;
}

}  // namespace detail

inline Json case_to_json(const CaseData& data) {
  std::vector<std::pair<std::string, LambdaMeasure>> measures;
  std::vector<std::pair<std::string, StructuredRV>> variables;
  std::vector<std::pair<std::string, StructuredEvent>> events;
  std::vector<std::pair<std::string, std::string>> rules;  // rule id -> measure id
  auto rule_id = [&](const LambdaMeasure& m) {
    std::string mid = detail::intern(measures, "m", m);
    for (auto& [rid, target] : rules)
      if (target == mid) return rid;
    std::string rid = "r" + std::to_string(rules.size());
    rules.emplace_back(rid, mid);
    return rid;
  };

  Json forecasts = Json::object();
  if (data.system) {
    Json entries = Json::array();
    for (auto& e : data.system->entries())
      entries.push_back({{"variable", detail::intern(variables, "x", e.variable)},
                         {"conditioning", detail::intern(events, "e", e.conditioning)},
                         {"value", to_json(e.forecast)},
                         {"rule", rule_id(e.rule)},
                         {"alpha", to_json(e.coefficient)}});
    forecasts["entries"] = entries;
    if (data.system->tail()) {
      const FamilyTail& ft = *data.system->tail();
      Json fam{{"support", ft.support == FamilyTail::Support::cells ? "cells" : "diagonal"},
               {"start", ft.start}};
      if (ft.variable) fam["variable"] = detail::intern(variables, "x", *ft.variable);
      if (ft.support == FamilyTail::Support::diagonal) {
        fam["off"] = to_json(ft.off_value);
        Json on = Json::array();
        for (auto& s : ft.on_values) on.push_back(to_json(s));
        fam["on"] = on;
      }
      fam["value"] = to_json(ft.forecast);
      fam["alpha"] = to_json(ft.coefficient);
      if (ft.rule.is_constant())
        fam["rule"] = rule_id(ft.rule.base());
      else
        fam["rule"] = to_json(ft.rule);
      forecasts["family"] = fam;
    }
  }

  Json out = Json::object();
  if (!data.scenario_id.empty()) out["scenario"] = data.scenario_id;
  out["title"] = data.title;
  out["state_space"] = Json{{"columns", data.columns}};
  if (data.charge) out["charge"] = to_json(*data.charge);
  std::string variable_ref;
  if (data.variable) variable_ref = detail::intern(variables, "x", *data.variable);

  Json mtab = Json::object(), rtab = Json::object(), vtab = Json::object(), etab = Json::object();
  for (auto& [id, m] : measures) mtab[id] = to_json(m);
  for (auto& [id, mid] : rules) rtab[id] = Json{{"measure", mid}};
  for (auto& [id, v] : variables) vtab[id] = to_json(v);
  for (auto& [id, e] : events) etab[id] = to_json(e);
  out["measures"] = mtab;
  out["rules"] = rtab;
  out["variables"] = vtab;
  out["events"] = etab;
  if (data.partition) out["partition"] = to_json(*data.partition);
  if (!variable_ref.empty()) out["variable"] = variable_ref;
  out["forecasts"] = forecasts;

  Json checks = Json::array();
  for (auto& c : data.checks) {
    Json item{{"kind", c.kind}};
    if (!c.params.empty()) item["params"] = c.params;
    item["expected"] = c.expected;
    if (!c.note.empty()) item["note"] = c.note;
    checks.push_back(std::move(item));
  }
  out["checks"] = checks;
  return out;
}

inline CaseData case_from_json(const Json& doc) {
  CaseData data;
  if (doc.contains("scenario")) data.scenario_id = doc.at("scenario").get<std::string>();
  if (doc.contains("title")) data.title = doc.at("title").get<std::string>();
  data.columns = doc.at("state_space").at("columns").get<int>();
  if (data.columns < 1) throw ParseError("state_space.columns: need at least one column");
  if (doc.contains("charge")) data.charge = charge_from_json(doc.at("charge"));

  std::map<std::string, LambdaMeasure> measures;
  std::map<std::string, StructuredRV> variables;
  std::map<std::string, StructuredEvent> events;
  std::map<std::string, LambdaMeasure> rules;
  if (doc.contains("measures"))
    for (auto& [id, m] : doc.at("measures").items()) measures.emplace(id, measure_from_json(m));
  if (doc.contains("rules"))
    for (auto& [id, r] : doc.at("rules").items())
      rules.emplace(id, detail::resolve(measures, r.at("measure").get<std::string>(),
                                        ("rules." + id + ".measure").c_str()));
  if (doc.contains("variables"))
    for (auto& [id, v] : doc.at("variables").items()) {
      StructuredRV rv = rv_from_json(v);
      if (rv.n_columns() != data.columns)
        throw ParseError("variables." + id + ": wrong number of columns");
      variables.emplace(id, std::move(rv));
    }
  if (doc.contains("events"))
    for (auto& [id, e] : doc.at("events").items()) {
      StructuredEvent ev = event_from_json(e);
      if (ev.n_columns() != data.columns)
        throw ParseError("events." + id + ": wrong number of columns");
      events.emplace(id, std::move(ev));
    }

  if (doc.contains("forecasts")) {
    const Json& fc = doc.at("forecasts");
    std::vector<ForecastEntry> entries;
    if (fc.contains("entries"))
      for (auto& e : fc.at("entries"))
        entries.push_back(
            {detail::resolve(variables, e.at("variable").get<std::string>(), "forecast variable"),
             detail::resolve(events, e.at("conditioning").get<std::string>(),
                             "forecast conditioning"),
             rational_from_json(e.at("value")),
             detail::resolve(rules, e.at("rule").get<std::string>(), "forecast rule"),
             rational_from_json(e.at("alpha"))});
    std::optional<FamilyTail> tail;
    if (fc.contains("family")) {
      const Json& f = fc.at("family");
      FamilyTail ft;
      std::string support = f.at("support").get<std::string>();
      if (support == "cells")
        ft.support = FamilyTail::Support::cells;
      else if (support == "diagonal")
        ft.support = FamilyTail::Support::diagonal;
      else
        throw ParseError("forecasts.family.support: unknown kind '" + support + "'");
      ft.start = f.at("start").get<long>();
      if (f.contains("variable"))
        ft.variable =
            detail::resolve(variables, f.at("variable").get<std::string>(), "family variable");
      if (f.contains("off")) ft.off_value = geoseq_from_json(f.at("off"));
      if (f.contains("on")) {
        ft.on_values.clear();
        for (auto& s : f.at("on")) ft.on_values.push_back(geoseq_from_json(s));
      }
      ft.forecast = geoseq_from_json(f.at("value"));
      if (f.contains("alpha")) ft.coefficient = geoseq_from_json(f.at("alpha"));
      const Json& rule = f.at("rule");
      if (rule.is_string())
        ft.rule = MeasureFamily::constant(
            detail::resolve(rules, rule.get<std::string>(), "family rule"));
      else
        ft.rule = family_from_json(rule);
      tail = std::move(ft);
    }
    if (!entries.empty() || tail)
      data.system = ForecastSystem(data.columns, std::move(entries), std::move(tail));
  }

  if (doc.contains("variable"))
    data.variable =
        detail::resolve(variables, doc.at("variable").get<std::string>(), "variable");
  if (doc.contains("partition"))
    data.partition = partition_from_json(doc.at("partition"), data.columns);

  if (doc.contains("checks"))
    for (auto& c : doc.at("checks")) {
      CheckSpec spec;
      spec.kind = c.at("kind").get<std::string>();
      if (c.contains("params")) spec.params = c.at("params");
      if (c.contains("expected")) spec.expected = c.at("expected");
      if (c.contains("note")) spec.note = c.at("note").get<std::string>();
      data.checks.push_back(std::move(spec));
    }
  return data;
}

}  // namespace prevision
