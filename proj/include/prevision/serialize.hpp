#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "prevision/charge.hpp"
#include "prevision/forecast_system.hpp"
#include "prevision/partitions.hpp"

// JSON encodings for every domain object. Numbers travel as exact strings
// ("3/4", "2", "0.125"); nothing is ever rendered through floating point on
// the way in or out, so serialize-parse round trips are identities.

namespace prevision {

using Json = nlohmann::ordered_json;

inline Rational rational_from_json(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw ParseError("expected a rational literal, got " + j.dump());
}

inline Json to_json(const Rational& r) { return to_string(r); }

inline Json to_json(const ExtRational& r) { return r.to_string(); }

inline ExtRational ext_rational_from_json(const Json& j) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "inf") return ExtRational::plus_inf();
    if (s == "-inf") return ExtRational::minus_inf();
  }
  return ExtRational(rational_from_json(j));
}

// Constant sequences collapse to their single value; anything else carries
// its limit and geometric terms.
inline Json to_json(const GeoSeq& s) {
  if (s.is_constant()) return to_json(s.limit());
  Json terms = Json::array();
  for (auto& t : s.terms()) terms.push_back({{"coef", to_json(t.coef)}, {"ratio", to_json(t.ratio)}});
  return Json{{"limit", to_json(s.limit())}, {"terms", terms}};
}

inline GeoSeq geoseq_from_json(const Json& j) {
  if (!j.is_object()) return GeoSeq(rational_from_json(j));
  std::vector<GeoTerm> terms;
  for (auto& t : j.at("terms"))
    terms.push_back({rational_from_json(t.at("coef")), rational_from_json(t.at("ratio"))});
  return GeoSeq(rational_from_json(j.at("limit")), std::move(terms));
}

inline Json to_json(const StructuredRV& x) {
  Json cols = Json::array();
  for (int k = 0; k < x.n_columns(); ++k) {
    Json ex = Json::object();
    for (auto& [j, v] : x.col(k).exceptions) ex[std::to_string(j)] = to_json(v);
    cols.push_back({{"exceptions", ex}, {"tail", to_json(x.col(k).tail)}});
  }
  return cols;
}

inline StructuredRV rv_from_json(const Json& j) {
  std::vector<StructuredRV::Column> cols;
  for (auto& c : j) {
    StructuredRV::Column col;
    for (auto& [key, v] : c.at("exceptions").items())
      col.exceptions[std::stol(key)] = rational_from_json(v);
    col.tail = geoseq_from_json(c.at("tail"));
    cols.push_back(std::move(col));
  }
  return StructuredRV(std::move(cols));
}

inline Json to_json(const StructuredEvent& e) {
  Json cols = Json::array();
  for (int k = 0; k < e.n_columns(); ++k) {
    Json idx = Json::array();
    for (long j : e.col(k).indices) idx.push_back(j);
    cols.push_back({{"cofinite", e.col(k).cofinite}, {"indices", idx}});
  }
  return cols;
}

inline StructuredEvent event_from_json(const Json& j) {
  std::vector<StructuredEvent::Column> cols;
  for (auto& c : j) {
    StructuredEvent::Column col;
    col.cofinite = c.at("cofinite").get<bool>();
    for (auto& v : c.at("indices")) col.indices.insert(v.get<long>());
    cols.push_back(std::move(col));
  }
  return StructuredEvent(std::move(cols));
}

inline Json to_json(const Charge& p) {
  Json cols = Json::array();
  for (int k = 0; k < p.n_columns(); ++k) {
    const Charge::Column& c = p.col(k);
    Json atoms = Json::object();
    for (auto& [j, m] : c.atoms) atoms[std::to_string(j)] = to_json(m);
    Json col{{"atoms", atoms}, {"diffuse", to_json(c.diffuse)}};
    if (c.tail)
      col["geometric_tail"] = Json{{"coef", to_json(c.tail->coef)},
                                   {"ratio", to_json(c.tail->ratio)},
                                   {"start", c.tail->start}};
    cols.push_back(std::move(col));
  }
  return Json{{"columns", cols}};
}

inline Charge charge_from_json(const Json& j) {
  std::vector<Charge::Column> cols;
  for (auto& c : j.at("columns")) {
    Charge::Column col;
    for (auto& [key, v] : c.at("atoms").items())
      col.atoms[std::stol(key)] = rational_from_json(v);
    col.diffuse = rational_from_json(c.at("diffuse"));
    if (c.contains("geometric_tail")) {
      const Json& t = c.at("geometric_tail");
      col.tail = Charge::GeometricTail{rational_from_json(t.at("coef")),
                                       rational_from_json(t.at("ratio")),
                                       t.at("start").get<long>()};
    }
    cols.push_back(std::move(col));
  }
  return Charge(std::move(cols));
}

inline Json to_json(const LambdaMeasure& m) {
  if (m.kind() == LambdaMeasure::Kind::sqrt_scaled)
    return Json{{"kind", "sqrt"}, {"scale", to_json(m.scale())}};
  Json bp = Json::array(), dens = Json::array();
  for (auto& b : m.breakpoints()) bp.push_back(to_json(b));
  for (auto& f : m.densities()) dens.push_back(to_json(f));
  return Json{{"kind", "piecewise"}, {"breakpoints", bp}, {"densities", dens}};
}

inline LambdaMeasure measure_from_json(const Json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "sqrt") return LambdaMeasure::sqrt_scaled(rational_from_json(j.at("scale")));
  if (kind != "piecewise") throw ParseError("unknown measure kind '" + kind + "'");
  std::vector<Rational> bp, dens;
  for (auto& b : j.at("breakpoints")) bp.push_back(rational_from_json(b));
  for (auto& f : j.at("densities")) dens.push_back(rational_from_json(f));
  return LambdaMeasure::piecewise(std::move(bp), std::move(dens));
}

inline Json to_json(const MeasureFamily& f) {
  if (f.is_constant()) return Json{{"kind", "constant"}, {"measure", to_json(f.base())}};
  Json bp = Json::array(), dens = Json::array();
  for (auto& b : f.breakpoint_seqs()) bp.push_back(to_json(b));
  for (auto& d : f.density_seqs()) dens.push_back(to_json(d));
  return Json{{"kind", "varying"}, {"breakpoints", bp}, {"densities", dens}};
}

inline MeasureFamily family_from_json(const Json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") return MeasureFamily::constant(measure_from_json(j.at("measure")));
  if (kind != "varying") throw ParseError("unknown rule family kind '" + kind + "'");
  std::vector<GeoSeq> bp, dens;
  for (auto& b : j.at("breakpoints")) bp.push_back(geoseq_from_json(b));
  for (auto& d : j.at("densities")) dens.push_back(geoseq_from_json(d));
  return MeasureFamily::varying(std::move(bp), std::move(dens));
}

inline Json to_json(const Partition& p) {
  switch (p.kind()) {
    case Partition::Kind::cross_section:
      return Json{{"kind", "rows"}};
    case Partition::Kind::columns:
      return Json{{"kind", "columns"}};
    case Partition::Kind::explicit_cells:
      break;
  }
  Json cells = Json::array();
  for (auto& c : p.cells()) cells.push_back(to_json(c));
  return Json{{"kind", "cells"}, {"cells", cells}};
}

inline Partition partition_from_json(const Json& j, int n_columns) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "rows") return Partition::cross_section(n_columns);
  if (kind == "columns") return Partition::columns(n_columns);
  if (kind != "cells") throw ParseError("unknown partition kind '" + kind + "'");
  std::vector<StructuredEvent> cells;
  for (auto& c : j.at("cells")) cells.push_back(event_from_json(c));
  return Partition::explicit_cells(std::move(cells));
}

inline Json to_json(const RivalForecasts& r) {
  Json vals = Json::array();
  for (auto& v : r.entry_forecasts) vals.push_back(to_json(v));
  Json out{{"values", vals}};
  if (r.tail_forecast) out["tail"] = to_json(*r.tail_forecast);
  return out;
}

inline RivalForecasts rival_from_json(const Json& j) {
  RivalForecasts r;
  for (auto& v : j.at("values")) r.entry_forecasts.push_back(rational_from_json(v));
  if (j.contains("tail")) r.tail_forecast = geoseq_from_json(j.at("tail"));
  return r;
}

inline Json to_json(const SignedWeights& w) {
  Json vals = Json::array();
  for (auto& v : w.entry_weights) vals.push_back(to_json(v));
  Json out{{"values", vals}};
  if (w.tail_weight) out["tail"] = to_json(*w.tail_weight);
  return out;
}

inline SignedWeights weights_from_json(const Json& j) {
  SignedWeights w;
  for (auto& v : j.at("values")) w.entry_weights.push_back(rational_from_json(v));
  if (j.contains("tail")) w.tail_weight = geoseq_from_json(j.at("tail"));
  return w;
}

}  // namespace prevision
