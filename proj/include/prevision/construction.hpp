#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "prevision/charge.hpp"
#include "prevision/forecast_system.hpp"

namespace prevision {

namespace detail {

inline LambdaMeasure reflect(const LambdaMeasure& rule) {
  if (rule.kind() == LambdaMeasure::Kind::sqrt_scaled) return rule;  // symmetric
  std::vector<Rational> bp, dens;
  const auto& b = rule.breakpoints();
  const auto& f = rule.densities();
  for (auto it = b.rbegin(); it != b.rend(); ++it) bp.push_back(Rational(-*it));
  for (auto it = f.rbegin(); it != f.rend(); ++it) dens.push_back(*it);
  return LambdaMeasure::piecewise(std::move(bp), std::move(dens));
}

inline MeasureFamily reflect(const MeasureFamily& fam) {
  if (fam.is_constant()) return MeasureFamily::constant(reflect(fam.base()));
  std::vector<GeoSeq> bp, dens;
  const auto& b = fam.breakpoint_seqs();
  const auto& f = fam.density_seqs();
  for (auto it = b.rbegin(); it != b.rend(); ++it) bp.push_back(-*it);
  for (auto it = f.rbegin(); it != f.rend(); ++it) dens.push_back(*it);
  return MeasureFamily::varying(std::move(bp), std::move(dens));
}

inline ForecastSystem reflect(const ForecastSystem& sys) {
  std::vector<ForecastEntry> entries;
  for (auto& e : sys.entries())
    entries.push_back({-e.variable, e.conditioning, Rational(-e.forecast), reflect(e.rule),
                       e.coefficient});
  std::optional<FamilyTail> tail;
  if (sys.tail()) {
    FamilyTail ft = *sys.tail();
    if (ft.variable) ft.variable = -*ft.variable;
    ft.off_value = -ft.off_value;
    for (auto& s : ft.on_values) s = -s;
    ft.forecast = -ft.forecast;
    ft.rule = reflect(ft.rule);
    tail = std::move(ft);
  }
  return ForecastSystem(sys.n_columns(), std::move(entries), std::move(tail));
}

}  // namespace detail

// Record of the explicit rival built against a one-variable system whose
// conditional forecasts all sit at least epsilon above (or below) the
// unconditional one. delta is the certified uniform improvement; margin is
// the audited whole-space minimum of the actual score gap.
struct ConstructionReport {
  bool reflected = false;
  Rational epsilon;
  Rational w0;
  Rational similarity;
  Rational w1;
  Rational w2;
  Rational q_prime;
  Rational delta;
  RivalForecasts rival;
  ExtRational margin = ExtRational(Rational(0));
  bool margin_attained = false;
};

// How well separated small-mass strips stay from their endpoints under every
// member of a family. Bounded densities keep barycenters delta away; a
// density growing without bound collapses the separation, witnessed by a
// concrete member and interval.
struct SpreadReport {
  bool satisfied = true;
  Rational delta;
  long witness_index = 0;
  Rational witness_density;
  Rational witness_lo, witness_hi, witness_barycenter;
};

// Worst density ratio of family members against the anchor rule over a
// common refinement of their regions. A positive floor lets masses transfer
// between rules; a vanishing ratio is witnessed by a member and a point.
struct SimilarityReport {
  bool satisfied = true;
  Rational factor;
  long witness_index = 0;
  Rational witness_point;
  Rational witness_ratio;
};

struct SumProprietyReport {
  Rational announced;
  std::vector<Rational> rivals;
  bool proper = true;
  std::optional<std::size_t> beating_rival;
};

// Expected total stake and expected total score; either can come out
// infinite when the family's series diverges.
struct SumConditionReport {
  ExtRational stake_total = ExtRational(Rational(0));
  ExtRational score_total = ExtRational(Rational(0));
  bool both_finite = true;
};

struct ProbeOutcome {
  RivalForecasts rival;
  DominanceKind kind = DominanceKind::none;
  ExtRational margin = ExtRational(Rational(0));
};

struct ProbeReport {
  long candidates = 0;
  long uniform_count = 0;
  long simple_count = 0;
  long divergent_count = 0;
  std::optional<ProbeOutcome> best;
};

struct ProbeOptions {
  Rational grid = Rational(1) / 16;
  long samples = 60;
  unsigned long long seed = 20240817ULL;
  std::vector<RivalForecasts> extras;
};

struct LogScoreDemo {
  bool infinite = false;
  Rational ratio;
  double nats = 0.0;
};

inline SimilarityReport check_similarity(const LambdaMeasure& base, const MeasureFamily& fam) {
  SimilarityReport out;
  if (base.kind() == LambdaMeasure::Kind::sqrt_scaled) {
    if (fam.is_constant() && fam.base().kind() == LambdaMeasure::Kind::sqrt_scaled) {
      out.factor = fam.base().scale() / base.scale();
      return out;
    }
    out.satisfied = false;
    out.factor = 0;
    return out;
  }
  if (fam.is_constant() && fam.base().kind() == LambdaMeasure::Kind::sqrt_scaled) {
    out.satisfied = false;  // ratio vanishes far out where the member thins
    out.factor = 0;
    return out;
  }

  std::vector<GeoSeq> fbp, fdens;
  if (fam.is_constant()) {
    for (auto& b : fam.base().breakpoints()) fbp.push_back(GeoSeq(b));
    for (auto& f : fam.base().densities()) fdens.push_back(GeoSeq(f));
  } else {
    fbp = fam.breakpoint_seqs();
    fdens = fam.density_seqs();
  }
  std::vector<Rational> cuts;
  for (auto& b : base.breakpoints()) cuts.push_back(b);
  for (auto& b : fbp) {
    if (!b.is_constant())
      throw PreconditionFailed("ratio floors need region boundaries that stay put");
    cuts.push_back(b.limit());
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  ExtRational floor = ExtRational::plus_inf();
  for (std::size_t t = 0; t <= cuts.size(); ++t) {
    Rational v;  // representative point of the region
    if (cuts.empty())
      v = 0;
    else if (t == 0)
      v = cuts.front() - 1;
    else if (t == cuts.size())
      v = cuts.back() + 1;
    else
      v = (cuts[t - 1] + cuts[t]) / 2;
    Rational f0 = base.density_at(v);
    std::size_t piece = 0;
    for (auto& b : fbp)
      if (b.limit() <= v) ++piece;
    GeoSeq ratio = Rational(Rational(1) / f0) * fdens[piece];
    auto lo = ratio.inf_over(1);
    if (lo.value <= ExtRational(Rational(0))) {
      out.satisfied = false;
      out.factor = 0;
      out.witness_point = v;
      const Rational tiny = Rational(1) / 1048576;
      long j = 1;
      while (ratio.at(j) >= tiny && j < 200000) ++j;
      out.witness_index = j;
      out.witness_ratio = ratio.at(j);
      return out;
    }
    floor = std::min(floor, lo.value);
  }
  out.factor = floor.value();
  return out;
}

inline SpreadReport check_spread(const ForecastSystem& sys, const Rational& epsilon) {
  if (epsilon <= 0) throw OutOfRange("separation threshold must be positive");
  SpreadReport out;
  ExtRational bound(Rational(0));
  std::optional<Rational> sqrt_delta;
  auto fold_rule = [&](const LambdaMeasure& rule) {
    if (rule.kind() == LambdaMeasure::Kind::sqrt_scaled) {
      Rational d = (epsilon / rule.scale()) * (epsilon / rule.scale()) / 6;
      if (!sqrt_delta || d < *sqrt_delta) sqrt_delta = d;
      return;
    }
    for (auto& f : rule.densities()) bound = std::max(bound, ExtRational(f));
  };
  for (auto& e : sys.entries()) fold_rule(e.rule);
  if (sys.tail()) {
    const MeasureFamily& fam = sys.tail()->rule;
    if (fam.is_constant()) {
      fold_rule(fam.base());
    } else {
      for (std::size_t p = 0; p < fam.density_seqs().size(); ++p) {
        const GeoSeq& f = fam.density_seqs()[p];
        auto hi = f.sup_over(1);
        if (hi.value.is_finite()) {
          bound = std::max(bound, hi.value);
          continue;
        }
        // unbounded member density: exhibit the collapse
        out.satisfied = false;
        const Rational big = Rational(1048576);
        long j = 1;
        while (f.at(j) <= big && j < 200000) ++j;
        out.witness_index = j;
        out.witness_density = f.at(j);
        Rational len = epsilon / out.witness_density;
        const auto& bps = fam.breakpoint_seqs();
        if (bps.empty()) {
          out.witness_lo = 0;
        } else if (p > 0) {
          out.witness_lo = bps[p - 1].at(j);
        } else {
          out.witness_lo = bps[0].at(j) - len;
        }
        out.witness_hi = out.witness_lo + len;
        out.witness_barycenter = (out.witness_lo + out.witness_hi) / 2;
        return out;
      }
    }
  }
  Rational pc_delta;
  bool have_pc = bound > ExtRational(Rational(0));
  if (have_pc) pc_delta = epsilon / (2 * bound.value());
  if (sqrt_delta && (!have_pc || *sqrt_delta < pc_delta)) {
    out.delta = *sqrt_delta;
  } else if (have_pc) {
    out.delta = pc_delta;
  } else {
    throw EmptySystem("no rules to bound");
  }
  return out;
}

inline ConstructionReport construct_dominating_rival(const ForecastSystem& sys,
                                                     const Rational& safety = Rational(9) / 10) {
  if (safety <= 0 || safety >= 1) throw OutOfRange("safety factor must sit strictly inside (0,1)");
  if (sys.entries().size() != 1 || !sys.tail())
    throw PreconditionFailed("construction needs one explicit forecast and a family");
  const ForecastEntry& e = sys.entries()[0];
  const FamilyTail& ft = *sys.tail();
  if (!e.conditioning.is_whole())
    throw PreconditionFailed("the explicit forecast must be unconditional");
  if (ft.support != FamilyTail::Support::cells || !ft.variable || !(*ft.variable == e.variable))
    throw PreconditionFailed("the family must forecast the same variable on row cells");
  if (!ft.coefficient.is_constant() || ft.coefficient.limit() != e.coefficient)
    throw PreconditionFailed("construction needs matched weights");
  if (e.rule.kind() != LambdaMeasure::Kind::piecewise)
    throw UnsupportedRule("construction needs piecewise rules");
  if (ft.rule.is_constant() && ft.rule.base().kind() != LambdaMeasure::Kind::piecewise)
    throw UnsupportedRule("construction needs piecewise rules");

  const Rational p_x = e.forecast;
  GeoSeq gap = ft.forecast - p_x;
  auto below = gap.inf_over(ft.start);
  if (!(below.value > ExtRational(Rational(0)))) {
    auto above = gap.sup_over(ft.start);
    if (above.value < ExtRational(Rational(0))) {
      ConstructionReport rep = construct_dominating_rival(detail::reflect(sys), safety);
      rep.reflected = true;
      rep.q_prime = -rep.q_prime;
      for (auto& q : rep.rival.entry_forecasts) q = -q;
      if (rep.rival.tail_forecast) rep.rival.tail_forecast = -*rep.rival.tail_forecast;
      return rep;
    }
    throw NotNonconglomerable(
        "conditional forecasts do not separate from the unconditional one");
  }

  ConstructionReport rep;
  rep.epsilon = below.value.value();
  rep.w0 = e.rule.mass(p_x, p_x + rep.epsilon) / 2;
  SimilarityReport sim = check_similarity(e.rule, ft.rule);
  if (!sim.satisfied) throw SimilarityViolated("family members thin out against the anchor rule");
  rep.similarity = sim.factor;
  rep.w1 = sim.factor * rep.w0;
  rep.q_prime = e.rule.invert_mass_down(p_x + rep.epsilon, rep.w0);
  rep.w2 = safety * std::min(rep.w0, rep.w1);

  // family-side announcements move down by mass w2; the move must be
  // expressible as one sequence, which takes a settled flat density around
  // the strip
  std::vector<GeoSeq> fbp, fdens;
  if (ft.rule.is_constant()) {
    for (auto& b : ft.rule.base().breakpoints()) fbp.push_back(GeoSeq(b));
    for (auto& f : ft.rule.base().densities()) fdens.push_back(GeoSeq(f));
  } else {
    fbp = ft.rule.breakpoint_seqs();
    fdens = ft.rule.density_seqs();
  }
  long settle = ft.start;
  std::size_t piece = 0;
  for (auto& b : fbp) {
    GeoSeq rel = ft.forecast - b;
    if (rel.is_zero()) {
      ++piece;  // boundary announcements score under the right piece
      continue;
    }
    auto es = rel.eventual_sign();
    settle = std::max(settle, es.threshold + 1);
    if (es.sign >= 0) ++piece;
  }
  if (!fdens[piece].is_constant())
    throw UnsupportedRule("construction needs a settled flat density around the announcements");
  Rational f = fdens[piece].limit();
  GeoSeq q_tail = ft.forecast - Rational(rep.w2 / f);
  if (piece > 0) {
    GeoSeq room = q_tail - fbp[piece - 1];
    if (!room.is_zero()) {
      auto es = room.eventual_sign();
      settle = std::max(settle, es.threshold + 1);
      if (es.sign < 0)
        throw UnsupportedRule("the move crosses a region boundary far out");
    }
  }
  for (long j = ft.start; j <= settle; ++j)
    if (ft.rule.instantiate(j).invert_mass_down(ft.forecast.at(j), rep.w2) != q_tail.at(j))
      throw UnsupportedRule("early announcements sit too close to a region boundary");

  Rational q_x = e.rule.invert_mass_up(p_x, rep.w2);
  rep.delta = rep.w2 * (rep.q_prime - q_x);
  if (rep.delta <= 0) throw PreconditionFailed("certified improvement came out nonpositive");
  rep.rival.entry_forecasts = {q_x};
  rep.rival.tail_forecast = q_tail;

  StructuredRV announced = combined_score(sys);
  StructuredRV challenger = combined_score(sys, &rep.rival);
  DominanceResult dom = dominance(announced, challenger);
  if (dom.kind != DominanceKind::uniform || !(dom.margin >= ExtRational(rep.delta)))
    throw PreconditionFailed("construction failed its audit");
  rep.margin = dom.margin;
  rep.margin_attained = dom.margin_attained;
  return rep;
}

inline SumProprietyReport check_sum_propriety(const ForecastSystem& sys, const Charge& prob,
                                              const std::vector<RivalForecasts>& rivals) {
  SumProprietyReport out;
  out.announced = prob.prevision(combined_score(sys));
  for (std::size_t i = 0; i < rivals.size(); ++i) {
    out.rivals.push_back(prob.prevision(combined_score(sys, &rivals[i])));
    if (out.rivals.back() < out.announced && out.proper) {
      out.proper = false;
      out.beating_rival = i;
    }
  }
  return out;
}

inline SumConditionReport check_score_sum_conditions(const ForecastSystem& sys,
                                                     const Charge& prob) {
  SumConditionReport out;
  try {
    out.stake_total = ExtRational(prob.prevision(combined_absolute_deviation(sys)));
  } catch (const DivergentCombination&) {
    out.stake_total = ExtRational::plus_inf();
    out.both_finite = false;
  }
  try {
    out.score_total = ExtRational(prob.prevision(combined_score(sys)));
  } catch (const DivergentCombination&) {
    out.score_total = ExtRational::plus_inf();
    out.both_finite = false;
  }
  return out;
}

inline ProbeReport probe_no_dominance(const ForecastSystem& sys, const ProbeOptions& opt = {}) {
  if (opt.grid <= 0) throw OutOfRange("grid step must be positive");
  StructuredRV announced = combined_score(sys);
  ProbeReport out;
  auto rank = [](DominanceKind k) {
    return k == DominanceKind::uniform ? 2 : k == DominanceKind::simple ? 1 : 0;
  };
  auto consider = [&](RivalForecasts rival) {
    ++out.candidates;
    DominanceResult dom;
    try {
      StructuredRV challenger = combined_score(sys, &rival);
      dom = dominance(announced, challenger);
    } catch (const DivergentCombination&) {
      ++out.divergent_count;
      return;
    }
    if (dom.kind == DominanceKind::uniform) ++out.uniform_count;
    if (dom.kind == DominanceKind::simple) ++out.simple_count;
    if (!out.best || rank(dom.kind) > rank(out.best->kind) ||
        (rank(dom.kind) == rank(out.best->kind) && dom.margin > out.best->margin))
      out.best = ProbeOutcome{std::move(rival), dom.kind, dom.margin};
  };

  const auto& entries = sys.entries();
  std::vector<Rational> centers;
  for (auto& e : entries) centers.push_back(e.forecast);
  Rational tail_center(0);
  if (sys.tail()) tail_center = sys.tail()->forecast.limit();

  auto grid_values = [&](const Rational& center) {
    std::vector<Rational> vals;
    for (Rational v = center - 1; v <= center + 1; v += opt.grid) vals.push_back(v);
    return vals;
  };

  if (sys.tail() && entries.size() == 1) {
    for (const Rational& qx : grid_values(centers[0])) {
      for (const Rational& qt : grid_values(tail_center))
        consider({{qx}, GeoSeq(qt)});
      consider({{qx}, sys.tail()->forecast});
    }
  } else if (sys.tail() && entries.empty()) {
    for (const Rational& qt : grid_values(tail_center)) consider({{}, GeoSeq(qt)});
    consider({{}, sys.tail()->forecast});
  } else if (!sys.tail() && entries.size() <= 2) {
    if (entries.size() == 1) {
      for (const Rational& q : grid_values(centers[0])) consider({{q}, {}});
    } else {
      for (const Rational& q0 : grid_values(centers[0]))
        for (const Rational& q1 : grid_values(centers[1])) consider({{q0, q1}, {}});
    }
  }

  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<int> step(-256, 256);
  for (long s = 0; s < opt.samples; ++s) {
    RivalForecasts rival;
    for (auto& c : centers) rival.entry_forecasts.push_back(c + Rational(step(rng)) / 256);
    if (sys.tail()) rival.tail_forecast = GeoSeq(tail_center + Rational(step(rng)) / 256);
    consider(std::move(rival));
  }

  try {
    consider(construct_dominating_rival(sys).rival);
  } catch (const Error&) {
  }
  for (const auto& extra : opt.extras) consider(extra);
  return out;
}

// Mass ratio a capped-log rule assigns above the announcement, with its
// natural-log reading; the left endpoint is the infinite-penalty edge.
inline LogScoreDemo log_score_demo(const Rational& c1, const Rational& c2, const Rational& q) {
  if (!(c1 < c2)) throw OutOfRange("the window must be nonempty");
  if (q < c1 || q >= c2) throw OutOfRange("announcement must sit inside the window");
  LogScoreDemo out;
  if (q == c1) {
    out.infinite = true;
    return out;
  }
  out.ratio = (c2 - c1) / (c2 - q);
  out.nats = std::log(to_double(out.ratio));
  return out;
}

}  // namespace prevision
