#pragma once

#include <vector>

#include "prevision/charge.hpp"
#include "prevision/lambda_measure.hpp"

namespace prevision {

// Scoring rule that may change along a column: either one fixed measure or a
// piecewise-constant measure whose breakpoints and densities are sequences in
// the index. The varying kind densifies as fast as it likes; each instant is
// validated when instantiated.
class MeasureFamily {
 public:
  static MeasureFamily constant(LambdaMeasure m) {
    MeasureFamily f;
    f.base_ = std::move(m);
    f.varying_ = false;
    return f;
  }
  static MeasureFamily varying(std::vector<GeoSeq> breakpoints, std::vector<GeoSeq> densities) {
    if (densities.size() != breakpoints.size() + 1)
      throw ValidationError("varying rule needs one more density than breakpoints");
    MeasureFamily f;
    f.varying_ = true;
    f.breakpoints_ = std::move(breakpoints);
    f.densities_ = std::move(densities);
    return f;
  }

  bool is_constant() const { return !varying_; }
  const LambdaMeasure& base() const {
    if (varying_) throw PreconditionFailed("rule varies along the column");
    return base_;
  }
  const std::vector<GeoSeq>& breakpoint_seqs() const {
    require_varying();
    return breakpoints_;
  }
  const std::vector<GeoSeq>& density_seqs() const {
    require_varying();
    return densities_;
  }

  LambdaMeasure instantiate(long j) const {
    if (!varying_) return base_;
    std::vector<Rational> bp, f;
    bp.reserve(breakpoints_.size());
    f.reserve(densities_.size());
    for (auto& s : breakpoints_) bp.push_back(s.at(j));
    for (auto& s : densities_) f.push_back(s.at(j));
    return LambdaMeasure::piecewise(std::move(bp), std::move(f));
  }

 private:
  MeasureFamily() : base_(LambdaMeasure::brier()) {}
  void require_varying() const {
    if (!varying_) throw PreconditionFailed("rule does not vary along the column");
  }
  LambdaMeasure base_;
  bool varying_ = false;
  std::vector<GeoSeq> breakpoints_;
  std::vector<GeoSeq> densities_;
};

// Pointwise score of a variable against the announcement q. The score is not
// affine in the outcome, so this direct form needs constant column tails; the
// aggregation layer handles varying tails symbolically.
inline StructuredRV score_rv(const StructuredRV& x, const Rational& q,
                             const LambdaMeasure& rule) {
  std::vector<StructuredRV::Column> cols(static_cast<std::size_t>(x.n_columns()));
  for (int k = 0; k < x.n_columns(); ++k) {
    const auto& xc = x.col(k);
    if (!xc.tail.is_constant())
      throw PreconditionFailed("pointwise scoring needs constant column tails");
    cols[std::size_t(k)].tail = GeoSeq(rule.score(xc.tail.limit(), q));
    for (auto& [j, v] : xc.exceptions)
      cols[std::size_t(k)].exceptions[j] = rule.score(v, q);
  }
  return StructuredRV(std::move(cols));
}

// score(x, q) - score(x, p) pointwise. The closed form is affine in the
// outcome, so arbitrary structured variables are fine.
inline StructuredRV score_difference_rv(const StructuredRV& x, const Rational& p,
                                        const Rational& q, const LambdaMeasure& rule) {
  if (p == q) return StructuredRV::constant(x.n_columns(), Rational(0));
  Rational lo = std::min(p, q), hi = std::max(p, q);
  Rational m = rule.mass(lo, hi);
  Rational r = rule.moment(lo, hi) / m;
  Rational s = q < p ? m : -m;
  return s * (x - r);
}

inline Rational expected_score(const Charge& prob, const StructuredRV& x, const Rational& q,
                               const LambdaMeasure& rule) {
  return prob.prevision(score_rv(x, q, rule));
}

// Expected penalty increase for announcing q instead of the variable's actual
// prevision p. Strictly positive for q != p whatever the charge, which is the
// propriety of the whole family.
inline Rational expected_score_increase(const Charge& prob, const StructuredRV& x,
                                        const Rational& q, const LambdaMeasure& rule) {
  Rational p = prob.prevision(x);
  return prob.prevision(score_difference_rv(x, p, q, rule));
}

}  // namespace prevision
