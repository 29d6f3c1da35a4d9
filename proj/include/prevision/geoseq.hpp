#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "prevision/rational.hpp"

namespace prevision {

// Value that may sit at +/- infinity (suprema, infima, divergent sums).
class ExtRational {
 public:
  ExtRational() : kind_(Kind::finite), value_(0) {}
  /*implicit*/ ExtRational(Rational v) : kind_(Kind::finite), value_(std::move(v)) {}
  static ExtRational plus_inf() { return ExtRational(Kind::plus_inf); }
  static ExtRational minus_inf() { return ExtRational(Kind::minus_inf); }

  bool is_finite() const { return kind_ == Kind::finite; }
  bool is_plus_inf() const { return kind_ == Kind::plus_inf; }
  bool is_minus_inf() const { return kind_ == Kind::minus_inf; }
  const Rational& value() const {
    if (!is_finite()) throw PreconditionFailed("infinite value where a rational was required");
    return value_;
  }

  friend bool operator==(const ExtRational& a, const ExtRational& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::finite || a.value_ == b.value_);
  }
  friend bool operator<(const ExtRational& a, const ExtRational& b) {
    if (a.kind_ == Kind::minus_inf) return b.kind_ != Kind::minus_inf;
    if (a.kind_ == Kind::plus_inf) return false;
    if (b.kind_ == Kind::plus_inf) return true;
    if (b.kind_ == Kind::minus_inf) return false;
    return a.value_ < b.value_;
  }
  friend bool operator<=(const ExtRational& a, const ExtRational& b) { return a < b || a == b; }
  friend bool operator>(const ExtRational& a, const ExtRational& b) { return b < a; }
  friend bool operator>=(const ExtRational& a, const ExtRational& b) { return b <= a; }

  std::string to_string() const {
    if (is_plus_inf()) return "inf";
    if (is_minus_inf()) return "-inf";
    return prevision::to_string(value_);
  }

 private:
  enum class Kind { finite, plus_inf, minus_inf };
  explicit ExtRational(Kind k) : kind_(k), value_(0) {}
  Kind kind_;
  Rational value_;
};

// One geometric component coef * ratio^j.
struct GeoTerm {
  Rational coef;
  Rational ratio;
};

// Sequence j |-> limit + sum_t coef_t * ratio_t^j on indices j >= 1.
//
// Ratios are positive; ratio 1 folds into the constant part and equal ratios
// merge, so the stored terms have distinct ratios and nonzero coefficients.
// Ratios above 1 are admitted (growing density families); consumers that need
// convergence require contracting(), i.e. every ratio below 1, in which case
// limit() is the value approached as j grows.
class GeoSeq {
 public:
  GeoSeq() : limit_(0) {}
  /*implicit*/ GeoSeq(Rational constant) : limit_(std::move(constant)) {}
  /*implicit*/ GeoSeq(int constant) : limit_(constant) {}
  GeoSeq(Rational limit, std::vector<GeoTerm> terms) : limit_(std::move(limit)) {
    std::map<Rational, Rational> by_ratio;
    for (auto& t : terms) {
      if (t.ratio <= 0) throw ValidationError("geometric ratio must be positive");
      if (t.ratio == 1) {
        limit_ += t.coef;
      } else {
        by_ratio[t.ratio] += t.coef;
      }
    }
    for (auto& [ratio, coef] : by_ratio) {
      if (coef != 0) terms_.push_back({coef, ratio});
    }
    std::reverse(terms_.begin(), terms_.end());  // largest ratio first
  }
  static GeoSeq geometric(Rational coef, Rational ratio) {
    return GeoSeq(Rational(0), {{std::move(coef), std::move(ratio)}});
  }

  const Rational& limit() const { return limit_; }
  const std::vector<GeoTerm>& terms() const { return terms_; }
  bool is_constant() const { return terms_.empty(); }
  bool is_zero() const { return terms_.empty() && limit_ == 0; }
  bool contracting() const {
    for (auto& t : terms_)
      if (t.ratio >= 1) return false;
    return true;
  }

  Rational at(long j) const {
    Rational v = limit_;
    for (auto& t : terms_) v += t.coef * pow_int(t.ratio, j);
    return v;
  }
  double at_double(long j) const { return to_double(at(j)); }

  friend GeoSeq operator+(const GeoSeq& a, const GeoSeq& b) {
    std::vector<GeoTerm> terms = a.terms_;
    terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
    return GeoSeq(a.limit_ + b.limit_, std::move(terms));
  }
  friend GeoSeq operator-(const GeoSeq& a, const GeoSeq& b) { return a + (-b); }
  GeoSeq operator-() const {
    std::vector<GeoTerm> terms;
    terms.reserve(terms_.size());
    for (auto& t : terms_) terms.push_back({-t.coef, t.ratio});
    return GeoSeq(-limit_, std::move(terms));
  }
  friend GeoSeq operator*(const GeoSeq& a, const GeoSeq& b) {
    std::vector<GeoTerm> terms;
    for (auto& t : a.terms_) {
      if (b.limit_ != 0) terms.push_back({t.coef * b.limit_, t.ratio});
      for (auto& u : b.terms_) terms.push_back({t.coef * u.coef, t.ratio * u.ratio});
    }
    for (auto& u : b.terms_) {
      if (a.limit_ != 0) terms.push_back({u.coef * a.limit_, u.ratio});
    }
    return GeoSeq(a.limit_ * b.limit_, std::move(terms));
  }
  friend GeoSeq operator*(const Rational& s, const GeoSeq& a) { return GeoSeq(s) * a; }
  friend GeoSeq operator*(const GeoSeq& a, const Rational& s) { return GeoSeq(s) * a; }
  friend bool operator==(const GeoSeq& a, const GeoSeq& b) {
    if (a.limit_ != b.limit_ || a.terms_.size() != b.terms_.size()) return false;
    for (size_t i = 0; i < a.terms_.size(); ++i) {
      if (a.terms_[i].coef != b.terms_[i].coef || a.terms_[i].ratio != b.terms_[i].ratio)
        return false;
    }
    return true;
  }
  friend bool operator!=(const GeoSeq& a, const GeoSeq& b) { return !(a == b); }

  // Sequence j |-> at(j + 1).
  GeoSeq shift() const {
    std::vector<GeoTerm> terms;
    terms.reserve(terms_.size());
    for (auto& t : terms_) terms.push_back({t.coef * t.ratio, t.ratio});
    return GeoSeq(limit_, std::move(terms));
  }

  // sign holds for every index strictly above threshold
  struct EventualSign {
    int sign;
    long threshold;
  };

  // Sign of at(j) for all large j. The dominant component is the one with the
  // largest ratio (the constant part counts as ratio 1); past the returned
  // threshold it outweighs the rest, so the sign is settled.
  EventualSign eventual_sign() const {
    struct Part {
      Rational coef;
      Rational ratio;
    };
    std::vector<Part> parts;
    if (limit_ != 0) parts.push_back({limit_, Rational(1)});
    for (auto& t : terms_) parts.push_back({t.coef, t.ratio});
    if (parts.empty()) return {0, 0};
    size_t dom = 0;
    for (size_t i = 1; i < parts.size(); ++i)
      if (parts[i].ratio > parts[dom].ratio) dom = i;
    if (parts.size() == 1) return {sign(parts[0].coef), 0};

    std::vector<Rational> cur(parts.size());
    for (size_t i = 0; i < parts.size(); ++i) cur[i] = abs(parts[i].coef) * parts[i].ratio;
    for (long j = 1; j <= kMaxIterations; ++j) {
      Rational rest(0);
      for (size_t i = 0; i < parts.size(); ++i)
        if (i != dom) rest += cur[i];
      if (cur[dom] > rest) return {sign(parts[dom].coef), j - 1};
      for (size_t i = 0; i < parts.size(); ++i) cur[i] *= parts[i].ratio;
    }
    throw PreconditionFailed("eventual-sign threshold search exceeded iteration cap");
  }

  struct Extremum {
    ExtRational value;
    bool attained;
    long witness;  // index achieving the value when attained
  };

  // Exact infimum of at(j) over j >= j_start, j not in skip. Works by locating
  // the index past which the sequence is strictly monotone (the first-difference
  // sequence has an eventual sign), then scanning the finite prefix.
  Extremum inf_over(long j_start, const std::set<long>& skip = {}) const {
    auto first_unskipped = [&](long from) {
      long j = from;
      while (skip.count(j)) ++j;
      return j;
    };
    if (terms_.empty()) {
      long j = first_unskipped(j_start);
      return {ExtRational(limit_), true, j};
    }
    // A growing component with the largest ratio decides boundedness below.
    const GeoTerm& top = terms_.front();
    if (top.ratio > 1 && top.coef < 0) return {ExtRational::minus_inf(), false, 0};

    EventualSign diff = (shift() - *this).eventual_sign();
    long anchor = first_unskipped(std::max(j_start, diff.threshold + 1));
    bool have = false;
    Rational best(0);
    long best_j = 0;
    for (long j = j_start; j <= anchor; ++j) {
      if (skip.count(j)) continue;
      Rational v = at(j);
      if (!have || v < best) {
        have = true;
        best = v;
        best_j = j;
      }
    }
    if (diff.sign > 0) return {ExtRational(best), true, best_j};
    // eventually strictly decreasing
    if (!contracting()) return {ExtRational::minus_inf(), false, 0};
    if (best <= limit_) return {ExtRational(best), true, best_j};
    return {ExtRational(limit_), false, 0};
  }

  Extremum sup_over(long j_start, const std::set<long>& skip = {}) const {
    Extremum e = (-*this).inf_over(j_start, skip);
    ExtRational v = e.value.is_minus_inf() ? ExtRational::plus_inf()
                    : e.value.is_plus_inf() ? ExtRational::minus_inf()
                                            : ExtRational(-e.value.value());
    return {v, e.attained, e.witness};
  }

  // sum_{j >= j_start} at(j); needs a vanishing constant part and contracting terms.
  Rational series_sum(long j_start) const {
    if (limit_ != 0 || !contracting())
      throw DivergentCombination("series of " + to_string() + " does not converge");
    Rational s(0);
    for (auto& t : terms_) s += t.coef * pow_int(t.ratio, j_start) / (1 - t.ratio);
    return s;
  }

  // sum_{j >= j_start} a * r^j * at(j) for 0 < r < 1.
  Rational weighted_series_sum(const Rational& a, const Rational& r, long j_start) const {
    if (r <= 0 || r >= 1)
      throw ValidationError("weight ratio must lie in (0,1)");
    Rational s = limit_ * pow_int(r, j_start) / (1 - r);
    for (auto& t : terms_) {
      Rational rr = t.ratio * r;
      if (rr >= 1)
        throw DivergentCombination("weighted series of " + to_string() + " diverges at ratio " +
                                   prevision::to_string(rr));
      s += t.coef * pow_int(rr, j_start) / (1 - rr);
    }
    return a * s;
  }

  std::string to_string() const {
    std::string out = prevision::to_string(limit_);
    for (auto& t : terms_) {
      out += " + (" + prevision::to_string(t.coef) + ")*(" + prevision::to_string(t.ratio) + ")^j";
    }
    return out;
  }

 private:
  static constexpr long kMaxIterations = 200000;
  Rational limit_;
  std::vector<GeoTerm> terms_;
};

}  // namespace prevision
