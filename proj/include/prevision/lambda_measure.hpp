#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prevision/geoseq.hpp"
#include "prevision/rational.hpp"

namespace prevision {

// Measure on the value line with everywhere positive density, given either
// piecewise constant between finitely many breakpoints (outer pieces reach to
// the infinities) or as scale * |v|^(-1/2) / 2. The score it induces for
// announcing q when x obtains is the integral of |x - v| between q and x.
//
// The square-root kind has irrational primitives at most points; operations
// on it are exact only where the needed roots are rational and throw
// InexactValue elsewhere.
class LambdaMeasure {
 public:
  enum class Kind { piecewise, sqrt_scaled };

  static LambdaMeasure piecewise(std::vector<Rational> breakpoints,
                                 std::vector<Rational> densities) {
    if (densities.size() != breakpoints.size() + 1)
      throw ValidationError("piecewise measure needs one more density than breakpoints");
    for (size_t i = 0; i + 1 < breakpoints.size(); ++i)
      if (!(breakpoints[i] < breakpoints[i + 1]))
        throw ValidationError("breakpoints must increase strictly");
    for (auto& f : densities)
      if (f <= 0) throw ValidationError("densities must be positive");
    LambdaMeasure m;
    m.kind_ = Kind::piecewise;
    m.breakpoints_ = std::move(breakpoints);
    m.densities_ = std::move(densities);
    return m;
  }
  // Quadratic loss scaled to unit second difference: density 2 everywhere.
  static LambdaMeasure brier() { return piecewise({}, {Rational(2)}); }
  static LambdaMeasure sqrt_scaled(Rational scale) {
    if (scale <= 0) throw ValidationError("scale must be positive");
    LambdaMeasure m;
    m.kind_ = Kind::sqrt_scaled;
    m.scale_ = std::move(scale);
    return m;
  }

  Kind kind() const { return kind_; }
  const std::vector<Rational>& breakpoints() const {
    require_piecewise();
    return breakpoints_;
  }
  const std::vector<Rational>& densities() const {
    require_piecewise();
    return densities_;
  }
  const Rational& scale() const {
    if (kind_ != Kind::sqrt_scaled) throw PreconditionFailed("measure has no scale");
    return scale_;
  }

  // Density at a point; breakpoints belong to the piece on their right.
  Rational density_at(const Rational& v) const {
    require_piecewise();
    return densities_[piece_of(v)];
  }

  // Mass of the interval (a, b) for a <= b.
  Rational mass(const Rational& a, const Rational& b) const {
    require_order(a, b);
    if (kind_ == Kind::piecewise) return piecewise_integral(a, b).first;
    return antideriv(b) - antideriv(a);
  }
  // Integral of v over (a, b).
  Rational moment(const Rational& a, const Rational& b) const {
    require_order(a, b);
    if (kind_ == Kind::piecewise) return piecewise_integral(a, b).second;
    return moment_primitive(b) - moment_primitive(a);
  }
  // Mass-weighted mean of (a, b); needs a < b.
  Rational barycenter(const Rational& a, const Rational& b) const {
    if (!(a < b)) throw DegenerateInterval("barycenter needs a nondegenerate interval");
    return moment(a, b) / mass(a, b);
  }

  // Penalty for announcing q when x obtains.
  Rational score(const Rational& x, const Rational& q) const {
    if (x == q) return Rational(0);
    Rational lo = std::min(x, q), hi = std::max(x, q);
    Rational m = mass(lo, hi), mo = moment(lo, hi);
    return x == hi ? Rational(x * m - mo) : Rational(mo - x * m);
  }

  // score(x, q) - score(x, p) in closed form: the sign of the move times the
  // strip mass times the distance from x to the strip's barycenter.
  Rational score_difference(const Rational& x, const Rational& p, const Rational& q) const {
    if (p == q) return Rational(0);
    Rational lo = std::min(p, q), hi = std::max(p, q);
    Rational m = mass(lo, hi);
    Rational r = moment(lo, hi) / m;
    int s = q < p ? 1 : -1;
    return s * m * (x - r);
  }

  // The point q below p with mass(q, p) equal to w; outer pieces make this
  // solvable for every positive w.
  Rational invert_mass_down(const Rational& p, const Rational& w) const {
    if (w < 0) throw OutOfRange("mass to invert must be nonnegative");
    if (w == 0) return p;
    if (kind_ == Kind::sqrt_scaled) {
      Rational y = antideriv(p) - w;
      return y < 0 ? Rational(-(y * y) / (scale_ * scale_)) : Rational((y * y) / (scale_ * scale_));
    }
    Rational remaining = w, cur = p;
    size_t piece = piece_of(p);
    for (;;) {
      Rational f = densities_[piece];
      if (piece == 0) return cur - remaining / f;
      Rational lower = breakpoints_[piece - 1];
      Rational cap = f * (cur - lower);
      if (remaining <= cap) return cur - remaining / f;
      remaining -= cap;
      cur = lower;
      --piece;
    }
  }
  Rational invert_mass_up(const Rational& p, const Rational& w) const {
    if (w < 0) throw OutOfRange("mass to invert must be nonnegative");
    if (w == 0) return p;
    if (kind_ == Kind::sqrt_scaled) {
      Rational y = antideriv(p) + w;
      return y < 0 ? Rational(-(y * y) / (scale_ * scale_)) : Rational((y * y) / (scale_ * scale_));
    }
    Rational remaining = w, cur = p;
    size_t piece = piece_of(p);
    for (;;) {
      Rational f = densities_[piece];
      if (piece == breakpoints_.size()) return cur + remaining / f;
      Rational upper = breakpoints_[piece];
      Rational cap = f * (upper - cur);
      if (remaining <= cap) return cur + remaining / f;
      remaining -= cap;
      cur = upper;
      ++piece;
    }
  }

  friend bool operator==(const LambdaMeasure& a, const LambdaMeasure& b) {
    if (a.kind_ != b.kind_) return false;
    if (a.kind_ == Kind::sqrt_scaled) return a.scale_ == b.scale_;
    return a.breakpoints_ == b.breakpoints_ && a.densities_ == b.densities_;
  }
  friend bool operator!=(const LambdaMeasure& a, const LambdaMeasure& b) { return !(a == b); }

  std::string to_string() const {
    if (kind_ == Kind::sqrt_scaled) return "sqrt(scale=" + prevision::to_string(scale_) + ")";
    std::string out = "pc(bp=[";
    for (size_t i = 0; i < breakpoints_.size(); ++i)
      out += (i ? "," : "") + prevision::to_string(breakpoints_[i]);
    out += "], f=[";
    for (size_t i = 0; i < densities_.size(); ++i)
      out += (i ? "," : "") + prevision::to_string(densities_[i]);
    return out + "])";
  }

 private:
  LambdaMeasure() = default;

  void require_piecewise() const {
    if (kind_ != Kind::piecewise)
      throw PreconditionFailed("operation needs the piecewise kind");
  }
  static void require_order(const Rational& a, const Rational& b) {
    if (a > b) throw OutOfRange("interval ends out of order");
  }

  size_t piece_of(const Rational& v) const {
    size_t i = 0;
    while (i < breakpoints_.size() && v >= breakpoints_[i]) ++i;
    return i;
  }

  // mass and moment of (a, b) for the piecewise kind in one sweep
  std::pair<Rational, Rational> piecewise_integral(const Rational& a, const Rational& b) const {
    Rational m(0), mo(0);
    for (size_t i = 0; i < densities_.size(); ++i) {
      Rational lo = i == 0 ? a : std::max(a, breakpoints_[i - 1]);
      Rational hi = i == breakpoints_.size() ? b : std::min(b, breakpoints_[i]);
      if (lo < hi) {
        m += densities_[i] * (hi - lo);
        mo += densities_[i] * (hi * hi - lo * lo) / 2;
      }
    }
    return {m, mo};
  }

  // sign(v) * scale * sqrt(|v|); exact only at rational squares
  Rational antideriv(const Rational& v) const {
    auto root = exact_sqrt(abs(v));
    if (!root)
      throw InexactValue("square root of " + prevision::to_string(abs(v)) +
                         " is irrational");
    return sign(v) * scale_ * *root;
  }
  // scale * v * sqrt(|v|) / 3
  Rational moment_primitive(const Rational& v) const {
    auto root = exact_sqrt(abs(v));
    if (!root)
      throw InexactValue("square root of " + prevision::to_string(abs(v)) +
                         " is irrational");
    return scale_ * v * *root / 3;
  }

  Kind kind_ = Kind::piecewise;
  std::vector<Rational> breakpoints_;
  std::vector<Rational> densities_;
  Rational scale_ = Rational(0);
};

}  // namespace prevision
