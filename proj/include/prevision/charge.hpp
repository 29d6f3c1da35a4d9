#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "prevision/structured_rv.hpp"

namespace prevision {

// Finitely additive probability on the column space. Each column carries
// finitely many atoms, optionally a geometric run of atoms coef*ratio^j for
// every j past start, and a diffuse mass that lives beyond all finite sets of
// the column: it contributes to cofinite subsets and weights a variable by
// its remote value there. Total mass must be exactly one.
class Charge {
 public:
  struct GeometricTail {
    Rational coef;
    Rational ratio;
    long start = 0;  // atoms sit at every index strictly above this
  };
  struct Column {
    std::map<long, Rational> atoms;
    std::optional<GeometricTail> tail;
    Rational diffuse = Rational(0);
  };

  explicit Charge(std::vector<Column> cols) : cols_(std::move(cols)) {
    if (cols_.empty()) throw ValidationError("charge needs at least one column");
    Rational total(0);
    for (auto& c : cols_) {
      for (auto it = c.atoms.begin(); it != c.atoms.end();) {
        if (it->first < 1) throw ValidationError("atom index below 1");
        if (it->second < 0) throw ValidationError("negative atom weight");
        if (it->second == 0)
          it = c.atoms.erase(it);
        else
          ++it;
      }
      if (c.tail) {
        if (c.tail->coef <= 0) throw ValidationError("tail weight must be positive");
        if (c.tail->ratio <= 0 || c.tail->ratio >= 1)
          throw ValidationError("tail ratio must lie in (0,1)");
        if (c.tail->start < 0) throw ValidationError("tail start below 0");
        for (auto& [j, w] : c.atoms)
          if (j > c.tail->start)
            throw ValidationError("atom overlaps the geometric run of its column");
        total += tail_mass(*c.tail);
      }
      if (c.diffuse < 0) throw ValidationError("negative diffuse mass");
      total += c.diffuse;
      for (auto& [j, w] : c.atoms) total += w;
    }
    if (total != 1)
      throw ValidationError("charge mass is " + to_string(total) + ", not 1");
  }

  int n_columns() const { return int(cols_.size()); }
  const Column& col(int k) const { return cols_.at(k); }

  // Expected value, exact. Works column by column; the geometric run pairs
  // with the variable's tail through a weighted series, with finite
  // corrections where the variable deviates from its tail.
  Rational prevision(const StructuredRV& x) const {
    if (x.n_columns() != n_columns())
      throw ValidationError("variable and charge live on different state spaces");
    Rational total(0);
    for (int k = 0; k < n_columns(); ++k) {
      const Column& c = cols_[std::size_t(k)];
      const auto& xc = x.col(k);
      for (auto& [j, w] : c.atoms) total += w * x.at(State{k, j});
      if (c.tail) {
        total += xc.tail.weighted_series_sum(c.tail->coef, c.tail->ratio, c.tail->start + 1);
        for (auto& [j, v] : xc.exceptions) {
          if (j > c.tail->start)
            total += c.tail->coef * pow_int(c.tail->ratio, j) * (v - xc.tail.at(j));
        }
      }
      if (c.diffuse != 0) total += c.diffuse * xc.tail.limit();
    }
    return total;
  }

  Rational probability(const StructuredEvent& e) const {
    return prevision(StructuredRV::indicator(e));
  }

  // Conditional expectation given h. Positive-probability events condition by
  // the usual ratio; null events fall back to an attached charge concentrated
  // on the event, and without one the question has no answer here.
  Rational conditional_prevision(const StructuredRV& x, const StructuredEvent& h) const {
    Rational p = probability(h);
    if (p > 0) return prevision(masked(x, h)) / p;
    for (auto& [event, charge] : attached_) {
      if (event == h) return charge.prevision(masked(x, h));
    }
    throw NullConditioningEvent("conditioning event has probability 0 and no attached charge");
  }
  Rational conditional_probability(const StructuredEvent& e, const StructuredEvent& h) const {
    return conditional_prevision(StructuredRV::indicator(e), h);
  }

  // Register the conditional charge used when h has probability zero. The
  // attached charge must put all its mass on h.
  void attach_conditional(const StructuredEvent& h, Charge q) {
    if (h.n_columns() != n_columns())
      throw ValidationError("attached event lives on a different state space");
    if (q.probability(h) != 1)
      throw ValidationError("attached charge must concentrate on its event");
    attached_.emplace_back(h, std::move(q));
  }
  const std::vector<std::pair<StructuredEvent, Charge>>& attached() const { return attached_; }

  static Rational tail_mass(const GeometricTail& t) {
    return t.coef * pow_int(t.ratio, t.start + 1) / (1 - t.ratio);
  }

 private:
  std::vector<Column> cols_;
  std::vector<std::pair<StructuredEvent, Charge>> attached_;
};

}  // namespace prevision
