#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <optional>
#include <string>
#include <string_view>

#include "prevision/errors.hpp"

namespace prevision {

using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

inline int sign(const Rational& r) { return r.sign(); }

// b^e with integer exponent; e < 0 needs b != 0.
inline Rational pow_int(Rational b, long e) {
  if (e < 0) {
    if (b == 0) throw OutOfRange("pow_int: zero base with negative exponent");
    b = Rational(1) / b;
    e = -e;
  }
  Rational out(1);
  while (e > 0) {
    if (e & 1) out *= b;
    b *= b;
    e >>= 1;
  }
  return out;
}

inline BigInt floor_int(const Rational& r) {
  BigInt q = numerator(r) / denominator(r);
  if (r < 0 && q * denominator(r) != numerator(r)) --q;
  return q;
}

inline BigInt ceil_int(const Rational& r) { return -floor_int(-r); }

// Exact square root when r is the square of a rational, otherwise nullopt.
inline std::optional<Rational> exact_sqrt(const Rational& r) {
  if (r < 0) return std::nullopt;
  BigInt n = numerator(r), d = denominator(r);
  BigInt sn = sqrt(n), sd = sqrt(d);
  if (sn * sn != n || sd * sd != d) return std::nullopt;
  return Rational(sn) / Rational(sd);
}

// Accepts "7", "-3/4", "0.6", "-1.25", ".5". Decimal literals are read as
// digits over a power of ten, so the value is exact. Anything else throws.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw ParseError("not a rational literal: '" + std::string(text) + "'");
  };
  size_t b = 0, e = text.size();
  while (b < e && (text[b] == ' ' || text[b] == '\t')) ++b;
  while (e > b && (text[e - 1] == ' ' || text[e - 1] == '\t')) --e;
  std::string_view s = text.substr(b, e - b);
  if (s.empty()) return fail();

  bool neg = false;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    s.remove_prefix(1);
    if (s.empty()) return fail();
  }
  auto all_digits = [](std::string_view v) {
    if (v.empty()) return false;
    for (char c : v)
      if (c < '0' || c > '9') return false;
    return true;
  };

  Rational value;
  size_t slash = s.find('/');
  size_t dot = s.find('.');
  if (slash != std::string_view::npos) {
    std::string_view num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return fail();
    BigInt n{std::string(num)}, d{std::string(den)};
    if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
    value = Rational(n) / Rational(d);
  } else if (dot != std::string_view::npos) {
    std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if (ip.empty() && fp.empty()) return fail();
    if (!ip.empty() && !all_digits(ip)) return fail();
    if (!fp.empty() && !all_digits(fp)) return fail();
    BigInt whole = ip.empty() ? BigInt(0) : BigInt(std::string(ip));
    BigInt frac = fp.empty() ? BigInt(0) : BigInt(std::string(fp));
    BigInt scale = 1;
    for (size_t i = 0; i < fp.size(); ++i) scale *= 10;
    value = Rational(whole) + Rational(frac) / Rational(scale);
  } else {
    if (!all_digits(s)) return fail();
    value = Rational(BigInt(std::string(s)));
  }
  return neg ? -value : value;
}

// Canonical "n" or "n/d" text.
inline std::string to_string(const Rational& r) {
  std::string out = numerator(r).str();
  if (denominator(r) != 1) out += "/" + denominator(r).str();
  return out;
}

// Exact terminating decimal when the reduced denominator is 2^a 5^b and fits in
// max_digits fractional places; otherwise a rounded value marked with '~'.
inline std::string decimal_string(const Rational& r, int max_digits = 24) {
  BigInt num = numerator(r), den = denominator(r);
  bool neg = num < 0;
  if (neg) num = -num;
  int twos = 0, fives = 0;
  BigInt d = den;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  int places = twos > fives ? twos : fives;
  bool exact = d == 1 && places <= max_digits;
  if (!exact) places = max_digits;

  BigInt scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  BigInt scaled = num * scale;
  BigInt q = scaled / den;
  if (!exact) {
    // round half up
    BigInt rem2 = (scaled % den) * 2;
    if (rem2 >= den) ++q;
  }
  std::string digits = q.str();
  std::string out;
  if (places == 0) {
    out = digits;
  } else {
    if ((int)digits.size() <= places) digits.insert(0, places + 1 - digits.size(), '0');
    out = digits.substr(0, digits.size() - places) + "." + digits.substr(digits.size() - places);
    // trim trailing zeros but keep at least one fractional digit
    size_t last = out.find_last_not_of('0');
    if (out[last] == '.') ++last;
    out.erase(last + 1);
  }
  if (neg && q != 0) out.insert(0, "-");
  if (!exact) out.insert(0, "~");
  return out;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace prevision
