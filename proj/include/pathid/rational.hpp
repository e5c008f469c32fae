#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace pathid {

using Rational = mpq_class;

// Accepts "3/16", "-2", "0.125" and "1e-3"-free decimals.
Rational parse_rational(std::string_view text);

// num/den in lowest terms; gmp leaves a two-argument constructor unreduced.
inline Rational ratio(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Canonical form: "p/q" in lowest terms, or "p" when q == 1.
std::string to_string(const Rational& value);

// Scalar conversion used by the double-valued evaluator.
template <class Scalar>
Scalar convert(const Rational& value);

template <>
inline Rational convert<Rational>(const Rational& value) {
  return value;
}

template <>
inline double convert<double>(const Rational& value) {
  return value.get_d();
}

inline double to_double(const Rational& value) { return value.get_d(); }
inline double to_double(double value) { return value; }

}  // namespace pathid
