#pragma once

#include <gmpxx.h>

#include <string>

namespace oslab {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// "p/q" (or "p" for integers).
inline std::string to_string(const Rational& r) { return r.get_str(); }

// Accepts "p/q", "p", or a decimal literal such as "0.25".
Rational parse_rational(const std::string& text);

inline double to_double(const Rational& r) { return r.get_d(); }

}  // namespace oslab
