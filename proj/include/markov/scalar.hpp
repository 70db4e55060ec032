#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>

namespace markov {

/// Exact rational scalar (arbitrary-precision numerator and denominator).
using Rational = mpq_class;

/// Absolute tolerance used by the float backend for every internal
/// stochasticity and residual check.
inline constexpr double kFloatTolerance = 1e-9;

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "float";
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double abs(double v) { return std::fabs(v); }
  static double to_double(double v) { return v; }
  static bool is_zero(double v) { return v == 0.0; }
  static bool near(double a, double b) { return std::fabs(a - b) <= kFloatTolerance; }
  static bool positive(double v) { return v > 0.0; }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* name = "exact";
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static Rational abs(const Rational& v) { return ::abs(v); }
  static double to_double(const Rational& v) { return v.get_d(); }
  static bool is_zero(const Rational& v) { return sgn(v) == 0; }
  static bool near(const Rational& a, const Rational& b) { return a == b; }
  static bool positive(const Rational& v) { return sgn(v) > 0; }
};

/// Correctly rounded conversion (mpq_get_d truncates).
double to_double(const Rational& v);
inline double to_double(double v) { return v; }

/// "a/b", or "a" when the denominator is 1.
std::string to_string(const Rational& v);

/// Parses "a", "-a" or "a/b"; throws markov::Error on malformed input or a
/// zero denominator.
Rational parse_rational(const std::string& text);

}  // namespace markov
