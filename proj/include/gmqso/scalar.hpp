#pragma once

// Numeric backends. `double` is the float backend, `Rational` (GMP mpq) the
// exact one. Everything numeric in the library is templated on one of them.

#include <gmpxx.h>

#include <charconv>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>

#include "gmqso/errors.hpp"

namespace gmqso {

using Rational = mpq_class;

inline constexpr double kSupportThreshold = 1e-12;
inline constexpr double kFloatSumTolerance = 1e-12;

namespace detail {

// Parses "p/q", "p", or a plain decimal ("0.25", "-1.5e-3") exactly.
inline Rational parse_exact(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw ValidationError("empty numeric literal");
  if (s.find('/') != std::string::npos) {
    Rational q;
    if (q.set_str(s, 10) != 0) throw ValidationError("malformed rational '" + s + "'");
    if (q.get_den() == 0) throw ValidationError("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
  }
  std::string mantissa = s;
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    mantissa = s.substr(0, e);
    try {
      exponent = std::stol(s.substr(e + 1));
    } catch (...) {
      throw ValidationError("malformed number '" + s + "'");
    }
  }
  std::string digits;
  bool negative = false;
  std::size_t pos = 0;
  if (pos < mantissa.size() && (mantissa[pos] == '-' || mantissa[pos] == '+')) negative = mantissa[pos++] == '-';
  bool seen_point = false, seen_digit = false;
  for (; pos < mantissa.size(); ++pos) {
    char c = mantissa[pos];
    if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      digits += c;
      seen_digit = true;
      if (seen_point) --exponent;
    } else {
      throw ValidationError("malformed number '" + s + "'");
    }
  }
  if (!seen_digit) throw ValidationError("malformed number '" + s + "'");
  mpz_class num(digits, 10);
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational q = exponent < 0 ? Rational(num, ten_pow) : Rational(num * ten_pow);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

}  // namespace detail

template <class T>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr bool exact = false;
  static constexpr std::string_view name = "float";

  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double ratio(long p, long q) { return static_cast<double>(p) / static_cast<double>(q); }
  static double to_double(double v) { return v; }
  static double abs(double v) { return std::abs(v); }
  static bool positive(double v, double threshold) { return v > threshold; }
  static int sign(double v) { return (v > 0) - (v < 0); }
  static bool finite(double v) { return std::isfinite(v); }

  /// Shortest round-trip decimal.
  static std::string format(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  }

  static double parse(std::string_view text) {
    if (text.find('/') != std::string_view::npos) return detail::parse_exact(text).get_d();
    double v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
      throw ValidationError("malformed number '" + std::string(text) + "'");
    return v;
  }

  static double from_double(double v) { return v; }
};

template <>
struct scalar_traits<Rational> {
  static constexpr bool exact = true;
  static constexpr std::string_view name = "rational";

  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static Rational ratio(long p, long q) {
    Rational r(p, q);
    r.canonicalize();
    return r;
  }
  static double to_double(const Rational& v) { return v.get_d(); }
  static Rational abs(const Rational& v) { return ::abs(v); }
  static bool positive(const Rational& v, double) { return sgn(v) > 0; }
  static int sign(const Rational& v) { return sgn(v); }
  static bool finite(const Rational&) { return true; }
  static std::string format(const Rational& v) { return v.get_str(10); }
  static Rational parse(std::string_view text) { return detail::parse_exact(text); }

  /// Exact value of a JSON number via its shortest decimal spelling, so 0.1
  /// reads as 1/10 rather than the nearest binary double.
  static Rational from_double(double v) { return detail::parse_exact(scalar_traits<double>::format(v)); }

  static std::size_t denominator_bits(const Rational& v) { return mpz_sizeinbase(v.get_den_mpz_t(), 2); }
};

template <class T>
concept Scalar = requires { scalar_traits<T>::exact; };

using Float = double;

}  // namespace gmqso
