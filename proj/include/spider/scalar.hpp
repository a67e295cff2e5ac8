#pragma once

// Numeric backends shared by every module: IEEE double for sweeps and
// GMP rationals for exact identity checks.

#include <gmpxx.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <concepts>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spider {

using Rational = mpq_class;

template <class S>
concept Scalar = std::same_as<S, double> || std::same_as<S, Rational>;

enum class Backend { Float, Exact };

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr Backend backend = Backend::Float;
  static constexpr bool exact = false;
  static constexpr std::string_view name = "float";
};

template <>
struct scalar_traits<Rational> {
  static constexpr Backend backend = Backend::Exact;
  static constexpr bool exact = true;
  static constexpr std::string_view name = "exact";
};

inline double to_double(double x) { return x; }
/// Correctly rounded when numerator and denominator are exact doubles;
/// otherwise GMP's truncating conversion.
inline double to_double(const Rational& x) {
  const auto& n = x.get_num();
  const auto& d = x.get_den();
  if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 53 && mpz_sizeinbase(d.get_mpz_t(), 2) <= 53) return n.get_d() / d.get_d();
  return x.get_d();
}

inline double abs_of(double x) { return std::fabs(x); }
inline Rational abs_of(const Rational& x) { return abs(x); }

template <Scalar S>
S from_int(long v) {
  return S(v);
}

template <Scalar S>
S ratio(long num, long den) {
  if (den == 0) throw std::invalid_argument("ratio: zero denominator");
  if constexpr (std::same_as<S, double>) {
    return static_cast<double>(num) / static_cast<double>(den);
  } else {
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
}

/// Parses "p/q", an integer, or a decimal literal. Decimal literals are
/// exact in the rational backend ("0.1" becomes 1/10).
template <Scalar S>
S parse_scalar(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("parse_scalar: empty string");
  if constexpr (std::same_as<S, double>) {
    if (auto slash = s.find('/'); slash != std::string::npos) {
      Rational q(s);
      q.canonicalize();
      return q.get_d();
    }
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("parse_scalar: trailing characters in '" + s + "'");
    return v;
  } else {
    if (auto dot = s.find('.'); dot != std::string::npos) {
      if (s.find_first_of("eE") != std::string::npos)
        throw std::invalid_argument("parse_scalar: exponent notation is not exact: '" + s + "'");
      bool neg = !s.empty() && s[0] == '-';
      std::string digits = s.substr(neg ? 1 : 0);
      dot = digits.find('.');
      std::string frac = digits.substr(dot + 1);
      std::string whole = digits.substr(0, dot) + frac;
      if (whole.empty()) throw std::invalid_argument("parse_scalar: malformed '" + s + "'");
      mpz_class num(whole, 10);
      mpz_class den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
      Rational q(num, den);
      q.canonicalize();
      return neg ? Rational(-q) : q;
    }
    Rational q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("parse_scalar: malformed '" + s + "'");
    if (q.get_den() == 0) throw std::invalid_argument("parse_scalar: zero denominator");
    q.canonicalize();
    return q;
  }
}

/// Exact values are written as "p/q" (always with a denominator);
/// doubles use the shortest round-trip form.
inline std::string format_scalar(const Rational& x) {
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

inline std::string format_double(double x) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

inline std::string format_scalar(double x) { return format_double(x); }

}  // namespace spider
