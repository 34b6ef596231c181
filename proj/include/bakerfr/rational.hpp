// Exact rational scalar and small numeric helpers shared by every module.
#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>

#include <boost/multiprecision/cpp_int.hpp>

#include "bakerfr/errors.hpp"

namespace bakerfr {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

template <class S>
inline constexpr bool is_exact_v = std::is_same_v<S, Rational>;

inline BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  if (den == 0) throw ConstructionError("rational with zero denominator");
  return Rational(BigInt(num), BigInt(den));
}

/// Parses "num/den" or a bare integer. Decimal notation is rejected so that
/// parameters cross text boundaries without rounding.
inline Rational parse_rational(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  auto parse_int = [&](std::string_view s) {
    s = trim(s);
    std::string_view digits = s;
    if (!digits.empty() && (digits.front() == '-' || digits.front() == '+')) digits.remove_prefix(1);
    if (digits.empty()) throw ConstructionError("malformed rational '" + std::string(text) + "'");
    for (char c : digits) {
      if (c < '0' || c > '9')
        throw ConstructionError("malformed rational '" + std::string(text) +
                                "' (expected num/den, decimals are not accepted)");
    }
    return BigInt(std::string(s.front() == '+' ? s.substr(1) : s));
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  const BigInt num = parse_int(text.substr(0, slash));
  const BigInt den = parse_int(text.substr(slash + 1));
  if (den == 0) throw ConstructionError("rational with zero denominator: '" + std::string(text) + "'");
  return Rational(num, den);
}

/// Always "num/den", including integers ("1/1").
inline std::string to_string(const Rational& r) {
  return numerator_of(r).str() + "/" + denominator_of(r).str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double v) { return v; }

template <class To>
To scalar_cast(const Rational& r) {
  if constexpr (std::is_same_v<To, Rational>) {
    return r;
  } else {
    return static_cast<To>(to_double(r));
  }
}

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline Rational pow(const Rational& base, std::int64_t exponent) {
  if (exponent < 0) {
    if (base == 0) throw std::domain_error("zero raised to a negative power");
    return pow(Rational(1) / base, -exponent);
  }
  Rational result(1);
  Rational b = base;
  auto e = static_cast<std::uint64_t>(exponent);
  while (e != 0) {
    if (e & 1U) result *= b;
    e >>= 1U;
    if (e != 0) b *= b;
  }
  return result;
}

inline double log_of(const Rational& r) {
  // Split num/den so huge denominators do not underflow a double.
  const BigInt& n = numerator_of(r);
  const BigInt& d = denominator_of(r);
  auto log_big = [](const BigInt& v) {
    const auto bits = boost::multiprecision::msb(v);
    if (bits < 1000) return std::log(v.convert_to<double>());
    const auto shift = bits - 60;
    const BigInt top = v >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
  };
  if (n <= 0) throw std::domain_error("log of a non-positive rational");
  return log_big(n) - log_big(d);
}

}  // namespace bakerfr
