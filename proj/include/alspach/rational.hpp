#ifndef ALSPACH_RATIONAL_HPP
#define ALSPACH_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "error.hpp"

namespace alspach {

using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;
using Rational =
    boost::multiprecision::number<boost::multiprecision::cpp_rational_backend, boost::multiprecision::et_off>;

/// Largest exponent for which powers are kept exact; beyond it only the
/// double approximation is carried.
inline constexpr long kMaxExactExponent = 4096;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline bool is_integer(const Rational& r) { return denominator(r) == 1; }

inline std::string to_string(const Rational& r) {
  if (is_integer(r)) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

/// Parses "7", "-3/4", "0.25", "2.5e-1". Decimal forms are converted exactly.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&] { fail(ErrorCode::Parse, "not a rational number: '" + s + "'"); };
  if (s.empty()) bad();
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (!is_integer(num) || !is_integer(den) || den == 0) bad();
    return num / den;
  }
  std::size_t pos = 0;
  bool negative = false;
  if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
  BigInt mantissa = 0;
  long scale = 0;
  bool any_digit = false, seen_dot = false;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      any_digit = true;
      if (seen_dot) --scale;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else {
      break;
    }
  }
  if (!any_digit) bad();
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') bad();
    ++pos;
    std::size_t used = 0;
    long exp10 = 0;
    try {
      exp10 = std::stol(s.substr(pos), &used);
    } catch (...) {
      bad();
    }
    if (used != s.size() - pos) bad();
    scale += exp10;
  }
  if (std::labs(scale) > 400) bad();
  Rational value(mantissa);
  for (long i = 0; i < std::labs(scale); ++i) value = scale > 0 ? value * 10 : value / 10;
  return negative ? Rational(-value) : value;
}

/// Exact rational from the shortest decimal representation of a double.
inline Rational rational_from_double(double v) {
  require(std::isfinite(v), ErrorCode::Parse, "non-finite number");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest round-tripping form so 4.5 stays 9/2.
  for (int prec = 1; prec <= 17; ++prec) {
    char tmp[64];
    std::snprintf(tmp, sizeof tmp, "%.*g", prec, v);
    if (std::strtod(tmp, nullptr) == v) return parse_rational(tmp);
  }
  return parse_rational(buf);
}

inline Rational pow_int(const Rational& base, long exponent) {
  if (exponent < 0) return 1 / pow_int(base, -exponent);
  Rational result = 1, b = base;
  unsigned long e = static_cast<unsigned long>(exponent);
  while (e) {
    if (e & 1u) result *= b;
    b *= b;
    e >>= 1u;
  }
  return result;
}

inline long to_long(const Rational& r) {
  require(is_integer(r), ErrorCode::InvalidArgument, "expected an integer, got " + to_string(r));
  return numerator(r).convert_to<long>();
}

/// A real number carried as a double, plus its exact rational value when known.
struct Real {
  double value = 0.0;
  std::optional<Rational> exact;

  Real() = default;
  Real(double v) : value(v) {}
  Real(const Rational& r) : value(to_double(r)), exact(r) {}
  Real(double v, std::optional<Rational> e) : value(v), exact(std::move(e)) {}

  bool is_exact() const { return exact.has_value(); }
};

inline Real operator*(const Real& a, const Real& b) {
  if (a.exact && b.exact) return Real(*a.exact * *b.exact);
  return Real(a.value * b.value);
}

inline Real operator/(const Real& a, const Real& b) {
  if (a.exact && b.exact) return Real(*a.exact / *b.exact);
  return Real(a.value / b.value);
}

inline Real operator+(const Real& a, const Real& b) {
  if (a.exact && b.exact) return Real(*a.exact + *b.exact);
  return Real(a.value + b.value);
}

/// base^exponent; exact when base is exact and exponent is a small integer.
inline Real pow(const Real& base, const Rational& exponent) {
  if (base.exact && is_integer(exponent)) {
    long e = to_long(exponent);
    if (std::labs(e) <= kMaxExactExponent && (*base.exact != 0 || e >= 0)) {
      return Real(pow_int(*base.exact, e));
    }
  }
  return Real(std::pow(base.value, to_double(exponent)));
}

/// Three-way comparison, exact when both sides are exact.
inline int compare(const Real& a, const Real& b) {
  if (a.exact && b.exact) return *a.exact < *b.exact ? -1 : (*a.exact > *b.exact ? 1 : 0);
  double scale = std::max({1.0, std::fabs(a.value), std::fabs(b.value)});
  if (std::fabs(a.value - b.value) <= 4e-15 * scale) return 0;
  return a.value < b.value ? -1 : 1;
}

inline std::string to_string(const Real& r) {
  if (r.exact) return to_string(*r.exact);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", r.value);
  return buf;
}

/// Round-tripping decimal text for a double (shortest form).
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  for (int prec = 1; prec <= 17; ++prec) {
    char tmp[64];
    std::snprintf(tmp, sizeof tmp, "%.*g", prec, v);
    if (std::strtod(tmp, nullptr) == v) return tmp;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace alspach

#endif  // ALSPACH_RATIONAL_HPP
