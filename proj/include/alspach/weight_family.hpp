#ifndef ALSPACH_WEIGHT_FAMILY_HPP
#define ALSPACH_WEIGHT_FAMILY_HPP

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "rational.hpp"

namespace alspach {

enum class WeightKind { Constant, Geometric, Power, Explicit, Interleave };

inline const char* to_string(WeightKind k) {
  switch (k) {
    case WeightKind::Constant: return "constant";
    case WeightKind::Geometric: return "geometric";
    case WeightKind::Power: return "power";
    case WeightKind::Explicit: return "explicit";
    case WeightKind::Interleave: return "interleave";
  }
  return "?";
}

/// Symbolic weight sequence w_1, w_2, ... with values in (0, 1].
///
///   constant    w_t = c
///   geometric   w_t = c * r^t            (0 < r < 1)
///   power       w_t = c * t^(-alpha)     (alpha > 0)
///   explicit    w_1..w_k listed, then w_t = tail(t - k)
///   interleave  w_t = odd((t + 1) / 2) for odd t, even(t / 2) for even t
///
/// Instances are immutable; sub-families are shared.
class WeightFamily {
 public:
  static WeightFamily constant(Rational c) {
    check_unit(c, "constant c");
    WeightFamily f(WeightKind::Constant);
    f.c_ = std::move(c);
    return f;
  }

  static WeightFamily geometric(Rational c, Rational r) {
    check_unit(c, "geometric c");
    require(r > 0 && r < 1, ErrorCode::InvalidArgument, "geometric ratio must lie in (0,1), got " + to_string(r));
    WeightFamily f(WeightKind::Geometric);
    f.c_ = std::move(c);
    f.r_ = std::move(r);
    return f;
  }

  static WeightFamily power(Rational c, Rational alpha) {
    check_unit(c, "power c");
    require(alpha > 0, ErrorCode::InvalidArgument, "power exponent must be > 0, got " + to_string(alpha));
    WeightFamily f(WeightKind::Power);
    f.c_ = std::move(c);
    f.alpha_ = std::move(alpha);
    return f;
  }

  static WeightFamily explicit_then(std::vector<Rational> values, WeightFamily tail) {
    require(!values.empty(), ErrorCode::InvalidArgument, "explicit weight list is empty");
    for (const auto& v : values) check_unit(v, "explicit weight");
    WeightFamily f(WeightKind::Explicit);
    f.values_ = std::move(values);
    f.first_ = std::make_shared<const WeightFamily>(std::move(tail));
    return f;
  }

  static WeightFamily interleave(WeightFamily odd, WeightFamily even) {
    WeightFamily f(WeightKind::Interleave);
    f.first_ = std::make_shared<const WeightFamily>(std::move(odd));
    f.second_ = std::make_shared<const WeightFamily>(std::move(even));
    return f;
  }

  WeightKind kind() const { return kind_; }
  const Rational& scale() const { return c_; }
  const Rational& ratio() const { return r_; }
  const Rational& exponent() const { return alpha_; }
  const std::vector<Rational>& values() const { return values_; }
  const WeightFamily& tail() const { return *first_; }
  const WeightFamily& odd() const { return *first_; }
  const WeightFamily& even() const { return *second_; }

  friend bool operator==(const WeightFamily& a, const WeightFamily& b) {
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
      case WeightKind::Constant: return a.c_ == b.c_;
      case WeightKind::Geometric: return a.c_ == b.c_ && a.r_ == b.r_;
      case WeightKind::Power: return a.c_ == b.c_ && a.alpha_ == b.alpha_;
      case WeightKind::Explicit: return a.values_ == b.values_ && *a.first_ == *b.first_;
      case WeightKind::Interleave: return *a.first_ == *b.first_ && *a.second_ == *b.second_;
    }
    return false;
  }

  std::string describe() const {
    switch (kind_) {
      case WeightKind::Constant: return "constant(" + to_string(c_) + ")";
      case WeightKind::Geometric: return "geometric(c=" + to_string(c_) + ", r=" + to_string(r_) + ")";
      case WeightKind::Power: return "power(c=" + to_string(c_) + ", alpha=" + to_string(alpha_) + ")";
      case WeightKind::Explicit: {
        std::string s = "explicit[";
        for (std::size_t i = 0; i < values_.size(); ++i) s += (i ? ", " : "") + to_string(values_[i]);
        return s + "] then " + first_->describe();
      }
      case WeightKind::Interleave: return "interleave(odd=" + first_->describe() + ", even=" + second_->describe() + ")";
    }
    return "?";
  }

 private:
  explicit WeightFamily(WeightKind k) : kind_(k) {}

  static void check_unit(const Rational& v, const char* what) {
    require(v > 0 && v <= 1, ErrorCode::InvalidArgument,
            std::string(what) + " must lie in (0,1], got " + to_string(v));
  }

  WeightKind kind_;
  Rational c_ = 1, r_ = 0, alpha_ = 0;
  std::vector<Rational> values_;
  std::shared_ptr<const WeightFamily> first_, second_;
};

/// Exact closed-form value at index j >= 1 (exact whenever the value is rational).
inline Real weight_at(const WeightFamily& f, long j) {
  require(j >= 1, ErrorCode::InvalidArgument, "weight index must be >= 1");
  switch (f.kind()) {
    case WeightKind::Constant: return Real(f.scale());
    case WeightKind::Geometric: return Real(f.scale()) * pow(Real(f.ratio()), Rational(j));
    case WeightKind::Power: return Real(f.scale()) * pow(Real(Rational(j)), -f.exponent());
    case WeightKind::Explicit: {
      long k = static_cast<long>(f.values().size());
      if (j <= k) return Real(f.values()[j - 1]);
      return weight_at(f.tail(), j - k);
    }
    case WeightKind::Interleave:
      return j % 2 == 1 ? weight_at(f.odd(), (j + 1) / 2) : weight_at(f.even(), j / 2);
  }
  return Real(0.0);
}

/// Fast double evaluation used on hot paths.
inline double weight_value(const WeightFamily& f, long j) {
  switch (f.kind()) {
    case WeightKind::Constant: return to_double(f.scale());
    case WeightKind::Geometric: return to_double(f.scale()) * std::pow(to_double(f.ratio()), static_cast<double>(j));
    case WeightKind::Power: return to_double(f.scale()) * std::pow(static_cast<double>(j), -to_double(f.exponent()));
    case WeightKind::Explicit: {
      long k = static_cast<long>(f.values().size());
      if (j <= k) return to_double(f.values()[j - 1]);
      return weight_value(f.tail(), j - k);
    }
    case WeightKind::Interleave:
      return j % 2 == 1 ? weight_value(f.odd(), (j + 1) / 2) : weight_value(f.even(), j / 2);
  }
  return 0.0;
}

struct Extremum {
  Real value;
  bool attained = true;  ///< false when the bound is only a limit
};

/// Infimum over the whole (infinite) index domain.
inline Extremum weight_infimum(const WeightFamily& f) {
  switch (f.kind()) {
    case WeightKind::Constant: return {Real(f.scale()), true};
    case WeightKind::Geometric:
    case WeightKind::Power: return {Real(Rational(0)), false};
    case WeightKind::Explicit: {
      Extremum tail = weight_infimum(f.tail());
      Rational lo = *std::min_element(f.values().begin(), f.values().end());
      if (compare(Real(lo), tail.value) <= 0) return {Real(lo), true};
      return tail;
    }
    case WeightKind::Interleave: {
      Extremum a = weight_infimum(f.odd()), b = weight_infimum(f.even());
      int cmp = compare(a.value, b.value);
      if (cmp < 0) return a;
      if (cmp > 0) return b;
      return {a.value, a.attained || b.attained};
    }
  }
  return {};
}

/// Supremum over the whole index domain (always attained for supported kinds).
inline Extremum weight_supremum(const WeightFamily& f) {
  switch (f.kind()) {
    case WeightKind::Constant: return {Real(f.scale()), true};
    case WeightKind::Geometric: return {Real(f.scale() * f.ratio()), true};
    case WeightKind::Power: return {Real(f.scale()), true};
    case WeightKind::Explicit: {
      Extremum tail = weight_supremum(f.tail());
      Rational hi = *std::max_element(f.values().begin(), f.values().end());
      return compare(Real(hi), tail.value) >= 0 ? Extremum{Real(hi), true} : tail;
    }
    case WeightKind::Interleave: {
      Extremum a = weight_supremum(f.odd()), b = weight_supremum(f.even());
      return compare(a.value, b.value) >= 0 ? a : b;
    }
  }
  return {};
}

/// lim_{j -> inf} w_j when it exists.
inline std::optional<Rational> weight_limit(const WeightFamily& f) {
  switch (f.kind()) {
    case WeightKind::Constant: return f.scale();
    case WeightKind::Geometric:
    case WeightKind::Power: return Rational(0);
    case WeightKind::Explicit: return weight_limit(f.tail());
    case WeightKind::Interleave: {
      auto a = weight_limit(f.odd()), b = weight_limit(f.even());
      if (a && b && *a == *b) return a;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

enum class SumKind { FiniteValue, Divergent, FiniteSupport };

inline const char* to_string(SumKind k) {
  switch (k) {
    case SumKind::FiniteValue: return "finite-value";
    case SumKind::Divergent: return "divergent";
    case SumKind::FiniteSupport: return "finite-support";
  }
  return "?";
}

struct TailSum {
  bool converges = true;
  SumKind kind = SumKind::FiniteSupport;
};

inline TailSum combine(TailSum a, TailSum b) {
  if (a.kind == SumKind::Divergent || b.kind == SumKind::Divergent) return {false, SumKind::Divergent};
  if (a.kind == SumKind::FiniteValue || b.kind == SumKind::FiniteValue) return {true, SumKind::FiniteValue};
  return {true, SumKind::FiniteSupport};
}

/// Decides convergence of sum over {j : w_j < eps} of w_j^q on an infinite domain.
inline TailSum tail_power_sum_converges(const WeightFamily& f, const Rational& q, const Rational& eps) {
  require(q > 0, ErrorCode::InvalidArgument, "power-sum exponent q must be > 0");
  require(eps > 0 && eps <= 1, ErrorCode::InvalidArgument, "threshold must lie in (0,1]");
  switch (f.kind()) {
    case WeightKind::Constant:
      if (f.scale() >= eps) return {true, SumKind::FiniteSupport};
      return {false, SumKind::Divergent};
    case WeightKind::Geometric: return {true, SumKind::FiniteValue};
    case WeightKind::Power:
      if (f.exponent() * q > 1) return {true, SumKind::FiniteValue};
      return {false, SumKind::Divergent};
    case WeightKind::Explicit: return tail_power_sum_converges(f.tail(), q, eps);
    case WeightKind::Interleave:
      return combine(tail_power_sum_converges(f.odd(), q, eps), tail_power_sum_converges(f.even(), q, eps));
  }
  return {};
}

}  // namespace alspach

#endif  // ALSPACH_WEIGHT_FAMILY_HPP
