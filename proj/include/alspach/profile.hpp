#ifndef ALSPACH_PROFILE_HPP
#define ALSPACH_PROFILE_HPP

// Weight sequences restricted to arithmetic progressions of indices.
//
// A Profile describes u -> w(u) for u = 0, 1, ... (finitely or infinitely
// many terms) as a finite list of explicit head values followed by a
// periodic pattern of closed-form terms. Every symbolic query the
// classifier needs (infimum, supremum, power-sum convergence and value)
// reduces to closed forms on the individual terms.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "error.hpp"
#include "rational.hpp"
#include "weight_family.hpp"

namespace alspach {

/// (a + b v)^e, with a >= 1 and b >= 1.
struct PowerFactor {
  long a = 1;
  long b = 1;
  Rational e = 0;
};

/// g(v) = K * lambda^v * prod_k (a_k + b_k v)^{e_k}, v = 0, 1, 2, ...
struct GTerm {
  Real K = Real(Rational(1));
  Real lambda = Real(Rational(1));
  int lambda_cmp = 0;  ///< sign(lambda - 1), always exact
  std::vector<PowerFactor> factors;

  static GTerm constant(Real c) {
    GTerm t;
    t.K = std::move(c);
    return t;
  }

  Real at(long v) const {
    Real out = K * pow(lambda, Rational(v));
    for (const auto& f : factors) out = out * pow(Real(Rational(f.a + f.b * v)), f.e);
    return out;
  }

  double value(long v) const {
    double out = K.value * (lambda_cmp == 0 ? 1.0 : std::pow(lambda.value, static_cast<double>(v)));
    for (const auto& f : factors) out *= std::pow(static_cast<double>(f.a + f.b * v), to_double(f.e));
    return out;
  }

  Rational total_exponent() const {
    Rational e = 0;
    for (const auto& f : factors) e += f.e;
    return e;
  }

  /// Substitutes v = v0 + s w.
  GTerm reindex(long v0, long s) const {
    GTerm t;
    t.K = K * pow(lambda, Rational(v0));
    t.lambda = pow(lambda, Rational(s));
    t.lambda_cmp = lambda_cmp;
    for (const auto& f : factors) t.factors.push_back({f.a + f.b * v0, f.b * s, f.e});
    return t;
  }

  GTerm power(const Rational& q) const {
    GTerm t;
    t.K = pow(K, q);
    t.lambda = pow(lambda, q);
    t.lambda_cmp = lambda_cmp;
    for (const auto& f : factors) t.factors.push_back({f.a, f.b, f.e * q});
    return t;
  }

  GTerm scaled(const Real& s) const {
    GTerm t = *this;
    t.K = K * s;
    return t;
  }

  friend GTerm divide(const GTerm& num, const GTerm& den) {
    GTerm t;
    t.K = num.K / den.K;
    t.lambda = num.lambda / den.lambda;
    if (t.lambda.exact) {
      t.lambda_cmp = *t.lambda.exact < 1 ? -1 : (*t.lambda.exact > 1 ? 1 : 0);
    } else if (num.lambda_cmp == 0 && den.lambda_cmp == 0) {
      t.lambda_cmp = 0;
    } else {
      t.lambda_cmp = compare(num.lambda, den.lambda);
    }
    if (t.lambda_cmp == 0) t.lambda = Real(Rational(1));
    t.factors = num.factors;
    for (const auto& f : den.factors) t.factors.push_back({f.a, f.b, -f.e});
    return t;
  }

  /// Behaviour as v -> infinity.
  enum class Limit { Zero, Positive, Infinite };

  Limit limit_kind() const {
    if (lambda_cmp < 0) return Limit::Zero;
    if (lambda_cmp > 0) return Limit::Infinite;
    Rational e = total_exponent();
    if (e < 0) return Limit::Zero;
    if (e > 0) return Limit::Infinite;
    return Limit::Positive;
  }

  /// Limit value when finite.
  Real limit_value() const {
    switch (limit_kind()) {
      case Limit::Zero: return Real(Rational(0));
      case Limit::Infinite: return Real(std::numeric_limits<double>::infinity());
      case Limit::Positive: {
        Real out = K;
        for (const auto& f : factors) out = out * pow(Real(Rational(f.b)), f.e);
        return out;
      }
    }
    return Real(0.0);
  }

  /// Convergence of sum_{v >= 0} g(v).
  bool sum_converges() const {
    if (lambda_cmp < 0) return true;
    if (lambda_cmp > 0) return false;
    return total_exponent() < -1;
  }

  /// Candidate maximisers / minimisers of g on [0, n - 1]: the endpoints
  /// and the integer neighbours of the stationary points of log g.
  std::vector<long> critical_candidates(std::optional<long> n) const {
    std::vector<long> out{0};
    long last = n ? *n - 1 : std::numeric_limits<long>::max() / 4;
    if (n) out.push_back(last);
    double ln_lambda = lambda_cmp == 0 ? 0.0 : std::log(lambda.value);
    std::vector<double> roots;
    if (factors.size() == 1) {
      const auto& f = factors[0];
      if (ln_lambda != 0.0) roots.push_back((-to_double(f.e) * f.b / ln_lambda - f.a) / f.b);
    } else if (factors.size() == 2) {
      // ln(l) (a1 + b1 v)(a2 + b2 v) + e1 b1 (a2 + b2 v) + e2 b2 (a1 + b1 v) = 0
      double a1 = factors[0].a, b1 = factors[0].b, e1 = to_double(factors[0].e);
      double a2 = factors[1].a, b2 = factors[1].b, e2 = to_double(factors[1].e);
      double A = ln_lambda * b1 * b2;
      double B = ln_lambda * (a1 * b2 + a2 * b1) + e1 * b1 * b2 + e2 * b2 * b1;
      double C = ln_lambda * a1 * a2 + e1 * b1 * a2 + e2 * b2 * a1;
      if (A == 0.0) {
        if (B != 0.0) roots.push_back(-C / B);
      } else {
        double disc = B * B - 4 * A * C;
        if (disc >= 0) {
          double s = std::sqrt(disc);
          roots.push_back((-B + s) / (2 * A));
          roots.push_back((-B - s) / (2 * A));
        }
      }
    } else if (factors.size() > 2) {
      fail(ErrorCode::UnsupportedLayout, "closed-form extremum needs at most two power factors");
    }
    for (double r : roots) {
      if (!std::isfinite(r) || r < 0 || r > static_cast<double>(last)) continue;
      long fl = static_cast<long>(std::floor(r));
      out.push_back(fl);
      if (fl + 1 <= last) out.push_back(fl + 1);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

/// Sum of g(v) for v in [0, n) (n = nullopt: all v). Infinite when divergent.
inline Real gterm_sum(const GTerm& g, std::optional<long> n) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (!n && !g.sum_converges()) return Real(kInf);
  if (g.factors.empty()) {
    if (g.lambda_cmp == 0) return g.K * Real(Rational(*n));
    // K (1 - lambda^n) / (1 - lambda)
    Real one(Rational(1));
    Real denom = g.lambda.exact ? Real(Rational(1 - *g.lambda.exact)) : Real(1.0 - g.lambda.value);
    if (!n) return g.K / denom;
    Real pn = pow(g.lambda, Rational(*n));
    Real numer = pn.exact ? Real(Rational(1 - *pn.exact)) : Real(1.0 - pn.value);
    return g.K * numer / denom;
  }
  // Direct compensated summation of the head, then a closed-form or
  // quadrature tail.
  constexpr long kDirect = 20000;
  long stop = n ? std::min(*n, kDirect) : kDirect;
  double sum = 0.0, comp = 0.0;
  auto add = [&](double x) {
    double t = sum + x;
    comp += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  };
  for (long v = 0; v < stop; ++v) add(g.value(v));
  if (n && *n <= kDirect) return Real(sum + comp);
  if (g.lambda_cmp < 0) {
    // geometric decay dominates eventually
    long v = stop;
    long cap = n ? *n : std::numeric_limits<long>::max();
    for (long iter = 0; v < cap && iter < 50'000'000; ++v, ++iter) {
      double x = g.value(v);
      add(x);
      if (x < 1e-20 * std::fabs(sum) && iter > 1000) break;
    }
    return Real(sum + comp);
  }
  // lambda == 1: Euler-Maclaurin tail from N = stop to n (or infinity).
  double N = static_cast<double>(stop);
  auto f = [&](double v) {
    double out = g.K.value;
    for (const auto& fac : g.factors) out *= std::pow(fac.a + fac.b * v, to_double(fac.e));
    return out;
  };
  auto integral_to_inf = [&](double from) {
    if (g.factors.size() == 1) {
      const auto& fac = g.factors[0];
      double e = to_double(fac.e);
      return g.K.value * std::pow(fac.a + fac.b * from, e + 1.0) / (-(e + 1.0) * fac.b);
    }
    // v = from * exp(y): integrand f(v) v decays like exp((E + 1) y).
    double E = to_double(g.total_exponent());
    double Y = 45.0 / (-(E + 1.0));
    long steps = static_cast<long>(std::min(2e6, std::max(2000.0, Y / 0.005)));
    if (steps % 2) ++steps;
    double h = Y / steps, acc = 0.0;
    for (long k = 0; k <= steps; ++k) {
      double y = k * h, v = from * std::exp(y);
      double w = (k == 0 || k == steps) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      acc += w * f(v) * v;
    }
    return acc * h / 3.0;
  };
  double dh = 1e-3 * N;
  double fprime = (f(N + dh) - f(N - dh)) / (2 * dh);
  double tail;
  if (!n) {
    tail = integral_to_inf(N) + f(N) / 2 - fprime / 12;
  } else {
    double M = static_cast<double>(*n - 1);
    double fpm = (f(M + 1e-3 * M) - f(M - 1e-3 * M)) / (2e-3 * M);
    double integ;
    if (g.factors.size() == 1 || g.sum_converges()) {
      integ = integral_to_inf(N) - integral_to_inf(M);
    } else {
      // divergent at infinity but finite range: Simpson on [N, M] in log scale
      long steps = 200000;
      double Y = std::log(M / N), h = Y / steps, acc = 0.0;
      for (long k = 0; k <= steps; ++k) {
        double v = N * std::exp(k * h);
        double w = (k == 0 || k == steps) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        acc += w * f(v) * v;
      }
      integ = acc * h / 3.0;
    }
    tail = integ + (f(N) + f(M)) / 2 - (fprime - fpm) / 12;
  }
  return Real(sum + comp + tail);
}

struct ExtremeResult {
  Real value;
  bool attained = true;
};

/// Supremum (or infimum) of g on [0, n).
inline ExtremeResult gterm_extreme(const GTerm& g, std::optional<long> n, bool want_max) {
  std::optional<long> best;
  double best_val = 0.0;
  for (long v : g.critical_candidates(n)) {
    double val = g.value(v);
    if (!best || (want_max ? val > best_val : val < best_val)) {
      best = v;
      best_val = val;
    }
  }
  Real at_best = g.at(*best);
  if (n) return {at_best, true};
  Real lim = g.limit_value();
  int cmp = compare(at_best, lim);
  if (want_max ? cmp >= 0 : cmp <= 0) return {at_best, true};
  return {lim, false};
}

class Profile {
 public:
  std::vector<Real> head;
  std::vector<GTerm> tails;  ///< residue r covers u = head.size() + r + period * v
  std::optional<long> length;

  long period() const { return static_cast<long>(tails.size()); }
  long head_size() const { return static_cast<long>(head.size()); }
  bool infinite() const { return !length.has_value(); }

  static Profile constant(Real c, std::optional<long> len) {
    Profile p;
    p.tails.push_back(GTerm::constant(std::move(c)));
    p.length = len;
    return p;
  }

  static Profile from_values(std::vector<Real> values) {
    Profile p;
    p.length = static_cast<long>(values.size());
    p.head = std::move(values);
    return p;
  }

  /// Number of v values in tail residue r (nullopt when infinite).
  std::optional<long> tail_count(long r) const {
    if (!length) return std::nullopt;
    long start = head_size() + r;
    if (*length <= start) return 0;
    return (*length - start + period() - 1) / period();
  }

  Real at(long u) const {
    require(u >= 0 && (!length || u < *length), ErrorCode::InvalidArgument, "profile index out of range");
    if (u < head_size()) return head[u];
    long k = u - head_size();
    return tails[k % period()].at(k / period());
  }

  double value(long u) const {
    if (u < head_size()) return head[u].value;
    long k = u - head_size();
    return tails[k % period()].value(k / period());
  }

  /// Same sequence, re-expressed with a longer head and/or a multiple of the period.
  Profile refined(long new_head, long new_period) const {
    require(new_head >= head_size(), ErrorCode::InvalidArgument, "refined head must not shrink");
    Profile out;
    out.length = length;
    out.head = head;
    long H = head_size(), m = period();
    long limit = length ? std::min(new_head, *length) : new_head;
    for (long u = H; u < limit; ++u) out.head.push_back(at(u));
    if (tails.empty()) {
      require(!length || *length <= new_head || *length <= H, ErrorCode::InvalidArgument, "profile without tails");
      return out;
    }
    require(new_period % m == 0, ErrorCode::InvalidArgument, "period must be a multiple");
    if (length && *length <= new_head) return out;
    long s = new_period / m;
    for (long r = 0; r < new_period; ++r) {
      long off = new_head - H + r;
      out.tails.push_back(tails[off % m].reindex(off / m, s));
    }
    return out;
  }

  /// Fully expanded values (finite profiles only).
  std::vector<Real> expand() const {
    require(length.has_value(), ErrorCode::InvalidArgument, "cannot expand an infinite profile");
    std::vector<Real> out;
    out.reserve(static_cast<std::size_t>(*length));
    for (long u = 0; u < *length; ++u) out.push_back(at(u));
    return out;
  }

  Profile scaled(const Real& s) const {
    Profile out = *this;
    for (auto& h : out.head) h = h * s;
    for (auto& t : out.tails) t = t.scaled(s);
    return out;
  }

  Profile power(const Rational& q) const {
    Profile out = *this;
    for (auto& h : out.head) h = pow(h, q);
    for (auto& t : out.tails) t = t.power(q);
    return out;
  }

  Profile prefixed(std::vector<Real> values) const {
    Profile out = *this;
    values.insert(values.end(), head.begin(), head.end());
    out.head = std::move(values);
    if (out.length) *out.length += static_cast<long>(out.head.size() - head.size());
    return out;
  }
};

inline constexpr long kExpandLimit = 1 << 16;

namespace detail {

inline bool small_finite(const Profile& p) { return p.length && *p.length <= kExpandLimit; }

inline std::pair<Profile, Profile> align(const Profile& a, const Profile& b) {
  long H = std::max(a.head_size(), b.head_size());
  long m = std::lcm(std::max(1L, a.period()), std::max(1L, b.period()));
  return {a.refined(H, a.tails.empty() ? 1 : m), b.refined(H, b.tails.empty() ? 1 : m)};
}

}  // namespace detail

/// Pointwise num / den over a common index range.
inline Profile ratio(const Profile& num, const Profile& den) {
  require(num.length == den.length, ErrorCode::InvalidArgument, "ratio of profiles of different lengths");
  if (detail::small_finite(num)) {
    auto a = num.expand(), b = den.expand();
    std::vector<Real> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a[i] / b[i]);
    return Profile::from_values(std::move(out));
  }
  auto [a, b] = detail::align(num, den);
  Profile out;
  out.length = num.length;
  for (std::size_t i = 0; i < a.head.size(); ++i) out.head.push_back(a.head[i] / b.head[i]);
  for (std::size_t r = 0; r < a.tails.size(); ++r) out.tails.push_back(divide(a.tails[r], b.tails[r]));
  return out;
}

/// Interleaves two profiles: u = 2w from `even_u`, u = 2w + 1 from `odd_u`.
inline Profile merge_alternating(const Profile& even_u, const Profile& odd_u) {
  Profile out;
  if (even_u.length) out.length = *even_u.length + *odd_u.length;
  if (out.length && *out.length <= kExpandLimit) {
    std::vector<Real> vals;
    for (long u = 0; u < *out.length; ++u) vals.push_back(u % 2 == 0 ? even_u.at(u / 2) : odd_u.at(u / 2));
    return Profile::from_values(std::move(vals));
  }
  auto [a, b] = detail::align(even_u, odd_u);
  long H = a.head_size();
  for (long w = 0; w < H; ++w) {
    out.head.push_back(a.head[w]);
    out.head.push_back(b.head[w]);
  }
  long m = a.period();
  for (long r = 0; r < 2 * m; ++r) out.tails.push_back(r % 2 == 0 ? a.tails[r / 2] : b.tails[r / 2]);
  return out;
}

/// The family evaluated at offsets t = start + step * u, u = 0 .. len - 1.
inline Profile restrict_family(const WeightFamily& f, long start, long step, std::optional<long> len) {
  require(start >= 1 && step >= 1, ErrorCode::InvalidArgument, "affine offsets must start at >= 1 with step >= 1");
  Profile p;
  p.length = len;
  switch (f.kind()) {
    case WeightKind::Constant:
      p.tails.push_back(GTerm::constant(Real(f.scale())));
      return p;
    case WeightKind::Geometric: {
      GTerm t;
      t.K = Real(f.scale()) * pow(Real(f.ratio()), Rational(start));
      t.lambda = pow(Real(f.ratio()), Rational(step));
      t.lambda_cmp = -1;
      p.tails.push_back(t);
      return p;
    }
    case WeightKind::Power: {
      GTerm t;
      t.K = Real(f.scale());
      t.factors.push_back({start, step, -f.exponent()});
      p.tails.push_back(t);
      return p;
    }
    case WeightKind::Explicit: {
      long k = static_cast<long>(f.values().size());
      long h = start <= k ? (k - start) / step + 1 : 0;
      if (len) h = std::min(h, *len);
      std::vector<Real> head;
      for (long u = 0; u < h; ++u) head.push_back(Real(f.values()[start + step * u - 1]));
      std::optional<long> rest_len = len ? std::optional<long>(*len - h) : std::nullopt;
      if (rest_len && *rest_len == 0) return Profile::from_values(std::move(head));
      return restrict_family(f.tail(), start + step * h - k, step, rest_len).prefixed(std::move(head));
    }
    case WeightKind::Interleave: {
      auto sub = [&](long t0, long st, std::optional<long> n) {
        // every index t0 + st * v has the parity of t0 (st even)
        if (t0 % 2 == 1) return restrict_family(f.odd(), (t0 + 1) / 2, st / 2, n);
        return restrict_family(f.even(), t0 / 2, st / 2, n);
      };
      if (step % 2 == 0) return sub(start, step, len);
      std::optional<long> n0, n1;
      if (len) {
        n0 = (*len + 1) / 2;
        n1 = *len / 2;
      }
      Profile evens = sub(start, 2 * step, n0);
      Profile odds = (n1 && *n1 == 0) ? Profile::from_values({}) : sub(start + step, 2 * step, n1);
      return merge_alternating(evens, odds);
    }
  }
  return p;
}

inline Profile restrict_family(const WeightFamily& f, std::optional<long> len) { return restrict_family(f, 1, 1, len); }

/// Supremum / infimum of a profile.
inline ExtremeResult profile_extreme(const Profile& p, bool want_max) {
  std::optional<ExtremeResult> best;
  auto consider = [&](const ExtremeResult& e) {
    if (!best) {
      best = e;
      return;
    }
    int cmp = compare(e.value, best->value);
    if (want_max ? cmp > 0 : cmp < 0) {
      best = e;
    } else if (cmp == 0 && e.attained) {
      best->attained = true;
    }
  };
  for (const auto& h : p.head) consider({h, true});
  for (long r = 0; r < p.period(); ++r) {
    auto n = p.tail_count(r);
    if (n && *n == 0) continue;
    consider(gterm_extreme(p.tails[r], n, want_max));
  }
  require(best.has_value(), ErrorCode::InvalidArgument, "extremum of an empty profile");
  return *best;
}

inline ExtremeResult profile_sup(const Profile& p) { return profile_extreme(p, true); }
inline ExtremeResult profile_inf(const Profile& p) { return profile_extreme(p, false); }

struct PowerSum {
  bool finite = true;
  Real value;
};

/// sum_u w(u)^q.
inline PowerSum profile_power_sum(const Profile& p, const Rational& q) {
  Real total(Rational(0));
  for (const auto& h : p.head) total = total + pow(h, q);
  for (long r = 0; r < p.period(); ++r) {
    auto n = p.tail_count(r);
    if (n && *n == 0) continue;
    GTerm g = p.tails[r].power(q);
    if (!n && !g.sum_converges()) return {false, Real(std::numeric_limits<double>::infinity())};
    total = total + gterm_sum(g, n);
  }
  return {true, total};
}

/// Partial sums of w(u)^q for the first n_k terms, one per requested count.
inline std::vector<double> profile_partial_power_sums(const Profile& p, const Rational& q, const std::vector<long>& counts) {
  std::vector<double> out;
  double qd = to_double(q);
  for (long n : counts) {
    long lim = p.length ? std::min(n, *p.length) : n;
    double s = 0.0, c = 0.0;
    for (long u = 0; u < lim; ++u) {
      double x = std::pow(p.value(u), qd);
      double t = s + x;
      c += std::fabs(s) >= std::fabs(x) ? (s - t) + x : (x - t) + s;
      s = t;
    }
    out.push_back(s + c);
  }
  return out;
}

}  // namespace alspach

#endif  // ALSPACH_PROFILE_HPP
