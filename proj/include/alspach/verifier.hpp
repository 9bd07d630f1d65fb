#ifndef ALSPACH_VERIFIER_HPP
#define ALSPACH_VERIFIER_HPP

// Seeded numerical certification of the norm inequalities.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "norm.hpp"
#include "rational.hpp"
#include "space.hpp"

namespace alspach {

enum class Distribution { Gaussian, Sparse, Signs };

inline const char* to_string(Distribution d) {
  switch (d) {
    case Distribution::Gaussian: return "gaussian";
    case Distribution::Sparse: return "sparse";
    case Distribution::Signs: return "signs";
  }
  return "?";
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Sub-seed for batch `index` of a run seeded with `seed`.
inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index) { return splitmix64(seed ^ splitmix64(index)); }

/// Portable sampling on top of mt19937_64 (the std distributions are not
/// specified bit-for-bit across standard libraries).
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

  double gaussian() {
    if (spare_) {
      double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    spare_ = r * std::sin(kTwoPi * u2);
    return r * std::cos(kTwoPi * u2);
  }

 private:
  std::mt19937_64 gen_;
  std::optional<double> spare_;
};

inline constexpr std::size_t kBatchSize = 64;

/// `count` dense vectors of length `dim`, deterministic in (dim, seed, distribution).
inline std::vector<std::vector<double>> sample_dense(std::size_t dim, std::size_t count, std::uint64_t seed,
                                                     Distribution dist) {
  require(dim >= 1 && count >= 1, ErrorCode::InvalidArgument, "dim and count must be positive");
  std::vector<std::vector<double>> out;
  out.reserve(count);
  for (std::size_t batch = 0; batch * kBatchSize < count; ++batch) {
    Sampler s(sub_seed(seed, batch));
    for (std::size_t k = batch * kBatchSize; k < std::min(count, (batch + 1) * kBatchSize); ++k) {
      std::vector<double> x(dim, 0.0);
      switch (dist) {
        case Distribution::Gaussian:
          for (auto& v : x) v = s.gaussian();
          break;
        case Distribution::Signs:
          for (auto& v : x) v = s.below(2) ? 1.0 : -1.0;
          break;
        case Distribution::Sparse: {
          std::size_t support = 1 + s.below(dim);
          std::vector<std::size_t> idx(dim);
          for (std::size_t i = 0; i < dim; ++i) idx[i] = i;
          for (std::size_t i = 0; i < support; ++i) {
            std::size_t j = i + s.below(dim - i);
            std::swap(idx[i], idx[j]);
            x[idx[i]] = s.gaussian();
          }
          break;
        }
      }
      out.push_back(std::move(x));
    }
  }
  return out;
}

/// Sampled vectors addressed through the trivial pair (block = position).
inline std::vector<SparseVector> sample_vectors(std::size_t dim, std::size_t count, std::uint64_t seed,
                                                Distribution dist) {
  std::vector<SparseVector> out;
  for (const auto& x : sample_dense(dim, count, seed, dist)) {
    SparseVector v(0);
    for (std::size_t i = 0; i < x.size(); ++i) v.set(static_cast<long>(i) + 1, 1, x[i]);
    out.push_back(std::move(v));
  }
  return out;
}

/// FNV-1a over the canonical description of a spec.
inline std::uint64_t spec_digest(const SpaceSpec& spec) {
  std::string text = "p=" + to_string(spec.p());
  for (const auto& pr : spec.pairs()) text += ";" + pr.describe();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

enum class CheckKind { Holder, RefinementChain, DeltaSandwich, CoarseSandwich, LowerLp, L2Domination };

inline const char* to_string(CheckKind k) {
  switch (k) {
    case CheckKind::Holder: return "holder";
    case CheckKind::RefinementChain: return "refinement_chain";
    case CheckKind::DeltaSandwich: return "delta_sandwich";
    case CheckKind::CoarseSandwich: return "coarse_sandwich";
    case CheckKind::LowerLp: return "lower_lp";
    case CheckKind::L2Domination: return "l2_domination";
  }
  return "?";
}

inline CheckKind parse_check_kind(const std::string& s) {
  for (CheckKind k : {CheckKind::Holder, CheckKind::RefinementChain, CheckKind::DeltaSandwich, CheckKind::CoarseSandwich,
                      CheckKind::LowerLp, CheckKind::L2Domination}) {
    if (s == to_string(k)) return k;
  }
  fail(ErrorCode::Parse, "unknown check '" + s + "'");
}

struct VerificationReport {
  std::string check;
  std::uint64_t spec_digest = 0;
  std::vector<std::size_t> dims;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  std::vector<std::pair<std::string, double>> constants;  ///< constants the check used
  double worst_slack = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  std::size_t violations = 0;
  std::vector<double> witness;
  double witness_lhs = 0.0, witness_rhs = 0.0;
  double wall_ms = 0.0;
};

namespace detail {

/// One inequality LHS(x) <= RHS(x) on dense vectors of a given dimension.
struct Inequality {
  std::function<double(std::span<const double>)> lhs, rhs;
};

inline double slack(double lhs, double rhs) { return (rhs - lhs) / std::max(1.0, std::fabs(rhs)); }

inline std::optional<std::size_t> first_indiscrete(const SpaceSpec& spec, bool need_positive_inf) {
  for (std::size_t k : spec.nontrivial()) {
    const auto& pr = spec.pair(k);
    if (!pr.partition().is_indiscrete()) continue;
    if (need_positive_inf && compare(weights_infimum(pr), Real(Rational(0))) <= 0) continue;
    return k;
  }
  return std::nullopt;
}

}  // namespace detail

/// Evaluates both sides of the named inequality on every sample and every
/// basis vector of each dimension.
inline VerificationReport check_inequality(CheckKind kind, const SpaceSpec& spec, const std::vector<std::size_t>& dims,
                                           std::size_t samples, std::uint64_t seed, double tol) {
  auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep;
  rep.check = to_string(kind);
  rep.spec_digest = spec_digest(spec);
  rep.dims = dims;
  rep.samples = samples;
  rep.seed = seed;
  rep.tolerance = tol;
  const double p = spec.p_value();

  // symbolic hypothesis checks and constants, independent of the dimension
  std::optional<std::size_t> pair_a, pair_b;
  double lower = 0.0;
  switch (kind) {
    case CheckKind::LowerLp: break;
    case CheckKind::L2Domination:
    case CheckKind::Holder:
      pair_a = detail::first_indiscrete(spec, false);
      if (!pair_a) fail(ErrorCode::HypothesisNotMet, "spec has no indiscrete pair");
      break;
    case CheckKind::DeltaSandwich:
      pair_a = detail::first_indiscrete(spec, true);
      if (!pair_a) fail(ErrorCode::HypothesisNotMet, "no indiscrete pair with inf weight > 0");
      lower = weights_infimum(spec.pair(*pair_a)).value;
      rep.constants.emplace_back("delta", lower);
      break;
    case CheckKind::CoarseSandwich: {
      for (std::size_t k : spec.nontrivial()) {
        const auto& pr = spec.pair(k);
        Cardinal n = pr.partition().block_count();
        Real d = weights_infimum(pr);
        if (!n || compare(d, Real(Rational(0))) <= 0) continue;
        Rational expo = Rational(1) / spec.p() - Rational(1, 2);
        double c = (d * pow(Real(Rational(*n)), expo)).value;
        if (c > lower) {
          lower = c;
          pair_a = k;
        }
      }
      if (!pair_a) fail(ErrorCode::HypothesisNotMet, "no pair with finitely many blocks and inf weight > 0");
      rep.constants.emplace_back("lower", lower);
      break;
    }
    case CheckKind::RefinementChain: {
      for (std::size_t f : spec.nontrivial()) {
        for (std::size_t c : spec.nontrivial()) {
          if (f == c || pair_a) continue;
          try {
            RefinementMajorant m = refinement_majorant(spec.pair(f), spec.pair(c), spec.p());
            if (m.finite) {
              pair_a = f;
              pair_b = c;
              lower = m.constant.value;
            }
          } catch (const Error&) {
          }
        }
      }
      if (!pair_a) fail(ErrorCode::HypothesisNotMet, "no refining pair with a finite refinement majorant");
      rep.constants.emplace_back("C", lower);
      break;
    }
  }

  for (std::size_t n : dims) {
    DenseEvaluator ev(spec, n);
    std::vector<detail::Inequality> ineqs;
    switch (kind) {
      case CheckKind::LowerLp:
        ineqs.push_back({[p](auto x) { return lp_norm(x, p); }, [&ev](auto x) { return ev.norm(x); }});
        break;
      case CheckKind::L2Domination:
        ineqs.push_back({[&ev, k = *pair_a](auto x) { return ev.pair_value(k, x); }, [](auto x) { return l2_norm(x); }});
        break;
      case CheckKind::Holder: {
        const auto& w = ev.weights(*pair_a);
        double q = to_double(spec.q());
        CompensatedSum s;
        for (double v : w) s.add(std::pow(v, q));
        double c = std::pow(s.value(), 1.0 / q);
        rep.constants.emplace_back("C_" + std::to_string(n), c);
        ineqs.push_back({[&w](auto x) {
                           CompensatedSum a;
                           for (std::size_t i = 0; i < x.size(); ++i) a.add(x[i] * x[i] * w[i] * w[i]);
                           return std::sqrt(a.value());
                         },
                         [c, p](auto x) { return c * lp_norm(x, p); }});
        break;
      }
      case CheckKind::DeltaSandwich:
      case CheckKind::CoarseSandwich:
        ineqs.push_back({[lower](auto x) { return lower * l2_norm(x); }, [&ev](auto x) { return ev.norm(x); }});
        ineqs.push_back({[&ev](auto x) { return ev.norm(x); }, [](auto x) { return l2_norm(x); }});
        break;
      case CheckKind::RefinementChain:
        ineqs.push_back({[&ev, k = *pair_b](auto x) { return ev.pair_value(k, x); },
                         [&ev, k = *pair_a, c = lower](auto x) { return c * ev.pair_value(k, x); }});
        break;
    }
    auto consider = [&](const std::vector<double>& x) {
      for (const auto& iq : ineqs) {
        double l = iq.lhs(x), r = iq.rhs(x);
        double s = detail::slack(l, r);
        ++rep.evaluations;
        if (s < -tol) ++rep.violations;
        if (s < rep.worst_slack) {
          rep.worst_slack = s;
          rep.witness = x;
          rep.witness_lhs = l;
          rep.witness_rhs = r;
        }
      }
    };
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> e(n, 0.0);
      e[i] = 1.0;
      consider(e);
    }
    for (const auto& x : sample_dense(n, samples, sub_seed(seed, n), Distribution::Gaussian)) consider(x);
  }
  rep.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// A norm on dense vectors of any length.
using NormHandle = std::function<double(std::span<const double>)>;

/// The space norm of a spec; evaluators are cached per dimension.
inline NormHandle space_norm_handle(const SpaceSpec& spec) {
  auto cache = std::make_shared<std::map<std::size_t, DenseEvaluator>>();
  return [spec, cache](std::span<const double> x) {
    auto it = cache->find(x.size());
    if (it == cache->end()) it = cache->emplace(x.size(), DenseEvaluator(spec, x.size())).first;
    return it->second.norm(x);
  };
}

inline NormHandle pair_norm_handle(const SpaceSpec& spec, std::size_t pair) {
  auto cache = std::make_shared<std::map<std::size_t, DenseEvaluator>>();
  return [spec, pair, cache](std::span<const double> x) {
    auto it = cache->find(x.size());
    if (it == cache->end()) it = cache->emplace(x.size(), DenseEvaluator(spec, x.size())).first;
    return it->second.pair_value(pair, x);
  };
}

inline NormHandle lp_norm_handle(double p) {
  return [p](std::span<const double> x) { return lp_norm(x, p); };
}

inline NormHandle l2_norm_handle() {
  return [](std::span<const double> x) { return l2_norm(x); };
}

struct RatioScanRow {
  std::size_t dim = 0;
  double min = 0.0, max = 0.0;
};

struct RatioScan {
  std::vector<RatioScanRow> rows;
  double trend = 0.0;  ///< relative growth of the max ratio between the two largest dimensions
};

namespace detail {

/// Coordinate search on f from x (step halving on failure), maximising
/// when sign = +1 and minimising when sign = -1.
inline double coordinate_ascent(const std::function<double(std::span<const double>)>& f, std::vector<double>& x,
                                double sign, int max_steps, double step0) {
  double best = f(x);
  double h = step0;
  for (int step = 0; step < max_steps && h > 1e-12; ++step) {
    bool improved = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (double d : {h, -h}) {
        double keep = x[i];
        x[i] += d;
        double v = f(x);
        if (std::isfinite(v) && sign * (v - best) > 0) {
          best = v;
          improved = true;
        } else {
          x[i] = keep;
        }
      }
    }
    if (!improved) h /= 2;
  }
  return best;
}

}  // namespace detail

/// Empirical range of ||x||_A / ||x||_B over samples, basis vectors and a
/// local refinement from the extreme samples.
inline RatioScan ratio_scan(const NormHandle& a, const NormHandle& b, const std::vector<std::size_t>& dims,
                            std::size_t samples, std::uint64_t seed) {
  RatioScan out;
  auto ratio = [&](std::span<const double> x) {
    double d = b(x);
    return d > 0 ? a(x) / d : std::numeric_limits<double>::quiet_NaN();
  };
  for (std::size_t n : dims) {
    RatioScanRow row;
    row.dim = n;
    row.min = std::numeric_limits<double>::infinity();
    row.max = -std::numeric_limits<double>::infinity();
    std::vector<double> arg_min, arg_max;
    auto consider = [&](const std::vector<double>& x) {
      double r = ratio(x);
      if (!std::isfinite(r)) return;
      if (r < row.min) {
        row.min = r;
        arg_min = x;
      }
      if (r > row.max) {
        row.max = r;
        arg_max = x;
      }
    };
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> e(n, 0.0);
      e[i] = 1.0;
      consider(e);
    }
    for (const auto& x : sample_dense(n, samples, sub_seed(seed, n), Distribution::Gaussian)) consider(x);
    auto scale = [](const std::vector<double>& x) {
      double m = 0;
      for (double v : x) m = std::max(m, std::fabs(v));
      return m > 0 ? m : 1.0;
    };
    row.max = std::max(row.max, detail::coordinate_ascent(ratio, arg_max, 1.0, 100, 0.25 * scale(arg_max)));
    row.min = std::min(row.min, detail::coordinate_ascent(ratio, arg_min, -1.0, 100, 0.25 * scale(arg_min)));
    out.rows.push_back(row);
  }
  if (out.rows.size() >= 2) {
    const auto& hi = out.rows[out.rows.size() - 1];
    const auto& lo = out.rows[out.rows.size() - 2];
    out.trend = (hi.max - lo.max) / lo.max;
  }
  return out;
}

struct OracleResult {
  double value = 0.0;
  std::vector<double> witness;  ///< maximiser, normalised to the l_p unit sphere
};

inline constexpr std::size_t kOracleMaxDimension = 6;

/// max of pair_norm over the nonnegative part of the l_p unit sphere: grid
/// over the faces of the unit cube, then local refinement.
inline OracleResult sphere_oracle(const PartitionWeightPair& pair, const Rational& p, std::size_t dim,
                                  std::size_t grid) {
  if (dim > kOracleMaxDimension || dim == 0) {
    fail(ErrorCode::DimensionTooLarge, "sphere oracle supports dimensions 1.." + std::to_string(kOracleMaxDimension));
  }
  require(grid >= 1, ErrorCode::InvalidArgument, "grid resolution must be positive");
  SpaceSpec spec(p, {pair});
  std::size_t k = pair.is_trivial() ? 0 : 1;
  DenseEvaluator ev(spec, dim);
  double pd = to_double(p);
  auto f = [&](std::span<const double> x) {
    for (double v : x)
      if (v < 0) return -1.0;
    double d = lp_norm(x, pd);
    return d > 0 ? ev.pair_value(k, x) / d : -1.0;
  };
  double best = -1.0;
  std::vector<double> arg(dim, 1.0);
  std::vector<double> x(dim);
  std::vector<std::size_t> idx(dim - 1, 0);
  for (std::size_t face = 0; face < dim; ++face) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      for (std::size_t i = 0, j = 0; i < dim; ++i) {
        x[i] = i == face ? 1.0 : static_cast<double>(idx[j++]) / static_cast<double>(grid);
      }
      double v = f(x);
      if (v > best) {
        best = v;
        arg = x;
      }
      std::size_t j = 0;
      while (j < idx.size() && ++idx[j] > grid) idx[j++] = 0;
      if (j == idx.size()) break;
    }
  }
  OracleResult out;
  out.value = std::max(best, detail::coordinate_ascent(f, arg, 1.0, 10000, 0.5 / static_cast<double>(grid)));
  double norm = lp_norm(arg, pd);
  for (auto& v : arg) v /= norm;
  out.witness = std::move(arg);
  return out;
}

}  // namespace alspach

#endif  // ALSPACH_VERIFIER_HPP
