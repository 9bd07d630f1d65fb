#ifndef ALSPACH_NORM_HPP
#define ALSPACH_NORM_HPP

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "partition.hpp"
#include "profile.hpp"
#include "rational.hpp"
#include "space.hpp"

namespace alspach {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    comp_ += std::fabs(sum_) >= std::fabs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0, comp_ = 0.0;
};

struct NormBreakdown {
  std::vector<double> per_pair;
  double overall = 0.0;
  std::size_t argmax = 0;
};

namespace detail {

inline double lp_of_block_sums(const std::map<long, CompensatedSum>& blocks, double p) {
  CompensatedSum outer;
  for (const auto& [id, s] : blocks) outer.add(std::pow(s.value(), p / 2));
  return std::pow(outer.value(), 1.0 / p);
}

inline NormBreakdown breakdown(std::vector<double> values) {
  NormBreakdown out;
  out.per_pair = std::move(values);
  for (std::size_t k = 0; k < out.per_pair.size(); ++k) {
    if (out.per_pair[k] > out.overall) {
      out.overall = out.per_pair[k];
      out.argmax = k;
    }
  }
  return out;
}

}  // namespace detail

/// (sum_N (sum_{j in N} x_j^2 w_j^2)^{p/2})^{1/p} over the blocks meeting the support.
inline double pair_norm(const std::map<long, double>& by_position, const PartitionWeightPair& pair, const Rational& p) {
  require(p > 2, ErrorCode::InvalidArgument, "p must exceed 2");
  std::map<long, CompensatedSum> blocks;
  for (const auto& [pos, x] : by_position) {
    double w = pair.weight_value(pos);
    blocks[pair.partition().locate(pos).block.id].add(x * x * w * w);
  }
  return detail::lp_of_block_sums(blocks, to_double(p));
}

inline double pair_norm(const SparseVector& x, const SpaceSpec& spec, std::size_t pair_index) {
  return pair_norm(x.by_position(spec), spec.pair(pair_index), spec.p());
}

/// Norm of the space: the maximum over all pairs, ties to the earliest pair.
inline NormBreakdown space_norm(const SparseVector& x, const SpaceSpec& spec) {
  auto pos = x.by_position(spec);
  std::vector<double> values;
  for (const auto& pr : spec.pairs()) values.push_back(pair_norm(pos, pr, spec.p()));
  return detail::breakdown(std::move(values));
}

inline double lp_norm(std::span<const double> x, double p) {
  CompensatedSum s;
  for (double v : x) s.add(std::pow(std::fabs(v), p));
  return std::pow(s.value(), 1.0 / p);
}

inline double l2_norm(std::span<const double> x) {
  CompensatedSum s;
  for (double v : x) s.add(v * v);
  return std::sqrt(s.value());
}

/// Precomputed block slots and weights for positions 1..n, for evaluating
/// many dense vectors against one spec.
class DenseEvaluator {
 public:
  DenseEvaluator(const SpaceSpec& spec, std::size_t n) : n_(n), p_(spec.p_value()) {
    for (const auto& pr : spec.pairs()) layouts_.push_back(make_layout(pr, n));
  }

  std::size_t dimension() const { return n_; }
  std::size_t pair_count() const { return layouts_.size(); }

  double pair_value(std::size_t k, std::span<const double> x) const {
    require(x.size() == n_, ErrorCode::InvalidArgument, "dimension mismatch");
    const Layout& L = layouts_[k];
    std::vector<CompensatedSum> sums(L.slots);
    for (std::size_t i = 0; i < n_; ++i) {
      double xw = x[i] * L.weight[i];
      sums[L.slot[i]].add(xw * xw);
    }
    CompensatedSum outer;
    for (const auto& s : sums) outer.add(std::pow(s.value(), p_ / 2));
    return std::pow(outer.value(), 1.0 / p_);
  }

  NormBreakdown evaluate(std::span<const double> x) const {
    std::vector<double> values;
    for (std::size_t k = 0; k < layouts_.size(); ++k) values.push_back(pair_value(k, x));
    return detail::breakdown(std::move(values));
  }

  double norm(std::span<const double> x) const { return evaluate(x).overall; }

  /// Slot (compacted block index) of each position for pair k.
  const std::vector<std::size_t>& slots(std::size_t k) const { return layouts_[k].slot; }
  const std::vector<double>& weights(std::size_t k) const { return layouts_[k].weight; }

 private:
  struct Layout {
    std::vector<std::size_t> slot;
    std::vector<double> weight;
    std::size_t slots = 0;
  };

  static Layout make_layout(const PartitionWeightPair& pr, std::size_t n) {
    Layout L;
    std::map<long, std::size_t> ids;
    for (std::size_t i = 0; i < n; ++i) {
      long pos = static_cast<long>(i) + 1;
      long id = pr.partition().locate(pos).block.id;
      auto [it, inserted] = ids.emplace(id, ids.size());
      L.slot.push_back(it->second);
      L.weight.push_back(pr.weight_value(pos));
    }
    L.slots = ids.size();
    return L;
  }

  std::size_t n_;
  double p_;
  std::vector<Layout> layouts_;
};

using HighPrecision = boost::multiprecision::cpp_bin_float_50;

inline HighPrecision to_high(const Rational& r) {
  return HighPrecision(numerator(r).str()) / HighPrecision(denominator(r).str());
}

struct ExactNorm {
  std::vector<Rational> block_sums;   ///< sum x_j^2 w_j^2 per block, exact
  std::optional<Rational> power_sum;  ///< ||x||^p, when p/2 is an integer
  HighPrecision value;
};

inline constexpr std::size_t kExactDimensionLimit = 16;

/// Rational evaluation for rational entries and rational weights (support <= 16).
inline ExactNorm exact_pair_norm(const ExactSparseVector& x, const SpaceSpec& spec, std::size_t pair_index) {
  require(x.size() <= kExactDimensionLimit, ErrorCode::NotExact, "exact evaluation is limited to 16 entries");
  const auto& pair = spec.pair(pair_index);
  std::map<long, Rational> blocks;
  for (const auto& [pos, v] : x.by_position(spec)) {
    Real w = pair.weight_at(pos);
    require(w.exact.has_value(), ErrorCode::NotExact, "weight at position " + std::to_string(pos) + " is irrational");
    blocks[pair.partition().locate(pos).block.id] += v * v * *w.exact * *w.exact;
  }
  ExactNorm out;
  Rational half = spec.p() / 2;
  HighPrecision pp = to_high(spec.p());
  HighPrecision total = 0;
  if (is_integer(half)) out.power_sum = Rational(0);
  for (const auto& [id, s] : blocks) {
    out.block_sums.push_back(s);
    if (out.power_sum) {
      *out.power_sum += pow_int(s, to_long(half));
    } else {
      total += boost::multiprecision::pow(to_high(s), pp / 2);
    }
  }
  if (out.power_sum) {
    total = to_high(*out.power_sum);
  }
  out.value = total == 0 ? HighPrecision(0) : HighPrecision(boost::multiprecision::pow(total, 1 / pp));
  return out;
}

struct Majorant {
  bool finite = true;
  Real constant;                ///< the bound C (meaningless when !finite)
  Real power_sum;               ///< the sum the constant is the q-th root of
  std::vector<double> partials;  ///< truncated power sums, when requested
};

/// C(w) = (sum_j w_j^q)^{1/q} with q = 2p/(p-2), so that
/// (sum x_j^2 w_j^2)^{1/2} <= C(w) ||x||_p.
inline Majorant holder_majorant(const Profile& w, const Rational& p, const std::vector<long>& truncations = {}) {
  require(p > 2, ErrorCode::InvalidArgument, "p must exceed 2");
  Rational q = 2 * p / (p - 2);
  Majorant m;
  PowerSum s = profile_power_sum(w, q);
  m.finite = s.finite;
  m.power_sum = s.value;
  if (s.finite) m.constant = pow(s.value, 1 / q);
  if (!truncations.empty()) m.partials = profile_partial_power_sums(w, q, truncations);
  return m;
}

inline Majorant holder_majorant(const WeightFamily& w, const Rational& p, const std::vector<long>& truncations = {}) {
  return holder_majorant(restrict_family(w, std::nullopt), p, truncations);
}

/// Truncated Holder constant over the first n weights.
inline double truncated_holder_constant(const Profile& w, const Rational& p, long n) {
  Rational q = 2 * p / (p - 2);
  return std::pow(profile_partial_power_sums(w, q, {n}).front(), 1.0 / to_double(q));
}

struct BlockRatio {
  Real value;
  bool attained = true;
};

/// W_N = sup_{k in N} w2_k / w1_k given both weight profiles along N.
inline BlockRatio block_ratio(const Profile& w1, const Profile& w2) {
  ExtremeResult sup = profile_sup(ratio(w2, w1));
  if (compare(sup.value, Real(Rational(1))) > 0) {
    fail(ErrorCode::RatioAssumptionViolated, "w2 exceeds w1 on the block (sup ratio " + to_string(sup.value) + ")");
  }
  return {sup.value, sup.attained};
}

inline BlockRatio block_ratio(const PartitionWeightPair& fine, const PartitionWeightPair& coarse, long fine_block) {
  return block_ratio(weight_profile(fine, fine.partition(), fine_block),
                     weight_profile(coarse, fine.partition(), fine_block));
}

/// W_N over the blocks of one fine group: either listed block by block or in
/// closed form as a profile over the block index inside the group.
struct GroupRatios {
  std::size_t group = 0;
  std::vector<std::pair<long, BlockRatio>> listed;  ///< (fine block id, W_N)
  std::optional<Profile> family;                    ///< W_N as a function of the in-group index
};

inline constexpr long kEnumerateBlocksLimit = 4096;

/// W_N for every fine block, grouped by fine block group.
inline std::vector<GroupRatios> block_ratios(const PartitionWeightPair& fine, const PartitionWeightPair& coarse) {
  const PartitionScheme& P = fine.partition();
  std::vector<GroupRatios> out;
  for (std::size_t g = 0; g < P.groups().size(); ++g) {
    const BlockGroup& grp = P.groups()[g];
    GroupRatios gr;
    gr.group = g;
    if (grp.count && *grp.count <= kEnumerateBlocksLimit) {
      for (long i = 0; i < *grp.count; ++i) {
        long id = P.first_block_id(g) + i;
        gr.listed.emplace_back(id, block_ratio(fine, coarse, id));
      }
      out.push_back(std::move(gr));
      continue;
    }
    // product form: w(i, o) = s(i) t(o) on both sides, in the fine frame
    auto product_form = [&](const PartitionWeightPair& pr) -> std::optional<std::pair<Profile, Profile>> {
      if (auto c = pr.uniform_value()) {
        return std::make_pair(Profile::constant(Real(Rational(1)), grp.count), Profile::constant(Real(*c), grp.size));
      }
      if (!same_layout(pr.frame(), P)) return std::nullopt;
      const BlockWeights& bw = pr.weights_for_group(g);
      Profile s = bw.scale ? restrict_family(*bw.scale, grp.count) : Profile::constant(Real(Rational(1)), grp.count);
      return std::make_pair(std::move(s), restrict_family(bw.tmpl, grp.size));
    };
    auto f = product_form(fine);
    auto c = product_form(coarse);
    if (!f || !c) {
      fail(ErrorCode::UnsupportedLayout,
           "W_N over infinitely many blocks needs both weights in the fine partition's frame or uniform");
    }
    BlockRatio tmpl = block_ratio(f->second, c->second);
    Profile family = ratio(c->first, f->first).scaled(tmpl.value);
    ExtremeResult sup = profile_sup(family);
    if (compare(sup.value, Real(Rational(1))) > 0) {
      fail(ErrorCode::RatioAssumptionViolated, "w2 exceeds w1 on some block of group " + std::to_string(g));
    }
    gr.family = std::move(family);
    out.push_back(std::move(gr));
  }
  return out;
}

inline Real weights_infimum(const PartitionWeightPair& pr) {
  std::optional<Real> best;
  for (const auto& a : weight_atoms(pr)) {
    Real v = profile_inf(a.outer).value * profile_inf(a.inner).value;
    if (!best || compare(v, *best) < 0) best = v;
  }
  return *best;
}

inline Real weights_supremum(const PartitionWeightPair& pr) {
  std::optional<Real> best;
  for (const auto& a : weight_atoms(pr)) {
    Real v = profile_sup(a.outer).value * profile_sup(a.inner).value;
    if (!best || compare(v, *best) > 0) best = v;
  }
  return *best;
}

/// Whether w_fine >= w_coarse at every index.
inline bool dominates(const PartitionWeightPair& fine, const PartitionWeightPair& coarse) {
  if (auto c1 = fine.uniform_value()) return compare(weights_supremum(coarse), Real(*c1)) <= 0;
  if (auto c2 = coarse.uniform_value()) return compare(weights_infimum(fine), Real(*c2)) >= 0;
  try {
    block_ratios(fine, coarse);
    return true;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::RatioAssumptionViolated) return false;
    throw;
  }
}

struct RefinementMajorant {
  bool finite = true;
  Real constant;                              ///< C = sup_M (sum_{N in M} W_N^q)^{1/q}
  Real sup_block_sum;                         ///< sup_M sum_{N in M} W_N^q
  std::vector<std::pair<long, Real>> coarse_sums;  ///< (M id, sum) for listed M
  std::vector<GroupRatios> ratios;
};

/// Bound ||x||_(coarse) <= C ||x||_(fine) for fine refining coarse with
/// w_fine >= w_coarse pointwise.
inline RefinementMajorant refinement_majorant(const PartitionWeightPair& fine, const PartitionWeightPair& coarse,
                                              const Rational& p) {
  require(p > 2, ErrorCode::InvalidArgument, "p must exceed 2");
  Refinement ref = refines(fine.partition(), coarse.partition());
  if (!ref) fail(ErrorCode::NotARefinement, fine.partition().describe() + " does not refine " + coarse.partition().describe());
  Rational q = 2 * p / (p - 2);
  RefinementMajorant out;
  out.ratios = block_ratios(fine, coarse);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  auto finish = [&](Real sup_sum) {
    out.sup_block_sum = sup_sum;
    out.finite = std::isfinite(sup_sum.value);
    if (out.finite) out.constant = pow(sup_sum, 1 / q);
    return out;
  };
  auto power_of = [&](const BlockRatio& r) { return pow(r.value, q); };

  const PartitionScheme& P = fine.partition();
  const PartitionScheme& Q = coarse.partition();

  // every coarse block holds exactly one fine block
  if (P == Q) {
    Real best(Rational(0));
    for (const auto& gr : out.ratios) {
      for (const auto& [id, r] : gr.listed)
        if (compare(power_of(r), best) > 0) best = power_of(r);
      if (gr.family) {
        Real s = pow(profile_sup(*gr.family).value, q);
        if (compare(s, best) > 0) best = s;
      }
    }
    return finish(best);
  }

  std::map<long, Real> sums;
  auto add = [&](long m, const Real& v) {
    auto it = sums.find(m);
    if (it == sums.end()) {
      sums.emplace(m, v);
    } else {
      it->second = it->second + v;
    }
  };
  for (const auto& gr : out.ratios) {
    for (const auto& [id, r] : gr.listed) add(ref.coarse_of(id), power_of(r));
    if (!gr.family) continue;
    // an infinite family of fine blocks: all inside one coarse block?
    long first = P.first_block_id(gr.group);
    long m0 = ref.coarse_of(first);
    bool single = Q.is_indiscrete();
    if (!single && Q.block_count()) {
      long L = std::max(1L, std::lcm(std::max(1L, P.period()), std::max(1L, Q.period())));
      long probe = 2 * L + 2;
      single = true;
      for (long i = 1; i <= probe && single; ++i) single = ref.coarse_of(first + i) == m0;
    }
    if (!single) {
      fail(ErrorCode::UnsupportedLayout, "infinitely many fine blocks spread over infinitely many coarse blocks");
    }
    PowerSum s = profile_power_sum(*gr.family, q);
    add(m0, s.finite ? s.value : Real(kInf));
  }
  Real best(Rational(0));
  for (const auto& [m, s] : sums) {
    out.coarse_sums.emplace_back(m, s);
    if (!std::isfinite(s.value) || (std::isfinite(best.value) && compare(s, best) > 0)) best = s;
  }
  return finish(best);
}

}  // namespace alspach

#endif  // ALSPACH_NORM_HPP
