#ifndef ALSPACH_SPACE_HPP
#define ALSPACH_SPACE_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "partition.hpp"
#include "profile.hpp"
#include "rational.hpp"
#include "weight_family.hpp"

namespace alspach {

/// w(block i, offset o) = scale(i) * tmpl(o); i counts blocks inside their group.
struct BlockWeights {
  WeightFamily tmpl = WeightFamily::constant(1);
  std::optional<WeightFamily> scale;

  friend bool operator==(const BlockWeights& a, const BlockWeights& b) {
    return a.tmpl == b.tmpl && a.scale == b.scale;
  }

  /// The single value taken everywhere, if any.
  std::optional<Rational> uniform_value() const {
    if (tmpl.kind() != WeightKind::Constant) return std::nullopt;
    if (scale && scale->kind() != WeightKind::Constant) return std::nullopt;
    return scale ? tmpl.scale() * scale->scale() : tmpl.scale();
  }

  std::string describe() const {
    std::string s = tmpl.describe();
    if (scale) s += " scaled per block by " + scale->describe();
    return s;
  }
};

struct WeightAssignment {
  BlockWeights base;
  std::map<std::size_t, BlockWeights> overrides;  ///< keyed by group index of the frame
  std::optional<PartitionScheme> frame;           ///< nullopt: the pair's own partition

  friend bool operator==(const WeightAssignment& a, const WeightAssignment& b) {
    bool frames_equal = a.frame.has_value() == b.frame.has_value() &&
                        (!a.frame || a.frame->groups() == b.frame->groups());
    return frames_equal && a.base == b.base && a.overrides == b.overrides;
  }
};

inline bool same_layout(const PartitionScheme& a, const PartitionScheme& b) { return a.groups() == b.groups(); }

class PartitionWeightPair {
 public:
  PartitionWeightPair(PartitionScheme partition, WeightAssignment weights)
      : partition_(std::move(partition)), weights_(std::move(weights)) {
    if (weights_.frame && same_layout(*weights_.frame, partition_)) weights_.frame.reset();
    for (const auto& [g, bw] : weights_.overrides) {
      require(g < frame().groups().size(), ErrorCode::InvalidArgument,
              "weight override for group " + std::to_string(g) + " but the frame has only " +
                  std::to_string(frame().groups().size()) + " groups");
    }
    // drop overrides identical to the base
    for (auto it = weights_.overrides.begin(); it != weights_.overrides.end();) {
      it = it->second == weights_.base ? weights_.overrides.erase(it) : std::next(it);
    }
  }

  PartitionWeightPair(PartitionScheme partition, WeightFamily w)
      : PartitionWeightPair(std::move(partition), WeightAssignment{BlockWeights{std::move(w), std::nullopt}, {}, {}}) {}

  static PartitionWeightPair trivial() { return {PartitionScheme::discrete(), WeightFamily::constant(1)}; }

  const PartitionScheme& partition() const { return partition_; }
  const WeightAssignment& weights() const { return weights_; }
  const PartitionScheme& frame() const { return weights_.frame ? *weights_.frame : partition_; }
  bool own_frame() const { return !weights_.frame.has_value(); }

  const BlockWeights& weights_for_group(std::size_t g) const {
    auto it = weights_.overrides.find(g);
    return it == weights_.overrides.end() ? weights_.base : it->second;
  }

  std::optional<Rational> uniform_value() const {
    auto v = weights_.base.uniform_value();
    if (!v) return std::nullopt;
    for (const auto& [g, bw] : weights_.overrides) {
      if (bw.uniform_value() != v) return std::nullopt;
    }
    return v;
  }

  bool is_trivial() const { return partition_.is_discrete() && uniform_value() == Rational(1); }

  Real weight_at(long position) const {
    Address a = frame().locate(position);
    const BlockWeights& bw = weights_for_group(a.block.group);
    Real w = alspach::weight_at(bw.tmpl, a.offset);
    if (bw.scale) w = w * alspach::weight_at(*bw.scale, a.block.index_in_group);
    return w;
  }

  double weight_value(long position) const {
    Address a = frame().locate(position);
    const BlockWeights& bw = weights_for_group(a.block.group);
    double w = alspach::weight_value(bw.tmpl, a.offset);
    if (bw.scale) w *= alspach::weight_value(*bw.scale, a.block.index_in_group);
    return w;
  }

  friend bool operator==(const PartitionWeightPair& a, const PartitionWeightPair& b) {
    if (!same_layout(a.partition_, b.partition_)) return false;
    return a.weights_ == b.weights_;
  }

  std::string describe() const {
    std::string s = partition_.describe() + " with weights " + weights_.base.describe();
    for (const auto& [g, bw] : weights_.overrides) s += "; group " + std::to_string(g) + ": " + bw.describe();
    if (weights_.frame) s += " (addressed in frame " + weights_.frame->describe() + ")";
    return s;
  }

 private:
  PartitionScheme partition_;
  WeightAssignment weights_;
};

/// Weights of `pair` along the positions of block `block_id` of `host`, in
/// host offset order.
inline Profile weight_profile(const PartitionWeightPair& pair, const PartitionScheme& host, long block_id) {
  BlockRef hb = host.block(block_id);
  if (auto c = pair.uniform_value()) return Profile::constant(Real(*c), hb.size);
  const PartitionScheme& frame = pair.frame();
  if (same_layout(frame, host)) {
    const BlockWeights& bw = pair.weights_for_group(hb.group);
    Profile p = restrict_family(bw.tmpl, hb.size);
    if (bw.scale) p = p.scaled(alspach::weight_at(*bw.scale, hb.index_in_group));
    return p;
  }
  BlockSpan hs = host.span(block_id);
  if (!hs.cantor) {
    Address first = frame.locate(hs.start);
    BlockSpan fs = frame.span(first.block.id);
    bool contained = !fs.cantor && hs.stride % fs.stride == 0;
    if (contained) {
      if (!hs.size) {
        contained = !fs.size;
      } else {
        long last = hs.start + hs.stride * (*hs.size - 1);
        contained = frame.locate(last).block.id == first.block.id;
      }
    }
    if (contained) {
      const BlockWeights& bw = pair.weights_for_group(first.block.group);
      Profile p = restrict_family(bw.tmpl, first.offset, hs.stride / fs.stride, hs.size);
      if (bw.scale) p = p.scaled(alspach::weight_at(*bw.scale, first.block.index_in_group));
      return p;
    }
  }
  if (hs.size && *hs.size <= kExpandLimit) {
    std::vector<Real> vals;
    for (long o = 1; o <= *hs.size; ++o) vals.push_back(pair.weight_at(host.position(block_id, o)));
    return Profile::from_values(std::move(vals));
  }
  fail(ErrorCode::UnsupportedLayout, "weights of " + pair.describe() + " along block " + std::to_string(block_id) +
                                         " of " + host.describe() + " have no closed form");
}

/// Values outer(i) * inner(o) over all index pairs: a block family sharing one template.
struct WeightAtom {
  Profile outer;
  Profile inner;
};

/// The multiset of all weights of a pair, grouped into closed-form atoms.
inline std::vector<WeightAtom> weight_atoms(const PartitionWeightPair& pair) {
  std::vector<WeightAtom> atoms;
  const PartitionScheme& frame = pair.frame();
  for (std::size_t g = 0; g < frame.groups().size(); ++g) {
    const BlockGroup& grp = frame.groups()[g];
    const BlockWeights& bw = pair.weights_for_group(g);
    Profile outer = bw.scale ? restrict_family(*bw.scale, grp.count) : Profile::constant(Real(Rational(1)), grp.count);
    atoms.push_back({std::move(outer), restrict_family(bw.tmpl, grp.size)});
  }
  return atoms;
}

class SpaceSpec {
 public:
  /// Validates p > 2 and normalizes: the trivial pair first, exactly once.
  SpaceSpec(Rational p, std::vector<PartitionWeightPair> pairs) : p_(std::move(p)) {
    require(p_ > 2, ErrorCode::InvalidArgument, "p must exceed 2, got " + to_string(p_));
    pairs_.push_back(PartitionWeightPair::trivial());
    for (auto& pr : pairs) {
      if (pr.is_trivial()) continue;
      pairs_.push_back(std::move(pr));
    }
  }

  const Rational& p() const { return p_; }
  double p_value() const { return to_double(p_); }

  /// Critical exponent 2p / (p - 2).
  Rational q() const { return 2 * p_ / (p_ - 2); }

  const std::vector<PartitionWeightPair>& pairs() const { return pairs_; }
  const PartitionWeightPair& pair(std::size_t k) const {
    require(k < pairs_.size(), ErrorCode::InvalidArgument, "pair index out of range");
    return pairs_[k];
  }

  /// Pairs other than the trivial one (indices into pairs()).
  std::vector<std::size_t> nontrivial() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 1; k < pairs_.size(); ++k) out.push_back(k);
    return out;
  }

  SpaceSpec without(std::size_t k) const {
    require(k >= 1 && k < pairs_.size(), ErrorCode::InvalidArgument, "cannot remove the trivial pair");
    std::vector<PartitionWeightPair> rest;
    for (std::size_t j = 1; j < pairs_.size(); ++j)
      if (j != k) rest.push_back(pairs_[j]);
    return SpaceSpec(p_, std::move(rest));
  }

  SpaceSpec normalized() const { return SpaceSpec(p_, {pairs_.begin() + 1, pairs_.end()}); }

  friend bool operator==(const SpaceSpec& a, const SpaceSpec& b) { return a.p_ == b.p_ && a.pairs_ == b.pairs_; }

 private:
  Rational p_;
  std::vector<PartitionWeightPair> pairs_;
};

struct Admissibility {
  bool admissible = false;
  std::optional<std::size_t> trivial, regular, indiscrete;
};

/// Trivial pair, a regular pair and an indiscrete pair; first matches in declaration order.
inline Admissibility is_admissible(const SpaceSpec& spec) {
  Admissibility a;
  for (std::size_t k = 0; k < spec.pairs().size(); ++k) {
    const auto& pr = spec.pairs()[k];
    if (!a.trivial && pr.is_trivial()) a.trivial = k;
    if (!a.regular && pr.partition().is_regular()) a.regular = k;
    if (!a.indiscrete && pr.partition().is_indiscrete()) a.indiscrete = k;
  }
  a.admissible = a.trivial && a.regular && a.indiscrete;
  return a;
}

/// Finitely supported vector addressed by (block, offset) of a reference pair.
template <class T>
class BasicSparseVector {
 public:
  using Key = std::pair<long, long>;

  BasicSparseVector() = default;
  explicit BasicSparseVector(std::size_t reference_pair) : reference_(reference_pair) {}

  void set(long block, long offset, T value) {
    if (value == T(0)) {
      entries_.erase({block, offset});
    } else {
      entries_[{block, offset}] = std::move(value);
    }
  }

  const std::map<Key, T>& entries() const { return entries_; }
  std::size_t reference_pair() const { return reference_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  /// Global positions of the entries; validates every address.
  std::map<long, T> by_position(const SpaceSpec& spec) const {
    const PartitionScheme& ref = spec.pair(reference_).partition();
    std::map<long, T> out;
    for (const auto& [key, v] : entries_) {
      long pos = 0;
      try {
        pos = ref.position(key.first, key.second);
      } catch (const Error& e) {
        fail(ErrorCode::AddressOutOfRange, "entry (" + std::to_string(key.first) + ", " + std::to_string(key.second) +
                                               ") is not an index of the reference partition");
      }
      out[pos] = v;
    }
    return out;
  }

  /// Builds a vector from values at global positions 1..values.size().
  static BasicSparseVector from_positions(const SpaceSpec& spec, std::size_t reference, const std::vector<T>& values) {
    BasicSparseVector v(reference);
    const PartitionScheme& ref = spec.pair(reference).partition();
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] == T(0)) continue;
      Address a = ref.locate(static_cast<long>(i) + 1);
      v.set(a.block.id, a.offset, values[i]);
    }
    return v;
  }

 private:
  std::size_t reference_ = 0;
  std::map<Key, T> entries_;
};

using SparseVector = BasicSparseVector<double>;
using ExactSparseVector = BasicSparseVector<Rational>;

}  // namespace alspach

#endif  // ALSPACH_SPACE_HPP
