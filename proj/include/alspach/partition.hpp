#ifndef ALSPACH_PARTITION_HPP
#define ALSPACH_PARTITION_HPP

// Partitions of the countable index set {1, 2, 3, ...}.
//
// A scheme is an ordered list of block groups (size, count), where either
// field may be infinite and only the last group may have infinitely many
// blocks. Blocks are numbered 1, 2, ... in declaration order. Positions are
// assigned as follows:
//
//   * blocks of finite size from finite-count groups fill 1..T consecutively;
//   * the k finite-count infinite blocks share the positions after T
//     round-robin, together with one extra stream holding a trailing
//     finite-size family (laid out consecutively inside its stream);
//   * a trailing family of infinite blocks instead uses the Cantor pairing
//     of (infinite-block rank, offset) on the positions after T.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"

namespace alspach {

/// nullopt stands for an infinite cardinality.
using Cardinal = std::optional<long>;

inline std::string to_string(const Cardinal& c) { return c ? std::to_string(*c) : std::string("inf"); }

struct BlockGroup {
  Cardinal size;
  Cardinal count;

  friend bool operator==(const BlockGroup&, const BlockGroup&) = default;
};

enum class PartitionKind { Discrete, Indiscrete, Regular };

inline const char* to_string(PartitionKind k) {
  switch (k) {
    case PartitionKind::Discrete: return "discrete";
    case PartitionKind::Indiscrete: return "indiscrete";
    case PartitionKind::Regular: return "regular";
  }
  return "?";
}

struct BlockRef {
  long id = 0;
  std::size_t group = 0;
  long index_in_group = 0;  ///< 1-based
  Cardinal size;
};

struct Address {
  BlockRef block;
  long offset = 0;  ///< 1-based
};

/// Positions of one block: start + stride * (offset - 1), unless laid out
/// by the Cantor pairing.
struct BlockSpan {
  long start = 1;
  long stride = 1;
  Cardinal size;
  bool cantor = false;
};

class PartitionScheme {
 public:
  enum class Mode { Contiguous, RoundRobin, RoundRobinWithFamily, Cantor };

  PartitionScheme() : PartitionScheme(std::vector<BlockGroup>{{1, std::nullopt}}) {}

  explicit PartitionScheme(std::vector<BlockGroup> groups) : groups_(std::move(groups)) { build(); }

  static PartitionScheme discrete() { return PartitionScheme({{1, std::nullopt}}); }
  static PartitionScheme indiscrete() { return PartitionScheme({{std::nullopt, 1}}); }

  const std::vector<BlockGroup>& groups() const { return groups_; }
  Mode mode() const { return mode_; }

  PartitionKind kind() const {
    bool all_single = std::all_of(groups_.begin(), groups_.end(), [](const BlockGroup& g) { return g.size == 1; });
    if (all_single) return PartitionKind::Discrete;
    if (groups_.size() == 1 && !groups_[0].size && groups_[0].count == 1) return PartitionKind::Indiscrete;
    return PartitionKind::Regular;
  }
  bool is_discrete() const { return kind() == PartitionKind::Discrete; }
  bool is_indiscrete() const { return kind() == PartitionKind::Indiscrete; }
  bool is_regular() const { return kind() == PartitionKind::Regular; }

  /// |B|, |I| = #infinite blocks, |B \ I| = #finite blocks.
  Cardinal block_count() const { return sum_counts([](const BlockGroup&) { return true; }); }
  Cardinal infinite_block_count() const { return sum_counts([](const BlockGroup& g) { return !g.size; }); }
  Cardinal finite_block_count() const { return sum_counts([](const BlockGroup& g) { return g.size.has_value(); }); }

  /// Largest finite block size (0 when there are none).
  long max_finite_size() const {
    long m = 0;
    for (const auto& g : groups_)
      if (g.size) m = std::max(m, *g.size);
    return m;
  }

  /// Length of the consecutive prefix of finite blocks.
  long prefix_length() const { return prefix_len_; }

  /// Shift period of the block structure beyond the prefix (0 for Cantor).
  long period() const {
    switch (mode_) {
      case Mode::Contiguous: return family_size_;
      case Mode::RoundRobin: return k0_;
      case Mode::RoundRobinWithFamily: return (k0_ + 1) * family_size_;
      case Mode::Cantor: return 0;
    }
    return 0;
  }

  BlockRef block(long id) const {
    require(id >= 1, ErrorCode::AddressOutOfRange, "block ids start at 1");
    long first = 1;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const auto& grp = groups_[g];
      if (!grp.count || id < first + *grp.count) return {id, g, id - first + 1, grp.size};
      first += *grp.count;
    }
    fail(ErrorCode::AddressOutOfRange, "block " + std::to_string(id) + " does not exist");
  }

  long first_block_id(std::size_t group) const { return group_first_id_.at(group); }

  BlockSpan span(long id) const {
    BlockRef b = block(id);
    const auto& grp = groups_[b.group];
    if (grp.size && grp.count) {
      return {group_prefix_start_[b.group] + (b.index_in_group - 1) * *grp.size, 1, grp.size, false};
    }
    if (grp.size) {  // trailing finite-size family
      if (mode_ == Mode::Contiguous) return {prefix_len_ + (b.index_in_group - 1) * *grp.size + 1, 1, grp.size, false};
      long K = k0_ + 1;
      long sigma0 = (b.index_in_group - 1) * *grp.size + 1;
      return {prefix_len_ + K * sigma0, K, grp.size, false};
    }
    long rank = group_inf_rank_[b.group] + b.index_in_group - 1;
    if (mode_ == Mode::Cantor) return {prefix_len_ + cantor(rank, 1), 0, std::nullopt, true};
    long K = mode_ == Mode::RoundRobin ? k0_ : k0_ + 1;
    return {prefix_len_ + rank, K, std::nullopt, false};
  }

  long position(long id, long offset) const {
    BlockRef b = block(id);
    require(offset >= 1 && (!b.size || offset <= *b.size), ErrorCode::AddressOutOfRange,
            "offset " + std::to_string(offset) + " outside block " + std::to_string(id));
    BlockSpan s = span(id);
    if (s.cantor) {
      long rank = group_inf_rank_[b.group] + b.index_in_group - 1;
      return prefix_len_ + cantor(rank, offset);
    }
    return s.start + s.stride * (offset - 1);
  }

  Address locate(long pos) const {
    require(pos >= 1, ErrorCode::AddressOutOfRange, "positions start at 1");
    if (pos <= prefix_len_) {
      for (std::size_t g = 0; g < groups_.size(); ++g) {
        const auto& grp = groups_[g];
        if (!grp.size || !grp.count) continue;
        long start = group_prefix_start_[g];
        long len = *grp.size * *grp.count;
        if (pos >= start && pos < start + len) {
          long idx = (pos - start) / *grp.size + 1;
          long off = (pos - start) % *grp.size + 1;
          return {block(group_first_id_[g] + idx - 1), off};
        }
      }
    }
    long r = pos - prefix_len_;
    switch (mode_) {
      case Mode::Contiguous: {
        long s = family_size_;
        return {block(group_first_id_[family_group_] + (r - 1) / s), (r - 1) % s + 1};
      }
      case Mode::RoundRobin: return {block(inf_rank_to_id((r - 1) % k0_ + 1)), (r - 1) / k0_ + 1};
      case Mode::RoundRobinWithFamily: {
        long K = k0_ + 1;
        long lane = (r - 1) % K + 1, o = (r - 1) / K + 1;
        if (lane <= k0_) return {block(inf_rank_to_id(lane)), o};
        long s = family_size_;
        return {block(group_first_id_[family_group_] + (o - 1) / s), (o - 1) % s + 1};
      }
      case Mode::Cantor: {
        long d = static_cast<long>(std::floor((std::sqrt(8.0 * static_cast<double>(r) + 1.0) - 1.0) / 2.0));
        while (d * (d + 1) / 2 < r) ++d;
        while (d > 1 && (d - 1) * d / 2 >= r) --d;
        long rank = r - (d - 1) * d / 2;
        return {block(inf_rank_to_id(rank)), d - rank + 1};
      }
    }
    fail(ErrorCode::AddressOutOfRange, "position not laid out");
  }

  friend bool operator==(const PartitionScheme& a, const PartitionScheme& b) {
    if (a.is_discrete() && b.is_discrete()) return true;
    if (a.is_indiscrete() && b.is_indiscrete()) return true;
    return a.groups_ == b.groups_;
  }

  std::string describe() const {
    if (groups_.size() == 1 && groups_[0] == BlockGroup{1, std::nullopt}) return "discrete";
    if (is_indiscrete()) return "indiscrete";
    std::string s = "blocks[";
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      if (g) s += ", ";
      s += "(" + to_string(groups_[g].size) + " x " + to_string(groups_[g].count) + ")";
    }
    return s + "]";
  }

 private:
  static long cantor(long rank, long offset) {
    long d = rank + offset - 1;
    return (d - 1) * d / 2 + rank;
  }

  template <class Pred>
  Cardinal sum_counts(Pred pred) const {
    long total = 0;
    for (const auto& g : groups_) {
      if (!pred(g)) continue;
      if (!g.count) return std::nullopt;
      total += *g.count;
    }
    return total;
  }

  long inf_rank_to_id(long rank) const {
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      if (groups_[g].size) continue;
      long first = group_inf_rank_[g];
      if (!groups_[g].count || rank < first + *groups_[g].count) return group_first_id_[g] + rank - first;
    }
    fail(ErrorCode::AddressOutOfRange, "infinite block rank out of range");
  }

  void build() {
    require(!groups_.empty(), ErrorCode::InvalidArgument, "a blocks partition needs at least one group");
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const auto& grp = groups_[g];
      require(!grp.size || *grp.size >= 1, ErrorCode::InvalidArgument, "block size must be positive");
      require(!grp.count || *grp.count >= 1, ErrorCode::InvalidArgument, "block count must be positive");
      require(grp.count || g + 1 == groups_.size(), ErrorCode::InvalidArgument,
              "only the last block group may have infinitely many blocks");
    }
    group_first_id_.assign(groups_.size(), 0);
    group_prefix_start_.assign(groups_.size(), 0);
    group_inf_rank_.assign(groups_.size(), 0);
    long id = 1, pos = 1, rank = 1;
    bool any_infinite = false;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const auto& grp = groups_[g];
      group_first_id_[g] = id;
      if (grp.count) id += *grp.count;
      if (grp.size && grp.count) {
        group_prefix_start_[g] = pos;
        pos += *grp.size * *grp.count;
      }
      if (!grp.size) {
        group_inf_rank_[g] = rank;
        if (grp.count) {
          rank += *grp.count;
          k0_ += *grp.count;
        }
      }
      any_infinite = any_infinite || !grp.size || !grp.count;
    }
    require(any_infinite, ErrorCode::InvalidArgument, "the index set must be infinite (add an infinite block or group)");
    prefix_len_ = pos - 1;
    const auto& last = groups_.back();
    bool family = !last.count;
    family_group_ = groups_.size() - 1;
    if (family && !last.size) {
      mode_ = Mode::Cantor;
    } else if (family) {
      family_size_ = *last.size;
      mode_ = k0_ == 0 ? Mode::Contiguous : Mode::RoundRobinWithFamily;
    } else {
      mode_ = Mode::RoundRobin;
    }
  }

  std::vector<BlockGroup> groups_;
  std::vector<long> group_first_id_, group_prefix_start_, group_inf_rank_;
  long prefix_len_ = 0;
  long k0_ = 0;
  long family_size_ = 0;
  std::size_t family_group_ = 0;
  Mode mode_ = Mode::Contiguous;
};

/// Result of a refinement query: whether every fine block lies inside one
/// coarse block, and the containment map fine block id -> coarse block id.
class Refinement {
 public:
  Refinement(PartitionScheme fine, PartitionScheme coarse, bool holds)
      : fine_(std::move(fine)), coarse_(std::move(coarse)), holds_(holds) {}

  bool holds() const { return holds_; }
  explicit operator bool() const { return holds_; }

  long coarse_of(long fine_id) const {
    require(holds_, ErrorCode::NotARefinement, "no containment map: not a refinement");
    return coarse_.locate(fine_.position(fine_id, 1)).block.id;
  }

  const PartitionScheme& fine() const { return fine_; }
  const PartitionScheme& coarse() const { return coarse_; }

 private:
  PartitionScheme fine_, coarse_;
  bool holds_;
};

inline constexpr long kRefinementWindowLimit = 5'000'000;

/// Decides whether `fine` refines `coarse` (every fine block is contained in
/// a coarse block). Beyond the fast paths, the block structures of both
/// schemes are shift-periodic past their prefixes, so checking a window of
/// two common periods past the longer prefix is exact.
inline Refinement refines(const PartitionScheme& fine, const PartitionScheme& coarse) {
  if (fine.is_discrete() || coarse.is_indiscrete() || fine == coarse) return {fine, coarse, true};
  if (coarse.is_discrete() || fine.is_indiscrete()) return {fine, coarse, false};
  using Mode = PartitionScheme::Mode;
  if (fine.mode() == Mode::Cantor || coarse.mode() == Mode::Cantor) {
    fail(ErrorCode::IncomparableLayout, "refinement between " + fine.describe() + " and " + coarse.describe() +
                                            " is not decidable under the Cantor-paired layout");
  }
  long T = std::max(fine.prefix_length(), coarse.prefix_length());
  long L = std::lcm(fine.period(), coarse.period());
  long W = T + 2 * L + fine.max_finite_size();
  require(W <= kRefinementWindowLimit, ErrorCode::IncomparableLayout, "refinement window too large");
  std::map<long, long> seen;
  auto check = [&](long pos) {
    Address f = fine.locate(pos);
    long c = coarse.locate(pos).block.id;
    auto [it, inserted] = seen.emplace(f.block.id, c);
    return inserted || it->second == c;
  };
  for (long pos = 1; pos <= W; ++pos) {
    if (!check(pos)) return {fine, coarse, false};
  }
  // finish finite fine blocks that straddle the window edge
  for (const auto& [id, c] : std::map<long, long>(seen)) {
    BlockRef b = fine.block(id);
    if (!b.size) continue;
    for (long o = 1; o <= *b.size; ++o)
      if (!check(fine.position(id, o))) return {fine, coarse, false};
  }
  return {fine, coarse, true};
}

}  // namespace alspach

#endif  // ALSPACH_PARTITION_HPP
