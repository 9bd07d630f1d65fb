#ifndef ALSPACH_CLASSIFIER_HPP
#define ALSPACH_CLASSIFIER_HPP

// Rule-based isomorphism classification of partition-and-weight spaces.
//
// Every route splits into two steps: symbolic quantities are computed and
// recorded in the evidence, then a pure decision function maps those
// quantities to a class. `replay` re-runs the decision functions on the
// recorded quantities alone.

#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "isomorphism_class.hpp"
#include "norm.hpp"
#include "partition.hpp"
#include "profile.hpp"
#include "rational.hpp"
#include "space.hpp"
#include "weight_family.hpp"

namespace alspach {

/// Kind of an infinite run of weights: bounded below, decaying with a
/// convergent q-power sum, or decaying with a divergent one.
enum class PieceKind { BoundedBelow, Summable, Divergent };

inline const char* to_string(PieceKind k) {
  switch (k) {
    case PieceKind::BoundedBelow: return "bounded-below";
    case PieceKind::Summable: return "summable";
    case PieceKind::Divergent: return "divergent";
  }
  return "?";
}

inline bool positive(const Real& x) { return compare(x, Real(Rational(0))) > 0; }

// ---------------------------------------------------------------------------
// Decision functions (pure in the recorded quantities)

/// Class of the space max(l_p, weighted l2) over an infinite weight set.
inline ClassOutcome weight_set_decision(const std::vector<PieceKind>& pieces) {
  bool b = false, s = false, x = false;
  for (PieceKind k : pieces) {
    b = b || k == PieceKind::BoundedBelow;
    s = s || k == PieceKind::Summable;
    x = x || k == PieceKind::Divergent;
  }
  if (x) return ClassOutcome::of(IsoClass::XP);
  if (b && s) return ClassOutcome::of(IsoClass::Ell2PlusEllP);
  if (b) return ClassOutcome::of(IsoClass::Ell2);
  if (s) return ClassOutcome::of(IsoClass::EllP);
  return ClassOutcome::unclassified("weight set has no infinite part");
}

/// l_p-sum of infinitely many infinite blocks sharing a template whose block
/// class is `block`, scaled per block by factors with the given infimum.
inline ClassOutcome block_family_decision(IsoClass block, bool scale_inf_positive) {
  switch (block) {
    case IsoClass::EllP: return ClassOutcome::of(IsoClass::EllP);
    case IsoClass::Ell2:
    case IsoClass::Ell2PlusEllP: return ClassOutcome::of(scale_inf_positive ? IsoClass::SumEll2 : IsoClass::BP);
    case IsoClass::XP:
      if (scale_inf_positive) return ClassOutcome::of(IsoClass::SumXP);
      return ClassOutcome::unclassified("X_p blocks with per-block scales tending to 0 are not uniformly equivalent");
    default: break;
  }
  return ClassOutcome::unclassified(std::string("unexpected block class ") + to_string(block));
}

/// One regular pair: the summands and whether infinitely many finite blocks
/// contribute an l_p summand.
inline ClassOutcome one_regular_decision(const std::vector<ClassOutcome>& block_parts, bool finite_blocks_infinite) {
  std::vector<IsoClass> parts;
  for (const auto& b : block_parts) {
    if (!b.classified()) return b;
    parts.push_back(b.cls);
  }
  if (finite_blocks_infinite) parts.push_back(IsoClass::EllP);
  if (parts.empty()) return ClassOutcome::unclassified("no infinite-dimensional summand");
  return ClassOutcome::of(simplify_sum(parts));
}

struct NestedQuantities {
  bool delta_positive = false;   ///< inf of coarse weights > 0
  bool gamma_positive = false;   ///< inf of fine weights > 0
  Cardinal coarse_blocks;
  Cardinal coarse_infinite_blocks;
  Cardinal fine_blocks;
  bool fine_all_finite = false;
  std::optional<bool> sup_cm_finite;  ///< computed only when needed
};

struct NestedDecision {
  ClassOutcome outcome;
  std::string rule;
};

inline NestedDecision nested_decision(const NestedQuantities& n) {
  if (n.delta_positive) {
    if (n.coarse_blocks) return {ClassOutcome::of(IsoClass::Ell2), "nested.coarse-bounded-below.finitely-many-coarse-blocks"};
    if (n.coarse_infinite_blocks && *n.coarse_infinite_blocks == 0)
      return {ClassOutcome::of(IsoClass::EllP), "nested.coarse-bounded-below.all-coarse-blocks-finite"};
    if (n.coarse_infinite_blocks)
      return {ClassOutcome::of(IsoClass::Ell2PlusEllP), "nested.coarse-bounded-below.finitely-many-infinite-coarse-blocks"};
    return {ClassOutcome::of(IsoClass::SumEll2), "nested.coarse-bounded-below.infinitely-many-infinite-coarse-blocks"};
  }
  if (n.gamma_positive) {
    if (n.fine_blocks) return {ClassOutcome::of(IsoClass::Ell2), "nested.fine-bounded-below.finitely-many-fine-blocks"};
    if (!n.fine_all_finite) {
      return {ClassOutcome::unclassified("fine partition has infinitely many blocks, some infinite"),
              "nested.fine-bounded-below"};
    }
    if (!n.sup_cm_finite) return {ClassOutcome::unclassified("coarse block sums C_M undetermined"), "nested.fine-bounded-below"};
    if (*n.sup_cm_finite) return {ClassOutcome::of(IsoClass::EllP), "nested.fine-bounded-below.bounded-block-sums"};
    return {ClassOutcome::unclassified("sup_M C_M is infinite"), "nested.fine-bounded-below"};
  }
  return {ClassOutcome::unclassified("neither weight infimum is positive"), "nested"};
}

// ---------------------------------------------------------------------------
// Evidence

struct RuleApplication {
  std::string id;
  std::string detail;
};

struct BlockEvidence {
  std::string label;
  Cardinal count = 1;               ///< number of blocks described by this entry
  IsoClass cls = IsoClass::Unclassified;  ///< class of each single block
  std::vector<PieceKind> pieces;
  std::optional<Real> delta;        ///< infimum of the block weights (per template for families)
  bool family = false;              ///< infinitely many infinite blocks
  std::optional<Real> scale_inf;    ///< inf over the family of the per-block scale
  std::string reason;               ///< set when the entry could not be classified

  ClassOutcome part() const {
    if (!reason.empty()) return ClassOutcome::unclassified(reason);
    if (family) return block_family_decision(cls, scale_inf && positive(*scale_inf));
    return ClassOutcome::of(cls);
  }
};

struct ReductionRecord {
  std::size_t fine = 0, coarse = 0;  ///< pair indices in the normalized spec
  bool reduced = false;
  bool finite = false;
  std::optional<Real> constant;
  std::string reason;
  std::optional<IsoClass> reduced_class;
};

struct ClassificationEvidence {
  std::string route;
  std::vector<RuleApplication> rules;
  Rational p = 4, q = 4;
  std::optional<Real> delta, gamma;
  std::optional<Cardinal> infinite_blocks, finite_blocks;  ///< |I| and |B \ I|
  std::vector<PieceKind> pieces;
  std::optional<bool> power_sum_finite;
  std::optional<Real> power_sum;
  std::vector<BlockEvidence> blocks;
  std::optional<NestedQuantities> nested;
  std::optional<std::pair<std::size_t, std::size_t>> nested_pairs;  ///< (fine, coarse)
  std::vector<std::pair<std::string, Real>> cm_values;
  std::optional<Real> sup_cm;
  std::optional<Real> sandwich_lower;
  std::vector<ReductionRecord> reductions;
  std::vector<ClassificationEvidence> sub;
  IsoClass result = IsoClass::Unclassified;
  std::string reason;

  void apply(std::string id, std::string detail = {}) { rules.push_back({std::move(id), std::move(detail)}); }
};

struct ClassificationResult {
  ClassOutcome outcome;
  ClassificationEvidence evidence;

  IsoClass cls() const { return outcome.cls; }
};

namespace detail {

inline ClassificationResult finish(ClassificationEvidence ev, ClassOutcome out) {
  ev.result = out.cls;
  ev.reason = out.reason;
  return {std::move(out), std::move(ev)};
}

inline std::string cardinal_string(const Cardinal& c) { return c ? std::to_string(*c) : "inf"; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Weight-set queries

/// Kinds of the infinite runs of a profile (empty for finite profiles).
inline std::vector<PieceKind> piece_kinds(const Profile& p, const Rational& q) {
  std::vector<PieceKind> out;
  if (!p.infinite()) return out;
  for (const auto& t : p.tails) {
    switch (t.limit_kind()) {
      case GTerm::Limit::Positive: out.push_back(PieceKind::BoundedBelow); break;
      case GTerm::Limit::Zero:
        out.push_back(t.power(q).sum_converges() ? PieceKind::Summable : PieceKind::Divergent);
        break;
      case GTerm::Limit::Infinite: fail(ErrorCode::InvalidArgument, "weights are unbounded");
    }
  }
  return out;
}

/// Kinds of the infinite runs of outer(i) * inner(o) over all index pairs.
inline std::vector<PieceKind> atom_kinds(const WeightAtom& atom, const Rational& q) {
  auto ok = piece_kinds(atom.outer, q);
  auto ik = piece_kinds(atom.inner, q);
  if (!atom.outer.infinite()) return ik;
  if (!atom.inner.infinite()) return ok;
  std::vector<PieceKind> out;
  for (PieceKind a : ok) {
    for (PieceKind b : ik) {
      if (a == PieceKind::BoundedBelow && b == PieceKind::BoundedBelow) {
        out.push_back(PieceKind::BoundedBelow);
      } else if (a == PieceKind::Summable && b == PieceKind::Summable) {
        out.push_back(PieceKind::Summable);
      } else {
        // a decaying factor repeated over infinitely many indices of the other
        out.push_back(PieceKind::Divergent);
      }
    }
  }
  return out;
}

struct WeightSetSummary {
  std::vector<PieceKind> pieces;
  Real infimum;
  bool power_sum_finite = true;
  Real power_sum;
  ClassOutcome outcome;
};

inline WeightSetSummary summarize_weights(const std::vector<WeightAtom>& atoms, const Rational& q) {
  WeightSetSummary s;
  std::optional<Real> inf;
  Real total(Rational(0));
  for (const auto& a : atoms) {
    auto k = atom_kinds(a, q);
    s.pieces.insert(s.pieces.end(), k.begin(), k.end());
    Real v = profile_inf(a.outer).value * profile_inf(a.inner).value;
    if (!inf || compare(v, *inf) < 0) inf = v;
    PowerSum po = profile_power_sum(a.outer, q), pi = profile_power_sum(a.inner, q);
    if (!po.finite || !pi.finite) {
      s.power_sum_finite = false;
    } else if (s.power_sum_finite) {
      total = total + po.value * pi.value;
    }
  }
  s.infimum = *inf;
  s.power_sum = s.power_sum_finite ? total : Real(std::numeric_limits<double>::infinity());
  s.outcome = weight_set_decision(s.pieces);
  return s;
}

inline WeightAtom single_atom(const Profile& weights) { return {Profile::constant(Real(Rational(1)), 1), weights}; }

/// Class of max(l_p, weighted l2) on one infinite block carrying weights w.
inline IsoClass classify_block(const WeightFamily& w, const Rational& p) {
  require(p > 2, ErrorCode::InvalidArgument, "p must exceed 2");
  Rational q = 2 * p / (p - 2);
  return summarize_weights({single_atom(restrict_family(w, std::nullopt))}, q).outcome.cls;
}

// ---------------------------------------------------------------------------
// One regular pair

namespace detail {

inline BlockEvidence block_entry(std::string label, Cardinal count, const Profile& weights, const Rational& q) {
  WeightSetSummary s = summarize_weights({single_atom(weights)}, q);
  BlockEvidence b;
  b.label = std::move(label);
  b.count = count;
  b.pieces = s.pieces;
  b.delta = s.infimum;
  if (s.outcome.classified()) {
    b.cls = s.outcome.cls;
  } else {
    b.reason = s.outcome.reason;
  }
  return b;
}

inline bool weights_follow_partition(const PartitionWeightPair& pr) {
  return pr.uniform_value().has_value() || same_layout(pr.frame(), pr.partition());
}

/// Template profile and scale profile of group g (uniform pairs: constant template).
inline std::pair<Profile, Profile> group_weights(const PartitionWeightPair& pr, std::size_t g) {
  const BlockGroup& grp = pr.partition().groups()[g];
  if (auto c = pr.uniform_value()) {
    return {Profile::constant(Real(*c), grp.size), Profile::constant(Real(Rational(1)), grp.count)};
  }
  const BlockWeights& bw = pr.weights_for_group(g);
  Profile scale = bw.scale ? restrict_family(*bw.scale, grp.count) : Profile::constant(Real(Rational(1)), grp.count);
  return {restrict_family(bw.tmpl, grp.size), std::move(scale)};
}

inline std::vector<BlockEvidence> infinite_block_entries(const PartitionWeightPair& pr, const Rational& q) {
  const PartitionScheme& P = pr.partition();
  std::vector<BlockEvidence> out;
  for (std::size_t g = 0; g < P.groups().size(); ++g) {
    const BlockGroup& grp = P.groups()[g];
    if (grp.size) continue;
    std::string label = "group " + std::to_string(g + 1);
    if (weights_follow_partition(pr)) {
      auto [tmpl, scale] = group_weights(pr, g);
      BlockEvidence b = block_entry(label, grp.count, tmpl, q);
      if (!grp.count) {
        b.family = true;
        b.scale_inf = profile_inf(scale).value;
      } else if (b.delta) {
        b.delta = *b.delta * profile_inf(scale).value;
      }
      out.push_back(std::move(b));
      continue;
    }
    if (!grp.count || *grp.count > kEnumerateBlocksLimit) {
      BlockEvidence b;
      b.label = label;
      b.count = grp.count;
      b.family = !grp.count;
      b.reason = "weights of infinitely many infinite blocks are addressed in another partition's frame";
      out.push_back(std::move(b));
      continue;
    }
    for (long i = 0; i < *grp.count; ++i) {
      long id = P.first_block_id(g) + i;
      try {
        out.push_back(block_entry("block " + std::to_string(id), 1, weight_profile(pr, P, id), q));
      } catch (const Error& e) {
        BlockEvidence b;
        b.label = "block " + std::to_string(id);
        b.reason = e.what();
        out.push_back(std::move(b));
      }
    }
  }
  return out;
}

inline ClassOutcome one_regular_from(const std::vector<BlockEvidence>& blocks, bool finite_blocks_infinite) {
  std::vector<ClassOutcome> parts;
  for (const auto& b : blocks) parts.push_back(b.part());
  return one_regular_decision(parts, finite_blocks_infinite);
}

}  // namespace detail

/// A single regular pair (plus the trivial pair): l_p-sum over the infinite
/// blocks and the finite-block part.
inline ClassificationResult classify_one_regular(const SpaceSpec& spec) {
  auto nt = spec.nontrivial();
  require(nt.size() == 1, ErrorCode::InvalidArgument, "expected exactly one non-trivial pair");
  const PartitionWeightPair& pr = spec.pair(nt[0]);
  require(pr.partition().is_regular(), ErrorCode::InvalidArgument, "the non-trivial pair is not regular");
  ClassificationEvidence ev;
  ev.p = spec.p();
  ev.q = spec.q();
  ev.route = "one-regular";
  const PartitionScheme& P = pr.partition();
  ev.infinite_blocks = P.infinite_block_count();
  ev.finite_blocks = P.finite_block_count();
  ev.gamma = weights_infimum(pr);
  ev.blocks = detail::infinite_block_entries(pr, ev.q);
  bool fin_inf = !*ev.finite_blocks;
  ev.apply("one-regular.decompose", "|I| = " + detail::cardinal_string(*ev.infinite_blocks) +
                                        ", |B \\ I| = " + detail::cardinal_string(*ev.finite_blocks));
  if (fin_inf) {
    ev.apply("one-regular.finite-blocks-lp", "infinitely many finite blocks contribute l_p");
  } else {
    ev.apply("one-regular.finite-blocks-absorbed", "finitely many finite blocks are absorbed");
  }
  for (const auto& b : ev.blocks) {
    if (b.family) ev.apply("one-regular.block-family", b.label + ": " + to_string(b.cls) + " blocks");
  }
  ClassOutcome out = detail::one_regular_from(ev.blocks, fin_inf);
  ev.apply("direct-sum", out.classified() ? to_string(out.cls) : out.reason);
  return detail::finish(std::move(ev), out);
}

/// A single indiscrete pair: the weight set decides.
inline ClassificationResult classify_indiscrete(const SpaceSpec& spec) {
  auto nt = spec.nontrivial();
  require(nt.size() == 1, ErrorCode::InvalidArgument, "expected exactly one non-trivial pair");
  const PartitionWeightPair& pr = spec.pair(nt[0]);
  ClassificationEvidence ev;
  ev.p = spec.p();
  ev.q = spec.q();
  ev.route = "indiscrete.weights";
  WeightSetSummary s = summarize_weights(weight_atoms(pr), ev.q);
  ev.delta = s.infimum;
  ev.pieces = s.pieces;
  ev.power_sum_finite = s.power_sum_finite;
  ev.power_sum = s.power_sum;
  ev.apply("indiscrete.weights", "weight runs classified against q = " + to_string(ev.q));
  return detail::finish(std::move(ev), s.outcome);
}


// ---------------------------------------------------------------------------
// Trivial + regular + indiscrete

namespace detail {

/// Indices t >= head + 1 whose residue (t - 1 - head) mod period is flagged:
/// the run of indiscrete weights with a convergent q-power sum.
struct SmallPart {
  long head = 0;
  long period = 1;
  std::vector<bool> residues;

  bool contains(long t) const {
    if (t - 1 < head) return false;
    return residues[static_cast<std::size_t>((t - 1 - head) % period)];
  }
};

/// The regular pair restricted to the small part of the index set.
inline ClassificationResult classify_restricted(const PartitionWeightPair& pr, const SmallPart& S, const Rational& p,
                                                const Rational& q) {
  ClassificationEvidence ev;
  ev.p = p;
  ev.q = q;
  ev.route = "one-regular.restricted";
  const PartitionScheme& P = pr.partition();
  if (P.mode() == PartitionScheme::Mode::Cantor) {
    return finish(std::move(ev), ClassOutcome::unclassified("restriction of a Cantor-paired block family"));
  }
  if (!weights_follow_partition(pr)) {
    return finish(std::move(ev), ClassOutcome::unclassified("regular weights addressed in another partition's frame"));
  }
  long infinite_hits = 0;
  for (std::size_t g = 0; g < P.groups().size(); ++g) {
    const BlockGroup& grp = P.groups()[g];
    if (grp.size) continue;
    if (*grp.count > kEnumerateBlocksLimit) {
      return finish(std::move(ev), ClassOutcome::unclassified("too many infinite blocks to restrict"));
    }
    auto [tmpl_unused, scale] = group_weights(pr, g);
    for (long i = 1; i <= *grp.count; ++i) {
      long id = P.first_block_id(g) + i - 1;
      BlockSpan sp = P.span(id);
      long k0 = std::max(0L, (S.head + 1 - sp.start + sp.stride - 1) / sp.stride);
      long step = S.period / std::gcd(sp.stride, S.period);
      std::vector<WeightAtom> atoms;
      for (long j = 0; j < step; ++j) {
        long k = k0 + j;
        if (!S.contains(sp.start + sp.stride * k)) continue;
        Profile w = pr.uniform_value() ? Profile::constant(Real(*pr.uniform_value()), std::nullopt)
                                       : restrict_family(pr.weights_for_group(g).tmpl, k + 1, step, std::nullopt);
        atoms.push_back(single_atom(w.scaled(scale.at(i - 1))));
      }
      if (atoms.empty()) continue;
      ++infinite_hits;
      WeightSetSummary s = summarize_weights(atoms, q);
      BlockEvidence b;
      b.label = "block " + std::to_string(id) + " (small part)";
      b.pieces = s.pieces;
      b.delta = s.infimum;
      if (s.outcome.classified()) {
        b.cls = s.outcome.cls;
      } else {
        b.reason = s.outcome.reason;
      }
      ev.blocks.push_back(std::move(b));
    }
  }
  // does the trailing family of finite blocks meet the small part infinitely often?
  bool finite_infinite = false;
  const BlockGroup& last = P.groups().back();
  if (last.size && !last.count) {
    long start = std::max(P.prefix_length(), S.head) + 1;
    long span = 2 * std::lcm(std::max(1L, P.period()), S.period) + P.max_finite_size();
    for (long t = start; t < start + span && !finite_infinite; ++t) {
      finite_infinite = S.contains(t) && P.locate(t).block.group == P.groups().size() - 1;
    }
  }
  ev.infinite_blocks = Cardinal(infinite_hits);
  ev.finite_blocks = finite_infinite ? Cardinal() : Cardinal(0);
  ev.apply("one-regular.restricted", "regular blocks intersected with the summable part of the indiscrete weights");
  return finish(std::move(ev), one_regular_from(ev.blocks, finite_infinite));
}

inline ClassOutcome admissible_decision(bool delta_positive, bool power_sum_finite, const std::vector<PieceKind>& pieces,
                                        const ClassOutcome& sub) {
  if (delta_positive) return ClassOutcome::of(IsoClass::Ell2);
  if (power_sum_finite) return sub;
  bool b = false, s = false;
  for (PieceKind k : pieces) {
    if (k == PieceKind::Divergent) return ClassOutcome::unclassified("indiscrete weights have divergent restricted power sums");
    b = b || k == PieceKind::BoundedBelow;
    s = s || k == PieceKind::Summable;
  }
  if (!(b && s)) return ClassOutcome::unclassified("indiscrete weights fit no admissible case");
  if (!sub.classified()) return sub;
  return ClassOutcome::of(simplify_sum({IsoClass::Ell2, sub.cls}));
}

}  // namespace detail

/// Trivial pair, one regular pair and one indiscrete pair.
inline ClassificationResult classify_admissible(const SpaceSpec& spec) {
  Admissibility adm = is_admissible(spec);
  require(adm.admissible && spec.nontrivial().size() == 2, ErrorCode::InvalidArgument,
          "expected the trivial pair, one regular pair and one indiscrete pair");
  ClassificationEvidence ev;
  ev.p = spec.p();
  ev.q = spec.q();
  ev.route = "admissible";
  const PartitionWeightPair& w2 = spec.pair(*adm.indiscrete);
  WeightSetSummary s = summarize_weights(weight_atoms(w2), ev.q);
  ev.delta = s.infimum;
  ev.pieces = s.pieces;
  ev.power_sum_finite = s.power_sum_finite;
  ev.power_sum = s.power_sum;
  ClassOutcome sub = ClassOutcome::unclassified("not needed");
  if (positive(s.infimum)) {
    ev.apply("admissible.bounded-below", "delta = " + to_string(s.infimum) + " > 0");
  } else if (s.power_sum_finite) {
    ev.apply("admissible.summable", "sum w^q = " + to_string(s.power_sum) + " < inf; indiscrete pair dominated");
    ClassificationResult r = classify_one_regular(spec.without(*adm.indiscrete));
    sub = r.outcome;
    ev.sub.push_back(std::move(r.evidence));
  } else {
    ev.apply("admissible.split", "bounded-below part gives l2; the regular pair is restricted to the summable part");
    const WeightAssignment& wa = w2.weights();
    bool own = w2.own_frame() || same_layout(w2.frame(), w2.partition());
    if (own && !wa.base.scale) {
      Profile w = restrict_family(w2.weights_for_group(0).tmpl, std::nullopt);
      detail::SmallPart S;
      S.head = w.head_size();
      S.period = std::max(1L, w.period());
      for (const auto& t : w.tails) {
        S.residues.push_back(t.limit_kind() == GTerm::Limit::Zero && t.power(ev.q).sum_converges());
      }
      ClassificationResult r = detail::classify_restricted(spec.pair(*adm.regular), S, ev.p, ev.q);
      sub = r.outcome;
      ev.sub.push_back(std::move(r.evidence));
    } else {
      sub = ClassOutcome::unclassified("split of indiscrete weights addressed in another partition's frame");
    }
  }
  ClassOutcome out = detail::admissible_decision(positive(s.infimum), s.power_sum_finite, s.pieces, sub);
  return detail::finish(std::move(ev), out);
}

// ---------------------------------------------------------------------------
// Two comparable pairs

struct ReductionOutcome {
  ReductionRecord record;
  std::optional<SpaceSpec> reduced;
};

/// Drops the coarse pair when the refinement majorant is finite.
inline ReductionOutcome reduce_by_refinement(const SpaceSpec& spec, std::size_t fine, std::size_t coarse) {
  ReductionOutcome out;
  out.record.fine = fine;
  out.record.coarse = coarse;
  RefinementMajorant m = refinement_majorant(spec.pair(fine), spec.pair(coarse), spec.p());
  out.record.finite = m.finite;
  if (!m.finite) {
    out.record.reason = "sup over coarse blocks of sum W_N^q is infinite";
    return out;
  }
  out.record.constant = m.constant;
  out.record.reduced = true;
  out.reduced = spec.without(coarse);
  return out;
}

namespace detail {

inline ReductionOutcome try_reduce(const SpaceSpec& spec, std::size_t fine, std::size_t coarse) {
  try {
    return reduce_by_refinement(spec, fine, coarse);
  } catch (const Error& e) {
    ReductionOutcome out;
    out.record.fine = fine;
    out.record.coarse = coarse;
    out.record.reason = e.what();
    return out;
  }
}

struct CoarseSums {
  std::vector<std::pair<std::string, Real>> values;
  Real sup = Real(Rational(0));
  bool finite = true;
};

/// C_M = sum_{n in M} w_n^q for the coarse blocks M, and their supremum.
inline CoarseSums coarse_block_sums(const PartitionWeightPair& pr, const Rational& q) {
  const PartitionScheme& P = pr.partition();
  CoarseSums out;
  auto consider = [&](std::string label, PowerSum s) {
    if (!s.finite) {
      out.finite = false;
      out.values.emplace_back(std::move(label), Real(std::numeric_limits<double>::infinity()));
      return;
    }
    if (compare(s.value, out.sup) > 0) out.sup = s.value;
    out.values.emplace_back(std::move(label), s.value);
  };
  for (std::size_t g = 0; g < P.groups().size(); ++g) {
    const BlockGroup& grp = P.groups()[g];
    if (weights_follow_partition(pr)) {
      auto [tmpl, scale] = group_weights(pr, g);
      PowerSum t = profile_power_sum(tmpl, q);
      if (t.finite) t.value = t.value * pow(profile_sup(scale).value, q);
      consider("group " + std::to_string(g + 1), t);
      continue;
    }
    if (!grp.count || *grp.count > kEnumerateBlocksLimit) {
      fail(ErrorCode::UnsupportedLayout, "coarse weights of infinitely many blocks in another frame");
    }
    for (long i = 0; i < *grp.count; ++i) {
      long id = P.first_block_id(g) + i;
      consider("block " + std::to_string(id), profile_power_sum(weight_profile(pr, P, id), q));
    }
  }
  if (!out.finite) out.sup = Real(std::numeric_limits<double>::infinity());
  return out;
}

}  // namespace detail

/// Two non-trivial pairs, one refining the other with dominating weights.
inline ClassificationResult classify_nested(const SpaceSpec& spec) {
  auto nt = spec.nontrivial();
  require(nt.size() == 2, ErrorCode::InvalidArgument, "expected exactly two non-trivial pairs");
  ClassificationEvidence ev;
  ev.p = spec.p();
  ev.q = spec.q();
  ev.route = "nested";
  std::optional<std::pair<std::size_t, std::size_t>> chosen;
  std::string why;
  for (auto [f, c] : {std::pair{nt[0], nt[1]}, std::pair{nt[1], nt[0]}}) {
    try {
      if (!refines(spec.pair(f).partition(), spec.pair(c).partition())) {
        why += "pair " + std::to_string(f) + " does not refine pair " + std::to_string(c) + "; ";
        continue;
      }
      if (!dominates(spec.pair(f), spec.pair(c))) {
        why += "weights of pair " + std::to_string(f) + " do not dominate pair " + std::to_string(c) + "; ";
        continue;
      }
      chosen = {f, c};
      break;
    } catch (const Error& e) {
      why += std::string(e.what()) + "; ";
    }
  }
  if (!chosen) {
    ev.apply("nested.hypothesis", why);
    return detail::finish(std::move(ev), ClassOutcome::unclassified("no pair refines the other with dominating weights"));
  }
  ev.nested_pairs = chosen;
  const PartitionWeightPair& fine = spec.pair(chosen->first);
  const PartitionWeightPair& coarse = spec.pair(chosen->second);
  ev.delta = weights_infimum(coarse);
  ev.gamma = weights_infimum(fine);
  NestedQuantities n;
  n.delta_positive = positive(*ev.delta);
  n.gamma_positive = positive(*ev.gamma);
  n.coarse_blocks = coarse.partition().block_count();
  n.coarse_infinite_blocks = coarse.partition().infinite_block_count();
  n.fine_blocks = fine.partition().block_count();
  n.fine_all_finite = fine.partition().infinite_block_count() == Cardinal(0);
  ev.apply("nested.hypothesis", "pair " + std::to_string(chosen->first) + " refines pair " +
                                    std::to_string(chosen->second) + " with dominating weights");
  if (!n.delta_positive && n.gamma_positive && !n.fine_blocks && n.fine_all_finite) {
    try {
      detail::CoarseSums cs = detail::coarse_block_sums(coarse, ev.q);
      ev.cm_values = cs.values;
      ev.sup_cm = cs.sup;
      n.sup_cm_finite = cs.finite;
    } catch (const Error& e) {
      ev.apply("nested.block-sums", e.what());
    }
  }
  ev.nested = n;
  NestedDecision d = nested_decision(n);
  if (d.rule == "nested.coarse-bounded-below.finitely-many-coarse-blocks") {
    Rational expo = Rational(1) / ev.p - Rational(1, 2);
    ev.sandwich_lower = *ev.delta * pow(Real(Rational(*n.coarse_blocks)), expo);
  }
  ev.apply(d.rule, d.outcome.classified() ? to_string(d.outcome.cls) : d.outcome.reason);
  return detail::finish(std::move(ev), d.outcome);
}

// ---------------------------------------------------------------------------
// Dispatcher

inline ClassificationResult classify(const SpaceSpec& input) {
  SpaceSpec spec = input.normalized();
  std::vector<PartitionWeightPair> kept;
  std::vector<std::string> dropped;
  for (std::size_t k : spec.nontrivial()) {
    if (spec.pair(k).partition().is_discrete()) {
      dropped.push_back("pair " + std::to_string(k) + " is discrete and dominated by the trivial pair");
    } else {
      kept.push_back(spec.pair(k));
    }
  }
  if (!dropped.empty()) spec = SpaceSpec(spec.p(), kept);
  auto nt = spec.nontrivial();

  std::vector<ReductionOutcome> reductions;
  if (nt.size() >= 2) {
    for (std::size_t f : nt) {
      for (std::size_t c : nt) {
        if (f == c) continue;
        ReductionOutcome r = detail::try_reduce(spec, f, c);
        if (r.reduced) r.record.reduced_class = classify(*r.reduced).cls();
        reductions.push_back(std::move(r));
      }
    }
  }

  ClassificationResult res;
  if (nt.empty()) {
    ClassificationEvidence ev;
    ev.p = spec.p();
    ev.q = spec.q();
    ev.route = "trivial-only";
    ev.apply("trivial-only", "the norm is the l_p norm");
    res = detail::finish(std::move(ev), ClassOutcome::of(IsoClass::EllP));
  } else if (nt.size() == 1) {
    res = spec.pair(nt[0]).partition().is_regular() ? classify_one_regular(spec) : classify_indiscrete(spec);
  } else if (nt.size() == 2 && is_admissible(spec).admissible) {
    res = classify_admissible(spec);
  } else if (nt.size() == 2) {
    res = classify_nested(spec);
  } else {
    ClassificationEvidence ev;
    ev.p = spec.p();
    ev.q = spec.q();
    ev.route = "unsupported";
    res = detail::finish(std::move(ev), ClassOutcome::unclassified("more than the supported pair structure"));
  }

  if (!res.outcome.classified()) {
    for (auto& r : reductions) {
      if (!r.reduced) continue;
      ClassificationResult sub = classify(*r.reduced);
      ClassificationEvidence ev;
      ev.p = spec.p();
      ev.q = spec.q();
      ev.route = "refinement.reduced";
      ev.apply("refinement.primary-route", res.evidence.route + ": " + res.outcome.reason);
      ev.apply("refinement.reduced", "pair " + std::to_string(r.record.coarse) + " removed, C = " +
                                         to_string(*r.record.constant));
      ev.sub.push_back(std::move(sub.evidence));
      res = detail::finish(std::move(ev), sub.outcome);
      break;
    }
  }
  for (auto& r : reductions) res.evidence.reductions.push_back(std::move(r.record));
  for (auto it = dropped.rbegin(); it != dropped.rend(); ++it) {
    res.evidence.rules.insert(res.evidence.rules.begin(), RuleApplication{"dominated-by-trivial", *it});
  }
  return res;
}

/// Re-derives the class from the quantities recorded in the evidence.
inline ClassOutcome replay(const ClassificationEvidence& ev) {
  auto sub = [&]() { return ev.sub.empty() ? ClassOutcome::unclassified("no sub-evidence") : replay(ev.sub.front()); };
  if (ev.route == "trivial-only") return ClassOutcome::of(IsoClass::EllP);
  if (ev.route == "indiscrete.weights") return weight_set_decision(ev.pieces);
  if (ev.route == "one-regular" || ev.route == "one-regular.restricted") {
    if (ev.route == "one-regular.restricted" && !ev.reason.empty() && ev.blocks.empty() && !ev.finite_blocks) {
      return ClassOutcome::unclassified(ev.reason);
    }
    bool fin_inf = ev.finite_blocks && !ev.finite_blocks->has_value();
    return detail::one_regular_from(ev.blocks, fin_inf);
  }
  if (ev.route == "admissible") {
    return detail::admissible_decision(ev.delta && positive(*ev.delta), ev.power_sum_finite.value_or(false), ev.pieces,
                                       sub());
  }
  if (ev.route == "nested") {
    if (!ev.nested) return ClassOutcome::unclassified(ev.reason);
    return nested_decision(*ev.nested).outcome;
  }
  if (ev.route == "refinement.reduced") return sub();
  return ClassOutcome::unclassified(ev.reason);
}

}  // namespace alspach

#endif  // ALSPACH_CLASSIFIER_HPP
