// Decision tables, the fixture corpus, evidence replay and invariances.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <set>

#include "alspach/classifier.hpp"
#include "alspach/io.hpp"

using namespace alspach;
using WF = WeightFamily;
using C = IsoClass;
using PK = PieceKind;
static const Cardinal INF = std::nullopt;

namespace {

struct Fixture {
  std::string file;
  SpecDocument doc;
};

std::vector<Fixture> corpus() {
  std::vector<Fixture> out;
  for (const auto& e : std::filesystem::directory_iterator(ALSPACH_FIXTURE_DIR)) {
    if (e.path().extension() != ".json") continue;
    out.push_back({e.path().stem().string(), load_spec(e.path().string())});
  }
  std::sort(out.begin(), out.end(), [](const Fixture& a, const Fixture& b) { return a.file < b.file; });
  return out;
}

const Fixture& fixture(const std::string& name) {
  static const std::vector<Fixture> all = corpus();
  for (const auto& f : all)
    if (f.file == name) return f;
  throw std::runtime_error("no fixture " + name);
}

bool mentions(const ClassificationEvidence& ev, const std::string& branch) {
  auto hit = [&](const std::string& id) { return id == branch || id.rfind(branch + ".", 0) == 0; };
  if (hit(ev.route)) return true;
  for (const auto& r : ev.rules)
    if (hit(r.id)) return true;
  for (const auto& s : ev.sub)
    if (mentions(s, branch)) return true;
  return false;
}

WF scaled(const WF& f, const Rational& c) {
  switch (f.kind()) {
    case WeightKind::Constant: return WF::constant(c * f.scale());
    case WeightKind::Geometric: return WF::geometric(c * f.scale(), f.ratio());
    case WeightKind::Power: return WF::power(c * f.scale(), f.exponent());
    case WeightKind::Explicit: {
      std::vector<Rational> v;
      for (const auto& x : f.values()) v.push_back(c * x);
      return WF::explicit_then(std::move(v), scaled(f.tail(), c));
    }
    case WeightKind::Interleave: return WF::interleave(scaled(f.odd(), c), scaled(f.even(), c));
  }
  return f;
}

SpaceSpec scale_weights(const SpaceSpec& s, const Rational& c) {
  std::vector<PartitionWeightPair> pairs;
  for (std::size_t k : s.nontrivial()) {
    const auto& pr = s.pair(k);
    WeightAssignment wa = pr.weights();
    wa.base.tmpl = scaled(wa.base.tmpl, c);
    for (auto& [g, bw] : wa.overrides) bw.tmpl = scaled(bw.tmpl, c);
    pairs.emplace_back(pr.partition(), wa);
  }
  return SpaceSpec(s.p(), pairs);
}

}  // namespace

TEST(Decision, WeightSetTable) {
  EXPECT_EQ(weight_set_decision({PK::BoundedBelow}).cls, C::Ell2);
  EXPECT_EQ(weight_set_decision({PK::Summable}).cls, C::EllP);
  EXPECT_EQ(weight_set_decision({PK::Summable, PK::BoundedBelow}).cls, C::Ell2PlusEllP);
  EXPECT_EQ(weight_set_decision({PK::Divergent}).cls, C::XP);
  EXPECT_EQ(weight_set_decision({PK::BoundedBelow, PK::Divergent, PK::Summable}).cls, C::XP);
  EXPECT_FALSE(weight_set_decision({}).classified());
}

TEST(Decision, BlockFamilyTable) {
  EXPECT_EQ(block_family_decision(C::EllP, true).cls, C::EllP);
  EXPECT_EQ(block_family_decision(C::EllP, false).cls, C::EllP);
  EXPECT_EQ(block_family_decision(C::Ell2, true).cls, C::SumEll2);
  EXPECT_EQ(block_family_decision(C::Ell2, false).cls, C::BP);
  EXPECT_EQ(block_family_decision(C::Ell2PlusEllP, true).cls, C::SumEll2);
  EXPECT_EQ(block_family_decision(C::Ell2PlusEllP, false).cls, C::BP);
  EXPECT_EQ(block_family_decision(C::XP, true).cls, C::SumXP);
  EXPECT_FALSE(block_family_decision(C::XP, false).classified());
}

TEST(Decision, OneRegularAddsLpForInfinitelyManyFiniteBlocks) {
  EXPECT_EQ(one_regular_decision({ClassOutcome::of(C::Ell2)}, true).cls, C::Ell2PlusEllP);
  EXPECT_EQ(one_regular_decision({ClassOutcome::of(C::Ell2)}, false).cls, C::Ell2);
  EXPECT_EQ(one_regular_decision({}, true).cls, C::EllP);
  EXPECT_FALSE(one_regular_decision({}, false).classified());
  EXPECT_FALSE(one_regular_decision({ClassOutcome::unclassified("x"), ClassOutcome::of(C::EllP)}, true).classified());
}

TEST(Decision, NestedBranches) {
  NestedQuantities n;
  n.delta_positive = true;
  n.coarse_blocks = 3;
  n.coarse_infinite_blocks = 3;
  EXPECT_EQ(nested_decision(n).outcome.cls, C::Ell2);
  n.coarse_blocks = INF;
  n.coarse_infinite_blocks = 0;
  EXPECT_EQ(nested_decision(n).outcome.cls, C::EllP);
  n.coarse_infinite_blocks = 2;
  EXPECT_EQ(nested_decision(n).outcome.cls, C::Ell2PlusEllP);
  n.coarse_infinite_blocks = INF;
  EXPECT_EQ(nested_decision(n).outcome.cls, C::SumEll2);

  NestedQuantities m;
  m.gamma_positive = true;
  m.fine_blocks = 4;
  EXPECT_EQ(nested_decision(m).outcome.cls, C::Ell2);
  m.fine_blocks = INF;
  m.fine_all_finite = true;
  EXPECT_FALSE(nested_decision(m).outcome.classified());  // C_M not computed
  m.sup_cm_finite = true;
  EXPECT_EQ(nested_decision(m).outcome.cls, C::EllP);
  m.sup_cm_finite = false;
  EXPECT_FALSE(nested_decision(m).outcome.classified());
  EXPECT_FALSE(nested_decision(NestedQuantities{}).outcome.classified());
}

TEST(PieceKinds, FromWeightProfiles) {
  auto kinds = [](WF f) { return piece_kinds(restrict_family(f, std::nullopt), 4); };
  EXPECT_EQ(kinds(WF::constant(Rational(1, 2))), std::vector<PK>{PK::BoundedBelow});
  EXPECT_EQ(kinds(WF::power(1, 1)), std::vector<PK>{PK::Summable});
  EXPECT_EQ(kinds(WF::power(1, Rational(1, 4))), std::vector<PK>{PK::Divergent});
  EXPECT_EQ(kinds(WF::geometric(1, Rational(1, 2))), std::vector<PK>{PK::Summable});
  auto mixed = kinds(WF::interleave(WF::constant(1), WF::geometric(1, Rational(1, 2))));
  EXPECT_NE(std::find(mixed.begin(), mixed.end(), PK::BoundedBelow), mixed.end());
  EXPECT_NE(std::find(mixed.begin(), mixed.end(), PK::Summable), mixed.end());
}

TEST(ClassifyBlock, SingleInfiniteBlock) {
  EXPECT_EQ(classify_block(WF::constant(1), 4), C::Ell2);
  EXPECT_EQ(classify_block(WF::power(1, 1), 4), C::EllP);
  EXPECT_EQ(classify_block(WF::power(1, Rational(1, 4)), 4), C::XP);
  // q = 2p/(p-2) = 3 at p = 6: alpha = 1/3 diverges, 1/2 converges
  EXPECT_EQ(classify_block(WF::power(1, Rational(1, 3)), 6), C::XP);
  EXPECT_EQ(classify_block(WF::power(1, Rational(1, 2)), 6), C::EllP);
}

// The corpus: every annotation reproduced, every branch reached.
TEST(Corpus, AtLeastFourteenAnnotatedFixtures) {
  auto all = corpus();
  EXPECT_GE(all.size(), 14u);
  for (const auto& f : all) {
    EXPECT_TRUE(f.doc.expected_class.has_value()) << f.file;
    EXPECT_FALSE(f.doc.branch.empty()) << f.file;
    EXPECT_EQ(f.doc.name, f.file);
  }
}

TEST(Corpus, ClassesAndBranchesMatchAnnotations) {
  for (const auto& f : corpus()) {
    ClassificationResult r = classify(f.doc.spec);
    EXPECT_EQ(r.cls(), *f.doc.expected_class) << f.file << ": " << r.outcome.reason;
    EXPECT_TRUE(mentions(r.evidence, f.doc.branch)) << f.file << " missing branch " << f.doc.branch;
  }
}

TEST(Corpus, CoversEveryNamedClass) {
  std::set<C> seen;
  for (const auto& f : corpus()) seen.insert(classify(f.doc.spec).cls());
  for (C c : kNamedClasses) EXPECT_TRUE(seen.count(c)) << to_string(c);
}

TEST(Corpus, WeightSetShapesStayInTheFourClassList) {
  // single indiscrete pair or admissible: only l_p, X_p, l2, l2 (+) l_p can occur
  const std::set<C> four = {C::EllP, C::XP, C::Ell2, C::Ell2PlusEllP};
  for (const auto& f : corpus()) {
    ClassificationResult r = classify(f.doc.spec);
    if (r.evidence.route == "indiscrete.weights" || r.evidence.route == "admissible") {
      EXPECT_TRUE(four.count(r.cls())) << f.file;
    }
  }
}

TEST(Corpus, ReplayReproducesTheClass) {
  for (const auto& f : corpus()) {
    ClassificationResult r = classify(f.doc.spec);
    EXPECT_EQ(replay(r.evidence).cls, r.cls()) << f.file;
  }
}

TEST(Corpus, ReductionsAgreeWithTheUnreducedClass) {
  int fired = 0;
  for (const auto& f : corpus()) {
    ClassificationResult r = classify(f.doc.spec);
    for (const auto& rec : r.evidence.reductions) {
      if (!rec.reduced) continue;
      ++fired;
      ASSERT_TRUE(rec.reduced_class);
      EXPECT_EQ(*rec.reduced_class, r.cls()) << f.file;
    }
  }
  EXPECT_GE(fired, 2);
}

TEST(Corpus, ClassificationIsDeterministic) {
  for (const auto& f : corpus()) {
    std::string a = classification_json(classify(f.doc.spec)).dump();
    std::string b = classification_json(classify(f.doc.spec)).dump();
    EXPECT_EQ(a, b) << f.file;
  }
}

TEST(Corpus, InvariantUnderUniformWeightScaling) {
  for (const auto& f : corpus()) {
    SpaceSpec s = scale_weights(f.doc.spec, Rational(1, 3));
    EXPECT_EQ(classify(s).cls(), *f.doc.expected_class) << f.file;
  }
}

TEST(Corpus, InvariantUnderPairOrderAndDiscretePairs) {
  for (const auto& f : corpus()) {
    const SpaceSpec& s = f.doc.spec;
    std::vector<PartitionWeightPair> rev(s.pairs().rbegin(), s.pairs().rend() - 1);
    EXPECT_EQ(classify(SpaceSpec(s.p(), rev)).cls(), *f.doc.expected_class) << f.file;
    rev.push_back(PartitionWeightPair(PartitionScheme::discrete(), WF::power(1, 1)));
    ClassificationResult r = classify(SpaceSpec(s.p(), rev));
    EXPECT_EQ(r.cls(), *f.doc.expected_class) << f.file;
    EXPECT_EQ(r.evidence.rules.front().id, "dominated-by-trivial");
  }
}

// Recorded quantities checked against closed forms.
TEST(Evidence, IndiscreteDelta) {
  ClassificationResult r = classify(fixture("indiscrete-const-half").doc.spec);
  ASSERT_TRUE(r.evidence.delta);
  EXPECT_EQ(*r.evidence.delta->exact, Rational(1, 2));
}

TEST(Evidence, NestedSandwichConstant) {
  ClassificationResult r = classify(fixture("nested-few-coarse-blocks").doc.spec);
  ASSERT_TRUE(r.evidence.sandwich_lower);
  EXPECT_NEAR(r.evidence.sandwich_lower->value, 0.5 * std::pow(3.0, -0.25), 1e-15);
}

TEST(Evidence, NestedBlockSums) {
  // coarse blocks of 4 with weights 2^-k * 2^-j: C_M = 16^-k (16^-1 + ... + 16^-4), largest at k = 1
  ClassificationResult r = classify(fixture("nested-bounded-block-sums").doc.spec);
  ASSERT_TRUE(r.evidence.sup_cm);
  double inner = 1.0 / 16 + 1.0 / 256 + 1.0 / 4096 + 1.0 / 65536;
  EXPECT_NEAR(r.evidence.sup_cm->value, inner / 16, 1e-17);
}

TEST(Evidence, ReductionConstant) {
  ClassificationResult r = classify(fixture("reduce-geometric").doc.spec);
  bool found = false;
  for (const auto& rec : r.evidence.reductions) {
    if (!rec.reduced) continue;
    found = true;
    EXPECT_NEAR(rec.constant->value, std::pow(1.0 / 15.0, 0.25), 1e-15);
  }
  EXPECT_TRUE(found);
}

TEST(Evidence, UnclassifiedCarriesAReason) {
  ClassificationResult r = classify(fixture("three-unrelated-pairs").doc.spec);
  EXPECT_EQ(r.cls(), C::Unclassified);
  EXPECT_FALSE(r.outcome.reason.empty());
  EXPECT_EQ(r.evidence.reductions.size(), 6u);
}

TEST(Reduction, DirectCall) {
  const SpaceSpec& s = fixture("reduce-geometric").doc.spec;
  ReductionOutcome out = reduce_by_refinement(s, 1, 2);
  ASSERT_TRUE(out.reduced);
  EXPECT_EQ(out.reduced->pairs().size(), 2u);
  EXPECT_EQ(classify(*out.reduced).cls(), classify(s).cls());
  EXPECT_THROW(reduce_by_refinement(s, 2, 1), Error);  // indiscrete does not refine blocks of 2
}
