// Norm evaluation against hand formulas, norm axioms as properties, and
// majorant constants against closed forms.

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "alspach/norm.hpp"

using namespace alspach;
using WF = WeightFamily;
static const Cardinal INF = std::nullopt;

namespace {

PartitionWeightPair indiscrete(WF w) { return PartitionWeightPair(PartitionScheme::indiscrete(), std::move(w)); }
PartitionWeightPair blocks(std::vector<BlockGroup> g, WF w) { return PartitionWeightPair(PartitionScheme(std::move(g)), std::move(w)); }

// Independent evaluation straight from the definition: group positions by
// block id through locate(), weights through the pair.
double reference_pair_norm(const std::vector<double>& x, const PartitionWeightPair& pr, double p) {
  std::map<long, double> block_sums;
  for (std::size_t i = 0; i < x.size(); ++i) {
    long pos = static_cast<long>(i) + 1;
    double w = pr.weight_value(pos);
    block_sums[pr.partition().locate(pos).block.id] += x[i] * x[i] * w * w;
  }
  long double total = 0;
  for (const auto& [id, s] : block_sums) total += std::pow(static_cast<long double>(s), p / 2);
  return static_cast<double>(std::pow(total, 1.0L / p));
}

std::vector<SpaceSpec> sample_specs() {
  Rational h(1, 2);
  PartitionScheme P1({{2, INF}});
  WeightAssignment framed{BlockWeights{WF::constant(1), WF::geometric(1, h)}, {}, P1};
  return {
      SpaceSpec(4, {}),
      SpaceSpec(4, {indiscrete(WF::constant(h))}),
      SpaceSpec(3, {blocks({{INF, 2}}, WF::power(1, Rational(1, 4)))}),
      SpaceSpec(6, {blocks({{INF, 1}, {3, INF}}, WF::constant(1))}),
      SpaceSpec(4, {blocks({{2, INF}}, WF::constant(1)), PartitionWeightPair(PartitionScheme::indiscrete(), framed)}),
      SpaceSpec(Rational(5, 2), {blocks({{INF, INF}}, WF::geometric(1, h)), indiscrete(WF::power(1, 1))}),
  };
}

std::vector<double> gaussian(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

}  // namespace

TEST(PairNorm, HandComputedValues) {
  SpaceSpec s(4, {indiscrete(WF::constant(Rational(1, 2)))});
  SparseVector e1(0);
  e1.set(1, 1, 1.0);
  NormBreakdown nb = space_norm(e1, s);
  EXPECT_DOUBLE_EQ(nb.per_pair[0], 1.0);
  EXPECT_DOUBLE_EQ(nb.per_pair[1], 0.5);
  EXPECT_DOUBLE_EQ(nb.overall, 1.0);
  EXPECT_EQ(nb.argmax, 0u);

  SparseVector ones(0);
  ones.set(1, 1, 1.0);
  ones.set(2, 1, 1.0);
  EXPECT_NEAR(space_norm(ones, SpaceSpec(4, {})).overall, std::pow(2.0, 0.25), 1e-15);

  SpaceSpec l2(4, {indiscrete(WF::constant(1))});
  SparseVector v(0);
  v.set(1, 1, 3.0);
  v.set(2, 1, 4.0);
  NormBreakdown b = space_norm(v, l2);
  EXPECT_NEAR(b.overall, 5.0, 1e-15);
  EXPECT_EQ(b.argmax, 1u);
}

TEST(PairNorm, TiesGoToEarliestPair) {
  SpaceSpec s(4, {indiscrete(WF::constant(1))});
  SparseVector e1(0);
  e1.set(1, 1, 2.0);
  EXPECT_EQ(space_norm(e1, s).argmax, 0u);  // both pairs give 2
}

TEST(PairNorm, BlockOfTwoMatchesHandFormula) {
  // blocks {1,2},{3,4},...: (sum_k (x_{2k-1}^2 + x_{2k}^2)^{p/2})^{1/p}
  SpaceSpec s(4, {blocks({{2, INF}}, WF::constant(1))});
  std::vector<double> x = {1, 2, -2, 1, 3};
  double hand = std::pow(std::pow(5.0, 2) + std::pow(5.0, 2) + std::pow(9.0, 2), 0.25);
  DenseEvaluator ev(s, x.size());
  EXPECT_NEAR(ev.pair_value(1, x), hand, 1e-14);
}

TEST(PairNorm, DenseEvaluatorMatchesReference) {
  std::mt19937_64 rng(11);
  for (const SpaceSpec& s : sample_specs()) {
    for (std::size_t n : {1u, 5u, 17u, 40u}) {
      DenseEvaluator ev(s, n);
      for (int t = 0; t < 20; ++t) {
        auto x = gaussian(rng, n);
        for (std::size_t k = 0; k < s.pairs().size(); ++k) {
          double ref = reference_pair_norm(x, s.pair(k), s.p_value());
          EXPECT_NEAR(ev.pair_value(k, x), ref, 1e-12 * std::max(1.0, ref));
        }
        SparseVector sv = SparseVector::from_positions(s, 0, x);
        EXPECT_NEAR(space_norm(sv, s).overall, ev.norm(x), 1e-12 * std::max(1.0, ev.norm(x)));
      }
    }
  }
}

// Properties that must hold for every spec.
class NormAxioms : public ::testing::TestWithParam<int> {};

TEST_P(NormAxioms, TriangleHomogeneitySignFlipLowerLp) {
  SpaceSpec s = sample_specs()[static_cast<std::size_t>(GetParam())];
  std::mt19937_64 rng(100 + static_cast<std::uint64_t>(GetParam()));
  std::uniform_real_distribution<double> scale(-5, 5);
  for (std::size_t n : {3u, 12u, 32u}) {
    DenseEvaluator ev(s, n);
    for (int t = 0; t < 200; ++t) {
      auto x = gaussian(rng, n), y = gaussian(rng, n);
      std::vector<double> sum(n), flipped(n), scaled(n);
      double a = scale(rng);
      for (std::size_t i = 0; i < n; ++i) {
        sum[i] = x[i] + y[i];
        flipped[i] = (i % 3 == 0) ? -x[i] : x[i];
        scaled[i] = a * x[i];
      }
      double nx = ev.norm(x), ny = ev.norm(y);
      EXPECT_LE(ev.norm(sum), (nx + ny) * (1 + 1e-12));
      EXPECT_NEAR(ev.norm(scaled), std::fabs(a) * nx, 1e-12 * std::fabs(a) * nx);
      EXPECT_EQ(ev.norm(flipped), nx);
      EXPECT_GE(nx * (1 + 1e-12), lp_norm(x, s.p_value()));
    }
  }
}

TEST_P(NormAxioms, LatticeMonotone) {
  SpaceSpec s = sample_specs()[static_cast<std::size_t>(GetParam())];
  std::mt19937_64 rng(300 + static_cast<std::uint64_t>(GetParam()));
  std::uniform_real_distribution<double> shrink(0, 1);
  DenseEvaluator ev(s, 24);
  for (int t = 0; t < 200; ++t) {
    auto x = gaussian(rng, 24);
    auto y = x;
    for (auto& v : y) v *= shrink(rng);
    EXPECT_LE(ev.norm(y), ev.norm(x) * (1 + 1e-12));
  }
}

INSTANTIATE_TEST_SUITE_P(Specs, NormAxioms, ::testing::Range(0, 6));

TEST(ExactNorm, RationalPowerSums) {
  SpaceSpec s(4, {});
  ExactSparseVector x(0);
  x.set(1, 1, Rational(1));
  x.set(2, 1, Rational(2));
  x.set(3, 1, Rational(3));
  ExactNorm en = exact_pair_norm(x, s, 0);
  ASSERT_TRUE(en.power_sum);
  EXPECT_EQ(*en.power_sum, Rational(98));  // 1 + 16 + 81
  EXPECT_NEAR(en.value.convert_to<double>(), std::pow(98.0, 0.25), 1e-15);

  SpaceSpec h(4, {indiscrete(WF::constant(Rational(1, 2)))});
  ExactSparseVector v(0);
  v.set(1, 1, Rational(3));
  v.set(2, 1, Rational(4));
  ExactNorm e2 = exact_pair_norm(v, h, 1);
  EXPECT_EQ(*e2.power_sum, Rational(625, 16));  // (25/4)^2
  EXPECT_NEAR(e2.value.convert_to<double>(), 2.5, 1e-30);
}

TEST(ExactNorm, AgreesWithDoubleEvaluation) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 8);
  for (const SpaceSpec& s : sample_specs()) {
    for (int t = 0; t < 10; ++t) {
      std::vector<Rational> xr;
      std::vector<double> xd;
      for (int i = 0; i < 12; ++i) {
        xr.emplace_back(num(rng), den(rng));
        xd.push_back(to_double(xr.back()));
      }
      auto ex = ExactSparseVector::from_positions(s, 0, xr);
      auto dx = SparseVector::from_positions(s, 0, xd);
      for (std::size_t k = 0; k < s.pairs().size(); ++k) {
        double d = pair_norm(dx, s, k);
        try {
          EXPECT_NEAR(exact_pair_norm(ex, s, k).value.convert_to<double>(), d, 1e-13 * std::max(1.0, d));
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::NotExact);  // irrational weights
        }
      }
    }
  }
}

TEST(ExactNorm, LimitsSupport) {
  SpaceSpec s(4, {});
  std::vector<Rational> big(17, Rational(1));
  EXPECT_THROW(exact_pair_norm(ExactSparseVector::from_positions(s, 0, big), s, 0), Error);
}

TEST(HolderMajorant, ClosedForms) {
  // sum (2^-j)^4 = 1/15; sum j^-4 = pi^4/90
  Majorant g = holder_majorant(WF::geometric(1, Rational(1, 2)), 4);
  ASSERT_TRUE(g.finite);
  EXPECT_NEAR(g.constant.value, std::pow(1.0 / 15.0, 0.25), 1e-15);
  EXPECT_NEAR(g.constant.value, 0.508133, 1e-6);
  Majorant pw = holder_majorant(WF::power(1, 1), 4);
  EXPECT_NEAR(pw.constant.value, std::pow(std::pow(M_PI, 4) / 90.0, 0.25), 1e-9);
  EXPECT_FALSE(holder_majorant(WF::power(1, Rational(1, 4)), 4).finite);
  // p = 6: q = 3
  Majorant g6 = holder_majorant(WF::geometric(1, Rational(1, 2)), 6);
  EXPECT_NEAR(g6.constant.value, std::cbrt(1.0 / 7.0), 1e-15);
}

TEST(HolderMajorant, TruncatedConstantsAreSharpOnTheirDimension) {
  // (sum x^2 w^2)^{1/2} <= C_n ||x||_p, with equality at x_j = w_j^{q/p}... checked by sampling
  Profile w = restrict_family(WF::power(1, 1), std::nullopt);
  std::mt19937_64 rng(3);
  for (long n : {8L, 16L, 32L}) {
    double C = truncated_holder_constant(w, 4, n);
    double loop = 0;
    for (long j = 1; j <= n; ++j) loop += std::pow(1.0 / j, 4);
    EXPECT_NEAR(C, std::pow(loop, 0.25), 1e-14);
    for (int t = 0; t < 200; ++t) {
      auto x = gaussian(rng, static_cast<std::size_t>(n));
      double lhs = 0;
      for (long j = 0; j < n; ++j) lhs += x[j] * x[j] / double((j + 1) * (j + 1));
      EXPECT_LE(std::sqrt(lhs), C * lp_norm(x, 4) * (1 + 1e-12));
    }
    // extremal vector x_j = w_j^{q/p} = w_j attains equality for p = q = 4
    std::vector<double> ext(static_cast<std::size_t>(n));
    for (long j = 0; j < n; ++j) ext[j] = 1.0 / (j + 1);
    double lhs = 0;
    for (long j = 0; j < n; ++j) lhs += ext[j] * ext[j] / double((j + 1) * (j + 1));
    EXPECT_NEAR(std::sqrt(lhs), C * lp_norm(ext, 4), 1e-13);
  }
}

TEST(RefinementMajorant, GeometricDecayOverBlocksOfTwo) {
  Rational h(1, 2);
  PartitionScheme P1({{2, INF}});
  PartitionWeightPair fine = blocks({{2, INF}}, WF::constant(1));
  PartitionWeightPair coarse(PartitionScheme::indiscrete(),
                             WeightAssignment{BlockWeights{WF::constant(1), WF::geometric(1, h)}, {}, P1});
  RefinementMajorant m = refinement_majorant(fine, coarse, 4);
  ASSERT_TRUE(m.finite);
  // W_k = 2^-k, so sum W^4 = 1/15
  EXPECT_NEAR(m.sup_block_sum.value, 1.0 / 15.0, 1e-15);
  EXPECT_NEAR(m.constant.value, std::pow(1.0 / 15.0, 0.25), 1e-15);
  ASSERT_EQ(m.ratios.size(), 1u);
  ASSERT_TRUE(m.ratios[0].family);
  for (long u = 0; u < 10; ++u) {
    Real r = m.ratios[0].family->at(u);
    ASSERT_TRUE(r.exact);
    EXPECT_EQ(*r.exact, pow_int(h, u + 1));
  }
}

TEST(RefinementMajorant, ListedBlocksAndEqualPartitions) {
  // four infinite blocks under two: W = (1/2)/(1) per block, sum over two fine blocks
  PartitionWeightPair fine = blocks({{INF, 4}}, WF::constant(1));
  PartitionWeightPair coarse = blocks({{INF, 2}}, WF::constant(Rational(1, 2)));
  RefinementMajorant m = refinement_majorant(fine, coarse, 4);
  ASSERT_TRUE(m.finite);
  EXPECT_EQ(*m.sup_block_sum.exact, Rational(1, 8));  // 2 * (1/2)^4
  for (const auto& [id, r] : m.ratios[0].listed) EXPECT_EQ(*r.value.exact, Rational(1, 2));

  RefinementMajorant same = refinement_majorant(blocks({{2, INF}}, WF::constant(1)), blocks({{2, INF}}, WF::constant(Rational(1, 4))), 4);
  EXPECT_NEAR(same.constant.value, 0.25, 1e-15);
}

TEST(RefinementMajorant, Errors) {
  EXPECT_THROW(refinement_majorant(blocks({{3, INF}}, WF::constant(1)), blocks({{2, INF}}, WF::constant(1)), 4), Error);
  try {
    refinement_majorant(blocks({{2, INF}}, WF::constant(Rational(1, 2))), blocks({{4, INF}}, WF::constant(1)), 4);
    FAIL() << "expected RatioAssumptionViolated";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RatioAssumptionViolated);
  }
  // constant weights under the indiscrete partition: infinitely many blocks, infinite sum
  RefinementMajorant inf = refinement_majorant(blocks({{2, INF}}, WF::constant(1)), indiscrete(WF::constant(1)), 4);
  EXPECT_FALSE(inf.finite);
}

TEST(RefinementMajorant, BoundHoldsOnSamples) {
  Rational h(1, 2);
  PartitionScheme P1({{2, INF}});
  PartitionWeightPair fine = blocks({{2, INF}}, WF::constant(1));
  PartitionWeightPair coarse(PartitionScheme::indiscrete(),
                             WeightAssignment{BlockWeights{WF::constant(1), WF::geometric(1, h)}, {}, P1});
  SpaceSpec s(4, {fine, coarse});
  double C = refinement_majorant(fine, coarse, 4).constant.value;
  DenseEvaluator ev(s, 12);
  std::mt19937_64 rng(9);
  for (int t = 0; t < 500; ++t) {
    auto x = gaussian(rng, 12);
    EXPECT_LE(ev.pair_value(2, x), C * ev.pair_value(1, x) * (1 + 1e-12));
  }
}

TEST(Domination, WeightsComparedPointwise) {
  EXPECT_TRUE(dominates(indiscrete(WF::constant(1)), indiscrete(WF::constant(Rational(1, 2)))));
  EXPECT_FALSE(dominates(indiscrete(WF::constant(Rational(1, 2))), indiscrete(WF::constant(1))));
  EXPECT_TRUE(dominates(indiscrete(WF::constant(Rational(1, 2))), indiscrete(WF::power(Rational(1, 2), 1))));
  EXPECT_EQ(weights_infimum(blocks({{INF, 2}}, WF::power(1, 1))).value, 0.0);
  EXPECT_EQ(weights_supremum(blocks({{INF, 2}}, WF::power(1, 1))).value, 1.0);
}

TEST(CompensatedSum, RecoversCancellation) {
  CompensatedSum s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  EXPECT_EQ(s.value(), 1.0);
}
