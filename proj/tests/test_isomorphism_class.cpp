// Direct-sum simplification: an explicit absorption table and confluence.

#include <gtest/gtest.h>

#include <algorithm>

#include "alspach/isomorphism_class.hpp"

using namespace alspach;
using C = IsoClass;

TEST(IsoClass, NamesRoundTrip) {
  for (C c : kNamedClasses) EXPECT_EQ(parse_iso_class(to_string(c)), c);
  EXPECT_EQ(parse_iso_class("UNCLASSIFIED"), C::Unclassified);
  EXPECT_THROW(parse_iso_class("ELL_3"), Error);
}

struct SumCase {
  std::vector<C> parts;
  C expected;
};

// Absorption identities written out by hand.
TEST(SimplifySum, KnownIdentities) {
  const std::vector<SumCase> cases = {
      {{C::EllP, C::EllP}, C::EllP},
      {{C::Ell2, C::Ell2}, C::Ell2},
      {{C::EllP, C::Ell2}, C::Ell2PlusEllP},
      {{C::XP, C::EllP}, C::XP},
      {{C::XP, C::Ell2}, C::XP},
      {{C::XP, C::Ell2PlusEllP}, C::XP},
      {{C::XP, C::XP}, C::XP},
      {{C::BP, C::Ell2}, C::BP},
      {{C::BP, C::EllP}, C::BP},
      {{C::BP, C::SumEll2}, C::BP},
      {{C::SumEll2, C::EllP}, C::SumEll2},
      {{C::SumEll2, C::Ell2}, C::SumEll2},
      {{C::SumEll2, C::XP}, C::SumEll2PlusXP},
      {{C::BP, C::XP}, C::BPPlusXP},
      {{C::BPPlusXP, C::SumEll2PlusXP}, C::BPPlusXP},
      {{C::SumXP, C::BP}, C::SumXP},
      {{C::SumXP, C::XP}, C::SumXP},
      {{C::SumXP, C::EllP}, C::SumXP},
      {{C::Ell2PlusEllP, C::Ell2}, C::Ell2PlusEllP},
      {{C::EllP}, C::EllP},
  };
  for (const auto& c : cases) {
    EXPECT_EQ(simplify_sum(c.parts), c.expected) << to_string(c.parts[0]);
  }
}

TEST(SimplifySum, RejectsEmptyAndUnclassified) {
  EXPECT_THROW(simplify_sum({}), Error);
  EXPECT_THROW(simplify_sum({C::EllP, C::Unclassified}), Error);
}

// Every multiset of size <= 3: order-independent, associative, idempotent,
// and closed over the named classes.
TEST(SimplifySum, ConfluentOverSmallMultisets) {
  const auto& N = kNamedClasses;
  for (C a : N) {
    EXPECT_EQ(simplify_sum({a, a}), a);
    for (C b : N) {
      C ab = simplify_sum({a, b});
      EXPECT_EQ(ab, simplify_sum({b, a}));
      EXPECT_NE(std::find(N.begin(), N.end(), ab), N.end());
      for (C c : N) {
        std::vector<C> v = {a, b, c};
        std::sort(v.begin(), v.end());
        C flat = simplify_sum(v);
        do {
          EXPECT_EQ(simplify_sum(v), flat);
        } while (std::next_permutation(v.begin(), v.end()));
        EXPECT_EQ(simplify_sum({ab, c}), flat);
        EXPECT_EQ(simplify_sum({a, simplify_sum({b, c})}), flat);
        EXPECT_EQ(simplify_sum({flat, flat}), flat);
      }
    }
  }
}
