#include <random>

#include <gtest/gtest.h>

#include "greenopt/intervals.hpp"
#include "test_util.hpp"

using namespace greenopt;
using greenopt::testing::random_union;

namespace {

IntervalUnion U(std::initializer_list<Interval> raw) { return IntervalUnion::normalize(raw); }

void expect_union(const IntervalUnion &got, const IntervalUnion &want, double tol = 1e-15) {
  EXPECT_TRUE(approx_equal(got, want, tol)) << "size " << got.size() << " vs " << want.size();
}

} // namespace

TEST(Normalize, KnownValues) {
  expect_union(U({{0.0, 0.5}, {0.5, 1.0}}), U({{0.0, 1.0}}));
  expect_union(U({{0.3, 0.7}, {-0.2, 0.4}}), U({{-0.2, 0.7}}));
  EXPECT_TRUE(U({}).empty());
}

TEST(Normalize, ClampsSnapsAndDrops) {
  const IntervalUnion a = U({{-3.0, -0.5}, {0.2, 0.2 + 1e-13}, {0.9, 1.0 - 1e-13}});
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[0].lo, -1.0);
  EXPECT_EQ(a[1].hi, 1.0);
}

TEST(Normalize, RejectsBadInput) {
  EXPECT_THROW(U({{0.5, 0.1}}), std::invalid_argument);
  EXPECT_THROW(U({{std::nan(""), 0.1}}), std::invalid_argument);
}

TEST(Normalize, IsAProjection) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const IntervalUnion a = random_union(rng, 5);
    std::vector<Interval> raw(a.pieces().begin(), a.pieces().end());
    EXPECT_EQ(IntervalUnion::normalize(raw), a);
  }
}

TEST(Intervals, ContainsIsOpen) {
  const IntervalUnion a = U({{-0.5, 0.0}, {0.25, 0.75}});
  EXPECT_TRUE(a.contains(-0.25));
  EXPECT_FALSE(a.contains(0.0));
  EXPECT_FALSE(a.contains(0.1));
  EXPECT_TRUE(a.contains(0.5));
  EXPECT_FALSE(a.contains(0.75));
}

TEST(Intervals, MassesAndMoments) {
  EXPECT_NEAR(psi_mass(IntervalUnion::full()), 2.0 / 3.0, 2e-16);
  EXPECT_NEAR(psi_mass(U({{0.0, 1.0}})), 1.0 / 3.0, 1e-16);
  for (double t : {0.05, 0.2, 0.5}) {
    const double xi = kernel1d::xi_for_budget(t);
    EXPECT_NEAR(psi_mass(U({{xi, 1.0}})), t, 1e-14);
  }
  EXPECT_EQ(measure(IntervalUnion::full()), 2.0);
  EXPECT_DOUBLE_EQ(moment(U({{0.0, 1.0}})), 0.5);
  EXPECT_EQ(moment(U({{-0.7, -0.2}, {0.2, 0.7}})), 0.0);
  EXPECT_EQ(psi_mass(IntervalUnion{}), 0.0);
}

TEST(Intervals, Complement) {
  expect_union(complement(U({{0.0, 1.0}})), U({{-1.0, 0.0}}));
  expect_union(complement(IntervalUnion{}), IntervalUnion::full());
  expect_union(complement(U({{-0.5, 0.5}})), U({{-1.0, -0.5}, {0.5, 1.0}}));
}

TEST(Intervals, SetAlgebra) {
  const IntervalUnion a = U({{-0.8, -0.2}, {0.1, 0.6}});
  const IntervalUnion b = U({{-0.5, 0.3}});
  expect_union(unite(a, b), U({{-0.8, 0.6}}));
  expect_union(intersect(a, b), U({{-0.5, -0.2}, {0.1, 0.3}}));
  expect_union(subtract(a, b), U({{-0.8, -0.5}, {0.3, 0.6}}));
}

TEST(Intervals, Reflect) {
  expect_union(reflect(U({{0.2, 0.9}})), U({{-0.9, -0.2}}));
  const IntervalUnion s = U({{-0.6, -0.1}, {0.1, 0.6}});
  expect_union(reflect(s), s);
  EXPECT_TRUE(is_even(s));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const IntervalUnion a = random_union(rng, 4);
    expect_union(reflect(reflect(a)), a);
  }
}

TEST(Polarize, KnownValues) {
  expect_union(polarize_right(U({{-0.6, -0.2}})), U({{0.2, 0.6}}), 1e-15);
  expect_union(polarize_right(U({{-0.5, 0.5}})), U({{-0.5, 0.5}}));
  // membership of sample points under (A n tA) u ((A u tA) n (0, 1))
  expect_union(polarize_right(U({{-0.8, -0.1}, {0.3, 0.6}})),
               U({{-0.6, -0.3}, {0.1, 0.8}}), 1e-15);
  expect_union(polarize_left(U({{0.2, 0.6}})), U({{-0.6, -0.2}}), 1e-15);
}

TEST(Polarize, IdempotentAndMassPreserving) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const IntervalUnion a = random_union(rng, 5);
    const IntervalUnion p = polarize_right(a);
    EXPECT_TRUE(approx_equal(polarize_right(p), p, 1e-14));
    EXPECT_NEAR(measure(p), measure(a), 1e-14);
    EXPECT_NEAR(psi_mass(p), psi_mass(a), 1e-14);
    EXPECT_TRUE(is_right_polarized(p));
  }
}

TEST(Polarize, RightPolarizedCriterionPointwise) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const IntervalUnion p = polarize_right(random_union(rng, 5));
    for (int k = 0; k < 50; ++k) {
      const double x = u(rng);
      if (p.contains(-x))
        EXPECT_TRUE(p.contains(x)) << x;
    }
  }
}

TEST(Polarize, ComplementOfRightPolarizedIsLeftPolarized) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    const IntervalUnion p = polarize_right(random_union(rng, 5));
    const IntervalUnion c = complement(p);
    EXPECT_TRUE(approx_equal(polarize_left(c), c, 1e-14));
  }
}

TEST(Decompose, KnownValues) {
  auto d = decompose_symmetric(U({{-0.3, 0.3}}));
  expect_union(d.symmetric, U({{-0.3, 0.3}}));
  EXPECT_TRUE(d.non_symmetric.empty());
  d = decompose_symmetric(U({{0.1, 0.5}}));
  EXPECT_TRUE(d.symmetric.empty());
  expect_union(d.non_symmetric, U({{0.1, 0.5}}));
  d = decompose_symmetric(U({{-0.2, 0.6}}));
  expect_union(d.symmetric, U({{-0.2, 0.2}}));
  expect_union(d.non_symmetric, U({{0.2, 0.6}}));
  EXPECT_THROW(decompose_symmetric(U({{-0.6, -0.2}})), std::invalid_argument);
}
