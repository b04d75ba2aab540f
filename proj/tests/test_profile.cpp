#include <gtest/gtest.h>

#include <cmath>

#include "btl/error.hpp"
#include "btl/profile.hpp"

using namespace btl;

TEST(Profile, RejectsValuesOutsideUnitInterval) {
  auto z = make_lattice(1);
  EXPECT_THROW(power_decay(z, 1.0, 1.0), ValidationError);
  EXPECT_THROW(table_profile(z, {{z->lattice({3}), 1.0}}, 0.5), ValidationError);
  EXPECT_THROW(function_profile(z, [](const Element& g) { return g.code[0] == 7 ? 0.0 : 0.5; }, std::nullopt, "bad"),
               ValidationError);
  EXPECT_THROW(constant_profile(z, 1.2), ValidationError);
}

TEST(Profile, DeltaBoundIsChecked) {
  auto z = make_lattice(1);
  EXPECT_THROW(function_profile(z, [](const Element& g) { return g.code[0] == 2 ? 0.05 : 0.5; }, 0.1, "loose"),
               ValidationError);
}

TEST(Profile, CertificateMustMatchValues) {
  auto z = make_lattice(1);
  auto w = AlmostInvariantSet::half_line(z);
  EXPECT_THROW(MarginalProfile(z, [](const Element&) { return 0.3; }, 0.3,
                               cert::PiecewiseConstantOnAIPartition{AiPartition{{w, w.complement()}, {0.3, 0.6}}, 0.0, -1},
                               "inconsistent"),
               ValidationError);
}

TEST(Profile, L2DistanceConvergentPowerSeries) {
  auto z = make_lattice(1);
  auto p = power_decay(z, 0.4, 1.0);
  const auto est = l2_distance_sq_to(p, 0.5, 100);
  long double oracle = 1.0L;
  for (int k = 2; k <= 101; ++k) oracle += 2.0L / (static_cast<long double>(k) * k);
  EXPECT_NEAR(est.partial, 0.16 * static_cast<double>(oracle), 1e-12);
  EXPECT_EQ(est.verdict, SeriesVerdict::Converges);
  EXPECT_EQ(l2_distance_sq_to(p, 0.4, 10).verdict, SeriesVerdict::Diverges);
}

TEST(Profile, L2DistanceDivergentSlowDecay) {
  auto z = make_lattice(1);
  auto p = power_decay(z, 0.25, 1.0 / 3.0);
  EXPECT_EQ(l2_distance_sq_to(p, 0.5, 50).verdict, SeriesVerdict::Diverges);
  EXPECT_EQ(p.nonsingularity(), NonsingularityVerdict::Nonsingular);
}

TEST(Profile, LimitSets) {
  auto z = make_lattice(1);
  const auto osc = abelian_oscillating(z, 0.25).limit_set();
  ASSERT_EQ(osc.intervals.size(), 1u);
  EXPECT_DOUBLE_EQ(osc.intervals[0].lo, 0.25);
  EXPECT_DOUBLE_EQ(osc.intervals[0].hi, 0.75);
  EXPECT_TRUE(osc.perfect && osc.certified);

  auto chain = make_dyadic_chain();
  const double lambda = 0.5;
  const auto shells = shell_profile(chain, {0.5, 1.0 / (1.0 + lambda)});
  EXPECT_EQ(shells.limit_set().points, (std::vector<double>{0.5, 1.0 / (1.0 + lambda)}));
  ASSERT_TRUE(shells.ai_partition().has_value());
  EXPECT_EQ(shells.ai_partition()->parts.size(), 2u);

  auto levels = ii_infinity_chain_levels(0.5, 6);
  auto two_sided = ii_infinity_profile(make_dyadic_chain(levels), 0.5, 6);
  EXPECT_EQ(two_sided.limit_set().points, (std::vector<double>{0.0, 0.5}));
  EXPECT_EQ(two_sided.nonatomicity(), NonatomicityVerdict::Nonatomic);
}

TEST(Profile, TwoSidedRecipeLevels) {
  // Level 5 needs (1 - 2^-16)^(2^d - 1) < 1/4; d = 17 is the first exponent that works.
  EXPECT_EQ(ii_infinity_chain_levels(0.5, 6), (std::vector<std::int64_t>{1, 2, 3, 4, 21, 22}));
  const double x = std::pow(2.0, -16);
  EXPECT_LT((std::pow(2.0, 17) - 1) * std::log1p(-x), std::log(0.25));
  EXPECT_GT((std::pow(2.0, 16) - 1) * std::log1p(-x), std::log(0.25));
  EXPECT_THROW(ii_infinity_chain_levels(0.5, 7), BudgetError);
}

TEST(Profile, TwoSidedProfileValues) {
  auto chain = make_dyadic_chain(ii_infinity_chain_levels(0.5, 6));
  auto p = ii_infinity_profile(chain, 0.5, 6);
  EXPECT_DOUBLE_EQ(p.value(chain->identity()), 0.5);
  // level 2 = G_2 \ G_1 has 2 elements: gamma_1 = 1/(2 * 1 * 2)
  EXPECT_DOUBLE_EQ(p.value(chain->chain({0, 1})), 0.25);
  // level 4: |G_4 \ G_3| = 8, gamma_2 = 1/(2 * 4 * 8)
  EXPECT_NEAR(p.value(chain->chain({0, 0, 0, 1})), 1.0 / 64.0, 1e-15);
  EXPECT_FALSE(p.delta().has_value());
}

TEST(Profile, GeometricProfileIsAtomic) {
  auto z = make_lattice(1);
  auto p = geometric_atomic(z);
  const auto est = nonatomicity_sum(p, 10);
  double oracle = 0.25;
  for (int k = 1; k <= 10; ++k) oracle += 2.0 * std::pow(2.0, -k - 2);
  EXPECT_NEAR(est.partial, oracle, 1e-15);
  EXPECT_EQ(p.nonatomicity(), NonatomicityVerdict::Atomic);
  EXPECT_EQ(est.verdict, SeriesVerdict::Converges);
}

TEST(Profile, CandidateValuesAndSupport) {
  auto g = make_free_product(3, 3);
  auto w = AlmostInvariantSet::afp_ends_at_identity(g);
  auto p = type_iii_lambda_candidate(w, 0.9);
  EXPECT_DOUBLE_EQ(*p.delta(), 0.9 / 1.9);
  for (const auto& x : g->enumerate_ball(2)) {
    EXPECT_DOUBLE_EQ(p.value(x), w.contains(x) ? 0.9 / 1.9 : 1.0 / 1.9);
    auto d = p.difference_support(x);
    ASSERT_TRUE(d.has_value());
    EXPECT_EQ(*d, symmetric_difference(w, g->inverse(x)));
  }
  EXPECT_EQ(p.limit_set().points.size(), 2u);
  EXPECT_EQ(p.nonsingularity(), NonsingularityVerdict::Nonsingular);
  EXPECT_EQ(p.nonatomicity(), NonatomicityVerdict::Nonatomic);
}

TEST(Profile, EmpiricalLimitSetWithoutCertificate) {
  auto z = make_lattice(1);
  auto p = function_profile(z, [](const Element& g) { return g.code[0] > 0 ? 0.3 : 0.5; }, 0.3, "uncertified");
  const auto ls = p.limit_set();
  EXPECT_FALSE(ls.certified);
  EXPECT_EQ(ls.points, (std::vector<double>{0.3, 0.5}));
  EXPECT_EQ(l2_distance_sq_to(p, 0.5, 10).verdict, SeriesVerdict::Unknown);
  EXPECT_EQ(p.nonsingularity(), NonsingularityVerdict::Unknown);
}

TEST(Profile, TableSupportRadius) {
  auto z = make_lattice(1);
  auto p = table_profile(z, {{z->lattice({2}), 0.2}, {z->lattice({-1}), 0.7}}, 0.5);
  auto d = p.difference_support(z->lattice({3}));
  ASSERT_TRUE(d.has_value());
  std::vector<std::int32_t> got;
  for (auto& e : *d) got.push_back(e.code[0]);
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, (std::vector<std::int32_t>{-4, -1, 2}));
}
