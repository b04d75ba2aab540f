#include <gtest/gtest.h>

#include <cmath>

#include "btl/almost_invariant.hpp"
#include "btl/error.hpp"

using namespace btl;

namespace {

GroupPtr hnn_z4_z2() { return make_group(HnnExtension{FiniteGroup::cyclic(4), FiniteGroup::cyclic(2), {0, 2}, {0, 2}}); }

GroupPtr hnn_klein() {
  auto klein = FiniteGroup::from_table({{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}});
  return make_group(HnnExtension{klein, FiniteGroup::cyclic(2), {0, 1}, {0, 2}});
}

GroupPtr afp_z4_z6_over_z2() {
  return make_group(AmalgamatedProduct{FiniteGroup::cyclic(4), FiniteGroup::cyclic(6), FiniteGroup::cyclic(2), {0, 2}, {0, 3}});
}

}  // namespace

TEST(AlmostInvariant, FreeProductBoundaryIsTwoNC) {
  for (const auto& G : {make_free_product(3, 3), make_free_product(2, 4), afp_z4_z6_over_z2()}) {
    auto W = AlmostInvariantSet::afp_ends_at_identity(G);
    for (const auto& g : G->enumerate_ball(3)) {
      const auto parts = boundary_parts(W, g);
      EXPECT_EQ(parts.total(), 2u * G->word_length(g) * G->amalgam_order()) << G->to_string(g);
      EXPECT_EQ(parts.w_minus_gw, parts.gw_minus_w);
    }
  }
}

TEST(AlmostInvariant, HnnBoundaryBoundAndVanishingOmega) {
  for (const auto& G : {hnn_z4_z2(), hnn_klein()}) {
    auto W = AlmostInvariantSet::hnn_ends_at_identity(G);
    for (const auto& g : G->enumerate_ball(3)) {
      const auto parts = boundary_parts(W, g);
      EXPECT_LE(parts.total(), 2u * G->word_length(g) * G->amalgam_order()) << G->to_string(g);
      EXPECT_EQ(parts.w_minus_gw, parts.gw_minus_w);
    }
    EXPECT_EQ(boundary_parts(W, G->hnn_t(1)).total(), 2u * G->amalgam_order());
  }
}

TEST(AlmostInvariant, BoundaryCertificateRadiusIsLargeEnough) {
  for (const auto& W : {AlmostInvariantSet::afp_ends_at_identity(make_free_product(2, 4)),
                        AlmostInvariantSet::afp_ends_at_identity(afp_z4_z6_over_z2()),
                        AlmostInvariantSet::hnn_ends_at_identity(hnn_klein())}) {
  const auto G = W.group_ptr();
  for (const auto& g : G->enumerate_ball(2)) {
    const Element gi = G->inverse(g);
    std::size_t wide = 0;
    for (const auto& h : G->enumerate_ball(W.boundary_radius(g) + 2))
      if (W.contains(h) != W.contains(G->multiply(gi, h))) ++wide;
    EXPECT_EQ(wide, boundary_parts(W, g).total());
  }
  }
}

TEST(AlmostInvariant, DecompositionMatchesDirectCocycle) {
  std::vector<AlmostInvariantSet> sets{AlmostInvariantSet::afp_ends_at_identity(make_free_product(3, 3)),
                                       AlmostInvariantSet::afp_ends_at_identity(afp_z4_z6_over_z2()),
                                       AlmostInvariantSet::hnn_ends_at_identity(hnn_z4_z2()),
                                       AlmostInvariantSet::hnn_ends_at_identity(hnn_klein())};
  for (const auto& W : sets) {
    const GroupModel& G = W.group();
    for (const auto& g : G.enumerate_ball(3)) {
      auto dec = ai_cocycle_decomposition(W, g);
      const Element gi = G.inverse(g);
      std::map<Element, int> direct;
      for (const auto& h : G.enumerate_ball(W.boundary_radius(g))) {
        const int v = static_cast<int>(W.contains(h)) - static_cast<int>(W.contains(G.multiply(gi, h)));
        if (v != 0) direct[h] = v;
      }
      EXPECT_EQ(dec, direct) << W.describe() << " g=" << G.to_string(g);
      std::size_t l2 = 0;
      for (auto& [k, v] : dec) l2 += static_cast<std::size_t>(v * v);
      EXPECT_LE(l2, 2u * G.word_length(g) * G.amalgam_order());
    }
  }
}

TEST(AlmostInvariant, HalfLineOmega) {
  auto Z = make_lattice(1);
  auto W = AlmostInvariantSet::half_line(Z);
  const auto one = boundary_parts(W, Z->lattice({1}));
  EXPECT_EQ(one.w_minus_gw, 1u);
  EXPECT_EQ(one.gw_minus_w, 0u);
  const auto five = boundary_parts(W, Z->lattice({-5}));
  EXPECT_EQ(five.gw_minus_w, 5u);
  EXPECT_EQ(five.w_minus_gw, 0u);
}

TEST(AlmostInvariant, KappaBoundsAndFeasibility) {
  EXPECT_DOUBLE_EQ(kappa_bound(*make_free_product(3, 3)), std::log(2.0));
  EXPECT_DOUBLE_EQ(kappa_bound(*make_free_product(2, 4)), std::log(3.0) / 2.0);
  EXPECT_DOUBLE_EQ(kappa_bound(*hnn_z4_z2()), std::log(3.0) / 4.0);
  EXPECT_TRUE(lambda_feasible(0.9, std::log(2.0)));
  EXPECT_FALSE(lambda_feasible(0.1, std::log(2.0)));
  EXPECT_THROW(lambda_feasible(1.0, 1.0), ValidationError);
  EXPECT_THROW(kappa_bound(*make_lattice(1)), UnsupportedError);
}

TEST(AlmostInvariant, AiDivergenceVerdicts) {
  auto W = AlmostInvariantSet::afp_ends_at_identity(make_free_product(3, 3));
  EXPECT_EQ(ai_divergence(W, std::log(2.0), 3).verdict, SeriesVerdict::Diverges);
  EXPECT_EQ(ai_divergence(W, 1.0, 3).verdict, SeriesVerdict::Converges);
  // At kappa = log 2 every sphere contributes 9/2: partial sum = |A| + 3 * 4.5.
  EXPECT_NEAR(ai_divergence(W, std::log(2.0), 3).partial, 3.0 + 3 * 4.5, 1e-9);
}

TEST(AlmostInvariant, ChainUnionMembershipAndBound) {
  auto chain = make_dyadic_chain();
  auto W = construct_lf_ai_set(chain, 1e-6, [](int n) { return n % 2 == 0; }, "even");
  EXPECT_FALSE(W.contains(chain->identity()));
  EXPECT_FALSE(W.contains(chain->chain({1})));
  EXPECT_TRUE(W.contains(chain->chain({0, 1})));
  EXPECT_FALSE(W.contains(chain->chain({1, 1, 1})));
  for (const auto& g : chain->enumerate_ball(6)) {
    const int n = chain_level(*chain, g);
    const double prev = n == 1 ? 0.0 : std::exp(chain->chain_log_level_size(n - 1));
    EXPECT_LE(static_cast<double>(boundary_parts(W, g).total()), 2.0 * prev + 1e-9);
    EXPECT_EQ(boundary_parts(W, g).w_minus_gw, boundary_parts(W, g).gw_minus_w);
  }
}

TEST(AlmostInvariant, ChainGrowthInequalityIsEnforced) {
  EXPECT_THROW(construct_lf_ai_set(make_dyadic_chain(), 0.01, [](int n) { return n % 2 == 0; }, "even"), ValidationError);
  auto levels = chain_levels_for_kappa(0.01, 11);
  EXPECT_EQ(levels, (std::vector<std::int64_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 15, 946}));
  EXPECT_THROW(chain_levels_for_kappa(0.01, 12), BudgetError);
  auto sparse = make_dyadic_chain(levels);
  EXPECT_NO_THROW(construct_lf_ai_set(sparse, 0.01, [](int n) { return n % 2 == 0; }, "even"));
  for (std::size_t n = 1; n < levels.size(); ++n) {
    const double shell = std::pow(2.0, double(levels[n])) - std::pow(2.0, double(levels[n - 1]));
    EXPECT_GE(std::log(shell), 2 * 0.01 * std::pow(2.0, double(levels[n - 1])));
  }
}
