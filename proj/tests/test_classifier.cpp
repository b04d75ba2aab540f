#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "btl/classifier.hpp"
#include "btl/error.hpp"

using namespace btl;

namespace {

double logistic(double t) { return 1.0 / (1.0 + std::exp(-t)); }

TypeVerdict run(const MarginalProfile& p, bool declared = false, int radius = -1) {
  ConservativenessOptions o;
  o.declared_conservative = declared;
  o.radius = radius;
  return classify(p, assess_conservativeness(p, o));
}

}  // namespace

TEST(Lattice, RationalRatio) {
  EXPECT_EQ(rational_ratio(3.0, 2.0), std::make_pair(3LL, 2LL));
  EXPECT_EQ(rational_ratio(2.0 * std::log(2.0), std::log(2.0)), std::make_pair(2LL, 1LL));
  EXPECT_EQ(rational_ratio(-std::log(3.0) / 7.0, std::log(3.0) / 5.0), std::make_pair(-5LL, 7LL));
  EXPECT_FALSE(rational_ratio(1.0, std::sqrt(2.0)).has_value());
  EXPECT_FALSE(rational_ratio(M_PI, 1.0).has_value());
}

TEST(Lattice, LogOddsExamples) {
  const auto a = lambda_lattice({1.0 / 3.0, 2.0 / 3.0});
  ASSERT_FALSE(a.dense);
  EXPECT_NEAR(a.a, 2.0 * std::log(2.0), 1e-12);
  const auto b = lambda_lattice({0.9 / 1.9, 1.0 / 1.9});
  ASSERT_FALSE(b.dense);
  EXPECT_NEAR(b.a, 2.0 * std::fabs(std::log(0.9)), 1e-12);
  const auto c = lambda_lattice({logistic(0.0), logistic(1.0), logistic(std::sqrt(2.0))});
  EXPECT_TRUE(c.dense);
  const auto d = lambda_lattice({logistic(0.0), logistic(0.6), logistic(1.5)});
  ASSERT_FALSE(d.dense);
  EXPECT_NEAR(d.a, 0.3, 1e-9);
  EXPECT_THROW(lambda_lattice({0.3}), StructuralError);
  const auto e = lattice_from_generators({1.2, 0.6 * 3.0, 0.4});
  EXPECT_NEAR(e.a, 0.2, 1e-12);
}

TEST(Omega, HalfLineAndConstructions) {
  auto z = make_lattice(1);
  const auto w = AlmostInvariantSet::half_line(z);
  EXPECT_EQ(omega_W(w, z->lattice({1})), 1);
  EXPECT_EQ(omega_W(w, z->identity()), 0);
  for (int a = -5; a <= 5; ++a)
    for (int b = -5; b <= 5; ++b)
      EXPECT_EQ(omega_W(w, z->lattice({a + b})), omega_W(w, z->lattice({a})) + omega_W(w, z->lattice({b})));
  auto afp = make_free_product(3, 3);
  const auto wa = AlmostInvariantSet::afp_ends_at_identity(afp);
  for (const auto& g : afp->enumerate_ball(2)) EXPECT_EQ(omega_W(wa, g), 0);
  auto hnn = make_group(HnnExtension{FiniteGroup::cyclic(4), FiniteGroup::cyclic(2), {0, 2}, {0, 2}});
  const auto wh = AlmostInvariantSet::hnn_ends_at_identity(hnn);
  for (const auto& g : hnn->enumerate_ball(2)) EXPECT_EQ(omega_W(wh, g), 0);
  auto chain = make_dyadic_chain();
  const auto wl = AlmostInvariantSet::lf_union(chain, [](int n) { return n % 2 == 0; }, "even");
  for (const auto& g : chain->enumerate_ball(4)) EXPECT_EQ(omega_W(wl, g), 0);
}

TEST(Classify, ConstantIsII1) {
  for (const auto& g : {make_free_product(3, 3), make_lattice(1), make_dyadic_chain()}) {
    const auto v = run(constant_profile(g, 0.4), false, 2);
    EXPECT_EQ(v.tag, TypeTag::TypeII1) << g->describe();
    EXPECT_EQ(v.stable, TypeTag::TypeII1);
    EXPECT_FALSE(v.evidence.empty());
  }
}

TEST(Classify, FreeProductCandidate) {
  auto g = make_free_product(3, 3);
  auto p = type_iii_lambda_candidate(AlmostInvariantSet::afp_ends_at_identity(g), 0.9);
  const auto v = run(p, false, 2);
  ASSERT_EQ(v.tag, TypeTag::TypeIIIlambda);
  EXPECT_NEAR(*v.lambda, std::exp(-2.0 * std::fabs(std::log(0.9))), 1e-12);
  EXPECT_NEAR(*v.lambda, 0.81, 1e-12);
  EXPECT_EQ(v.stable, TypeTag::TypeIIIlambda);
  EXPECT_EQ(v.evidence.back().criterion, "stable-type-table");
}

TEST(Classify, HalfLineIsDissipative) {
  auto z = make_lattice(1);
  EXPECT_EQ(run(two_value_profile(AlmostInvariantSet::half_line(z), 0.25, 0.5)).tag, TypeTag::Dissipative);
}

TEST(Classify, AbelianBranches) {
  auto z = make_lattice(1);
  EXPECT_EQ(run(abelian_oscillating(z, 0.25), true).tag, TypeTag::TypeIII1);
  EXPECT_EQ(run(abelian_oscillating(z, 0.25), false).tag, TypeTag::Unknown);
  EXPECT_EQ(run(power_decay(z, 0.4, 1.0)).tag, TypeTag::TypeII1);
  const auto slow = run(power_decay(z, 0.4, 0.4), true);
  EXPECT_EQ(slow.tag, TypeTag::TypeIII1);
  EXPECT_EQ(slow.stable, TypeTag::TypeIII1);
  EXPECT_EQ(run(geometric_atomic(z)).tag, TypeTag::TypeI);
}

TEST(Classify, LocallyFiniteBranches) {
  auto chain = make_group(LocallyFiniteChain{{2}, ii_infinity_chain_levels(0.5, 6)});
  EXPECT_EQ(run(ii_infinity_profile(chain, 0.5, 6)).tag, TypeTag::TypeIIinf);
  const double lambda = 0.9;
  const std::vector<double> cycle{0.5, 1.0 / (1.0 + lambda)};
  auto c2 = make_group(LocallyFiniteChain{{2}, conservative_shell_levels(cycle, 9)});
  const auto v = run(shell_profile(c2, cycle, ShellRecipe{ShellRecipeKind::ShellEstimate, 9, lambda}));
  ASSERT_EQ(v.tag, TypeTag::TypeIIIlambda);
  EXPECT_NEAR(*v.lambda, lambda, 1e-12);
  const std::vector<double> dense{0.5, 1.0 / (1.0 + lambda), logistic(std::sqrt(2.0))};
  auto c3 = make_group(LocallyFiniteChain{{2}, conservative_shell_levels(dense, 3)});
  EXPECT_EQ(run(shell_profile(c3, dense, ShellRecipe{ShellRecipeKind::ShellEstimate, 3, lambda})).tag,
            TypeTag::TypeIII1);
}

TEST(Classify, AbelianNeverIIinf) {
  std::mt19937_64 rng(2024);
  auto z = make_lattice(1);
  std::uniform_real_distribution<double> u(0.05, 0.45);
  for (int i = 0; i < 40; ++i) {
    std::vector<MarginalProfile> ps{power_decay(z, u(rng) - 0.25, 0.2 + u(rng) * 3), abelian_oscillating(z, u(rng)),
                                    constant_profile(z, u(rng))};
    std::vector<std::pair<Element, double>> t;
    for (int k = -4; k <= 4; ++k) t.push_back({z->lattice({k}), u(rng)});
    ps.push_back(table_profile(z, t, u(rng)));
    for (const auto& p : ps) EXPECT_NE(run(p, true, 16).tag, TypeTag::TypeIIinf);
  }
}

TEST(Classify, Deterministic) {
  auto g = make_free_product(3, 3);
  auto p = type_iii_lambda_candidate(AlmostInvariantSet::afp_ends_at_identity(g), 0.9);
  const auto cons = assess_conservativeness(p, ConservativenessOptions{std::nullopt, 2, std::nullopt, false});
  const auto a = classify(p, cons), b = classify(p, cons);
  ASSERT_EQ(a.evidence.size(), b.evidence.size());
  for (std::size_t i = 0; i < a.evidence.size(); ++i) {
    EXPECT_EQ(a.evidence[i].criterion, b.evidence[i].criterion);
    EXPECT_EQ(a.evidence[i].inputs, b.evidence[i].inputs);
    EXPECT_EQ(a.evidence[i].outcome, b.evidence[i].outcome);
  }
  EXPECT_EQ(a.label(), b.label());
}
