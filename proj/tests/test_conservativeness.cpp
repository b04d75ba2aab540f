#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "btl/conservativeness.hpp"
#include "btl/error.hpp"

using namespace btl;

namespace {

MarginalProfile half_line_profile() {
  auto z = make_lattice(1);
  return two_value_profile(AlmostInvariantSet::half_line(z), 0.25, 0.5);
}

MarginalProfile local_table(std::uint64_t seed, int lo, int hi) {
  auto z = make_lattice(1);
  std::mt19937_64 rng(seed);
  std::vector<std::pair<Element, double>> entries;
  for (int i = lo; i <= hi; ++i) entries.push_back({z->lattice({i}), 0.15 + 0.7 * (rng() % 1000) / 1000.0});
  return table_profile(z, entries, 0.4);
}

std::vector<Element> interval(const GroupModel& z, int lo, int hi) {
  std::vector<Element> out;
  for (int i = lo; i <= hi; ++i) out.push_back(z.lattice({i}));
  return out;
}

}  // namespace

TEST(Kappa0, Arithmetic) {
  EXPECT_DOUBLE_EQ(kappa0(0.5), 4.0);
  EXPECT_NEAR(kappa0(0.25), 16.0 / 3.0, 1e-14);
  EXPECT_NEAR(kappa0(0.1), 100.0 / 9.0, 1e-13);
  EXPECT_THROW(kappa0(0.0), ValidationError);
  EXPECT_THROW(kappa0(0.6), ValidationError);
}

TEST(GrowthSeries, ConstantProfileCountsTheBall) {
  auto g = make_free_product(3, 3);
  auto p = constant_profile(g, 0.4);
  const auto s = growth_series(p, 7.0, 3);
  EXPECT_DOUBLE_EQ(s.partial, static_cast<double>(g->ball_size(3)));
  EXPECT_EQ(s.verdict, SeriesVerdict::Diverges);
  EXPECT_EQ(s.pattern, "uniform-bound");
}

TEST(GrowthSeries, FreeProductCandidateAgainstSphereOracle) {
  auto g = make_free_product(3, 3);
  auto p = type_iii_lambda_candidate(AlmostInvariantSet::afp_ends_at_identity(g), 0.9);
  const double delta = 0.9 / 1.9, d = 1.0 / 19.0;
  const double kappa = 1.01 * kappa0(delta);
  const auto s = growth_series(p, kappa, 3);
  double oracle = static_cast<double>(g->ball_size(0));
  for (int n = 1; n <= 3; ++n)
    oracle += static_cast<double>(g->sphere_count(n, SphereConvention::AfpEndsAnywhere)) *
              std::exp(-8.0 * kappa * d * d * n);
  EXPECT_NEAR(s.partial, oracle, 1e-9 * oracle);
  EXPECT_EQ(s.verdict, SeriesVerdict::Diverges);
  EXPECT_LT(8.0 * kappa * d * d, 2.0 * std::log(2.0));
  // Threshold is 8 kappa Delta^2 = 2 log 2.
  const double edge = 2.0 * std::log(2.0) / (8.0 * d * d);
  EXPECT_EQ(growth_series(p, 0.99 * edge, 0).verdict, SeriesVerdict::Diverges);
  EXPECT_EQ(growth_series(p, 1.01 * edge, 0).verdict, SeriesVerdict::Unknown);
}

TEST(GrowthSeries, MonotoneInRadiusAndKappa) {
  auto p = half_line_profile();
  double prev = 0.0;
  for (int r = 0; r <= 30; r += 5) {
    const double s = growth_series(p, 2.0, r).partial;
    EXPECT_GE(s, prev);
    prev = s;
  }
  EXPECT_GE(growth_series(p, 1.0, 20).partial, growth_series(p, 3.0, 20).partial);
}

TEST(GrowthSeries, UncertifiedHalfConstantProfileIsUnknown) {
  auto z = make_lattice(1);
  auto p = function_profile(
      z, [](const Element& g) { return g.code[0] <= 0 ? 0.5 : 0.5 - 0.3 / std::sqrt(1.0 + g.code[0]); }, 0.2,
      "HalfConstant");
  EXPECT_EQ(growth_series(p, default_kappa(0.2), 10).verdict, SeriesVerdict::Unknown);
  EXPECT_EQ(growth_series(p, default_kappa(0.2), 10, "declared").verdict, SeriesVerdict::Diverges);
}

TEST(GrowthSeries, NeedsDeltaBound) {
  auto p = geometric_atomic(make_lattice(1));
  EXPECT_THROW(growth_series(p, 1.0, 3), InapplicableError);
}

TEST(DissipativeBound, ConstantIsOne) {
  auto p = constant_profile(make_lattice(2), 0.3);
  EXPECT_EQ(dissipative_upper_bound(p, p.group().lattice({2, -1}), 10).product, 1.0);
}

TEST(DissipativeBound, HalfLineProduct) {
  auto p = half_line_profile();
  const double rho = std::sqrt(1.0 / 8.0) + std::sqrt(3.0 / 8.0);
  EXPECT_NEAR(rho, 0.96593, 1e-5);
  const auto b = dissipative_upper_bound(p, p.group().lattice({-10}), 20);
  EXPECT_NEAR(b.product, std::pow(rho, 10), 1e-13);
  EXPECT_TRUE(b.exact);
  EXPECT_LE(b.product, b.hellinger_bound + 1e-10);
}

TEST(DissipativeBound, AtMostOneAndOneOnlyWhenInvariant) {
  auto p = local_table(9, -3, 3);
  const auto& z = p.group();
  for (int s = -6; s <= 6; ++s) {
    const auto g = z.lattice({s});
    const double b = dissipative_upper_bound(p, g, 12).product;
    EXPECT_LE(b, 1.0);
    EXPECT_EQ(b == 1.0, s == 0);
  }
}

TEST(Assess, HalfLineIsDissipative) {
  const auto v = assess_conservativeness(half_line_profile());
  EXPECT_EQ(v.tag, ConservativenessTag::Dissipative);
  ASSERT_TRUE(v.dissipative.has_value());
  const double rho = affinity(0.25, 0.5);
  EXPECT_LE(v.dissipative->partial, 1.0 + 2.0 * rho / (1.0 - rho));
  EXPECT_FALSE(v.evidence.empty());
}

TEST(Assess, FreeProductCandidateIsStronglyConservative) {
  auto g = make_free_product(3, 3);
  auto p = type_iii_lambda_candidate(AlmostInvariantSet::afp_ends_at_identity(g), 0.9);
  ConservativenessOptions o;
  o.radius = 2;
  const auto v = assess_conservativeness(p, o);
  EXPECT_EQ(v.tag, ConservativenessTag::StronglyConservative);
  EXPECT_EQ(v.dissipative->verdict, SeriesVerdict::Unknown);
  EXPECT_GT(*v.kappa, *v.kappa0);
}

TEST(Assess, DeclaredConservativeNeedsAmenability) {
  ConservativenessOptions o;
  o.declared_conservative = true;
  const auto v = assess_conservativeness(abelian_oscillating(make_lattice(1), 0.25), o);
  EXPECT_EQ(v.tag, ConservativenessTag::ConservativeAmenable);
  EXPECT_TRUE(v.assumed);
  auto g = make_free_product(3, 3);
  auto f = function_profile(g, [](const Element& x) { return 0.3 + 0.01 * (x.code.size() % 3); }, 0.3, "Opaque");
  o.radius = 1;
  EXPECT_EQ(assess_conservativeness(f, o).tag, ConservativenessTag::Unknown);
}

TEST(Window, MeanOneAndInverseProduct) {
  auto p = local_table(21, 0, 5);
  const auto& z = p.group();
  const auto sites = interval(z, -4, 9);
  for (int s = -3; s <= 3; ++s) {
    const auto k = z.lattice({s});
    EXPECT_NEAR(exhaustive_rn_moment(p, k, sites, +1), 1.0, 1e-12);
    const double inv = exhaustive_rn_moment(p, k, sites, -1);
    EXPECT_NEAR(inv, inverse_rn_integral(p, k), 1e-10 * inv);
    const double norm = *cocycle_norm_sq(p, k, 16).exact;
    EXPECT_LE(inv, std::exp(kappa0(*p.delta()) * norm) * (1 + 1e-12));
  }
  EXPECT_NEAR(integral_factor(0.5, 0.25), 4.0 / 3.0, 1e-15);
}

TEST(StrongRecurrence, DiracIsOne) {
  for (const auto& p : {local_table(3, -2, 2), half_line_profile(), constant_profile(make_lattice(1), 0.2)})
    EXPECT_EQ(strong_recurrence_lhs(dirac(p.group().identity()), p), 1.0);
}

TEST(StrongRecurrence, UniformIntervalWithConstantProfile) {
  auto z = make_lattice(1);
  auto p = constant_profile(z, 0.35);
  double prev = 2.0;
  for (int n = 1; n <= 6; ++n) {
    const double v = strong_recurrence_lhs(uniform_on_folner_box(*z, n), p);
    EXPECT_NEAR(v, 1.0 / n, 1e-15);
    EXPECT_LT(v, prev);
    prev = v;
    EXPECT_NEAR(eta_condition(uniform_on_folner_box(*z, n), p, 5.0), 1.0 / n, 1e-15);
  }
}

TEST(StrongRecurrence, ConvexityBound) {
  auto z = make_lattice(1);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto p = local_table(seed, 0, 3);
    const auto eta = uniform_on(interval(*z, 0, 2));
    const double lhs = strong_recurrence_lhs(eta, p);
    EXPECT_LE(lhs, recurrence_upper_bound(eta, p) + 1e-12);
    EXPECT_LE(recurrence_upper_bound(eta, p), eta_condition(eta, p, kappa0(*p.delta())) * (1 + 1e-12));
  }
}

TEST(ThetaEta, UnitalPositiveMeasurePreserving) {
  auto p = local_table(17, 2, 5);
  const auto& z = p.group();
  const auto eta = uniform_on(interval(z, 0, 3));
  std::mt19937_64 rng(99);
  WindowFunction one{interval(z, 0, 5), std::vector<double>(64, 1.0)};
  const auto t1 = theta_eta(eta, one, p);
  for (double v : t1.values) EXPECT_NEAR(v, 1.0, 1e-12);
  WindowFunction f{interval(z, 0, 9), {}};
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 1024; ++i) f.values.push_back(u(rng));
  const auto tf = theta_eta(eta, f, p);
  for (double v : tf.values) EXPECT_GE(v, 0.0);
  EXPECT_NEAR(window_expectation(p, tf), window_expectation(p, f), 1e-10);
}

TEST(ThetaEta, WindowBudget) {
  auto z = make_lattice(1);
  auto p = constant_profile(z, 0.5);
  WindowFunction f{interval(*z, 0, 17), std::vector<double>(std::size_t{1} << 18, 1.0)};
  EXPECT_THROW(theta_eta(uniform_on(interval(*z, 0, 3)), f, p), BudgetError);
}

TEST(EtaMeasure, Builders) {
  auto z2 = make_lattice(2);
  const auto box = uniform_on_folner_box(*z2, 3);
  EXPECT_EQ(box.weights.size(), 9u);
  EXPECT_NO_THROW(box.validate());
  EXPECT_NEAR(box.at(z2->lattice({2, 1})), 1.0 / 9.0, 1e-15);
  EXPECT_EQ(box.at(z2->lattice({3, 0})), 0.0);
  auto p = half_line_profile();
  const auto sub = uniform_on_sublevel(p, 3.0 / 16.0 + 1e-12, 10);
  EXPECT_EQ(sub.weights.size(), 7u);  // |g| <= 3 since ||c_g||^2 = |g| / 16
  EXPECT_THROW((EtaMeasure{{{z2->identity(), 0.5}}}.validate()), ValidationError);
}

TEST(ShellEstimate, ProductFormulaMatchesInverseIntegral) {
  auto chain = make_dyadic_chain();
  const std::vector<double> cycle{0.5, 0.3, 0.7};
  auto p = shell_profile(chain, cycle);
  const auto& sp = std::get<cert::ShellProfile>(p.certificate());
  for (int n = 1; n <= 5; ++n) {
    const double predicted = std::exp(shell_log_integral(*chain, sp.level_value, n));
    int checked = 0;
    for (const auto& g : chain->enumerate_sphere(n)) {
      if (chain_level(*chain, g) != n) continue;
      EXPECT_NEAR(inverse_rn_integral(p, g), predicted, 1e-10 * predicted);
      ++checked;
    }
    EXPECT_GT(checked, 0);
    if (n >= 2) EXPECT_GT(predicted, 1.0);
  }
}

TEST(ShellEstimate, RecipeLevelsAreMinimalAndValid) {
  const double lambda = 0.9;
  const std::vector<double> cycle{0.5, 1.0 / (1.0 + lambda)};
  const auto levels = conservative_shell_levels(cycle, 9);
  ASSERT_EQ(levels.size(), 9u);
  auto chain = make_group(LocallyFiniteChain{{2}, levels});
  auto lv = [&](int n) { return cycle[static_cast<std::size_t>(n - 1) % 2]; };
  for (int n = 1; n <= 9; ++n) {
    EXPECT_LT(shell_estimate(*chain, lv, n), 1.0 / n);
    if (n >= 2 && levels[n - 1] - 1 > levels[n - 2]) {
      auto shorter = levels;
      shorter[n - 1] -= 1;
      auto c2 = make_group(LocallyFiniteChain{{2}, shorter});
      EXPECT_GE(shell_estimate(*c2, lv, n), 1.0 / n);
    }
  }
  auto p = shell_profile(chain, cycle, ShellRecipe{ShellRecipeKind::ShellEstimate, 9, lambda});
  const auto v = assess_conservativeness(p);
  EXPECT_EQ(v.tag, ConservativenessTag::ConservativeAmenable);
  EXPECT_EQ(v.evidence.back().criterion, "shell-integral-estimate");
}

TEST(ShellEstimate, TwoSidedRecipeIsConservative) {
  auto chain = make_group(LocallyFiniteChain{{2}, ii_infinity_chain_levels(0.5, 6)});
  const auto v = assess_conservativeness(ii_infinity_profile(chain, 0.5, 6));
  EXPECT_EQ(v.tag, ConservativenessTag::ConservativeAmenable);
  EXPECT_EQ(v.evidence.back().criterion, "two-sided-chain-recipe");
}
