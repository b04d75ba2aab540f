#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "btl/cocycle.hpp"
#include "btl/error.hpp"

using namespace btl;

namespace {

MarginalProfile half_line_profile() {
  auto z = make_lattice(1);
  return two_value_profile(AlmostInvariantSet::half_line(z), 0.25, 0.5);
}

ConfigurationWindow random_window(const std::vector<Element>& sites, std::mt19937_64& rng) {
  ConfigurationWindow x;
  x.sites = sites;
  for (std::size_t i = 0; i < sites.size(); ++i) x.bits.push_back(static_cast<std::uint8_t>(rng() & 1u));
  return x;
}

}  // namespace

TEST(Cocycle, TwoSetNormOnHalfLine) {
  auto z = make_lattice(1);
  auto p = type_iii_lambda_candidate(AlmostInvariantSet::half_line(z), 0.5);
  const auto n = cocycle_norm_sq(p, z->lattice({1}), 8);
  ASSERT_TRUE(n.exact.has_value());
  EXPECT_NEAR(*n.exact, 1.0 / 9.0, 1e-15);
  EXPECT_NEAR(n.partial, 1.0 / 9.0, 1e-15);
  EXPECT_NEAR(cocycle_value(p, z->lattice({1}), z->lattice({0})), 1.0 / 3.0 - 2.0 / 3.0, 1e-15);
}

TEST(Cocycle, KakutaniHalfLine) {
  auto p = half_line_profile();
  const auto& z = p.group();
  const double site = std::pow(std::sqrt(0.5) - std::sqrt(0.25), 2) + std::pow(std::sqrt(0.5) - std::sqrt(0.75), 2);
  const auto k = kakutani_sum(p, z.lattice({-10}), 20);
  EXPECT_NEAR(k.partial, 10 * site, 1e-12);
  ASSERT_TRUE(k.exact.has_value());
  EXPECT_NEAR(*k.exact, 10 * site, 1e-12);
  EXPECT_EQ(k.verdict, NonsingularityVerdict::Nonsingular);
}

TEST(Cocycle, TwoSetExactMatchesGenericSupportSum) {
  auto g = make_free_product(3, 3);
  auto w = AlmostInvariantSet::afp_ends_at_identity(g);
  auto p = type_iii_lambda_candidate(w, 0.9);
  const double delta = 1.0 / 19.0;
  for (const auto& x : g->enumerate_ball(2)) {
    const auto n = cocycle_norm_sq(p, x, 4);
    ASSERT_TRUE(n.exact.has_value());
    EXPECT_NEAR(*n.exact, delta * delta * 2 * g->word_length(x), 1e-14);
    EXPECT_NEAR(n.partial, *n.exact, 1e-14);
  }
}

TEST(Cocycle, KakutaniComparableToNormUnderDeltaBound) {
  auto z = make_lattice(1);
  std::vector<std::pair<Element, double>> entries;
  std::mt19937_64 rng(3);
  for (int i = -6; i <= 6; ++i) entries.push_back({z->lattice({i}), 0.2 + 0.6 * (rng() % 1000) / 1000.0});
  auto p = table_profile(z, entries, 0.5);
  const double d = *p.delta();
  for (int s = -5; s <= 5; ++s) {
    const auto g = z->lattice({s});
    const double norm = *cocycle_norm_sq(p, g, 16).exact;
    const double kak = *kakutani_sum(p, g, 16).exact;
    EXPECT_LE(kak, norm / (2 * d) + 1e-14);
    EXPECT_LE(norm, 2 * (1 - d) * kak + 1e-14);
  }
}

TEST(Cocycle, LogRnCocycleIdentity) {
  std::mt19937_64 rng(11);
  auto g = make_free_product(3, 3);
  auto p = type_iii_lambda_candidate(AlmostInvariantSet::afp_ends_at_identity(g), 0.9);
  const auto ball = g->enumerate_ball(2);
  for (int trial = 0; trial < 200; ++trial) {
    const Element a = ball[rng() % ball.size()], b = ball[rng() % ball.size()];
    auto sites = certified_window(p, {a, b, g->multiply(a, b)});
    for (int i = 0; i < 3; ++i) sites.push_back(ball[rng() % ball.size()]);
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    const auto x = random_window(sites, rng);
    const auto lhs = log_rn(p, g->multiply(a, b), x);
    const double rhs = log_rn(p, a, shift(*g, b, x)).log_rn + log_rn(p, b, x).log_rn;
    EXPECT_NEAR(lhs.log_rn, rhs, 1e-10);
    EXPECT_FALSE(lhs.truncated);
  }
}

TEST(Cocycle, TruncationFlag) {
  auto p = half_line_profile();
  const auto& z = p.group();
  ConfigurationWindow x{{z.lattice({0}), z.lattice({1})}, {0, 1}, 0, 0};
  EXPECT_FALSE(log_rn(p, z.lattice({-2}), x).truncated);
  EXPECT_TRUE(log_rn(p, z.lattice({-3}), x).truncated);
  auto osc = abelian_oscillating(make_lattice(1), 0.25);
  ConfigurationWindow y{{osc.group().lattice({0})}, {0}, 0, 0};
  EXPECT_TRUE(log_rn(osc, osc.group().lattice({1}), y).truncated);
}

TEST(Cocycle, PermutationExample) {
  auto z = make_lattice(1);
  const Element a = z->lattice({0}), b = z->lattice({1});
  auto p = table_profile(z, {{a, 1.0 / 3.0}, {b, 2.0 / 3.0}}, 0.5);
  ConfigurationWindow x{{a, b}, {0, 1}, 0, 0};
  EXPECT_NEAR(permutation_log_rn(p, a, b, x), std::log(4.0), 1e-14);
  const auto y = transpose(x, a, b);
  EXPECT_NEAR(permutation_log_rn(p, a, b, x) + permutation_log_rn(p, a, b, y), 0.0, 1e-15);
}

TEST(Cocycle, PermutationCompositionMatchesDirect) {
  std::mt19937_64 rng(5);
  auto z = make_lattice(1);
  std::vector<std::pair<Element, double>> entries;
  std::vector<Element> sites;
  for (int i = 0; i < 8; ++i) {
    sites.push_back(z->lattice({i}));
    entries.push_back({sites.back(), 0.1 + 0.8 * (rng() % 997) / 997.0});
  }
  auto p = table_profile(z, entries, 0.5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_window(sites, rng);
    std::vector<std::pair<Element, Element>> sigma;
    for (int k = 0; k < 5; ++k) {
      const auto i = rng() % 8, j = (i + 1 + rng() % 7) % 8;
      sigma.push_back({sites[i], sites[j]});
    }
    EXPECT_NEAR(permutation_log_rn_direct(p, sigma, x), permutation_log_rn_composed(p, sigma, x), 1e-12);
  }
}

TEST(Cocycle, GammaRhoSingleFlipMatchesPermutationRoute) {
  auto z = make_lattice(1);
  const double lambda = 0.3;
  const Element i = z->lattice({0}), j = z->lattice({5});
  auto p = table_profile(z, {{i, 0.8}, {j, lambda}}, 0.5);
  const double rho = std::log((1 - lambda) / lambda);
  ConfigurationWindow x{{i}, {0}, 0, 0};
  ConfigurationWindow xp{{i}, {1}, 0, 0};
  ConfigurationWindow pair{{i, j}, {0, 1}, 0, 0};
  EXPECT_NEAR(gamma_rho(p, rho, xp, x), permutation_log_rn(p, i, j, pair), 1e-14);
  EXPECT_NEAR(gamma_rho(p, rho, x, x), 0.0, 0.0);
}

TEST(Cocycle, CertifiedWindowRejectsUncertifiedProfiles) {
  auto osc = abelian_oscillating(make_lattice(1), 0.25);
  EXPECT_THROW(certified_window(osc, {osc.group().lattice({1})}), InapplicableError);
}
