#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <random>
#include <set>

#include "btl/error.hpp"
#include "btl/group.hpp"

using namespace btl;

namespace {

GroupPtr hnn_z4_z2() {
  // C = Z/2 = {0, 2} inside Z/4, alpha = identity embedding.
  return make_group(HnnExtension{FiniteGroup::cyclic(4), FiniteGroup::cyclic(2), {0, 2}, {0, 2}});
}

GroupPtr hnn_z4_z2_twisted() {
  // Z/4 over Z/2 with alpha the same embedding; A = Z/2 x Z/2 over Z/2 twisted below.
  auto klein = FiniteGroup::from_table({{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}});
  return make_group(HnnExtension{klein, FiniteGroup::cyclic(2), {0, 1}, {0, 2}});
}

GroupPtr afp_z4_z6_over_z2() {
  return make_group(AmalgamatedProduct{FiniteGroup::cyclic(4), FiniteGroup::cyclic(6), FiniteGroup::cyclic(2), {0, 2}, {0, 3}});
}

Element random_element(const GroupModel& g, std::mt19937_64& rng, int letters) {
  const auto gens = g.generators(3);
  Element x = g.identity();
  for (int i = 0; i < letters; ++i) x = g.multiply(x, gens[rng() % gens.size()]);
  return x;
}

std::vector<GroupPtr> all_models() {
  return {make_free_product(3, 3), make_free_product(2, 4), hnn_z4_z2(), hnn_z4_z2_twisted(), afp_z4_z6_over_z2(),
          make_lattice(1), make_lattice(2), make_dyadic_chain()};
}

}  // namespace

TEST(FiniteGroup, RejectsNonAssociativeTable) {
  EXPECT_THROW(FiniteGroup::from_table({{0, 1, 2}, {1, 0, 1}, {2, 1, 0}}), StructuralError);
  // Latin square with identity but not associative (order 5 loop).
  EXPECT_THROW(FiniteGroup::from_table({{0, 1, 2, 3, 4},
                                        {1, 0, 3, 4, 2},
                                        {2, 4, 0, 1, 3},
                                        {3, 2, 4, 0, 1},
                                        {4, 3, 1, 2, 0}}),
               StructuralError);
}

TEST(FiniteGroup, CosetRepresentativesAreSmallestIndices) {
  const auto a = FiniteGroup::cyclic(6);
  CosetTable t(a, {0, 3});
  EXPECT_EQ(t.index(), 3);
  EXPECT_EQ(t.reps(), (std::vector<int>{0, 1, 2}));
  for (int x = 0; x < 6; ++x) EXPECT_EQ(a.mul(t.rep(x), t.image(t.sub_part(x))), x);
}

TEST(GroupModel, RejectsNonHomomorphicEmbedding) {
  EXPECT_THROW(make_group(AmalgamatedProduct{FiniteGroup::cyclic(4), FiniteGroup::cyclic(4), FiniteGroup::cyclic(2),
                                             {0, 1}, {0, 2}}),
               StructuralError);
  EXPECT_THROW(make_group(AmalgamatedProduct{FiniteGroup::cyclic(2), FiniteGroup::cyclic(4), FiniteGroup::cyclic(2),
                                             {0, 1}, {0, 2}}),
               StructuralError);
}

TEST(GroupModel, FreeProductNormalFormExample) {
  auto g = make_free_product(3, 3);
  Element ab = g->multiply(g->afp_a(1), g->afp_b(1));
  Element x = g->multiply(ab, g->afp_a(2));
  EXPECT_EQ(x.code, (std::vector<std::int32_t>{1, 1, 2}));
  EXPECT_EQ(g->to_string(x), "a1 b1 a2");
  EXPECT_EQ(g->word_length(x), 1);
}

TEST(GroupModel, HnnPinchReducesWord) {
  auto g = hnn_z4_z2();
  // t^{-1} a2 t = alpha(a2) = a2
  Element w = g->parse("T a2 t");
  EXPECT_EQ(w, g->hnn_a(2));
  Element v = g->parse("T a1 t");
  EXPECT_EQ(g->word_length(v), 2);
  EXPECT_TRUE(g->is_britton_reduced(v));
}

TEST(GroupModel, GroupAxiomsOnRandomWords) {
  std::mt19937_64 rng(7);
  for (const auto& g : all_models()) {
    for (int trial = 0; trial < 300; ++trial) {
      Element x = random_element(*g, rng, 1 + trial % 9);
      Element y = random_element(*g, rng, 1 + trial % 5);
      Element z = random_element(*g, rng, 1 + trial % 7);
      ASSERT_TRUE(g->is_valid(x)) << g->describe();
      EXPECT_EQ(g->multiply(g->multiply(x, y), z), g->multiply(x, g->multiply(y, z))) << g->describe();
      EXPECT_EQ(g->multiply(x, g->inverse(x)), g->identity());
      EXPECT_EQ(g->multiply(g->inverse(x), x), g->identity());
      EXPECT_EQ(g->multiply(x, g->identity()), x);
      EXPECT_EQ(g->parse(g->to_string(x)), x);
    }
  }
}

TEST(GroupModel, BallIsClosedUnderInverseAndDuplicateFree) {
  for (const auto& g : all_models()) {
    const int r = g->family() == Family::IntegerLattice ? 6 : 3;
    auto ball = g->enumerate_ball(r);
    std::set<Element> s(ball.begin(), ball.end());
    EXPECT_EQ(s.size(), ball.size());
    EXPECT_EQ(ball.size(), g->ball_size(r));
    for (const auto& x : ball) {
      EXPECT_TRUE(s.count(g->inverse(x))) << g->to_string(x);
      EXPECT_TRUE(g->is_valid(x));
      EXPECT_LE(g->word_length(x), r);
    }
    EXPECT_TRUE(std::is_sorted(ball.begin(), ball.end(), [&](const Element& a, const Element& b) { return g->less(a, b); }));
  }
}

TEST(GroupModel, StructuralBallMatchesBreadthFirstOracle) {
  for (const auto& g : all_models()) {
    const int r = g->family() == Family::IntegerLattice ? 5 : 3;
    EXPECT_EQ(g->enumerate_ball(r), g->bfs_ball(r)) << g->describe();
  }
}

TEST(GroupModel, LatticeBallExamples) {
  auto z = make_lattice(1);
  auto ball = z->enumerate_ball(2);
  std::vector<std::int32_t> values;
  for (auto& x : ball) values.push_back(x.code[0]);
  EXPECT_EQ(values, (std::vector<std::int32_t>{0, -1, 1, -2, 2}));
  EXPECT_EQ(make_lattice(2)->ball_size(3), 25u);
}

TEST(GroupModel, DyadicChainBall) {
  auto c = make_dyadic_chain();
  EXPECT_EQ(c->enumerate_ball(3).size(), 8u);
  EXPECT_EQ(c->word_length(c->chain({0, 0, 1})), 3);
  EXPECT_EQ(c->word_length(c->identity()), 0);
  auto sparse = make_dyadic_chain({1, 3, 6});
  EXPECT_EQ(sparse->ball_size(2), 8u);
  EXPECT_EQ(sparse->word_length(sparse->chain({0, 1})), 2);
  EXPECT_EQ(sparse->chain_level_coords(5), 8);
}

TEST(GroupModel, SphereCountFormulaValues) {
  auto g = make_free_product(3, 3);
  EXPECT_EQ(g->sphere_count(1, SphereConvention::AfpEndsAnywhere), 18u);
  EXPECT_EQ(g->sphere_count(2, SphereConvention::AfpEndsAnywhere), 72u);
  for (int n = 1; n <= 6; ++n)
    EXPECT_EQ(g->sphere_count(n, SphereConvention::AfpEndsAnywhere), 9u * (1u << (2 * n - 1)));
  EXPECT_EQ(hnn_z4_z2()->sphere_count(3, SphereConvention::HnnEndsAnywhere), 144u);
  EXPECT_THROW(g->sphere_count(2, SphereConvention::HnnEndsAnywhere), StructuralError);
  EXPECT_THROW(make_lattice(1)->sphere_count(1, SphereConvention::AfpEndsAnywhere), UnsupportedError);
}

TEST(GroupModel, SphereCountMatchesEnumeration) {
  for (const auto& g : {make_free_product(3, 3), make_free_product(2, 4), afp_z4_z6_over_z2()}) {
    auto ball = g->bfs_ball(4);
    for (int n = 1; n <= 4; ++n) {
      const auto count = std::count_if(ball.begin(), ball.end(), [&](const Element& x) { return g->word_length(x) == n; });
      EXPECT_EQ(static_cast<std::uint64_t>(count), g->sphere_count(n, SphereConvention::AfpEndsAnywhere));
    }
  }
  for (const auto& g : {hnn_z4_z2(), hnn_z4_z2_twisted()}) {
    auto ball = g->bfs_ball(4);
    for (int n = 1; n <= 4; ++n) {
      const auto count = std::count_if(ball.begin(), ball.end(), [&](const Element& x) { return g->word_length(x) == n; });
      EXPECT_EQ(static_cast<std::uint64_t>(count), g->sphere_count(n, SphereConvention::HnnEndsAnywhere));
    }
  }
}

TEST(GroupModel, HnnEnumerationIsBrittonReduced) {
  auto g = hnn_z4_z2_twisted();
  for (const auto& x : g->enumerate_ball(4)) EXPECT_TRUE(g->is_britton_reduced(x));
}

TEST(GroupModel, BudgetErrorReportsAttainableRadius) {
  auto g = make_group(AmalgamatedProduct{FiniteGroup::cyclic(3), FiniteGroup::cyclic(3), FiniteGroup::cyclic(1), {0}, {0}},
                      1000);
  try {
    g->enumerate_ball(6);
    FAIL() << "expected BudgetError";
  } catch (const BudgetError& e) {
    EXPECT_EQ(e.attainable_radius(), 3);
    EXPECT_LE(g->ball_size(e.attainable_radius()), 1000u);
    EXPECT_GT(g->ball_size(e.attainable_radius() + 1), 1000u);
  }
}

TEST(GroupModel, MismatchedModelsAreRejected) {
  auto a = make_free_product(3, 3);
  auto b = make_free_product(2, 4);
  EXPECT_THROW(a->multiply(a->afp_b(1), b->afp_b(1)), StructuralError);
}

TEST(GroupModel, EndsAndAmenability) {
  EXPECT_EQ(make_lattice(1)->ends(), Ends::Two);
  EXPECT_EQ(make_lattice(3)->ends(), Ends::One);
  EXPECT_EQ(make_free_product(2, 2)->ends(), Ends::Two);
  EXPECT_TRUE(make_free_product(2, 2)->is_amenable());
  EXPECT_EQ(make_free_product(3, 3)->ends(), Ends::Infinite);
  EXPECT_FALSE(make_free_product(3, 3)->is_amenable());
  EXPECT_TRUE(make_dyadic_chain()->is_amenable());
  EXPECT_TRUE(make_dyadic_chain()->is_locally_finite());
}
