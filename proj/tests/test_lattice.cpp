#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "oracles.hpp"

using namespace adjoint;

namespace {

using Pairs = std::vector<std::pair<std::string, std::string>>;

LatticePtr chain3() {
  std::vector<std::string> labels{"0", "m", "1"};
  Pairs order{{"0", "m"}, {"m", "1"}};
  return build_from_order(labels, order);
}

LatticePtr diamond(const std::string& shape) {
  std::vector<std::string> labels{"0", "a", "b", "c", "1"};
  Pairs order{{"0", "a"}, {"0", "b"}, {"0", "c"}, {"a", "1"}, {"b", "1"}, {"c", "1"}};
  if (shape == "N5") order = {{"0", "a"}, {"a", "b"}, {"b", "1"}, {"0", "c"}, {"c", "1"}};
  return build_from_order(labels, order);
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::internal;
}

}  // namespace

TEST(Powerset, IdsAreBitmasks) {
  const auto worlds = oracle::world_names(3);
  auto l = powerset_lattice(worlds);
  ASSERT_EQ(l->size(), 8u);
  EXPECT_EQ(l->bottom().id, 0u);
  EXPECT_EQ(l->top().id, 7u);
  for (Element a : l->elements())
    for (Element b : l->elements()) {
      EXPECT_EQ(l->join(a, b).id, a.id | b.id);
      EXPECT_EQ(l->meet(a, b).id, a.id & b.id);
      EXPECT_EQ(l->leq(a, b), (a.id & ~b.id) == 0);
    }
  EXPECT_TRUE(l->is_boolean());
  EXPECT_EQ(l->complement(Element{5}).id, 2u);
  EXPECT_EQ(l->height(), 3u);
  EXPECT_EQ(l->join_irreducibles().size(), 3u);
  EXPECT_EQ(l->name(Element{5}), "{w0,w2}");
  EXPECT_EQ(l->find("{w0,w2}")->id, 5u);
}

TEST(Powerset, SingleWorld) {
  std::vector<std::string> w{"only"};
  auto l = powerset_lattice(w);
  EXPECT_EQ(l->size(), 2u);
  EXPECT_TRUE(l->is_boolean());
}

TEST(FromOrder, ChainIsHeytingNotBoolean) {
  auto l = chain3();
  EXPECT_TRUE(l->is_distributive());
  EXPECT_FALSE(l->is_boolean());
  const Element zero = *l->find("0"), m = *l->find("m"), one = *l->find("1");
  EXPECT_EQ(l->heyting_negation(m), zero);
  EXPECT_EQ(l->heyting_negation(zero), one);
  EXPECT_EQ(l->implies(one, m), m);
  EXPECT_EQ(code_of([&] { l->complement(m); }), Errc::not_boolean);
  EXPECT_EQ(l->height(), 2u);
}

TEST(FromOrder, DiamondsAreNotDistributive) {
  for (const char* shape : {"M3", "N5"}) {
    auto l = diamond(shape);
    EXPECT_FALSE(l->is_distributive()) << shape;
    EXPECT_FALSE(l->is_boolean()) << shape;
    EXPECT_EQ(code_of([&] { l->implies(l->top(), l->bottom()); }), Errc::not_distributive);
  }
  auto n5 = diamond("N5");
  EXPECT_EQ(n5->height(), 3u);
  EXPECT_EQ(n5->join(*n5->find("a"), *n5->find("c")), n5->top());
}

TEST(FromOrder, RejectsBadInput) {
  std::vector<std::string> ab{"a", "b"};
  Pairs cyc{{"a", "b"}, {"b", "a"}};
  EXPECT_EQ(code_of([&] { build_from_order(ab, cyc); }), Errc::not_a_poset);
  Pairs none;
  EXPECT_EQ(code_of([&] { build_from_order(ab, none); }), Errc::not_a_lattice);
  std::vector<std::string> dup{"a", "a"};
  EXPECT_EQ(code_of([&] { build_from_order(dup, none); }), Errc::duplicate_label);
  Pairs stray{{"a", "z"}};
  EXPECT_EQ(code_of([&] { build_from_order(ab, stray); }), Errc::unknown_label);
  std::vector<std::string> empty;
  EXPECT_EQ(code_of([&] { build_from_order(empty, none); }), Errc::empty_carrier);

  // Two incomparable upper bounds of {a, b} with nothing between.
  std::vector<std::string> bowtie{"0", "a", "b", "c", "d", "1"};
  Pairs bt{{"0", "a"}, {"0", "b"}, {"a", "c"}, {"a", "d"}, {"b", "c"}, {"b", "d"}, {"c", "1"}, {"d", "1"}};
  EXPECT_EQ(code_of([&] { build_from_order(bowtie, bt); }), Errc::not_a_lattice);
}

TEST(Limits, Caps) {
  const auto nine = oracle::world_names(9);
  EXPECT_EQ(code_of([&] { powerset_lattice(nine); }), Errc::too_large);
  LatticeLimits roomy{1024, 16};
  EXPECT_EQ(powerset_lattice(nine, roomy)->size(), 512u);
  const auto many = oracle::world_names(17);
  EXPECT_EQ(code_of([&] { powerset_lattice(many, roomy); }), Errc::too_many_worlds);
  std::vector<std::string> w{"x", "x"};
  EXPECT_EQ(code_of([&] { powerset_lattice(w); }), Errc::duplicate_label);
  std::vector<std::string> three{"0", "m", "1"};
  Pairs order{{"0", "m"}, {"m", "1"}};
  EXPECT_EQ(code_of([&] { build_from_order(three, order, LatticeLimits{2, 16}); }), Errc::too_large);
}

TEST(Limits, Environment) {
  ::setenv("ADJOINT_KIT_MAX_LATTICE", "600", 1);
  EXPECT_EQ(LatticeLimits::from_environment().max_elements, 600u);
  ::setenv("ADJOINT_KIT_MAX_LATTICE", "junk", 1);
  EXPECT_EQ(LatticeLimits::from_environment().max_elements, 256u);
  ::unsetenv("ADJOINT_KIT_MAX_LATTICE");
  EXPECT_EQ(LatticeLimits::from_environment().max_elements, 256u);
}

TEST(FromOrder, AgreesWithSetOracle) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = oracle::random_set_lattice(rng, 5, 32);
    auto l = oracle::to_library(s);
    ASSERT_EQ(l->size(), s.size());
    auto el = [&](oracle::Mask m) { return *l->find(oracle::mask_label(m)); };
    for (auto a : s.members)
      for (auto b : s.members) {
        ASSERT_EQ(l->join(el(a), el(b)), el(s.join(a, b)));
        ASSERT_EQ(l->meet(el(a), el(b)), el(s.meet(a, b)));
        ASSERT_EQ(l->leq(el(a), el(b)), oracle::SetLattice::leq(a, b));
      }
    EXPECT_EQ(l->bottom(), el(s.members.front()));
    EXPECT_EQ(l->top(), el(s.members.back()));

    // x is join-irreducible iff x differs from the join of everything strictly below it.
    for (auto x : s.members) {
      oracle::Mask below = s.members.front();
      for (auto y : s.members)
        if (y != x && oracle::SetLattice::leq(y, x)) below = s.join(below, y);
      const bool irreducible = x != s.members.front() && below != x;
      EXPECT_EQ(l->is_join_irreducible(el(x)), irreducible);
    }
  }
}

TEST(FromOrder, DistributivityAgreesWithBruteForce) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 150; ++trial) {
    const auto s = oracle::random_set_lattice(rng, 4, 16);
    auto l = oracle::to_library(s);
    bool distributive = true;
    for (auto a : s.members)
      for (auto b : s.members)
        for (auto c : s.members)
          if (s.meet(a, s.join(b, c)) != s.join(s.meet(a, b), s.meet(a, c))) distributive = false;
    EXPECT_EQ(l->is_distributive(), distributive);
  }
}
