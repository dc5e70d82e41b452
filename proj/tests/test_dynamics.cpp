#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace adjoint;

namespace {

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::internal;
}

// Worlds h0 t0 h1; bits 1, 2, 4.
constexpr std::uint32_t h0 = 1, t0 = 2, h1 = 4, H = h0 | h1, T = t0;

struct Coin {
  LatticePtr l;
  Mama mama;
};

Coin coin() {
  std::vector<std::string> w{"h0", "t0", "h1"};
  auto l = powerset_lattice(w);
  auto ab = oracle::relation_map(l, {h0 | t0, h0 | t0, h1});
  return {l, Mama(l, {{"A", ab}, {"B", ab}, {"C", identity_map(l)}})};
}

LatticeMap honest_update(const LatticePtr& l) { return oracle::relation_map(l, {h1, 0, 0}); }

ActionAppearance same_for_all(const std::vector<std::string>& actions) {
  ActionAppearance aa;
  for (const char* agent : {"A", "B", "C"})
    for (const auto& a : actions) aa[agent][a] = a;
  return aa;
}

}  // namespace

TEST(Dynamic, HonestCoinBuilds) {
  auto c = coin();
  std::vector<Element> ker{Element{T}};
  auto alg = DynamicAlgebra::build(c.mama, {{{"a", true}, honest_update(c.l), ker}}, same_for_all({"a"}),
                                   {Element{H}, Element{T}});
  EXPECT_TRUE(alg.has_action("a"));
  EXPECT_TRUE(alg.label("a").communication);
  EXPECT_EQ(alg.action_seen_by("A", "a"), "a");
  const auto k = kernel(alg, "a");
  // Everything missing h0 is annihilated; the declaration names only part of it.
  ASSERT_EQ(k.size(), 4u);
  EXPECT_EQ(k[1].id, T);
  EXPECT_EQ(k[3].id, T | h1);
  EXPECT_TRUE(check_declared_kernels(alg).empty());
  EXPECT_EQ(kernel_matches_declaration(alg, "a"), false);

  // After a, A is informed of H exactly at h0 (and h1 is unreachable from t0).
  const Element after = update_result(alg, "a", information(alg.mama(), "A", Element{H}));
  EXPECT_EQ(after.id, oracle::box({h1, 0, 0}, oracle::box({h0 | t0, h0 | t0, h1}, H)));
  EXPECT_TRUE(c.l->leq(Element{H}, after));
  EXPECT_TRUE(validate_fact_stability(alg).passed());
  EXPECT_FALSE(validate_fact_stability(alg, true).passed());
  for (const auto& v : validate_fact_stability(alg, true).converse) EXPECT_TRUE(v.converse);
  EXPECT_EQ(code_of([&] { alg.update("zz"); }), Errc::unknown_action);
  EXPECT_EQ(code_of([&] { alg.action_seen_by("Z", "a"); }), Errc::unknown_agent);
}

TEST(Dynamic, NoMiracleViolationIsReported) {
  auto c = coin();
  // A sees h1 -> h0, so after a A would "see" h0 while before it h1 was invisible.
  auto a_map = oracle::relation_map(c.l, {h0 | t0, h0 | t0, h0});
  Mama m(c.l, {{"A", a_map}});
  ActionAppearance aa;
  aa["A"]["a"] = "a";
  try {
    DynamicAlgebra::build(m, {{{"a", false}, honest_update(c.l), std::nullopt}}, aa, {});
    FAIL() << "expected a violation";
  } catch (const AxiomViolation& e) {
    EXPECT_EQ(e.code(), Errc::axiom_violation);
    ASSERT_FALSE(e.report().no_miracle.empty());
    EXPECT_NE(std::string(e.what()).find("NoMiracleViolation(agent A, action a"), std::string::npos);
  }
}

TEST(Dynamic, KernelAndFactChecks) {
  auto c = coin();
  std::vector<Element> wrong{Element{H}};
  try {
    DynamicAlgebra::build(c.mama, {{{"a", true}, honest_update(c.l), wrong}}, same_for_all({"a"}), {});
    FAIL();
  } catch (const AxiomViolation& e) {
    ASSERT_EQ(e.report().kernels.size(), 1u);
    EXPECT_EQ(e.report().kernels[0].element.id, H);
  }
  // Moves t0 onto h1: not fact-stable for T.
  auto leak = oracle::relation_map(c.l, {h1, h1, 0});
  try {
    DynamicAlgebra::build(c.mama, {{{"a", true}, leak, std::nullopt}}, same_for_all({"a"}), {Element{T}});
    FAIL();
  } catch (const AxiomViolation& e) {
    EXPECT_FALSE(e.report().fact_forward.empty());
  }
}

TEST(Dynamic, StructuralErrors) {
  auto c = coin();
  auto h = honest_update(c.l);
  EXPECT_EQ(code_of([&] { DynamicAlgebra::build(c.mama, {{{"a", true}, h, {}}}, {}, {}); }),
            Errc::incomplete_action_appearance);
  auto aa = same_for_all({"a"});
  aa["A"]["a"] = "ghost";
  EXPECT_EQ(code_of([&] { DynamicAlgebra::build(c.mama, {{{"a", true}, h, {}}}, aa, {}); }), Errc::unknown_action);
  EXPECT_EQ(code_of([&] { DynamicAlgebra::build(c.mama, {{{"a", true}, h, {}}, {{"a", true}, h, {}}}, aa, {}); }),
            Errc::duplicate_label);
  auto extra = same_for_all({"a"});
  extra["Z"]["a"] = "a";
  EXPECT_EQ(code_of([&] { DynamicAlgebra::build(c.mama, {{{"a", true}, h, {}}}, extra, {}); }), Errc::unknown_agent);
  auto alg = DynamicAlgebra::build(c.mama, {{{"a", true}, h, {}}}, same_for_all({"a"}), {});
  EXPECT_EQ(code_of([&] { eventually(alg, {}, Element{0}); }), Errc::empty_action_set);
}

TEST(Dynamic, NoMiracleOnGeneratorsMatchesFullCheck) {
  std::mt19937 rng(41);
  const auto w = oracle::world_names(3);
  auto l = powerset_lattice(w);
  int built = 0, rejected = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto fa = oracle::random_relation(rng, 3);
    const auto ha = oracle::random_relation(rng, 3);
    const auto hb = oracle::random_relation(rng, 3);
    Mama m(l, {{"A", oracle::relation_map(l, fa)}});
    ActionAppearance aa;
    aa["A"]["a"] = "b";
    aa["A"]["b"] = "b";
    // Brute force over every subset, straight from the relations.
    bool ok = true;
    for (oracle::Mask x = 0; x < 8; ++x) {
      if ((oracle::image(fa, oracle::image(ha, x)) & ~oracle::image(hb, oracle::image(fa, x))) != 0) ok = false;
      if ((oracle::image(fa, oracle::image(hb, x)) & ~oracle::image(hb, oracle::image(fa, x))) != 0) ok = false;
    }
    std::vector<ActionSpec> specs{{{"a", false}, oracle::relation_map(l, ha), std::nullopt},
                                  {{"b", false}, oracle::relation_map(l, hb), std::nullopt}};
    bool accepted = true;
    try {
      auto alg = DynamicAlgebra::build(m, specs, aa, {});
      EXPECT_TRUE(check_no_miracle(alg, true).empty());
    } catch (const AxiomViolation&) {
      accepted = false;
    }
    EXPECT_EQ(accepted, ok);
    (accepted ? built : rejected)++;
  }
  EXPECT_GT(built, 0);
  EXPECT_GT(rejected, 0);
}

TEST(Dynamic, Eventually) {
  auto c = coin();
  auto alg = DynamicAlgebra::build(c.mama, {{{"a", true}, honest_update(c.l), std::nullopt}}, same_for_all({"a"}), {});
  // h_a moves h0 to h1 and kills the rest, so after any positive number of steps only h1-paths
  // matter; h_a(h1) = bottom, so every iterate beyond the first vanishes.
  for (Element x : c.l->elements()) {
    const oracle::Mask one = oracle::box({h1, 0, 0}, x.id);
    EXPECT_EQ(eventually(alg, {"a"}, x).id, one & oracle::box({h1, 0, 0}, one));
  }
}
