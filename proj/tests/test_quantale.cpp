#include <gtest/gtest.h>

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

Instance load(const std::string& name) {
  return instantiate(parse_scenario(oracle::read_file(oracle::scenario_path(name))));
}

}  // namespace

TEST(Quantale, Words) {
  auto q = ActionQuantale::build({"a", "b"}, 2);
  EXPECT_EQ(q.words().size(), 7u);  // 1 + 2 + 4
  EXPECT_TRUE(q.population_is_exhaustive());
  EXPECT_EQ(q.population().size(), 128u);
  EXPECT_FALSE(ActionQuantale::build({"a", "b"}, 3).population_is_exhaustive());
  const auto ab = q.compose(q.letter("a"), q.letter("b"));
  EXPECT_EQ(q.format(ab), "{a.b}");
  EXPECT_EQ(q.compose(q.unit(), ab), ab);
  EXPECT_EQ(q.compose(q.bottom(), ab), q.bottom());
  EXPECT_EQ(code_of([&] { q.compose(ab, q.letter("a")); }), Errc::word_length_exceeded);
  EXPECT_EQ(code_of([&] { q.letter("c"); }), Errc::unknown_action);
  EXPECT_EQ(code_of([&] { ActionQuantale::build({"a", "a"}); }), Errc::duplicate_label);
  EXPECT_EQ(code_of([&] { ActionQuantale::build({"a"}, 0); }), Errc::word_length_exceeded);
  EXPECT_EQ(q.from_words({{"a"}, {}}), ActionQuantale::join(q.letter("a"), q.unit()));
  EXPECT_EQ(code_of([&] { q.from_words({{"a", "a", "a"}}); }), Errc::word_length_exceeded);

  auto small = ActionQuantale::build({"a"}, 3);
  EXPECT_TRUE(small.population_is_exhaustive());
  EXPECT_EQ(small.population().size(), 16u);
}

TEST(Quantale, LawsOnSmallCarrier) {
  auto q = ActionQuantale::build({"a", "b"}, 2);
  // Swapping the letters is an automorphism, so it passes every law including the strict ones.
  std::map<std::string, QuantaleMap> lifts{{"A", letterwise_lift({1, 0})}};
  const auto r = check_epistemic_quantale(q, lifts, true);
  EXPECT_TRUE(r.passed());
  EXPECT_TRUE(r.non_paranoid_holds);
}

TEST(Quantale, ParanoidLiftViolatesUnit) {
  auto q = ActionQuantale::build({"a"}, 2);
  // f'(x) drops the empty word: 1 <= f'(1) fails.
  QuantaleMap drop = [](const QElement& x) {
    QElement out;
    for (const auto& w : x)
      if (!w.empty()) out.insert(w);
    return out;
  };
  const auto r = check_epistemic_quantale(q, {{"A", drop}});
  EXPECT_FALSE(r.passed());
  bool unit_failure = false;
  for (const auto& f : r.failures) unit_failure |= f.law == "1 <= f'(1)";
  EXPECT_TRUE(unit_failure);
}

TEST(System, HonestCoinPasses) {
  auto inst = load("coin-honest.scn");
  auto q = ActionQuantale::build({"a"}, 3);
  const auto view = indexed_to_binary(*inst.algebra, q);
  const auto r = check_epistemic_system(view);
  EXPECT_TRUE(r.passed()) << (r.module_failures.empty() ? "" : r.module_failures[0].law);
  EXPECT_TRUE(r.exhaustive);

  // The binary action agrees with iterating the indexed updates.
  const auto& h = inst.algebra->update("a");
  for (Element l : inst.algebra->lattice()->elements()) {
    EXPECT_EQ(view.act(l, q.letter("a")), h(l));
    EXPECT_EQ(view.act(l, q.from_words({{"a", "a"}})), h(h(l)));
    EXPECT_EQ(view.act(l, q.unit()), l);
  }
  const auto rebuilt = binary_to_indexed(view);
  EXPECT_EQ(rebuilt.update("a"), h);
}

TEST(System, LyingCoinPassesWithTwoActions) {
  auto inst = load("coin-lying-model.scn");
  auto q = ActionQuantale::build({"a", "abar"}, 3);
  const auto r = check_epistemic_system(indexed_to_binary(*inst.algebra, q));
  EXPECT_TRUE(r.passed());
  EXPECT_FALSE(r.exhaustive);
  // A sees abar as a, so f'(abar.a) = a.a while f'(abar).f'(a) = a.a too: strict laws hold.
  EXPECT_TRUE(r.quantale.non_paranoid_holds);
}

TEST(System, GeneratorsMustMatch) {
  auto inst = load("coin-honest.scn");
  auto q = ActionQuantale::build({"a", "b"}, 2);
  EXPECT_EQ(code_of([&] { indexed_to_binary(*inst.algebra, q); }), Errc::generator_mismatch);
}

TEST(System, BrokenModuleLawIsCaught) {
  auto inst = load("coin-honest.scn");
  auto q = ActionQuantale::build({"a"}, 2);
  auto view = indexed_to_binary(*inst.algebra, q);
  auto good = view.act;
  // Ignore sequencing: h(l, a.a) = h(l, a).
  view.act = [good](Element l, const QElement& x) {
    QElement trimmed;
    for (auto w : x) {
      if (w.size() > 1) w.resize(1);
      trimmed.insert(w);
    }
    return good(l, trimmed);
  };
  const auto r = check_epistemic_system(view);
  EXPECT_FALSE(r.passed());
  bool composition = false;
  for (const auto& f : r.module_failures) composition |= f.law == "h(l, a.b) = h(h(l, a), b)";
  EXPECT_TRUE(composition);
}
