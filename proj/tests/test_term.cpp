#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace adjoint;

namespace {

Term random_term(std::mt19937& rng, int depth) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  static const char* atoms[] = {"H", "T", "p-1", "q'"};
  static const char* agents[] = {"A", "B", "c1"};
  if (depth == 0) {
    const int k = pick(6);
    if (k == 4) return Term::bottom();
    if (k == 5) return Term::top();
    return Term::atom(atoms[k]);
  }
  auto sub = [&] { return random_term(rng, depth - 1); };
  ActionRef act(pick(2) ? "a" : "abar");
  if (pick(3) == 0) act.viewers = {agents[pick(3)], agents[pick(3)]};
  switch (pick(12)) {
    case 0: return Term::join(sub(), sub());
    case 1: return Term::meet(sub(), sub());
    case 2: return Term::negation(sub());
    case 3: return Term::app(agents[pick(3)], sub());
    case 4: return Term::info(agents[pick(3)], sub());
    case 5: return Term::know(agents[pick(3)], sub());
    case 6: return Term::believe(agents[pick(3)], sub());
    case 7: return Term::ck({"A", "B"}, sub(), static_cast<unsigned>(pick(3)));
    case 8: return Term::upd(act, sub());
    case 9: return Term::after(act, sub());
    default: return sub();
  }
}

}  // namespace

TEST(Term, PrintsWithMinimalParens) {
  const Term H = Term::atom("H"), T = Term::atom("T"), U = Term::atom("U");
  EXPECT_EQ(to_string(Term::join(Term::join(H, T), U)), "H \\/ T \\/ U");
  EXPECT_EQ(to_string(Term::join(H, Term::join(T, U))), "H \\/ (T \\/ U)");
  EXPECT_EQ(to_string(Term::meet(Term::join(H, T), U)), "(H \\/ T) /\\ U");
  EXPECT_EQ(to_string(Term::join(Term::meet(H, T), U)), "H /\\ T \\/ U");
  EXPECT_EQ(to_string(Term::negation(Term::meet(H, T))), "~(H /\\ T)");
  EXPECT_EQ(to_string(Term::negation(Term::negation(H))), "~~H");
  EXPECT_EQ(to_string(Term::after(ActionRef("a", {"A"}), Term::info("A", H))), "after[f'[A](a)](fi[A](H))");
  EXPECT_EQ(to_string(Term::ck({"A", "B"}, H, 3)), "CK[A,B;3](H)");
  EXPECT_EQ(to_string(Term::ck({"A"}, H)), "CK[A](H)");
  EXPECT_EQ(to_string(Term()), "bot");
}

TEST(Term, MathNotation) {
  const auto s = parse_sequent("H |= after[a](fi[A](fi[C](H \\/ top)))");
  EXPECT_EQ(to_math(s), "H ≤ h*_a(f*_A(f*_C(H ∨ ⊤)))");
  EXPECT_EQ(to_math(parse_term("upd[f'[A](f'[B](a))](~K[A](bot))")), "h_f'_A(f'_B(a))(¬K_A(⊥))");
  EXPECT_EQ(to_math(parse_term("CK[A,B;2](B[A](x) /\\ f[A](x))")), "CK_{A,B}^2(B_A(x) ∧ f_A(x))");
}

TEST(Term, ParsesStructure) {
  const Term t = parse_term("~H /\\ fi[A](T) \\/ upd[f'[B](a)](H)");
  ASSERT_TRUE(t.is(TermKind::join));
  ASSERT_TRUE(t.left().is(TermKind::meet));
  EXPECT_TRUE(t.left().left().is(TermKind::negation));
  EXPECT_EQ(t.left().right().agent(), "A");
  EXPECT_EQ(t.right().action().base, "a");
  EXPECT_EQ(t.right().action().viewers, std::vector<std::string>{"B"});
  EXPECT_FALSE(t.right().action().plain());

  const Term ck = parse_term("CK[c1,c2,c3;4](m1)");
  EXPECT_EQ(ck.group().size(), 3u);
  EXPECT_EQ(ck.depth(), 4u);
  EXPECT_EQ(ck.with_args({Term::atom("m2")}).arg().name(), "m2");
}

TEST(Term, RoundTripsRandomTerms) {
  std::mt19937 rng(51);
  for (int i = 0; i < 500; ++i) {
    const Term t = random_term(rng, 4);
    const std::string s = to_string(t);
    EXPECT_EQ(parse_term(s), t) << s;
    EXPECT_EQ(to_string(parse_term(s)), s);
  }
}

TEST(Term, ParseErrorsCarryLocations) {
  try {
    parse_term("H \\/ ");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location().column, 6u);
    EXPECT_EQ(e.expected(), "a term");
  }
  try {
    parse_sequent("H <= T");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.expected(), "'|='");
  }
  EXPECT_THROW(parse_term("G[A](H)"), ParseError);
  EXPECT_THROW(parse_term("CK[A;x](H)"), ParseError);
  EXPECT_THROW(parse_term("fi[A](H"), ParseError);
  EXPECT_THROW(parse_term("H T"), ParseError);
  EXPECT_THROW(parse_term("H $ T"), ParseError);
  EXPECT_THROW(tokenize("\"open"), ParseError);
}

TEST(Tokenizer, Shapes) {
  const auto toks = tokenize("sees h0 -> h-1 t' # trailing", 7);
  ASSERT_EQ(toks.size(), 6u);
  EXPECT_EQ(toks[2].text, "->");
  EXPECT_EQ(toks[3].text, "h-1");
  EXPECT_EQ(toks[4].text, "t'");
  EXPECT_EQ(toks[3].loc.line, 7u);
  EXPECT_EQ(toks[3].loc.column, 12u);
  EXPECT_EQ(toks.back().kind, TokenKind::end);
  const auto str = tokenize(R"(description "say \"hi\"")");
  EXPECT_EQ(str[1].kind, TokenKind::string);
  EXPECT_EQ(str[1].text, "say \"hi\"");
}
