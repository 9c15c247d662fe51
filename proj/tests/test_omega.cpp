#include <gtest/gtest.h>

#include "oracles.hpp"
#include "properties.hpp"
#include "tbound/fixtures.hpp"
#include "tbound/omega.hpp"
#include "tbound/safra.hpp"

using namespace tbound;

namespace {

// Every lasso u v^omega with |u| <= max_u and 1 <= |v| <= max_v.
template <class F>
void for_each_lasso(int letters, std::size_t max_u, std::size_t max_v, F f) {
  for (const auto& u : oracle::all_letter_words(letters, max_u))
    for (const auto& v : oracle::all_letter_words(letters, max_v))
      if (!v.empty()) f(u, v);
}

// Two-state net alternating a and b forever.
CounterSystem toggle() {
  NetSpec n;
  n.places = {"p", "q"};
  n.transitions.push_back({"a", {{"p", 1}}, {{"q", 1}}, {}, {}});
  n.transitions.push_back({"b", {{"q", 1}}, {{"p", 1}}, {}, {}});
  n.initial = {{"p", 1}};
  return compile_net(n);
}

CounterSystem single_loop() { return CounterSystem({"p"}, {{"a", {0}, {{1}}, {0}}}, OmegaVector{0}); }

}  // namespace

TEST(Coflat, Examples) {
  EXPECT_TRUE(is_coflat(*parse_ltl("!(G a)")));
  EXPECT_TRUE(is_coflat(*parse_ltl("!(a U G b)")));
  EXPECT_TRUE(is_coflat(*parse_ltl("!(X G a & G b)")));
  EXPECT_FALSE(is_coflat(*parse_ltl("G a")));
  EXPECT_FALSE(is_coflat(*parse_ltl("!(F a)")));
  EXPECT_FALSE(is_coflat(*parse_ltl("!((a | b) U G b)")));
  EXPECT_FALSE(is_coflat(*parse_ltl("!(G !a)")));
}

TEST(LtlParser, PrecedenceAndGluedOperators) {
  EXPECT_EQ(parse_ltl("GF rcv")->str(), "G(F('rcv'))");
  EXPECT_EQ(parse_ltl("a U b U c")->str(), "('a' U ('b' U 'c'))");
  EXPECT_EQ(parse_ltl("a & b | c -> d")->str(), "((('a' & 'b') | 'c') -> 'd')");
  EXPECT_EQ(parse_ltl("!a U b")->str(), "(!('a') U 'b')");
  EXPECT_EQ(parse_ltl("Gx")->str(), "'Gx'");
  EXPECT_EQ(parse_ltl("'G'")->str(), "'G'");
  EXPECT_EQ(parse_ltl("X(!snd U rcv)")->str(), "X((!('snd') U 'rcv'))");
}

TEST(LtlParser, ErrorPositions) {
  auto pos = [](const std::string& s) -> std::size_t {
    try {
      parse_ltl(s);
    } catch (const LtlParseError& e) {
      return e.position;
    }
    return std::string::npos;
  };
  EXPECT_EQ(pos("a &"), 3U);
  EXPECT_EQ(pos("(a | b"), 6U);
  EXPECT_EQ(pos("a b"), 2U);
  EXPECT_EQ(pos("'ab"), 0U);
  EXPECT_EQ(pos("a $ b"), 2U);
  EXPECT_EQ(pos("G a"), std::string::npos);
}

TEST(Automata, NbaAndDraAgreeWithTheLassoSemantics) {
  Alphabet al({"a", "b"});
  for (const char* phi : {"GF a", "F(a & X b)", "FG a", "a U b", "G(a -> X b)", "!(GF a) | GF b", "X X a R b"}) {
    auto f = parse_ltl(phi);
    Nba nba = ltl_to_nba(*f, al);
    DRabin dra = ltl_to_dra(*f, al);
    int checked = 0;
    for_each_lasso(2, 4, 4, [&](const Word& u, const Word& v) {
      bool want = oracle::ltl_holds(*f, al, u, v);
      ASSERT_EQ(nba.accepts_lasso(u, v), want) << phi;
      ASSERT_EQ(dra.accepts_lasso(u, v), want) << phi;
      ++checked;
    });
    EXPECT_EQ(checked, 31 * 30);
  }
}

TEST(Automata, RandomFormulasOverThreeLetters) {
  Alphabet al({"a", "b", "c"});
  std::function<Ltl::Ptr(int)> gen = [&](int depth) -> Ltl::Ptr {
    using Op = Ltl::Op;
    if (depth == 0 || oracle::uniform(0, 3) == 0) return Ltl::letter(al.name(oracle::uniform(0, 2)));
    switch (oracle::uniform(0, 6)) {
      case 0: return Ltl::make(Op::Not, gen(depth - 1));
      case 1: return Ltl::make(Op::And, gen(depth - 1), gen(depth - 1));
      case 2: return Ltl::make(Op::Or, gen(depth - 1), gen(depth - 1));
      case 3: return Ltl::make(Op::Next, gen(depth - 1));
      case 4: return Ltl::make(Op::Until, gen(depth - 1), gen(depth - 1));
      case 5: return Ltl::make(Op::Globally, gen(depth - 1));
      default: return Ltl::make(Op::Finally, gen(depth - 1));
    }
  };
  for (int i = 0; i < 40; ++i) {
    auto f = gen(3);
    DRabin dra = ltl_to_dra(*f, al);
    for_each_lasso(3, 2, 3, [&](const Word& u, const Word& v) {
      ASSERT_EQ(dra.accepts_lasso(u, v), oracle::ltl_holds(*f, al, u, v)) << f->str();
    });
  }
}

TEST(OmegaEmptiness, SingleLoopExamples) {
  auto s = single_loop();
  Alphabet al({"a"});
  EXPECT_EQ(omega_language_empty(s, ltl_to_dra(*parse_ltl("GF a"), al)).empty, Answer::No);
  EXPECT_EQ(omega_language_empty(s, ltl_to_dra(*parse_ltl("F !a"), al)).empty, Answer::Yes);
}

TEST(OmegaEmptiness, UnboundedProductRaisesNotBounded) {
  auto s = compile_net(fixtures::fig3());
  auto dra = ltl_to_dra(*parse_ltl("GF c"), s.alphabet());
  EXPECT_THROW(omega_language_empty(s, dra), NotBounded);
}

TEST(OmegaEmptiness, AgreesWithRabinOnFiniteStateNets) {
  auto t = property::omega_emptiness(100);
  EXPECT_EQ(t.cases, 100);
  EXPECT_TRUE(t.all()) << t.failure;
  EXPECT_GT(t.hits, 10);
  EXPECT_LT(t.hits, 90);
  std::printf("omega emptiness: 100 flat nets, %d non-empty\n", t.hits);
}

TEST(ModelCheckLtl, Examples) {
  auto t = toggle();
  auto holds = [&](const char* phi) { return model_check_ltl(t, parse_ltl(phi)).holds; };
  EXPECT_EQ(holds("GF a"), Answer::Yes);
  EXPECT_EQ(holds("G(a -> X b)"), Answer::Yes);
  EXPECT_EQ(holds("a"), Answer::Yes);
  EXPECT_EQ(holds("FG a"), Answer::No);
  EXPECT_EQ(holds("G a"), Answer::No);
  EXPECT_EQ(holds("true"), Answer::Yes);
  auto r = model_check_ltl(single_loop(), parse_ltl("G a"));
  EXPECT_TRUE(r.coflat);
  EXPECT_EQ(r.holds, Answer::Yes);
}

TEST(ModelCheckLtl, NotBoundedSuggestsAnIndependence) {
  auto s = compile_net(fixtures::fig3());
  try {
    model_check_ltl(s, parse_ltl("G !d"));
    FAIL() << "expected NotBounded";
  } catch (const NotBounded& e) {
    EXPECT_NE(std::string(e.what()).find("independence"), std::string::npos);
    EXPECT_FALSE(e.fork.empty());
  }
}

TEST(ModelCheckLtl, ModuloIndependenceOnFig3) {
  auto s = compile_net(fixtures::fig3());
  Independence I(s.alphabet(), {{"c", "d"}});
  // without b only a^omega is left, and it never sees b
  EXPECT_EQ(model_check_ltl(s, parse_ltl("G !b -> G a"), &I).holds, Answer::Yes);
  EXPECT_EQ(model_check_ltl(s, parse_ltl("F b"), &I).holds, Answer::No);
}
