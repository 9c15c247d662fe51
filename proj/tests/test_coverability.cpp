#include <gtest/gtest.h>

#include "oracles.hpp"
#include "properties.hpp"
#include "tbound/coverability.hpp"
#include "tbound/fixtures.hpp"
#include "tbound/product.hpp"

using namespace tbound;

namespace {

CounterSystem fig3() { return compile_net(fixtures::fig3()); }

oracle::Marking plain(const OmegaVector& v) {
  oracle::Marking m;
  for (auto x : v.v) m.push_back(x.value());
  return m;
}

}  // namespace

TEST(BackwardCoverable, Fig3Examples) {
  auto s = fig3();
  EXPECT_TRUE(backward_coverable(s, s.initial(), {OmegaVector{0, 0, 0, 1}}));
  EXPECT_EQ(oracle::forward_covers(fixtures::fig3(), {1, 0, 0, 0}, {0, 0, 0, 1}, 6), std::optional<bool>(true));
  EXPECT_FALSE(backward_coverable(s, s.initial(), {OmegaVector{2, 0, 0, 0}}));
  for (const auto& m : oracle::reach(fixtures::fig3(), {1, 0, 0, 0}, 6)) EXPECT_LE(m[0], 1);
  EXPECT_TRUE(backward_coverable(s, s.initial(), s.min_basis()));
}

TEST(BackwardCoverable, LimitTargetIsAUsageError) {
  auto s = fig3();
  EXPECT_THROW(backward_coverable(s, s.initial(), {OmegaVector{0, 0, w, 0}}), UsageError);
}

TEST(BackwardCoverable, IterationCapRaisesBudgetExceeded) {
  auto s = compile_net(fixtures::fig1(2, true));
  EXPECT_THROW(backward_coverability(s, s.initial(), {OmegaVector{0, 1, 0, 0, 2}}, 1), BudgetExceeded);
}

TEST(BackwardCoverable, AgreesWithForwardSearchOnRandomNets) {
  auto t = property::coverability(500);
  EXPECT_EQ(t.cases, 500);
  EXPECT_TRUE(t.all()) << t.failure;
  EXPECT_GT(t.hits, 100);
  EXPECT_LT(t.hits, 400);
  std::printf("coverability: 500 nets, %d coverable\n", t.hits);
}

TEST(BackwardBasis, EveryElementReachesTheTarget) {
  for (int i = 0; i < 40; ++i) {
    auto net = oracle::random_net(3, 2, 3);
    auto s = compile_net(net);
    OmegaVector target{oracle::uniform(0, 2), oracle::uniform(0, 2), oracle::uniform(0, 2)};
    for (const auto& b : backward_basis(s, {target}))
      ASSERT_EQ(oracle::forward_covers(net, plain(b), plain(target), 40), std::optional<bool>(true))
          << "case " << i << " basis element " << b;
  }
}

TEST(LanguageEmpty, Examples) {
  auto s = fig3();
  EXPECT_FALSE(language_empty(s, {OmegaVector{0, 0, 0, 1}}));
  EXPECT_EQ(step_word(s, s.initial(), s.alphabet().parse_word({"a", "b", "d"})), (OmegaVector{0, 1, 0, 1}));
  EXPECT_FALSE(language_empty(s, {s.initial()}));
}

TEST(LanguageEmpty, ControlledFig1StaysInsideTheControlLanguage) {
  auto net = compile_net(fixtures::fig1(2, true));
  auto control = fixtures::fig1_control(2, net.alphabet());
  auto controlled = synchronous_product(net, control);
  Dfa comp = control.complemented();
  auto p = synchronous_product(controlled, comp);
  std::vector<decltype(p)::Config> final;
  for (const auto& m : p.min_basis())
    if (comp.accepting[static_cast<std::size_t>(m.q)]) final.push_back(m);
  ASSERT_FALSE(final.empty());
  EXPECT_TRUE(language_empty(p, final));
  // without the control the escape is reachable, e.g. by "c"
  auto raw = synchronous_product(net, comp);
  std::vector<decltype(raw)::Config> raw_final;
  for (const auto& m : raw.min_basis())
    if (comp.accepting[static_cast<std::size_t>(m.q)]) raw_final.push_back(m);
  EXPECT_FALSE(language_empty(raw, raw_final));
}

TEST(CheckDeterminism, CounterExamples) {
  EXPECT_TRUE(check_determinism(fig3(), {"a", "b", "c", "d"}));
  NetSpec n;
  n.places = {"p", "q"};
  n.transitions.push_back({"x1", {{"p", 1}}, {{"p", 1}}, {}, {}});
  n.transitions.push_back({"x2", {{"q", 1}}, {{"q", 1}}, {}, {}});
  n.transitions.push_back({"gain", {{"p", 1}}, {{"p", 1}, {"q", 1}}, {}, {}});
  n.initial = {{"p", 1}};
  EXPECT_FALSE(check_determinism(compile_net(n), {"x", "x", "gain"}));
  EXPECT_TRUE(oracle::forward_covers(n, {1, 0}, {1, 1}, 3).value());
  n.transitions.pop_back();
  n.transitions.push_back({"gain", {{"q", 1}}, {{"q", 2}}, {}, {}});
  EXPECT_TRUE(check_determinism(compile_net(n), {"x", "x", "gain"}));
  EXPECT_FALSE(oracle::forward_covers(n, {1, 0}, {1, 1}, 10).value());
  EXPECT_THROW(check_determinism(compile_net(n), {"x"}), ModelError);
}
