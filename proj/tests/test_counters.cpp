#include <gtest/gtest.h>

#include "oracles.hpp"
#include "properties.hpp"
#include "tbound/fixtures.hpp"

using namespace tbound;

namespace {

std::vector<oracle::Marking> box(std::size_t k, std::int64_t hi) {
  std::vector<oracle::Marking> out{oracle::Marking(k, 0)};
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<oracle::Marking> next;
    for (const auto& m : out)
      for (std::int64_t v = 0; v <= hi; ++v) {
        auto n = m;
        n[i] = v;
        next.push_back(n);
      }
    out = std::move(next);
  }
  return out;
}

void expect_agrees_with_interpreter(const NetSpec& net, std::int64_t hi) {
  auto s = compile_net(net);
  for (const auto& m : box(net.places.size(), hi))
    for (std::size_t t = 0; t < net.transitions.size(); ++t) {
      auto want = oracle::net_fire(net, m, t);
      auto got = s.fire(oracle::to_omega(m), static_cast<Letter>(t));
      ASSERT_EQ(got.has_value(), want.has_value()) << net.transitions[t].label;
      if (want) ASSERT_EQ(*got, oracle::to_omega(*want)) << net.transitions[t].label;
    }
}

// Net with random resets and transfers on disjoint places.
NetSpec random_reset_transfer_net() {
  NetSpec n = oracle::random_net(3, 2, 3);
  for (auto& t : n.transitions) {
    std::vector<int> order{0, 1, 2};
    std::shuffle(order.begin(), order.end(), oracle::rng());
    int kind = oracle::uniform(0, 2);
    if (kind == 1) t.resets.push_back(n.places[static_cast<std::size_t>(order[0])]);
    if (kind == 2)
      t.transfers.push_back({n.places[static_cast<std::size_t>(order[0])], n.places[static_cast<std::size_t>(order[1])]});
  }
  return n;
}

// Box oracle for the minimal predecessors of up(m) under one label.
std::vector<OmegaVector> box_pred(const CounterSystem& s, const OmegaVector& m, Letter a, std::int64_t hi) {
  std::vector<OmegaVector> sols;
  for (const auto& x : box(s.dimension(), hi)) {
    auto y = s.fire(oracle::to_omega(x), a);
    if (y && leq(m, *y)) sols.push_back(oracle::to_omega(x));
  }
  std::vector<OmegaVector> out;
  for (const auto& v : sols) {
    bool dominated = false;
    for (const auto& u : sols) dominated = dominated || (!(u == v) && leq(u, v));
    if (!dominated) out.push_back(v);
  }
  std::sort(out.begin(), out.end(), [](const OmegaVector& x, const OmegaVector& y) { return x.v < y.v; });
  return out;
}

std::vector<OmegaVector> sorted(std::vector<OmegaVector> v) {
  std::sort(v.begin(), v.end(), [](const OmegaVector& x, const OmegaVector& y) { return x.v < y.v; });
  return v;
}

}  // namespace

TEST(CompileNet, Fig3TransitionA) {
  auto s = compile_net(fixtures::fig3());
  const auto& a = s.transition(s.alphabet().at("a"));
  EXPECT_EQ(a.guard, (std::vector<std::int64_t>{1, 0, 0, 0}));
  EXPECT_EQ(a.b, (std::vector<std::int64_t>{0, 0, 1, 0}));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(a.A[i][j], i == j ? 1 : 0);
  expect_agrees_with_interpreter(fixtures::fig3(), 3);
}

TEST(CompileNet, NoArcsIsTheIdentity) {
  NetSpec n;
  n.places = {"p", "q"};
  n.transitions.push_back({"t", {}, {}, {}, {}});
  auto s = compile_net(n);
  EXPECT_EQ(s.transition(0).guard, (std::vector<std::int64_t>{0, 0}));
  EXPECT_EQ(s.transition(0).b, (std::vector<std::int64_t>{0, 0}));
  for (const auto& m : box(2, 3)) EXPECT_EQ(s.fire(oracle::to_omega(m), 0), oracle::to_omega(m));
}

TEST(CompileNet, TransferKeepsTheTokenSum) {
  NetSpec n;
  n.places = {"p", "q", "r"};
  n.transitions.push_back({"move", {{"r", 1}}, {{"r", 1}}, {}, {{"p", "q"}}});
  n.initial = {{"p", 3}, {"r", 1}};
  auto s = compile_net(n);
  auto sum = [](const OmegaVector& x) { return x[0].value() + x[1].value() + x[2].value(); };
  for (const auto& m : box(3, 3)) {
    auto y = s.fire(oracle::to_omega(m), 0);
    if (y) EXPECT_EQ(sum(*y), sum(oracle::to_omega(m)));
  }
  EXPECT_EQ(s.fire(s.initial(), 0), (OmegaVector{0, 3, 1}));
}

TEST(CompileNet, RandomResetTransferNetsMatchTheInterpreter) {
  for (int i = 0; i < 60; ++i) expect_agrees_with_interpreter(random_reset_transfer_net(), 3);
}

TEST(CompileNet, RejectsOverlappingResetAndTransfer) {
  NetSpec n;
  n.places = {"p", "q"};
  n.transitions.push_back({"t", {}, {}, {"p"}, {{"p", "q"}}});
  EXPECT_THROW(compile_net(n), ModelError);
  n.transitions[0] = {"t", {}, {}, {"q"}, {{"p", "q"}}};
  EXPECT_THROW(compile_net(n), ModelError);
  n.transitions[0] = {"t", {{"zz", 1}}, {}, {}, {}};
  EXPECT_THROW(compile_net(n), ModelError);
}

TEST(CounterSystem, RejectsBadShapes) {
  AffineTransition t{"t", {0}, {{1}}, {0}};
  EXPECT_THROW(CounterSystem({"p"}, {t, t}, OmegaVector{0}), ModelError);
  EXPECT_THROW(CounterSystem({"p"}, {t}, OmegaVector{w}), ModelError);
  EXPECT_THROW(CounterSystem({"p"}, {{"t", {0}, {{-1}}, {0}}}, OmegaVector{0}), ModelError);
}

TEST(FireAffine, PaperSteps) {
  auto s = compile_net(fixtures::fig3());
  EXPECT_EQ(fire_affine(s, OmegaVector{1, 0, w, 0}, s.alphabet().at("b")), (OmegaVector{0, 1, w, 0}));
  auto g = compile_net(fixtures::fig1(2, true));
  auto c = fire_affine(g, OmegaVector{1, 0, w, 2, 0}, g.alphabet().at("c"));
  ASSERT_TRUE(c);
  EXPECT_EQ(fire_affine(g, *c, g.alphabet().at("i")), (OmegaVector{0, 1, w, 1, 1}));
}

TEST(FireAffine, IdentityAndGuards) {
  CounterSystem s({"p", "q"}, {{"id", {0, 0}, {{1, 0}, {0, 1}}, {0, 0}}, {"dec", {0, 1}, {{1, 0}, {0, 1}}, {-2, 0}}},
                  OmegaVector{0, 0});
  EXPECT_EQ(fire_affine(s, OmegaVector{3, w}, 0), (OmegaVector{3, w}));
  EXPECT_FALSE(fire_affine(s, OmegaVector{3, 0}, 1).has_value());  // guard
  EXPECT_FALSE(fire_affine(s, OmegaVector{1, 1}, 1).has_value());  // negative result
  EXPECT_EQ(fire_affine(s, OmegaVector{w, 1}, 1), (OmegaVector{w, 1}));
}

TEST(AccelerateAffine, PaperExampleAndConstantLoop) {
  auto s = compile_net(fixtures::fig3());
  EXPECT_EQ(s.accelerate(OmegaVector{1, 0, 0, 0}, {0}), (OmegaVector{1, 0, w, 0}));
  CounterSystem id({"p"}, {{"id", {0}, {{1}}, {0}}}, OmegaVector{0});
  EXPECT_EQ(id.accelerate(OmegaVector{4}, {0}), (OmegaVector{4}));
}

TEST(AccelerateAffine, DoublingAndDelayedGrowth) {
  // x' = 2x doubles; y' = x feeds growth into y one step later
  CounterSystem s({"x", "y", "z"}, {{"t", {0, 0, 0}, {{2, 0, 0}, {1, 0, 0}, {0, 0, 1}}, {0, 0, 0}}},
                  OmegaVector{1, 0, 0});
  EXPECT_EQ(s.accelerate(OmegaVector{1, 0, 5}, {0}), (OmegaVector{w, w, 5}));
  EXPECT_EQ(s.accelerate(OmegaVector{0, 0, 5}, {0}), (OmegaVector{0, 0, 5}));
}

TEST(AccelerateAffine, AgreesWithBruteForceIteration) {
  auto t = property::affine_acceleration(200);
  EXPECT_EQ(t.cases, 200);
  EXPECT_TRUE(t.all()) << t.failure;
  EXPECT_GT(t.hits, 40);
  EXPECT_LT(t.hits, 160);
  std::printf("affine acceleration: %d cases, %d with omega\n", t.cases, t.hits);
}

TEST(PredBasis, Fig3Examples) {
  auto s = compile_net(fixtures::fig3());
  const Letter b = s.alphabet().at("b"), d = s.alphabet().at("d");
  EXPECT_EQ(sorted(s.pred_basis(OmegaVector{0, 0, 0, 1}, d)), (std::vector<OmegaVector>{{0, 1, 1, 0}}));
  EXPECT_EQ(sorted(s.pred_basis(OmegaVector{0, 0, 0, 1}, d)), box_pred(s, OmegaVector{0, 0, 0, 1}, d, 1));
  EXPECT_EQ(s.fire(OmegaVector{0, 1, 1, 0}, d), (OmegaVector{0, 1, 0, 1}));
  EXPECT_EQ(sorted(s.pred_basis(OmegaVector{0, 1, 0, 0}, b)), (std::vector<OmegaVector>{{1, 0, 0, 0}}));
  EXPECT_EQ(sorted(s.pred_basis(OmegaVector{0, 1, 0, 0}, b)), box_pred(s, OmegaVector{0, 1, 0, 0}, b, 1));
}

TEST(PredBasis, ZeroTargetGivesTheGuard) {
  auto s = compile_net(fixtures::fig3());
  for (Letter a = 0; a < 4; ++a) {
    OmegaVector g(4);
    for (std::size_t i = 0; i < 4; ++i) g[i] = s.transition(a).guard[i];
    EXPECT_EQ(s.pred_basis(OmegaVector(4), a), (std::vector<OmegaVector>{g}));
  }
  EXPECT_THROW(s.pred_basis(OmegaVector{0, w, 0, 0}, 0), UsageError);
}

TEST(PredBasis, RandomResetTransferNetsMatchTheBoxOracle) {
  for (int i = 0; i < 60; ++i) {
    auto net = random_reset_transfer_net();
    auto s = compile_net(net);
    OmegaVector m(3);
    for (std::size_t j = 0; j < 3; ++j) m[j] = oracle::uniform(0, 2);
    for (Letter a = 0; a < static_cast<Letter>(net.transitions.size()); ++a)
      ASSERT_EQ(sorted(s.pred_basis(m, a)), box_pred(s, m, a, 5)) << "net " << i << " letter " << a;
  }
}

TEST(PredBasis, AffineDoubling) {
  CounterSystem s({"x"}, {{"t", {1}, {{2}}, {-1}}}, OmegaVector{1});
  EXPECT_EQ(sorted(s.pred_basis(OmegaVector{5}, 0)), box_pred(s, OmegaVector{5}, 0, 8));
  EXPECT_EQ(sorted(s.pred_basis(OmegaVector{5}, 0)), (std::vector<OmegaVector>{{3}}));
}
