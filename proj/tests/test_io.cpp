#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>

#include "oracles.hpp"
#include "tbound/io.hpp"

using namespace tbound;
using io::json;

namespace {

std::string model_path(const std::string& name) { return std::string(TBOUND_SOURCE_DIR) + "/models/" + name; }

json parse(const char* text) { return json::parse(text); }

// Restores an environment variable on scope exit.
struct EnvGuard {
  std::string name;
  std::optional<std::string> old;
  explicit EnvGuard(std::string n) : name(std::move(n)) {
    if (const char* v = std::getenv(name.c_str())) old = v;
  }
  ~EnvGuard() {
    if (old) setenv(name.c_str(), old->c_str(), 1);
    else unsetenv(name.c_str());
  }
};

}  // namespace

TEST(Models, EveryShippedModelRoundTrips) {
  int n = 0;
  for (const auto& entry : std::filesystem::directory_iterator(std::string(TBOUND_SOURCE_DIR) + "/models")) {
    auto j = io::read_json_file(entry.path().string());
    if (!j.contains("kind")) continue;  // independence documents
    auto m = io::parse_model(j);
    EXPECT_EQ(io::parse_model(io::emit_model(m)), m) << entry.path();
    ++n;
  }
  EXPECT_GE(n, 10);
}

TEST(Models, FilesMatchTheFixtures) {
  EXPECT_EQ(io::load_model(model_path("fig3.json")), io::load_model("fixture:fig3"));
  EXPECT_EQ(io::load_model(model_path("fig1.json")), io::load_model("fixture:fig1(2, gray)"));
  EXPECT_EQ(io::load_model(model_path("control.json")), io::load_model("fixture:fig1_control(2)"));
  EXPECT_EQ(io::load_model(model_path("ackermann0.json")), io::load_model("fixture:ackermann(0, 2)"));
  EXPECT_EQ(io::load_model(model_path("abp.json")), io::load_model("fixture:abp"));
  EXPECT_EQ(io::load_model(model_path("abp_unfolded2.json")), io::load_model("fixture:abp_unfolded(2)"));
  std::vector<std::string> al;
  auto pairs = io::load_independence_pairs(model_path("abp_independence.json"), &al);
  EXPECT_EQ(al, fixtures::abp_alphabet());
  const auto want = fixtures::abp_independence();
  EXPECT_EQ(std::set(pairs.begin(), pairs.end()), std::set(want.begin(), want.end()));
}

TEST(Models, LoadedFig3HasTheFixtureTraces) {
  auto s = io::build_counters(io::load_model(model_path("fig3.json")));
  EXPECT_EQ(oracle::traces(s, 5), oracle::traces(compile_net(fixtures::fig3()), 5));
}

TEST(Models, AffineRoundTrip) {
  io::AffineSpec a;
  a.places = {"x", "y"};
  a.transitions.push_back({"dbl", {1, 0}, {{2, 0}, {0, 1}}, {0, 0}});
  a.transitions.push_back({"mv", {0, 1}, {{1, 1}, {0, 0}}, {0, 0}});
  a.initial = {1, 0};
  io::Model m{"affine", a};
  auto back = io::parse_model(io::emit_model(m));
  EXPECT_EQ(back, m);
  auto s = io::build_counters(back);
  EXPECT_EQ(step_word(s, s.initial(), s.alphabet().parse_word({"dbl", "dbl"})), (OmegaVector{4, 0}));
}

TEST(Models, Errors) {
  EXPECT_THROW(io::parse_model(parse(R"({"places": []})")), ModelError);
  EXPECT_THROW(io::parse_model(parse(R"({"kind": "zeno"})")), ModelError);
  EXPECT_THROW(io::parse_model(parse(R"({"kind": "petri", "places": ["p"], "transitions": [{"label": "a", "pre": {"q": 1}}]})")),
               ModelError);
  EXPECT_THROW(io::read_json_file(model_path("missing.json")), ModelError);
  EXPECT_THROW(io::load_model("fixture:nope"), ModelError);
  EXPECT_THROW(io::load_model("fixture:ackermann(x)"), ModelError);
  EXPECT_THROW(io::load_model("fixture:ackermann(7)"), ModelError);
  EXPECT_THROW(io::load_model("fixture:fig3(1)"), ModelError);
  EXPECT_THROW(io::build_counters(io::load_model("fixture:abp")), ModelError);
  auto s = compile_net(fixtures::fig3());
  EXPECT_THROW(io::parse_word(s.alphabet(), parse(R"(["a", "z"])")), ModelError);
  EXPECT_THROW(io::parse_segments(s.alphabet(), parse(R"([{"loop": true, "letters": []}])")), ModelError);
}

TEST(Models, FixtureCalls) {
  auto c = io::parse_call("fig1( 2 , gray )");
  EXPECT_EQ(c.name, "fig1");
  EXPECT_EQ(c.args, (std::vector<std::string>{"2", "gray"}));
  EXPECT_TRUE(io::parse_call("abp()").args.empty());
  EXPECT_THROW(io::parse_call("abp(2"), ModelError);
}

TEST(Json, Configurations) {
  auto s = compile_net(fixtures::fig3());
  EXPECT_EQ(io::config_json(s, OmegaVector{0, 1, w, 0}), parse(R"([0, 1, "omega", 0])"));
  EXPECT_EQ(io::config_text(s, OmegaVector{0, 1, w, 0}), "(0,1,ω,0)");
  LcsSystem abp(fixtures::abp());
  auto j = io::config_json(abp, abp.initial());
  EXPECT_EQ(j["channels"], parse("[[], []]"));
  auto al = s.alphabet();
  AcceleratedWord aw;
  aw.push_loop(al.parse_word({"a"}));
  aw.push_plain(al.parse_word({"b"}));
  auto sj = io::segments_json(al, aw);
  EXPECT_EQ(sj, parse(R"([{"loop": true, "letters": ["a"]}, {"loop": false, "letters": ["b"]}])"));
  EXPECT_EQ(io::parse_segments(al, sj).format(al), aw.format(al));
}

TEST(Reports, CheckReportAcceptsGenuineAndRejectsTampered) {
  auto s = compile_net(fixtures::fig3());
  Budget b;
  auto v = decide_boundedness(s, b);
  auto report = io::verdict_json(s, v, b, false);
  EXPECT_EQ(io::check_report(s, report, b).status, io::CheckResult::Status::Valid);
  auto bad = report;
  bad["certificate"]["pivot"] = parse(R"([0, 1, 5, 0])");
  EXPECT_EQ(io::check_report(s, bad, b).status, io::CheckResult::Status::Invalid);
  bad = report;
  bad["certificate"]["b_branch"] = bad["certificate"]["a_branch"][0]["letters"];
  EXPECT_EQ(io::check_report(s, bad, b).status, io::CheckResult::Status::Invalid);
  bad = report;
  bad["format"] = "other";
  EXPECT_THROW(io::check_report(s, bad, b), ModelError);

  auto net = compile_net(fixtures::fig1(2, true));
  auto p = synchronous_product(net, fixtures::fig1_control(2, net.alphabet()));
  auto vb = decide_boundedness(p, b);
  auto rb = io::verdict_json(p, vb, b, false);
  EXPECT_EQ(io::check_report(p, rb, b).status, io::CheckResult::Status::Valid);
  rb["certificate"].erase("automaton");
  rb["certificate"]["words"] = parse(R"([["g"], ["c"], ["i"]])");
  EXPECT_EQ(io::check_report(p, rb, b).status, io::CheckResult::Status::Invalid);
}

TEST(Budgets, EnvironmentOverrides) {
  EnvGuard g1("TBOUND_BUDGET_NODES"), g2("TBOUND_BUDGET_EXPRS");
  unsetenv("TBOUND_BUDGET_NODES");
  unsetenv("TBOUND_BUDGET_EXPRS");
  EXPECT_EQ(io::default_budget().nodes, Budget{}.nodes);
  setenv("TBOUND_BUDGET_NODES", "1234", 1);
  setenv("TBOUND_BUDGET_EXPRS", "7", 1);
  EXPECT_EQ(io::default_budget().nodes, 1234U);
  EXPECT_EQ(io::default_budget().exprs, 7U);
  setenv("TBOUND_BUDGET_NODES", "12x", 1);
  EXPECT_THROW(io::default_budget(), ModelError);
  setenv("TBOUND_BUDGET_NODES", "0", 1);
  EXPECT_THROW(io::default_budget(), ModelError);
}
