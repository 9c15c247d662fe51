#pragma once

#include <cstdlib>
#include <fstream>
#include <variant>

#include <json.hpp>

#include "tbound/commutation.hpp"
#include "tbound/fixtures.hpp"
#include "tbound/omega.hpp"

namespace tbound::io {

// Insertion-ordered objects keep emitted documents byte-stable.
using json = nlohmann::ordered_json;

inline constexpr const char* kReportFormat = "tbound-report/1";

struct AffineSpec {
  std::vector<std::string> places;
  std::vector<AffineTransition> transitions;
  std::vector<std::int64_t> initial;
  bool operator==(const AffineSpec&) const = default;
};

// kind is one of petri, reset, transfer, affine, lcs, dfa, rabin.
struct Model {
  std::string kind;
  std::variant<NetSpec, AffineSpec, LcsSpec, Dfa, DRabin> body;
  bool operator==(const Model&) const = default;

  bool is_counters() const { return kind == "petri" || kind == "reset" || kind == "transfer" || kind == "affine"; }
  bool is_system() const { return is_counters() || kind == "lcs"; }
};

namespace detail {

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ModelError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T get(const json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const json::exception& e) {
    throw ModelError(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? get<T>(j, key) : fallback;
}

inline int state_index(const std::vector<std::string>& names, const std::string& s) {
  auto it = std::find(names.begin(), names.end(), s);
  if (it == names.end()) throw ModelError("unknown state '" + s + "'");
  return static_cast<int>(it - names.begin());
}

inline std::vector<bool> state_set(const std::vector<std::string>& names, const json& j) {
  std::vector<bool> out(names.size(), false);
  for (const auto& s : j) out[static_cast<std::size_t>(state_index(names, s.get<std::string>()))] = true;
  return out;
}

inline json state_list(const std::vector<std::string>& names, const std::vector<bool>& set) {
  json out = json::array();
  for (std::size_t q = 0; q < set.size(); ++q)
    if (set[q]) out.push_back(names[q]);
  return out;
}

inline void parse_automaton(const json& j, Automaton& a) {
  a.alphabet = Alphabet(get<std::vector<std::string>>(j, "alphabet"));
  auto states = get<std::vector<std::string>>(j, "states");
  if (states.empty()) throw ModelError("automaton needs states");
  a.state_names = states;
  a.delta.assign(states.size(), std::vector<int>(a.alphabet.size(), -1));
  a.initial = state_index(states, get<std::string>(j, "initial"));
  for (const auto& t : field(j, "delta")) {
    if (!t.is_array() || t.size() != 3) throw ModelError("delta entries are [from, letter, to]");
    int q = state_index(states, t[0].get<std::string>());
    auto letter = a.alphabet.find(t[1].get<std::string>());
    if (!letter) throw ModelError("unknown letter '" + t[1].get<std::string>() + "'");
    int& slot = a.delta[static_cast<std::size_t>(q)][static_cast<std::size_t>(*letter)];
    if (slot >= 0) throw ModelError("automaton is not deterministic at " + states[static_cast<std::size_t>(q)]);
    slot = state_index(states, t[2].get<std::string>());
  }
}

inline void emit_automaton(const Automaton& a, json& j) {
  j["alphabet"] = a.alphabet.names();
  j["states"] = a.state_names;
  j["initial"] = a.state_names.at(static_cast<std::size_t>(a.initial));
  json delta = json::array();
  for (int q = 0; q < a.size(); ++q)
    for (Letter x = 0; x < static_cast<Letter>(a.alphabet.size()); ++x)
      if (int r = a.next(q, x); r >= 0)
        delta.push_back({a.state_names[static_cast<std::size_t>(q)], a.alphabet.name(x), a.state_names[static_cast<std::size_t>(r)]});
  j["delta"] = std::move(delta);
}

}  // namespace detail

inline Dfa parse_dfa(const json& j) {
  Dfa d;
  detail::parse_automaton(j, d);
  d.accepting = detail::state_set(d.state_names, detail::field(j, "accepting"));
  return d;
}

inline json emit_dfa(const Dfa& d) {
  json j;
  j["kind"] = "dfa";
  detail::emit_automaton(d, j);
  j["accepting"] = detail::state_list(d.state_names, d.accepting);
  return j;
}

inline CounterSystem build_affine(const AffineSpec& a) {
  OmegaVector init(a.initial.size());
  for (std::size_t i = 0; i < a.initial.size(); ++i) init[i] = OmegaNat(a.initial[i]);
  return CounterSystem(a.places, a.transitions, init);
}

inline Model parse_model(const json& j) {
  using detail::get;
  using detail::get_or;
  auto kind = get<std::string>(j, "kind");
  Model m{kind, {}};
  if (kind == "petri" || kind == "reset" || kind == "transfer") {
    NetSpec n;
    n.places = get<std::vector<std::string>>(j, "places");
    n.initial = get_or<std::map<std::string, std::int64_t>>(j, "initial", {});
    for (const auto& t : detail::field(j, "transitions")) {
      NetSpec::Transition nt;
      nt.label = get<std::string>(t, "label");
      nt.pre = get_or<std::map<std::string, std::int64_t>>(t, "pre", {});
      nt.post = get_or<std::map<std::string, std::int64_t>>(t, "post", {});
      nt.resets = get_or<std::vector<std::string>>(t, "resets", {});
      nt.transfers = get_or<std::vector<std::pair<std::string, std::string>>>(t, "transfers", {});
      if (kind == "petri" && (!nt.resets.empty() || !nt.transfers.empty()))
        throw ModelError("petri transition '" + nt.label + "' has reset or transfer arcs");
      if (kind == "reset" && !nt.transfers.empty())
        throw ModelError("reset net transition '" + nt.label + "' has transfer arcs");
      n.transitions.push_back(std::move(nt));
    }
    compile_net(n);  // validates places and arcs
    m.body = std::move(n);
  } else if (kind == "affine") {
    AffineSpec a;
    a.places = get<std::vector<std::string>>(j, "places");
    a.initial = get<std::vector<std::int64_t>>(j, "initial");
    for (const auto& t : detail::field(j, "transitions"))
      a.transitions.push_back({get<std::string>(t, "label"), get<std::vector<std::int64_t>>(t, "guard"),
                               get<std::vector<std::vector<std::int64_t>>>(t, "A"), get<std::vector<std::int64_t>>(t, "b")});
    m.body = std::move(a);
  } else if (kind == "lcs") {
    LcsSpec s;
    s.states = get<std::vector<std::string>>(j, "states");
    s.initial = get<std::string>(j, "initial");
    s.channels = get_or<std::vector<std::string>>(j, "channels", {});
    s.messages = get_or<std::vector<std::string>>(j, "messages", {});
    s.alphabet = get_or<std::vector<std::string>>(j, "alphabet", {});
    for (const auto& t : detail::field(j, "transitions"))
      s.rules.push_back({get<std::string>(t, "from"), get<std::string>(t, "to"), get_or<std::string>(t, "channel", ""),
                         get_or<std::string>(t, "op", ""), get_or<std::string>(t, "msg", ""), get<std::string>(t, "label")});
    LcsSystem check(s);
    m.body = std::move(s);
  } else if (kind == "dfa") {
    m.body = parse_dfa(j);
  } else if (kind == "rabin") {
    DRabin d;
    detail::parse_automaton(j, d);
    for (const auto& p : detail::field(j, "pairs"))
      d.pairs.push_back({detail::state_set(d.state_names, detail::field(p, "E")),
                         detail::state_set(d.state_names, detail::field(p, "F"))});
    m.body = std::move(d);
  } else {
    throw ModelError("unknown model kind '" + kind + "'");
  }
  if (m.kind == "affine") build_affine(std::get<AffineSpec>(m.body));
  return m;
}

inline json emit_model(const Model& m) {
  json j;
  j["kind"] = m.kind;
  if (const auto* n = std::get_if<NetSpec>(&m.body)) {
    j["places"] = n->places;
    j["initial"] = n->initial;
    json ts = json::array();
    for (const auto& t : n->transitions) {
      json x;
      x["label"] = t.label;
      x["pre"] = t.pre;
      x["post"] = t.post;
      if (!t.resets.empty()) x["resets"] = t.resets;
      if (!t.transfers.empty()) x["transfers"] = t.transfers;
      ts.push_back(std::move(x));
    }
    j["transitions"] = std::move(ts);
  } else if (const auto* a = std::get_if<AffineSpec>(&m.body)) {
    j["places"] = a->places;
    j["initial"] = a->initial;
    json ts = json::array();
    for (const auto& t : a->transitions) ts.push_back({{"label", t.label}, {"guard", t.guard}, {"A", t.A}, {"b", t.b}});
    j["transitions"] = std::move(ts);
  } else if (const auto* s = std::get_if<LcsSpec>(&m.body)) {
    j["states"] = s->states;
    j["initial"] = s->initial;
    j["channels"] = s->channels;
    j["messages"] = s->messages;
    if (!s->alphabet.empty()) j["alphabet"] = s->alphabet;
    json ts = json::array();
    for (const auto& r : s->rules) {
      json x{{"from", r.from}, {"to", r.to}};
      if (!r.op.empty()) x["op"] = r.op;
      if (!r.channel.empty()) x["channel"] = r.channel;
      if (!r.msg.empty()) x["msg"] = r.msg;
      x["label"] = r.label;
      ts.push_back(std::move(x));
    }
    j["transitions"] = std::move(ts);
  } else if (const auto* d = std::get_if<Dfa>(&m.body)) {
    detail::emit_automaton(*d, j);
    j["accepting"] = detail::state_list(d->state_names, d->accepting);
  } else {
    const auto& r = std::get<DRabin>(m.body);
    detail::emit_automaton(r, j);
    json pairs = json::array();
    for (const auto& p : r.pairs)
      pairs.push_back({{"E", detail::state_list(r.state_names, p.E)}, {"F", detail::state_list(r.state_names, p.F)}});
    j["pairs"] = std::move(pairs);
  }
  return j;
}

// name or name(arg, ...)
struct FixtureCall {
  std::string name;
  std::vector<std::string> args;
};

inline FixtureCall parse_call(const std::string& text) {
  FixtureCall c;
  auto open = text.find('(');
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t"), e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  c.name = trim(text.substr(0, open));
  if (open == std::string::npos) return c;
  if (text.back() != ')') throw ModelError("malformed fixture call '" + text + "'");
  std::string inner = text.substr(open + 1, text.size() - open - 2);
  std::stringstream ss(inner);
  for (std::string a; std::getline(ss, a, ',');) c.args.push_back(trim(a));
  if (c.args.size() == 1 && c.args[0].empty()) c.args.clear();
  return c;
}

inline Model load_fixture(const std::string& text) {
  auto c = parse_call(text);
  auto arg_int = [&](std::size_t i, int fallback) {
    if (i >= c.args.size()) return fallback;
    try {
      std::size_t used = 0;
      int v = std::stoi(c.args[i], &used);
      if (used != c.args[i].size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ModelError("fixture " + c.name + ": '" + c.args[i] + "' is not an integer");
    }
  };
  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (c.args.size() < lo || c.args.size() > hi) throw ModelError("fixture " + c.name + ": wrong number of arguments");
  };
  try {
    if (c.name == "fig1") {
      arity(1, 3);
      bool gray = c.args.size() > 1 && (c.args[1] == "gray" || c.args[1] == "true" || c.args[1] == "1");
      if (c.args.size() > 1 && !gray && c.args[1] != "plain" && c.args[1] != "false" && c.args[1] != "0")
        throw ModelError("fig1: second argument is gray or plain");
      return {"petri", fixtures::fig1(arg_int(0, 2), gray, arg_int(2, 0))};
    }
    if (c.name == "fig3") {
      arity(0, 0);
      return {"petri", fixtures::fig3()};
    }
    if (c.name == "ackermann") {
      arity(1, 2);
      return {"petri", fixtures::ackermann(arg_int(0, 0), arg_int(1, 0))};
    }
    if (c.name == "abp") {
      arity(0, 0);
      return {"lcs", fixtures::abp()};
    }
    if (c.name == "abp_unfolded") {
      arity(1, 1);
      return {"lcs", fixtures::abp_unfolded(arg_int(0, 2))};
    }
    if (c.name == "fig1_control" || c.name == "abp_control_dfa") {
      arity(1, 1);
      int P = arg_int(0, 2);
      auto al = compile_net(fixtures::fig1(P, true)).alphabet();
      return {"dfa", fixtures::fig1_control(P, al)};
    }
  } catch (const UsageError& e) {
    throw ModelError(e.what());
  }
  throw ModelError("unknown fixture '" + c.name + "'");
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ModelError("'" + path + "': " + e.what());
  }
}

// A path to a model document, or fixture:NAME(ARGS).
inline Model load_model(const std::string& where) {
  if (where.rfind("fixture:", 0) == 0) return load_fixture(where.substr(8));
  return parse_model(read_json_file(where));
}

inline CounterSystem build_counters(const Model& m) {
  if (const auto* n = std::get_if<NetSpec>(&m.body)) return compile_net(*n);
  if (const auto* a = std::get_if<AffineSpec>(&m.body)) return build_affine(*a);
  throw ModelError("model of kind " + m.kind + " is not a counter system");
}

// Independence documents: {"alphabet": [...]?, "pairs": [[a, b], ...]}, or
// fixture:abp_independence.
inline std::vector<std::pair<std::string, std::string>> load_independence_pairs(const std::string& where,
                                                                                std::vector<std::string>* alphabet = nullptr) {
  if (where == "fixture:abp_independence") {
    if (alphabet) *alphabet = fixtures::abp_alphabet();
    return fixtures::abp_independence();
  }
  auto j = read_json_file(where);
  if (alphabet) *alphabet = detail::get_or<std::vector<std::string>>(j, "alphabet", {});
  return detail::get<std::vector<std::pair<std::string, std::string>>>(j, "pairs");
}

inline Independence load_independence(const std::string& where, const Alphabet& al) {
  auto pairs = load_independence_pairs(where);
  for (const auto& [a, b] : pairs)
    for (const auto& x : {a, b})
      if (!al.find(x)) throw ModelError("independence mentions '" + x + "', which is not a letter of the system");
  return Independence(al, pairs);
}

inline json independence_json(const Independence& I) {
  json pairs = json::array();
  for (auto [a, b] : I.pairs()) pairs.push_back({I.alphabet().name(a), I.alphabet().name(b)});
  return {{"alphabet", I.alphabet().names()}, {"pairs", std::move(pairs)}};
}

// ---- configurations -------------------------------------------------------

inline json config_json(const CounterSystem&, const OmegaVector& x) {
  json out = json::array();
  for (auto e : x.v) {
    if (e.is_omega()) out.push_back("omega");
    else out.push_back(e.value());
  }
  return out;
}

inline json config_json(const LcsSystem& s, const lcs::Config& c) {
  json chans = json::array();
  for (const auto& p : c.chans) {
    json atoms = json::array();
    for (const auto& a : p.atoms) {
      if (!a.star) {
        atoms.push_back(s.messages()[static_cast<std::size_t>(a.letter_index())]);
        continue;
      }
      json set = json::array();
      for (std::size_t m = 0; m < s.messages().size(); ++m)
        if ((a.bits >> m) & 1U) set.push_back(s.messages()[m]);
      atoms.push_back({{"star", std::move(set)}});
    }
    chans.push_back(std::move(atoms));
  }
  return {{"state", s.states()[static_cast<std::size_t>(c.control)]}, {"channels", std::move(chans)}};
}

template <System S>
json config_json(const SyncProduct<S>& p, const PairConfig<typename S::Config>& c) {
  return {{"system", config_json(p.inner(), c.sys)},
          {"automaton", p.automaton().state_names[static_cast<std::size_t>(c.q)]}};
}

inline std::string config_text(const CounterSystem&, const OmegaVector& x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? "," : "") + (x[i].is_omega() ? std::string("ω") : std::to_string(x[i].value()));
  return s + ")";
}

inline std::string config_text(const LcsSystem& s, const lcs::Config& c) { return s.format(c); }

template <System S>
std::string config_text(const SyncProduct<S>& p, const PairConfig<typename S::Config>& c) {
  return config_text(p.inner(), c.sys) + "@" + p.automaton().state_names[static_cast<std::size_t>(c.q)];
}

// ---- words ----------------------------------------------------------------

inline json word_json(const Alphabet& al, const Word& w) {
  json out = json::array();
  for (Letter a : w) out.push_back(al.name(a));
  return out;
}

inline Word parse_word(const Alphabet& al, const json& j) {
  if (!j.is_array()) throw ModelError("a word is an array of letters");
  Word w;
  for (const auto& x : j) {
    auto a = x.is_string() ? al.find(x.get<std::string>()) : std::nullopt;
    if (!a) throw ModelError("unknown letter " + x.dump());
    w.push_back(*a);
  }
  return w;
}

inline json segments_json(const Alphabet& al, const AcceleratedWord& w) {
  json out = json::array();
  for (const auto& s : w.segments()) out.push_back({{"loop", s.loop}, {"letters", word_json(al, s.letters)}});
  return out;
}

inline AcceleratedWord parse_segments(const Alphabet& al, const json& j) {
  if (!j.is_array()) throw ModelError("an accelerated word is an array of segments");
  AcceleratedWord w;
  for (const auto& s : j) {
    Word letters = parse_word(al, detail::field(s, "letters"));
    if (detail::get<bool>(s, "loop")) {
      if (letters.empty()) throw ModelError("empty loop segment");
      w.push_loop(letters);
    } else {
      w.push_plain(letters);
    }
  }
  return w;
}

// ---- reports --------------------------------------------------------------

inline json budget_json(const Budget& b) {
  return {{"nodes", b.nodes}, {"exprs", b.exprs}, {"inclusion_iterations", b.inclusion_iterations}};
}

inline json inclusion_json(const InclusionResult& r) {
  return {{"included", r.included}, {"decided", r.decided}, {"complement_states", r.dfa_states},
          {"iterations", r.iterations}, {"basis_size", r.basis_size}};
}

template <System S>
json fork_json(const S& s, const ForkWitness<S>& f) {
  const auto& al = s.alphabet();
  json j;
  j["type"] = "fork";
  j["pivot"] = config_json(s, f.pivot);
  j["pivot_text"] = config_text(s, f.pivot);
  j["stem"] = segments_json(al, f.stem);
  j["a_branch"] = segments_json(al, f.a_branch);
  j["b_branch"] = word_json(al, f.b_branch);
  j["s_a"] = config_json(s, f.s_a);
  j["s_b"] = config_json(s, f.s_b);
  j["level"] = f.level;
  j["replay"] = {{"replayed", replay_fork(s, f)}};
  return j;
}

template <System S>
json verdict_json(const S& s, const Verdict<S>& v, const Budget& b, bool timings) {
  json j;
  j["format"] = kReportFormat;
  j["command"] = "bound";
  j["verdict"] = kind_name(static_cast<int>(v.kind));
  if (v.bounded()) {
    json c;
    c["type"] = "expression";
    json words = json::array();
    for (const auto& w : v.expr->words) words.push_back(word_json(s.alphabet(), w));
    c["words"] = std::move(words);
    c["text"] = v.expr->format(s.alphabet());
    c["source"] = v.expr_source;
    if (v.via) c["automaton"] = emit_dfa(*v.via);
    c["inclusion"] = inclusion_json(v.inclusion);
    j["certificate"] = std::move(c);
  } else if (v.unbounded()) {
    j["certificate"] = fork_json(s, *v.fork);
  } else {
    j["certificate"] = nullptr;
  }
  j["budget"] = budget_json(b);
  j["consumed"] = {{"nodes", v.nodes_used}, {"exprs", v.exprs_checked}};
  if (timings) j["timings"] = {{"seconds", v.seconds}};
  return j;
}

inline json omega_json(const OmegaReport& r) {
  json j;
  j["empty"] = answer_name(r.empty);
  j["product_expression"] = r.product_expression;
  j["pair_verdicts"] = r.pair_verdicts;
  if (r.witness_pair >= 0) j["witness"] = {{"pair", r.witness_pair}, {"fork", r.witness_fork}};
  j["nodes_used"] = r.nodes_used;
  return j;
}

// ---- certificate checking -------------------------------------------------

struct CheckResult {
  enum class Status { Valid, Invalid, Undecided };
  Status status = Status::Undecided;
  std::string detail;
};

// Re-checks a bound report against the system from scratch.
template <System S>
CheckResult check_report(const S& s, const json& report, const Budget& b) {
  using St = CheckResult::Status;
  if (detail::get<std::string>(report, "format") != kReportFormat) throw ModelError("not a tbound-report/1 document");
  auto verdict = detail::get<std::string>(report, "verdict");
  const json& cert = detail::field(report, "certificate");
  const auto& al = s.alphabet();
  if (verdict == "unbounded") {
    if (detail::get<std::string>(cert, "type") != "fork") return {St::Invalid, "certificate is not a fork"};
    ForkWitness<S> f;
    f.stem = parse_segments(al, detail::field(cert, "stem"));
    f.a_branch = parse_segments(al, detail::field(cert, "a_branch"));
    f.b_branch = parse_word(al, detail::field(cert, "b_branch"));
    if (f.a_branch.segments().empty()) return {St::Invalid, "empty a-branch"};
    auto p = apply_accelerated_word(s, s.initial(), f.stem);
    if (!p) return {St::Invalid, "stem does not fire"};
    if (config_json(s, *p) != detail::field(cert, "pivot")) return {St::Invalid, "stem does not reach the pivot"};
    f.pivot = *p;
    if (!replay_fork(s, f)) return {St::Invalid, "branches do not form an increasing fork"};
    return {St::Valid, "fork replayed"};
  }
  if (verdict == "bounded") {
    if (detail::get<std::string>(cert, "type") != "expression") return {St::Invalid, "certificate is not an expression"};
    BoundedExpression e;
    for (const auto& w : detail::field(cert, "words")) e.words.push_back(parse_word(al, w));
    if (cert.contains("automaton")) {
      Dfa d = parse_dfa(cert.at("automaton"));
      if (!(d.alphabet == al)) return {St::Invalid, "automaton over a different alphabet"};
      if (!dfa_within_expression(d, e)) return {St::Invalid, "automaton language is not within the expression"};
      auto inc = trace_inclusion_dfa(s, d.complemented(), b.inclusion_iterations);
      if (!inc.decided) return {St::Undecided, "inclusion check ran out of budget"};
      if (!inc.included) return {St::Invalid, "a trace escapes the automaton"};
      return {St::Valid, "traces within automaton within expression"};
    }
    auto inc = trace_inclusion(s, e, b.inclusion_iterations);
    if (!inc.decided) return {St::Undecided, "inclusion check ran out of budget"};
    if (!inc.included) return {St::Invalid, "a trace escapes the expression"};
    return {St::Valid, "traces within expression"};
  }
  return {St::Undecided, "nothing to check for verdict " + verdict};
}

// ---- budgets --------------------------------------------------------------

// Defaults, overridden by TBOUND_BUDGET_NODES / TBOUND_BUDGET_EXPRS.
inline Budget default_budget() {
  Budget b;
  auto read = [](const char* var, std::size_t& out) {
    const char* v = std::getenv(var);
    if (!v || !*v) return;
    char* end = nullptr;
    auto n = std::strtoull(v, &end, 10);
    if (*end != '\0' || n == 0) throw ModelError(std::string(var) + " must be a positive integer");
    out = static_cast<std::size_t>(n);
  };
  read("TBOUND_BUDGET_NODES", b.nodes);
  read("TBOUND_BUDGET_EXPRS", b.exprs);
  return b;
}

}  // namespace tbound::io
