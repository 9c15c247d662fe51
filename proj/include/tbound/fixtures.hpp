#pragma once

#include "tbound/automata.hpp"
#include "tbound/channels.hpp"
#include "tbound/counters.hpp"

namespace tbound::fixtures {

// Piped RPC client.  Places: main, piped, n, credit (P - recv + sent),
// pending (recv - sent).  With `gray` the client starts in main and may
// generate any number of calls (g) before piping (c); otherwise it starts
// piped with n calls.
inline NetSpec fig1(int P, bool gray, int n = 0) {
  if (P < 1) throw UsageError("fig1 needs P >= 1");
  if (n < 0) throw UsageError("fig1 needs n >= 0");
  NetSpec s;
  s.places = {"main", "piped", "n", "credit", "pending"};
  if (gray) {
    s.transitions.push_back({"g", {{"main", 1}}, {{"main", 1}, {"n", 1}}, {}, {}});
    s.transitions.push_back({"c", {{"main", 1}}, {{"piped", 1}}, {}, {}});
    s.initial = {{"main", 1}, {"n", n}, {"credit", P}};
  } else {
    s.initial = {{"piped", 1}, {"n", n}, {"credit", P}};
  }
  s.transitions.push_back({"i", {{"piped", 1}, {"n", 1}, {"credit", 1}}, {{"piped", 1}, {"pending", 1}}, {}, {}});
  s.transitions.push_back({"e", {{"piped", 1}, {"pending", 1}}, {{"piped", 1}, {"credit", 1}}, {}, {}});
  return s;
}

// DFA for g* c i^P (ei)* e^P over the gray fig1 alphabet.  Partial: missing
// moves block the product.
inline Dfa fig1_control(int P, const Alphabet& al) {
  if (P < 1) throw UsageError("control DFA needs P >= 1");
  Dfa d(al, 0);
  int q0 = d.add_state("g", true);
  d.set(q0, "g", q0);
  int prev = d.add_state("c", true);
  d.set(q0, "c", prev);
  for (int k = 1; k <= P; ++k) {
    int q = d.add_state("i" + std::to_string(k), true);
    d.set(prev, "i", q);
    prev = q;
  }
  int mid = d.add_state("ei", true);
  d.set(prev, "e", mid);
  d.set(mid, "i", prev);
  // leaving the (ei)* loop: e^P, the first e shared with the loop entry
  int cur = mid;
  for (int k = 2; k <= P; ++k) {
    int q = d.add_state("e" + std::to_string(k), true);
    d.set(cur, "e", q);
    cur = q;
  }
  return d;
}

// Places p1..p4.
inline NetSpec fig3() {
  NetSpec s;
  s.places = {"p1", "p2", "p3", "p4"};
  s.initial = {{"p1", 1}};
  s.transitions.push_back({"a", {{"p1", 1}}, {{"p1", 1}, {"p3", 1}}, {}, {}});
  s.transitions.push_back({"b", {{"p1", 1}}, {{"p2", 1}}, {}, {}});
  s.transitions.push_back({"c", {{"p3", 1}, {"p2", 1}}, {{"p2", 1}}, {}, {}});
  s.transitions.push_back({"d", {{"p3", 1}, {"p2", 1}}, {{"p2", 1}, {"p4", 1}}, {}, {}});
  return s;
}

// Weak computation of the Ackermann hierarchy: A'_0(n) = 2n+1, and A'_{m+1}
// iterates A'_m by feeding its output back into its input.
inline NetSpec ackermann(int m, int n) {
  if (m < 0 || m > 2) throw UsageError("ackermann needs 0 <= m <= 2");
  if (n < 0 || n > 8) throw UsageError("ackermann needs 0 <= n <= 8");
  NetSpec s;
  auto idx = [](const char* base, int k) { return std::string(base) + "_" + std::to_string(k); };
  s.places = {idx("in", 0), idx("on", 0), idx("off", 0), "out", "p0", "p1", "p2"};
  s.transitions.push_back({"a_0", {{idx("on", 0), 1}}, {{"p0", 1}}, {}, {}});
  s.transitions.push_back({"t0_0", {{idx("in", 0), 1}, {"p0", 1}}, {{"p1", 2}, {"p0", 1}}, {}, {}});
  s.transitions.push_back({"t1_0", {{"p0", 1}}, {{"p1", 1}, {"p2", 1}}, {}, {}});
  s.transitions.push_back({"b_0", {{"p1", 1}, {"p2", 1}}, {{"out", 1}, {"p2", 1}}, {}, {}});
  s.transitions.push_back({"t4_0", {{"p2", 1}}, {{idx("off", 0), 1}}, {}, {}});
  for (int k = 1; k <= m; ++k) {
    std::string on = idx("on", k), off = idx("off", k), in = idx("in", k);
    std::string on_in = idx("on", k - 1), off_in = idx("off", k - 1), in_in = idx("in", k - 1);
    s.places.insert(s.places.end(), {in, on, off});
    s.transitions.push_back({idx("start", k), {{on, 1}}, {{on_in, 1}}, {}, {}});
    s.transitions.push_back({idx("stop", k), {{off_in, 1}}, {{off, 1}}, {}, {}});
    s.transitions.push_back({idx("again", k), {{off_in, 1}, {in, 1}}, {{on_in, 1}}, {}, {}});
    s.transitions.push_back({idx("feed", k), {{"out", 1}, {off_in, 1}}, {{off_in, 1}, {in_in, 1}}, {}, {}});
  }
  s.initial = {{idx("in", m), n}, {idx("on", m), 1}};
  return s;
}

// Sender and receiver of the alternating bit protocol.
struct AbpParty {
  struct Move {
    int from, to;
    std::string label;
  };
  std::vector<std::string> states;
  std::vector<Move> moves;
};

inline std::vector<std::string> abp_alphabet() {
  return {"snd", "rcv", "c_M!0", "c_M!1", "c_M?0", "c_M?1", "c_A!0", "c_A!1", "c_A?0", "c_A?1"};
}

// Sender with `sessions` rounds of both bits before stopping (0 = forever).
inline AbpParty abp_sender(int sessions = 0) {
  AbpParty p;
  auto cycle = [&](int base, int next) {
    p.moves.push_back({base + 0, base + 1, "snd"});
    p.moves.push_back({base + 1, base + 1, "c_M!0"});
    p.moves.push_back({base + 1, base + 2, "c_A?0"});
    p.moves.push_back({base + 2, base + 3, "snd"});
    p.moves.push_back({base + 3, base + 3, "c_M!1"});
    p.moves.push_back({base + 3, next, "c_A?1"});
  };
  if (sessions == 0) {
    p.states = {"0", "1", "2", "3"};
    cycle(0, 0);
    return p;
  }
  for (int k = 0; k < sessions; ++k)
    for (int s = 0; s < 4; ++s) p.states.push_back(std::to_string(k) + "." + std::to_string(s));
  p.states.push_back("done");
  for (int k = 0; k < sessions; ++k) cycle(4 * k, 4 * (k + 1));
  return p;
}

inline AbpParty abp_receiver() {
  AbpParty p;
  p.states = {"0", "1", "2", "3"};
  p.moves = {{0, 0, "c_A!1"}, {0, 1, "c_M?0"}, {1, 2, "rcv"}, {2, 2, "c_A!0"}, {2, 3, "c_M?1"}, {3, 0, "rcv"}};
  return p;
}

// Asynchronous product of sender and receiver as one lossy channel system;
// control state "sr" joins the two local state names.
inline LcsSpec abp_product(const AbpParty& snd, const AbpParty& rcv) {
  LcsSpec s;
  s.channels = {"c_M", "c_A"};
  s.messages = {"0", "1"};
  s.alphabet = abp_alphabet();
  auto name = [&](int a, int b) {
    return snd.states[static_cast<std::size_t>(a)] + rcv.states[static_cast<std::size_t>(b)];
  };
  for (std::size_t a = 0; a < snd.states.size(); ++a)
    for (std::size_t b = 0; b < rcv.states.size(); ++b) s.states.push_back(name(static_cast<int>(a), static_cast<int>(b)));
  s.initial = name(0, 0);
  auto rule = [](const std::string& from, const std::string& to, const std::string& label) {
    LcsSpec::Rule r{from, to, "", "", "", label};
    if (label.size() == 5) r.channel = label.substr(0, 3), r.op = label.substr(3, 1), r.msg = label.substr(4, 1);
    return r;
  };
  for (const auto& m : snd.moves)
    for (std::size_t b = 0; b < rcv.states.size(); ++b)
      s.rules.push_back(rule(name(m.from, static_cast<int>(b)), name(m.to, static_cast<int>(b)), m.label));
  for (const auto& m : rcv.moves)
    for (std::size_t a = 0; a < snd.states.size(); ++a)
      s.rules.push_back(rule(name(static_cast<int>(a), m.from), name(static_cast<int>(a), m.to), m.label));
  return s;
}

inline LcsSpec abp() { return abp_product(abp_sender(), abp_receiver()); }
inline LcsSpec abp_unfolded(int sessions) {
  if (sessions < 1 || sessions > 8) throw UsageError("abp_unfolded needs 1 <= sessions <= 8");
  return abp_product(abp_sender(sessions), abp_receiver());
}

// Sender and receiver actions on different channels commute; snd and rcv
// commute with nothing.
inline std::vector<std::pair<std::string, std::string>> abp_independence() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const char* x : {"0", "1"})
    for (const char* y : {"0", "1"}) {
      out.push_back({std::string("c_M!") + x, std::string("c_A!") + y});
      out.push_back({std::string("c_A?") + x, std::string("c_M?") + y});
    }
  return out;
}

}  // namespace tbound::fixtures
