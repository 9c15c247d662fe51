#pragma once

#include <algorithm>
#include <map>
#include <set>

#include "tbound/common.hpp"

namespace tbound {

// Deterministic automaton skeleton; partial unless completed.
struct Automaton {
  Alphabet alphabet;
  std::vector<std::string> state_names;
  int initial = 0;
  std::vector<std::vector<int>> delta;  // delta[q][a], -1 when undefined

  Automaton() = default;
  Automaton(Alphabet al, int states, int init = 0)
      : alphabet(std::move(al)), initial(init),
        delta(static_cast<std::size_t>(states), std::vector<int>(alphabet.size(), -1)) {
    for (int q = 0; q < states; ++q) state_names.push_back(std::to_string(q));
  }

  bool operator==(const Automaton&) const = default;

  int size() const { return static_cast<int>(delta.size()); }

  int add_state(std::string name = {}) {
    delta.emplace_back(alphabet.size(), -1);
    state_names.push_back(name.empty() ? std::to_string(delta.size() - 1) : std::move(name));
    return size() - 1;
  }

  void set(int q, Letter a, int r) { delta.at(q).at(a) = r; }
  void set(int q, const std::string& a, int r) { set(q, alphabet.at(a), r); }

  int next(int q, Letter a) const {
    if (q < 0) return -1;
    return delta[static_cast<std::size_t>(q)][static_cast<std::size_t>(a)];
  }

  int run(const Word& w, int from) const {
    int q = from;
    for (Letter a : w) {
      q = next(q, a);
      if (q < 0) return -1;
    }
    return q;
  }
  int run(const Word& w) const { return run(w, initial); }

  bool is_total() const {
    for (const auto& row : delta)
      for (int r : row)
        if (r < 0) return false;
    return true;
  }

  // Same automaton over a larger alphabet; letters it does not know block.
  Automaton over(const Alphabet& target) const {
    for (const auto& n : alphabet.names())
      if (!target.find(n))
        throw ModelError("automaton letter '" + n + "' is not a letter of the system");
    Automaton out(target, size(), initial);
    out.state_names = state_names;
    for (int q = 0; q < size(); ++q)
      for (Letter a = 0; a < static_cast<Letter>(alphabet.size()); ++a)
        out.delta[q][target.at(alphabet.name(a))] = delta[q][a];
    return out;
  }

  std::vector<bool> reachable() const {
    std::vector<bool> seen(delta.size(), false);
    std::vector<int> stack{initial};
    seen[initial] = true;
    while (!stack.empty()) {
      int q = stack.back();
      stack.pop_back();
      for (int r : delta[q])
        if (r >= 0 && !seen[r]) seen[r] = true, stack.push_back(r);
    }
    return seen;
  }

 protected:
  // Adds a sink if needed; returns its index or -1.
  int complete_in_place() {
    if (is_total()) return -1;
    int sink = add_state("sink");
    for (auto& row : delta)
      for (int& r : row)
        if (r < 0) r = sink;
    return sink;
  }
};

struct Dfa : Automaton {
  std::vector<bool> accepting;
  bool operator==(const Dfa&) const = default;

  Dfa() = default;
  Dfa(Alphabet al, int states, int init = 0)
      : Automaton(std::move(al), states, init), accepting(static_cast<std::size_t>(states), false) {}

  int add_state(std::string name = {}, bool acc = false) {
    accepting.push_back(acc);
    return Automaton::add_state(std::move(name));
  }

  bool accepts(const Word& w) const {
    int q = run(w);
    return q >= 0 && accepting[q];
  }

  Dfa completed() const {
    Dfa d = *this;
    if (d.complete_in_place() >= 0) d.accepting.push_back(false);
    return d;
  }

  Dfa complemented() const {
    Dfa d = completed();
    d.accepting.flip();
    return d;
  }

  // Minimal partial DFA for the same language: reachable part, Moore
  // refinement, then states that cannot reach acceptance are dropped.
  Dfa minimized() const {
    Dfa c = completed();
    const int n = c.size();
    const auto k = c.alphabet.size();
    std::vector<int> cls(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) cls[static_cast<std::size_t>(q)] = c.accepting[static_cast<std::size_t>(q)] ? 1 : 0;
    for (std::size_t classes = 0;;) {
      std::map<std::vector<int>, int> sig;
      std::vector<int> next(static_cast<std::size_t>(n));
      for (int q = 0; q < n; ++q) {
        std::vector<int> key{cls[static_cast<std::size_t>(q)]};
        for (std::size_t a = 0; a < k; ++a) key.push_back(cls[static_cast<std::size_t>(c.delta[static_cast<std::size_t>(q)][a])]);
        next[static_cast<std::size_t>(q)] = sig.emplace(std::move(key), static_cast<int>(sig.size())).first->second;
      }
      cls = std::move(next);
      if (sig.size() == classes) break;
      classes = sig.size();
    }
    // live classes reach an accepting state
    int m = 1 + *std::max_element(cls.begin(), cls.end());
    std::vector<std::vector<int>> back(static_cast<std::size_t>(m));
    std::vector<bool> live(static_cast<std::size_t>(m), false);
    std::vector<int> work;
    for (int q = 0; q < n; ++q) {
      int x = cls[static_cast<std::size_t>(q)];
      for (std::size_t a = 0; a < k; ++a) back[static_cast<std::size_t>(cls[static_cast<std::size_t>(c.delta[static_cast<std::size_t>(q)][a])])].push_back(x);
      if (c.accepting[static_cast<std::size_t>(q)] && !live[static_cast<std::size_t>(x)]) live[static_cast<std::size_t>(x)] = true, work.push_back(x);
    }
    while (!work.empty()) {
      int x = work.back();
      work.pop_back();
      for (int y : back[static_cast<std::size_t>(x)])
        if (!live[static_cast<std::size_t>(y)]) live[static_cast<std::size_t>(y)] = true, work.push_back(y);
    }
    // renumber reachable live classes breadth first from the initial one
    Dfa d(c.alphabet, 0);
    std::vector<int> id(static_cast<std::size_t>(m), -1), rep(static_cast<std::size_t>(m), -1);
    for (int q = 0; q < n; ++q)
      if (rep[static_cast<std::size_t>(cls[static_cast<std::size_t>(q)])] < 0) rep[static_cast<std::size_t>(cls[static_cast<std::size_t>(q)])] = q;
    int init = cls[static_cast<std::size_t>(c.initial)];
    if (!live[static_cast<std::size_t>(init)]) {
      d.add_state("empty", false);
      return d;
    }
    std::vector<int> order{init};
    id[static_cast<std::size_t>(init)] = d.add_state({}, c.accepting[static_cast<std::size_t>(rep[static_cast<std::size_t>(init)])]);
    for (std::size_t i = 0; i < order.size(); ++i) {
      int x = order[i];
      int q = rep[static_cast<std::size_t>(x)];
      for (std::size_t a = 0; a < k; ++a) {
        int y = cls[static_cast<std::size_t>(c.delta[static_cast<std::size_t>(q)][a])];
        if (!live[static_cast<std::size_t>(y)]) continue;
        if (id[static_cast<std::size_t>(y)] < 0) {
          id[static_cast<std::size_t>(y)] = d.add_state({}, c.accepting[static_cast<std::size_t>(rep[static_cast<std::size_t>(y)])]);
          order.push_back(y);
        }
        d.set(id[static_cast<std::size_t>(x)], static_cast<Letter>(a), id[static_cast<std::size_t>(y)]);
      }
    }
    d.initial = 0;
    return d;
  }

  // One-state automaton accepting everything.
  static Dfa universal(const Alphabet& al) {
    Dfa d(al, 1);
    d.accepting[0] = true;
    for (Letter a = 0; a < static_cast<Letter>(al.size()); ++a) d.set(0, a, 0);
    return d;
  }
};

// Deterministic Büchi automaton (all states accepting for safety languages).
struct DBuchi : Dfa {
  using Dfa::Dfa;
};

struct RabinPair {
  std::vector<bool> E, F;
  bool operator==(const RabinPair&) const = default;
};

struct DRabin : Automaton {
  std::vector<RabinPair> pairs;
  bool operator==(const DRabin&) const = default;

  using Automaton::Automaton;

  // Acceptance of the lasso u v^omega.
  bool accepts_lasso(const Word& u, const Word& v) const {
    if (v.empty()) throw UsageError("lasso loop must be non-empty");
    int q = run(u);
    if (q < 0) return false;
    std::map<int, std::size_t> seen;  // state at loop entry -> iteration
    std::vector<std::vector<int>> visits;
    while (!seen.count(q)) {
      seen[q] = visits.size();
      std::vector<int> vis;
      for (Letter a : v) {
        q = next(q, a);
        if (q < 0) return false;
        vis.push_back(q);
      }
      visits.push_back(std::move(vis));
    }
    std::set<int> inf;
    for (std::size_t i = seen[q]; i < visits.size(); ++i)
      inf.insert(visits[i].begin(), visits[i].end());
    for (const auto& p : pairs) {
      bool e = false, f = false;
      for (int s : inf) e |= p.E[s], f |= p.F[s];
      if (!e && f) return true;
    }
    return false;
  }
};

}  // namespace tbound
