#pragma once

#include <chrono>
#include <functional>
#include <unordered_set>

#include "tbound/coverability.hpp"
#include "tbound/expressions.hpp"
#include "tbound/product.hpp"

namespace tbound {

struct InclusionResult {
  bool included = false;
  bool decided = true;  // false when the iteration cap was hit
  std::size_t dfa_states = 0;
  std::size_t iterations = 0;
  std::size_t basis_size = 0;
};

// T(sys) included in the language of the complement of `comp`: no run of
// sys x comp reaches an accepting state of comp.
template <System S>
InclusionResult trace_inclusion_dfa(const S& sys, const Dfa& comp, std::size_t max_iterations = 0,
                                    const std::function<bool(const typename S::Config&)>& coverable = {}) {
  InclusionResult r;
  r.dfa_states = static_cast<std::size_t>(comp.size());
  SyncProduct<S> prod(sys, comp);
  std::vector<typename SyncProduct<S>::Config> final_basis;
  for (const auto& m : sys.min_basis())
    for (int q = 0; q < comp.size(); ++q)
      if (comp.accepting[static_cast<std::size_t>(q)]) final_basis.push_back({m, q});
  try {
    std::function<bool(const typename SyncProduct<S>::Config&)> keep;
    if (coverable) keep = [&](const typename SyncProduct<S>::Config& c) { return coverable(c.sys); };
    auto st = backward_coverability(prod, prod.initial(), final_basis, max_iterations, keep);
    r.included = !st.covered;
    r.iterations = st.iterations;
    r.basis_size = st.basis_size;
  } catch (const BudgetExceeded&) {
    r.decided = false;
    r.iterations = max_iterations;
  }
  return r;
}

template <System S>
InclusionResult trace_inclusion(const S& sys, const BoundedExpression& expr, std::size_t max_iterations = 0) {
  return trace_inclusion_dfa(sys, expr_to_complement_dfa(expr, sys.alphabet()), max_iterations);
}

// L(d) included in L(e), by exploring d against the subset construction of e.
inline bool dfa_within_expression(const Dfa& d, const BoundedExpression& e) {
  detail::ExprNfa nfa(e);
  std::set<std::pair<int, std::vector<bool>>> seen;
  std::vector<std::pair<int, std::vector<bool>>> work{{d.initial, nfa.start()}};
  seen.insert(work.front());
  while (!work.empty()) {
    auto [q, set] = work.back();
    work.pop_back();
    if (d.accepting[static_cast<std::size_t>(q)] && !nfa.accepting(set)) return false;
    for (Letter a = 0; a < static_cast<Letter>(d.alphabet.size()); ++a) {
      int r = d.next(q, a);
      if (r < 0) continue;
      std::pair<int, std::vector<bool>> n{r, nfa.step(set, a)};
      if (seen.insert(n).second) work.push_back(std::move(n));
    }
  }
  return true;
}

template <System S>
bool check_trace_inclusion(const S& sys, const BoundedExpression& expr) {
  return trace_inclusion(sys, expr).included;
}

// Plain traces up to a length, breadth first, capped in number.
template <System S>
std::vector<Word> enumerate_traces(const S& sys, std::size_t max_len, std::size_t cap = 50000) {
  std::vector<Word> out{Word{}};
  std::vector<std::pair<Word, typename S::Config>> frontier{{Word{}, sys.initial()}};
  for (std::size_t d = 0; d < max_len && out.size() < cap; ++d) {
    std::vector<std::pair<Word, typename S::Config>> next;
    for (const auto& [w, c] : frontier)
      for (Letter a = 0; a < static_cast<Letter>(sys.alphabet().size()); ++a) {
        auto n = sys.step(c, a);
        if (!n) continue;
        Word w2 = w;
        w2.push_back(a);
        out.push_back(w2);
        next.push_back({std::move(w2), std::move(*n)});
        if (out.size() >= cap) break;
      }
    frontier = std::move(next);
  }
  return out;
}

namespace detail {

struct LabelledEdge {
  Letter label;
  int to;
};

struct Edge {
  bool loop = false;
  Word letters;
};

// Tree of accelerated runs with parent links.
template <class C>
struct RunNode {
  C c;
  int parent = -1;
  Edge edge;
  std::size_t depth = 0;
};

template <class C>
AcceleratedWord path_word(const std::vector<RunNode<C>>& t, int n, int stop = -1) {
  std::vector<const Edge*> edges;
  for (int i = n; i != stop && t[static_cast<std::size_t>(i)].parent >= 0; i = t[static_cast<std::size_t>(i)].parent)
    edges.push_back(&t[static_cast<std::size_t>(i)].edge);
  AcceleratedWord w;
  for (auto it = edges.rbegin(); it != edges.rend(); ++it) {
    if ((*it)->loop) w.push_loop((*it)->letters);
    else w.push_plain((*it)->letters);
  }
  return w;
}

// Accelerations of node n's config against its ancestors along plain
// edges, nearest ancestor (shortest loop) first.  `stop` bounds the walk.
template <System S>
std::vector<std::pair<Word, typename S::Config>> ancestor_accelerations(
    const S& s, const std::vector<RunNode<typename S::Config>>& t, int n, int stop = -1) {
  std::vector<std::pair<Word, typename S::Config>> out;
  const auto& cur = t[static_cast<std::size_t>(n)].c;
  Word rev;
  for (int i = n; t[static_cast<std::size_t>(i)].parent >= 0 && i != stop;) {
    const auto& e = t[static_cast<std::size_t>(i)].edge;
    if (e.loop) break;
    rev.insert(rev.end(), e.letters.rbegin(), e.letters.rend());
    i = t[static_cast<std::size_t>(i)].parent;
    const auto& anc = t[static_cast<std::size_t>(i)].c;
    if (anc == cur || !s.leq(anc, cur)) continue;
    Word u(rev.rbegin(), rev.rend());
    auto acc = s.accelerate(cur, u);
    if (!acc || *acc == cur) continue;
    bool dup = false;
    for (const auto& [w, c] : out) dup = dup || c == *acc;
    if (!dup) out.push_back({std::move(u), std::move(*acc)});
  }
  return out;
}

}  // namespace detail

template <System S>
struct ForkWitness {
  using Config = typename S::Config;
  AcceleratedWord stem;
  AcceleratedWord a_branch;
  Word b_branch;
  Config pivot, s_a, s_b;
  std::size_t level = 0;
};

// Replays a fork and checks the increasing conditions.
template <System S>
bool replay_fork(const S& s, const ForkWitness<S>& f) {
  auto p = apply_accelerated_word(s, s.initial(), f.stem);
  if (!p || !(*p == f.pivot)) return false;
  auto fa = f.a_branch.first_letter();
  if (!fa || f.b_branch.empty() || *fa == f.b_branch.front()) return false;
  if (f.a_branch.segments().front().loop) return false;
  auto sa = apply_accelerated_word(s, *p, f.a_branch);
  auto sb = step_word(s, *p, f.b_branch);
  return sa && sb && s.leq(*p, *sa) && s.leq(*p, *sb);
}

// Resumable search for increasing forks, by increasing level
// = stem steps + longest branch.  Accelerated steps count as one.
template <System S>
class ForkSearch {
 public:
  using Config = typename S::Config;

  explicit ForkSearch(const S& s) : s_(s) {
    g_.tree.push_back({s_.initial(), -1, {}, 0});
    g_.layers.push_back({0});
    gindex_.emplace(s_.initial(), 0);
  }

  void exclude(std::function<bool(const Config&)> p) { exclude_ = std::move(p); }

  // Extra pivot reached by a known accelerated word, e.g. a clover node.
  // It is examined from the current level on.
  void add_pivot(const Config& c, AcceleratedWord stem) {
    if (gindex_.count(c)) return;
    int id = static_cast<int>(g_.tree.size());
    gindex_.emplace(c, id);
    g_.tree.push_back({c, -1, {}, 0});
    g_.first.push_back(-1);
    g_.plain.push_back(true);
    external_.emplace(id, std::move(stem));
    progress_ = true;
    finished_ = false;
  }

  // Spends roughly `budget` more successor computations.  Absent when the
  // budget runs out (call again to resume) or the search is exhausted.
  std::optional<ForkWitness<S>> next(std::size_t budget) {
    limit_ = used_ + budget;
    while (!finished_) {
      if (!extend(g_, level_, true)) return std::nullopt;
      progress_ = progress_ || g_.open;
      for (; cursor_ < g_.tree.size(); ++cursor_) {
        const auto& piv = g_.tree[cursor_];
        if (piv.depth + 1 > level_) continue;
        int p = static_cast<int>(cursor_);
        if (reported_.count(p)) continue;
        if (exclude_ && exclude_(piv.c)) continue;
        auto& loc = local(p);
        if (!extend(loc, level_ - piv.depth, false)) return std::nullopt;
        progress_ = progress_ || loc.open;
        if (auto f = fork_at(p, loc, level_ - piv.depth)) {
          reported_.insert(p);
          ++cursor_;
          return f;
        }
      }
      if (!progress_) {
        finished_ = true;
        break;
      }
      cursor_ = 0;
      progress_ = false;
      ++level_;
    }
    return std::nullopt;
  }

  bool finished() const { return finished_; }
  std::size_t nodes_used() const { return used_; }
  std::size_t level() const { return level_; }

 private:
  // Tree explored layer by layer; an accelerated child sits one layer
  // below the plain child it extends.
  struct Tree {
    std::vector<detail::RunNode<Config>> tree;
    std::vector<Letter> first;
    std::vector<bool> plain;
    std::vector<std::vector<int>> layers;
    std::size_t layer = 0, pos = 0;  // next node to expand
    bool open = true;
    std::vector<int> best_any, best_plain;  // per first letter
    std::unordered_map<std::size_t, std::vector<int>> index;  // config hash -> ids
  };

  int add(Tree& t, Config c, int parent, detail::Edge e, bool global) {
    Letter first = -1;
    bool plain = true;
    if (!global) {
      auto pp = static_cast<std::size_t>(parent);
      first = parent == 0 ? e.letters.front() : t.first[pp];
      plain = t.plain[pp] && !e.loop;
    }
    std::size_t h = hash_value(c);
    if (global) {
      if (gindex_.count(c)) return -1;
    } else {
      for (int id : t.index[h]) {
        auto i = static_cast<std::size_t>(id);
        if (t.first[i] == first && t.plain[i] == plain && t.tree[i].c == c) return -1;
      }
    }
    int id = static_cast<int>(t.tree.size());
    std::size_t depth = t.tree[static_cast<std::size_t>(parent)].depth + 1;
    bool up = !global && s_.leq(t.tree[0].c, c);
    if (global) gindex_.emplace(c, id);
    else t.index[h].push_back(id);
    t.tree.push_back({std::move(c), parent, std::move(e), depth});
    t.first.push_back(first);
    t.plain.push_back(plain);
    if (t.layers.size() <= depth) t.layers.resize(depth + 1);
    t.layers[depth].push_back(id);
    if (up) {
      auto fi = static_cast<std::size_t>(first);
      if (t.best_any[fi] < 0) t.best_any[fi] = id;
      if (plain && t.best_plain[fi] < 0) t.best_plain[fi] = id;
    }
    return id;
  }

  // Expands every node of depth < d.  False when the budget ran out.
  bool extend(Tree& t, std::size_t d, bool global) {
    t.open = false;
    while (t.layer < t.layers.size()) {
      if (t.pos >= t.layers[t.layer].size()) {
        ++t.layer;
        t.pos = 0;
        continue;
      }
      if (t.layer >= d) {
        t.open = true;
        return true;
      }
      if (used_ >= limit_) return false;
      int n = t.layers[t.layer][t.pos];
      for (Letter a = 0; a < static_cast<Letter>(s_.alphabet().size()); ++a) {
        auto c = s_.step(t.tree[static_cast<std::size_t>(n)].c, a);
        ++used_;
        if (!c) continue;
        int child = add(t, std::move(*c), n, {false, {a}}, global);
        if (child < 0) continue;
        for (auto& [u, acc] : detail::ancestor_accelerations(s_, t.tree, child)) {
          ++used_;
          add(t, std::move(acc), child, {true, u}, global);
        }
      }
      ++t.pos;
    }
    return true;
  }

  Tree& local(int p) {
    auto it = locals_.find(p);
    if (it != locals_.end()) return it->second;
    Tree& l = locals_[p];
    l.tree.push_back({g_.tree[static_cast<std::size_t>(p)].c, -1, {}, 0});
    l.first.push_back(-1);
    l.plain.push_back(true);
    l.layers.push_back({0});
    l.best_any.assign(s_.alphabet().size(), -1);
    l.best_plain.assign(s_.alphabet().size(), -1);
    return l;
  }

  std::optional<ForkWitness<S>> fork_at(int p, const Tree& l, std::size_t bound) const {
    const std::size_t k = s_.alphabet().size();
    int best_a = -1, best_b = -1;
    std::size_t best = SIZE_MAX;
    for (std::size_t a = 0; a < k; ++a) {
      int na = l.best_any[a];
      if (na < 0) continue;
      for (std::size_t b = 0; b < k; ++b) {
        int nb = l.best_plain[b];
        if (a == b || nb < 0) continue;
        std::size_t lv = std::max(l.tree[static_cast<std::size_t>(na)].depth, l.tree[static_cast<std::size_t>(nb)].depth);
        if (lv <= bound && lv < best) best = lv, best_a = na, best_b = nb;
      }
    }
    if (best_a < 0) return std::nullopt;
    ForkWitness<S> f;
    auto ext = external_.find(p);
    f.stem = ext != external_.end() ? ext->second : detail::path_word(g_.tree, p);
    f.pivot = g_.tree[static_cast<std::size_t>(p)].c;
    f.a_branch = detail::path_word(l.tree, best_a);
    f.b_branch = detail::path_word(l.tree, best_b).segments().front().letters;
    f.s_a = l.tree[static_cast<std::size_t>(best_a)].c;
    f.s_b = l.tree[static_cast<std::size_t>(best_b)].c;
    f.level = g_.tree[static_cast<std::size_t>(p)].depth + best;
    return f;
  }

  const S& s_;
  Tree g_;
  std::unordered_map<Config, int, ConfigHash<Config>> gindex_;
  std::unordered_map<int, Tree> locals_;
  std::unordered_map<int, AcceleratedWord> external_;
  std::unordered_set<int> reported_;
  std::function<bool(const Config&)> exclude_;
  std::size_t level_ = 1, cursor_ = 0;
  std::size_t used_ = 0, limit_ = 0;
  bool progress_ = false, finished_ = false;
};

template <System S>
std::optional<ForkWitness<S>> find_increasing_fork(const S& s, std::size_t budget) {
  ForkSearch<S> search(s);
  return search.next(budget);
}

// Accelerated forward exploration with subsumption.  The labelled graph it
// leaves behind simulates every run of the system.
template <System S>
class Clover {
 public:
  using Config = typename S::Config;
  using GraphEdge = detail::LabelledEdge;

  explicit Clover(const S& s) : s_(s) {
    t_.push_back({s_.initial(), -1, {}, 0});
    loops_.emplace_back();
    out_.emplace_back();
    seen_[s_.bucket(t_[0].c)].push_back(0);
  }

  // Accelerated word from the initial configuration to node n.
  AcceleratedWord stem(int n) const {
    std::vector<int> path;
    for (int i = n; i > 0; i = t_[static_cast<std::size_t>(i)].parent) path.push_back(i);
    AcceleratedWord w;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      const auto& node = t_[static_cast<std::size_t>(*it)];
      w.push_plain(node.edge.letters);
      for (const auto& u : loops_[static_cast<std::size_t>(*it)]) w.push_loop(u);
    }
    return w;
  }

  // True once the exploration has terminated.
  bool run(std::size_t budget) {
    std::size_t limit = used_ + budget;
    while (next_ < t_.size()) {
      int n = static_cast<int>(next_);
      for (Letter a = 0; a < static_cast<Letter>(s_.alphabet().size()); ++a) {
        if (a < resume_letter_) continue;
        if (used_ >= limit) {
          resume_letter_ = a;
          return false;
        }
        auto c = s_.step(t_[static_cast<std::size_t>(n)].c, a);
        if (!c) continue;
        ++used_;
        Config cur = std::move(*c);
        std::vector<Word> loops;
        // walk ancestors, nearest first; the loop word is the path to the child
        Word rev{a};
        for (int i = n;; i = t_[static_cast<std::size_t>(i)].parent) {
          const auto& anc = t_[static_cast<std::size_t>(i)].c;
          if (!(anc == cur) && s_.leq(anc, cur)) {
            Word u(rev.rbegin(), rev.rend());
            if (auto acc = s_.accelerate(cur, u); acc && !(*acc == cur)) {
              cur = std::move(*acc);
              loops.push_back(std::move(u));
            }
          }
          if (t_[static_cast<std::size_t>(i)].parent < 0) break;
          const auto& e = t_[static_cast<std::size_t>(i)].edge;
          rev.insert(rev.end(), e.letters.rbegin(), e.letters.rend());
        }
        if (int m = covering(cur); m >= 0) {
          out_[static_cast<std::size_t>(n)].push_back({a, m});
          continue;
        }
        int id = static_cast<int>(t_.size());
        t_.push_back({cur, n, {false, {a}}, t_[static_cast<std::size_t>(n)].depth + 1});
        loops_.push_back(std::move(loops));
        out_.emplace_back();
        out_[static_cast<std::size_t>(n)].push_back({a, id});
        seen_[s_.bucket(cur)].push_back(id);
      }
      resume_letter_ = 0;
      ++next_;
    }
    return true;
  }

  bool complete() const { return next_ >= t_.size(); }
  std::size_t nodes() const { return t_.size(); }
  std::size_t used() const { return used_; }

  std::vector<Config> basis() const {
    std::vector<Config> out;
    for (const auto& n : t_) {
      bool dominated = false;
      for (const auto& m : t_)
        if (!(m.c == n.c) && s_.leq(n.c, m.c)) { dominated = true; break; }
      if (!dominated && std::find(out.begin(), out.end(), n.c) == out.end()) out.push_back(n.c);
    }
    return out;
  }

  const std::vector<std::vector<GraphEdge>>& graph() const { return out_; }
  const Config& config(int n) const { return t_[static_cast<std::size_t>(n)].c; }

 private:
  int covering(const Config& c) const {
    auto it = seen_.find(s_.bucket(c));
    if (it == seen_.end()) return -1;
    for (int id : it->second)
      if (s_.leq(c, t_[static_cast<std::size_t>(id)].c)) return id;
    return -1;
  }

  const S& s_;
  std::vector<detail::RunNode<Config>> t_;
  std::vector<std::vector<Word>> loops_;  // accelerations applied on arrival
  std::vector<std::vector<GraphEdge>> out_;
  std::unordered_map<std::size_t, std::vector<int>> seen_;
  std::size_t next_ = 0;
  Letter resume_letter_ = 0;
  std::size_t used_ = 0;
};

template <System S>
struct CloverResult {
  std::vector<typename S::Config> basis;
  bool complete = false;
  std::size_t nodes = 0;
};

template <System S>
CloverResult<S> clover(const S& s, std::size_t budget) {
  Clover<S> c(s);
  CloverResult<S> r;
  r.complete = c.run(budget);
  r.basis = c.basis();
  r.nodes = c.nodes();
  return r;
}

// Bounded expression covering the language of a flat labelled graph (every
// strongly connected component a single simple cycle).  SCCs are emitted in
// topological order; a cycle c1..cm contributes c1*..cm* (c)* c1*..cm*,
// and each edge leaving a component contributes its letter starred.
template <class Edge>
std::optional<BoundedExpression> flat_graph_expression(const std::vector<std::vector<Edge>>& g, int root = 0) {
  const int n = static_cast<int>(g.size());
  std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0),
      comp(static_cast<std::size_t>(n), -1);
  std::vector<bool> on(static_cast<std::size_t>(n), false);
  std::vector<int> stack;
  std::vector<std::vector<int>> comps;  // reverse topological order
  int counter = 0;
  // iterative Tarjan
  struct Frame {
    int v;
    std::size_t i;
  };
  std::vector<Frame> call{{root, 0}};
  index[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = counter++;
  stack.push_back(root);
  on[static_cast<std::size_t>(root)] = true;
  while (!call.empty()) {
    auto& fr = call.back();
    int v = fr.v;
    if (fr.i < g[static_cast<std::size_t>(v)].size()) {
      int w = g[static_cast<std::size_t>(v)][fr.i++].to;
      if (index[static_cast<std::size_t>(w)] < 0) {
        index[static_cast<std::size_t>(w)] = low[static_cast<std::size_t>(w)] = counter++;
        stack.push_back(w);
        on[static_cast<std::size_t>(w)] = true;
        call.push_back({w, 0});
      } else if (on[static_cast<std::size_t>(w)]) {
        low[static_cast<std::size_t>(v)] = std::min(low[static_cast<std::size_t>(v)], index[static_cast<std::size_t>(w)]);
      }
      continue;
    }
    if (low[static_cast<std::size_t>(v)] == index[static_cast<std::size_t>(v)]) {
      std::vector<int> c;
      int x;
      do {
        x = stack.back();
        stack.pop_back();
        on[static_cast<std::size_t>(x)] = false;
        comp[static_cast<std::size_t>(x)] = static_cast<int>(comps.size());
        c.push_back(x);
      } while (x != v);
      comps.push_back(std::move(c));
    }
    call.pop_back();
    if (!call.empty()) {
      int u = call.back().v;
      low[static_cast<std::size_t>(u)] = std::min(low[static_cast<std::size_t>(u)], low[static_cast<std::size_t>(v)]);
    }
  }

  BoundedExpression e;
  for (auto ci = comps.rbegin(); ci != comps.rend(); ++ci) {
    const auto& c = *ci;
    const int id = comp[static_cast<std::size_t>(c.front())];
    std::size_t inner = 0;
    for (int v : c) {
      std::size_t k = 0;
      for (const auto& ed : g[static_cast<std::size_t>(v)]) k += comp[static_cast<std::size_t>(ed.to)] == id;
      if (k > 1) return std::nullopt;
      inner += k;
    }
    if (inner > 0) {
      if (inner != c.size()) return std::nullopt;
      int start = *std::min_element(c.begin(), c.end());
      Word cyc;
      int v = start;
      do {
        for (const auto& ed : g[static_cast<std::size_t>(v)])
          if (comp[static_cast<std::size_t>(ed.to)] == id) {
            cyc.push_back(ed.label);
            v = ed.to;
            break;
          }
      } while (v != start);
      for (Letter a : cyc) e.words.push_back({a});
      if (cyc.size() > 1) {
        e.words.push_back(cyc);
        for (Letter a : cyc) e.words.push_back({a});
      }
    }
    std::set<Letter> exits;
    for (int v : c)
      for (const auto& ed : g[static_cast<std::size_t>(v)])
        if (comp[static_cast<std::size_t>(ed.to)] != id) exits.insert(ed.label);
    for (Letter a : exits) e.words.push_back({a});
  }
  if (e.words.empty()) return std::nullopt;
  return simplify(std::move(e));
}

// Minimal DFA of the prefix-closed language of a labelled graph rooted at 0.
template <class Edge>
Dfa graph_dfa(const std::vector<std::vector<Edge>>& g, const Alphabet& al) {
  std::map<std::vector<int>, int> ids;
  std::vector<std::vector<int>> sets;
  Dfa d(al, 0);
  auto id_of = [&](std::vector<int> s) {
    auto [it, fresh] = ids.emplace(s, d.size());
    if (fresh) {
      d.add_state({}, true);
      sets.push_back(std::move(s));
    }
    return it->second;
  };
  id_of({0});
  for (std::size_t q = 0; q < sets.size(); ++q)
    for (Letter a = 0; a < static_cast<Letter>(al.size()); ++a) {
      std::vector<int> to;
      for (int v : sets[q])
        for (const auto& e : g[static_cast<std::size_t>(v)])
          if (e.label == a) to.push_back(e.to);
      if (to.empty()) continue;
      std::sort(to.begin(), to.end());
      to.erase(std::unique(to.begin(), to.end()), to.end());
      int r = id_of(std::move(to));
      d.set(static_cast<int>(q), a, r);
    }
  return d.minimized();
}

inline std::vector<std::vector<detail::LabelledEdge>> dfa_graph(const Dfa& d) {
  std::vector<std::vector<detail::LabelledEdge>> g(static_cast<std::size_t>(d.size()));
  for (int q = 0; q < d.size(); ++q)
    for (Letter a = 0; a < static_cast<Letter>(d.alphabet.size()); ++a)
      if (int r = d.next(q, a); r >= 0) g[static_cast<std::size_t>(q)].push_back({a, r});
  return g;
}

struct Budget {
  std::size_t nodes = 1000000;
  std::size_t exprs = 10000;
  std::size_t inclusion_iterations = 2000000;
};

template <System S>
struct Verdict {
  enum class Kind { Bounded, Unbounded, Unknown };
  Kind kind = Kind::Unknown;
  std::optional<BoundedExpression> expr;
  InclusionResult inclusion;
  std::string expr_source;  // "clover" or "enumeration"
  // Clover certificates go through an intermediate automaton D:
  // T(sys) in L(D) by coverability and L(D) in L(expr) by automata.
  std::optional<Dfa> via;
  std::optional<ForkWitness<S>> fork;
  std::size_t nodes_used = 0;
  std::size_t exprs_checked = 0;
  double seconds = 0;

  bool bounded() const { return kind == Kind::Bounded; }
  bool unbounded() const { return kind == Kind::Unbounded; }
};

inline const char* kind_name(int k) {
  static const char* names[] = {"bounded", "unbounded", "unknown"};
  return names[k];
}

// Dovetails certified candidate expressions against the fork search.
template <System S>
Verdict<S> decide_boundedness(const S& s, const Budget& budget = {}) {
  using Config = typename S::Config;
  auto t0 = std::chrono::steady_clock::now();
  Verdict<S> v;
  ForkSearch<S> forks(s);
  std::optional<ForkSearch<S>> seeded;  // restarts from level 1 at clover nodes
  bool seeded_done = false;
  Clover<S> cl(s);
  bool clover_done = false, clover_tried = false;
  ExpressionEnumerator en(s.alphabet().size());
  std::vector<Word> sample;
  bool sampled = false;
  std::size_t slice = 256;
  bool forks_done = false;

  auto spent = [&] { return forks.nodes_used() + cl.used() + (seeded ? seeded->nodes_used() : 0); };
  auto finish = [&](typename Verdict<S>::Kind k) {
    v.kind = k;
    v.nodes_used = spent();
    v.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return v;
  };
  auto certify = [&](const BoundedExpression& e, const char* src) {
    auto inc = trace_inclusion(s, e, budget.inclusion_iterations);
    ++v.exprs_checked;
    if (inc.decided && inc.included) {
      v.expr = e;
      v.inclusion = inc;
      v.expr_source = src;
      return true;
    }
    return false;
  };

  while (true) {
    std::size_t used = spent();
    if (used >= budget.nodes && v.exprs_checked >= budget.exprs) break;
    if (seeded && !seeded_done && used < budget.nodes) {
      if (auto f = seeded->next(std::min(slice, budget.nodes - used))) {
        v.fork = std::move(f);
        return finish(Verdict<S>::Kind::Unbounded);
      }
      seeded_done = seeded->finished();
      used = spent();
    }
    if (!forks_done && used < budget.nodes) {
      if (auto f = forks.next(std::min(slice, budget.nodes - used))) {
        v.fork = std::move(f);
        return finish(Verdict<S>::Kind::Unbounded);
      }
      forks_done = forks.finished();
    }
    used = spent();
    if (!clover_done && used < budget.nodes) clover_done = cl.run(std::min(slice, budget.nodes - used));
    if (clover_done && !clover_tried) {
      clover_tried = true;
      seeded.emplace(s);
      for (int n = 0; n < static_cast<int>(cl.nodes()); ++n) seeded->add_pivot(cl.config(n), cl.stem(n));
      Dfa d = graph_dfa(cl.graph(), s.alphabet());
      if (auto e = flat_graph_expression(dfa_graph(d)); e && dfa_within_expression(d, *e)) {
        // drop words the automaton does not need
        for (std::size_t i = e->words.size(); i-- > 0;) {
          BoundedExpression shorter = *e;
          shorter.words.erase(shorter.words.begin() + static_cast<long>(i));
          if (dfa_within_expression(d, shorter)) e = std::move(shorter);
        }
        auto cover = cl.basis();
        std::unordered_map<std::size_t, std::vector<const Config*>> by_bucket;
        for (const auto& c : cover) by_bucket[s.bucket(c)].push_back(&c);
        auto coverable = [&](const Config& c) {
          auto it = by_bucket.find(s.bucket(c));
          if (it == by_bucket.end()) return false;
          return std::any_of(it->second.begin(), it->second.end(), [&](const Config* m) { return s.leq(c, *m); });
        };
        auto inc = trace_inclusion_dfa(s, d.complemented(), budget.inclusion_iterations, coverable);
        ++v.exprs_checked;
        if (inc.decided && inc.included) {
          v.expr = std::move(e);
          v.via = std::move(d);
          v.inclusion = inc;
          v.expr_source = "clover";
          return finish(Verdict<S>::Kind::Bounded);
        }
      }
    }
    // a finished fork search and a finished clover mean no fork anywhere
    if (forks_done && clover_done) {
      if (!sampled) sample = enumerate_traces(s, 6), sampled = true;
    }
    std::size_t per_round = std::max<std::size_t>(1, slice / 64);
    for (std::size_t r = 0; r < per_round && v.exprs_checked < budget.exprs; ++r) {
      auto e = en.next();
      if (!sampled) sample = enumerate_traces(s, 6), sampled = true;
      bool fits = std::all_of(sample.begin(), sample.end(), [&](const Word& w) { return expression_accepts(e, w); });
      if (!fits) {
        ++v.exprs_checked;
        continue;
      }
      if (certify(e, "enumeration")) return finish(Verdict<S>::Kind::Bounded);
    }
    if (forks_done && v.exprs_checked >= budget.exprs) break;
    if ((forks_done || spent() >= budget.nodes) && v.exprs_checked >= budget.exprs) break;
    slice *= 2;
  }
  return finish(Verdict<S>::Kind::Unknown);
}

}  // namespace tbound
