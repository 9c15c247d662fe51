#pragma once

#include "tbound/ltl.hpp"

namespace tbound {

namespace detail {

// Safra tree: nodes carry a name, a label (NBA states) and a mark; children
// are ordered oldest first.
struct SafraNode {
  int name = 0;
  std::vector<bool> label;
  bool marked = false;
  std::vector<SafraNode> kids;

  void encode(std::vector<int>& out) const {
    out.push_back(name);
    out.push_back(marked ? 1 : 0);
    for (std::size_t i = 0; i < label.size(); ++i)
      if (label[i]) out.push_back(static_cast<int>(i));
    out.push_back(-1);
    for (const auto& k : kids) k.encode(out);
    out.push_back(-2);
  }
  bool empty() const { return std::find(label.begin(), label.end(), true) == label.end(); }
  void names(std::vector<bool>& present, std::vector<bool>& marks) const {
    present[static_cast<std::size_t>(name)] = true;
    if (marked) marks[static_cast<std::size_t>(name)] = true;
    for (const auto& k : kids) k.names(present, marks);
  }
};

class Safra {
 public:
  explicit Safra(const Nba& a) : a_(a), n_(static_cast<std::size_t>(a.size())) {}

  std::optional<SafraNode> initial() const {
    SafraNode r;
    r.name = 1;
    r.label.assign(n_, false);
    r.label[static_cast<std::size_t>(a_.initial)] = true;
    return r;
  }

  std::optional<SafraNode> step(const SafraNode& t, Letter a) const {
    SafraNode r = t;
    std::vector<bool> used(2 * n_ + 2, false), dummy(2 * n_ + 2, false);
    r.names(used, dummy);
    unmark(r);
    spawn(r, used);
    update(r, a);
    std::vector<bool> seen(n_, false);
    merge_horizontal(r, seen);
    if (r.empty()) return std::nullopt;
    prune(r);
    merge_vertical(r);
    return r;
  }

  std::size_t max_names() const { return 2 * n_ + 1; }

 private:
  static void unmark(SafraNode& v) {
    v.marked = false;
    for (auto& k : v.kids) unmark(k);
  }
  void spawn(SafraNode& v, std::vector<bool>& used) const {
    for (auto& k : v.kids) spawn(k, used);
    std::vector<bool> acc(n_, false);
    bool any = false;
    for (std::size_t q = 0; q < n_; ++q)
      if (v.label[q] && a_.accepting[q]) acc[q] = true, any = true;
    if (!any) return;
    SafraNode c;
    c.name = fresh(used);
    c.label = std::move(acc);
    v.kids.push_back(std::move(c));
  }
  static int fresh(std::vector<bool>& used) {
    for (std::size_t i = 1; i < used.size(); ++i)
      if (!used[i]) {
        used[i] = true;
        return static_cast<int>(i);
      }
    throw std::logic_error("safra names exhausted");
  }
  void update(SafraNode& v, Letter a) const {
    std::vector<bool> n(n_, false);
    for (std::size_t q = 0; q < n_; ++q)
      if (v.label[q])
        for (int r : a_.delta[q][static_cast<std::size_t>(a)]) n[static_cast<std::size_t>(r)] = true;
    v.label = std::move(n);
    for (auto& k : v.kids) update(k, a);
  }
  // A state kept by an older node is removed from younger ones.
  void merge_horizontal(SafraNode& v, std::vector<bool>& seen) const {
    for (std::size_t q = 0; q < n_; ++q)
      if (v.label[q] && seen[q]) v.label[q] = false;
    std::vector<bool> local = seen;
    for (auto& k : v.kids) merge_horizontal(k, local);
    for (std::size_t q = 0; q < n_; ++q)
      if (v.label[q]) seen[q] = true;
  }
  static void prune(SafraNode& v) {
    std::erase_if(v.kids, [](const SafraNode& k) { return k.empty(); });
    for (auto& k : v.kids) prune(k);
  }
  void merge_vertical(SafraNode& v) const {
    std::vector<bool> u(n_, false);
    for (const auto& k : v.kids)
      for (std::size_t q = 0; q < n_; ++q)
        if (k.label[q]) u[q] = true;
    if (!v.kids.empty() && u == v.label) {
      v.kids.clear();
      v.marked = true;
      return;
    }
    for (auto& k : v.kids) merge_vertical(k);
  }

  const Nba& a_;
  std::size_t n_;
};

}  // namespace detail

// Safra determinization.  Pair i: E_i = trees without node i, F_i = trees
// where node i is marked.  Runs with an empty tree go to a rejecting sink.
inline DRabin nba_to_dra(const Nba& nba) {
  detail::Safra safra(nba);
  DRabin d(nba.alphabet, 0);
  std::map<std::vector<int>, int> ids;
  std::vector<std::optional<detail::SafraNode>> trees;
  auto id_of = [&](const std::optional<detail::SafraNode>& t) {
    std::vector<int> key;
    if (t) t->encode(key);
    else key = {-3};
    auto [it, fresh] = ids.emplace(key, d.size());
    if (fresh) {
      d.add_state();
      trees.push_back(t);
    }
    return it->second;
  };
  d.initial = id_of(safra.initial());
  for (std::size_t q = 0; q < trees.size(); ++q)
    for (Letter a = 0; a < static_cast<Letter>(nba.alphabet.size()); ++a) {
      std::optional<detail::SafraNode> next;
      if (trees[q]) next = safra.step(*trees[q], a);
      int r = id_of(next);
      d.set(static_cast<int>(q), a, r);
    }
  const std::size_t names = safra.max_names() + 1;
  d.pairs.assign(names - 1, RabinPair{std::vector<bool>(trees.size(), false), std::vector<bool>(trees.size(), false)});
  for (std::size_t q = 0; q < trees.size(); ++q) {
    std::vector<bool> present(names + 1, false), marks(names + 1, false);
    if (trees[q]) trees[q]->names(present, marks);
    for (std::size_t i = 1; i < names; ++i) {
      d.pairs[i - 1].E[q] = !present[i];
      d.pairs[i - 1].F[q] = marks[i];
    }
  }
  return d;
}

// Drops pairs no run of the automaton alone can satisfy, and duplicates.
inline DRabin prune_pairs(DRabin d) {
  const int n = d.size();
  std::vector<bool> reach(static_cast<std::size_t>(n), false);
  std::vector<int> work{d.initial};
  reach[static_cast<std::size_t>(d.initial)] = true;
  while (!work.empty()) {
    int q = work.back();
    work.pop_back();
    for (int r : d.delta[static_cast<std::size_t>(q)])
      if (r >= 0 && !reach[static_cast<std::size_t>(r)]) reach[static_cast<std::size_t>(r)] = true, work.push_back(r);
  }
  // some reachable F state lies on a cycle avoiding E
  auto useful = [&](const RabinPair& p) {
    for (int f = 0; f < n; ++f) {
      if (!reach[static_cast<std::size_t>(f)] || !p.F[static_cast<std::size_t>(f)] || p.E[static_cast<std::size_t>(f)]) continue;
      std::vector<bool> seen(static_cast<std::size_t>(n), false);
      std::vector<int> st{f};
      while (!st.empty()) {
        int q = st.back();
        st.pop_back();
        for (int r : d.delta[static_cast<std::size_t>(q)]) {
          if (r < 0 || p.E[static_cast<std::size_t>(r)]) continue;
          if (r == f) return true;
          if (!seen[static_cast<std::size_t>(r)]) seen[static_cast<std::size_t>(r)] = true, st.push_back(r);
        }
      }
    }
    return false;
  };
  std::vector<RabinPair> kept;
  for (auto& p : d.pairs) {
    if (!useful(p)) continue;
    bool dup = false;
    for (const auto& k : kept) dup = dup || (k.E == p.E && k.F == p.F);
    if (!dup) kept.push_back(std::move(p));
  }
  d.pairs = std::move(kept);
  return d;
}

inline DRabin ltl_to_dra(const Ltl& f, const Alphabet& al) { return prune_pairs(nba_to_dra(ltl_to_nba(f, al))); }

}  // namespace tbound
