#pragma once

#include <deque>

#include "tbound/channels.hpp"
#include "tbound/counters.hpp"
#include "tbound/system.hpp"

namespace tbound {

// Upward-closed set kept as its antichain of minimal elements.
template <System S>
class UpSet {
 public:
  using Config = typename S::Config;

  explicit UpSet(const S& s) : s_(&s) {}

  // Adds c unless already covered; drops elements above c.
  bool insert(const Config& c) {
    auto& v = buckets_[s_->bucket(c)];
    for (const auto& e : v)
      if (s_->leq(e, c)) return false;
    std::size_t before = v.size();
    v.erase(std::remove_if(v.begin(), v.end(), [&](const Config& e) { return s_->leq(c, e); }), v.end());
    size_ -= before - v.size();
    v.push_back(c);
    ++size_;
    return true;
  }

  bool covers(const Config& x) const {
    auto it = buckets_.find(s_->bucket(x));
    if (it == buckets_.end()) return false;
    for (const auto& e : it->second)
      if (s_->leq(e, x)) return true;
    return false;
  }

  bool contains_exact(const Config& c) const {
    auto it = buckets_.find(s_->bucket(c));
    if (it == buckets_.end()) return false;
    return std::find(it->second.begin(), it->second.end(), c) != it->second.end();
  }

  std::vector<Config> basis() const {
    std::vector<Config> out;
    for (const auto& [k, v] : buckets_) out.insert(out.end(), v.begin(), v.end());
    return out;
  }

  std::size_t size() const { return size_; }

 private:
  const S* s_;
  std::unordered_map<std::size_t, std::vector<Config>> buckets_;
  std::size_t size_ = 0;
};

struct CoverabilityStats {
  std::size_t iterations = 0;  // processed basis elements
  std::size_t basis_size = 0;
  bool covered = false;
};

// Backward saturation of K = target + Pred(K).  Stops early once init is
// covered.  `max_iterations` = 0 means unbounded.  `keep` may discard
// elements known not to be coverable from init (their predecessors are not
// coverable either), which leaves the answer unchanged.
template <System S>
CoverabilityStats backward_coverability(const S& s, const typename S::Config& init,
                                        const std::vector<typename S::Config>& target,
                                        std::size_t max_iterations = 0,
                                        const std::function<bool(const typename S::Config&)>& keep = {}) {
  for (const auto& t : target)
    if (s.is_limit(t)) throw UsageError("backward coverability needs plain target configurations");
  CoverabilityStats st;
  UpSet<S> K(s);
  std::deque<typename S::Config> work;
  for (const auto& t : target)
    if ((!keep || keep(t)) && K.insert(t)) work.push_back(t);
  const Letter nl = static_cast<Letter>(s.alphabet().size());
  while (!work.empty()) {
    if (K.covers(init)) break;
    if (max_iterations && st.iterations >= max_iterations)
      throw BudgetExceeded("backward coverability exceeded its iteration budget");
    auto m = std::move(work.front());
    work.pop_front();
    if (!K.contains_exact(m)) continue;  // superseded by a smaller element
    ++st.iterations;
    for (Letter a = 0; a < nl; ++a)
      for (auto& p : s.pred_basis(m, a))
        if ((!keep || keep(p)) && K.insert(p)) work.push_back(std::move(p));
  }
  st.covered = K.covers(init);
  st.basis_size = K.size();
  return st;
}

template <System S>
bool backward_coverable(const S& s, const typename S::Config& init,
                        const std::vector<typename S::Config>& target) {
  return backward_coverability(s, init, target).covered;
}

template <System S>
bool language_empty(const S& s, const std::vector<typename S::Config>& final_basis) {
  return !backward_coverable(s, s.initial(), final_basis);
}

// Saturated basis, for replay checks.
template <System S>
std::vector<typename S::Config> backward_basis(const S& s, const std::vector<typename S::Config>& target) {
  UpSet<S> K(s);
  std::deque<typename S::Config> work;
  for (const auto& t : target)
    if (K.insert(t)) work.push_back(t);
  const Letter nl = static_cast<Letter>(s.alphabet().size());
  while (!work.empty()) {
    auto m = std::move(work.front());
    work.pop_front();
    if (!K.contains_exact(m)) continue;
    for (Letter a = 0; a < nl; ++a)
      for (auto& p : s.pred_basis(m, a))
        if (K.insert(p)) work.push_back(std::move(p));
  }
  return K.basis();
}

// Labelled counter system: transitions carry names (its free alphabet) and a
// possibly non-injective labelling.  Deterministic iff no reachable
// configuration enables two transitions with the same label.
inline bool check_determinism(const CounterSystem& sys, const std::vector<std::string>& labelling) {
  if (labelling.size() != sys.transitions().size())
    throw ModelError("labelling must name every transition");
  const std::size_t n = labelling.size();
  const OmegaVector zero(sys.dimension());
  std::vector<std::vector<OmegaVector>> dom(n);
  for (std::size_t f = 0; f < n; ++f) dom[f] = sys.pred_basis(zero, static_cast<Letter>(f));
  std::vector<OmegaVector> joins;
  for (std::size_t f = 0; f < n; ++f)
    for (std::size_t g = f + 1; g < n; ++g) {
      if (labelling[f] != labelling[g]) continue;
      for (const auto& x : dom[f])
        for (const auto& y : dom[g]) joins.push_back(join(x, y));
    }
  if (joins.empty()) return true;
  return !backward_coverable(sys, sys.initial(), joins);
}

namespace lcs {

// Minimal common supersequences of two words (the basis of the meet of
// their upward closures).
inline std::vector<std::vector<int>> common_supersequences(const std::vector<int>& x, const std::vector<int>& y) {
  std::vector<std::vector<int>> out;
  std::function<void(std::size_t, std::size_t, std::vector<int>&)> rec =
      [&](std::size_t i, std::size_t j, std::vector<int>& cur) {
        if (i == x.size() || j == y.size()) {
          auto w = cur;
          w.insert(w.end(), x.begin() + static_cast<long>(i), x.end());
          w.insert(w.end(), y.begin() + static_cast<long>(j), y.end());
          out.push_back(std::move(w));
          return;
        }
        if (x[i] == y[j]) {
          cur.push_back(x[i]);
          rec(i + 1, j + 1, cur);
          cur.pop_back();
          return;
        }
        cur.push_back(x[i]);
        rec(i + 1, j, cur);
        cur.pop_back();
        cur.push_back(y[j]);
        rec(i, j + 1, cur);
        cur.pop_back();
      };
  std::vector<int> cur;
  rec(0, 0, cur);
  auto sub = [](const std::vector<int>& a, const std::vector<int>& b) {
    std::size_t i = 0;
    for (std::size_t j = 0; j < b.size() && i < a.size(); ++j)
      if (a[i] == b[j]) ++i;
    return i == a.size();
  };
  std::vector<std::vector<int>> minimal;
  for (const auto& w : out) {
    bool dominated = false;
    for (const auto& o : out)
      if (o != w && o.size() <= w.size() && sub(o, w)) { dominated = true; break; }
    if (!dominated && std::find(minimal.begin(), minimal.end(), w) == minimal.end()) minimal.push_back(w);
  }
  return minimal;
}

// Transition rules of an LCS grouped by a (possibly non-injective)
// labelling.  `labelling[i]` labels spec rule i.
inline bool check_determinism(const LcsSpec& spec, const std::vector<std::string>& labelling) {
  if (labelling.size() != spec.rules.size()) throw ModelError("labelling must name every transition");
  LcsSpec free = spec;
  for (std::size_t i = 0; i < free.rules.size(); ++i) free.rules[i].label = "t" + std::to_string(i);
  free.alphabet.clear();
  LcsSystem sys(free);
  std::vector<Config> joins;
  const auto& ts = sys.transitions();
  for (std::size_t f = 0; f < ts.size(); ++f)
    for (std::size_t g = f + 1; g < ts.size(); ++g) {
      if (labelling[f] != labelling[g] || ts[f].from != ts[g].from) continue;
      std::vector<std::vector<int>> need(sys.channels().size());
      std::vector<std::vector<int>> need2(sys.channels().size());
      if (ts[f].op == Op::Receive) need[ts[f].channel] = {ts[f].msg};
      if (ts[g].op == Op::Receive) need2[ts[g].channel] = {ts[g].msg};
      std::vector<Config> partial{Config{ts[f].from, {}}};
      for (std::size_t ch = 0; ch < need.size(); ++ch) {
        std::vector<Config> next;
        for (const auto& w : common_supersequences(need[ch], need2[ch]))
          for (auto c : partial) {
            c.chans.push_back(word_product(w));
            next.push_back(std::move(c));
          }
        partial = std::move(next);
      }
      joins.insert(joins.end(), partial.begin(), partial.end());
    }
  if (joins.empty()) return true;
  return !backward_coverable(sys, sys.initial(), joins);
}

}  // namespace lcs

}  // namespace tbound
