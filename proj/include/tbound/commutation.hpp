#pragma once

#include <numeric>

#include "tbound/boundedness.hpp"
#include "tbound/channels.hpp"
#include "tbound/counters.hpp"

namespace tbound {

// Symmetric irreflexive relation over an alphabet of at most 64 letters.
class Independence {
 public:
  Independence() = default;
  explicit Independence(const Alphabet& al) : al_(al), rows_(al.size(), 0) {
    if (al.size() > 64) throw UsageError("independence relations support at most 64 letters");
  }
  Independence(const Alphabet& al, const std::vector<std::pair<std::string, std::string>>& pairs)
      : Independence(al) {
    for (const auto& [a, b] : pairs) add(al.at(a), al.at(b));
  }

  void add(Letter a, Letter b) {
    if (a == b) throw ModelError("independence must be irreflexive: '" + al_.name(a) + "'");
    rows_[static_cast<std::size_t>(a)] |= bit(b);
    rows_[static_cast<std::size_t>(b)] |= bit(a);
  }

  bool independent(Letter a, Letter b) const { return (rows_[static_cast<std::size_t>(a)] >> b) & 1U; }
  bool dependent(Letter a, Letter b) const { return !independent(a, b); }
  // Letters of `mask` dependent on a.
  std::uint64_t dependent_in(Letter a, std::uint64_t mask) const {
    return mask & ~rows_[static_cast<std::size_t>(a)];
  }
  const Alphabet& alphabet() const { return al_; }
  bool empty() const {
    return std::all_of(rows_.begin(), rows_.end(), [](std::uint64_t r) { return r == 0; });
  }
  // Unordered pairs a < b.
  std::vector<std::pair<Letter, Letter>> pairs() const {
    std::vector<std::pair<Letter, Letter>> out;
    for (Letter a = 0; a < static_cast<Letter>(rows_.size()); ++a)
      for (Letter b = a + 1; b < static_cast<Letter>(rows_.size()); ++b)
        if (independent(a, b)) out.push_back({a, b});
    return out;
  }

  static std::uint64_t bit(Letter a) { return std::uint64_t{1} << a; }

 private:
  Alphabet al_;
  std::vector<std::uint64_t> rows_;
};

// Deterministic automaton whose runs are exactly the prefixes of Foata
// normal forms; letters are ordered by their index.  States: the previous
// clique (or everything, at the start), the current clique and its largest
// letter.
inline DBuchi foata_automaton(const Independence& I) {
  const Alphabet& al = I.alphabet();
  const auto k = static_cast<Letter>(al.size());
  const std::uint64_t all = k == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
  struct Key {
    std::uint64_t prev, cur;
    Letter last;
    bool operator<(const Key& o) const { return std::tie(prev, cur, last) < std::tie(o.prev, o.cur, o.last); }
  };
  DBuchi d(al, 0);
  d.add_state("q0", true);
  std::map<Key, int> index;
  std::vector<Key> keys{{0, 0, -1}};
  auto mask_name = [&](std::uint64_t m) {
    if (m == all) return std::string("*");
    std::string s;
    for (Letter a = 0; a < k; ++a)
      if ((m >> a) & 1U) s += (s.empty() ? "" : ",") + al.name(a);
    return s;
  };
  auto get = [&](const Key& key) {
    auto [it, fresh] = index.emplace(key, d.size());
    if (fresh) {
      d.add_state("{" + mask_name(key.prev) + "|" + mask_name(key.cur) + "}", true);
      keys.push_back(key);
    }
    return it->second;
  };
  for (std::size_t q = 0; q < keys.size(); ++q) {
    const Key key = keys[q];
    for (Letter a = 0; a < k; ++a) {
      int to;
      if (q == 0) {
        to = get({all, Independence::bit(a), a});
      } else if (I.dependent_in(a, key.cur) != 0) {
        to = get({key.cur, Independence::bit(a), a});  // close the clique
      } else if (a > key.last && I.dependent_in(a, key.prev) != 0) {
        to = get({key.prev, key.cur | Independence::bit(a), a});
      } else {
        continue;
      }
      d.set(static_cast<int>(q), a, to);
    }
  }
  return d;
}

// Foata normal form: letters scheduled by dependency depth, each level in
// alphabet order.
inline Word fnf_word(const Word& w, const Independence& I) {
  std::vector<std::size_t> level(w.size(), 0);
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (I.dependent(w[i], w[j])) level[i] = std::max(level[i], level[j] + 1);
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::tie(level[x], w[x]) < std::tie(level[y], w[y]);
  });
  Word out;
  for (auto i : order) out.push_back(w[i]);
  return out;
}

// Foata normal form of u v^omega as a lasso of cliques.  Every letter
// depends on itself, so an occurrence in the n-th copy of v sits at level
// n or deeper: levels below N are final after N copies.
inline std::pair<Word, Word> fnf_lasso(const Word& u, const Word& v, const Independence& I) {
  if (v.empty()) throw UsageError("lasso loop must be non-empty");
  const std::size_t copies = 4 * (u.size() + v.size()) + 8;
  Word w = u;
  for (std::size_t n = 0; n < copies; ++n) w.insert(w.end(), v.begin(), v.end());
  std::vector<std::size_t> level(w.size(), 0);
  std::vector<std::size_t> last(I.alphabet().size(), 0);  // 1 + level of the last occurrence
  for (std::size_t i = 0; i < w.size(); ++i) {
    std::size_t l = 0;
    for (Letter b = 0; b < static_cast<Letter>(last.size()); ++b)
      if (I.dependent(w[i], b)) l = std::max(l, last[static_cast<std::size_t>(b)]);
    level[i] = l;
    last[static_cast<std::size_t>(w[i])] = l + 1;
  }
  std::vector<std::uint64_t> cliques(copies, 0);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (level[i] < copies) cliques[level[i]] |= Independence::bit(w[i]);
  // shortest transient, then shortest period, repeating to the end
  for (std::size_t s = 0; s < copies; ++s)
    for (std::size_t p = 1; s + 2 * p <= copies; ++p) {
      bool ok = true;
      for (std::size_t l = s; l + p < copies && ok; ++l) ok = cliques[l] == cliques[l + p];
      if (!ok) continue;
      auto spell = [&](std::size_t from, std::size_t to) {
        Word out;
        for (std::size_t l = from; l < to; ++l)
          for (Letter a = 0; a < static_cast<Letter>(last.size()); ++a)
            if ((cliques[l] >> a) & 1U) out.push_back(a);
        return out;
      };
      return {spell(0, s), spell(s, s + p)};
    }
  throw UsageError("no periodic Foata form found");
}

// Equivalent under commutation of adjacent independent letters.
inline bool trace_equivalent(const Word& u, const Word& v, const Independence& I) {
  return u.size() == v.size() && fnf_word(u, I) == fnf_word(v, I);
}

struct DiamondFailure {
  Letter a = -1, b = -1;
  std::string reason;
};

// Domains of ab and ba agree and the two composites are the same map.
inline std::optional<DiamondFailure> diamond_failure(const CounterSystem& s, const Independence& I) {
  const std::size_t k = s.dimension();
  const OmegaVector zero(k);
  auto dom2 = [&](Letter x, Letter y) {
    std::vector<OmegaVector> out;
    for (const auto& m : s.pred_basis(zero, y))
      for (auto& p : s.pred_basis(m, x)) out.push_back(std::move(p));
    std::vector<OmegaVector> min;
    for (const auto& v : out) {
      bool dominated = false;
      for (const auto& u : out) dominated = dominated || (!(u == v) && leq(u, v));
      if (!dominated && std::find(min.begin(), min.end(), v) == min.end()) min.push_back(v);
    }
    return min;
  };
  auto same_up = [](const std::vector<OmegaVector>& x, const std::vector<OmegaVector>& y) {
    auto covered = [](const std::vector<OmegaVector>& p, const std::vector<OmegaVector>& q) {
      return std::all_of(p.begin(), p.end(), [&](const OmegaVector& v) {
        return std::any_of(q.begin(), q.end(), [&](const OmegaVector& u) { return leq(u, v); });
      });
    };
    return covered(x, y) && covered(y, x);
  };
  // matrix and offset of y after x
  auto compose = [&](Letter x, Letter y) {
    const auto& tx = s.transition(x);
    const auto& ty = s.transition(y);
    std::vector<std::vector<std::int64_t>> A(k, std::vector<std::int64_t>(k, 0));
    std::vector<std::int64_t> b = ty.b;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t m = 0; m < k; ++m) {
        b[i] += ty.A[i][m] * tx.b[m];
        for (std::size_t j = 0; j < k; ++j) A[i][j] += ty.A[i][m] * tx.A[m][j];
      }
    return std::make_pair(A, b);
  };
  for (auto [a, b] : I.pairs()) {
    auto dab = dom2(a, b), dba = dom2(b, a);
    if (!same_up(dab, dba)) return DiamondFailure{a, b, "domains of ab and ba differ"};
    if (dab.empty()) continue;
    if (compose(a, b) != compose(b, a)) return DiamondFailure{a, b, "ab and ba are different maps"};
  }
  return std::nullopt;
}

// Per control state: both orders exist or neither, they end in the same
// state, and their channel operations commute.
inline std::optional<DiamondFailure> diamond_failure(const LcsSystem& s, const Independence& I) {
  using lcs::Op;
  auto ops_commute = [](const lcs::Transition& x, const lcs::Transition& y) {
    if (x.op == Op::Internal || y.op == Op::Internal || x.channel != y.channel) return true;
    return x.op == Op::Send && y.op == Op::Send && x.msg == y.msg;
  };
  for (auto [a, b] : I.pairs())
    for (int q = 0; q < static_cast<int>(s.states().size()); ++q) {
      const auto* ta = s.rule(q, a);
      const auto* tb = s.rule(q, b);
      const auto* tab = ta ? s.rule(ta->to, b) : nullptr;
      const auto* tba = tb ? s.rule(tb->to, a) : nullptr;
      auto where = " in state " + s.states()[static_cast<std::size_t>(q)];
      if (!tab && !tba) continue;
      if (!tab || !tba) return DiamondFailure{a, b, "only one order is possible" + where};
      if (tab->to != tba->to) return DiamondFailure{a, b, "the two orders end in different states" + where};
      if (!ops_commute(*ta, *tab) || !ops_commute(*tb, *tba))
        return DiamondFailure{a, b, "channel operations do not commute" + where};
    }
  return std::nullopt;
}

// The diamond check exists for plain counter systems and channel systems.
template <class S>
concept Commutable = requires(const S& s, const Independence& I) { diamond_failure(s, I); };

template <class S>
bool diamond_sufficient_check(const S& s, const Independence& I) {
  return !diamond_failure(s, I).has_value();
}

template <class S>
void require_diamond(const S& s, const Independence& I) {
  if (auto f = diamond_failure(s, I))
    throw PreconditionFailed("independence is not a diamond for (" + s.alphabet().name(f->a) + ", " +
                             s.alphabet().name(f->b) + "): " + f->reason);
}

// Boundedness of the Foata-normalized traces.
template <System S>
Verdict<SyncProduct<S>> decide_bounded_modulo(const S& s, const Independence& I, const Budget& budget = {}) {
  require_diamond(s, I);
  return decide_boundedness(SyncProduct<S>(s, foata_automaton(I)), budget);
}

}  // namespace tbound
