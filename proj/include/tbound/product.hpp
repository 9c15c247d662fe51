#pragma once

#include "tbound/automata.hpp"
#include "tbound/system.hpp"

namespace tbound {

template <class C>
struct PairConfig {
  C sys;
  int q = 0;
  bool operator==(const PairConfig&) const = default;
};

template <class C>
std::size_t hash_value(const PairConfig<C>& c) {
  std::size_t h = hash_value(c.sys);
  hash_combine(h, static_cast<std::size_t>(c.q));
  return h;
}

// Synchronous product of a system with a deterministic automaton.  The
// automaton coordinate is ordered by equality; missing transitions block.
template <System S>
class SyncProduct {
 public:
  using Inner = S;
  using Config = PairConfig<typename S::Config>;

  SyncProduct(S sys, const Automaton& a) : sys_(std::move(sys)), aut_(a.over(sys_.alphabet())) {}

  const Alphabet& alphabet() const { return sys_.alphabet(); }
  const S& inner() const { return sys_; }
  const Automaton& automaton() const { return aut_; }

  Config initial() const { return {sys_.initial(), aut_.initial}; }

  std::optional<Config> step(const Config& c, Letter a) const {
    int r = aut_.next(c.q, a);
    if (r < 0) return std::nullopt;
    auto n = sys_.step(c.sys, a);
    if (!n) return std::nullopt;
    return Config{std::move(*n), r};
  }

  bool leq(const Config& x, const Config& y) const { return x.q == y.q && sys_.leq(x.sys, y.sys); }

  // The automaton must come back to its state along u.
  std::optional<Config> accelerate(const Config& c, const Word& u) const {
    if (aut_.run(u, c.q) != c.q) return std::nullopt;
    auto n = sys_.accelerate(c.sys, u);
    if (!n) return std::nullopt;
    return Config{std::move(*n), c.q};
  }

  std::vector<Config> pred_basis(const Config& target, Letter a) const {
    std::vector<Config> out;
    std::vector<typename S::Config> inner;
    bool computed = false;
    for (int q = 0; q < aut_.size(); ++q) {
      if (aut_.next(q, a) != target.q) continue;
      if (!computed) inner = sys_.pred_basis(target.sys, a), computed = true;
      for (const auto& p : inner) out.push_back({p, q});
    }
    return out;
  }

  std::vector<Config> min_basis() const {
    std::vector<Config> out;
    for (const auto& m : sys_.min_basis())
      for (int q = 0; q < aut_.size(); ++q) out.push_back({m, q});
    return out;
  }

  bool is_limit(const Config& c) const { return sys_.is_limit(c.sys); }

  std::size_t bucket(const Config& c) const {
    std::size_t h = sys_.bucket(c.sys);
    hash_combine(h, static_cast<std::size_t>(c.q));
    return h;
  }

  std::string format(const Config& c) const {
    return sys_.format(c.sys) + "@" + aut_.state_names[static_cast<std::size_t>(c.q)];
  }

 private:
  S sys_;
  Automaton aut_;
};

template <System S>
SyncProduct<S> synchronous_product(S sys, const Automaton& a) {
  return SyncProduct<S>(std::move(sys), a);
}

}  // namespace tbound
