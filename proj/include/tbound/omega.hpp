#pragma once

#include "tbound/commutation.hpp"
#include "tbound/safra.hpp"

namespace tbound {

inline const std::string kMarkE = "#e";
inline const std::string kMarkF = "#f";

// Marker letters leave the inner configuration alone; loops through them
// accelerate as the loop without markers.
inline Word strip_letters(const Word& u, Letter from) {
  Word out;
  for (Letter a : u)
    if (a < from) out.push_back(a);
  return out;
}

template <class C>
struct MarkedConfig {
  C c;
  bool pending = false;
  bool operator==(const MarkedConfig&) const = default;
};

template <class C>
std::size_t hash_value(const MarkedConfig<C>& m) {
  std::size_t h = hash_value(m.c);
  hash_combine(h, m.pending ? 1 : 2);
  return h;
}

// First stage: leaving a state of E takes two steps, the marker #e and then
// the letter.  P is a product whose configurations expose the Rabin
// automaton state as `q`.
template <System P>
class MarkExits {
 public:
  using Config = MarkedConfig<typename P::Config>;

  MarkExits(const P& p, std::vector<bool> E)
      : p_(p), E_(std::move(E)), al_(p.alphabet().extended({kMarkE})), e_(static_cast<Letter>(p.alphabet().size())) {}

  const Alphabet& alphabet() const { return al_; }
  const P& inner() const { return p_; }
  Letter marker() const { return e_; }
  bool in_e(const typename P::Config& c) const { return E_[static_cast<std::size_t>(c.q)]; }

  Config initial() const { return {p_.initial(), false}; }

  std::optional<Config> step(const Config& x, Letter a) const {
    if (a == e_) {
      if (x.pending || !in_e(x.c)) return std::nullopt;
      return Config{x.c, true};
    }
    if (in_e(x.c) && !x.pending) return std::nullopt;
    auto n = p_.step(x.c, a);
    if (!n) return std::nullopt;
    return Config{std::move(*n), false};
  }

  bool leq(const Config& x, const Config& y) const { return x.pending == y.pending && p_.leq(x.c, y.c); }

  std::optional<Config> accelerate(const Config& x, const Word& u) const {
    auto y = step_word(*this, x, u);
    if (!y || !leq(x, *y)) return std::nullopt;
    Word v = strip_letters(u, e_);
    if (v.empty()) return x;
    auto c = p_.accelerate(x.c, v);
    if (!c) return std::nullopt;
    return Config{std::move(*c), x.pending};
  }

  std::vector<Config> pred_basis(const Config& t, Letter a) const {
    std::vector<Config> out;
    if (a == e_) {
      if (t.pending && in_e(t.c)) out.push_back({t.c, false});
      return out;
    }
    if (t.pending) return out;
    for (auto& c : p_.pred_basis(t.c, a)) {
      bool pend = in_e(c);
      out.push_back({std::move(c), pend});
    }
    return out;
  }

  std::vector<Config> min_basis() const {
    std::vector<Config> out;
    for (const auto& m : p_.min_basis()) {
      out.push_back({m, false});
      out.push_back({m, true});
    }
    return out;
  }

  bool is_limit(const Config& x) const { return p_.is_limit(x.c); }
  std::size_t bucket(const Config& x) const {
    std::size_t h = p_.bucket(x.c);
    hash_combine(h, x.pending ? 1 : 2);
    return h;
  }
  std::string format(const Config& x) const { return p_.format(x.c) + (x.pending ? "+e" : ""); }

 private:
  const P& p_;
  std::vector<bool> E_;
  Alphabet al_;
  Letter e_;
};

// Second stage: a #f self-loop on every configuration whose automaton
// state is in F.
template <System P>
class LoopOnF {
 public:
  using Config = typename MarkExits<P>::Config;

  LoopOnF(const MarkExits<P>& s, std::vector<bool> F)
      : s_(s), F_(std::move(F)), al_(s.alphabet().extended({kMarkF})), f_(static_cast<Letter>(s.alphabet().size())) {}

  const Alphabet& alphabet() const { return al_; }
  Letter marker() const { return f_; }
  bool in_f(const Config& x) const { return F_[static_cast<std::size_t>(x.c.q)]; }

  Config initial() const { return s_.initial(); }

  std::optional<Config> step(const Config& x, Letter a) const {
    if (a == f_) return in_f(x) ? std::optional<Config>(x) : std::nullopt;
    return s_.step(x, a);
  }

  bool leq(const Config& x, const Config& y) const { return s_.leq(x, y); }

  std::optional<Config> accelerate(const Config& x, const Word& u) const {
    auto y = step_word(*this, x, u);
    if (!y || !leq(x, *y)) return std::nullopt;
    Word v = strip_letters(u, f_);
    if (v.empty()) return x;
    return s_.accelerate(x, v);
  }

  std::vector<Config> pred_basis(const Config& t, Letter a) const {
    if (a == f_) return in_f(t) ? std::vector<Config>{t} : std::vector<Config>{};
    return s_.pred_basis(t, a);
  }

  std::vector<Config> min_basis() const { return s_.min_basis(); }
  bool is_limit(const Config& x) const { return s_.is_limit(x); }
  std::size_t bucket(const Config& x) const { return s_.bucket(x); }
  std::string format(const Config& x) const { return s_.format(x); }

 private:
  const MarkExits<P>& s_;
  std::vector<bool> F_;
  Alphabet al_;
  Letter f_;
};

// (Sigma + #e)* #f (Sigma + #f)*, partial.
inline Dfa two_phase_dfa(const Alphabet& al) {
  Dfa d(al, 2);
  d.accepting = {true, true};
  const Letter e = al.at(kMarkE), f = al.at(kMarkF);
  for (Letter a = 0; a < static_cast<Letter>(al.size()); ++a) {
    if (a == f) {
      d.set(0, a, 1);
      d.set(1, a, 1);
    } else if (a == e) {
      d.set(0, a, 0);
    } else {
      d.set(0, a, 0);
      d.set(1, a, 1);
    }
  }
  d.state_names = {"before", "after"};
  return d;
}

// The three stage systems for one Rabin pair; the third is unbounded iff
// some run sees F infinitely often and E only finitely often.
template <System P>
struct StageSystems {
  MarkExits<P> s1;
  LoopOnF<P> s2;
  SyncProduct<LoopOnF<P>> s3;

  StageSystems(const P& p, const RabinPair& pair)
      : s1(p, pair.E), s2(s1, pair.F), s3(s2, two_phase_dfa(s2.alphabet())) {}
  StageSystems(const StageSystems&) = delete;
};

enum class Answer { Yes, No, Unknown };

inline const char* answer_name(Answer a) {
  return a == Answer::Yes ? "yes" : a == Answer::No ? "no" : "unknown";
}

// Error carrying the fork that shows a product is not trace bounded.
struct NotBounded : PreconditionFailed {
  std::string fork;
  NotBounded(const std::string& what, std::string f) : PreconditionFailed(what), fork(std::move(f)) {}
};

struct OmegaReport {
  Answer empty = Answer::Unknown;
  std::string product_expression;  // the certified boundedness of the product
  std::vector<std::string> pair_verdicts;
  int witness_pair = -1;
  std::string witness_fork;
  std::size_t nodes_used = 0;
};

// Emptiness of T_omega(P) under the Rabin pairs of the automaton coordinate.
template <System P>
OmegaReport omega_language_empty(const P& p, const std::vector<RabinPair>& pairs, const Budget& budget = {}) {
  OmegaReport r;
  auto base = decide_boundedness(p, budget);
  r.nodes_used += base.nodes_used;
  if (base.unbounded())
    throw NotBounded("the product is not trace bounded",
                     p.format(base.fork->pivot) + " after " + base.fork->stem.format(p.alphabet()));
  if (!base.bounded()) {
    r.empty = Answer::Unknown;
    return r;
  }
  r.product_expression = base.expr->format(p.alphabet());
  bool unknown = false;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    StageSystems<P> st(p, pairs[i]);
    auto v = decide_boundedness(st.s3, budget);
    r.nodes_used += v.nodes_used;
    r.pair_verdicts.push_back(kind_name(static_cast<int>(v.kind)));
    if (v.unbounded()) {
      r.empty = Answer::No;
      r.witness_pair = static_cast<int>(i);
      r.witness_fork = st.s3.format(v.fork->pivot) + " after " + v.fork->stem.format(st.s3.alphabet());
      return r;
    }
    unknown = unknown || !v.bounded();
  }
  r.empty = unknown ? Answer::Unknown : Answer::Yes;
  return r;
}

template <System S>
OmegaReport omega_language_empty(const S& s, const DRabin& dra, const Budget& budget = {}) {
  SyncProduct<S> p(s, dra);
  return omega_language_empty(p, dra.pairs, budget);
}

// Normalized emptiness: T_omega(S) meets L iff the Foata-normalized traces
// do, provided L is closed under the independence (asserted by the caller).
template <System S>
OmegaReport omega_empty_modulo(const S& s, const Independence& I, const DRabin& dra, const Budget& budget = {}) {
  require_diamond(s, I);
  SyncProduct<S> normalized(s, foata_automaton(I));
  return omega_language_empty(normalized, dra, budget);
}

struct LtlReport {
  Answer holds = Answer::Unknown;
  bool coflat = false;
  std::size_t nba_states = 0, dra_states = 0, pairs = 0;
  OmegaReport omega;
};

// S satisfies phi iff no infinite trace satisfies !phi.
template <System S>
LtlReport model_check_ltl(const S& s, const Ltl::Ptr& phi, const Independence* I = nullptr,
                          const Budget& budget = {}) {
  LtlReport r;
  auto neg = ltl_not(phi);
  r.coflat = is_coflat(*neg);
  Nba nba = ltl_to_nba(*neg, s.alphabet());
  r.nba_states = static_cast<std::size_t>(nba.size());
  DRabin dra = prune_pairs(nba_to_dra(nba));
  r.dra_states = static_cast<std::size_t>(dra.size());
  r.pairs = dra.pairs.size();
  if (dra.pairs.empty()) {
    r.holds = Answer::Yes;
    r.omega.empty = Answer::Yes;
    return r;
  }
  if (I) {
    if (I->alphabet().size() != s.alphabet().size()) throw UsageError("independence over a different alphabet");
    if constexpr (Commutable<S>) r.omega = omega_empty_modulo(s, *I, dra, budget);
    else throw UnsupportedModel("no diamond check for this kind of system");
  } else {
    try {
      r.omega = omega_language_empty(s, dra, budget);
    } catch (const NotBounded& e) {
      throw NotBounded(std::string(e.what()) + "; try an independence relation (boundedness modulo I)", e.fork);
    }
  }
  r.holds = r.omega.empty;
  return r;
}

}  // namespace tbound
