#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "tbound/growth_checks.hpp"
#include "tbound/system.hpp"

namespace tbound::lcs {

using MsgSet = std::uint32_t;  // message alphabet of at most 32 letters

// (a + eps) when !star, A* otherwise.  `bits` is {a} or A.
struct Atom {
  bool star = false;
  MsgSet bits = 0;

  static Atom letter(int a) { return {false, MsgSet(1) << a}; }
  static Atom star_of(MsgSet s) {
    if (!s) throw UsageError("star atom over an empty set");
    return {true, s};
  }
  int letter_index() const { return std::countr_zero(bits); }
  bool entailed_by_star(MsgSet A) const { return (bits & ~A) == 0; }
  bool operator==(const Atom&) const = default;
};

// Channel content: a product of atoms, denoting a downward-closed language.
struct Product {
  std::vector<Atom> atoms;
  bool operator==(const Product&) const = default;
  std::size_t size() const { return atoms.size(); }
  bool plain() const {
    return std::none_of(atoms.begin(), atoms.end(), [](const Atom& a) { return a.star; });
  }
};

inline std::size_t hash_value(const Product& p) {
  std::size_t h = p.atoms.size();
  for (const auto& a : p.atoms) hash_combine(h, (std::size_t(a.bits) << 1) | a.star);
  return h;
}

// Absorption to a fixpoint: a letter next to a star containing it, and a
// star next to a star over a superset.
inline Product normalize_product(std::vector<Atom> atoms) {
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<Atom> out;
    out.reserve(atoms.size());
    for (const auto& a : atoms) {
      if (!out.empty()) {
        const Atom& b = out.back();
        if (b.star && a.entailed_by_star(b.bits)) { changed = true; continue; }
        if (a.star && b.entailed_by_star(a.bits)) {
          out.pop_back();
          changed = true;
          // the star may now absorb further to the left
          while (!out.empty() && out.back().entailed_by_star(a.bits)) out.pop_back();
          out.push_back(a);
          continue;
        }
      }
      out.push_back(a);
    }
    atoms = std::move(out);
  }
  return Product{std::move(atoms)};
}

// L(p) included in L(q), by the greedy scan over q.
inline bool product_leq(const Product& p, const Product& q) {
  std::size_t i = 0, j = 0;
  while (i < p.size()) {
    if (j == q.size()) return false;
    const Atom& x = p.atoms[i];
    const Atom& y = q.atoms[j];
    if (y.star) {
      if (x.entailed_by_star(y.bits)) ++i;
      else ++j;
    } else {
      if (!x.star && x.bits == y.bits) ++i;
      ++j;
    }
  }
  return true;
}

inline Product product_write(const Product& p, int a) {
  auto atoms = p.atoms;
  atoms.push_back(Atom::letter(a));
  return normalize_product(std::move(atoms));
}

// Lossy read: drop atoms until one can deliver a.
inline std::optional<Product> product_read(const Product& p, int a) {
  const MsgSet bit = MsgSet(1) << a;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Atom& x = p.atoms[i];
    if (x.star && (x.bits & bit))
      return Product{std::vector<Atom>(p.atoms.begin() + static_cast<long>(i), p.atoms.end())};
    if (!x.star && x.bits == bit)
      return Product{std::vector<Atom>(p.atoms.begin() + static_cast<long>(i) + 1, p.atoms.end())};
  }
  return std::nullopt;
}

inline Product word_product(const std::vector<int>& w) {
  Product p;
  for (int a : w) p.atoms.push_back(Atom::letter(a));
  return p;
}

struct Config {
  int control = 0;
  std::vector<Product> chans;
  bool operator==(const Config&) const = default;
  std::size_t atoms() const {
    std::size_t n = 0;
    for (const auto& c : chans) n += c.size();
    return n;
  }
};

inline std::size_t hash_value(const Config& c) {
  std::size_t h = static_cast<std::size_t>(c.control);
  for (const auto& p : c.chans) hash_combine(h, hash_value(p));
  return h;
}

enum class Op { Send, Receive, Internal };

struct Transition {
  int from = 0, to = 0;
  int channel = -1;
  Op op = Op::Internal;
  int msg = -1;
  std::string label;
};

struct LcsSpec {
  std::vector<std::string> states;
  std::string initial;
  std::vector<std::string> channels;
  std::vector<std::string> messages;
  struct Rule {
    std::string from, to, channel, op, msg, label;  // op is "!", "?" or "" (internal)
    bool operator==(const Rule&) const = default;
  };
  std::vector<Rule> rules;
  std::vector<std::string> alphabet;  // optional declared order of labels
  bool operator==(const LcsSpec&) const = default;
};

// Functional lossy channel system over completed contents.  At most one
// transition per (control state, label).
class LcsSystem {
 public:
  using Config = lcs::Config;

  explicit LcsSystem(const LcsSpec& spec) {
    states_ = spec.states;
    channels_ = spec.channels;
    messages_ = spec.messages;
    if (states_.empty()) throw ModelError("lcs needs control states");
    if (messages_.size() > 32) throw ModelError("at most 32 message letters");
    auto index_of = [](const std::vector<std::string>& v, const std::string& s, const char* what) {
      auto it = std::find(v.begin(), v.end(), s);
      if (it == v.end()) throw ModelError(std::string("unknown ") + what + " '" + s + "'");
      return static_cast<int>(it - v.begin());
    };
    init_control_ = index_of(states_, spec.initial, "state");
    std::vector<std::string> labels = spec.alphabet;
    for (const auto& r : spec.rules)
      if (std::find(labels.begin(), labels.end(), r.label) == labels.end()) labels.push_back(r.label);
    alphabet_ = Alphabet(labels);
    table_.assign(states_.size() * alphabet_.size(), -1);
    for (const auto& r : spec.rules) {
      Transition t;
      t.from = index_of(states_, r.from, "state");
      t.to = index_of(states_, r.to, "state");
      t.label = r.label;
      if (r.op == "!" || r.op == "?") {
        t.op = r.op == "!" ? Op::Send : Op::Receive;
        t.channel = index_of(channels_, r.channel, "channel");
        t.msg = index_of(messages_, r.msg, "message");
      } else if (!r.op.empty() && r.op != "nop") {
        throw ModelError("unknown channel operation '" + r.op + "'");
      }
      auto& slot = table_[static_cast<std::size_t>(t.from) * alphabet_.size() +
                          static_cast<std::size_t>(alphabet_.at(r.label))];
      if (slot >= 0)
        throw ModelError("two transitions labelled '" + r.label + "' leave state " + r.from);
      slot = static_cast<int>(ts_.size());
      ts_.push_back(std::move(t));
    }
  }

  const Alphabet& alphabet() const { return alphabet_; }
  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::string>& channels() const { return channels_; }
  const std::vector<std::string>& messages() const { return messages_; }
  const std::vector<Transition>& transitions() const { return ts_; }

  Config initial() const { return {init_control_, std::vector<Product>(channels_.size())}; }

  const Transition* rule(int control, Letter a) const {
    int i = table_[static_cast<std::size_t>(control) * alphabet_.size() + static_cast<std::size_t>(a)];
    return i < 0 ? nullptr : &ts_[static_cast<std::size_t>(i)];
  }

  std::optional<Config> step(const Config& c, Letter a) const {
    const Transition* t = rule(c.control, a);
    if (!t) return std::nullopt;
    Config n = c;
    n.control = t->to;
    if (t->op == Op::Send) {
      n.chans[t->channel] = product_write(c.chans[t->channel], t->msg);
    } else if (t->op == Op::Receive) {
      auto r = product_read(c.chans[t->channel], t->msg);
      if (!r) return std::nullopt;
      n.chans[t->channel] = std::move(*r);
    }
    if constexpr (growth::enabled()) {
      bool ok = true;
      for (std::size_t i = 0; i < c.chans.size(); ++i) ok = ok && n.chans[i].size() <= c.chans[i].size() + 1;
      growth::record(ok, "lcs step " + t->label);
    }
    return n;
  }

  bool leq(const Config& x, const Config& y) const {
    if (x.control != y.control) return false;
    for (std::size_t i = 0; i < x.chans.size(); ++i)
      if (!product_leq(x.chans[i], y.chans[i])) return false;
    return true;
  }

  std::optional<Config> accelerate(const Config& c, const Word& u) const;

  std::vector<Config> pred_basis(const Config& target, Letter a) const {
    for (const auto& p : target.chans)
      if (!p.plain()) throw UsageError("pred_basis needs plain channel words");
    std::vector<Config> out;
    for (int q = 0; q < static_cast<int>(states_.size()); ++q) {
      const Transition* t = rule(q, a);
      if (!t || t->to != target.control) continue;
      Config p = target;
      p.control = q;
      if (t->op == Op::Send) {
        auto& ch = p.chans[t->channel].atoms;
        if (!ch.empty() && ch.back() == Atom::letter(t->msg)) ch.pop_back();
      } else if (t->op == Op::Receive) {
        auto& ch = p.chans[t->channel].atoms;
        ch.insert(ch.begin(), Atom::letter(t->msg));
      }
      out.push_back(std::move(p));
    }
    return out;
  }

  std::vector<Config> min_basis() const {
    std::vector<Config> out;
    for (int q = 0; q < static_cast<int>(states_.size()); ++q)
      out.push_back({q, std::vector<Product>(channels_.size())});
    return out;
  }

  bool is_limit(const Config& c) const {
    return std::any_of(c.chans.begin(), c.chans.end(), [](const Product& p) { return !p.plain(); });
  }

  std::size_t bucket(const Config& c) const { return static_cast<std::size_t>(c.control); }

  std::string format_product(const Product& p) const {
    if (p.atoms.empty()) return "eps";
    std::string s;
    for (const auto& a : p.atoms) {
      if (!s.empty()) s += ".";
      if (!a.star) {
        s += messages_[static_cast<std::size_t>(a.letter_index())];
        continue;
      }
      std::string set;
      for (std::size_t m = 0; m < messages_.size(); ++m)
        if (a.bits & (MsgSet(1) << m)) set += (set.empty() ? "" : ",") + messages_[m];
      s += "{" + set + "}*";
    }
    return s;
  }

  std::string format(const Config& c) const {
    std::string s = states_[static_cast<std::size_t>(c.control)] + "[";
    for (std::size_t i = 0; i < c.chans.size(); ++i)
      s += (i ? " | " : "") + format_product(c.chans[i]);
    return s + "]";
  }

 private:
  std::vector<std::string> states_, channels_, messages_;
  int init_control_ = 0;
  Alphabet alphabet_;
  std::vector<Transition> ts_;
  std::vector<int> table_;
};

inline bool is_extension(const Product& base, const Product& longer, std::vector<Atom>* suffix) {
  if (longer.size() < base.size()) return false;
  if (!std::equal(base.atoms.begin(), base.atoms.end(), longer.atoms.begin())) return false;
  suffix->assign(longer.atoms.begin() + static_cast<long>(base.size()), longer.atoms.end());
  return true;
}

inline MsgSet letters_of(const std::vector<Atom>& atoms) {
  MsgSet s = 0;
  for (const auto& a : atoms) s |= a.bits;
  return s;
}

// Iterate-and-widen.  A widening is accepted only if it is a fixpoint of u
// and dominates the iterates computed so far.
inline std::optional<Config> LcsSystem::accelerate(const Config& c, const Word& u) const {
  if (u.empty()) throw UsageError("acceleration needs a non-empty loop");
  auto first = loop_image(*this, c, u);
  if (!first) return std::nullopt;
  const std::size_t n0 = c.atoms();
  const std::size_t cap = 4 * n0 + 4 * u.size() + 8;
  std::vector<Config> it{c, *first};
  std::optional<Config> result;
  while (!result) {
    const std::size_t i = it.size() - 2;  // compare it[i], it[i+1], it[i+2]
    if (it[i + 1] == it[i]) { result = it[i]; break; }
    if (it.size() > cap) return std::nullopt;
    auto nx = step_word(*this, it.back(), u);
    if (!nx) return std::nullopt;
    it.push_back(std::move(*nx));
    if (it[i + 2] == it[i + 1]) { result = it[i + 1]; break; }
    if (i < std::max<std::size_t>(1, n0)) continue;
    Config widened = it[i];
    bool ok = true, grew = false;
    for (std::size_t ch = 0; ch < c.chans.size() && ok; ++ch) {
      std::vector<Atom> y1, y2;
      if (!is_extension(it[i].chans[ch], it[i + 1].chans[ch], &y1) ||
          !is_extension(it[i + 1].chans[ch], it[i + 2].chans[ch], &y2)) {
        ok = false;
        break;
      }
      if (y1.empty() && y2.empty()) continue;
      if (y1.empty() || y2.empty() || letters_of(y1) != letters_of(y2)) { ok = false; break; }
      auto atoms = it[i].chans[ch].atoms;
      atoms.push_back(Atom::star_of(letters_of(y1)));
      widened.chans[ch] = normalize_product(std::move(atoms));
      grew = true;
    }
    if (!ok || !grew) continue;
    auto img = step_word(*this, widened, u);
    if (img && *img == widened && leq(it.back(), widened)) result = widened;
  }
  if constexpr (growth::enabled()) {
    long double bound = std::pow(2.0L, static_cast<long double>(n0) + 2) + n0;
    growth::record(static_cast<long double>(result->atoms()) <= bound, "lcs acceleration " + format(c));
  }
  return result;
}

inline Config lcs_write(const LcsSystem& s, const Config& c, int channel, int msg) {
  (void)s;
  Config n = c;
  n.chans.at(static_cast<std::size_t>(channel)) = product_write(c.chans[static_cast<std::size_t>(channel)], msg);
  return n;
}

inline std::optional<Config> lcs_read(const LcsSystem& s, const Config& c, int channel, int msg) {
  (void)s;
  auto r = product_read(c.chans.at(static_cast<std::size_t>(channel)), msg);
  if (!r) return std::nullopt;
  Config n = c;
  n.chans[static_cast<std::size_t>(channel)] = std::move(*r);
  return n;
}

}  // namespace tbound::lcs

namespace tbound {
using lcs::LcsSpec;
using lcs::LcsSystem;
}
