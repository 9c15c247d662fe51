#pragma once

#include <map>
#include <memory>
#include <set>
#include <string_view>

#include "tbound/automata.hpp"

namespace tbound {

// Action-based LTL: an atom holds at a position iff that position's
// letter is the atom.
struct Ltl {
  enum class Op { True, False, Atom, Not, And, Or, Implies, Next, Until, Release, Globally, Finally };
  Op op = Op::True;
  std::string atom;
  std::shared_ptr<const Ltl> l, r;

  using Ptr = std::shared_ptr<const Ltl>;
  static Ptr make(Op op, Ptr l = nullptr, Ptr r = nullptr) {
    auto f = std::make_shared<Ltl>();
    f->op = op;
    f->l = std::move(l);
    f->r = std::move(r);
    return f;
  }
  static Ptr letter(std::string a) {
    auto f = std::make_shared<Ltl>();
    f->op = Op::Atom;
    f->atom = std::move(a);
    return f;
  }

  std::string str() const {
    auto un = [&](const char* s) { return std::string(s) + "(" + l->str() + ")"; };
    auto bin = [&](const char* s) { return "(" + l->str() + " " + s + " " + r->str() + ")"; };
    switch (op) {
      case Op::True: return "true";
      case Op::False: return "false";
      case Op::Atom: return "'" + atom + "'";
      case Op::Not: return un("!");
      case Op::And: return bin("&");
      case Op::Or: return bin("|");
      case Op::Implies: return bin("->");
      case Op::Next: return un("X");
      case Op::Until: return bin("U");
      case Op::Release: return bin("R");
      case Op::Globally: return un("G");
      case Op::Finally: return un("F");
    }
    return {};
  }
};

struct LtlParseError : ModelError {
  std::size_t position;
  LtlParseError(const std::string& what, std::size_t pos)
      : ModelError("formula error at " + std::to_string(pos) + ": " + what), position(pos) {}
};

namespace detail {

class LtlParser {
 public:
  explicit LtlParser(std::string s) : s_(std::move(s)) {}

  Ltl::Ptr parse() {
    auto f = implication();
    skip();
    if (i_ != s_.size()) throw LtlParseError("unexpected '" + std::string(1, s_[i_]) + "'", i_);
    return f;
  }

 private:
  using Op = Ltl::Op;

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(const char* tok) {
    skip();
    std::string t(tok);
    if (s_.compare(i_, t.size(), t) != 0) return false;
    // a one-letter operator must not be the start of an identifier,
    // except in runs of unary operators such as GF
    if (t.size() == 1 && std::isalpha(static_cast<unsigned char>(t[0])) && i_ + 1 < s_.size() && ident_char(s_[i_ + 1])) {
      std::size_t j = i_;
      while (j < s_.size() && ident_char(s_[j]) && std::string_view("XGF").find(s_[j]) != std::string_view::npos) ++j;
      if (std::string_view("XGF").find(t[0]) == std::string_view::npos || (j < s_.size() && ident_char(s_[j])))
        return false;
    }
    i_ += t.size();
    return true;
  }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  Ltl::Ptr implication() {
    auto l = disjunction();
    if (eat("->") || eat("=>")) return Ltl::make(Op::Implies, l, implication());
    return l;
  }
  Ltl::Ptr disjunction() {
    auto l = conjunction();
    while (eat("||") || eat("|")) l = Ltl::make(Op::Or, l, conjunction());
    return l;
  }
  Ltl::Ptr conjunction() {
    auto l = binary_temporal();
    while (eat("&&") || eat("&")) l = Ltl::make(Op::And, l, binary_temporal());
    return l;
  }
  Ltl::Ptr binary_temporal() {
    auto l = unary();
    if (eat("U")) return Ltl::make(Op::Until, l, binary_temporal());
    if (eat("R")) return Ltl::make(Op::Release, l, binary_temporal());
    return l;
  }
  Ltl::Ptr unary() {
    if (eat("!") || eat("~")) return Ltl::make(Op::Not, unary());
    if (eat("X")) return Ltl::make(Op::Next, unary());
    if (eat("G")) return Ltl::make(Op::Globally, unary());
    if (eat("F")) return Ltl::make(Op::Finally, unary());
    if (eat("(")) {
      auto f = implication();
      if (!eat(")")) throw LtlParseError("expected ')'", i_);
      return f;
    }
    skip();
    if (i_ >= s_.size()) throw LtlParseError("unexpected end of formula", i_);
    char c = s_[i_];
    if (c == '\'' || c == '"') {
      auto end = s_.find(c, i_ + 1);
      if (end == std::string::npos) throw LtlParseError("unterminated quoted letter", i_);
      auto name = s_.substr(i_ + 1, end - i_ - 1);
      if (name.empty()) throw LtlParseError("empty letter", i_);
      i_ = end + 1;
      return Ltl::letter(name);
    }
    if (ident_char(c)) {
      std::size_t start = i_;
      while (i_ < s_.size() && ident_char(s_[i_])) ++i_;
      auto name = s_.substr(start, i_ - start);
      if (name == "true") return Ltl::make(Op::True);
      if (name == "false") return Ltl::make(Op::False);
      return Ltl::letter(name);
    }
    throw LtlParseError("unexpected '" + std::string(1, c) + "'", i_);
  }

  std::string s_;
  std::size_t i_ = 0;
};

}  // namespace detail

inline Ltl::Ptr parse_ltl(const std::string& s) { return detail::LtlParser(s).parse(); }

inline Ltl::Ptr ltl_not(Ltl::Ptr f) { return Ltl::make(Ltl::Op::Not, std::move(f)); }

inline void collect_letters(const Ltl& f, std::set<std::string>& out) {
  if (f.op == Ltl::Op::Atom) out.insert(f.atom);
  if (f.l) collect_letters(*f.l, out);
  if (f.r) collect_letters(*f.r, out);
}

// Negation of a flat formula; flat formulas are built from G alpha by
// conjunction, disjunction, X and alpha U _, with alpha a single letter.
inline bool is_coflat(const Ltl& f) {
  using Op = Ltl::Op;
  if (f.op != Op::Not) return false;
  std::function<bool(const Ltl&)> flat = [&](const Ltl& g) -> bool {
    switch (g.op) {
      case Op::And:
      case Op::Or: return flat(*g.l) && flat(*g.r);
      case Op::Next: return flat(*g.l);
      case Op::Until: return g.l->op == Op::Atom && flat(*g.r);
      case Op::Globally: return g.l->op == Op::Atom;
      default: return false;
    }
  };
  return flat(*f.l);
}

// Nondeterministic Büchi automaton with state-based acceptance.
struct Nba {
  Alphabet alphabet;
  int initial = 0;
  std::vector<std::vector<std::vector<int>>> delta;  // delta[q][a] = targets
  std::vector<bool> accepting;

  int size() const { return static_cast<int>(delta.size()); }
  int add_state(bool acc) {
    delta.emplace_back(alphabet.size());
    accepting.push_back(acc);
    return size() - 1;
  }

  // Acceptance of u v^omega: a reachable accepting cycle in the lasso product.
  bool accepts_lasso(const Word& u, const Word& v) const {
    if (v.empty()) throw UsageError("lasso loop must be non-empty");
    std::set<int> cur{initial};
    for (Letter a : u) {
      std::set<int> n;
      for (int q : cur)
        for (int r : delta[static_cast<std::size_t>(q)][static_cast<std::size_t>(a)]) n.insert(r);
      cur = std::move(n);
    }
    // product nodes (q, position in v)
    const int L = static_cast<int>(v.size());
    auto node = [&](int q, int i) { return q * L + i; };
    const int N = size() * L;
    std::vector<std::vector<int>> succ(static_cast<std::size_t>(N));
    for (int q = 0; q < size(); ++q)
      for (int i = 0; i < L; ++i)
        for (int r : delta[static_cast<std::size_t>(q)][static_cast<std::size_t>(v[static_cast<std::size_t>(i)])])
          succ[static_cast<std::size_t>(node(q, i))].push_back(node(r, (i + 1) % L));
    std::vector<bool> reach(static_cast<std::size_t>(N), false);
    std::vector<int> work;
    for (int q : cur) reach[static_cast<std::size_t>(node(q, 0))] = true, work.push_back(node(q, 0));
    while (!work.empty()) {
      int x = work.back();
      work.pop_back();
      for (int y : succ[static_cast<std::size_t>(x)])
        if (!reach[static_cast<std::size_t>(y)]) reach[static_cast<std::size_t>(y)] = true, work.push_back(y);
    }
    // an accepting reachable node on a cycle
    for (int x = 0; x < N; ++x) {
      if (!reach[static_cast<std::size_t>(x)] || !accepting[static_cast<std::size_t>(x / L)]) continue;
      std::vector<bool> seen(static_cast<std::size_t>(N), false);
      std::vector<int> st{x};
      while (!st.empty()) {
        int y = st.back();
        st.pop_back();
        for (int z : succ[static_cast<std::size_t>(y)]) {
          if (z == x) return true;
          if (!seen[static_cast<std::size_t>(z)]) seen[static_cast<std::size_t>(z)] = true, st.push_back(z);
        }
      }
    }
    return false;
  }
};

namespace detail {

// Negation normal form over a hash-consed pool.
class LtlPool {
 public:
  enum class K { True, False, Pos, Neg, And, Or, Next, Until, Release };
  struct Node {
    K k;
    int a = -1, b = -1;  // children, or the letter for Pos/Neg
    auto operator<=>(const Node&) const = default;
  };

  int make(K k, int a = -1, int b = -1) {
    Node n{k, a, b};
    auto [it, fresh] = ids_.emplace(n, static_cast<int>(nodes_.size()));
    if (fresh) nodes_.push_back(n);
    return it->second;
  }
  const Node& operator[](int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return nodes_.size(); }

  int nnf(const Ltl& f, bool neg, const Alphabet& al) {
    using Op = Ltl::Op;
    switch (f.op) {
      case Op::True: return make(neg ? K::False : K::True);
      case Op::False: return make(neg ? K::True : K::False);
      case Op::Atom: {
        auto a = al.find(f.atom);
        if (!a) throw ModelError("formula letter '" + f.atom + "' is not in the alphabet");
        return make(neg ? K::Neg : K::Pos, *a);
      }
      case Op::Not: return nnf(*f.l, !neg, al);
      case Op::And: return make(neg ? K::Or : K::And, nnf(*f.l, neg, al), nnf(*f.r, neg, al));
      case Op::Or: return make(neg ? K::And : K::Or, nnf(*f.l, neg, al), nnf(*f.r, neg, al));
      case Op::Implies: return make(neg ? K::And : K::Or, nnf(*f.l, !neg, al), nnf(*f.r, neg, al));
      case Op::Next: return make(K::Next, nnf(*f.l, neg, al));
      case Op::Until: return make(neg ? K::Release : K::Until, nnf(*f.l, neg, al), nnf(*f.r, neg, al));
      case Op::Release: return make(neg ? K::Until : K::Release, nnf(*f.l, neg, al), nnf(*f.r, neg, al));
      case Op::Globally:  // G p = false R p
        return make(neg ? K::Until : K::Release, make(neg ? K::True : K::False), nnf(*f.l, neg, al));
      case Op::Finally:  // F p = true U p
        return make(neg ? K::Release : K::Until, make(neg ? K::False : K::True), nnf(*f.l, neg, al));
    }
    return make(K::True);
  }

 private:
  std::vector<Node> nodes_;
  std::map<Node, int> ids_;
};

}  // namespace detail

// Tableau construction: states are sets of obligations; a transition picks
// one expansion, whose literals select the letters.  Acceptance is
// generalized over the until-subformulas (transition based), then
// degeneralized with a counter.
inline Nba ltl_to_nba(const Ltl& f, const Alphabet& al) {
  using K = detail::LtlPool::K;
  detail::LtlPool pool;
  const int root = pool.nnf(f, false, al);
  std::vector<int> untils;
  for (int i = 0; i < static_cast<int>(pool.size()); ++i)
    if (pool[i].k == K::Until) untils.push_back(i);
  const std::size_t nu = untils.size();

  struct Expansion {
    std::set<int> pos, neg, next;
    std::set<int> postponed;  // untils whose right side was not chosen
  };
  // all expansions of an obligation set
  std::function<void(std::vector<int>, Expansion, std::vector<Expansion>&)> expand =
      [&](std::vector<int> todo, Expansion e, std::vector<Expansion>& out) {
        while (!todo.empty()) {
          int g = todo.back();
          todo.pop_back();
          const auto n = pool[g];
          switch (n.k) {
            case K::True: break;
            case K::False: return;
            case K::Pos: e.pos.insert(n.a); break;
            case K::Neg: e.neg.insert(n.a); break;
            case K::And: todo.push_back(n.a), todo.push_back(n.b); break;
            case K::Next: e.next.insert(n.a); break;
            case K::Or: {
              auto t2 = todo;
              t2.push_back(n.b);
              expand(std::move(t2), e, out);
              todo.push_back(n.a);
              break;
            }
            case K::Until: {
              auto t2 = todo;
              t2.push_back(n.a);
              auto e2 = e;
              e2.next.insert(g);
              e2.postponed.insert(g);
              expand(std::move(t2), std::move(e2), out);
              todo.push_back(n.b);
              break;
            }
            case K::Release: {
              auto t2 = todo;
              t2.push_back(n.b);
              auto e2 = e;
              e2.next.insert(g);
              expand(std::move(t2), std::move(e2), out);
              todo.push_back(n.a), todo.push_back(n.b);
              break;
            }
          }
          // exclusive letters: two positive atoms clash
          if (e.pos.size() > 1) return;
          for (int a : e.pos)
            if (e.neg.count(a)) return;
        }
        out.push_back(std::move(e));
      };

  Nba nba;
  nba.alphabet = al;
  std::map<std::pair<std::set<int>, std::size_t>, int> ids;
  std::vector<std::pair<std::set<int>, std::size_t>> states;
  auto id_of = [&](std::set<int> s, std::size_t level) {
    auto key = std::make_pair(std::move(s), level);
    auto [it, fresh] = ids.emplace(key, nba.size());
    if (fresh) {
      nba.add_state(level == nu);
      states.push_back(std::move(key));
    }
    return it->second;
  };
  nba.initial = id_of({root}, 0);
  std::map<std::set<int>, std::vector<Expansion>> cache;
  for (std::size_t q = 0; q < states.size(); ++q) {
    auto [obl, level] = states[q];
    auto it = cache.find(obl);
    if (it == cache.end()) {
      std::vector<Expansion> out;
      expand(std::vector<int>(obl.begin(), obl.end()), {}, out);
      it = cache.emplace(obl, std::move(out)).first;
    }
    for (const auto& e : it->second) {
      std::size_t j = level == nu ? 0 : level;
      while (j < nu && !e.postponed.count(untils[j])) ++j;
      int to = id_of(e.next, j);
      for (Letter a = 0; a < static_cast<Letter>(al.size()); ++a) {
        if (e.neg.count(a) || (!e.pos.empty() && !e.pos.count(a))) continue;
        auto& row = nba.delta[q][static_cast<std::size_t>(a)];
        if (std::find(row.begin(), row.end(), to) == row.end()) row.push_back(to);
      }
    }
  }
  return nba;
}

}  // namespace tbound
