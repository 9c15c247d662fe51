#pragma once

#include <algorithm>
#include <map>
#include <set>

#include "tbound/automata.hpp"

namespace tbound {

// w_1* ... w_n*
struct BoundedExpression {
  std::vector<Word> words;

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& w : words) n += w.size();
    return n;
  }
  bool operator==(const BoundedExpression&) const = default;
  bool operator<(const BoundedExpression& o) const { return words < o.words; }

  std::string format(const Alphabet& al) const {
    std::string s;
    for (const auto& w : words) {
      if (!s.empty()) s += " ";
      s += "(" + al.format(w) + ")*";
    }
    return s;
  }
};

namespace detail {

// Chained-cycle NFA: hub h_i loops on w_i and falls through to h_{i+1} by
// an epsilon move.  Hubs are states 0..n-1, cycle interiors follow.
struct ExprNfa {
  int hubs = 0;
  std::vector<std::vector<std::pair<Letter, int>>> moves;

  explicit ExprNfa(const BoundedExpression& e) {
    hubs = static_cast<int>(e.words.size());
    moves.resize(static_cast<std::size_t>(hubs));
    for (int i = 0; i < hubs; ++i) {
      const Word& w = e.words[static_cast<std::size_t>(i)];
      if (w.empty()) throw UsageError("bounded expression words must be non-empty");
      int prev = i;
      for (std::size_t j = 0; j < w.size(); ++j) {
        int to = i;
        if (j + 1 < w.size()) {
          to = static_cast<int>(moves.size());
          moves.emplace_back();
        }
        moves[static_cast<std::size_t>(prev)].push_back({w[j], to});
        prev = to;
      }
    }
  }

  std::vector<bool> closure(std::vector<bool> s) const {
    for (int i = 0; i + 1 < hubs; ++i)
      if (s[static_cast<std::size_t>(i)]) s[static_cast<std::size_t>(i) + 1] = true;
    return s;
  }

  std::vector<bool> start() const {
    std::vector<bool> s(moves.size(), false);
    if (hubs > 0) s[0] = true;
    return closure(s);
  }

  std::vector<bool> step(const std::vector<bool>& s, Letter a) const {
    std::vector<bool> r(moves.size(), false);
    for (std::size_t q = 0; q < moves.size(); ++q)
      if (s[q])
        for (auto [l, to] : moves[q])
          if (l == a) r[static_cast<std::size_t>(to)] = true;
    return closure(r);
  }

  bool accepting(const std::vector<bool>& s) const {
    for (int i = 0; i < hubs; ++i)
      if (s[static_cast<std::size_t>(i)]) return true;
    return false;
  }
};

}  // namespace detail

inline bool expression_accepts(const BoundedExpression& e, const Word& w) {
  detail::ExprNfa nfa(e);
  auto s = nfa.start();
  for (Letter a : w) s = nfa.step(s, a);
  return nfa.accepting(s);
}

// Subset construction, completion, flipped acceptance.
inline Dfa expr_to_complement_dfa(const BoundedExpression& e, const Alphabet& al) {
  if (e.words.empty()) throw UsageError("bounded expression needs at least one word");
  detail::ExprNfa nfa(e);
  std::map<std::vector<bool>, int> ids;
  std::vector<std::vector<bool>> sets;
  Dfa d(al, 0);
  auto id_of = [&](const std::vector<bool>& s) {
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    int q = d.add_state({}, !nfa.accepting(s));
    ids.emplace(s, q);
    sets.push_back(s);
    return q;
  };
  d.initial = id_of(nfa.start());
  for (std::size_t q = 0; q < sets.size(); ++q)
    for (Letter a = 0; a < static_cast<Letter>(al.size()); ++a) {
      int r = id_of(nfa.step(sets[q], a));
      d.set(static_cast<int>(q), a, r);
    }
  return d;
}

// All expressions by increasing size, lexicographic within a size.
class ExpressionEnumerator {
 public:
  explicit ExpressionEnumerator(std::size_t letters) : k_(letters) {
    if (k_ == 0) throw UsageError("empty alphabet");
  }

  BoundedExpression next() {
    while (pos_ >= batch_.size()) fill(++size_);
    return batch_[pos_++];
  }

  std::size_t emitted() const { return emitted_base_ + pos_; }

  // Number of expressions of exactly the given size: k^n * 2^(n-1).
  static std::size_t count_of_size(std::size_t k, std::size_t n) {
    std::size_t c = 1;
    for (std::size_t i = 0; i < n; ++i) c *= k;
    for (std::size_t i = 1; i < n; ++i) c *= 2;
    return c;
  }

 private:
  void fill(std::size_t n) {
    emitted_base_ += batch_.size();
    batch_.clear();
    pos_ = 0;
    Word letters(n, 0);
    while (true) {
      for (std::size_t cuts = 0; cuts < (std::size_t(1) << (n - 1)); ++cuts) {
        BoundedExpression e;
        Word cur;
        for (std::size_t i = 0; i < n; ++i) {
          cur.push_back(letters[i]);
          if (i + 1 == n || (cuts >> i) & 1) {
            e.words.push_back(cur);
            cur.clear();
          }
        }
        batch_.push_back(std::move(e));
      }
      std::size_t i = n;
      while (i > 0 && static_cast<std::size_t>(letters[i - 1]) + 1 == k_) letters[--i] = 0;
      if (i == 0) break;
      ++letters[i - 1];
    }
    std::sort(batch_.begin(), batch_.end());
  }

  std::size_t k_;
  std::size_t size_ = 0;
  std::size_t pos_ = 0;
  std::size_t emitted_base_ = 0;
  std::vector<BoundedExpression> batch_;
};

// Merges repeated adjacent words; w* w* = w*.
inline BoundedExpression simplify(BoundedExpression e) {
  BoundedExpression out;
  for (auto& w : e.words)
    if (out.words.empty() || out.words.back() != w) out.words.push_back(std::move(w));
  return out;
}

}  // namespace tbound
