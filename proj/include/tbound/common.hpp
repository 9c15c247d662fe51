#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tbound {

// Error kinds map onto the CLI exit codes.
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UsageError : std::logic_error {
  using std::logic_error::logic_error;
};
struct UnsupportedModel : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// An operation's precondition does not hold for the given input.
struct PreconditionFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// A search ran past its iteration cap; the answer is unknown.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void hash_combine(std::size_t& seed, std::size_t v) {
  seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

using Letter = int;
using Word = std::vector<Letter>;

class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw ModelError("alphabet must not be empty");
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (!index_.emplace(names_[i], static_cast<Letter>(i)).second)
        throw ModelError("duplicate letter '" + names_[i] + "'");
    }
  }

  std::size_t size() const { return names_.size(); }
  const std::string& name(Letter a) const { return names_.at(static_cast<std::size_t>(a)); }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<Letter> find(const std::string& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  Letter at(const std::string& s) const {
    auto a = find(s);
    if (!a) throw ModelError("letter '" + s + "' is not in the alphabet");
    return *a;
  }

  Word parse_word(const std::vector<std::string>& labels) const {
    Word w;
    w.reserve(labels.size());
    for (const auto& l : labels) w.push_back(at(l));
    return w;
  }

  std::string format(const Word& w, const char* sep = " ") const {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i) out += sep;
      out += name(w[i]);
    }
    return out;
  }

  // Copy with extra letters appended (marker letters of derived systems).
  Alphabet extended(const std::vector<std::string>& extra) const {
    auto n = names_;
    n.insert(n.end(), extra.begin(), extra.end());
    return Alphabet(std::move(n));
  }

  bool operator==(const Alphabet& o) const { return names_ == o.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, Letter> index_;
};

struct WordHash {
  std::size_t operator()(const Word& w) const {
    std::size_t h = w.size();
    for (Letter a : w) hash_combine(h, static_cast<std::size_t>(a));
    return h;
  }
};

// Word of ordinal length below omega^2: plain runs alternating with
// omega-iterated loops.  Loops never nest.
class AcceleratedWord {
 public:
  struct Segment {
    bool loop = false;
    Word letters;
    bool operator==(const Segment&) const = default;
  };

  AcceleratedWord() = default;

  static AcceleratedWord plain(Word w) {
    AcceleratedWord aw;
    aw.push_plain(w);
    return aw;
  }

  void push_letter(Letter a) { push_plain(Word{a}); }

  void push_plain(const Word& w) {
    if (w.empty()) return;
    if (!segs_.empty() && !segs_.back().loop) {
      auto& back = segs_.back().letters;
      back.insert(back.end(), w.begin(), w.end());
    } else {
      segs_.push_back({false, w});
    }
  }

  void push_loop(const Word& u) {
    if (u.empty()) throw UsageError("omega loop payload must be non-empty");
    segs_.push_back({true, u});
  }

  void append(const AcceleratedWord& o) {
    for (const auto& s : o.segs_) {
      if (s.loop) push_loop(s.letters);
      else push_plain(s.letters);
    }
  }

  const std::vector<Segment>& segments() const { return segs_; }
  bool empty() const { return segs_.empty(); }
  bool has_loops() const {
    for (const auto& s : segs_) if (s.loop) return true;
    return false;
  }
  std::optional<Letter> first_letter() const {
    if (segs_.empty()) return std::nullopt;
    return segs_.front().letters.front();
  }
  // Number of single and accelerated steps.
  std::size_t steps() const {
    std::size_t n = 0;
    for (const auto& s : segs_) n += s.loop ? 1 : s.letters.size();
    return n;
  }

  // Replace every loop u^omega by u^k, k taken from `counts` in order.
  Word concretize(const std::vector<std::size_t>& counts) const {
    Word w;
    std::size_t li = 0;
    for (const auto& s : segs_) {
      if (!s.loop) {
        w.insert(w.end(), s.letters.begin(), s.letters.end());
        continue;
      }
      std::size_t k = li < counts.size() ? counts[li] : 0;
      ++li;
      for (std::size_t r = 0; r < k; ++r) w.insert(w.end(), s.letters.begin(), s.letters.end());
    }
    return w;
  }
  std::size_t loop_count() const {
    std::size_t n = 0;
    for (const auto& s : segs_) n += s.loop;
    return n;
  }

  std::string format(const Alphabet& al) const {
    std::string out;
    for (const auto& s : segs_) {
      if (!out.empty()) out += " ";
      if (s.loop) out += "(" + al.format(s.letters) + ")^ω";
      else out += al.format(s.letters);
    }
    return out.empty() ? "ε" : out;
  }

  bool operator==(const AcceleratedWord&) const = default;

 private:
  std::vector<Segment> segs_;
};

}  // namespace tbound
