#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "tbound/growth_checks.hpp"
#include "tbound/system.hpp"

namespace tbound {

// Natural number or omega.
class OmegaNat {
 public:
  static constexpr std::int64_t kOmega = std::numeric_limits<std::int64_t>::max();

  constexpr OmegaNat() = default;
  constexpr OmegaNat(std::int64_t v) : v_(v) {}  // NOLINT: implicit on purpose
  static constexpr OmegaNat omega() { return OmegaNat(kOmega); }

  constexpr bool is_omega() const { return v_ == kOmega; }
  constexpr std::int64_t value() const { return v_; }

  friend constexpr bool operator==(OmegaNat a, OmegaNat b) { return a.v_ == b.v_; }
  friend constexpr auto operator<=>(OmegaNat a, OmegaNat b) { return a.v_ <=> b.v_; }

  // omega absorbs any finite (possibly negative) offset
  friend OmegaNat operator+(OmegaNat a, std::int64_t z) {
    if (a.is_omega()) return a;
    std::int64_t r;
    if (__builtin_add_overflow(a.v_, z, &r) || r == kOmega)
      throw std::overflow_error("counter overflow");
    return OmegaNat(r);
  }
  // n * omega = omega for n >= 1, 0 * omega = 0
  friend OmegaNat operator*(std::int64_t n, OmegaNat a) {
    if (n == 0) return OmegaNat(0);
    if (a.is_omega()) return a;
    std::int64_t r;
    if (__builtin_mul_overflow(n, a.v_, &r) || r == kOmega)
      throw std::overflow_error("counter overflow");
    return OmegaNat(r);
  }

  std::string str() const { return is_omega() ? "w" : std::to_string(v_); }

 private:
  std::int64_t v_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, OmegaNat n) { return os << n.str(); }

struct OmegaVector {
  std::vector<OmegaNat> v;

  OmegaVector() = default;
  explicit OmegaVector(std::size_t k) : v(k, OmegaNat(0)) {}
  OmegaVector(std::initializer_list<OmegaNat> l) : v(l) {}
  explicit OmegaVector(std::vector<OmegaNat> e) : v(std::move(e)) {}

  std::size_t size() const { return v.size(); }
  OmegaNat& operator[](std::size_t i) { return v[i]; }
  OmegaNat operator[](std::size_t i) const { return v[i]; }

  bool operator==(const OmegaVector&) const = default;

  bool has_omega() const {
    return std::any_of(v.begin(), v.end(), [](OmegaNat x) { return x.is_omega(); });
  }
  // Largest finite coordinate.
  std::int64_t rho() const {
    std::int64_t r = 0;
    for (auto x : v)
      if (!x.is_omega()) r = std::max(r, x.value());
    return r;
  }
  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i].str();
    return s + ")";
  }
};

inline constexpr OmegaNat w = OmegaNat::omega();

inline std::ostream& operator<<(std::ostream& os, const OmegaVector& x) { return os << x.str(); }

inline std::size_t hash_value(const OmegaVector& x) {
  std::size_t h = x.size();
  for (auto e : x.v) hash_combine(h, std::hash<std::int64_t>{}(e.value()));
  return h;
}

inline bool leq(const OmegaVector& x, const OmegaVector& y) {
  if (x.size() != y.size()) throw ModelError("dimension mismatch");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > y[i]) return false;
  return true;
}

inline OmegaVector join(const OmegaVector& x, const OmegaVector& y) {
  if (x.size() != y.size()) throw ModelError("dimension mismatch");
  OmegaVector r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = std::max(x[i], y[i]);
  return r;
}

// f(X) = A X + b, firable when X >= G and f(X) >= 0.
struct AffineTransition {
  std::string label;
  std::vector<std::int64_t> guard;
  std::vector<std::vector<std::int64_t>> A;
  std::vector<std::int64_t> b;
  bool operator==(const AffineTransition&) const = default;
};

// Place/transition net with optional reset and transfer arcs.
struct NetSpec {
  struct Transition {
    std::string label;
    std::map<std::string, std::int64_t> pre, post;
    std::vector<std::string> resets;
    std::vector<std::pair<std::string, std::string>> transfers;  // from -> to
    bool operator==(const Transition&) const = default;
  };
  std::vector<std::string> places;
  std::vector<Transition> transitions;
  std::map<std::string, std::int64_t> initial;
  bool operator==(const NetSpec&) const = default;
};

class CounterSystem {
 public:
  using Config = OmegaVector;

  CounterSystem(std::vector<std::string> places, std::vector<AffineTransition> ts, OmegaVector init)
      : places_(std::move(places)), ts_(std::move(ts)), init_(std::move(init)) {
    const std::size_t k = places_.size();
    if (k == 0) throw ModelError("counter system needs at least one counter");
    if (init_.size() != k) throw ModelError("initial vector has the wrong dimension");
    if (init_.has_omega()) throw ModelError("initial configuration must be finite");
    for (auto x : init_.v)
      if (x.value() < 0) throw ModelError("initial configuration must be non-negative");
    std::vector<std::string> labels;
    for (const auto& t : ts_) {
      if (t.guard.size() != k || t.b.size() != k || t.A.size() != k)
        throw ModelError("transition '" + t.label + "' has the wrong dimension");
      for (const auto& row : t.A) {
        if (row.size() != k) throw ModelError("transition '" + t.label + "' matrix is not k x k");
        for (auto e : row)
          if (e < 0) throw ModelError("matrix entries must be natural numbers");
      }
      for (auto g : t.guard)
        if (g < 0) throw ModelError("guards must be natural numbers");
      labels.push_back(t.label);
    }
    if (labels.empty()) throw ModelError("counter system needs at least one transition");
    alphabet_ = Alphabet(labels);  // rejects duplicates: free labelling
    prepare();
  }

  const Alphabet& alphabet() const { return alphabet_; }
  Config initial() const { return init_; }
  std::size_t dimension() const { return places_.size(); }
  const std::vector<std::string>& places() const { return places_; }
  const std::vector<AffineTransition>& transitions() const { return ts_; }
  const AffineTransition& transition(Letter a) const { return ts_.at(static_cast<std::size_t>(a)); }
  std::int64_t m1() const { return m1_; }
  std::int64_t m2() const { return m2_; }

  std::optional<Config> fire(const Config& x, Letter a) const {
    if (x.size() != dimension()) throw ModelError("dimension mismatch");
    const auto& t = ts_[static_cast<std::size_t>(a)];
    const auto& rows = rows_[static_cast<std::size_t>(a)];
    for (std::size_t j = 0; j < x.size(); ++j)
      if (!x[j].is_omega() && x[j].value() < t.guard[j]) return std::nullopt;
    Config y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      OmegaNat sum(0);
      bool om = false;
      for (auto [j, c] : rows[i]) {
        if (x[j].is_omega()) { om = true; break; }
        sum = sum + (c * x[j]).value();
      }
      if (om) {
        y[i] = OmegaNat::omega();
        continue;
      }
      sum = sum + t.b[i];
      if (sum.value() < 0) return std::nullopt;
      y[i] = sum;
    }
    if constexpr (growth::enabled()) {
      long double bound = static_cast<long double>(dimension()) * m1_ * x.rho() + m2_;
      growth::record(static_cast<long double>(y.rho()) <= bound,
                     "affine step " + t.label + " from " + x.str());
    }
    return y;
  }

  std::optional<Config> step(const Config& x, Letter a) const { return fire(x, a); }

  bool leq(const Config& x, const Config& y) const { return tbound::leq(x, y); }

  std::optional<Config> accelerate(const Config& x, const Word& u) const;

  std::vector<Config> pred_basis(const Config& m, Letter a) const;

  std::vector<Config> min_basis() const { return {Config(dimension())}; }
  bool is_limit(const Config& x) const { return x.has_omega(); }
  std::size_t bucket(const Config&) const { return 0; }
  std::string format(const Config& x) const { return x.str(); }

 private:
  void prepare() {
    const std::size_t k = dimension();
    m1_ = 0;
    m2_ = 0;
    for (const auto& t : ts_) {
      std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> rows(k);
      std::vector<bool> ident(k, true);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
          auto e = t.A[i][j];
          m1_ = std::max(m1_, e);
          if (e) rows[i].push_back({j, e});
          if (e != (i == j ? 1 : 0)) ident[i] = false;
        }
      for (auto e : t.b) m2_ = std::max(m2_, e);
      rows_.push_back(std::move(rows));
      identity_rows_.push_back(std::move(ident));
    }
  }

  std::vector<std::string> places_;
  std::vector<AffineTransition> ts_;
  OmegaVector init_;
  Alphabet alphabet_;
  std::vector<std::vector<std::vector<std::pair<std::size_t, std::int64_t>>>> rows_;
  std::vector<std::vector<bool>> identity_rows_;
  std::int64_t m1_ = 0, m2_ = 0;
};

inline std::optional<OmegaVector> fire_affine(const CounterSystem& s, const OmegaVector& x, Letter a) {
  return s.fire(x, a);
}

// Composes u, then decides each coordinate from the support of A^n d for
// n in (k, 2k]: a positive entry there lies on a pumpable path.
inline std::optional<OmegaVector> CounterSystem::accelerate(const OmegaVector& x, const Word& u) const {
  if (u.empty()) throw UsageError("acceleration needs a non-empty loop");
  auto y = loop_image(*this, x, u);
  if (!y) return std::nullopt;
  if (*y == x) return x;
  const std::size_t k = dimension();

  // support of the composed matrix: M[i][j] when x_j feeds u(x)_i
  std::vector<std::vector<bool>> M(k, std::vector<bool>(k, false));
  for (std::size_t i = 0; i < k; ++i) M[i][i] = true;
  for (Letter a : u) {
    const auto& rows = rows_[static_cast<std::size_t>(a)];
    std::vector<std::vector<bool>> N(k, std::vector<bool>(k, false));
    for (std::size_t i = 0; i < k; ++i)
      for (auto [l, c] : rows[i])
        for (std::size_t j = 0; j < k; ++j)
          if (M[l][j]) N[i][j] = true;
    M = std::move(N);
  }

  std::vector<bool> om(k, false);
  for (std::size_t i = 0; i < k; ++i) om[i] = (*y)[i].is_omega();
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < k; ++i) {
      if (om[i]) continue;
      for (std::size_t j = 0; j < k; ++j)
        if (M[i][j] && om[j]) { om[i] = changed = true; break; }
    }
  }

  std::vector<bool> supp(k, false);
  for (std::size_t j = 0; j < k; ++j)
    if (!om[j] && (*y)[j].value() > x[j].value()) supp[j] = true;
  std::vector<bool> grow(k, false);
  for (std::size_t n = 1; n <= 2 * k; ++n) {
    std::vector<bool> next(k, false);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        if (M[i][j] && supp[j]) { next[i] = true; break; }
    supp = std::move(next);
    if (n > k)
      for (std::size_t i = 0; i < k; ++i) grow[i] = grow[i] || supp[i];
  }

  OmegaVector z = x;
  for (std::size_t r = 0; r < k; ++r) z = *step_word(*this, z, u);
  for (std::size_t i = 0; i < k; ++i)
    if (om[i] || grow[i]) z[i] = OmegaNat::omega();

  if constexpr (growth::enabled()) {
    long double base = std::max<long double>(1.0L, static_cast<long double>(k) * m1_);
    long double n = static_cast<long double>(u.size());
    long double bound = std::pow(base, n * k) * (x.rho() + n * k * m2_);
    growth::record(static_cast<long double>(z.rho()) <= bound, "affine acceleration from " + x.str());
  }
  return z;
}

// Minimal X with X >= G and A X + b >= m.  Coordinates only constrained by
// their own identity row are solved directly; the others range over the
// box [0, max_i c_i]^|W|, c = max(m - b, 0).
inline std::vector<OmegaVector> CounterSystem::pred_basis(const OmegaVector& m, Letter a) const {
  if (m.has_omega()) throw UsageError("pred_basis needs a plain target");
  const std::size_t k = dimension();
  const auto& t = ts_[static_cast<std::size_t>(a)];
  const auto& rows = rows_[static_cast<std::size_t>(a)];
  const auto& ident = identity_rows_[static_cast<std::size_t>(a)];

  std::vector<std::int64_t> lb(k, 0);
  std::vector<bool> boxed(k, false);
  std::int64_t M = 0;
  for (std::size_t i = 0; i < k; ++i) {
    std::int64_t c = std::max<std::int64_t>(m[i].value() - t.b[i], 0);
    M = std::max(M, c);
    if (!ident[i])
      for (auto [j, e] : rows[i]) boxed[j] = true;
  }
  for (std::size_t i = 0; i < k; ++i)
    if (ident[i] && !boxed[i]) lb[i] = std::max<std::int64_t>(m[i].value() - t.b[i], 0);

  std::vector<std::size_t> free;
  for (std::size_t j = 0; j < k; ++j)
    if (boxed[j]) free.push_back(j);

  auto satisfied = [&](const std::vector<std::int64_t>& X) {
    for (std::size_t i = 0; i < k; ++i) {
      std::int64_t s = t.b[i];
      for (auto [j, e] : rows[i]) s += e * X[j];
      if (s < m[i].value() || s < 0) return false;
    }
    return true;
  };

  std::vector<OmegaVector> sols;
  std::vector<std::int64_t> X = lb;
  std::vector<std::int64_t> idx(free.size(), 0);
  while (true) {
    for (std::size_t f = 0; f < free.size(); ++f) X[free[f]] = idx[f];
    if (satisfied(X)) {
      OmegaVector v(k);
      for (std::size_t j = 0; j < k; ++j) v[j] = std::max(X[j], t.guard[j]);
      sols.push_back(std::move(v));
    }
    std::size_t f = 0;
    while (f < free.size() && idx[f] == M) idx[f++] = 0;
    if (f == free.size()) break;
    ++idx[f];
  }

  std::vector<OmegaVector> basis;
  for (auto& s : sols) {
    bool dominated = false;
    for (const auto& o : sols)
      if (!(o == s) && tbound::leq(o, s)) { dominated = true; break; }
    if (!dominated && std::find(basis.begin(), basis.end(), s) == basis.end()) basis.push_back(s);
  }
  return basis;
}

inline std::vector<OmegaVector> pred_basis_affine(const CounterSystem& s, const OmegaVector& m, Letter a) {
  return s.pred_basis(m, a);
}

inline CounterSystem compile_net(const NetSpec& net) {
  const std::size_t k = net.places.size();
  std::map<std::string, std::size_t> pid;
  for (std::size_t i = 0; i < k; ++i)
    if (!pid.emplace(net.places[i], i).second) throw ModelError("duplicate place " + net.places[i]);
  auto place = [&](const std::string& p) {
    auto it = pid.find(p);
    if (it == pid.end()) throw ModelError("unknown place " + p);
    return it->second;
  };

  std::vector<AffineTransition> ts;
  for (const auto& nt : net.transitions) {
    AffineTransition t;
    t.label = nt.label;
    t.guard.assign(k, 0);
    t.b.assign(k, 0);
    t.A.assign(k, std::vector<std::int64_t>(k, 0));
    std::vector<std::int64_t> pre(k, 0), post(k, 0);
    for (auto [p, n] : nt.pre) {
      if (n < 0) throw ModelError("negative arc weight");
      pre[place(p)] += n;
    }
    for (auto [p, n] : nt.post) {
      if (n < 0) throw ModelError("negative arc weight");
      post[place(p)] += n;
    }
    std::vector<int> role(k, 0);  // 1 reset, 2 transfer source, 3 transfer target
    for (const auto& r : nt.resets) {
      auto p = place(r);
      if (role[p]) throw ModelError("place " + r + " has overlapping reset/transfer arcs in " + nt.label);
      role[p] = 1;
    }
    for (const auto& [from, to] : nt.transfers) {
      auto p = place(from), q = place(to);
      if (p == q) throw ModelError("transfer onto its own source in " + nt.label);
      if (role[p] && role[p] != 2) throw ModelError("place " + from + " has overlapping reset/transfer arcs in " + nt.label);
      if (role[p] == 2) throw ModelError("place " + from + " is transferred twice in " + nt.label);
      role[p] = 2;
    }
    for (const auto& [from, to] : nt.transfers) {
      auto q = place(to);
      if (role[q] == 1 || role[q] == 2)
        throw ModelError("transfer target " + to + " is itself reset or transferred in " + nt.label);
      role[q] = 3;
    }
    for (std::size_t i = 0; i < k; ++i) {
      t.guard[i] = pre[i];
      if (role[i] == 1 || role[i] == 2) {
        t.b[i] = post[i];
      } else {
        t.A[i][i] = 1;
        t.b[i] = post[i] - pre[i];
      }
    }
    for (const auto& [from, to] : nt.transfers) {
      auto p = place(from), q = place(to);
      t.A[q][p] += 1;
      t.b[q] -= pre[p];
    }
    ts.push_back(std::move(t));
  }
  OmegaVector init(k);
  for (auto [p, n] : net.initial) init[place(p)] = OmegaNat(n);
  return CounterSystem(net.places, std::move(ts), std::move(init));
}

}  // namespace tbound
