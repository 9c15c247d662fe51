#pragma once

#include <concepts>

#include "tbound/common.hpp"

namespace tbound {

// Capability contract of a complete deterministic WSTS.
//  step        partial transition function
//  leq         the wqo on configurations
//  accelerate  lub of the iterates u^n(c), when c <= u(c)
//  pred_basis  minimal predecessors of the upward closure of one plain config
//  min_basis   finite basis of the whole configuration space
//  bucket      configurations in different buckets are incomparable
template <class S>
concept System = requires(const S& s, const typename S::Config& c, Letter a, const Word& u) {
  typename S::Config;
  { s.alphabet() } -> std::convertible_to<const Alphabet&>;
  { s.initial() } -> std::convertible_to<typename S::Config>;
  { s.step(c, a) } -> std::same_as<std::optional<typename S::Config>>;
  { s.leq(c, c) } -> std::same_as<bool>;
  { s.accelerate(c, u) } -> std::same_as<std::optional<typename S::Config>>;
  { s.pred_basis(c, a) } -> std::same_as<std::vector<typename S::Config>>;
  { s.min_basis() } -> std::same_as<std::vector<typename S::Config>>;
  { s.is_limit(c) } -> std::same_as<bool>;
  { s.bucket(c) } -> std::convertible_to<std::size_t>;
  { s.format(c) } -> std::convertible_to<std::string>;
  { hash_value(c) } -> std::convertible_to<std::size_t>;
};

template <class C>
struct ConfigHash {
  std::size_t operator()(const C& c) const { return hash_value(c); }
};

template <System S>
std::optional<typename S::Config> step_word(const S& s, typename S::Config c, const Word& w) {
  for (Letter a : w) {
    auto n = s.step(c, a);
    if (!n) return std::nullopt;
    c = std::move(*n);
  }
  return c;
}

inline void check_letters(std::size_t alphabet_size, const Word& w) {
  for (Letter a : w)
    if (a < 0 || static_cast<std::size_t>(a) >= alphabet_size)
      throw ModelError("letter index outside the alphabet");
}

template <System S>
std::optional<typename S::Config> lub_accelerate(const S& s, const typename S::Config& c,
                                                 const Word& u) {
  if (u.empty()) throw UsageError("acceleration needs a non-empty loop");
  check_letters(s.alphabet().size(), u);
  return s.accelerate(c, u);
}

template <System S>
std::optional<typename S::Config> apply_accelerated_word(const S& s, typename S::Config c,
                                                         const AcceleratedWord& w) {
  for (const auto& seg : w.segments()) {
    check_letters(s.alphabet().size(), seg.letters);
    std::optional<typename S::Config> n =
        seg.loop ? s.accelerate(c, seg.letters) : step_word(s, c, seg.letters);
    if (!n) return std::nullopt;
    c = std::move(*n);
  }
  return c;
}

template <System S>
bool is_trace(const S& s, const Word& w) {
  return step_word(s, s.initial(), w).has_value();
}

// Shared acceleration precondition: u fires from c and does not decrease it.
template <System S>
std::optional<typename S::Config> loop_image(const S& s, const typename S::Config& c,
                                             const Word& u) {
  auto img = step_word(s, c, u);
  if (!img || !s.leq(c, *img)) return std::nullopt;
  return img;
}

}  // namespace tbound
