#pragma once

#include <atomic>
#include <cstdio>
#include <string>

// Control-function assertions on single steps and accelerations.  They are
// compiled in when TBOUND_GROWTH_CHECKS is set or NDEBUG is absent; a
// violation is counted and logged, so a test harness can fail on it.

#if defined(TBOUND_GROWTH_CHECKS) || !defined(NDEBUG)
#define TBOUND_GROWTH_ENABLED 1
#else
#define TBOUND_GROWTH_ENABLED 0
#endif

namespace tbound::growth {

struct Counters {
  std::atomic<long> checked{0};
  std::atomic<long> violated{0};
};

inline Counters& counters() {
  static Counters c;
  return c;
}

inline constexpr bool enabled() { return TBOUND_GROWTH_ENABLED != 0; }

inline void record(bool ok, const std::string& what) {
  counters().checked.fetch_add(1, std::memory_order_relaxed);
  if (ok) return;
  counters().violated.fetch_add(1, std::memory_order_relaxed);
  std::fprintf(stderr, "growth bound violated: %s\n", what.c_str());
}

}  // namespace tbound::growth
