#include "invlab/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>
#include <string>

namespace invlab {

namespace {
std::atomic<int> g_override{0};
}

int thread_budget() {
  if (const int o = g_override.load(); o > 0) return o;
  int budget = omp_get_max_threads();
  if (const char* env = std::getenv("INVLAB_THREADS"); env != nullptr && *env != '\0') {
    try {
      const int cap = std::stoi(env);
      if (cap > 0 && cap < budget) budget = cap;
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
  return budget < 1 ? 1 : budget;
}

void set_thread_budget(int threads) { g_override.store(threads > 0 ? threads : 0); }

ScopedThreadBudget::ScopedThreadBudget(int threads) : previous_(g_override.load()) {
  set_thread_budget(threads);
}

ScopedThreadBudget::~ScopedThreadBudget() { g_override.store(previous_); }

}  // namespace invlab
