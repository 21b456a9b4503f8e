// Thread control for the OpenMP kernels.
//
// Every kernel that has a parallel path also keeps a serial reference path
// selected with Exec::serial; tests assert the two agree bit for bit.
#pragma once

namespace invlab {

enum class Exec { serial, parallel };

/// Thread budget for parallel kernels: an explicit override if set, else
/// the INVLAB_THREADS environment variable, else the OpenMP default.
int thread_budget();

/// Programmatic override (0 clears it). Used by tests and the CLI.
void set_thread_budget(int threads);

/// RAII override of the thread budget.
class ScopedThreadBudget {
 public:
  explicit ScopedThreadBudget(int threads);
  ~ScopedThreadBudget();
  ScopedThreadBudget(const ScopedThreadBudget&) = delete;
  ScopedThreadBudget& operator=(const ScopedThreadBudget&) = delete;

 private:
  int previous_;
};

}  // namespace invlab
