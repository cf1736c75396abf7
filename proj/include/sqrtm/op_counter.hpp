#pragma once

#include <cstdint>

namespace sqrtm {

// Tally of matmul-equivalent work. A trace-of-product evaluation counts as
// one matmul equivalent; LU-backed solves are tracked separately.
struct OpCounter {
  std::int64_t matmuls = 0;
  std::int64_t solves = 0;
  std::int64_t trace_products = 0;

  void reset() { matmuls = solves = trace_products = 0; }

  std::int64_t matmul_equivalents() const { return matmuls + trace_products; }

  OpCounter& operator+=(const OpCounter& other) {
    matmuls += other.matmuls;
    solves += other.solves;
    trace_products += other.trace_products;
    return *this;
  }

  friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

// Routes counted operations into `target` for the lifetime of the scope.
// Scopes nest; the innermost active scope on the current thread receives the
// counts, so per-thread tallies stay race-free.
class CountScope {
 public:
  explicit CountScope(OpCounter& target);
  ~CountScope();

  CountScope(const CountScope&) = delete;
  CountScope& operator=(const CountScope&) = delete;

 private:
  OpCounter* previous_;
};

// Disables counting for the lifetime of the scope. Used around one-time
// precomputation (e.g. Pade coefficient solves) that the complexity tables
// exclude.
class CountSuspend {
 public:
  CountSuspend();
  ~CountSuspend();

  CountSuspend(const CountSuspend&) = delete;
  CountSuspend& operator=(const CountSuspend&) = delete;

 private:
  OpCounter* previous_;
};

namespace detail {
void count_matmul();
void count_solve();
void count_trace_product();
}  // namespace detail

}  // namespace sqrtm
