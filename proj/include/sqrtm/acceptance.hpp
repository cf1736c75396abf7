#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sqrtm {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AcceptanceOptions {
  int trials = 1000;       // sample count of the 64x64 ensemble criteria
  int small_trials = 100;  // sample count of the oracle / equivalence criteria
  std::uint64_t seed = 987654321ULL;
  double ensemble_eps = 0.1;   // ridge of the generated covariance-style inputs
  std::vector<int> only;       // run just these criterion ids; empty runs all

  // fault-injection hooks exercised by the selfcheck tests
  bool inject_pade_fault = false;
  int lyapunov_iter_cap = 0;  // 0 keeps the default 8 iterations
};

// Runs the numbered criteria and returns one result per criterion.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

bool all_passed(const std::vector<CriterionResult>& results);
void print_results(std::ostream& out, const std::vector<CriterionResult>& results);

}  // namespace sqrtm
