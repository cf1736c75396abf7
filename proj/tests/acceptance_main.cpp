// Acceptance harness: runs the numbered criteria at full trial counts and
// prints one PASS/FAIL line per criterion. Exit code 2 on any failure.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "sqrtm/acceptance.hpp"

int main(int argc, char** argv) {
  sqrtm::AcceptanceOptions opt;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    const auto next_int = [&](const char* flag) {
      if (i + 1 >= argc) {
        std::cerr << flag << " needs a value\n";
        std::exit(1);
      }
      return std::atoi(argv[++i]);
    };
    if (arg == "--criterion") {
      opt.only.push_back(next_int("--criterion"));
    } else if (arg == "--trials") {
      opt.trials = next_int("--trials");
    } else if (arg == "--seed") {
      opt.seed = static_cast<std::uint64_t>(next_int("--seed"));
    } else {
      std::cerr << "usage: sqrtm_acceptance [--criterion K]... [--trials N] [--seed S]\n";
      return 1;
    }
  }
  const std::vector<sqrtm::CriterionResult> results = sqrtm::run_acceptance(opt);
  sqrtm::print_results(std::cout, results);
  return sqrtm::all_passed(results) ? 0 : 2;
}
