#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sqrtm/forward.hpp"

namespace sqrtm {

// Grid definition for the numerical benchmark. Each (method, dim, batch,
// param) cell runs `trials` seeded matrices.
struct BenchConfig {
  std::vector<Method> methods{Method::kMtp, Method::kMpa, Method::kNsCoupled, Method::kExact};
  std::vector<int> dims{64};
  std::vector<int> batch_sizes{1};
  std::vector<int> mtp_degrees{11};
  std::vector<int> mpa_degrees{5};
  std::vector<int> ns_iters{5};
  int lya_iters = 8;
  double lya_tol = 1e-7;
  int trials = 1000;
  std::uint64_t seed = 0;
  double spd_eps = 0.1;  // regularizer of the generated covariance-style inputs
  std::string out_path;
  std::string format = "csv";
};

struct BenchRecord {
  std::string method;
  int n = 0;
  int batch = 0;
  int param = 0;  // degree or iterations; 0 for EXACT
  double mae = 0.0;
  std::int64_t wall_fwd_ns = 0;
  std::int64_t wall_bwd_ns = 0;
  std::int64_t matmuls = 0;  // matmul equivalents per matrix (forward + backward)
  std::int64_t solves = 0;
  double residual_b = 0.0;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

void validate(const BenchConfig& cfg);

// Runs every grid cell single-threaded and returns records in grid order.
// Per-cell solver failures are recorded (mae = NaN is never emitted; the
// record carries zeros and the error is reported on stderr), not fatal.
std::vector<BenchRecord> run_bench(const BenchConfig& cfg);

void emit_csv(std::ostream& out, const std::vector<BenchRecord>& records);
void emit_csv(const std::vector<BenchRecord>& records, const std::string& path);
void emit_json(std::ostream& out, const std::vector<BenchRecord>& records);
void emit_json(const std::vector<BenchRecord>& records, const std::string& path);
std::vector<BenchRecord> parse_json_records(const std::string& path);

}  // namespace sqrtm
