#include "sqrtm/bench.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "sqrtm/backward.hpp"
#include "sqrtm/errors.hpp"
#include "sqrtm/whitening.hpp"

namespace sqrtm {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ns(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
}

std::int64_t median(std::vector<std::int64_t> values) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  return values[values.size() / 2];
}

const std::vector<int>& params_for(const BenchConfig& cfg, Method m) {
  static const std::vector<int> kExactParams{0};
  switch (m) {
    case Method::kMtp: return cfg.mtp_degrees;
    case Method::kMpa: return cfg.mpa_degrees;
    case Method::kNsCoupled:
    case Method::kNsSingle: return cfg.ns_iters;
    case Method::kExact: return kExactParams;
  }
  throw ValidationError("unknown method tag");
}

SqrtOutput run_forward(Method m, const SymmetricMatrix& a, int param) {
  switch (m) {
    case Method::kMtp: return mtp_sqrt(a, param);
    case Method::kMpa: return mpa_sqrt(a, param, param);
    case Method::kNsCoupled: return ns_sqrt_coupled(a, param, /*keep_trace=*/true);
    case Method::kNsSingle: return ns_invsqrt_single(a, param);
    case Method::kExact: return exact_sqrt_eig(a);
  }
  throw ValidationError("unknown method tag");
}

// Backward pairing: the rational/polynomial forwards use the iterative
// Lyapunov solver, the coupled NS forward uses its own reverse sweep, the
// single-variable inverse root goes through the inverse-root Lyapunov
// rewrite, and EXACT uses the eigendecomposition-based exact solve.
GradOutput run_backward(Method m, const BenchConfig& cfg, const SymmetricMatrix& a,
                        const SqrtOutput& fwd, const SymmetricMatrix& upstream) {
  switch (m) {
    case Method::kMtp:
    case Method::kMpa: {
      LyapunovProblem p{fwd.root, upstream, cfg.lya_tol, cfg.lya_iters};
      return lyapunov_solve_sign(p);
    }
    case Method::kNsCoupled: {
      GradOutput out;
      out.grad = ns_sqrt_grad(a, fwd, upstream);
      out.iters_used = fwd.degree_or_iters;
      return out;
    }
    case Method::kNsSingle: {
      const SymmetricMatrix a_inv(matmul(fwd.root, fwd.root));
      LyapunovProblem p = invsqrt_grad_to_lyapunov(fwd.root, a_inv, upstream);
      p.tolerance = cfg.lya_tol;
      p.max_iters = cfg.lya_iters;
      return lyapunov_solve_sign(p);
    }
    case Method::kExact: {
      GradOutput out;
      out.grad = bartels_stewart(fwd.root, upstream);
      out.iters_used = 0;
      return out;
    }
  }
  throw ValidationError("unknown method tag");
}

BenchRecord run_cell(const BenchConfig& cfg, Method method, int n, int batch, int param) {
  BenchRecord rec;
  rec.method = method_name(method);
  rec.n = n;
  rec.batch = batch;
  rec.param = param;

  const int num_batches = (cfg.trials + batch - 1) / batch;
  std::vector<std::int64_t> fwd_times;
  std::vector<std::int64_t> bwd_times;
  fwd_times.reserve(static_cast<std::size_t>(num_batches));
  bwd_times.reserve(static_cast<std::size_t>(num_batches));

  OpCounter ops;
  double mae_sum = 0.0;
  double residual_sum = 0.0;
  int done = 0;
  bool counted = false;

  for (int b = 0; b < num_batches && done < cfg.trials; ++b) {
    const int count = std::min(batch, cfg.trials - done);
    std::vector<SymmetricMatrix> inputs;
    std::vector<SymmetricMatrix> upstreams;
    inputs.reserve(static_cast<std::size_t>(count));
    upstreams.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) {
      const std::uint64_t trial = static_cast<std::uint64_t>(done + t);
      inputs.push_back(random_spd(n, seed_mix(cfg.seed, static_cast<std::uint64_t>(n), 2 * trial),
                                  cfg.spd_eps));
      upstreams.push_back(random_symmetric(
          n, seed_mix(cfg.seed, static_cast<std::uint64_t>(n), 2 * trial + 1)));
    }
    const MatrixBatch batch_inputs(inputs);

    std::vector<SqrtOutput> forwards;
    forwards.reserve(static_cast<std::size_t>(count));
    const auto fwd_start = Clock::now();
    for (int t = 0; t < count; ++t) forwards.push_back(run_forward(method, batch_inputs[t], param));
    fwd_times.push_back(elapsed_ns(fwd_start));

    const auto bwd_start = Clock::now();
    for (int t = 0; t < count; ++t) {
      const GradOutput g = run_backward(method, cfg, batch_inputs[t], forwards[t], upstreams[t]);
      residual_sum += g.residual_b;
    }
    bwd_times.push_back(elapsed_ns(bwd_start));

    for (int t = 0; t < count; ++t) {
      mae_sum += mae(forwards[t].root, exact_sqrt_eig(batch_inputs[t]).root);
    }

    // per-matrix operation counts, measured once on a representative input
    if (!counted) {
      CountScope scope(ops);
      const SqrtOutput fwd = run_forward(method, batch_inputs[0], param);
      run_backward(method, cfg, batch_inputs[0], fwd, upstreams[0]);
      counted = true;
    }
    done += count;
  }

  rec.mae = mae_sum / cfg.trials;
  rec.wall_fwd_ns = median(std::move(fwd_times));
  rec.wall_bwd_ns = median(std::move(bwd_times));
  rec.matmuls = ops.matmul_equivalents();
  rec.solves = ops.solves;
  rec.residual_b = residual_sum / cfg.trials;
  return rec;
}

}  // namespace

void validate(const BenchConfig& cfg) {
  if (cfg.trials < 1) throw ValidationError("bench: trials must be >= 1");
  if (cfg.methods.empty()) throw ValidationError("bench: at least one method");
  if (cfg.dims.empty()) throw ValidationError("bench: at least one dimension");
  for (int n : cfg.dims) {
    if (n < 2 || n > 1024) {
      throw ValidationError("bench: dims must lie in [2, 1024], got " + std::to_string(n));
    }
  }
  if (cfg.batch_sizes.empty()) throw ValidationError("bench: at least one batch size");
  for (int b : cfg.batch_sizes) {
    if (b < 1) throw ValidationError("bench: batch sizes must be >= 1");
  }
  for (int d : cfg.mtp_degrees) {
    if (d < 1) throw ValidationError("bench: MTP degrees must be >= 1");
  }
  for (int d : cfg.mpa_degrees) {
    if (d < 1) throw ValidationError("bench: MPA degrees must be >= 1");
  }
  for (int it : cfg.ns_iters) {
    if (it < 1) throw ValidationError("bench: NS iterations must be >= 1");
  }
  if (cfg.lya_iters < 1) throw ValidationError("bench: Lyapunov iterations must be >= 1");
  if (cfg.lya_tol < 0.0) throw ValidationError("bench: Lyapunov tolerance must be >= 0");
  if (cfg.spd_eps < 0.0) throw ValidationError("bench: spd_eps must be >= 0");
  if (cfg.format != "csv" && cfg.format != "json") {
    throw ValidationError("bench: format must be csv or json");
  }
}

std::vector<BenchRecord> run_bench(const BenchConfig& cfg) {
  validate(cfg);
  std::vector<BenchRecord> records;
  for (Method method : cfg.methods) {
    for (int n : cfg.dims) {
      for (int batch : cfg.batch_sizes) {
        for (int param : params_for(cfg, method)) {
          try {
            records.push_back(run_cell(cfg, method, n, batch, param));
          } catch (const Error& e) {
            std::cerr << "bench cell (" << method_name(method) << ", n=" << n
                      << ", batch=" << batch << ", param=" << param << ") failed: " << e.what()
                      << "\n";
            BenchRecord failed;
            failed.method = method_name(method);
            failed.n = n;
            failed.batch = batch;
            failed.param = param;
            records.push_back(failed);
          }
        }
      }
    }
  }
  return records;
}

namespace {

nlohmann::json to_json(const BenchRecord& r) {
  return nlohmann::json{{"method", r.method},
                        {"n", r.n},
                        {"batch", r.batch},
                        {"param", r.param},
                        {"mae", r.mae},
                        {"wall_fwd_ns", r.wall_fwd_ns},
                        {"wall_bwd_ns", r.wall_bwd_ns},
                        {"matmuls", r.matmuls},
                        {"solves", r.solves},
                        {"residual_b", r.residual_b}};
}

}  // namespace

void emit_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << "method,n,batch,param,mae,wall_fwd_ns,wall_bwd_ns,matmuls,solves,residual_b\n";
  out.precision(17);
  for (const BenchRecord& r : records) {
    out << r.method << ',' << r.n << ',' << r.batch << ',' << r.param << ',' << r.mae << ','
        << r.wall_fwd_ns << ',' << r.wall_bwd_ns << ',' << r.matmuls << ',' << r.solves << ','
        << r.residual_b << "\n";
  }
}

void emit_csv(const std::vector<BenchRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  emit_csv(out, records);
  if (!out) throw IoError("write failed: " + path);
}

void emit_json(std::ostream& out, const std::vector<BenchRecord>& records) {
  nlohmann::json array = nlohmann::json::array();
  for (const BenchRecord& r : records) array.push_back(to_json(r));
  out << array.dump(2) << "\n";
}

void emit_json(const std::vector<BenchRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  emit_json(out, records);
  if (!out) throw IoError("write failed: " + path);
}

std::vector<BenchRecord> parse_json_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  nlohmann::json array = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/true);
  std::vector<BenchRecord> records;
  for (const auto& item : array) {
    BenchRecord r;
    r.method = item.at("method").get<std::string>();
    r.n = item.at("n").get<int>();
    r.batch = item.at("batch").get<int>();
    r.param = item.at("param").get<int>();
    r.mae = item.at("mae").get<double>();
    r.wall_fwd_ns = item.at("wall_fwd_ns").get<std::int64_t>();
    r.wall_bwd_ns = item.at("wall_bwd_ns").get<std::int64_t>();
    r.matmuls = item.at("matmuls").get<std::int64_t>();
    r.solves = item.at("solves").get<std::int64_t>();
    r.residual_b = item.at("residual_b").get<double>();
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace sqrtm
