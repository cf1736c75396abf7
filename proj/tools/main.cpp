#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sqrtm/acceptance.hpp"
#include "sqrtm/backward.hpp"
#include "sqrtm/bench.hpp"
#include "sqrtm/errors.hpp"
#include "sqrtm/pade.hpp"
#include "sqrtm/whitening.hpp"

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

sqrtm::Matrix read_csv_features(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sqrtm::IoError("cannot open for reading: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const std::string& cell : split(line, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw sqrtm::IoError("empty feature file: " + path);
  const int cols = static_cast<int>(rows.front().size());
  sqrtm::Matrix m(static_cast<int>(rows.size()), cols);
  for (int i = 0; i < m.rows(); ++i) {
    if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != cols) {
      throw sqrtm::IoError("ragged feature rows in " + path);
    }
    for (int j = 0; j < cols; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

void write_csv_features(std::ostream& out, const sqrtm::Matrix& m) {
  out.precision(17);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << "\n";
  }
}

struct CommonInput {
  std::string input_path;
  int n = 64;
  std::uint64_t seed = 0;
  double eps = 0.1;
};

sqrtm::SymmetricMatrix load_input(const CommonInput& in) {
  if (!in.input_path.empty()) {
    return sqrtm::SymmetricMatrix(sqrtm::read_matrix_file(in.input_path));
  }
  return sqrtm::random_spd(in.n, in.seed, in.eps);
}

int cmd_coeffs(int m, int n, const std::string& out_path) {
  const sqrtm::PadeCoefficients& c = sqrtm::pade_coefficients(m, n);
  json j{{"m", c.m_degree}, {"n", c.n_degree}, {"p", c.p}, {"q", c.q}};
  if (m == n) j["pole_scan_min"] = sqrtm::verify_no_poles(c);
  const std::string text = j.dump(2);
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw sqrtm::IoError("cannot open for writing: " + out_path);
    out << text << "\n";
  }
  return 0;
}

int cmd_sqrt(const CommonInput& in, const std::string& method_name, int degree, int iters,
             bool inverse, const std::string& out_path) {
  const sqrtm::SymmetricMatrix a = load_input(in);
  const sqrtm::Method method = sqrtm::parse_method(method_name);

  sqrtm::SqrtOutput result;
  switch (method) {
    case sqrtm::Method::kMtp:
      if (inverse) throw sqrtm::ValidationError("MTP computes only the square root");
      result = sqrtm::mtp_sqrt(a, degree);
      break;
    case sqrtm::Method::kMpa: {
      const int d = sqrtm::diagonal_degree_for(degree);
      result = inverse ? sqrtm::mpa_invsqrt(a, d, d) : sqrtm::mpa_sqrt(a, d, d);
      break;
    }
    case sqrtm::Method::kNsCoupled:
      result = inverse ? sqrtm::ns_invsqrt_coupled(a, iters) : sqrtm::ns_sqrt_coupled(a, iters);
      break;
    case sqrtm::Method::kNsSingle:
      if (!inverse) throw sqrtm::ValidationError("NS_SINGLE computes only the inverse root");
      result = sqrtm::ns_invsqrt_single(a, iters);
      break;
    case sqrtm::Method::kExact:
      result = inverse ? sqrtm::exact_invsqrt_eig(a) : sqrtm::exact_sqrt_eig(a);
      break;
  }

  const sqrtm::Matrix square = sqrtm::matmul(result.root, result.root);
  double residual;
  if (inverse) {
    residual = (sqrtm::matmul(square, a) - sqrtm::Matrix::identity(a.dim())).max_abs();
  } else {
    residual = (square - a).max_abs();
  }
  const sqrtm::Matrix exact =
      inverse ? sqrtm::exact_invsqrt_eig(a).root : sqrtm::exact_sqrt_eig(a).root;

  if (out_path.empty()) {
    sqrtm::write_matrix(std::cout, result.root);
  } else {
    sqrtm::write_matrix_file(out_path, result.root);
  }
  json j{{"method", sqrtm::method_name(method)}, {"inverse", inverse},  {"n", a.dim()},
         {"norm", result.norm},                  {"residual", residual}, {"mae", sqrtm::mae(result.root, exact)}};
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_grad(const CommonInput& in, const std::string& solver, int iters, double tol,
             const std::string& out_path) {
  const sqrtm::SymmetricMatrix a = load_input(in);
  const sqrtm::SymmetricMatrix upstream =
      sqrtm::random_symmetric(a.dim(), sqrtm::seed_mix(in.seed, 0x67726164ULL, 0));

  // problem setup stays outside the counted region
  const sqrtm::SymmetricMatrix b = sqrtm::exact_sqrt_eig(a).root;
  const sqrtm::SqrtOutput ns_fwd =
      solver == "ns" ? sqrtm::ns_sqrt_coupled(a, iters, /*keep_trace=*/true)
                     : sqrtm::SqrtOutput{};

  sqrtm::OpCounter ops;
  sqrtm::GradOutput out;
  {
    sqrtm::CountScope scope(ops);
    if (solver == "lya") {
      out = sqrtm::lyapunov_solve_sign({b, upstream, tol, iters});
    } else if (solver == "ns") {
      out.grad = sqrtm::ns_sqrt_grad(a, ns_fwd, upstream);
      out.iters_used = iters;
    } else if (solver == "bs") {
      out.grad = sqrtm::bartels_stewart(b, upstream);
    } else if (solver == "kron") {
      out.grad = sqrtm::kron_closed_form(b, upstream);
    } else {
      throw sqrtm::ValidationError("solver must be one of lya, ns, bs, kron");
    }
  }

  if (out_path.empty()) {
    sqrtm::write_matrix(std::cout, out.grad);
  } else {
    sqrtm::write_matrix_file(out_path, out.grad);
  }
  json j{{"solver", solver},
         {"n", a.dim()},
         {"iters_used", out.iters_used},
         {"residual_b", out.residual_b},
         {"matmuls", ops.matmuls},
         {"solves", ops.solves},
         {"trace_products", ops.trace_products}};
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_whiten(const std::string& input_path, int channels, int samples, std::uint64_t seed,
               const std::string& method_name, double eps, int param,
               const std::string& out_path) {
  sqrtm::Matrix x = input_path.empty() ? sqrtm::random_gaussian(channels, samples, seed)
                                       : read_csv_features(input_path);
  sqrtm::WhitenConfig cfg;
  cfg.method = sqrtm::parse_method(method_name);
  cfg.eps = eps;
  cfg.degree_or_iters = param;
  const sqrtm::Matrix whitened = sqrtm::zca_whiten(x, cfg);
  const double dev =
      (sqrtm::covariance(whitened, 0.0) - sqrtm::Matrix::identity(x.rows())).max_abs();

  if (out_path.empty()) {
    write_csv_features(std::cout, whitened);
  } else {
    std::ofstream out(out_path);
    if (!out) throw sqrtm::IoError("cannot open for writing: " + out_path);
    write_csv_features(out, whitened);
  }
  json j{{"method", sqrtm::method_name(cfg.method)},
         {"channels", x.rows()},
         {"samples", x.cols()},
         {"eps", eps},
         {"cov_deviation", dev}};
  std::cout << j.dump() << "\n";
  return 0;
}

sqrtm::BenchConfig bench_config_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sqrtm::IoError("cannot open config: " + path);
  json j = json::parse(in);
  sqrtm::BenchConfig cfg;
  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& name : j.at("methods")) {
      cfg.methods.push_back(sqrtm::parse_method(name.get<std::string>()));
    }
  }
  if (j.contains("dims")) cfg.dims = j.at("dims").get<std::vector<int>>();
  if (j.contains("batch_sizes")) cfg.batch_sizes = j.at("batch_sizes").get<std::vector<int>>();
  if (j.contains("mtp_degrees")) cfg.mtp_degrees = j.at("mtp_degrees").get<std::vector<int>>();
  if (j.contains("mpa_degrees")) cfg.mpa_degrees = j.at("mpa_degrees").get<std::vector<int>>();
  if (j.contains("ns_iters")) cfg.ns_iters = j.at("ns_iters").get<std::vector<int>>();
  if (j.contains("lya_iters")) cfg.lya_iters = j.at("lya_iters").get<int>();
  if (j.contains("lya_tol")) cfg.lya_tol = j.at("lya_tol").get<double>();
  if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("spd_eps")) cfg.spd_eps = j.at("spd_eps").get<double>();
  if (j.contains("out")) cfg.out_path = j.at("out").get<std::string>();
  if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
  return cfg;
}

int cmd_bench(const sqrtm::BenchConfig& cfg) {
  const std::vector<sqrtm::BenchRecord> records = sqrtm::run_bench(cfg);
  if (!cfg.out_path.empty()) {
    if (cfg.format == "json") {
      sqrtm::emit_json(records, cfg.out_path);
    } else {
      sqrtm::emit_csv(records, cfg.out_path);
    }
    std::cout << records.size() << " records written to " << cfg.out_path << "\n";
  } else if (cfg.format == "json") {
    sqrtm::emit_json(std::cout, records);
  } else {
    sqrtm::emit_csv(std::cout, records);
  }
  return 0;
}

int cmd_selfcheck(const sqrtm::AcceptanceOptions& opt) {
  const std::vector<sqrtm::CriterionResult> results = sqrtm::run_acceptance(opt);
  sqrtm::print_results(std::cout, results);
  return sqrtm::all_passed(results) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matrix square root and inverse square root toolkit"};
  app.require_subcommand(1);

  // coeffs
  auto* coeffs = app.add_subcommand("coeffs", "print Pade coefficients as JSON");
  int coeffs_m = 5, coeffs_n = 5;
  std::string coeffs_out;
  coeffs->add_option("--m", coeffs_m, "numerator degree");
  coeffs->add_option("--n", coeffs_n, "denominator degree");
  coeffs->add_option("--out", coeffs_out, "output path (default stdout)");

  // sqrt
  auto* sqrt_cmd = app.add_subcommand("sqrt", "compute a matrix (inverse) square root");
  CommonInput sqrt_in;
  std::string sqrt_method = "MPA", sqrt_out;
  int sqrt_degree = 11, sqrt_iters = 5;
  bool sqrt_inverse = false;
  sqrt_cmd->add_option("--method", sqrt_method, "MTP|MPA|NS|NS_SINGLE|EXACT");
  sqrt_cmd->add_option("--degree", sqrt_degree, "power-series degree K (odd for MPA)");
  sqrt_cmd->add_option("--iters", sqrt_iters, "Newton-Schulz iterations");
  sqrt_cmd->add_option("--input", sqrt_in.input_path, "matrix file (text format)");
  sqrt_cmd->add_option("--n", sqrt_in.n, "generated matrix dimension");
  sqrt_cmd->add_option("--seed", sqrt_in.seed, "generator seed");
  sqrt_cmd->add_option("--eps", sqrt_in.eps, "generator ridge");
  sqrt_cmd->add_flag("--inverse", sqrt_inverse, "compute A^{-1/2}");
  sqrt_cmd->add_option("--out", sqrt_out, "matrix output path (default stdout)");

  // grad
  auto* grad_cmd = app.add_subcommand("grad", "solve the square-root gradient equation");
  CommonInput grad_in;
  grad_in.n = 8;
  std::string grad_solver = "lya", grad_out;
  int grad_iters = 8;
  double grad_tol = 1e-7;
  grad_cmd->add_option("--solver", grad_solver, "lya|ns|bs|kron");
  grad_cmd->add_option("--out", grad_out, "gradient matrix output path (default stdout)");
  grad_cmd->add_option("--iters", grad_iters, "iteration count");
  grad_cmd->add_option("--tol", grad_tol, "termination tolerance on |B_k - I|_F");
  grad_cmd->add_option("--input", grad_in.input_path, "matrix file (text format)");
  grad_cmd->add_option("--n", grad_in.n, "generated matrix dimension");
  grad_cmd->add_option("--seed", grad_in.seed, "generator seed");
  grad_cmd->add_option("--eps", grad_in.eps, "generator ridge");

  // whiten
  auto* whiten_cmd = app.add_subcommand("whiten", "zca-whiten a feature batch");
  std::string whiten_input, whiten_method = "EXACT", whiten_out;
  int whiten_channels = 8, whiten_samples = 256, whiten_param = 5;
  std::uint64_t whiten_seed = 0;
  double whiten_eps = 1e-5;
  whiten_cmd->add_option("--input", whiten_input, "feature CSV, one channel per row");
  whiten_cmd->add_option("--channels", whiten_channels, "generated channel count");
  whiten_cmd->add_option("--samples", whiten_samples, "generated sample count");
  whiten_cmd->add_option("--seed", whiten_seed, "generator seed");
  whiten_cmd->add_option("--method", whiten_method, "MTP|MPA|NS|NS_SINGLE|EXACT");
  whiten_cmd->add_option("--eps", whiten_eps, "covariance ridge");
  whiten_cmd->add_option("--param", whiten_param, "degree (MTP/MPA) or iterations (NS)");
  whiten_cmd->add_option("--out", whiten_out, "whitened CSV path (default stdout)");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run the numerical benchmark grid");
  std::string bench_config_path, bench_methods, bench_dims, bench_batches;
  sqrtm::BenchConfig bench_cfg;
  bench_cfg.trials = 100;
  bench_cmd->add_option("--config", bench_config_path, "JSON config (overrides other flags)");
  bench_cmd->add_option("--methods", bench_methods, "comma list, e.g. MPA,MTP,NS,EXACT");
  bench_cmd->add_option("--dims", bench_dims, "comma list of matrix dimensions");
  bench_cmd->add_option("--batches", bench_batches, "comma list of batch sizes");
  bench_cmd->add_option("--trials", bench_cfg.trials, "matrices per grid cell");
  bench_cmd->add_option("--seed", bench_cfg.seed, "generator seed");
  bench_cmd->add_option("--eps", bench_cfg.spd_eps, "generator ridge");
  bench_cmd->add_option("--out", bench_cfg.out_path, "output path (default stdout)");
  bench_cmd->add_option("--format", bench_cfg.format, "csv|json");

  // selfcheck
  auto* selfcheck_cmd = app.add_subcommand("selfcheck", "run the acceptance criteria");
  sqrtm::AcceptanceOptions selfcheck_opt;
  selfcheck_opt.trials = 100;
  selfcheck_cmd->add_option("--trials", selfcheck_opt.trials, "ensemble sample count");
  selfcheck_cmd->add_option("--seed", selfcheck_opt.seed, "generator seed");
  selfcheck_cmd->add_option("--criterion", selfcheck_opt.only, "run only these criterion ids");
  selfcheck_cmd->add_flag("--inject-pade-fault", selfcheck_opt.inject_pade_fault,
                          "fault hook: corrupt a Pade coefficient")
      ->group("");
  selfcheck_cmd->add_option("--cap-lya-iters", selfcheck_opt.lyapunov_iter_cap,
                            "fault hook: cap the Lyapunov iteration count")
      ->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (coeffs->parsed()) return cmd_coeffs(coeffs_m, coeffs_n, coeffs_out);
    if (sqrt_cmd->parsed()) {
      return cmd_sqrt(sqrt_in, sqrt_method, sqrt_degree, sqrt_iters, sqrt_inverse, sqrt_out);
    }
    if (grad_cmd->parsed()) return cmd_grad(grad_in, grad_solver, grad_iters, grad_tol, grad_out);
    if (whiten_cmd->parsed()) {
      return cmd_whiten(whiten_input, whiten_channels, whiten_samples, whiten_seed,
                        whiten_method, whiten_eps, whiten_param, whiten_out);
    }
    if (bench_cmd->parsed()) {
      if (!bench_config_path.empty()) {
        bench_cfg = bench_config_from_json(bench_config_path);
      } else {
        if (!bench_methods.empty()) {
          bench_cfg.methods.clear();
          for (const std::string& name : split(bench_methods, ',')) {
            bench_cfg.methods.push_back(sqrtm::parse_method(name));
          }
        }
        if (!bench_dims.empty()) {
          bench_cfg.dims.clear();
          for (const std::string& d : split(bench_dims, ',')) bench_cfg.dims.push_back(std::stoi(d));
        }
        if (!bench_batches.empty()) {
          bench_cfg.batch_sizes.clear();
          for (const std::string& b : split(bench_batches, ',')) {
            bench_cfg.batch_sizes.push_back(std::stoi(b));
          }
        }
      }
      return cmd_bench(bench_cfg);
    }
    if (selfcheck_cmd->parsed()) return cmd_selfcheck(selfcheck_opt);
  } catch (const sqrtm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
