#include "sqrtm/whitening.hpp"

#include "sqrtm/errors.hpp"

namespace sqrtm {

namespace {

void validate_features(const Matrix& x) {
  if (x.rows() < 1 || x.cols() < 2) {
    throw ValidationError("feature matrix needs >= 1 channel and >= 2 samples");
  }
}

void validate_config(const WhitenConfig& cfg, bool strict_eps) {
  if (strict_eps ? !(cfg.eps > 0.0) : cfg.eps < 0.0) {
    throw ValidationError("whitening eps must be positive");
  }
  if (cfg.degree_or_iters < 1) throw ValidationError("degree/iterations must be >= 1");
}

Matrix centered(const Matrix& x) {
  Matrix c = x;
  for (int i = 0; i < c.rows(); ++i) {
    double mean = 0.0;
    for (int j = 0; j < c.cols(); ++j) mean += c(i, j);
    mean /= c.cols();
    for (int j = 0; j < c.cols(); ++j) c(i, j) -= mean;
  }
  return c;
}

SqrtOutput dispatch_sqrt(const SymmetricMatrix& a, const WhitenConfig& cfg) {
  switch (cfg.method) {
    case Method::kMtp: return mtp_sqrt(a, cfg.degree_or_iters);
    case Method::kMpa: return mpa_sqrt(a, cfg.degree_or_iters, cfg.degree_or_iters);
    case Method::kNsCoupled: return ns_sqrt_coupled(a, cfg.degree_or_iters);
    case Method::kNsSingle:
      throw ValidationError("NS_SINGLE computes only the inverse root");
    case Method::kExact: return exact_sqrt_eig(a);
  }
  throw ValidationError("unknown method tag");
}

}  // namespace

SymmetricMatrix covariance(const Matrix& x, double eps) {
  validate_features(x);
  if (eps < 0.0) throw ValidationError("covariance eps must be >= 0");
  const Matrix c = centered(x);
  Matrix cov = matmul(c, c.transposed());
  for (int i = 0; i < cov.rows(); ++i) cov(i, i) += eps;
  return SymmetricMatrix(cov);
}

Matrix zca_whiten(const Matrix& x, const WhitenConfig& cfg) {
  validate_features(x);
  validate_config(cfg, /*strict_eps=*/true);
  const SymmetricMatrix a = covariance(x, cfg.eps);
  switch (cfg.method) {
    case Method::kMpa:
      return matmul(mpa_invsqrt(a, cfg.degree_or_iters, cfg.degree_or_iters).root, x);
    case Method::kNsSingle:
      return matmul(ns_invsqrt_single(a, cfg.degree_or_iters).root, x);
    default:
      // square-root route: solve A^{1/2} X_w = X
      return solve_linear(dispatch_sqrt(a, cfg).root, x);
  }
}

SymmetricMatrix cov_pool_sqrt(const Matrix& x, const WhitenConfig& cfg) {
  validate_features(x);
  validate_config(cfg, /*strict_eps=*/false);
  Matrix gram = matmul(x, x.transposed());
  for (int i = 0; i < gram.rows(); ++i) gram(i, i) += cfg.eps;
  return dispatch_sqrt(SymmetricMatrix(gram), cfg).root;
}

}  // namespace sqrtm
