#pragma once

#include "sqrtm/forward.hpp"

namespace sqrtm {

struct WhitenConfig {
  double eps = 1e-5;
  Method method = Method::kExact;
  // MTP: power-series degree K; MPA: diagonal degree; NS variants: iterations.
  int degree_or_iters = 5;
};

// (X - mean(X)) (X - mean(X))^T + eps I over per-channel row means.
// x is channels x samples with at least two samples; no 1/S scaling.
SymmetricMatrix covariance(const Matrix& x, double eps);

// A^{-1/2} X for the covariance A of x. Square-root methods whiten by
// solving A^{1/2} X_w = X; inverse-root methods apply A^{-1/2} directly.
Matrix zca_whiten(const Matrix& x, const WhitenConfig& cfg);

// Square root of X X^T + eps I (uncentered second-moment pooling).
SymmetricMatrix cov_pool_sqrt(const Matrix& x, const WhitenConfig& cfg);

}  // namespace sqrtm
