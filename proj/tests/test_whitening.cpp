#include <doctest.h>

#include <cmath>

#include "sqrtm/backward.hpp"
#include "sqrtm/errors.hpp"
#include "sqrtm/whitening.hpp"

using namespace sqrtm;

namespace {

// rows orthonormalized inside the centered subspace, so cov(x, 0) = I
Matrix orthonormal_centered_rows(int channels, int samples, std::uint64_t seed) {
  Matrix x = random_gaussian(channels, samples, seed);
  for (int i = 0; i < channels; ++i) {
    double mean = 0.0;
    for (int j = 0; j < samples; ++j) mean += x(i, j);
    mean /= samples;
    for (int j = 0; j < samples; ++j) x(i, j) -= mean;
    for (int prev = 0; prev < i; ++prev) {
      double dot = 0.0;
      for (int j = 0; j < samples; ++j) dot += x(i, j) * x(prev, j);
      for (int j = 0; j < samples; ++j) x(i, j) -= dot * x(prev, j);
    }
    double norm = 0.0;
    for (int j = 0; j < samples; ++j) norm += x(i, j) * x(i, j);
    norm = std::sqrt(norm);
    for (int j = 0; j < samples; ++j) x(i, j) /= norm;
  }
  return x;
}

double cov_identity_dev(const Matrix& x) {
  return (covariance(x, 0.0) - Matrix::identity(x.rows())).max_abs();
}

}  // namespace

TEST_SUITE_BEGIN("whitening");

TEST_CASE("covariance formula") {
  const SymmetricMatrix single = covariance(Matrix{{1.0, -1.0}}, 0.01);
  CHECK(single(0, 0) == doctest::Approx(2.01).epsilon(1e-15));

  Matrix constant(3, 5);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 5; ++j) constant(i, j) = 7.0 + i;
  }
  const SymmetricMatrix c = covariance(constant, 0.25);
  CHECK((c - Matrix::identity(3) * 0.25).max_abs() <= 1e-12);
}

TEST_CASE("covariance matches a two-pass brute-force oracle") {
  const Matrix x = random_gaussian(8, 64, 7);
  const SymmetricMatrix fast = covariance(x, 0.0);
  Matrix brute(8, 8);
  for (int i = 0; i < 8; ++i) {
    for (int k = 0; k < 8; ++k) {
      double mi = 0.0, mk = 0.0;
      for (int j = 0; j < 64; ++j) {
        mi += x(i, j);
        mk += x(k, j);
      }
      mi /= 64.0;
      mk /= 64.0;
      double acc = 0.0;
      for (int j = 0; j < 64; ++j) acc += (x(i, j) - mi) * (x(k, j) - mk);
      brute(i, k) = acc;
    }
  }
  CHECK((fast - brute).max_abs() <= 1e-10);
}

TEST_CASE("covariance validates its inputs") {
  CHECK_THROWS_AS(covariance(Matrix(3, 1), 0.1), ValidationError);
  CHECK_THROWS_AS(covariance(Matrix{{1.0, 2.0}}, -0.5), ValidationError);
}

TEST_CASE("exact whitening reaches identity covariance") {
  const Matrix x = random_gaussian(8, 256, 11);
  WhitenConfig cfg;
  cfg.method = Method::kExact;
  cfg.eps = 1e-5;
  const Matrix whitened = zca_whiten(x, cfg);
  CHECK(cov_identity_dev(whitened) <= 1e-5);
}

TEST_CASE("mpa whitening reaches identity covariance at its own tolerance") {
  const Matrix x = random_gaussian(8, 256, 12);
  WhitenConfig cfg;
  cfg.method = Method::kMpa;
  cfg.eps = 1e-5;
  cfg.degree_or_iters = 5;
  CHECK(cov_identity_dev(zca_whiten(x, cfg)) <= 1e-3);
}

TEST_CASE("already-white input passes through") {
  const Matrix x = orthonormal_centered_rows(8, 256, 13);
  CHECK(cov_identity_dev(x) <= 1e-12);
  WhitenConfig cfg;
  cfg.method = Method::kExact;
  cfg.eps = 1e-8;
  const Matrix whitened = zca_whiten(x, cfg);
  CHECK((whitened - x).max_abs() <= 1e-4);
}

TEST_CASE("whitening twice changes little") {
  const Matrix x = random_gaussian(6, 128, 14);
  WhitenConfig cfg;
  cfg.method = Method::kExact;
  cfg.eps = 1e-6;
  const Matrix once = zca_whiten(x, cfg);
  const Matrix twice = zca_whiten(once, cfg);
  CHECK((twice - once).max_abs() <= 1e-3);
}

TEST_CASE("covariance pooling square root") {
  // rows with squared norms 4 and 9 and zero cross product
  Matrix x(2, 4);
  x(0, 0) = 2.0;
  x(1, 1) = 3.0;
  WhitenConfig cfg;
  cfg.method = Method::kExact;
  cfg.eps = 0.0;
  const SymmetricMatrix pooled = cov_pool_sqrt(x, cfg);
  CHECK((pooled - Matrix::diagonal({2.0, 3.0})).max_abs() <= 1e-12);

  // identity second moment maps to itself
  Matrix eye_rows(3, 6);
  for (int i = 0; i < 3; ++i) eye_rows(i, i) = 1.0;
  CHECK((cov_pool_sqrt(eye_rows, cfg) - Matrix::identity(3)).max_abs() <= 1e-12);
}

TEST_CASE("mpa pooling tracks the exact pooling") {
  const Matrix x = random_gaussian(8, 64, 15);
  WhitenConfig exact_cfg;
  exact_cfg.method = Method::kExact;
  exact_cfg.eps = 1e-5;
  WhitenConfig mpa_cfg = exact_cfg;
  mpa_cfg.method = Method::kMpa;
  mpa_cfg.degree_or_iters = 5;
  // oracle-measured gap for this spectrum sits near 2e-4
  CHECK(mae(cov_pool_sqrt(x, mpa_cfg), cov_pool_sqrt(x, exact_cfg)) <= 5e-4);
}

TEST_CASE("pooling spectrum is the square root of the input spectrum") {
  const Matrix x = random_gaussian(6, 48, 16);
  WhitenConfig cfg;
  cfg.method = Method::kExact;
  cfg.eps = 1e-5;
  const SymmetricMatrix pooled = cov_pool_sqrt(x, cfg);
  Matrix gram = matmul(x, x.transposed());
  for (int i = 0; i < 6; ++i) gram(i, i) += cfg.eps;
  const EigenDecomposition in = eig_sym(SymmetricMatrix(gram));
  const EigenDecomposition out = eig_sym(pooled);
  for (std::size_t i = 0; i < in.eigenvalues.size(); ++i) {
    CHECK(out.eigenvalues[i] ==
          doctest::Approx(std::sqrt(in.eigenvalues[i])).epsilon(1e-9));
  }
}

TEST_CASE("whitening gradient chain agrees with finite differences") {
  const int channels = 4, samples = 16;
  const Matrix x = random_gaussian(channels, samples, 17);
  const Matrix probe = random_gaussian(channels, samples, 18);
  const double eps_cov = 1e-5;

  const SymmetricMatrix a = covariance(x, eps_cov);
  const SymmetricMatrix r = exact_invsqrt_eig(a).root;
  const SymmetricMatrix a_inv(matmul(r, r));

  // l = <probe, A^{-1/2} x>: gradient through the inverse root and the
  // centered covariance
  const Matrix grad_root = matmul(probe, x.transposed());
  LyapunovProblem p =
      invsqrt_grad_to_lyapunov(r, a_inv, SymmetricMatrix(grad_root));
  p.max_iters = 12;
  p.tolerance = 0.0;
  const Matrix grad_a = lyapunov_solve_sign(p).grad;

  Matrix centered = x;
  for (int i = 0; i < channels; ++i) {
    double mean = 0.0;
    for (int j = 0; j < samples; ++j) mean += centered(i, j);
    mean /= samples;
    for (int j = 0; j < samples; ++j) centered(i, j) -= mean;
  }
  Matrix projector(samples, samples);
  for (int i = 0; i < samples; ++i) {
    for (int j = 0; j < samples; ++j) {
      projector(i, j) = (i == j ? 1.0 : 0.0) - 1.0 / samples;
    }
  }
  const Matrix grad_x =
      matmul(r, probe) + matmul(matmul(grad_a + grad_a.transposed(), centered), projector);

  double worst = 0.0, scale = 0.0;
  const double h = 1e-6;
  for (int i = 0; i < channels; ++i) {
    for (int j = 0; j < samples; ++j) {
      Matrix hi = x, lo = x;
      hi(i, j) += h;
      lo(i, j) -= h;
      const auto loss = [&](const Matrix& input) {
        const SymmetricMatrix cov = covariance(input, eps_cov);
        const Matrix w = matmul(exact_invsqrt_eig(cov).root, input);
        double acc = 0.0;
        for (int r2 = 0; r2 < channels; ++r2) {
          for (int c2 = 0; c2 < samples; ++c2) acc += probe(r2, c2) * w(r2, c2);
        }
        return acc;
      };
      const double fd = (loss(hi) - loss(lo)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - grad_x(i, j)));
      scale = std::max({scale, std::abs(fd), std::abs(grad_x(i, j))});
    }
  }
  CHECK(worst / scale <= 1e-4);
}

TEST_SUITE_END();
