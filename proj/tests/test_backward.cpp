#include <doctest.h>

#include <cmath>
#include <vector>

#include "sqrtm/backward.hpp"
#include "sqrtm/errors.hpp"

using namespace sqrtm;

TEST_SUITE_BEGIN("backward");

TEST_CASE("lyapunov solve with B = I forces X = C/2") {
  // scalar case converges in a single iteration
  const SymmetricMatrix b1{{1.0}};
  const SymmetricMatrix c1{{2.0}};
  const GradOutput g1 = lyapunov_solve_sign({b1, c1, 0.0, 1});
  CHECK(g1.grad(0, 0) == doctest::Approx(1.0).epsilon(1e-15));

  const SymmetricMatrix b = SymmetricMatrix::identity(3);
  const SymmetricMatrix c = random_symmetric(3, 31);
  const GradOutput g = lyapunov_solve_sign({b, c, 0.0, 8});
  CHECK((g.grad - c * 0.5).max_abs() <= 1e-9);
}

TEST_CASE("lyapunov solve matches the elementwise diagonal formula") {
  const SymmetricMatrix b = SymmetricMatrix::diagonal({1.0, 2.0});
  const SymmetricMatrix c{{2.0, 3.0}, {3.0, 8.0}};
  GradOutput g = lyapunov_solve_sign({b, c, 1e-7, 8});
  const Matrix expected{{1.0, 1.0}, {1.0, 2.0}};  // X_ij = C_ij / (b_i + b_j)
  CHECK((g.grad - expected).max_abs() <= 1e-6);
  CHECK(g.residual_b <= 1e-6);
  g.residual_c_vs_oracle = fro_norm(g.grad - bartels_stewart(b, c));
  CHECK(*g.residual_c_vs_oracle <= 1e-6);
}

TEST_CASE("lyapunov history shows monotone residual decay from iteration 3") {
  const SymmetricMatrix a = random_spd(64, 77, 0.1);
  const SymmetricMatrix b = exact_sqrt_eig(a).root;
  const SymmetricMatrix c = random_symmetric(64, 78);
  std::vector<SignIterate> history;
  lyapunov_solve_sign({b, c, 0.0, 8}, &history);
  REQUIRE(history.size() == 8);
  for (std::size_t k = 3; k < history.size(); ++k) {
    CHECK(history[k].residual < history[k - 1].residual);
  }
}

TEST_CASE("lyapunov solver is scale invariant") {
  const SymmetricMatrix a = random_spd(16, 41, 0.5);
  const SymmetricMatrix b = exact_sqrt_eig(a).root;
  const SymmetricMatrix c = random_symmetric(16, 42);
  const Matrix base = lyapunov_solve_sign({b, c, 0.0, 8}).grad;
  for (double scale : {0.5, 8.0}) {
    const Matrix scaled =
        lyapunov_solve_sign({SymmetricMatrix(b * scale), SymmetricMatrix(c * scale), 0.0, 8})
            .grad;
    CHECK((scaled - base).max_abs() <= 1e-9 * base.max_abs());
  }
}

TEST_CASE("lyapunov preserves symmetry and counts six multiplies per iteration") {
  const SymmetricMatrix a = random_spd(16, 51, 0.5);
  const SymmetricMatrix b = exact_sqrt_eig(a).root;
  const SymmetricMatrix c = random_symmetric(16, 52);
  OpCounter ops;
  GradOutput g;
  {
    CountScope scope(ops);
    g = lyapunov_solve_sign({b, c, 0.0, 8});
  }
  CHECK(ops.matmuls == 48);
  CHECK(max_asymmetry(g.grad) <= 1e-9);
}

TEST_CASE("lyapunov termination honors the tolerance") {
  const SymmetricMatrix b = SymmetricMatrix::identity(4);  // converges fast
  const SymmetricMatrix c = random_symmetric(4, 61);
  const GradOutput g = lyapunov_solve_sign({b, c, 1e-7, 50});
  CHECK(g.iters_used < 50);
  CHECK(g.residual_b < 1e-7);
}

TEST_CASE("matrix sign of a pre-scaled diagonal") {
  const double norm = std::sqrt(13.0);
  const Matrix h = Matrix::diagonal({2.0 / norm, -3.0 / norm});
  const Matrix s = matrix_sign_ns(h, 12);
  CHECK((s - Matrix::diagonal({1.0, -1.0})).max_abs() <= 1e-8);
}

TEST_CASE("sign of the block Lyapunov matrix encodes the solution") {
  const SymmetricMatrix b = SymmetricMatrix::diagonal({1.0, 2.0});
  const SymmetricMatrix c{{2.0, 3.0}, {3.0, 8.0}};
  const double scale = 1.0 / fro_norm(b);
  Matrix h(4, 4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      h(i, j) = b(i, j) * scale;
      h(i, 2 + j) = c(i, j) * scale;
      h(2 + i, 2 + j) = -b(i, j) * scale;
    }
  }
  const Matrix s = matrix_sign_ns(h, 25);
  CHECK((matmul(s, s) - Matrix::identity(4)).max_abs() <= 1e-6);
  const Matrix two_x{{2.0, 2.0}, {2.0, 4.0}};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(s(i, 2 + j) - two_x(i, j)) <= 1e-5);
    }
  }
}

TEST_CASE("sign iteration diverges outside its convergence region") {
  // an eigenvalue beyond sqrt(3) escapes; the residual guard fires
  const Matrix h = Matrix::diagonal({2.5, -1.0});
  CHECK_THROWS_AS(matrix_sign_ns(h, 60), Diverged);
}

TEST_CASE("bartels-stewart oracle") {
  const SymmetricMatrix c3 = random_symmetric(3, 71);
  const Matrix half = bartels_stewart(SymmetricMatrix::identity(3), c3);
  CHECK((half - c3 * 0.5).max_abs() <= 1e-12);

  const Matrix x = bartels_stewart(SymmetricMatrix::diagonal({1.0, 2.0}),
                                   Matrix{{2.0, 3.0}, {3.0, 8.0}});
  CHECK((x - Matrix{{1.0, 1.0}, {1.0, 2.0}}).max_abs() <= 1e-12);

  const SymmetricMatrix a = random_spd(16, 72, 0.1);
  const SymmetricMatrix b = exact_sqrt_eig(a).root;
  const SymmetricMatrix c = random_symmetric(16, 73);
  const Matrix sol = bartels_stewart(b, c);
  CHECK((matmul(b, sol) + matmul(sol, b) - c).max_abs() <= 1e-8);

  CHECK_THROWS_AS(bartels_stewart(SymmetricMatrix::diagonal({1.0, -1.0}),
                                  Matrix::identity(2)),
                  NonPositiveEigenvalue);
}

TEST_CASE("kronecker closed form agrees with the other oracles") {
  const Matrix x_id = kron_closed_form(SymmetricMatrix::identity(2),
                                       Matrix::identity(2) * 2.0);
  CHECK((x_id - Matrix::identity(2)).max_abs() <= 1e-12);

  const SymmetricMatrix a = random_spd(8, 81, 0.5);
  const SymmetricMatrix b = exact_sqrt_eig(a).root;
  const SymmetricMatrix c = random_symmetric(8, 82);
  CHECK((kron_closed_form(b, c) - bartels_stewart(b, c)).max_abs() <= 1e-10);

  // diagonal B: both oracles match the elementwise division
  const SymmetricMatrix bd = SymmetricMatrix::diagonal({1.0, 3.0, 5.0});
  const SymmetricMatrix cd = random_symmetric(3, 83);
  Matrix elementwise(3, 3);
  const double diag[] = {1.0, 3.0, 5.0};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) elementwise(i, j) = cd(i, j) / (diag[i] + diag[j]);
  }
  CHECK((kron_closed_form(bd, cd) - elementwise).max_abs() <= 1e-10);
  CHECK((bartels_stewart(bd, cd) - elementwise).max_abs() <= 1e-10);

  CHECK_THROWS_AS(kron_closed_form(SymmetricMatrix::identity(17), Matrix::identity(17)),
                  ValidationError);
}

TEST_CASE("ns backward maps zero gradients to zero") {
  const SymmetricMatrix a = random_spd(6, 91, 0.5);
  const SqrtOutput fwd = ns_sqrt_coupled(a, 3, /*keep_trace=*/true);
  const Matrix zero(6, 6);
  const NsGradients g = ns_backward(*fwd.ns_trace, zero, zero);
  CHECK(g.grad_y0.max_abs() == 0.0);
  CHECK(g.grad_z0.max_abs() == 0.0);
}

TEST_CASE("ns backward matches the hand-differentiated scalar step") {
  // one iteration from y = z = 1: dY1/dY = 1/2, dY1/dZ = -1/2,
  // dZ1/dY = -1/2, dZ1/dZ = 1/2
  const SymmetricMatrix a{{1.0}};
  const SqrtOutput fwd = ns_sqrt_coupled(a, 1, /*keep_trace=*/true);
  const Matrix gy{{0.7}};
  const Matrix gz{{-0.2}};
  const NsGradients g = ns_backward(*fwd.ns_trace, gy, gz);
  CHECK(g.grad_y0(0, 0) == doctest::Approx(0.5 * 0.7 - 0.5 * -0.2).epsilon(1e-12));
  CHECK(g.grad_z0(0, 0) == doctest::Approx(-0.5 * 0.7 + 0.5 * -0.2).epsilon(1e-12));
}

TEST_CASE("ns backward counts ten multiplies per iteration") {
  const SymmetricMatrix a = random_spd(8, 92, 0.5);
  const SqrtOutput fwd = ns_sqrt_coupled(a, 5, /*keep_trace=*/true);
  const SymmetricMatrix g = random_symmetric(8, 93);
  OpCounter ops;
  {
    CountScope scope(ops);
    ns_backward(*fwd.ns_trace, g, Matrix(8, 8));
  }
  CHECK(ops.matmuls == 50);
}

TEST_CASE("scalar chain through normalization recovers d sqrt(a)/da") {
  // for a 1x1 input the whole pipeline reduces to a -> sqrt(a)
  const SymmetricMatrix a{{4.0}};
  const SqrtOutput fwd = ns_sqrt_coupled(a, 1, /*keep_trace=*/true);
  const Matrix grad = ns_sqrt_grad(a, fwd, Matrix{{1.0}});
  CHECK(grad(0, 0) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("pre/post gradient terms vanish on zero upstream") {
  const SymmetricMatrix a = random_spd(5, 94, 0.5);
  const SqrtOutput fwd = ns_sqrt_coupled(a, 2, /*keep_trace=*/true);
  const Matrix zero(5, 5);
  const Matrix grad = ns_pre_post_grad(a, *fwd.ns_trace, zero, zero, fwd.ns_trace->y.back());
  CHECK(grad.max_abs() == 0.0);
}

TEST_CASE("pre/post records four matmul equivalents") {
  const SymmetricMatrix a = random_spd(5, 95, 0.5);
  const SqrtOutput fwd = ns_sqrt_coupled(a, 2, /*keep_trace=*/true);
  const SymmetricMatrix g = random_symmetric(5, 96);
  OpCounter ops;
  {
    CountScope scope(ops);
    ns_pre_post_grad(a, *fwd.ns_trace, g, g, fwd.ns_trace->y.back());
  }
  CHECK(ops.matmul_equivalents() == 4);
  CHECK(ops.trace_products == 2);
}

TEST_CASE("full ns chain agrees with finite differences") {
  const SymmetricMatrix a = random_spd(16, 97, 0.5);
  const SymmetricMatrix probe = random_symmetric(16, 98);
  const SqrtOutput fwd = ns_sqrt_coupled(a, 5, /*keep_trace=*/true);
  const Matrix grad = ns_sqrt_grad(a, fwd, probe);
  const double err = finite_diff_check(
      probe, a, [](const SymmetricMatrix& m) { return ns_sqrt_coupled(m, 5).root; }, grad, 1e-5);
  CHECK(err <= 1e-5);
}

TEST_CASE("inverse-root gradient rewrite") {
  const SymmetricMatrix id = SymmetricMatrix::identity(3);
  const SymmetricMatrix g = random_symmetric(3, 99);
  const LyapunovProblem p = invsqrt_grad_to_lyapunov(id, id, g);
  CHECK((p.b - id).max_abs() == 0.0);
  CHECK((p.c - g * -1.0).max_abs() <= 1e-14);
  const GradOutput solved = lyapunov_solve_sign(p);
  CHECK((solved.grad - g * -0.5).max_abs() <= 1e-7);

  // scalar: d(a^{-1/2})/da at a = 4 is -1/2 * 4^{-3/2} = -0.0625
  const SymmetricMatrix a{{4.0}};
  const SymmetricMatrix r{{0.5}};
  const SymmetricMatrix a_inv{{0.25}};
  const GradOutput scalar =
      lyapunov_solve_sign(invsqrt_grad_to_lyapunov(r, a_inv, SymmetricMatrix{{1.0}}));
  CHECK(scalar.grad(0, 0) == doctest::Approx(-0.0625).epsilon(1e-8));
}

TEST_CASE("inverse-root gradient path agrees with finite differences") {
  const SymmetricMatrix a = random_spd(8, 101, 0.5);
  const SymmetricMatrix probe = random_symmetric(8, 102);
  const SymmetricMatrix r = exact_invsqrt_eig(a).root;
  const SymmetricMatrix a_inv(matmul(r, r));
  LyapunovProblem p = invsqrt_grad_to_lyapunov(r, a_inv, probe);
  p.tolerance = 0.0;
  p.max_iters = 8;
  const GradOutput g = lyapunov_solve_sign(p);
  const double err = finite_diff_check(
      probe, a, [](const SymmetricMatrix& m) { return exact_invsqrt_eig(m).root; }, g.grad,
      1e-5);
  CHECK(err <= 1e-5);
}

TEST_CASE("finite differences of the identity map are exact") {
  const SymmetricMatrix a = random_spd(6, 103, 0.5);
  const SymmetricMatrix probe = random_symmetric(6, 104);
  const double err = finite_diff_check(
      probe, a, [](const SymmetricMatrix& m) { return Matrix(m); }, probe, 1e-5);
  CHECK(err <= 1e-9);
}

TEST_CASE("lyapunov backward stays cheaper than the ns backward") {
  const SymmetricMatrix a = random_spd(8, 105, 0.5);
  const SymmetricMatrix b = exact_sqrt_eig(a).root;
  const SymmetricMatrix g = random_symmetric(8, 106);

  OpCounter lya_ops;
  {
    CountScope scope(lya_ops);
    lyapunov_solve_sign({b, g, 0.0, 8});
  }
  const SqrtOutput fwd = ns_sqrt_coupled(a, 5, /*keep_trace=*/true);
  OpCounter ns_ops;
  {
    CountScope scope(ns_ops);
    ns_sqrt_grad(a, fwd, g);
  }
  CHECK(lya_ops.matmul_equivalents() == 48);
  CHECK(ns_ops.matmul_equivalents() == 54);
  CHECK(lya_ops.matmul_equivalents() < ns_ops.matmul_equivalents());
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(lyapunov_solve_sign({SymmetricMatrix::identity(2),
                                       SymmetricMatrix::identity(3), 1e-7, 8}),
                  DimensionMismatch);
  const NsTrace empty;
  CHECK_THROWS_AS(ns_backward(empty, Matrix(2, 2), Matrix(2, 2)), ValidationError);
  const SymmetricMatrix a = random_spd(4, 107, 0.5);
  const SymmetricMatrix probe = random_symmetric(4, 108);
  CHECK_THROWS_AS(finite_diff_check(probe, a,
                                    [](const SymmetricMatrix& m) { return Matrix(m); }, probe,
                                    1e-2),
                  ValidationError);
}

TEST_SUITE_END();
