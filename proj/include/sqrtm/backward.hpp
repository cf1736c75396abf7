#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "sqrtm/forward.hpp"

namespace sqrtm {

// B X + X B = C with B = A^{1/2} and C the loss gradient at A^{1/2}.
struct LyapunovProblem {
  SymmetricMatrix b;
  SymmetricMatrix c;
  double tolerance = 1e-7;
  int max_iters = 8;
};

// One step of the coupled sign iteration, as observed by callers that ask
// for a history.
struct SignIterate {
  Matrix b_k;
  Matrix c_k;
  int iter_index = 0;
  double residual = 0.0;  // ||B_k - I||_F
};

struct GradOutput {
  Matrix grad;  // dl/dA
  int iters_used = 0;
  double residual_b = 0.0;
  std::optional<double> residual_c_vs_oracle;  // filled by tests only
};

// Coupled Newton-Schulz sign iteration on the block form of the Lyapunov
// equation; six multiplies per iteration. Stops at max_iters or when the
// residual drops below the tolerance; throws Diverged past residual 1e3.
GradOutput lyapunov_solve_sign(const LyapunovProblem& p,
                               std::vector<SignIterate>* history = nullptr);

// Plain Newton-Schulz sign iteration H <- H (3I - H^2) / 2 on a pre-scaled
// square matrix.
Matrix matrix_sign_ns(const Matrix& h, int iters);

// Exact Lyapunov solve through the eigendecomposition of B.
Matrix bartels_stewart(const SymmetricMatrix& b, const Matrix& c);

// Exact solve of the n^2 x n^2 vectorized system; guarded to n <= 16.
Matrix kron_closed_form(const SymmetricMatrix& b, const Matrix& c);

struct NsGradients {
  Matrix grad_y0;
  Matrix grad_z0;
};

// Reverse sweep through a saved Newton-Schulz trace; ten multiplies per
// iteration.
NsGradients ns_backward(const NsTrace& trace, const Matrix& grad_y, const Matrix& grad_z);

// Gradient terms of the pre-normalization and post-compensation scalings.
// grad_yk is the upstream gradient at the compensated output and y_k the
// final uncompensated iterate. Four matmul equivalents.
Matrix ns_pre_post_grad(const SymmetricMatrix& a, const NsTrace& trace, const Matrix& grad_y0,
                        const Matrix& grad_yk, const Matrix& y_k);

// Full dl/dA chain for a coupled-NS square root (requires out.ns_trace).
Matrix ns_sqrt_grad(const SymmetricMatrix& a, const SqrtOutput& out,
                    const Matrix& grad_sqrt);

// Rewrites an inverse-square-root gradient as the Lyapunov problem
// B = A^{-1/2}, C = -A^{-1} dl/dA^{-1/2} A^{-1}.
LyapunovProblem invsqrt_grad_to_lyapunov(const SymmetricMatrix& a_invsqrt,
                                         const SymmetricMatrix& a_inv,
                                         const SymmetricMatrix& grad_invsqrt);

using ForwardMap = std::function<Matrix(const SymmetricMatrix&)>;

// Central differences of l(A) = <probe, f(A)> over all symmetric basis
// directions, compared against `grad`. Returns the largest deviation
// relative to the largest gradient magnitude.
double finite_diff_check(const SymmetricMatrix& loss_probe, const SymmetricMatrix& a,
                         const ForwardMap& f, const Matrix& grad, double eps);

}  // namespace sqrtm
