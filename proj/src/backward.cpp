#include "sqrtm/backward.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "sqrtm/errors.hpp"

namespace sqrtm {

namespace {
constexpr double kDivergenceLimit = 1e3;
}

GradOutput lyapunov_solve_sign(const LyapunovProblem& p, std::vector<SignIterate>* history) {
  if (p.b.dim() != p.c.dim()) throw DimensionMismatch("lyapunov: B and C dimensions differ");
  if (p.max_iters < 1) throw ValidationError("lyapunov: max_iters must be >= 1");
  if (p.tolerance < 0.0) throw ValidationError("lyapunov: tolerance must be >= 0");

  const int n = p.b.dim();
  const double norm = fro_norm(p.b);
  if (norm == 0.0) throw ValidationError("lyapunov: B is zero");
  const Matrix identity = Matrix::identity(n);

  Matrix b = p.b * (1.0 / norm);
  Matrix c = p.c * (1.0 / norm);

  GradOutput out;
  for (int k = 0; k < p.max_iters; ++k) {
    // B_{k+1} = B_k (3I - B_k^2) / 2
    // C_{k+1} = (-B_k^2 C_k + B_k C_k B_k + C_k (3I - B_k^2)) / 2
    const Matrix b2 = matmul(b, b);
    const Matrix t = 3.0 * identity - b2;
    Matrix c_next = matmul(b, matmul(c, b)) - matmul(b2, c) + matmul(c, t);
    c_next *= 0.5;
    Matrix b_next = matmul(b, t);
    b_next *= 0.5;
    b = std::move(b_next);
    c = std::move(c_next);

    out.iters_used = k + 1;
    out.residual_b = fro_norm(b - identity);
    if (history) history->push_back({b, c, out.iters_used, out.residual_b});
    if (out.residual_b > kDivergenceLimit) {
      throw Diverged("lyapunov residual " + std::to_string(out.residual_b) +
                     " (is B positive definite?)");
    }
    if (out.residual_b < p.tolerance) break;
  }
  out.grad = 0.5 * c;
  return out;
}

Matrix matrix_sign_ns(const Matrix& h, int iters) {
  if (!h.is_square()) throw DimensionMismatch("matrix_sign_ns needs a square matrix");
  if (iters < 1) throw ValidationError("matrix_sign_ns needs iters >= 1");
  const Matrix identity = Matrix::identity(h.rows());
  Matrix s = h;
  for (int k = 0; k < iters; ++k) {
    const Matrix s2 = matmul(s, s);
    if (fro_norm(s2 - identity) > kDivergenceLimit) {
      throw Diverged("sign iteration residual above " + std::to_string(kDivergenceLimit));
    }
    Matrix next = matmul(s, 3.0 * identity - s2);
    next *= 0.5;
    s = std::move(next);
  }
  return s;
}

Matrix bartels_stewart(const SymmetricMatrix& b, const Matrix& c) {
  if (b.dim() != c.rows() || !c.is_square()) {
    throw DimensionMismatch("bartels_stewart: dimensions differ");
  }
  const EigenDecomposition d = eig_sym(b);
  const int n = b.dim();
  const Matrix ut = d.eigenvectors.transposed();
  Matrix c_hat = matmul(ut, matmul(c, d.eigenvectors));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double denom =
          d.eigenvalues[static_cast<std::size_t>(i)] + d.eigenvalues[static_cast<std::size_t>(j)];
      if (denom <= 1e-14) {
        throw NonPositiveEigenvalue("eigenvalue sum " + std::to_string(denom) +
                                    " too small for the Lyapunov solve");
      }
      c_hat(i, j) /= denom;
    }
  }
  return matmul(d.eigenvectors, matmul(c_hat, ut));
}

Matrix kron_closed_form(const SymmetricMatrix& b, const Matrix& c) {
  const int n = b.dim();
  if (n > 16) {
    throw ValidationError("kron_closed_form is guarded to n <= 16, got " + std::to_string(n));
  }
  if (c.rows() != n || c.cols() != n) throw DimensionMismatch("kron_closed_form: shape mismatch");

  // (B (x) I + I (x) B) vec(X) = vec(C), with row-major vec(X)_{i*n+j} = X_ij
  Matrix sys(n * n, n * n);
  Matrix rhs(n * n, 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int row = i * n + j;
      for (int k = 0; k < n; ++k) {
        sys(row, k * n + j) += b(i, k);
        sys(row, i * n + k) += b(j, k);
      }
      rhs(row, 0) = c(i, j);
    }
  }
  const Matrix x = solve_linear(sys, rhs);
  Matrix out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out(i, j) = x(i * n + j, 0);
  }
  return out;
}

NsGradients ns_backward(const NsTrace& trace, const Matrix& grad_y, const Matrix& grad_z) {
  if (trace.iters() < 1) throw ValidationError("ns_backward needs a non-empty trace");
  const int n = trace.y.front().rows();
  if (grad_y.rows() != n || grad_y.cols() != n || grad_z.rows() != n || grad_z.cols() != n) {
    throw DimensionMismatch("ns_backward: gradient shape mismatch");
  }
  const Matrix identity = Matrix::identity(n);
  Matrix gy = grad_y;
  Matrix gz = grad_z;
  for (int k = trace.iters() - 1; k >= 0; --k) {
    const Matrix& y = trace.y[static_cast<std::size_t>(k)];
    const Matrix& z = trace.z[static_cast<std::size_t>(k)];
    // dl/dY_k = (dl/dY_{k+1} (3I - Y Z) - Z dl/dZ_{k+1} Z - Z Y dl/dY_{k+1}) / 2
    // dl/dZ_k = ((3I - Y Z) dl/dZ_{k+1} - Y dl/dY_{k+1} Y - dl/dZ_{k+1} Z Y) / 2
    const Matrix yz = matmul(y, z);
    const Matrix zy = matmul(z, y);
    const Matrix t = 3.0 * identity - yz;
    Matrix gy_next = matmul(gy, t) - matmul(matmul(z, gz), z) - matmul(zy, gy);
    gy_next *= 0.5;
    Matrix gz_next = matmul(t, gz) - matmul(matmul(y, gy), y) - matmul(gz, zy);
    gz_next *= 0.5;
    gy = std::move(gy_next);
    gz = std::move(gz_next);
  }
  return {std::move(gy), std::move(gz)};
}

Matrix ns_pre_post_grad(const SymmetricMatrix& a, const NsTrace& trace, const Matrix& grad_y0,
                        const Matrix& grad_yk, const Matrix& y_k) {
  if (trace.iters() < 1) throw ValidationError("ns_pre_post_grad needs a non-empty trace");
  const double norm = fro_norm(a);
  // dl/dA = tr(grad_yk^T Y_k) / (2 ||A||^{3/2}) A
  //       - tr(grad_y0^T A) / ||A||^3 A + grad_y0 / ||A||
  const double post_weight = trace_product(grad_yk, y_k) / (2.0 * std::pow(norm, 1.5));
  const double pre_weight = -trace_product(grad_y0, a) / (norm * norm * norm);
  // each trace-weighted accumulation counts as one multiply equivalent
  detail::count_matmul();
  detail::count_matmul();
  Matrix grad = a * (post_weight + pre_weight);
  grad += grad_y0 * (1.0 / norm);
  return grad;
}

Matrix ns_sqrt_grad(const SymmetricMatrix& a, const SqrtOutput& out, const Matrix& grad_sqrt) {
  if (!out.ns_trace) throw ValidationError("ns_sqrt_grad needs an output with a saved trace");
  const NsTrace& trace = *out.ns_trace;
  const Matrix grad_y_final = grad_sqrt * std::sqrt(out.norm);
  const Matrix zero(a.dim(), a.dim());
  const NsGradients g = ns_backward(trace, grad_y_final, zero);
  return ns_pre_post_grad(a, trace, g.grad_y0, grad_sqrt, trace.y.back());
}

LyapunovProblem invsqrt_grad_to_lyapunov(const SymmetricMatrix& a_invsqrt,
                                         const SymmetricMatrix& a_inv,
                                         const SymmetricMatrix& grad_invsqrt) {
  Matrix c = matmul(a_inv, matmul(grad_invsqrt, a_inv));
  c *= -1.0;
  LyapunovProblem p;
  p.b = a_invsqrt;
  p.c = SymmetricMatrix(c);
  return p;
}

namespace {

double probe_loss(const SymmetricMatrix& probe, const Matrix& value) {
  const double* pp = probe.data();
  const double* pv = value.data();
  const std::size_t total = static_cast<std::size_t>(value.rows()) * value.cols();
  double acc = 0.0;
  for (std::size_t i = 0; i < total; ++i) acc += pp[i] * pv[i];
  return acc;
}

}  // namespace

double finite_diff_check(const SymmetricMatrix& loss_probe, const SymmetricMatrix& a,
                         const ForwardMap& f, const Matrix& grad, double eps) {
  if (eps < 1e-7 || eps > 1e-3) throw ValidationError("finite_diff_check eps outside [1e-7, 1e-3]");
  if (loss_probe.dim() != a.dim()) throw DimensionMismatch("probe dimension mismatch");
  const int n = a.dim();

  double max_dev = 0.0;
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Matrix forward = a;
      Matrix back = a;
      forward(i, j) += eps;
      back(i, j) -= eps;
      if (i != j) {
        forward(j, i) += eps;
        back(j, i) -= eps;
      }
      const double fd = (probe_loss(loss_probe, f(SymmetricMatrix(forward))) -
                         probe_loss(loss_probe, f(SymmetricMatrix(back)))) /
                        (2.0 * eps);
      const double analytic = (i == j) ? grad(i, i) : grad(i, j) + grad(j, i);
      max_dev = std::max(max_dev, std::abs(fd - analytic));
      scale = std::max({scale, std::abs(fd), std::abs(analytic)});
    }
  }
  return max_dev / std::max(scale, 1e-12);
}

}  // namespace sqrtm
