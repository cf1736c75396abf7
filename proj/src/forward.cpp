#include "sqrtm/forward.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "sqrtm/errors.hpp"
#include "sqrtm/pade.hpp"

namespace sqrtm {

std::string method_name(Method m) {
  switch (m) {
    case Method::kMtp: return "MTP";
    case Method::kMpa: return "MPA";
    case Method::kNsCoupled: return "NS_COUPLED";
    case Method::kNsSingle: return "NS_SINGLE";
    case Method::kExact: return "EXACT";
  }
  throw ValidationError("unknown method tag");
}

Method parse_method(const std::string& name) {
  if (name == "MTP") return Method::kMtp;
  if (name == "MPA") return Method::kMpa;
  if (name == "NS" || name == "NS_COUPLED") return Method::kNsCoupled;
  if (name == "NS_SINGLE") return Method::kNsSingle;
  if (name == "EXACT") return Method::kExact;
  throw ValidationError("unknown method: " + name);
}

namespace {

double input_norm(const SymmetricMatrix& a) {
  const double norm = fro_norm(a);
  if (norm == 0.0) throw ValidationError("zero matrix has no SPD square root");
  return norm;
}

Matrix normalized_residue(const SymmetricMatrix& a, double norm) {
  // Z = I - A / ||A||_F
  Matrix z = Matrix::identity(a.dim());
  z -= a * (1.0 / norm);
  return z;
}

}  // namespace

SqrtOutput mtp_sqrt(const SymmetricMatrix& a, int k_degree) {
  if (k_degree < 1) throw ValidationError("mtp_sqrt needs K >= 1");
  const double norm = input_norm(a);
  const Matrix z = normalized_residue(a, norm);
  const TaylorCoefficients coeff = taylor_coefficients(k_degree);

  Matrix acc = Matrix::identity(a.dim());
  Matrix power = z;
  acc -= coeff.values[0] * power;
  for (int k = 2; k <= k_degree; ++k) {
    power = matmul(power, z);
    acc -= coeff.values[static_cast<std::size_t>(k - 1)] * power;
  }
  acc *= std::sqrt(norm);
  return {SymmetricMatrix(acc), norm, Method::kMtp, k_degree, std::nullopt};
}

namespace {

struct MpaPolynomials {
  Matrix p;  // P_M
  Matrix q;  // Q_N
  double norm = 0.0;
};

// Builds P_M and Q_N from shared powers of Z; max(M, N) - 1 multiplies.
MpaPolynomials mpa_polynomials(const SymmetricMatrix& a, int m, int n) {
  if (m < 0 || n < 0 || m + n < 1) throw ValidationError("mpa degrees must satisfy M+N >= 1");
  const PadeCoefficients& coeff = pade_coefficients(m, n);
  MpaPolynomials out{Matrix::identity(a.dim()), Matrix::identity(a.dim()), input_norm(a)};
  const Matrix z = normalized_residue(a, out.norm);
  Matrix power = z;
  for (int k = 1; k <= std::max(m, n); ++k) {
    if (k > 1) power = matmul(power, z);
    if (k <= m) out.p -= coeff.p[static_cast<std::size_t>(k - 1)] * power;
    if (k <= n) out.q -= coeff.q[static_cast<std::size_t>(k - 1)] * power;
  }
  return out;
}

std::string spectrum_string(const SymmetricMatrix& a) {
  std::ostringstream s;
  try {
    const EigenDecomposition d = eig_sym(a);
    for (std::size_t i = 0; i < d.eigenvalues.size(); ++i) {
      if (i) s << ", ";
      s << d.eigenvalues[i];
    }
  } catch (const Error&) {
    s << "unavailable";
  }
  return s.str();
}

}  // namespace

SqrtOutput mpa_sqrt(const SymmetricMatrix& a, int m, int n) {
  MpaPolynomials poly = mpa_polynomials(a, m, n);
  poly.p *= std::sqrt(poly.norm);
  try {
    const Matrix root = solve_linear(poly.q, poly.p);
    return {SymmetricMatrix(root), poly.norm, Method::kMpa, std::max(m, n), std::nullopt};
  } catch (const SingularMatrix&) {
    throw PoleDetected("Q_N singular; input spectrum: " + spectrum_string(a));
  }
}

SqrtOutput mpa_invsqrt(const SymmetricMatrix& a, int m, int n) {
  const MpaPolynomials poly = mpa_polynomials(a, m, n);
  try {
    Matrix root = solve_linear(poly.p, poly.q);
    root *= 1.0 / std::sqrt(poly.norm);
    return {SymmetricMatrix(root), poly.norm, Method::kMpa, std::max(m, n), std::nullopt};
  } catch (const SingularMatrix&) {
    throw PoleDetected("P_M singular; input spectrum: " + spectrum_string(a));
  }
}

namespace {

struct NsState {
  Matrix y;
  Matrix z;
  NsTrace trace;
  double norm = 0.0;
};

// Y_{k+1} = Y_k (3I - Z_k Y_k) / 2,  Z_{k+1} = (3I - Z_k Y_k) Z_k / 2,
// from Y_0 = A/||A||_F, Z_0 = I. Three multiplies per iteration.
NsState ns_iterate(const SymmetricMatrix& a, int iters, bool keep_trace) {
  if (iters < 1) throw ValidationError("newton-schulz needs iters >= 1");
  NsState st;
  st.norm = input_norm(a);
  st.y = a * (1.0 / st.norm);
  st.z = Matrix::identity(a.dim());
  const Matrix three_i = 3.0 * Matrix::identity(a.dim());
  if (keep_trace) {
    st.trace.y.push_back(st.y);
    st.trace.z.push_back(st.z);
  }
  for (int k = 0; k < iters; ++k) {
    const Matrix t = three_i - matmul(st.z, st.y);
    Matrix y_next = matmul(st.y, t);
    y_next *= 0.5;
    Matrix z_next = matmul(t, st.z);
    z_next *= 0.5;
    st.y = std::move(y_next);
    st.z = std::move(z_next);
    if (keep_trace) {
      st.trace.y.push_back(st.y);
      st.trace.z.push_back(st.z);
    }
  }
  return st;
}

}  // namespace

SqrtOutput ns_sqrt_coupled(const SymmetricMatrix& a, int iters, bool keep_trace) {
  NsState st = ns_iterate(a, iters, keep_trace);
  const Matrix root = st.y * std::sqrt(st.norm);
  SqrtOutput out{SymmetricMatrix(root), st.norm, Method::kNsCoupled, iters, std::nullopt};
  if (keep_trace) out.ns_trace = std::move(st.trace);
  return out;
}

SqrtOutput ns_invsqrt_coupled(const SymmetricMatrix& a, int iters, bool keep_trace) {
  NsState st = ns_iterate(a, iters, keep_trace);
  const Matrix root = st.z * (1.0 / std::sqrt(st.norm));
  SqrtOutput out{SymmetricMatrix(root), st.norm, Method::kNsCoupled, iters, std::nullopt};
  if (keep_trace) out.ns_trace = std::move(st.trace);
  return out;
}

SqrtOutput ns_invsqrt_single(const SymmetricMatrix& a, int iters) {
  if (iters < 1) throw ValidationError("newton-schulz needs iters >= 1");
  const double norm = input_norm(a);
  const Matrix a_normalized = a * (1.0 / norm);
  Matrix z = Matrix::identity(a.dim());
  // Z_{k+1} = (3 Z_k - Z_k^3 A) / 2
  for (int k = 0; k < iters; ++k) {
    const Matrix z2 = matmul(z, z);
    const Matrix z3 = matmul(z2, z);
    Matrix next = 3.0 * z;
    next -= matmul(z3, a_normalized);
    next *= 0.5;
    z = std::move(next);
  }
  z *= 1.0 / std::sqrt(norm);
  return {SymmetricMatrix(z), norm, Method::kNsSingle, iters, std::nullopt};
}

namespace {

SqrtOutput exact_from_eig(const SymmetricMatrix& a, bool inverse) {
  const double norm = fro_norm(a);
  const EigenDecomposition d = eig_sym(a);
  const int n = a.dim();
  Matrix scaled = d.eigenvectors;  // columns become U * diag(lambda^{+-1/2})
  for (int j = 0; j < n; ++j) {
    const double lambda = d.eigenvalues[static_cast<std::size_t>(j)];
    double factor;
    if (inverse) {
      if (lambda <= 1e-12) {
        throw NonPositiveEigenvalue("eigenvalue " + std::to_string(lambda) +
                                    " too small for inverse square root");
      }
      factor = 1.0 / std::sqrt(lambda);
    } else {
      factor = std::sqrt(std::max(lambda, 0.0));
    }
    for (int i = 0; i < n; ++i) scaled(i, j) *= factor;
  }
  const Matrix root = matmul(scaled, d.eigenvectors.transposed());
  return {SymmetricMatrix(root), norm, Method::kExact, 0, std::nullopt};
}

}  // namespace

SqrtOutput exact_sqrt_eig(const SymmetricMatrix& a) { return exact_from_eig(a, false); }

SqrtOutput exact_invsqrt_eig(const SymmetricMatrix& a) { return exact_from_eig(a, true); }

int diagonal_degree_for(int k_degree) {
  if (k_degree < 3 || k_degree % 2 == 0) {
    throw ValidationError("diagonal degrees need an odd power-series budget K >= 3, got " +
                          std::to_string(k_degree));
  }
  return (k_degree - 1) / 2;
}

double mae(const Matrix& approx, const Matrix& exact) {
  if (approx.rows() != exact.rows() || approx.cols() != exact.cols()) {
    throw DimensionMismatch("mae shape mismatch");
  }
  const double* pa = approx.data();
  const double* pe = exact.data();
  const std::size_t total = static_cast<std::size_t>(approx.rows()) * approx.cols();
  double acc = 0.0;
  for (std::size_t i = 0; i < total; ++i) acc += std::abs(pa[i] - pe[i]);
  return acc / static_cast<double>(total);
}

double mae(const MatrixBatch& approx, const MatrixBatch& exact) {
  if (approx.count() != exact.count() || approx.dim() != exact.dim()) {
    throw DimensionMismatch("mae batch mismatch");
  }
  double acc = 0.0;
  for (int i = 0; i < approx.count(); ++i) acc += mae(approx[i], exact[i]);
  return acc / approx.count();
}

}  // namespace sqrtm
