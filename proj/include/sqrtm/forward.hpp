#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sqrtm/matcore.hpp"
#include "sqrtm/matrix.hpp"

namespace sqrtm {

enum class Method { kMtp, kMpa, kNsCoupled, kNsSingle, kExact };

// Canonical tags: MTP, MPA, NS_COUPLED, NS_SINGLE, EXACT ("NS" parses as
// NS_COUPLED).
std::string method_name(Method m);
Method parse_method(const std::string& name);

// Per-iteration Newton-Schulz iterates, y[0..T] and z[0..T]. The backward
// sweep consumes these.
struct NsTrace {
  std::vector<Matrix> y;
  std::vector<Matrix> z;
  int iters() const { return static_cast<int>(y.size()) - 1; }
};

struct SqrtOutput {
  SymmetricMatrix root;  // A^{1/2}, or A^{-1/2} for the inverse operations
  double norm = 0.0;     // ||A||_F of the input
  Method method = Method::kExact;
  int degree_or_iters = 0;
  std::optional<NsTrace> ns_trace;
};

// Truncated power series of degree K on the normalized input; K-1 multiplies.
SqrtOutput mtp_sqrt(const SymmetricMatrix& a, int k_degree);

// [M, N] rational approximant; max(M, N)-1 multiplies plus one solve.
SqrtOutput mpa_sqrt(const SymmetricMatrix& a, int m, int n);

// Inverse square root from the same polynomials, numerator and denominator
// swapped.
SqrtOutput mpa_invsqrt(const SymmetricMatrix& a, int m, int n);

// Coupled Newton-Schulz iteration; 3 multiplies per iteration. With
// keep_trace the full iterate sequence is saved for the backward sweep.
SqrtOutput ns_sqrt_coupled(const SymmetricMatrix& a, int iters, bool keep_trace = false);
SqrtOutput ns_invsqrt_coupled(const SymmetricMatrix& a, int iters, bool keep_trace = false);

// One-variable form of the same iteration (inverse root only).
SqrtOutput ns_invsqrt_single(const SymmetricMatrix& a, int iters);

// Eigendecomposition ground truth.
SqrtOutput exact_sqrt_eig(const SymmetricMatrix& a);
SqrtOutput exact_invsqrt_eig(const SymmetricMatrix& a);

// Diagonal degree M = N = (K-1)/2 for an odd power-series budget K.
int diagonal_degree_for(int k_degree);

// Mean absolute entrywise deviation.
double mae(const Matrix& approx, const Matrix& exact);
double mae(const MatrixBatch& approx, const MatrixBatch& exact);

}  // namespace sqrtm
