#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sqrtm/matrix.hpp"
#include "sqrtm/op_counter.hpp"

namespace sqrtm {

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // sorted descending
  Matrix eigenvectors;              // column i pairs with eigenvalues[i]
};

namespace detail {

// Partial-pivot LU held for repeated substitutions. solve_linear wraps this
// and counts one solve per system.
class LuSolver {
 public:
  explicit LuSolver(Matrix q);  // throws SingularMatrix on a tiny pivot
  Matrix solve(const Matrix& rhs) const;
  int dim() const { return lu_.rows(); }

 private:
  Matrix lu_;
  std::vector<int> perm_;
};

}  // namespace detail

// c = a * b. Counts one dense multiply.
Matrix matmul(const Matrix& a, const Matrix& b);

// Solves q * s = rhs by partial-pivot LU (pivot threshold 1e-14).
// rhs may have any column count. Counts one solve.
Matrix solve_linear(const Matrix& q, const Matrix& rhs);

// tr(a^T b) as an elementwise-product sum. Counts one matmul equivalent.
double trace_product(const Matrix& a, const Matrix& b);

// Cyclic Jacobi eigendecomposition with a deterministic sweep order.
// Throws NonConvergence if the off-diagonal mass fails to drop below
// 1e-12 * ||a||_F within 100 sweeps.
EigenDecomposition eig_sym(const SymmetricMatrix& a);

double fro_norm(const Matrix& a);

// G G^T / n + eps I with G an n x n matrix of i.i.d. standard normals drawn
// from a generator seeded by `seed`. Deterministic: same arguments, same bits.
SymmetricMatrix random_spd(int n, std::uint64_t seed, double eps = 1e-3);

// Plumbing generators used by tests and the bench harness.
Matrix random_gaussian(int rows, int cols, std::uint64_t seed);
SymmetricMatrix random_symmetric(int n, std::uint64_t seed);

// Deterministic stream splitting for per-cell / per-trial seeds.
std::uint64_t seed_mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// Text format: first line n, then n lines of n space-separated values.
void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);
void write_matrix_file(const std::string& path, const Matrix& m);
Matrix read_matrix_file(const std::string& path);

}  // namespace sqrtm
