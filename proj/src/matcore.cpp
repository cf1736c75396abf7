#include "sqrtm/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "sqrtm/errors.hpp"

namespace sqrtm {

namespace {
thread_local OpCounter* t_active_counter = nullptr;
constexpr double kPivotThreshold = 1e-14;
}  // namespace

CountScope::CountScope(OpCounter& target) : previous_(t_active_counter) {
  t_active_counter = &target;
}

CountScope::~CountScope() { t_active_counter = previous_; }

CountSuspend::CountSuspend() : previous_(t_active_counter) { t_active_counter = nullptr; }

CountSuspend::~CountSuspend() { t_active_counter = previous_; }

namespace detail {
void count_matmul() {
  if (t_active_counter) ++t_active_counter->matmuls;
}
void count_solve() {
  if (t_active_counter) ++t_active_counter->solves;
}
void count_trace_product() {
  if (t_active_counter) ++t_active_counter->trace_products;
}
}  // namespace detail

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionMismatch("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                            " * " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  const int m = a.rows(), k = a.cols(), n = b.cols();
  Matrix c(m, n);
  const double* pa = a.data();
  const double* pb = b.data();
  double* pc = c.data();
  for (int i = 0; i < m; ++i) {
    for (int l = 0; l < k; ++l) {
      const double ail = pa[static_cast<std::size_t>(i) * k + l];
      const double* brow = pb + static_cast<std::size_t>(l) * n;
      double* crow = pc + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) crow[j] += ail * brow[j];
    }
  }
  detail::count_matmul();
  return c;
}

namespace detail {

LuSolver::LuSolver(Matrix q) : lu_(std::move(q)) {
  if (!lu_.is_square()) throw DimensionMismatch("LU factorization needs a square matrix");
  const int n = lu_.rows();
  perm_.resize(static_cast<std::size_t>(n));
  std::iota(perm_.begin(), perm_.end(), 0);
  Matrix& m = lu_;
  for (int col = 0; col < n; ++col) {
    int pivot_row = col;
    double pivot_mag = std::abs(m(col, col));
    for (int r = col + 1; r < n; ++r) {
      const double mag = std::abs(m(r, col));
      if (mag > pivot_mag) {
        pivot_mag = mag;
        pivot_row = r;
      }
    }
    if (!(pivot_mag > kPivotThreshold)) {
      throw SingularMatrix("pivot " + std::to_string(pivot_mag) + " at column " +
                           std::to_string(col));
    }
    if (pivot_row != col) {
      for (int j = 0; j < n; ++j) std::swap(m(col, j), m(pivot_row, j));
      std::swap(perm_[static_cast<std::size_t>(col)], perm_[static_cast<std::size_t>(pivot_row)]);
    }
    const double inv_pivot = 1.0 / m(col, col);
    for (int r = col + 1; r < n; ++r) {
      const double factor = m(r, col) * inv_pivot;
      m(r, col) = factor;
      if (factor == 0.0) continue;
      for (int j = col + 1; j < n; ++j) m(r, j) -= factor * m(col, j);
    }
  }
}

Matrix LuSolver::solve(const Matrix& rhs) const {
  const int n = lu_.rows();
  if (rhs.rows() != n) throw DimensionMismatch("LU solve: rhs row count mismatch");
  const int m = rhs.cols();
  Matrix x(n, m);
  // permuted rhs, then forward substitution with unit L
  for (int i = 0; i < n; ++i) {
    const int src = perm_[static_cast<std::size_t>(i)];
    for (int j = 0; j < m; ++j) x(i, j) = rhs(src, j);
    for (int l = 0; l < i; ++l) {
      const double factor = lu_(i, l);
      if (factor == 0.0) continue;
      for (int j = 0; j < m; ++j) x(i, j) -= factor * x(l, j);
    }
  }
  // back substitution with U
  for (int i = n - 1; i >= 0; --i) {
    for (int l = i + 1; l < n; ++l) {
      const double factor = lu_(i, l);
      if (factor == 0.0) continue;
      for (int j = 0; j < m; ++j) x(i, j) -= factor * x(l, j);
    }
    const double inv_pivot = 1.0 / lu_(i, i);
    for (int j = 0; j < m; ++j) x(i, j) *= inv_pivot;
  }
  return x;
}

}  // namespace detail

Matrix solve_linear(const Matrix& q, const Matrix& rhs) {
  if (!q.is_square()) throw DimensionMismatch("solve_linear: coefficient matrix must be square");
  if (q.rows() != rhs.rows()) throw DimensionMismatch("solve_linear: rhs row count mismatch");
  Matrix s = detail::LuSolver(q).solve(rhs);
  detail::count_solve();
  return s;
}

double trace_product(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("trace_product shape mismatch");
  }
  const double* pa = a.data();
  const double* pb = b.data();
  const std::size_t total = static_cast<std::size_t>(a.rows()) * a.cols();
  double acc = 0.0;
  for (std::size_t i = 0; i < total; ++i) acc += pa[i] * pb[i];
  detail::count_trace_product();
  return acc;
}

double fro_norm(const Matrix& a) {
  const double* p = a.data();
  const std::size_t total = static_cast<std::size_t>(a.rows()) * a.cols();
  double acc = 0.0;
  for (std::size_t i = 0; i < total; ++i) acc += p[i] * p[i];
  return std::sqrt(acc);
}

namespace {

double off_diag_norm(const Matrix& m) {
  double acc = 0.0;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (i != j) acc += m(i, j) * m(i, j);
    }
  }
  return std::sqrt(acc);
}

}  // namespace

EigenDecomposition eig_sym(const SymmetricMatrix& a) {
  const int n = a.dim();
  Matrix w = a;
  Matrix vt = Matrix::identity(n);  // accumulated rotations, rows are eigenvectors
  const double stop = 1e-12 * fro_norm(a);

  constexpr int kMaxSweeps = 100;
  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diag_norm(w) <= stop) {
      converged = true;
      break;
    }
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = w(p, q);
        if (apq == 0.0) continue;
        const double theta = (w(q, q) - w(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double app = w(p, p), aqq = w(q, q);
        // rotate rows p and q (contiguous), then mirror into the columns
        double* wp = w.data() + static_cast<std::size_t>(p) * n;
        double* wq = w.data() + static_cast<std::size_t>(q) * n;
        for (int i = 0; i < n; ++i) {
          const double vp = wp[i], vq = wq[i];
          wp[i] = c * vp - s * vq;
          wq[i] = s * vp + c * vq;
        }
        wp[p] = app - t * apq;
        wq[q] = aqq + t * apq;
        wp[q] = 0.0;
        wq[p] = 0.0;
        for (int i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          w(i, p) = wp[i];
          w(i, q) = wq[i];
        }
        double* up = vt.data() + static_cast<std::size_t>(p) * n;
        double* uq = vt.data() + static_cast<std::size_t>(q) * n;
        for (int i = 0; i < n; ++i) {
          const double vp = up[i], vq = uq[i];
          up[i] = c * vp - s * vq;
          uq[i] = s * vp + c * vq;
        }
      }
    }
  }
  if (!converged && off_diag_norm(w) > stop) {
    throw NonConvergence("Jacobi sweep limit reached, off-diagonal mass " +
                         std::to_string(off_diag_norm(w)));
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return w(i, i) > w(j, j); });

  EigenDecomposition d;
  d.eigenvalues.resize(static_cast<std::size_t>(n));
  d.eigenvectors = Matrix(n, n);
  for (int col = 0; col < n; ++col) {
    const int src = order[static_cast<std::size_t>(col)];
    d.eigenvalues[static_cast<std::size_t>(col)] = w(src, src);
    for (int row = 0; row < n; ++row) d.eigenvectors(row, col) = vt(src, row);
  }
  return d;
}

Matrix random_gaussian(int rows, int cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw ValidationError("random_gaussian needs positive dimensions");
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  double* p = m.data();
  const std::size_t total = static_cast<std::size_t>(rows) * cols;
  for (std::size_t i = 0; i < total; ++i) p[i] = normal(engine);
  return m;
}

SymmetricMatrix random_spd(int n, std::uint64_t seed, double eps) {
  if (n < 1) throw ValidationError("random_spd needs n >= 1");
  if (eps < 0.0) throw ValidationError("random_spd needs eps >= 0");
  const Matrix g = random_gaussian(n, n, seed);
  // G G^T filled directly so generation never touches the op counters
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += g(i, k) * g(j, k);
      a(i, j) = acc / n;
      a(j, i) = a(i, j);
    }
    a(i, i) += eps;
  }
  return SymmetricMatrix(a);
}

SymmetricMatrix random_symmetric(int n, std::uint64_t seed) {
  return SymmetricMatrix(random_gaussian(n, n, seed));
}

std::uint64_t seed_mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  // splitmix64 over the packed stream
  std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL + a * 0xbf58476d1ce4e5b9ULL +
                            b * 0x94d049bb133111ebULL);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

void write_matrix(std::ostream& out, const Matrix& m) {
  if (!m.is_square()) throw DimensionMismatch("matrix text format holds square matrices");
  out << m.rows() << "\n";
  out << std::setprecision(17);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << m(i, j);
    }
    out << "\n";
  }
}

Matrix read_matrix(std::istream& in) {
  int n = 0;
  if (!(in >> n) || n < 1) throw IoError("matrix text format: bad dimension line");
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!(in >> m(i, j))) {
        throw IoError("matrix text format: expected " + std::to_string(n * n) + " values");
      }
    }
  }
  return m;
}

void write_matrix_file(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  write_matrix(out, m);
  if (!out) throw IoError("write failed: " + path);
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  return read_matrix(in);
}

}  // namespace sqrtm
