#include "sqrtm/matrix.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "sqrtm/errors.hpp"

namespace sqrtm {

Matrix::Matrix(int rows, int cols)
    : rows_(rows), cols_(cols), values_(static_cast<std::size_t>(rows) * cols, 0.0) {
  if (rows < 0 || cols < 0 || (rows == 0) != (cols == 0)) {
    throw ValidationError("matrix dimensions must be positive");
  }
}

Matrix::Matrix(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(rows) * cols) {
    throw DimensionMismatch("value count does not match " + std::to_string(rows) + "x" +
                            std::to_string(cols));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = static_cast<int>(rows.size());
  cols_ = rows_ == 0 ? 0 : static_cast<int>(rows.begin()->size());
  values_.reserve(static_cast<std::size_t>(rows_) * cols_);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != cols_) {
      throw DimensionMismatch("ragged initializer rows");
    }
    values_.insert(values_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(const std::vector<double>& entries) {
  const int n = static_cast<int>(entries.size());
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = entries[static_cast<std::size_t>(i)];
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

double Matrix::trace() const {
  if (!is_square()) throw DimensionMismatch("trace of non-square matrix");
  double t = 0.0;
  for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

namespace {
void require_same_shape(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("shape mismatch: " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()));
  }
}
}  // namespace

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other);
  const double* src = other.data();
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += src[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other);
  const double* src = other.data();
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= src[i];
  return *this;
}

Matrix& Matrix::operator*=(double scale) {
  for (double& v : values_) v *= scale;
  return *this;
}

double max_asymmetry(const Matrix& m) {
  if (!m.is_square()) throw DimensionMismatch("asymmetry of non-square matrix");
  double worst = 0.0;
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = i + 1; j < m.cols(); ++j) {
      worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
    }
  }
  return worst;
}

SymmetricMatrix::SymmetricMatrix(const Matrix& m) : Matrix(m) {
  if (!m.is_square()) throw DimensionMismatch("symmetric matrix must be square");
  for (int i = 0; i < rows(); ++i) {
    for (int j = i + 1; j < cols(); ++j) {
      const double avg = 0.5 * ((*this)(i, j) + (*this)(j, i));
      (*this)(i, j) = avg;
      (*this)(j, i) = avg;
    }
  }
}

SymmetricMatrix::SymmetricMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : SymmetricMatrix(Matrix(rows)) {}

SymmetricMatrix SymmetricMatrix::identity(int n) { return SymmetricMatrix(Matrix::identity(n)); }

SymmetricMatrix SymmetricMatrix::diagonal(const std::vector<double>& entries) {
  return SymmetricMatrix(Matrix::diagonal(entries));
}

MatrixBatch::MatrixBatch(std::vector<SymmetricMatrix> items) : items_(std::move(items)) {
  if (items_.empty()) throw ValidationError("batch must hold at least one matrix");
  const int d = items_.front().dim();
  for (const auto& m : items_) {
    if (m.dim() != d) throw DimensionMismatch("batch items must share one dimension");
  }
}

}  // namespace sqrtm
