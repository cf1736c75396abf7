#pragma once

#include <initializer_list>
#include <vector>

namespace sqrtm {

// Dense row-major matrix of 64-bit floats.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols);  // zero-filled
  Matrix(int rows, int cols, std::vector<double> values);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(int n);
  static Matrix diagonal(const std::vector<double>& entries);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  double& operator()(int i, int j) { return values_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return values_[static_cast<std::size_t>(i) * cols_ + j]; }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  Matrix transposed() const;
  double trace() const;
  double max_abs() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double scale);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(double s, Matrix m) { return m *= s; }
  friend Matrix operator*(Matrix m, double s) { return m *= s; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> values_;
};

// Largest |m(i,j) - m(j,i)| over a square matrix.
double max_asymmetry(const Matrix& m);

// Square matrix kept symmetric: construction replaces M with (M + M^T)/2.
class SymmetricMatrix : public Matrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(int n) : Matrix(n, n) {}
  explicit SymmetricMatrix(const Matrix& m);  // throws DimensionMismatch if not square
  SymmetricMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static SymmetricMatrix identity(int n);
  static SymmetricMatrix diagonal(const std::vector<double>& entries);

  int dim() const { return rows(); }
};

// Same-dimension symmetric matrices processed together.
class MatrixBatch {
 public:
  explicit MatrixBatch(std::vector<SymmetricMatrix> items);  // count >= 1, shared dim

  int count() const { return static_cast<int>(items_.size()); }
  int dim() const { return items_.front().dim(); }

  const SymmetricMatrix& operator[](int i) const { return items_[static_cast<std::size_t>(i)]; }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

 private:
  std::vector<SymmetricMatrix> items_;
};

}  // namespace sqrtm
