#pragma once

#include <cstddef>
#include <vector>

namespace kising {

/// Dense row-major matrix of doubles. Sized for this project's needs
/// (N x N couplings with N ~ 20, master-equation generators up to 4096).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  Matrix transposed() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);

/// Max-abs entry of a - b; matrices must have equal shape.
double max_abs_diff(const Matrix& a, const Matrix& b);

double norm1(const Matrix& a);

/// LU decomposition with partial pivoting.
class LuDecomposition {
 public:
  /// Throws std::domain_error if the matrix is exactly singular.
  explicit LuDecomposition(Matrix a);

  std::vector<double> solve(const std::vector<double>& b) const;
  Matrix solve(const Matrix& b) const;  // A X = B
  Matrix inverse() const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
};

/// Inverse plus the exact 1-norm condition number ||A||_1 ||A^-1||_1.
Matrix inverse_with_condition(const Matrix& a, double& condition);

}  // namespace kising
