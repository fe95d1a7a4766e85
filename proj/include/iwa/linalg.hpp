#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "iwa/error.hpp"

namespace iwa {

using Vector = std::vector<double>;

// Dense row-major matrix. Sized for normal-equation systems (a handful of
// predictors), so no blocking or expression templates.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
      : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    if (data_.size() != rows_ * cols_) {
      throw Error(ErrorKind::Shape, "matrix data length " + std::to_string(data_.size()) +
                                        " does not match " + std::to_string(rows_) + "x" +
                                        std::to_string(cols_));
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorKind::Shape, "matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                                      " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t m = 0; m < a.cols(); ++m) {
      const double aim = a(i, m);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aim * b(m, j);
    }
  }
  return out;
}

inline Vector matvec(const Matrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) {
    throw Error(ErrorKind::Shape, "matvec: matrix has " + std::to_string(a.cols()) + " columns, vector has " +
                                      std::to_string(x.size()) + " entries");
  }
  Vector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    out[i] = acc;
  }
  return out;
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Largest absolute row sum (infinity norm).
inline double max_row_norm(const Matrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (double x : a.row(i)) s += std::abs(x);
    best = std::max(best, s);
  }
  return best;
}

/// Solves a·x = rhs by Gaussian elimination with partial (row) pivoting.
///
/// A pivot whose magnitude falls below 1e-12 times the largest row norm of
/// `a` is treated as zero; SingularSystemError then reports the column being
/// eliminated, which is the first column linearly dependent on its
/// predecessors.
inline Vector solve_linear_system(Matrix a, Vector rhs) {
  const std::size_t n = a.rows();
  if (n == 0 || a.cols() != n) {
    throw Error(ErrorKind::Shape, "solve_linear_system: matrix must be square and non-empty");
  }
  if (rhs.size() != n) {
    throw Error(ErrorKind::Shape, "solve_linear_system: rhs length " + std::to_string(rhs.size()) +
                                      " does not match order " + std::to_string(n));
  }
  for (double x : a.data()) {
    if (!std::isfinite(x)) throw Error(ErrorKind::Domain, "solve_linear_system: non-finite matrix entry");
  }

  const double tolerance = 1e-12 * max_row_norm(a);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t i = col + 1; i < n; ++i) {
      if (std::abs(a(i, col)) > std::abs(a(pivot, col))) pivot = i;
    }
    if (!(std::abs(a(pivot, col)) >= tolerance) || a(pivot, col) == 0.0) throw SingularSystemError(col);
    if (pivot != col) {
      std::swap_ranges(a.row(col).begin(), a.row(col).end(), a.row(pivot).begin());
      std::swap(rhs[col], rhs[pivot]);
    }
    for (std::size_t i = col + 1; i < n; ++i) {
      const double factor = a(i, col) / a(col, col);
      if (factor == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a(i, j) -= factor * a(col, j);
      rhs[i] -= factor * rhs[col];
    }
  }

  Vector x(n, 0.0);
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = rhs[ii];
    for (std::size_t j = ii + 1; j < n; ++j) acc -= a(ii, j) * x[j];
    x[ii] = acc / a(ii, ii);
  }
  return x;
}

}  // namespace iwa
