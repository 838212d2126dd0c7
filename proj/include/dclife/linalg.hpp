#pragma once

#include <cstddef>
#include <vector>

#include "dclife/error.hpp"

namespace dclife::linalg {

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Small dense row-major matrix of doubles. Sized for sub-generator blocks,
// at most a few hundred rows.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

  const std::vector<double>& data() const { return a_; }

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& negate();

  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
inline DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  return multiply(a, b);
}

std::vector<double> multiply(const DenseMatrix& a,
                             const std::vector<double>& x);

// Solves A X = B by LU factorization with partial pivoting.
DenseMatrix solve(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> solve(const DenseMatrix& a, const std::vector<double>& b);

DenseMatrix invert(const DenseMatrix& a);

// max_ij |a_ij - b_ij|
double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);
double max_abs(const DenseMatrix& a);

}  // namespace dclife::linalg
