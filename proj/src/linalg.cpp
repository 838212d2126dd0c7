#include "dclife/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace dclife::linalg {

namespace {

constexpr double kPivotFloor = 1e-300;

void require(bool ok, const char* msg) {
  if (!ok) throw DimensionMismatch(msg);
}

}  // namespace

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_,
          "matrix addition requires equal shapes");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
  return *this;
}

DenseMatrix& DenseMatrix::negate() {
  for (double& v : a_) v = -v;
  return *this;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(a_.begin(), a_.end(),
                     [](double v) { return std::isfinite(v); });
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "matrix product shape mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) {
        c(i, j) += aik * b(k, j);
      }
    }
  }
  return c;
}

std::vector<double> multiply(const DenseMatrix& a,
                             const std::vector<double>& x) {
  require(a.cols() == x.size(), "matrix-vector shape mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * x[j];
    y[i] = acc;
  }
  return y;
}

DenseMatrix solve(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == a.cols(), "solve requires a square matrix");
  require(a.rows() == b.rows(), "solve right-hand side shape mismatch");
  if (!a.all_finite() || !b.all_finite()) {
    throw Error("solve: non-finite input");
  }

  const std::size_t n = a.rows();
  DenseMatrix lu = a;
  DenseMatrix x = b;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(lu(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(lu(r, col));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best < kPivotFloor) {
      throw SingularMatrix("solve: pivot below threshold");
    }
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(col, j), lu(pivot, j));
      for (std::size_t j = 0; j < x.cols(); ++j)
        std::swap(x(col, j), x(pivot, j));
    }
    const double inv_p = 1.0 / lu(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = lu(r, col) * inv_p;
      if (f == 0.0) continue;
      lu(r, col) = 0.0;
      for (std::size_t j = col + 1; j < n; ++j) lu(r, j) -= f * lu(col, j);
      for (std::size_t j = 0; j < x.cols(); ++j) x(r, j) -= f * x(col, j);
    }
  }

  for (std::size_t ri = n; ri-- > 0;) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double acc = x(ri, j);
      for (std::size_t k = ri + 1; k < n; ++k) acc -= lu(ri, k) * x(k, j);
      x(ri, j) = acc / lu(ri, ri);
    }
  }
  return x;
}

std::vector<double> solve(const DenseMatrix& a, const std::vector<double>& b) {
  DenseMatrix rhs(b.size(), 1);
  for (std::size_t i = 0; i < b.size(); ++i) rhs(i, 0) = b[i];
  DenseMatrix x = solve(a, rhs);
  std::vector<double> out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = x(i, 0);
  return out;
}

DenseMatrix invert(const DenseMatrix& a) {
  require(a.rows() == a.cols(), "invert requires a square matrix");
  return solve(a, DenseMatrix::identity(a.rows()));
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "max_abs_diff shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      m = std::max(m, std::abs(a(i, j)));
  return m;
}

}  // namespace dclife::linalg
