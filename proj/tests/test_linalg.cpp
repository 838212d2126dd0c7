#include <doctest.h>

#include <cmath>
#include <random>

#include "dclife/linalg.hpp"

using dclife::linalg::DenseMatrix;
using dclife::linalg::DimensionMismatch;
using dclife::linalg::invert;
using dclife::linalg::max_abs_diff;
using dclife::linalg::multiply;
using dclife::linalg::SingularMatrix;
using dclife::linalg::solve;

namespace {

DenseMatrix random_diag_dominant(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      a(i, j) = unif(rng);
      row_sum += std::abs(a(i, j));
    }
    a(i, i) = row_sum + 1.0 + std::abs(unif(rng));
  }
  return a;
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("identity solve returns the right-hand side") {
  DenseMatrix b(3, 2);
  double v = 1.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 2; ++j) b(i, j) = v++;
  const DenseMatrix x = solve(DenseMatrix::identity(3), b);
  CHECK(max_abs_diff(x, b) == 0.0);
}

TEST_CASE("diagonal solve") {
  DenseMatrix a(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 4.0;
  const std::vector<double> x = solve(a, std::vector<double>{1.0, 1.0});
  CHECK(x[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(x[1] == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("two-state sub-generator solve reproduces the hand result") {
  // S for d = 2, lambda = 1 with the corrected copy rate out of state 1
  const double mu1 = 0.9084218055563291;
  DenseMatrix s(2, 2);
  s(0, 0) = -(1.0 + mu1);
  s(0, 1) = mu1;
  s(1, 0) = 2.0;
  s(1, 1) = -2.0;
  const std::vector<double> x = solve(s, std::vector<double>{-1.0, -1.0});
  CHECK(x[0] == doctest::Approx(1.4542109027781645).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(1.9542109027781645).epsilon(1e-12));
}

TEST_CASE("invert basics") {
  CHECK(max_abs_diff(invert(DenseMatrix::identity(4)),
                     DenseMatrix::identity(4)) == 0.0);
  DenseMatrix neg(1, 1);
  neg(0, 0) = -2.0;
  CHECK(invert(neg)(0, 0) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("solve residual stays small on random systems") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 1 + rng() % 12;
    const DenseMatrix a = random_diag_dominant(n, rng);
    DenseMatrix b(n, 2);
    double b_max = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        b(i, j) = unif(rng);
        b_max = std::max(b_max, std::abs(b(i, j)));
      }
    const DenseMatrix x = solve(a, b);
    const double residual = max_abs_diff(multiply(a, x), b);
    CHECK(residual <= 1e-9 * std::max(b_max, 1.0));
  }
}

TEST_CASE("invert of invert returns the original") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + rng() % 8;
    const DenseMatrix a = random_diag_dominant(n, rng);
    const DenseMatrix round_trip = invert(invert(a));
    CHECK(max_abs_diff(round_trip, a) <= 1e-8 * dclife::linalg::max_abs(a));
  }
}

TEST_CASE("singular and mismatched inputs are rejected") {
  DenseMatrix zero(2, 2);
  CHECK_THROWS_AS(invert(zero), SingularMatrix);

  DenseMatrix rank1(2, 2);
  rank1(0, 0) = 1.0;
  rank1(0, 1) = 2.0;
  rank1(1, 0) = 2.0;
  rank1(1, 1) = 4.0;
  CHECK_THROWS_AS(solve(rank1, std::vector<double>{1.0, 1.0}), SingularMatrix);

  DenseMatrix rect(2, 3);
  CHECK_THROWS_AS(solve(rect, std::vector<double>{1.0, 1.0}),
                  DimensionMismatch);
  CHECK_THROWS_AS(multiply(DenseMatrix(2, 2), DenseMatrix(3, 2)),
                  DimensionMismatch);
}

}  // TEST_SUITE
