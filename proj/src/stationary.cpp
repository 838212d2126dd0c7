#include "dclife/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dclife/linalg.hpp"

namespace dclife::stationary {

double StationaryDist::prob_at_least(std::size_t k) const {
  double below = 0.0;
  const std::size_t stop = std::min(k, probs.size());
  for (std::size_t j = 0; j < stop; ++j) below += probs[j];
  return std::max(0.0, 1.0 - below);
}

StationaryDist poisson_stationary(const ModelParams& params, double tol) {
  if (!(tol > 0.0 && tol < 1.0)) {
    throw Error("poisson_stationary: tol must lie in (0, 1)");
  }
  const double rho = params.beta / params.lambda;
  if (rho > 700.0) {
    // exp(-rho) underflows double precision; the recurrence cannot start.
    throw Error("poisson_stationary: beta/lambda too large for double precision");
  }

  StationaryDist dist;
  dist.tol = tol;
  double p = std::exp(-rho);
  double cumulative = p;
  dist.probs.push_back(p);

  const std::size_t hard_cap =
      static_cast<std::size_t>(rho + 40.0 * std::sqrt(rho + 1.0) + 400.0);
  std::size_t k = 0;
  while (1.0 - cumulative >= tol && k < hard_cap) {
    p *= rho / static_cast<double>(k + 1);
    cumulative += p;
    dist.probs.push_back(p);
    ++k;
  }
  if (1.0 - cumulative >= tol) {
    throw Error("poisson_stationary: truncation cap reached before tol");
  }
  dist.tail_mass = std::max(0.0, 1.0 - cumulative);
  return dist;
}

StationaryDist stationary_by_solve(const ModelParams& params,
                                   std::size_t level) {
  if (level < 1) {
    throw Error("stationary_by_solve: level must be >= 1");
  }
  const std::size_t n = level + 1;
  const double lambda = params.lambda;
  const double beta = params.beta;

  // Generator of the truncated chain, reflected at the top: birth beta from
  // every level except `level`, death k*lambda from level k.
  linalg::DenseMatrix q(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    double out = 0.0;
    if (k + 1 < n) {
      q(k, k + 1) = beta;
      out += beta;
    }
    if (k > 0) {
      const double death = static_cast<double>(k) * lambda;
      q(k, k - 1) = death;
      out += death;
    }
    q(k, k) = -out;
  }

  // theta Q = 0 with theta e = 1: transpose, then replace the last equation
  // by the normalization constraint.
  linalg::DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = q(j, i);
  for (std::size_t j = 0; j < n; ++j) m(n - 1, j) = 1.0;
  std::vector<double> rhs(n, 0.0);
  rhs[n - 1] = 1.0;

  StationaryDist dist;
  try {
    dist.probs = linalg::solve(m, rhs);
  } catch (const linalg::SingularMatrix& e) {
    throw SingularSystem(std::string("stationary_by_solve: ") + e.what());
  }
  dist.tail_mass = 0.0;
  dist.tol = std::numeric_limits<double>::min();
  return dist;
}

double prob_no_available_center(const ModelParams& params) {
  return std::exp(-params.beta / params.lambda);
}

}  // namespace dclife::stationary
