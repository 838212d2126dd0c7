#include "dclife/approx_ph.hpp"

#include <cmath>
#include <numeric>

namespace dclife::approx_ph {

namespace {

constexpr double kStationaryTol = 1e-12;
constexpr double kMassSlack = 1e-9;

std::vector<double> default_initial(int d) {
  std::vector<double> gamma(static_cast<std::size_t>(d), 0.0);
  gamma[0] = 1.0;
  return gamma;
}

void check_initial(std::span<const double> initial, int d) {
  if (initial.size() != static_cast<std::size_t>(d)) {
    throw DimensionMismatch("initial vector must have length d");
  }
  double sum = 0.0;
  for (double g : initial) {
    if (g < 0.0) throw Error("initial vector entries must be nonnegative");
    sum += g;
  }
  if (sum > 1.0 + kMassSlack) {
    throw Error("initial vector mass exceeds 1");
  }
}

}  // namespace

CorrectedRates corrected_rates(const ModelParams& params,
                               const stationary::StationaryDist& stat) {
  CorrectedRates out;
  if (params.d < 2) return out;
  out.rates.reserve(static_cast<std::size_t>(params.d) - 1);
  for (int k = 1; k <= params.d - 1; ++k) {
    const double tail = stat.prob_at_least(static_cast<std::size_t>(k) + 1);
    out.rates.push_back(static_cast<double>(k) * params.mu * tail);
  }
  return out;
}

PhRepresentation build_absorbing_generator(const ModelParams& params,
                                           const CorrectedRates& rates,
                                           std::span<const double> initial) {
  const int d = params.d;
  if (rates.rates.size() != static_cast<std::size_t>(d) - 1) {
    throw DimensionMismatch("corrected rates must have length d-1");
  }
  check_initial(initial, d);

  PhRepresentation rep;
  rep.initial.assign(initial.begin(), initial.end());
  rep.absorb_mass =
      1.0 - std::accumulate(rep.initial.begin(), rep.initial.end(), 0.0);
  rep.subgen = linalg::DenseMatrix(d, d);
  rep.exit.assign(static_cast<std::size_t>(d), 0.0);
  rep.exit[0] = params.lambda;

  for (int k = 1; k <= d; ++k) {
    const std::size_t i = static_cast<std::size_t>(k) - 1;
    const double down = static_cast<double>(k) * params.lambda;
    const double up = (k < d) ? rates.rates[i] : 0.0;
    rep.subgen(i, i) = -(down + up);
    if (k < d) rep.subgen(i, i + 1) = up;
    if (k >= 2) rep.subgen(i, i - 1) = down;  // state 1 exits instead
  }
  return rep;
}

double ph_moment(const PhRepresentation& rep, int k) {
  if (k < 1) throw Error("ph_moment: k must be >= 1");
  const std::size_t d = rep.subgen.rows();
  std::vector<double> v(d, 1.0);
  try {
    for (int i = 0; i < k; ++i) v = linalg::solve(rep.subgen, v);
  } catch (const linalg::SingularMatrix& e) {
    throw SingularSubgenerator(std::string("ph_moment: ") + e.what());
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < d; ++i) dot += rep.initial[i] * v[i];
  double k_factorial = 1.0;
  for (int i = 2; i <= k; ++i) k_factorial *= i;
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return sign * k_factorial * dot;
}

linalg::DenseMatrix closed_form_s_inverse(const ModelParams& params,
                                          const CorrectedRates& rates) {
  const int d = params.d;
  if (d > 170) {
    // the entries carry k! factors; beyond 170 they overflow doubles
    throw Error("closed_form_s_inverse: supported only for d <= 170");
  }
  const double lambda = params.lambda;
  const auto mu_at = [&rates](int t) { return rates.rates[t - 1]; };

  // product of mu_t over t = a..b (1-based, empty when a > b)
  const auto mu_prod = [&](int a, int b) {
    double p = 1.0;
    for (int t = a; t <= b; ++t) p *= mu_at(t);
    return p;
  };

  linalg::DenseMatrix inv(d, d);
  for (int col = 1; col <= d; ++col) {
    double k_factorial = 1.0;
    for (int i = 2; i <= col; ++i) k_factorial *= i;
    const double denom = k_factorial * std::pow(lambda, col);
    for (int row = 1; row <= d; ++row) {
      // The numerator telescopes over the states below min(row, col):
      // sum_i i! lambda^i mu_{i+1} ... mu_{m-1}, then for starts below the
      // column the remaining up-rates mu_row ... mu_{col-1} multiply in.
      const int m = std::min(row, col);
      double num = 0.0;
      double i_factorial = 1.0;
      double lambda_pow = 1.0;
      for (int i = 0; i < m; ++i) {
        if (i >= 1) {
          i_factorial *= i;
          lambda_pow *= lambda;
        }
        num += i_factorial * lambda_pow * mu_prod(i + 1, m - 1);
      }
      if (row < col) num *= mu_prod(row, col - 1);
      inv(row - 1, col - 1) = -num / denom;
    }
  }
  return inv;
}

LifetimeReport mean_lifetime_approx(const ModelParams& params,
                                    std::span<const double> initial,
                                    int moment_count) {
  if (moment_count < 1) throw Error("moment_count must be >= 1");
  const auto stat = stationary::poisson_stationary(params, kStationaryTol);
  const auto rates = corrected_rates(params, stat);
  std::vector<double> gamma;
  if (initial.empty()) {
    gamma = default_initial(params.d);
    initial = gamma;
  }
  const auto rep = build_absorbing_generator(params, rates, initial);

  LifetimeReport report;
  report.method = Method::approx_ph;
  report.moments.reserve(static_cast<std::size_t>(moment_count));
  for (int k = 1; k <= moment_count; ++k) {
    report.moments.push_back(ph_moment(rep, k));
  }
  report.mean = report.moments[0];
  report.std_error = 0.0;
  report.meta.truncation_level = stat.truncation_level();
  report.meta.tol = kStationaryTol;
  return report;
}

}  // namespace dclife::approx_ph
