#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dclife/error.hpp"
#include "dclife/linalg.hpp"
#include "dclife/model.hpp"
#include "dclife/stationary.hpp"

namespace dclife::approx_ph {

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class SingularSubgenerator : public Error {
 public:
  using Error::Error;
};

// Effective copy rates mu_1..mu_{d-1}: the nominal rate k*mu discounted by
// the stationary probability that a free center exists, P{N >= k+1}.
// rates[k-1] holds mu_k; empty when d == 1.
struct CorrectedRates {
  std::vector<double> rates;
};

// Absorbing birth-death chain over copy counts 1..d: initial vector,
// sub-generator over the transient states, exit-rate vector, and the mass
// placed directly on absorption.
struct PhRepresentation {
  std::vector<double> initial;     // gamma-tilde, length d
  linalg::DenseMatrix subgen;      // S, d x d
  std::vector<double> exit;        // S0 = (lambda, 0, ..., 0)
  double absorb_mass = 0.0;        // gamma_0
};

CorrectedRates corrected_rates(const ModelParams& params,
                               const stationary::StationaryDist& stat);

// Builds (gamma-tilde, S, S0) for copy counts 1..d: up-rate mu_k out of
// state k for k < d, down-rate k*lambda, absorption only from state 1.
PhRepresentation build_absorbing_generator(const ModelParams& params,
                                           const CorrectedRates& rates,
                                           std::span<const double> initial);

// k-th raw moment of the absorption time, via k successive linear solves
// against S. S^{-k} is never formed.
double ph_moment(const PhRepresentation& rep, int k);

// The inverse of S assembled entry by entry from its closed form. The first
// column is -1/lambda identically. Cross-check artifact only; the moment
// path always goes through numeric solves.
linalg::DenseMatrix closed_form_s_inverse(const ModelParams& params,
                                          const CorrectedRates& rates);

// End-to-end pipeline: stationary law -> corrected rates -> absorbing chain
// -> moments. Empty `initial` selects the one-copy start (1, 0, ..., 0).
LifetimeReport mean_lifetime_approx(const ModelParams& params,
                                    std::span<const double> initial = {},
                                    int moment_count = 2);

}  // namespace dclife::approx_ph
