#pragma once

#include <cstddef>
#include <vector>

#include "dclife/error.hpp"
#include "dclife/model.hpp"

namespace dclife::stationary {

class SingularSystem : public Error {
 public:
  using Error::Error;
};

// Stationary distribution of the available-center count, truncated at
// level L = probs.size() - 1. sum(probs) + tail_mass == 1 up to rounding.
struct StationaryDist {
  std::vector<double> probs;
  double tail_mass = 0.0;
  double tol = 0.0;  // tolerance the distribution was built with

  std::size_t truncation_level() const { return probs.size() - 1; }

  // P{N >= k}, taken from the truncated vector; for k beyond the truncation
  // this is the recorded tail mass rather than a sum of dropped terms.
  double prob_at_least(std::size_t k) const;
};

// Poisson(beta/lambda) law of the center count, truncated at the smallest
// level whose tail mass is below tol. Probabilities follow the
// multiplicative recurrence p_{k+1} = p_k * rho / (k+1); factorials are
// never formed.
StationaryDist poisson_stationary(const ModelParams& params, double tol);

// Solves the stationary equations of the generator truncated at `level`
// with the birth rate out of the top level removed, so the truncated
// generator stays conservative. Exists as a cross-check for the closed
// form and as the template for the block solver.
StationaryDist stationary_by_solve(const ModelParams& params,
                                   std::size_t level);

// P{no center is available} = exp(-beta/lambda).
double prob_no_available_center(const ModelParams& params);

}  // namespace dclife::stationary
