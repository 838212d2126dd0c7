#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dclife/error.hpp"

namespace dclife {

// Parameters of the replicated-file model. Centers fail independently at
// rate `lambda`, new centers arrive at rate `beta`, each missing copy is
// re-replicated at per-copy rate `mu`, and a file keeps at most `d` copies.
struct ModelParams {
  double lambda = 1.0;
  double beta = 0.0;
  double mu = 0.0;
  int d = 1;

  bool operator==(const ModelParams&) const = default;
};

class ParamError : public Error {
 public:
  enum class Code {
    NonPositiveLambda,
    NegativeRate,
    ZeroD,
    DTooLarge,
    NonFiniteInput,
  };

  ParamError(Code code, std::string field, const std::string& what)
      : Error(what), code_(code), field_(std::move(field)) {}

  Code code() const { return code_; }
  const std::string& field() const { return field_; }

 private:
  Code code_;
  std::string field_;
};

// Upper bound on d; block sizes grow as d^2, so a runaway d is rejected
// rather than clamped.
inline constexpr long long kDefaultMaxD = 10000;

// Validates raw scalars into ModelParams, naming the offending field on
// failure. lambda must be strictly positive; beta and mu may be zero.
ModelParams validate_params(double lambda, double beta, double mu, long long d,
                            long long max_d = kDefaultMaxD);

enum class Method { approx_ph, qbd, simulation };

const char* method_name(Method m);

struct ReportMeta {
  std::size_t truncation_level = 0;  // analytic methods
  std::size_t samples = 0;           // simulation
  double tol = 0.0;
};

// Lifetime moments from one of the three methods. moments[k-1] holds the
// k-th raw moment, so moments[0] == mean.
struct LifetimeReport {
  Method method = Method::approx_ph;
  std::vector<double> moments;
  double mean = 0.0;
  double std_error = 0.0;  // zero for analytic methods
  ReportMeta meta;
};

}  // namespace dclife
