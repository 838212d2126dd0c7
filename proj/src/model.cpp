#include "dclife/model.hpp"

#include <cmath>

namespace dclife {

ModelParams validate_params(double lambda, double beta, double mu, long long d,
                            long long max_d) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(lambda)) {
    throw ParamError(ParamError::Code::NonFiniteInput, "lambda",
                     "lambda must be finite");
  }
  if (!finite(beta)) {
    throw ParamError(ParamError::Code::NonFiniteInput, "beta",
                     "beta must be finite");
  }
  if (!finite(mu)) {
    throw ParamError(ParamError::Code::NonFiniteInput, "mu",
                     "mu must be finite");
  }
  if (lambda <= 0.0) {
    throw ParamError(ParamError::Code::NonPositiveLambda, "lambda",
                     "lambda must be > 0");
  }
  if (beta < 0.0) {
    throw ParamError(ParamError::Code::NegativeRate, "beta",
                     "beta must be >= 0");
  }
  if (mu < 0.0) {
    throw ParamError(ParamError::Code::NegativeRate, "mu", "mu must be >= 0");
  }
  if (d < 1) {
    throw ParamError(ParamError::Code::ZeroD, "d", "d must be >= 1");
  }
  if (d > max_d) {
    throw ParamError(ParamError::Code::DTooLarge, "d",
                     "d exceeds the configured bound " + std::to_string(max_d));
  }
  return ModelParams{lambda, beta, mu, static_cast<int>(d)};
}

const char* method_name(Method m) {
  switch (m) {
    case Method::approx_ph:
      return "approx_ph";
    case Method::qbd:
      return "qbd";
    case Method::simulation:
      return "simulation";
  }
  return "unknown";
}

}  // namespace dclife
