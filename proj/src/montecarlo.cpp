#include "dclife/montecarlo.hpp"

#include <cmath>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dclife/approx_ph.hpp"
#include "dclife/stationary.hpp"

namespace dclife::montecarlo {

namespace {

constexpr double kStationaryTol = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Substream seed for replication `index` of stream `seed`; stable across
// thread counts and schedules.
std::uint64_t substream(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

std::size_t draw_conditioned_center_count(const ModelParams& params,
                                          std::mt19937_64& rng) {
  const double rho = params.beta / params.lambda;
  if (rho <= 0.0) return 1;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double p0 = std::exp(-rho);
  const double target = unit(rng) * (1.0 - p0);

  double p = p0;
  double cumulative = 0.0;
  const std::size_t hard_cap =
      static_cast<std::size_t>(rho + 40.0 * std::sqrt(rho + 1.0) + 400.0);
  for (std::size_t k = 1; k <= hard_cap; ++k) {
    p *= rho / static_cast<double>(k);
    cumulative += p;
    if (cumulative >= target) return k;
  }
  return hard_cap;  // mass beyond the cap is below double resolution
}

double run_physical(const ModelParams& params, std::size_t centers,
                    std::size_t copies, std::mt19937_64& rng) {
  const double lambda = params.lambda;
  const double beta = params.beta;
  const double mu = params.mu;
  const std::size_t d = static_cast<std::size_t>(params.d);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double t = 0.0;
  std::size_t k = centers;
  std::size_t j = copies;
  while (true) {
    const double holder_fail = static_cast<double>(j) * lambda;
    const double bystander_fail = static_cast<double>(k - j) * lambda;
    const double copy_done =
        (j < std::min(k, d)) ? static_cast<double>(j) * mu : 0.0;
    const double total = holder_fail + bystander_fail + copy_done + beta;

    t += std::exponential_distribution<double>(total)(rng);

    const double pick = unit(rng) * total;
    if (pick < holder_fail) {
      if (j == 1) return t;  // last copy lost
      --j;
      --k;
    } else if (pick < holder_fail + bystander_fail) {
      --k;
    } else if (pick < holder_fail + bystander_fail + copy_done) {
      ++j;
    } else {
      ++k;
    }
  }
}

double run_corrected(const ModelParams& params,
                     const std::vector<double>& rates, std::size_t copies,
                     std::mt19937_64& rng) {
  const double lambda = params.lambda;
  const std::size_t d = static_cast<std::size_t>(params.d);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double t = 0.0;
  std::size_t j = copies;
  while (true) {
    const double down = static_cast<double>(j) * lambda;
    const double up = (j < d) ? rates[j - 1] : 0.0;
    const double total = down + up;

    t += std::exponential_distribution<double>(total)(rng);

    if (unit(rng) * total < down) {
      if (j == 1) return t;
      --j;
    } else {
      ++j;
    }
  }
}

void check_config(const SimConfig& config) {
  if (config.samples < 1) {
    throw Error("simulate_lifetime: samples must be >= 1");
  }
  if (!config.start.has_value()) return;
  const auto [k0, j0] = *config.start;
  const std::size_t d = static_cast<std::size_t>(config.params.d);
  if (j0 < 1 || j0 > d) {
    throw InvalidInitialState("initial copy count must lie in [1, d]");
  }
  if (config.model == SimModel::physical_2d && j0 > k0) {
    throw InvalidInitialState("initial copies cannot exceed initial centers");
  }
}

SimResult run(const SimConfig& config, int thread_override) {
  check_config(config);
  const ModelParams& params = config.params;

  std::vector<double> rates;
  if (config.model == SimModel::corrected_1d) {
    const auto stat = stationary::poisson_stationary(params, kStationaryTol);
    rates = approx_ph::corrected_rates(params, stat).rates;
  }

  const std::size_t n = config.samples;
  std::vector<double> times(n);

  int threads = thread_override != 0 ? thread_override : config.threads;
#ifndef _OPENMP
  threads = 1;
#endif

  auto replicate = [&](std::size_t i) {
    std::mt19937_64 rng(substream(config.seed, i));
    std::size_t k0;
    std::size_t j0;
    if (config.start.has_value()) {
      k0 = config.start->first;
      j0 = config.start->second;
    } else {
      k0 = draw_conditioned_center_count(params, rng);
      j0 = 1;
    }
    times[i] = config.model == SimModel::physical_2d
                   ? run_physical(params, k0, j0, rng)
                   : run_corrected(params, rates, j0, rng);
  };

  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) replicate(i);
  } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads > 0 ? threads : omp_get_max_threads())
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      replicate(static_cast<std::size_t>(i));
    }
#endif
  }

  // Reduction in index order keeps the result identical across schedules.
  double sum = 0.0;
  double sum2 = 0.0;
  double sum4 = 0.0;
  for (double t : times) {
    sum += t;
    const double t2 = t * t;
    sum2 += t2;
    sum4 += t2 * t2;
  }

  SimResult res;
  res.samples = n;
  res.seed = config.seed;
  const double dn = static_cast<double>(n);
  res.mean = sum / dn;
  res.second_moment = sum2 / dn;
  if (n > 1) {
    const double var1 =
        std::max(0.0, (sum2 - dn * res.mean * res.mean) / (dn - 1.0));
    const double var2 = std::max(
        0.0, (sum4 - dn * res.second_moment * res.second_moment) / (dn - 1.0));
    res.std_error = std::sqrt(var1 / dn);
    res.second_moment_std_error = std::sqrt(var2 / dn);
  }
  return res;
}

}  // namespace

SimResult simulate_lifetime(const SimConfig& config) { return run(config, 0); }

SimResult simulate_lifetime_serial(const SimConfig& config) {
  return run(config, 1);
}

std::size_t sample_initial_from_alpha(const ModelParams& params,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed));
  return draw_conditioned_center_count(params, rng);
}

std::vector<Jump> physical_jump_rates(const ModelParams& params,
                                      std::size_t centers,
                                      std::size_t copies) {
  const std::size_t d = static_cast<std::size_t>(params.d);
  if (copies < 1 || copies > std::min(centers, d)) {
    throw InvalidInitialState("state outside the transient space");
  }
  std::vector<Jump> jumps;
  const double holder_fail = static_cast<double>(copies) * params.lambda;
  if (copies == 1) {
    jumps.push_back({0, 0, holder_fail});
  } else {
    jumps.push_back({centers - 1, copies - 1, holder_fail});
  }
  if (centers > copies) {
    jumps.push_back(
        {centers - 1, copies, static_cast<double>(centers - copies) * params.lambda});
  }
  if (copies < std::min(centers, d)) {
    jumps.push_back(
        {centers, copies + 1, static_cast<double>(copies) * params.mu});
  }
  if (params.beta > 0.0) {
    jumps.push_back({centers + 1, copies, params.beta});
  }
  return jumps;
}

}  // namespace dclife::montecarlo
