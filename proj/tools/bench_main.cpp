#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dclife/model.hpp"
#include "dclife/montecarlo.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

}  // namespace

// Compares the serial reference simulator against the parallel kernel on the
// same configuration and verifies that both produce identical statistics.
int main(int argc, char** argv) {
  CLI::App app{"Serial vs parallel simulator benchmark"};

  double lambda = 1.0;
  double beta = 4.0;
  double mu = 1.0;
  long long d = 3;
  std::size_t samples = 500000;
  std::uint64_t seed = 42;
  std::string model = "physical_2d";

  app.add_option("--lambda", lambda, "Failure rate per data center");
  app.add_option("--beta", beta, "Arrival rate of new data centers");
  app.add_option("--mu", mu, "Per-copy replication rate");
  app.add_option("--d", d, "Replication threshold");
  app.add_option("--samples", samples, "Replications per run");
  app.add_option("--seed", seed, "Simulation seed");
  app.add_option("--model", model, "physical_2d or corrected_1d")
      ->check(CLI::IsMember({"physical_2d", "corrected_1d"}));

  CLI11_PARSE(app, argc, argv);

  try {
    dclife::montecarlo::SimConfig config;
    config.params = dclife::validate_params(lambda, beta, mu, d);
    config.model = model == "physical_2d"
                       ? dclife::montecarlo::SimModel::physical_2d
                       : dclife::montecarlo::SimModel::corrected_1d;
    config.samples = samples;
    config.seed = seed;

    std::cout << "model=" << model << " lambda=" << lambda << " beta=" << beta
              << " mu=" << mu << " d=" << d << " samples=" << samples << '\n';

    auto t0 = std::chrono::steady_clock::now();
    const auto serial = dclife::montecarlo::simulate_lifetime_serial(config);
    const double serial_s = seconds_since(t0);
    std::cout << "serial   : " << serial_s << " s  mean=" << serial.mean
              << " se=" << serial.std_error << '\n';

    int threads = 1;
#ifdef _OPENMP
    threads = omp_get_max_threads();
#endif
    t0 = std::chrono::steady_clock::now();
    const auto parallel = dclife::montecarlo::simulate_lifetime(config);
    const double parallel_s = seconds_since(t0);
    std::cout << "parallel : " << parallel_s << " s  mean=" << parallel.mean
              << " se=" << parallel.std_error << "  threads=" << threads
              << '\n';

    const bool identical = serial.mean == parallel.mean &&
                           serial.second_moment == parallel.second_moment &&
                           serial.std_error == parallel.std_error;
    std::cout << "speedup  : " << serial_s / parallel_s << "x\n";
    std::cout << "identical: " << (identical ? "yes" : "NO") << '\n';
    return identical ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
