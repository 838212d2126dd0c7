#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dclife/error.hpp"
#include "dclife/model.hpp"

namespace dclife::montecarlo {

class InvalidInitialState : public Error {
 public:
  using Error::Error;
};

enum class SimModel {
  physical_2d,   // joint (centers, copies) chain
  corrected_1d,  // copy-count chain under the corrected rates
};

struct SimConfig {
  ModelParams params;
  SimModel model = SimModel::physical_2d;
  std::size_t samples = 1;
  std::uint64_t seed = 42;
  // Fixed start (centers, copies); centers are ignored by corrected_1d.
  // Unset: centers drawn from the stationary law conditioned on >= 1,
  // one copy.
  std::optional<std::pair<std::size_t, std::size_t>> start;
  // 0 = all available threads, 1 = serial, n = exactly n.
  int threads = 0;
};

struct SimResult {
  double mean = 0.0;
  double second_moment = 0.0;
  double std_error = 0.0;
  double second_moment_std_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

// Runs `samples` independent replications of the event-jump chain until the
// copy count hits zero and aggregates the absorption times. Replications own
// RNG substreams derived from (seed, index) and the reduction is performed
// in index order, so the result is bit-identical for a fixed config
// regardless of thread count.
SimResult simulate_lifetime(const SimConfig& config);

// Single-threaded reference path; kept for testing the parallel kernel.
SimResult simulate_lifetime_serial(const SimConfig& config);

// Draws a center count from the stationary law conditioned on >= 1, by
// inversion on the probability recurrence. The file starts with one copy.
std::size_t sample_initial_from_alpha(const ModelParams& params,
                                      std::uint64_t seed);

// One outgoing transition of the physical chain; phase 0 encodes absorption.
struct Jump {
  std::size_t level = 0;
  std::size_t phase = 0;
  double rate = 0.0;
};

// Outgoing rates of the physical chain at (centers, copies); test hook for
// checking the simulator against the block generator row by row.
std::vector<Jump> physical_jump_rates(const ModelParams& params,
                                      std::size_t centers, std::size_t copies);

}  // namespace dclife::montecarlo
