#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "dclife/approx_ph.hpp"
#include "dclife/model.hpp"
#include "dclife/montecarlo.hpp"
#include "dclife/qbd.hpp"
#include "dense_oracle.hpp"

using dclife::ModelParams;
using dclife::validate_params;
using dclife::linalg::DenseMatrix;
using namespace dclife::qbd;

namespace {

double default_mean_at(const ModelParams& params, std::size_t cap) {
  const auto blocks = build_blocks(params, cap);
  const auto fact = rg_factorize(blocks);
  const auto x = expected_absorption_vector(blocks, fact);
  const auto mass = default_initial_level_mass(params, cap);
  double mean = 0.0;
  for (std::size_t k = 1; k <= cap; ++k) mean += mass[k - 1] * x[k - 1][0];
  return mean;
}

}  // namespace

TEST_SUITE("qbd") {

TEST_CASE("lowest-level blocks match the displayed forms") {
  const auto blocks = build_blocks(validate_params(1, 4, 1, 2), 12);
  CHECK(blocks.local(1).rows() == 1);
  CHECK(blocks.local(1)(0, 0) == -5.0);
  CHECK(blocks.up(1).cols() == 2);
  CHECK(blocks.up(1)(0, 0) == 4.0);
  CHECK(blocks.up(1)(0, 1) == 0.0);

  // level 3 sits above the cap d=2: two phases, no copy transition from
  // the saturated phase
  const auto& local3 = blocks.local(3);
  CHECK(local3(0, 0) == -8.0);
  CHECK(local3(0, 1) == 1.0);
  CHECK(local3(1, 0) == 0.0);
  CHECK(local3(1, 1) == -7.0);
}

TEST_CASE("block shapes follow min(level, d)") {
  const auto blocks = build_blocks(validate_params(1, 2, 1, 4), 9);
  for (std::size_t k = 1; k <= 9; ++k) {
    const std::size_t m = std::min<std::size_t>(k, 4);
    CHECK(blocks.local(k).rows() == m);
    CHECK(blocks.local(k).cols() == m);
    if (k >= 2) {
      CHECK(blocks.down(k).rows() == m);
      CHECK(blocks.down(k).cols() == std::min<std::size_t>(k - 1, 4));
    }
    if (k < 9) {
      CHECK(blocks.up(k).rows() == m);
      CHECK(blocks.up(k).cols() == std::min<std::size_t>(k + 1, 4));
    }
  }
}

TEST_CASE("a truncation at or below d is rejected") {
  CHECK_THROWS_AS(build_blocks(validate_params(1, 4, 1, 5), 5),
                  TruncationTooSmall);
  CHECK_THROWS_AS(build_blocks(validate_params(1, 4, 1, 5), 3),
                  TruncationTooSmall);
}

TEST_CASE("every row of the untruncated blocks balances with the exit") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unif(0.1, 4.0);
  for (int trial = 0; trial < 10; ++trial) {
    const ModelParams params =
        validate_params(unif(rng), unif(rng), unif(rng), 1 + rng() % 6);
    const std::size_t cap = static_cast<std::size_t>(params.d) + 4;
    const auto blocks = build_blocks(params, cap);
    for (std::size_t k = 1; k <= cap; ++k) {
      for (std::size_t j = 1; j <= blocks.phase_count(k); ++j) {
        double row = blocks.exit_rate(k, j);
        for (std::size_t c = 0; c < blocks.local(k).cols(); ++c)
          row += blocks.local(k)(j - 1, c);
        if (k >= 2)
          for (std::size_t c = 0; c < blocks.down(k).cols(); ++c)
            row += blocks.down(k)(j - 1, c);
        for (std::size_t c = 0; c < blocks.up(k).cols(); ++c)
          row += blocks.up(k)(j - 1, c);
        CHECK(std::abs(row) <= 1e-12);
      }
    }
  }
}

TEST_CASE("blocks agree with an independent dense reconstruction") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> unif(0.1, 4.0);
  for (int trial = 0; trial < 8; ++trial) {
    const ModelParams params =
        validate_params(unif(rng), unif(rng), unif(rng), 1 + rng() % 5);
    const std::size_t cap = static_cast<std::size_t>(params.d) + 3 + rng() % 6;
    const auto blocks = build_blocks(params, cap);
    const auto direct = oracle::dense_from_semantics(params, cap);
    const auto assembled = oracle::dense_from_blocks(blocks);
    // diagonals are accumulated in different orders, so allow rounding
    CHECK(dclife::linalg::max_abs_diff(direct, assembled) <= 1e-12);
  }
}

TEST_CASE("truncated generator conserves rate against the exit vector") {
  const ModelParams params = validate_params(1, 4, 1, 3);
  const auto blocks = build_blocks(params, 20);
  const auto t = oracle::dense_from_blocks(blocks);
  const oracle::StateIndex idx(params, 20);
  for (std::size_t k = 1; k <= 20; ++k) {
    for (std::size_t j = 1; j <= blocks.phase_count(k); ++j) {
      double row = blocks.exit_rate(k, j);
      for (std::size_t c = 0; c < t.cols(); ++c) row += t(idx(k, j), c);
      CHECK(std::abs(row) <= 1e-12);
    }
  }
}

TEST_CASE("first factorization steps at the canonical point") {
  const auto blocks = build_blocks(validate_params(1, 4, 1, 2), 12);
  const auto fact = rg_factorize(blocks);
  CHECK(fact.u[0](0, 0) == -5.0);
  REQUIRE(fact.r[0].rows() == 2);
  CHECK(fact.r[0](0, 0) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(fact.r[0](1, 0) == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("scalar chain reproduces the one-dimensional recursion") {
  const ModelParams params = validate_params(0.7, 1.9, 0, 1);
  const std::size_t cap = 15;
  const auto blocks = build_blocks(params, cap);
  const auto fact = rg_factorize(blocks);

  double u_prev = -(params.lambda + params.beta);
  CHECK(fact.u[0](0, 0) == doctest::Approx(u_prev).epsilon(1e-14));
  for (std::size_t k = 1; k < cap; ++k) {
    const double local = (k + 1 == cap)
                             ? -(static_cast<double>(k + 1) * params.lambda)
                             : -(static_cast<double>(k + 1) * params.lambda +
                                 params.beta);
    const double u_k = local + static_cast<double>(k) * params.lambda *
                                   params.beta / (-u_prev);
    CHECK(fact.u[k](0, 0) == doctest::Approx(u_k).epsilon(1e-12));
    CHECK(fact.r[k - 1](0, 0) >= 0.0);
    CHECK(fact.g[k - 1](0, 0) >= 0.0);
    u_prev = u_k;
  }
}

TEST_CASE("measures are nonnegative and U diagonals negative") {
  const auto blocks = build_blocks(validate_params(0.8, 3.0, 1.6, 4), 30);
  const auto fact = rg_factorize(blocks);
  for (const auto& u : fact.u) {
    for (std::size_t i = 0; i < u.rows(); ++i) CHECK(u(i, i) < 0.0);
  }
  for (const auto& r : fact.r) {
    for (std::size_t i = 0; i < r.rows(); ++i)
      for (std::size_t j = 0; j < r.cols(); ++j) CHECK(r(i, j) >= 0.0);
  }
  for (const auto& g : fact.g) {
    for (std::size_t i = 0; i < g.rows(); ++i)
      for (std::size_t j = 0; j < g.cols(); ++j) CHECK(g(i, j) >= 0.0);
  }
}

TEST_CASE("factorization reassembles the truncated generator") {
  const auto blocks = build_blocks(validate_params(1, 4, 1, 10), 200);
  const auto fact = rg_factorize(blocks);
  CHECK(oracle::factorization_residual(blocks, fact) <= 1e-10);

  const auto small = build_blocks(validate_params(0.6, 2.3, 0.8, 3), 25);
  CHECK(oracle::factorization_residual(small, rg_factorize(small)) <= 1e-10);
}

TEST_CASE("block solve matches a dense direct solve") {
  const ModelParams params = validate_params(1, 4, 1, 3);
  const std::size_t cap = 30;
  const auto blocks = build_blocks(params, cap);
  const auto fact = rg_factorize(blocks);
  const auto x = expected_absorption_vector(blocks, fact);

  const auto t = oracle::dense_from_blocks(blocks);
  const oracle::StateIndex idx(params, cap);
  const std::vector<double> rhs(idx.size(), -1.0);
  const auto dense_x = dclife::linalg::solve(t, rhs);

  for (std::size_t k = 1; k <= cap; ++k) {
    for (std::size_t j = 1; j <= blocks.phase_count(k); ++j) {
      const double a = x[k - 1][j - 1];
      const double b = dense_x[idx(k, j)];
      CHECK(std::abs(a - b) <= 1e-9 * std::abs(b));
    }
  }
}

TEST_CASE("no replication decouples the tagged copy") {
  for (double lambda : {0.5, 1.0, 2.0}) {
    for (double mu : {0.0, 1.0}) {
      const ModelParams params = validate_params(lambda, 4, mu, 1);
      const auto blocks = build_blocks(params, 25);
      const auto x =
          expected_absorption_vector(blocks, rg_factorize(blocks));
      for (const auto& level : x) {
        for (double v : level) {
          CHECK(std::abs(v - 1.0 / lambda) <= 1e-9 / lambda);
        }
      }
    }
  }
}

TEST_CASE("absorption times grow with copies and pending replication") {
  const ModelParams params = validate_params(1, 4, 1, 2);
  const auto blocks = build_blocks(params, 40);
  const auto x = expected_absorption_vector(blocks, rg_factorize(blocks));
  const double from_21 = x[1][0];
  const double from_22 = x[1][1];
  CHECK(from_22 > from_21);
  CHECK(from_21 > 1.0);  // 1/lambda
  for (const auto& level : x) {
    for (double v : level) CHECK(v > 0.0);
  }
}

TEST_CASE("expected lifetime is nondecreasing in the truncation level") {
  const ModelParams params = validate_params(1, 4, 1, 5);
  double prev = 0.0;
  for (std::size_t cap : {8, 16, 32, 64}) {
    const double mean = default_mean_at(params, cap);
    CHECK(mean >= prev - 1e-13);
    prev = mean;
  }
}

TEST_CASE("lifetime report at d = 1 is exactly one over lambda") {
  for (double lambda : {0.5, 1.0, 2.0}) {
    const auto report = mean_lifetime_qbd(validate_params(lambda, 4, 1, 1));
    CHECK(std::abs(report.mean - 1.0 / lambda) <= 1e-9 / lambda);
    CHECK(report.method == dclife::Method::qbd);
    CHECK(report.meta.truncation_level > 1);
  }
}

TEST_CASE("second moment dominates the squared mean") {
  for (int d = 1; d <= 5; ++d) {
    const auto report = mean_lifetime_qbd(validate_params(1, 4, 1, d));
    REQUIRE(report.moments.size() == 2);
    CHECK(report.moments[1] >= report.mean * report.mean * (1 - 1e-12));
  }
}

TEST_CASE("level doubling past the cap raises NoConvergence") {
  QbdOptions opts;
  opts.level_limit = 8;
  CHECK_THROWS_AS(mean_lifetime_qbd(validate_params(1, 4, 1, 5), opts),
                  NoConvergence);
}

TEST_CASE("a point start reproduces the absorption vector entry") {
  const ModelParams params = validate_params(1, 4, 1, 2);
  QbdInitial initial;
  initial.entries.push_back({2, 2, 1.0});
  const auto report = mean_lifetime_qbd(params, initial);

  const auto blocks = build_blocks(params, 64);
  const auto x = expected_absorption_vector(blocks, rg_factorize(blocks));
  CHECK(report.mean == doctest::Approx(x[1][1]).epsilon(1e-7));
}

TEST_CASE("invalid initial assignments are rejected") {
  const ModelParams params = validate_params(1, 4, 1, 2);
  QbdInitial bad_phase;
  bad_phase.entries.push_back({2, 3, 1.0});
  CHECK_THROWS_AS(mean_lifetime_qbd(params, bad_phase), dclife::Error);

  QbdInitial too_heavy;
  too_heavy.entries.push_back({1, 1, 0.7});
  too_heavy.entries.push_back({2, 1, 0.7});
  CHECK_THROWS_AS(mean_lifetime_qbd(params, too_heavy), dclife::Error);
}

TEST_CASE("the two lifetime models stay within a quarter of each other") {
  for (int d = 2; d <= 5; ++d) {
    const ModelParams params = validate_params(1, 4, 1, d);
    const double approx =
        dclife::approx_ph::mean_lifetime_approx(params).mean;
    const double exact = mean_lifetime_qbd(params).mean;
    CHECK(std::abs(approx - exact) / exact < 0.25);
  }
}

TEST_CASE("single-state start agrees with the simulator") {
  const ModelParams params = validate_params(1, 4, 1, 2);
  const auto blocks = build_blocks(params, 64);
  const auto x = expected_absorption_vector(blocks, rg_factorize(blocks));

  dclife::montecarlo::SimConfig config;
  config.params = params;
  config.model = dclife::montecarlo::SimModel::physical_2d;
  config.samples = 100000;
  config.seed = 424242;
  config.start = {{1, 1}};
  const auto sim = dclife::montecarlo::simulate_lifetime(config);
  CHECK(std::abs(sim.mean - x[0][0]) <= 3.0 * sim.std_error);
}

}  // TEST_SUITE
