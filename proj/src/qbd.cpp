#include "dclife/qbd.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "dclife/stationary.hpp"

namespace dclife::qbd {

namespace {

// Smallest starting truncation: past the replication cap and past the bulk
// of the stationary center-count law.
std::size_t initial_level_cap(const ModelParams& params, double tol) {
  const double probe_tol = std::clamp(tol, 1e-14, 1e-10);
  const auto stat = stationary::poisson_stationary(params, probe_tol);
  return std::max<std::size_t>(static_cast<std::size_t>(params.d) + 1,
                               stat.truncation_level() + 4);
}

double initial_dot(const QbdInitial& initial, const LevelVectors& x) {
  double acc = 0.0;
  for (const auto& e : initial.entries) {
    acc += e.mass * x[e.level - 1][e.phase - 1];
  }
  return acc;
}

void check_initial(const ModelParams& params, const QbdInitial& initial) {
  double total = 0.0;
  for (const auto& e : initial.entries) {
    const std::size_t phases =
        std::min<std::size_t>(e.level, static_cast<std::size_t>(params.d));
    if (e.level < 1 || e.phase < 1 || e.phase > phases) {
      throw Error("qbd initial mass placed on a nonexistent state");
    }
    if (e.mass < 0.0) throw Error("qbd initial mass must be nonnegative");
    total += e.mass;
  }
  if (total > 1.0 + 1e-9) throw Error("qbd initial mass exceeds 1");
}

}  // namespace

linalg::DenseMatrix QbdBlocks::local_reflected(std::size_t k) const {
  linalg::DenseMatrix block = local(k);
  if (k == level_cap_) {
    for (std::size_t i = 0; i < block.rows(); ++i) {
      block(i, i) += params_.beta;
    }
  }
  return block;
}

double QbdBlocks::exit_rate(std::size_t level, std::size_t phase) const {
  (void)level;
  return phase == 1 ? params_.lambda : 0.0;
}

QbdBlocks build_blocks(const ModelParams& params, std::size_t level_cap) {
  if (level_cap <= static_cast<std::size_t>(params.d)) {
    throw TruncationTooSmall("build_blocks: level_cap must exceed d");
  }

  QbdBlocks blocks;
  blocks.params_ = params;
  blocks.level_cap_ = level_cap;
  blocks.local_.reserve(level_cap);
  blocks.up_.reserve(level_cap);
  blocks.down_.reserve(level_cap - 1);

  const double lambda = params.lambda;
  const double beta = params.beta;
  const double mu = params.mu;

  for (std::size_t k = 1; k <= level_cap; ++k) {
    const std::size_t m_k = blocks.phase_count(k);
    const std::size_t m_up = blocks.phase_count(k + 1);

    // Local block: copy completions move one phase up inside the level; the
    // diagonal balances every outgoing rate of the untruncated chain.
    linalg::DenseMatrix local(m_k, m_k);
    for (std::size_t j = 1; j <= m_k; ++j) {
      const double copy_rate = (j < m_k) ? static_cast<double>(j) * mu : 0.0;
      if (j < m_k) local(j - 1, j) = copy_rate;
      local(j - 1, j - 1) =
          -(static_cast<double>(k) * lambda + beta + copy_rate);
    }
    blocks.local_.push_back(std::move(local));

    // Up block: an arrival adds a center and keeps the copy count.
    linalg::DenseMatrix up(m_k, m_up);
    for (std::size_t j = 1; j <= m_k; ++j) up(j - 1, j - 1) = beta;
    blocks.up_.push_back(std::move(up));

    // Down block: phase j loses a copy-holding center at rate j*lambda
    // (absorbing from phase 1, so that lands in the exit vector) or a
    // bystander center at rate (k-j)*lambda.
    if (k >= 2) {
      const std::size_t m_dn = blocks.phase_count(k - 1);
      linalg::DenseMatrix down(m_k, m_dn);
      for (std::size_t j = 1; j <= m_k; ++j) {
        if (j >= 2) down(j - 1, j - 2) = static_cast<double>(j) * lambda;
        if (j <= m_dn) {
          down(j - 1, j - 1) = static_cast<double>(k - j) * lambda;
        }
      }
      blocks.down_.push_back(std::move(down));
    }
  }
  return blocks;
}

RgFactorization rg_factorize(const QbdBlocks& blocks) {
  const std::size_t cap = blocks.level_cap();
  RgFactorization fact;
  fact.level_cap = cap;
  fact.u.reserve(cap);
  fact.neg_u_inv.reserve(cap);
  if (cap >= 2) {
    fact.r.reserve(cap - 1);
    fact.g.reserve(cap - 1);
  }

  auto invert_neg = [](const linalg::DenseMatrix& u_k) {
    linalg::DenseMatrix neg = u_k;
    neg.negate();
    try {
      return linalg::invert(neg);
    } catch (const linalg::SingularMatrix& e) {
      throw SingularU(std::string("rg_factorize: ") + e.what());
    }
  };

  fact.u.push_back(blocks.local_reflected(1));
  fact.neg_u_inv.push_back(invert_neg(fact.u.back()));

  for (std::size_t k = 1; k < cap; ++k) {
    const auto& prev_inv = fact.neg_u_inv[k - 1];
    linalg::DenseMatrix r_k = linalg::multiply(blocks.down(k + 1), prev_inv);
    linalg::DenseMatrix g_prev = linalg::multiply(prev_inv, blocks.up(k));

    linalg::DenseMatrix u_k = blocks.local_reflected(k + 1);
    u_k += linalg::multiply(r_k, blocks.up(k));

    fact.r.push_back(std::move(r_k));
    fact.g.push_back(std::move(g_prev));
    fact.neg_u_inv.push_back(invert_neg(u_k));
    fact.u.push_back(std::move(u_k));
  }
  return fact;
}

LevelVectors solve_transient(const QbdBlocks& blocks,
                             const RgFactorization& fact,
                             const LevelVectors& rhs) {
  const std::size_t cap = blocks.level_cap();
  if (fact.level_cap != cap || rhs.size() != cap) {
    throw Error("solve_transient: factorization/rhs level mismatch");
  }

  // (I - R_L) y = b, forward over levels
  LevelVectors y(cap);
  y[0] = rhs[0];
  for (std::size_t k = 2; k <= cap; ++k) {
    std::vector<double> carried = linalg::multiply(fact.r[k - 2], y[k - 2]);
    std::vector<double> row = rhs[k - 1];
    for (std::size_t i = 0; i < row.size(); ++i) row[i] += carried[i];
    y[k - 1] = std::move(row);
  }

  // U_D z = y, per level; U^{-1} = -(-U)^{-1}
  LevelVectors z(cap);
  for (std::size_t k = 1; k <= cap; ++k) {
    std::vector<double> v = linalg::multiply(fact.neg_u_inv[k - 1], y[k - 1]);
    for (double& t : v) t = -t;
    z[k - 1] = std::move(v);
  }

  // (I - G_U) x = z, backward over levels
  LevelVectors x(cap);
  x[cap - 1] = z[cap - 1];
  for (std::size_t k = cap - 1; k >= 1; --k) {
    std::vector<double> carried = linalg::multiply(fact.g[k - 1], x[k]);
    std::vector<double> row = z[k - 1];
    for (std::size_t i = 0; i < row.size(); ++i) row[i] += carried[i];
    x[k - 1] = std::move(row);
  }
  return x;
}

LevelVectors expected_absorption_vector(const QbdBlocks& blocks,
                                        const RgFactorization& fact) {
  LevelVectors rhs(blocks.level_cap());
  for (std::size_t k = 1; k <= blocks.level_cap(); ++k) {
    rhs[k - 1].assign(blocks.phase_count(k), -1.0);
  }
  return solve_transient(blocks, fact, rhs);
}

std::vector<double> default_initial_level_mass(const ModelParams& params,
                                               std::size_t level_cap) {
  const double rho = params.beta / params.lambda;
  std::vector<double> mass(level_cap, 0.0);
  if (rho <= 0.0) {
    // no arrivals: conditioned on one center being present
    mass[0] = 1.0;
    return mass;
  }
  const double p0 = std::exp(-rho);
  double p = p0;
  for (std::size_t k = 1; k <= level_cap; ++k) {
    p *= rho / static_cast<double>(k);
    mass[k - 1] = p / (1.0 - p0);
  }
  return mass;
}

namespace {

struct Evaluation {
  double mean = 0.0;
  QbdBlocks blocks;
  RgFactorization fact;
  LevelVectors absorption;
};

Evaluation evaluate_at(const ModelParams& params, std::size_t level_cap,
                       const QbdInitial* initial) {
  Evaluation ev;
  ev.blocks = build_blocks(params, level_cap);
  ev.fact = rg_factorize(ev.blocks);
  ev.absorption = expected_absorption_vector(ev.blocks, ev.fact);
  if (initial != nullptr) {
    ev.mean = initial_dot(*initial, ev.absorption);
  } else {
    const auto mass = default_initial_level_mass(params, level_cap);
    for (std::size_t k = 1; k <= level_cap; ++k) {
      ev.mean += mass[k - 1] * ev.absorption[k - 1][0];
    }
  }
  return ev;
}

LifetimeReport lifetime_impl(const ModelParams& params,
                             const QbdInitial* initial,
                             const QbdOptions& opts) {
  if (!(opts.tol > 0.0 && opts.tol < 1.0)) {
    throw Error("mean_lifetime_qbd: tol must lie in (0, 1)");
  }
  if (opts.moment_count < 1) {
    throw Error("mean_lifetime_qbd: moment_count must be >= 1");
  }

  std::size_t cap = initial_level_cap(params, opts.tol);
  if (initial != nullptr) {
    check_initial(params, *initial);
    for (const auto& e : initial->entries) {
      cap = std::max(cap, e.level + 1);
    }
  }

  Evaluation ev = evaluate_at(params, cap, initial);
  for (;;) {
    const std::size_t next = cap * 2;
    if (next > opts.level_limit) {
      throw NoConvergence(
          "mean_lifetime_qbd: level doubling exceeded the configured cap");
    }
    Evaluation refined = evaluate_at(params, next, initial);
    const double scale = std::max(std::abs(refined.mean), 1e-300);
    const bool converged =
        std::abs(refined.mean - ev.mean) <= opts.tol * scale;
    cap = next;
    ev = std::move(refined);
    if (converged) break;
  }

  LifetimeReport report;
  report.method = Method::qbd;
  report.meta.truncation_level = cap;
  report.meta.tol = opts.tol;

  // Higher moments by repeated block solves at the certified level:
  // x_1 = -T^{-1} e, x_k = -k T^{-1} x_{k-1}.
  QbdInitial default_init;
  if (initial == nullptr) {
    const auto mass = default_initial_level_mass(params, cap);
    default_init.entries.reserve(cap);
    for (std::size_t k = 1; k <= cap; ++k) {
      default_init.entries.push_back({k, 1, mass[k - 1]});
    }
    initial = &default_init;
  }

  LevelVectors x_k = ev.absorption;
  report.moments.push_back(initial_dot(*initial, x_k));
  for (int k = 2; k <= opts.moment_count; ++k) {
    LevelVectors rhs(cap);
    for (std::size_t lvl = 0; lvl < cap; ++lvl) {
      rhs[lvl].resize(x_k[lvl].size());
      for (std::size_t j = 0; j < x_k[lvl].size(); ++j) {
        rhs[lvl][j] = -static_cast<double>(k) * x_k[lvl][j];
      }
    }
    x_k = solve_transient(ev.blocks, ev.fact, rhs);
    report.moments.push_back(initial_dot(*initial, x_k));
  }
  report.mean = report.moments[0];
  report.std_error = 0.0;
  return report;
}

}  // namespace

LifetimeReport mean_lifetime_qbd(const ModelParams& params,
                                 const QbdOptions& opts) {
  return lifetime_impl(params, nullptr, opts);
}

LifetimeReport mean_lifetime_qbd(const ModelParams& params,
                                 const QbdInitial& initial,
                                 const QbdOptions& opts) {
  return lifetime_impl(params, &initial, opts);
}

}  // namespace dclife::qbd
