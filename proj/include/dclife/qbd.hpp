#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dclife/error.hpp"
#include "dclife/linalg.hpp"
#include "dclife/model.hpp"

namespace dclife::qbd {

class TruncationTooSmall : public Error {
 public:
  using Error::Error;
};

class SingularU : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

// One value per transient state, indexed [level-1][phase-1]. Level k holds
// min(k, d) phases (phase = copy count).
using LevelVectors = std::vector<std::vector<double>>;

// Block-tridiagonal generator of the (centers, copies) chain over levels
// 1..level_cap. Blocks are those of the untruncated chain; the top level's
// reflected variant (arrivals suppressed) is applied only when the
// truncated system is assembled or factorized.
class QbdBlocks {
 public:
  QbdBlocks() = default;

  const ModelParams& params() const { return params_; }
  std::size_t level_cap() const { return level_cap_; }

  std::size_t phase_count(std::size_t level) const {
    return std::min<std::size_t>(level, static_cast<std::size_t>(params_.d));
  }

  // A_{k,k-1}, valid for 2 <= k <= level_cap
  const linalg::DenseMatrix& down(std::size_t k) const {
    return down_[k - 2];
  }
  // A_{k,k}, valid for 1 <= k <= level_cap
  const linalg::DenseMatrix& local(std::size_t k) const {
    return local_[k - 1];
  }
  // A_{k,k+1}, valid for 1 <= k <= level_cap (the top one is unused by the
  // truncated solves)
  const linalg::DenseMatrix& up(std::size_t k) const { return up_[k - 1]; }

  // A_{k,k} with the arrival rate returned to the diagonal; identical to
  // local(k) except at k == level_cap.
  linalg::DenseMatrix local_reflected(std::size_t k) const;

  // Absorption rate out of (level, phase): lambda at phase 1, else zero.
  double exit_rate(std::size_t level, std::size_t phase) const;

  friend QbdBlocks build_blocks(const ModelParams& params,
                                std::size_t level_cap);

 private:
  ModelParams params_;
  std::size_t level_cap_ = 0;
  std::vector<linalg::DenseMatrix> down_;
  std::vector<linalg::DenseMatrix> local_;
  std::vector<linalg::DenseMatrix> up_;
};

// Instantiates the transition blocks up to level_cap (> d required).
QbdBlocks build_blocks(const ModelParams& params, std::size_t level_cap);

// U, R and G block sequences of the censored-chain factorization
// T = (I - R_L) U_D (I - G_U).
struct RgFactorization {
  std::size_t level_cap = 0;
  std::vector<linalg::DenseMatrix> u;          // u[k] = U_k, k = 0..L-1
  std::vector<linalg::DenseMatrix> neg_u_inv;  // (-U_k)^{-1}, cached
  std::vector<linalg::DenseMatrix> r;          // r[k-1] = R_k, k = 1..L-1
  std::vector<linalg::DenseMatrix> g;          // g[l] = G_l, l = 0..L-2
};

// Forward recursion U_0 = A_{1,1},
// U_k = A_{k+1,k+1} + A_{k+1,k} (-U_{k-1})^{-1} A_{k,k+1}, with
// R_k = A_{k+1,k} (-U_{k-1})^{-1} and G_l = (-U_l)^{-1} A_{l+1,l+2}.
RgFactorization rg_factorize(const QbdBlocks& blocks);

// Solves T x = b on the truncated system through the factorization:
// forward substitution against (I - R_L), block-diagonal solves against
// U_D, back substitution against (I - G_U).
LevelVectors solve_transient(const QbdBlocks& blocks,
                             const RgFactorization& fact,
                             const LevelVectors& rhs);

// x = -T^{-1} e: expected time to absorption from every transient state.
LevelVectors expected_absorption_vector(const QbdBlocks& blocks,
                                        const RgFactorization& fact);

// Sparse probability assignment over transient states; mass not assigned
// is treated as starting absorbed and contributes zero lifetime.
struct QbdInitial {
  struct Entry {
    std::size_t level = 0;
    std::size_t phase = 0;
    double mass = 0.0;
  };
  std::vector<Entry> entries;
};

// Mass vector of the default start: center count drawn from the stationary
// law conditioned on being nonzero, one copy. Element k-1 is the mass on
// state (k, 1), for k = 1..level_cap.
std::vector<double> default_initial_level_mass(const ModelParams& params,
                                               std::size_t level_cap);

struct QbdOptions {
  double tol = 1e-8;
  std::size_t level_limit = 16384;
  int moment_count = 2;
};

// Lifetime moments of the two-dimensional chain. The truncation level
// starts from the stationary tail and doubles until the mean changes by
// less than tol relatively; the report records the certified level.
LifetimeReport mean_lifetime_qbd(const ModelParams& params,
                                 const QbdOptions& opts = {});
LifetimeReport mean_lifetime_qbd(const ModelParams& params,
                                 const QbdInitial& initial,
                                 const QbdOptions& opts = {});

}  // namespace dclife::qbd
