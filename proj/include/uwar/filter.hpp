#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uwar/distributions.hpp"
#include "uwar/hyperparams.hpp"
#include "uwar/linalg.hpp"

namespace uwar {

// Posterior Wishart state: Phi_t | A, D_t ~ W(n + p - 1, F).
struct FilterState {
  int t = 0;
  Matrix F;
  double df = 0.0;
};

// One-step prior: Phi_t | A, D_{t-1} ~ W(delta n + p - 1, R),
// R = k A F_{t-1} A' + Lambda_t.
struct PriorState {
  int t = 0;
  Matrix R;
  double df = 0.0;
};

// Lambda_t selection: zero (the usual case) or a fixed sequence of symmetric
// PSD matrices. A single fixed matrix is reused for every step.
class LambdaPolicy {
 public:
  static LambdaPolicy zero() { return LambdaPolicy{}; }
  static LambdaPolicy fixed(std::vector<Matrix> seq);

  bool is_zero() const { return seq_.empty(); }
  /// Lambda_t for 1-based step t at the given state dimension.
  Matrix at(int t, Eigen::Index dim) const;

 private:
  std::vector<Matrix> seq_;
};

/// F_0 such that E(Phi_0) = (n + p - 1) F_0 = sigma0_hat^-1.
FilterState init_state(const Matrix& sigma0_hat, const Hyperparams& hp);

/// R = k A F A' + lambda_t with df = delta n + p - 1. Throws when the
/// resulting scale is not positive definite (e.g. singular A with zero
/// lambda).
PriorState predict(const FilterState& state, const Matrix& a, const Matrix& lambda_t,
                   const Hyperparams& hp);

/// Conjugate observation update F_t = (R^-1 + e e')^-1, computed by the
/// rank-one inversion lemma; df = n + p - 1.
FilterState update(const PriorState& prior, const Vector& e_t, const Hyperparams& hp);

/// One-step forecast y_t | A, D_{t-1} ~ t(delta n, mu, (delta n)^-1 R^-1).
StudentTParams forecast(const PriorState& prior, const Vector& mu, const Hyperparams& hp);

/// Predictive covariance df/(df-2) * spread; empty when df <= 2.
std::optional<Matrix> forecast_covariance(const StudentTParams& fc);

/// C = sqrt(c) (A')^-1, the AR matrix of the volatility process.
Matrix volatility_ar_matrix(const Matrix& a, const Hyperparams& hp);

/// Companion form of an order-d recursion: block matrix with A_1..A_d on the
/// first block row and identity blocks on the sub-diagonal, plus the selector
/// J = [I_p, 0, ..., 0]. d = 1 returns (A_1, I_p).
std::pair<Matrix, Matrix> companion_embed(const std::vector<Matrix>& a_list);

struct StepRecord {
  std::string date;
  double log_pred_density = 0.0;
  StudentTParams forecast;   // p-dimensional one-step forecast
  Matrix pred_cov;           // covariance of y_t | D_{t-1}
  Matrix pred_vol_mode;      // mode of Sigma_t | D_{t-1} (out-of-sample estimate)
  Matrix post_mean;          // mean of Sigma_t | D_t
  Matrix post_mode;          // mode of Sigma_t | D_t
};

struct RunOutput {
  Hyperparams hp;                 // at the state dimension (d p for order d)
  int obs_dim = 0;
  Matrix F0;
  double cumulative_log_predictive = 0.0;
  std::vector<StepRecord> steps;
  std::vector<Matrix> F_path;     // posterior scales F_1..F_N (state dimension)
  FilterState final_state;
};

/// Runs the conjugate recursion over an N x p matrix of returns with a fixed
/// AR matrix. `a` may be m x m with m = d p (companion state); residuals are
/// then embedded as J' e_t and forecasts are read off the leading block. The
/// posterior summaries require n + m - 1 > p + 1, which holds for all valid
/// hyperparameters. sigma0_hat is p x p; for a companion state the initial
/// scale is block diagonal.
RunOutput filter_run(const Matrix& returns, const Vector& mu, const Matrix& sigma0_hat,
                     const Matrix& a, const Hyperparams& hp, const LambdaPolicy& lambda);

}  // namespace uwar
