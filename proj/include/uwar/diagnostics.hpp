#pragma once

#include <vector>

#include "uwar/distributions.hpp"
#include "uwar/filter.hpp"
#include "uwar/hyperparams.hpp"
#include "uwar/linalg.hpp"

namespace uwar {

struct PortfolioConfig {
  double m = 0.001;  // target expected return per step, w' mu = m
  Vector mu;         // expected returns, must be nonzero
};

struct PortfolioResult {
  std::vector<double> risk_path;         // w_t' Sigma_t w_t
  double avg_risk = 0.0;
  std::vector<double> realized_returns;  // w_t' y_t
  double sharpe_conditional = 0.0;       // mean of m / sqrt(risk_t)
  double sharpe_realized = 0.0;          // mean / sd of realized returns
};

// Log posterior of the volatility path evaluated at plug-in estimates:
//   LP = 3 N p log k - trace(A F0 A' Sigma0^-1)/2 - (2n+p)/2 log|Sigma0|
//        - sum (y_t - mu)' Sigma_t^-1 (y_t - mu)/2 - (3p+2)/2 sum log|Sigma_t|
//        + (p+1) sum log|Sigma_t^-1 - Lambda_t| - p/2 sum log xi_t,
// all other constants dropped. xi_t is recovered from consecutive plug-in
// precisions through the shock
//   B_t = k^-1 U(Phi_{t-1})'^-1 A^-1 (Phi_t - Lambda_t) A'^-1 U(Phi_{t-1})^-1
// as xi_t = p - trace(B_t). Steps where xi_t <= 0 (or the log-determinant
// argument loses definiteness) are skipped and counted in degenerate_steps.
struct LogPosteriorPathResult {
  double lp = 0.0;
  int degenerate_steps = 0;
};

LogPosteriorPathResult log_posterior_path(const std::vector<Matrix>& sigma_path, const Matrix& a,
                                          const Hyperparams& hp, const LambdaPolicy& lambda,
                                          const Matrix& returns, const Vector& mu,
                                          const Matrix& sigma0, const Matrix& f0);

/// BF_t = f(y_t | D_{t-1}, M1) / f(y_t | D_{t-1}, M2), computed as
/// exp(logpdf1 - logpdf2).
double bayes_factor_step(const StudentTParams& forecast1, const StudentTParams& forecast2,
                         const Vector& y_t);

/// Arithmetic mean of a nonempty Bayes factor path.
double average_bayes_factor(const std::vector<double>& bf_path);

/// Unconstrained minimum-variance weights w = m Sigma^-1 mu / (mu' Sigma^-1 mu);
/// satisfies w' mu = m exactly.
Vector portfolio_weights(const Matrix& sigma_hat, const PortfolioConfig& cfg);

/// Sequential portfolio exercise over one-step forecast covariances.
PortfolioResult portfolio_run(const std::vector<Matrix>& forecast_cov_path, const Matrix& returns,
                              const PortfolioConfig& cfg);

}  // namespace uwar
