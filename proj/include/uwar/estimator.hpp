#pragma once

#include <vector>

#include "uwar/filter.hpp"
#include "uwar/hyperparams.hpp"
#include "uwar/linalg.hpp"

namespace uwar {

// Matrix-normal prior on the AR matrix: vec(A) ~ N(vec(M), W (x) V).
struct ArPrior {
  Matrix M;
  Matrix V;
  Matrix W;
};

/// V = W = scale * I, M = mean_diag * I. The vague prior of the empirical
/// study is mean_diag = 0, scale = 1000.
ArPrior make_ar_prior(int p, double mean_diag, double scale);

// One filtered step kept for the estimation of A: the posterior scale
// entering the step, the residual, and Lambda (empty matrix means zero).
struct HistoryStep {
  Matrix F;        // F_{j-1}
  Vector e;        // e_j
  Matrix lambda;   // Lambda_j, 0 x 0 for zero
};

using EstimationHistory = std::vector<HistoryStep>;

struct NewtonReport {
  Matrix A_hat;
  int iterations = 0;
  double final_step_norm = 0.0;
  bool converged = false;
  std::vector<double> log_posterior_trace;
  int gradient_fallbacks = 0;
};

// The log posterior of A combines the matrix-normal log kernel with the
// one-step predictive terms
//   sum_j [ log|R_j|/2 - ((delta n + p)/2) log(1 + e_j' R_j e_j) ],
//   R_j = k A F_{j-1} A' + Lambda_j,
// which is sum_j log f(y_j | A, D_{j-1}) up to constants free of A. Note the
// log|R_j|/2 carries the Wishart normalization of the prior scale; dropping
// it (as a literal reading of the product form suggests) leaves an objective
// that increases in ||A|| for every p >= 2 and pushes the mode to the prior
// boundary.
double log_posterior_A(const Matrix& a, const EstimationHistory& hist, const ArPrior& prior,
                       const Hyperparams& hp);

/// d log|B X C X' + B G + I| / dX = 2 B (X C X' B + B G + I)^-1 X C for
/// symmetric B, C, G. Throws std::domain_error when the inner matrix is
/// singular.
Matrix dlogdet_quadratic(const Matrix& x, const Matrix& b, const Matrix& c, const Matrix& g);

/// Gradient of log_posterior_A with respect to A (same shape as A):
///   -V^-1 (A - M) W^-1 + sum_j (R_j^-1 - (delta n + p) q_j^-1 e_j e_j') A k F_{j-1},
/// q_j = 1 + e_j' R_j e_j. The rank-one identity
/// e e' (R e e' + I)^-1 = e e' / q collapses the inner inverse of the
/// matrix-form derivative.
Matrix grad_log_posterior_A(const Matrix& a, const EstimationHistory& hist, const ArPrior& prior,
                            const Hyperparams& hp);

/// Hessian of log_posterior_A as a function of vec(A), p^2 x p^2, symmetric
/// up to roundoff.
Matrix hessian_log_posterior_A(const Matrix& a, const EstimationHistory& hist,
                               const ArPrior& prior, const Hyperparams& hp);

/// Newton-Raphson ascent from a0 with a halving line search, a damped
/// gradient fallback when the Hessian is not negative definite, and a
/// near-singularity guard |det A| >= 1e-12 ||A||_F^p on every candidate.
/// Accepted steps never decrease the log posterior. Convergence: Frobenius
/// step norm <= tol (or vanishing gradient) within max_iter iterations.
NewtonReport estimate_mode(const Matrix& a0, const EstimationHistory& hist, const ArPrior& prior,
                           const Hyperparams& hp, double tol = 1e-4, int max_iter = 50);

struct FitSchedule {
  int refit_every = 1;  // 0 = never re-estimate (fixed A)
  double tol = 1e-4;
  int max_iter = 50;
};

struct SequentialFit {
  RunOutput run;
  std::vector<Matrix> a_path;         // AR matrix used at each step
  std::vector<NewtonReport> reports;  // one per refit
  Matrix a_final;
  EstimationHistory history;
};

/// Interleaves mode estimation with the filter recursion: before step t the
/// AR matrix is re-estimated from the history through t-1 on the schedule,
/// warm-started at the previous estimate, then the step is filtered with the
/// current estimate. a0 defaults to the identity.
SequentialFit fit_sequential(const Matrix& returns, const Vector& mu, const Matrix& sigma0_hat,
                             const ArPrior& prior, const Hyperparams& hp,
                             const FitSchedule& schedule, const LambdaPolicy& lambda,
                             Matrix a0 = Matrix());

}  // namespace uwar
