#pragma once

#include <optional>

#include "uwar/linalg.hpp"
#include "uwar/rng.hpp"

namespace uwar {

struct WishartParams {
  double df = 0.0;   // degrees of freedom, > p - 1 for non-singular sampling
  Matrix scale;      // symmetric positive definite p x p
};

struct SingularBetaParams {
  double a_half = 0.0;  // a / 2 with a > p - 1
  double b_half = 0.5;  // b / 2 with b a positive integer, b <= p - 1
  int dim = 0;
};

struct MatrixNormalParams {
  Matrix mean;       // p x p
  Matrix left_cov;   // V, positive definite
  Matrix right_cov;  // W, positive definite; cov(vec) = W (x) V
};

struct StudentTParams {
  double df = 0.0;   // > 0
  Vector location;
  Matrix spread;     // S in the quadratic form df^-1 e' S^-1 e, positive definite
};

/// Wishart draw via the Bartlett construction; E = df * scale.
Matrix sample_wishart(Rng& rng, const WishartParams& params);

/// Y = sum of b outer products of standard normal p-vectors; rank b a.s.
/// Requires 1 <= b <= p - 1.
Matrix sample_singular_wishart_rank_b(Rng& rng, int b, int p);

/// Singular multivariate beta draw B with E(B) = a/(a+b) I; I - B is PSD of
/// rank b, and all eigenvalues of B lie in (0, 1].
Matrix sample_singular_beta(Rng& rng, const SingularBetaParams& params);

/// The only positive eigenvalue of I - B when I - B is PSD of rank one,
/// computed as p - trace(B). Throws std::domain_error when I - B has a
/// second eigenvalue above 1e-8 or when the eigenvalue is not positive.
double singular_beta_positive_eigenvalue(const Matrix& b);

/// Draw with vec(A) ~ N(vec(mean), right_cov (x) left_cov).
Matrix sample_matrix_normal(Rng& rng, const MatrixNormalParams& params);

/// log density of the multivariate Student t:
/// log Gamma((df+p)/2) - log Gamma(df/2) - (p/2) log(df pi)
///   - log|S|/2 - ((df+p)/2) log(1 + df^-1 (y-mu)' S^-1 (y-mu)).
double student_t_logpdf(const Vector& y, const StudentTParams& params);

/// log of the multivariate gamma function, x > (p-1)/2.
double log_multigamma(int p, double x);

struct InvWishartSummary {
  std::optional<Matrix> mean;  // F^-1 / (df - p - 1), defined for df > p + 1
  Matrix mode;                 // F^-1 / (df + p + 1)
};

/// Mean and mode of Sigma = Phi^-1 when Phi ~ W_p(df, F).
InvWishartSummary inv_wishart_mean_mode(const WishartParams& params);

}  // namespace uwar
