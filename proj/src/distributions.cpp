#include "uwar/distributions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace uwar {

Matrix sample_wishart(Rng& rng, const WishartParams& params) {
  const Eigen::Index p = params.scale.rows();
  if (p < 1) throw std::invalid_argument("sample_wishart: empty scale");
  if (!(params.df > static_cast<double>(p - 1)))
    throw std::invalid_argument("sample_wishart: df must exceed p - 1");
  const Matrix u = choleski_upper(params.scale);
  // Lower-triangular Bartlett factor: T_ii^2 ~ chi2(df - i), N(0,1) below.
  Matrix t = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) t(i, j) = rng.normal();
    t(i, i) = std::sqrt(rng.chi_square(params.df - static_cast<double>(i)));
  }
  const Matrix m = t.transpose() * u;  // draw = m' m = u' t t' u
  return symmetrize(m.transpose() * m);
}

Matrix sample_singular_wishart_rank_b(Rng& rng, int b, int p) {
  if (b < 1 || b > p - 1)
    throw std::invalid_argument("sample_singular_wishart_rank_b: need 1 <= b <= p - 1");
  Matrix z(p, b);
  for (Eigen::Index j = 0; j < b; ++j)
    for (Eigen::Index i = 0; i < p; ++i) z(i, j) = rng.normal();
  return z * z.transpose();
}

Matrix sample_singular_beta(Rng& rng, const SingularBetaParams& params) {
  const int p = params.dim;
  const double a = 2.0 * params.a_half;
  const double b_real = 2.0 * params.b_half;
  const int b = static_cast<int>(std::lround(b_real));
  if (p < 2) throw std::invalid_argument("sample_singular_beta: dim must be >= 2");
  if (std::abs(b_real - b) > 1e-12 || b < 1 || b > p - 1)
    throw std::invalid_argument("sample_singular_beta: b must be an integer in [1, p-1]");
  if (!(a > static_cast<double>(p - 1)))
    throw std::invalid_argument("sample_singular_beta: requires a > p - 1");

  // X ~ W_p(a, I), Y = Z Z' ~ W_p(b, I) singular; with U the upper Choleski
  // factor of X + Y, return B = I - U'^-1 Y U^-1 = U'^-1 X U^-1.
  const Matrix x = sample_wishart(rng, {a, Matrix::Identity(p, p)});
  Matrix z(p, b);
  for (Eigen::Index j = 0; j < b; ++j)
    for (Eigen::Index i = 0; i < p; ++i) z(i, j) = rng.normal();
  const Matrix u = choleski_upper(symmetrize(x + z * z.transpose()));
  const Matrix w = u.transpose().triangularView<Eigen::Lower>().solve(z);
  return symmetrize(Matrix::Identity(p, p) - w * w.transpose());
}

double singular_beta_positive_eigenvalue(const Matrix& b) {
  if (b.rows() != b.cols() || !is_symmetric(b, 1e-8))
    throw std::invalid_argument("singular_beta_positive_eigenvalue: input must be symmetric");
  const Eigen::Index p = b.rows();
  const double xi = static_cast<double>(p) - b.trace();
  const Vector eig = sym_eigenvalues(Matrix::Identity(p, p) - b);  // ascending
  if (p >= 2 && eig(p - 2) > 1e-8)
    throw std::domain_error("singular_beta_positive_eigenvalue: I - B is not rank one");
  if (!(xi > 1e-12))
    throw std::domain_error("singular_beta_positive_eigenvalue: degenerate draw, xi <= 0");
  return xi;
}

Matrix sample_matrix_normal(Rng& rng, const MatrixNormalParams& params) {
  const Eigen::Index p = params.mean.rows();
  const Matrix uv = choleski_upper(params.left_cov);
  const Matrix uw = choleski_upper(params.right_cov);
  Matrix z(p, params.mean.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    for (Eigen::Index i = 0; i < z.rows(); ++i) z(i, j) = rng.normal();
  return params.mean + uv.transpose() * z * uw;
}

double student_t_logpdf(const Vector& y, const StudentTParams& params) {
  const Eigen::Index p = y.size();
  if (!(params.df > 0.0)) throw std::invalid_argument("student_t_logpdf: df must be positive");
  if (params.location.size() != p || params.spread.rows() != p)
    throw std::invalid_argument("student_t_logpdf: dimension mismatch");
  Eigen::LLT<Matrix> llt(symmetrize(params.spread));
  if (llt.info() != Eigen::Success)
    throw std::domain_error("student_t_logpdf: spread is not positive definite");
  const Vector e = y - params.location;
  const double quad = e.dot(llt.solve(e));
  const double log_det = 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
  const double nu = params.df;
  return std::lgamma(0.5 * (nu + p)) - std::lgamma(0.5 * nu) -
         0.5 * p * std::log(nu * std::numbers::pi) - 0.5 * log_det -
         0.5 * (nu + p) * std::log1p(quad / nu);
}

double log_multigamma(int p, double x) {
  if (p < 1) throw std::invalid_argument("log_multigamma: p must be >= 1");
  if (!(x > 0.5 * (p - 1)))
    throw std::invalid_argument("log_multigamma: requires x > (p-1)/2");
  double out = 0.25 * p * (p - 1) * std::log(std::numbers::pi);
  for (int j = 1; j <= p; ++j) out += std::lgamma(x + 0.5 * (1 - j));
  return out;
}

InvWishartSummary inv_wishart_mean_mode(const WishartParams& params) {
  const Eigen::Index p = params.scale.rows();
  const Matrix f_inv = pd_inverse(params.scale);
  InvWishartSummary out;
  out.mode = f_inv / (params.df + p + 1);
  if (params.df > static_cast<double>(p + 1)) out.mean = f_inv / (params.df - p - 1);
  return out;
}

}  // namespace uwar
