#include "uwar/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace uwar {

LogPosteriorPathResult log_posterior_path(const std::vector<Matrix>& sigma_path, const Matrix& a,
                                          const Hyperparams& hp, const LambdaPolicy& lambda,
                                          const Matrix& returns, const Vector& mu,
                                          const Matrix& sigma0, const Matrix& f0) {
  const int p = hp.p;
  const auto n_steps = static_cast<Eigen::Index>(sigma_path.size());
  if (returns.rows() != n_steps || (n_steps > 0 && returns.cols() != p))
    throw std::invalid_argument("log_posterior_path: returns/path length mismatch");

  const Matrix sigma0_inv = pd_inverse(sigma0);
  LogPosteriorPathResult out;
  out.lp = 3.0 * static_cast<double>(n_steps) * p * std::log(hp.k) -
           0.5 * (a * f0 * a.transpose() * sigma0_inv).trace() -
           0.5 * (2.0 * hp.n + p) * log_det_pd(sigma0);

  Eigen::FullPivLU<Matrix> a_lu(a);
  if (!a_lu.isInvertible()) throw std::domain_error("log_posterior_path: singular AR matrix");
  const Matrix a_inv = a_lu.inverse();

  Matrix phi_prev = sigma0_inv;
  for (Eigen::Index t = 0; t < n_steps; ++t) {
    const Matrix& sigma_t = sigma_path[static_cast<size_t>(t)];
    const Matrix phi_t = pd_inverse(sigma_t);
    const Matrix lambda_t = lambda.at(static_cast<int>(t) + 1, p);
    const Vector e = returns.row(t).transpose() - mu;

    out.lp += -0.5 * e.dot(phi_t * e) - 0.5 * (3.0 * p + 2.0) * log_det_pd(sigma_t);

    bool degenerate = false;
    const Matrix shifted = symmetrize(phi_t - lambda_t);
    Eigen::LLT<Matrix> llt(shifted);
    if (llt.info() == Eigen::Success) {
      out.lp += (p + 1.0) * 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
    } else {
      degenerate = true;
    }

    // Reconstructed multiplicative shock between consecutive precisions.
    const Matrix u = choleski_upper(phi_prev);
    const Matrix inner = a_inv * shifted * a_inv.transpose() / hp.k;
    // B = U'^-1 inner U^-1 = U'^-1 (U'^-1 inner)', inner symmetric.
    const Matrix half = u.transpose().triangularView<Eigen::Lower>().solve(inner);
    const Matrix b_t = u.transpose().triangularView<Eigen::Lower>().solve(half.transpose());
    const double xi = static_cast<double>(p) - b_t.trace();
    if (xi > 0.0 && std::isfinite(xi)) {
      out.lp += -0.5 * p * std::log(xi);
    } else {
      degenerate = true;
    }

    if (degenerate) ++out.degenerate_steps;
    phi_prev = phi_t;
  }
  return out;
}

double bayes_factor_step(const StudentTParams& forecast1, const StudentTParams& forecast2,
                         const Vector& y_t) {
  return std::exp(student_t_logpdf(y_t, forecast1) - student_t_logpdf(y_t, forecast2));
}

double average_bayes_factor(const std::vector<double>& bf_path) {
  if (bf_path.empty()) throw std::invalid_argument("average_bayes_factor: empty path");
  double sum = 0.0;
  for (double v : bf_path) sum += v;
  return sum / static_cast<double>(bf_path.size());
}

Vector portfolio_weights(const Matrix& sigma_hat, const PortfolioConfig& cfg) {
  if (cfg.mu.size() != sigma_hat.rows())
    throw std::invalid_argument("portfolio_weights: dimension mismatch");
  if (!(cfg.mu.norm() > 0.0)) throw std::invalid_argument("portfolio_weights: mu must be nonzero");
  const Vector sig_inv_mu = pd_inverse(sigma_hat) * cfg.mu;
  const double denom = cfg.mu.dot(sig_inv_mu);
  return (cfg.m / denom) * sig_inv_mu;
}

PortfolioResult portfolio_run(const std::vector<Matrix>& forecast_cov_path, const Matrix& returns,
                              const PortfolioConfig& cfg) {
  const auto n_steps = static_cast<Eigen::Index>(forecast_cov_path.size());
  if (returns.rows() != n_steps)
    throw std::invalid_argument("portfolio_run: returns/path length mismatch");
  PortfolioResult out;
  out.risk_path.reserve(static_cast<size_t>(n_steps));
  out.realized_returns.reserve(static_cast<size_t>(n_steps));
  double cond_sum = 0.0;
  for (Eigen::Index t = 0; t < n_steps; ++t) {
    const Matrix& cov = forecast_cov_path[static_cast<size_t>(t)];
    const Vector w = portfolio_weights(cov, cfg);
    const double risk = w.dot(cov * w);
    out.risk_path.push_back(risk);
    out.realized_returns.push_back(w.dot(returns.row(t).transpose()));
    cond_sum += cfg.m / std::sqrt(risk);
  }
  if (n_steps > 0) {
    double risk_sum = 0.0;
    for (double r : out.risk_path) risk_sum += r;
    out.avg_risk = risk_sum / static_cast<double>(n_steps);
    out.sharpe_conditional = cond_sum / static_cast<double>(n_steps);

    double mean_r = 0.0;
    for (double r : out.realized_returns) mean_r += r;
    mean_r /= static_cast<double>(n_steps);
    double var_r = 0.0;
    for (double r : out.realized_returns) var_r += (r - mean_r) * (r - mean_r);
    const double sd = n_steps > 1 ? std::sqrt(var_r / static_cast<double>(n_steps - 1)) : 0.0;
    out.sharpe_realized = sd > 0.0 ? mean_r / sd : 0.0;
  }
  return out;
}

}  // namespace uwar
