#include "uwar/filter.hpp"

#include <cmath>
#include <stdexcept>

namespace uwar {

namespace {

void check_psd(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || !is_symmetric(m, 1e-8))
    throw std::invalid_argument(std::string(what) + ": matrix must be symmetric");
  const Vector eig = sym_eigenvalues(m);
  if (eig(0) < -1e-10 * std::max(1.0, max_abs(m)))
    throw std::invalid_argument(std::string(what) + ": matrix is not positive semidefinite");
}

}  // namespace

LambdaPolicy LambdaPolicy::fixed(std::vector<Matrix> seq) {
  if (seq.empty()) throw std::invalid_argument("LambdaPolicy::fixed: empty sequence");
  for (const Matrix& m : seq) check_psd(m, "LambdaPolicy::fixed");
  LambdaPolicy out;
  out.seq_ = std::move(seq);
  return out;
}

Matrix LambdaPolicy::at(int t, Eigen::Index dim) const {
  if (seq_.empty()) return Matrix::Zero(dim, dim);
  const Matrix& m = seq_.size() == 1 ? seq_.front() : seq_.at(static_cast<size_t>(t - 1));
  if (m.rows() != dim)
    throw std::invalid_argument("LambdaPolicy: dimension mismatch at step " + std::to_string(t));
  return m;
}

FilterState init_state(const Matrix& sigma0_hat, const Hyperparams& hp) {
  if (sigma0_hat.rows() != hp.p)
    throw std::invalid_argument("init_state: sigma0_hat dimension mismatch");
  FilterState s;
  s.t = 0;
  s.df = hp.post_df();
  s.F = pd_inverse(sigma0_hat) / s.df;
  return s;
}

PriorState predict(const FilterState& state, const Matrix& a, const Matrix& lambda_t,
                   const Hyperparams& hp) {
  if (a.rows() != state.F.rows() || a.cols() != state.F.rows())
    throw std::invalid_argument("predict: AR matrix dimension mismatch");
  PriorState prior;
  prior.t = state.t + 1;
  prior.df = hp.prior_df();
  prior.R = symmetrize(hp.k * a * state.F * a.transpose() + lambda_t);
  // Singular A with a PSD lambda loses positive definiteness; fail loudly.
  Eigen::LLT<Matrix> llt(prior.R);
  if (llt.info() != Eigen::Success)
    throw std::domain_error("predict: prior scale is not positive definite at t = " +
                            std::to_string(prior.t));
  return prior;
}

FilterState update(const PriorState& prior, const Vector& e_t, const Hyperparams& hp) {
  if (e_t.size() != prior.R.rows())
    throw std::invalid_argument("update: residual dimension mismatch");
  const Vector re = prior.R * e_t;
  const double q = 1.0 + e_t.dot(re);
  if (!std::isfinite(q) || q <= 0.0)
    throw std::runtime_error("update: degenerate update (1 + e'Re not positive) at t = " +
                             std::to_string(prior.t));
  FilterState s;
  s.t = prior.t;
  s.df = hp.post_df();
  s.F = symmetrize(prior.R - (re * re.transpose()) / q);
  Eigen::LLT<Matrix> llt(s.F);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("update: posterior scale lost positive definiteness at t = " +
                             std::to_string(prior.t));
  return s;
}

StudentTParams forecast(const PriorState& prior, const Vector& mu, const Hyperparams& hp) {
  if (mu.size() != prior.R.rows())
    throw std::invalid_argument("forecast: mean dimension mismatch");
  StudentTParams fc;
  fc.df = hp.forecast_df();
  fc.location = mu;
  fc.spread = pd_inverse(prior.R) / fc.df;
  return fc;
}

std::optional<Matrix> forecast_covariance(const StudentTParams& fc) {
  if (!(fc.df > 2.0)) return std::nullopt;
  return fc.df / (fc.df - 2.0) * fc.spread;
}

Matrix volatility_ar_matrix(const Matrix& a, const Hyperparams& hp) {
  Eigen::FullPivLU<Matrix> lu(a.transpose());
  if (!lu.isInvertible()) throw std::domain_error("volatility_ar_matrix: singular AR matrix");
  return std::sqrt(hp.c) * lu.inverse();
}

std::pair<Matrix, Matrix> companion_embed(const std::vector<Matrix>& a_list) {
  if (a_list.empty()) throw std::invalid_argument("companion_embed: need at least one block");
  const Eigen::Index p = a_list.front().rows();
  for (const Matrix& blk : a_list)
    if (blk.rows() != p || blk.cols() != p)
      throw std::invalid_argument("companion_embed: inconsistent block dimensions");
  const Eigen::Index d = static_cast<Eigen::Index>(a_list.size());
  Matrix big = Matrix::Zero(d * p, d * p);
  for (Eigen::Index j = 0; j < d; ++j) big.block(0, j * p, p, p) = a_list[static_cast<size_t>(j)];
  for (Eigen::Index j = 1; j < d; ++j) big.block(j * p, (j - 1) * p, p, p) = Matrix::Identity(p, p);
  Matrix j_sel = Matrix::Zero(p, d * p);
  j_sel.leftCols(p) = Matrix::Identity(p, p);
  return {big, j_sel};
}

RunOutput filter_run(const Matrix& returns, const Vector& mu, const Matrix& sigma0_hat,
                     const Matrix& a, const Hyperparams& hp, const LambdaPolicy& lambda) {
  const Eigen::Index p = returns.cols();
  const Eigen::Index m = a.rows();
  if (m != hp.p) throw std::invalid_argument("filter_run: hyperparameters do not match state dim");
  if (m % p != 0) throw std::invalid_argument("filter_run: state dim must be a multiple of p");
  if (mu.size() != p) throw std::invalid_argument("filter_run: mean dimension mismatch");
  const Eigen::Index d = m / p;

  Matrix sigma0_big = Matrix::Zero(m, m);
  for (Eigen::Index j = 0; j < d; ++j) sigma0_big.block(j * p, j * p, p, p) = sigma0_hat;

  RunOutput out;
  out.hp = hp;
  out.obs_dim = static_cast<int>(p);
  FilterState state = init_state(sigma0_big, hp);
  out.F0 = state.F;
  out.steps.reserve(static_cast<size_t>(returns.rows()));
  out.F_path.reserve(static_cast<size_t>(returns.rows()));

  const double dn = hp.forecast_df();
  const double df_y = dn + static_cast<double>(m - p);  // = dn when d = 1

  for (Eigen::Index t = 0; t < returns.rows(); ++t) {
    const PriorState prior = predict(state, a, lambda.at(static_cast<int>(t) + 1, m), hp);
    const Vector e = returns.row(t).transpose() - mu;

    StepRecord rec;
    const Matrix s_lead = prior.R.topLeftCorner(p, p);
    const Matrix s_inv = pd_inverse(s_lead);
    rec.forecast.df = df_y;
    rec.forecast.location = mu;
    rec.forecast.spread = s_inv / df_y;
    rec.log_pred_density = student_t_logpdf(returns.row(t).transpose(), rec.forecast);
    rec.pred_cov = s_inv / (df_y - 2.0);
    rec.pred_vol_mode = s_inv / (prior.df + p + 1);

    Vector e_state = Vector::Zero(m);
    e_state.head(p) = e;
    state = update(prior, e_state, hp);

    const Matrix g_lead = state.F.topLeftCorner(p, p);
    const Matrix g_inv = pd_inverse(g_lead);
    rec.post_mean = g_inv / (state.df - p - 1);
    rec.post_mode = g_inv / (state.df + p + 1);

    out.cumulative_log_predictive += rec.log_pred_density;
    out.steps.push_back(std::move(rec));
    out.F_path.push_back(state.F);
  }
  out.final_state = state;
  return out;
}

}  // namespace uwar
