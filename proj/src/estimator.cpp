#include "uwar/estimator.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace uwar {

namespace {

struct PreparedStep {
  Matrix c;       // k F_{j-1}
  Vector e;
  Matrix lambda;  // may be 0 x 0
  bool has_lambda = false;
};

std::vector<PreparedStep> prepare(const EstimationHistory& hist, const Hyperparams& hp) {
  std::vector<PreparedStep> out;
  out.reserve(hist.size());
  for (const HistoryStep& s : hist) {
    if (s.F.rows() != hp.p || s.e.size() != hp.p)
      throw std::invalid_argument("estimation history dimension mismatch");
    PreparedStep ps;
    ps.c = hp.k * s.F;
    ps.e = s.e;
    ps.has_lambda = s.lambda.size() > 0;
    if (ps.has_lambda && s.lambda.rows() != hp.p)
      throw std::invalid_argument("estimation history lambda dimension mismatch");
    ps.lambda = s.lambda;
    out.push_back(std::move(ps));
  }
  return out;
}

Matrix prior_grad(const Matrix& a, const ArPrior& prior, const Matrix& v_inv,
                  const Matrix& w_inv) {
  return -v_inv * (a - prior.M) * w_inv;
}

double prior_logkernel(const Matrix& a, const ArPrior& prior, const Matrix& v_inv,
                       const Matrix& w_inv) {
  const Matrix d = a - prior.M;
  return -0.5 * (v_inv * d * w_inv * d.transpose()).trace();
}

// Log posterior evaluated without throwing: nullopt when some R_j is not
// positive definite (candidate rejected by the line search).
std::optional<double> try_log_posterior(const Matrix& a, const std::vector<PreparedStep>& steps,
                                        const ArPrior& prior, const Matrix& v_inv,
                                        const Matrix& w_inv, double nu_h) {
  double ll = prior_logkernel(a, prior, v_inv, w_inv);
  for (const PreparedStep& s : steps) {
    Matrix r = a * s.c * a.transpose();
    if (s.has_lambda) r += s.lambda;
    Eigen::LLT<Matrix> llt(symmetrize(r));
    if (llt.info() != Eigen::Success) return std::nullopt;
    const double log_det = 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
    const double q = 1.0 + s.e.dot(r.selfadjointView<Eigen::Lower>() * s.e);
    if (!(q > 0.0) || !std::isfinite(q)) return std::nullopt;
    ll += 0.5 * log_det - 0.5 * nu_h * std::log(q);
  }
  return std::isfinite(ll) ? std::optional<double>(ll) : std::nullopt;
}

// h += coeff * (P (x) Q), vec convention vec(Q X P') = (P (x) Q) vec(X).
void add_kron(Matrix& h, double coeff, const Matrix& pm, const Matrix& qm) {
  const Eigen::Index p = pm.rows();
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < p; ++i)
      h.block(i * p, j * p, p, p) += (coeff * pm(i, j)) * qm;
}

// h += coeff * (P (x) Q) K_p, the column permutation beta |-> vec-transpose.
void add_kron_k(Matrix& h, double coeff, const Matrix& pm, const Matrix& qm) {
  const Eigen::Index p = pm.rows();
  for (Eigen::Index c2 = 0; c2 < p; ++c2)
    for (Eigen::Index r2 = 0; r2 < p; ++r2)
      for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index r = 0; r < p; ++r)
          h(i * p + r, c2 * p + r2) += coeff * pm(i, r2) * qm(r, c2);
}

double log_abs_det(const Matrix& a) {
  Eigen::PartialPivLU<Matrix> lu(a);
  double out = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double d = std::abs(lu.matrixLU()(i, i));
    if (d == 0.0) return -std::numeric_limits<double>::infinity();
    out += std::log(d);
  }
  return out;
}

bool near_singular(const Matrix& a) {
  const double norm = a.norm();
  if (!(norm > 0.0)) return true;
  return log_abs_det(a) < std::log(1e-12) + a.rows() * std::log(norm);
}

}  // namespace

ArPrior make_ar_prior(int p, double mean_diag, double scale) {
  if (p < 1 || !(scale > 0.0)) throw std::invalid_argument("make_ar_prior: bad arguments");
  ArPrior out;
  out.M = mean_diag * Matrix::Identity(p, p);
  out.V = scale * Matrix::Identity(p, p);
  out.W = scale * Matrix::Identity(p, p);
  return out;
}

double log_posterior_A(const Matrix& a, const EstimationHistory& hist, const ArPrior& prior,
                       const Hyperparams& hp) {
  const auto steps = prepare(hist, hp);
  const Matrix v_inv = pd_inverse(prior.V);
  const Matrix w_inv = pd_inverse(prior.W);
  const auto ll = try_log_posterior(a, steps, prior, v_inv, w_inv, hp.prior_df() + 1.0);
  if (!ll)
    throw std::domain_error("log_posterior_A: prior scale not positive definite (singular A?)");
  return *ll;
}

Matrix dlogdet_quadratic(const Matrix& x, const Matrix& b, const Matrix& c, const Matrix& g) {
  const Eigen::Index p = x.rows();
  if (!is_symmetric(b, 1e-8) || !is_symmetric(c, 1e-8) || !is_symmetric(g, 1e-8))
    throw std::invalid_argument("dlogdet_quadratic: B, C, G must be symmetric");
  const Matrix inner = x * c * x.transpose() * b + b * g + Matrix::Identity(p, p);
  Eigen::FullPivLU<Matrix> lu(inner);
  if (!lu.isInvertible()) throw std::domain_error("dlogdet_quadratic: singular inner matrix");
  return 2.0 * b * lu.solve(x * c);
}

Matrix grad_log_posterior_A(const Matrix& a, const EstimationHistory& hist, const ArPrior& prior,
                            const Hyperparams& hp) {
  const auto steps = prepare(hist, hp);
  const Matrix v_inv = pd_inverse(prior.V);
  const Matrix w_inv = pd_inverse(prior.W);
  const double nu_h = hp.prior_df() + 1.0;
  Matrix grad = prior_grad(a, prior, v_inv, w_inv);
  for (const PreparedStep& s : steps) {
    Matrix r = symmetrize(a * s.c * a.transpose());
    if (s.has_lambda) r += s.lambda;
    Eigen::LLT<Matrix> llt(r);
    if (llt.info() != Eigen::Success)
      throw std::domain_error("grad_log_posterior_A: prior scale not positive definite");
    const Matrix ac = a * s.c;
    const double q = 1.0 + s.e.dot(r * s.e);
    const Vector ace = ac.transpose() * s.e;  // (A C)' e
    grad += llt.solve(ac) - (nu_h / q) * s.e * ace.transpose();
  }
  return grad;
}

Matrix hessian_log_posterior_A(const Matrix& a, const EstimationHistory& hist,
                               const ArPrior& prior, const Hyperparams& hp) {
  const Eigen::Index p = a.rows();
  const auto steps = prepare(hist, hp);
  const Matrix v_inv = pd_inverse(prior.V);
  const Matrix w_inv = pd_inverse(prior.W);
  const double nu_h = hp.prior_df() + 1.0;

  Matrix h = Matrix::Zero(p * p, p * p);
  add_kron(h, -1.0, w_inv, v_inv);

  for (const PreparedStep& s : steps) {
    Matrix r = symmetrize(a * s.c * a.transpose());
    if (s.has_lambda) r += s.lambda;
    Eigen::LLT<Matrix> llt(r);
    if (llt.info() != Eigen::Success)
      throw std::domain_error("hessian_log_posterior_A: prior scale not positive definite");
    const Matrix r_inv = symmetrize(llt.solve(Matrix::Identity(p, p)));
    const Matrix ac = a * s.c;
    const double q = 1.0 + s.e.dot(r * s.e);
    const Matrix e_outer = s.e * s.e.transpose();

    // d/dA of (R^-1 - nu_h q^-1 e e') A C, split into five kron blocks.
    const Vector ace = ac.transpose() * s.e;
    const Vector v = vec(s.e * ace.transpose());  // vec(e e' A C)
    h += (2.0 * nu_h / (q * q)) * v * v.transpose();
    add_kron(h, -nu_h / q, s.c, e_outer);
    const Matrix t1 = s.c * a.transpose() * r_inv;  // C A' R^-1
    add_kron(h, -1.0, t1 * ac, r_inv);
    add_kron_k(h, -1.0, t1, r_inv * ac);
    add_kron(h, 1.0, s.c, r_inv);
  }
  return h;
}

NewtonReport estimate_mode(const Matrix& a0, const EstimationHistory& hist, const ArPrior& prior,
                           const Hyperparams& hp, double tol, int max_iter) {
  const Eigen::Index p = a0.rows();
  if (a0.cols() != p || p != hp.p) throw std::invalid_argument("estimate_mode: bad A0");
  const auto steps = prepare(hist, hp);
  const Matrix v_inv = pd_inverse(prior.V);
  const Matrix w_inv = pd_inverse(prior.W);
  const double nu_h = hp.prior_df() + 1.0;

  NewtonReport rep;
  Matrix a = a0;
  auto lp = try_log_posterior(a, steps, prior, v_inv, w_inv, nu_h);
  if (!lp) throw std::invalid_argument("estimate_mode: infeasible starting point");
  rep.log_posterior_trace.push_back(*lp);

  for (int it = 1; it <= max_iter; ++it) {
    const Matrix g = grad_log_posterior_A(a, hist, prior, hp);
    const Vector gv = vec(g);
    if (gv.norm() <= 1e-10 * (1.0 + std::abs(*lp))) {
      rep.converged = true;
      rep.final_step_norm = 0.0;
      break;
    }
    const Matrix h = symmetrize(hessian_log_posterior_A(a, hist, prior, hp));
    Vector dv;
    Eigen::LLT<Matrix> neg_h((-h).eval());
    if (neg_h.info() == Eigen::Success) dv = neg_h.solve(gv);
    if (neg_h.info() != Eigen::Success || !(dv.dot(gv) > 0.0)) {
      dv = gv / (1.0 + gv.norm());  // damped gradient ascent
      ++rep.gradient_fallbacks;
    }

    const Matrix dir = unvec(dv, p, p);
    bool accepted = false;
    double step_norm = 0.0;
    for (double alpha = 1.0; alpha >= 1e-10; alpha *= 0.5) {
      const Matrix cand = a + alpha * dir;
      if (near_singular(cand)) continue;
      const auto lp_cand = try_log_posterior(cand, steps, prior, v_inv, w_inv, nu_h);
      if (lp_cand && *lp_cand >= *lp) {
        step_norm = alpha * dir.norm();
        a = cand;
        lp = lp_cand;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // stuck; report best iterate, converged stays false

    rep.iterations = it;
    rep.final_step_norm = step_norm;
    rep.log_posterior_trace.push_back(*lp);
    if (step_norm <= tol) {
      rep.converged = true;
      break;
    }
  }
  rep.A_hat = a;
  return rep;
}

SequentialFit fit_sequential(const Matrix& returns, const Vector& mu, const Matrix& sigma0_hat,
                             const ArPrior& prior, const Hyperparams& hp,
                             const FitSchedule& schedule, const LambdaPolicy& lambda, Matrix a0) {
  const Eigen::Index p = returns.cols();
  const Eigen::Index m = hp.p;
  if (m % p != 0) throw std::invalid_argument("fit_sequential: state dim must be multiple of p");
  if (a0.size() == 0) a0 = Matrix::Identity(m, m);
  if (prior.M.rows() != m) throw std::invalid_argument("fit_sequential: prior dimension mismatch");

  const Eigen::Index d = m / p;
  Matrix sigma0_big = Matrix::Zero(m, m);
  for (Eigen::Index j = 0; j < d; ++j) sigma0_big.block(j * p, j * p, p, p) = sigma0_hat;

  SequentialFit fit;
  fit.run.hp = hp;
  fit.run.obs_dim = static_cast<int>(p);
  FilterState state = init_state(sigma0_big, hp);
  fit.run.F0 = state.F;

  Matrix a_cur = a0;
  const double df_y = hp.forecast_df() + static_cast<double>(m - p);

  for (Eigen::Index t = 0; t < returns.rows(); ++t) {
    const int steps_seen = static_cast<int>(t);
    if (schedule.refit_every > 0 && steps_seen >= 1 && steps_seen % schedule.refit_every == 0) {
      NewtonReport rep =
          estimate_mode(a_cur, fit.history, prior, hp, schedule.tol, schedule.max_iter);
      a_cur = rep.A_hat;
      fit.reports.push_back(std::move(rep));
    }

    const Matrix lambda_t = lambda.at(static_cast<int>(t) + 1, m);
    const PriorState prior_state = predict(state, a_cur, lambda_t, hp);
    const Vector e = returns.row(t).transpose() - mu;

    StepRecord rec;
    const Matrix s_lead = prior_state.R.topLeftCorner(p, p);
    const Matrix s_inv = pd_inverse(s_lead);
    rec.forecast.df = df_y;
    rec.forecast.location = mu;
    rec.forecast.spread = s_inv / df_y;
    rec.log_pred_density = student_t_logpdf(returns.row(t).transpose(), rec.forecast);
    rec.pred_cov = s_inv / (df_y - 2.0);
    rec.pred_vol_mode = s_inv / (prior_state.df + p + 1);

    Vector e_state = Vector::Zero(m);
    e_state.head(p) = e;

    HistoryStep hstep;
    hstep.F = state.F;
    hstep.e = e_state;
    if (!lambda.is_zero()) hstep.lambda = lambda_t;
    fit.history.push_back(std::move(hstep));

    state = update(prior_state, e_state, hp);

    const Matrix g_inv = pd_inverse(state.F.topLeftCorner(p, p));
    rec.post_mean = g_inv / (state.df - p - 1);
    rec.post_mode = g_inv / (state.df + p + 1);

    fit.run.cumulative_log_predictive += rec.log_pred_density;
    fit.run.steps.push_back(std::move(rec));
    fit.run.F_path.push_back(state.F);
    fit.a_path.push_back(a_cur);
  }
  fit.run.final_state = state;
  fit.a_final = a_cur;
  return fit;
}

}  // namespace uwar
