#include "uwar/simulate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "uwar/distributions.hpp"

namespace uwar {

namespace {

double digamma(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("digamma: x must be positive");
  double out = 0.0;
  while (x < 6.0) {
    out -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  out += std::log(x) - 0.5 * inv -
         inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
  return out;
}

// One multiplicative step X -> k A U(X)' B U(X) A' + lambda at dimension dim.
Matrix uwar_step(Rng& rng, const Matrix& x, const Matrix& a, const Hyperparams& hp,
                 const Matrix& lambda, int t) {
  const int dim = static_cast<int>(x.rows());
  const Matrix u = choleski_upper(x);
  Matrix shocked;
  if (dim == 1) {
    // Scalar beta(a/2, 1/2) via two gamma draws.
    const double ga = rng.gamma(0.5 * hp.a);
    const double gb = rng.gamma(0.5);
    shocked = x * (ga / (ga + gb));
  } else {
    const Matrix b = sample_singular_beta(rng, {0.5 * hp.a, 0.5, dim});
    shocked = u.transpose() * b * u;
  }
  Matrix next = symmetrize(hp.k * a * shocked * a.transpose() + lambda);
  Eigen::LLT<Matrix> llt(next);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("uwar generator lost positive definiteness at step " +
                             std::to_string(t));
  return next;
}

Matrix sample_cov(const Matrix& rows) {
  const Eigen::Index n = rows.rows();
  const Vector mean = rows.colwise().mean();
  const Matrix centered = rows.rowwise() - mean.transpose();
  return (centered.transpose() * centered) / static_cast<double>(n - 1);
}

}  // namespace

double expected_log_det_beta(const Hyperparams& hp) {
  return digamma(0.5 * (hp.a - hp.p + 1)) - digamma(0.5 * (hp.a + 1));
}

double log_det_drift(const Matrix& a, const Hyperparams& hp) {
  Eigen::PartialPivLU<Matrix> lu(a);
  double log_abs_det = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double d = std::abs(lu.matrixLU()(i, i));
    if (d == 0.0) return -std::numeric_limits<double>::infinity();
    log_abs_det += std::log(d);
  }
  return hp.p * std::log(hp.k) + 2.0 * log_abs_det + expected_log_det_beta(hp);
}

double drift_neutral_scale(const Hyperparams& hp) {
  return std::exp(-(hp.p * std::log(hp.k) + expected_log_det_beta(hp)) / (2.0 * hp.p));
}

Matrix generate_A(Rng& rng, const Hyperparams& hp, const GenerateAOptions& options) {
  const int p = hp.p;
  MatrixNormalParams mn;
  mn.mean = options.mean.size() > 0 ? options.mean : drift_neutral_scale(hp) * Matrix::Identity(p, p);
  mn.left_cov = options.v.size() > 0 ? options.v : 0.01 * Matrix::Identity(p, p);
  mn.right_cov = options.w.size() > 0 ? options.w : 0.01 * Matrix::Identity(p, p);
  for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
    const Matrix a = sample_matrix_normal(rng, mn);
    const double drift = log_det_drift(a, hp);
    if (std::isfinite(drift) && std::abs(drift) <= options.drift_band) return a;
  }
  throw std::runtime_error("generate_A: no acceptable draw within attempt budget");
}

std::vector<Matrix> generate_A_order2(Rng& rng, int p, double delta, double drift_band,
                                      int max_attempts) {
  const Hyperparams hp_big = make_hyperparams(delta, 2 * p);
  // |det A_big| = |det A_2|; pick the A_2 scale so the companion drift is
  // centered at zero, with a complex eigenvalue pair balancing the moduli.
  const double target = -(hp_big.p * std::log(hp_big.k) + expected_log_det_beta(hp_big));
  const double q = std::exp(target / (2.0 * p));
  MatrixNormalParams mn1{0.8 * Matrix::Identity(p, p), 0.01 * Matrix::Identity(p, p),
                         0.01 * Matrix::Identity(p, p)};
  MatrixNormalParams mn2{-q * Matrix::Identity(p, p), 0.01 * Matrix::Identity(p, p),
                         0.01 * Matrix::Identity(p, p)};
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::vector<Matrix> a_list{sample_matrix_normal(rng, mn1), sample_matrix_normal(rng, mn2)};
    const Matrix a_big = companion_embed(a_list).first;
    const double drift = log_det_drift(a_big, hp_big);
    if (std::isfinite(drift) && std::abs(drift) <= drift_band) return a_list;
  }
  throw std::runtime_error("generate_A_order2: no acceptable draw within attempt budget");
}

std::vector<Matrix> generate_precision_uwar(Rng& rng, const std::vector<Matrix>& a_list,
                                            double delta, const Matrix& phi0, int n,
                                            const LambdaPolicy& lambda) {
  if (a_list.empty()) throw std::invalid_argument("generate_precision_uwar: empty AR list");
  const int p = static_cast<int>(phi0.rows());
  const int d = static_cast<int>(a_list.size());
  std::vector<Matrix> path;
  path.reserve(static_cast<size_t>(n));

  if (d == 1) {
    const Hyperparams hp = make_hyperparams(delta, p);
    Matrix phi = phi0;
    for (int t = 1; t <= n; ++t) {
      phi = uwar_step(rng, phi, a_list.front(), hp, lambda.at(t, p), t);
      path.push_back(phi);
    }
    return path;
  }

  const auto [a_big, j_sel] = companion_embed(a_list);
  const int m = d * p;
  const Hyperparams hp_big = make_hyperparams(delta, m);
  Matrix psi = Matrix::Zero(m, m);
  for (int j = 0; j < d; ++j) psi.block(j * p, j * p, p, p) = phi0;
  for (int t = 1; t <= n; ++t) {
    // Compensation blocks of the companion noise: -A_j Phi_{t-j}, taken at
    // the realized diagonal blocks of the previous state.
    Matrix comp = Matrix::Zero(m, m);
    comp.topLeftCorner(p, p) = lambda.at(t, p);
    for (int j = 1; j < d; ++j) {
      const Matrix blk =
          -a_list[static_cast<size_t>(j - 1)] * psi.block((j - 1) * p, (j - 1) * p, p, p);
      comp.block(0, j * p, p, p) = blk;
      comp.block(j * p, 0, p, p) = blk.transpose();
    }
    psi = uwar_step(rng, psi, a_big, hp_big, comp, t);
    path.push_back(psi.topLeftCorner(p, p));
  }
  return path;
}

std::vector<Matrix> generate_volatility_uwar(Rng& rng, const Matrix& a, const Hyperparams& hp,
                                             const Matrix& sigma0, int n) {
  std::vector<Matrix> path;
  path.reserve(static_cast<size_t>(n));
  Matrix sigma = sigma0;
  const Matrix zero = Matrix::Zero(sigma0.rows(), sigma0.cols());
  for (int t = 1; t <= n; ++t) {
    sigma = uwar_step(rng, sigma, a, hp, zero, t);
    path.push_back(sigma);
  }
  return path;
}

Matrix generate_returns(Rng& rng, const Vector& mu, const std::vector<Matrix>& sigma_path) {
  const auto n = static_cast<Eigen::Index>(sigma_path.size());
  const Eigen::Index p = mu.size();
  Matrix out(n, p);
  for (Eigen::Index t = 0; t < n; ++t) {
    const Matrix u = choleski_upper(sigma_path[static_cast<size_t>(t)]);
    Vector z(p);
    for (Eigen::Index i = 0; i < p; ++i) z(i) = rng.normal();
    out.row(t) = (mu + u.transpose() * z).transpose();
  }
  return out;
}

McResult run_monte_carlo(const ScenarioConfig& cfg, const EstimatorConfig& est) {
  if (cfg.mc_reps < 1) throw std::invalid_argument("run_monte_carlo: mc_reps must be >= 1");
  if (cfg.burn_in < cfg.p + 2 || cfg.n_obs <= cfg.burn_in)
    throw std::invalid_argument("run_monte_carlo: need n_obs > burn_in >= p + 2");

  McResult out;
  for (int rep = 0; rep < cfg.mc_reps; ++rep) {
    try {
      Rng rng(Rng::derive_seed(cfg.seed, static_cast<std::uint64_t>(rep)));
      const Hyperparams hp = make_hyperparams(cfg.delta_true, cfg.p);
      const Matrix sigma0 = cfg.sigma0_scale * Matrix::Identity(cfg.p, cfg.p);

      std::vector<Matrix> sigma_path;
      switch (cfg.scenario) {
        case Scenario::kPrecisionUwar1: {
          const Matrix a = generate_A(rng, hp);
          const auto phi_path = generate_precision_uwar(rng, {a}, cfg.delta_true,
                                                        pd_inverse(sigma0), cfg.n_obs,
                                                        LambdaPolicy::zero());
          sigma_path.reserve(phi_path.size());
          for (const Matrix& phi : phi_path) sigma_path.push_back(pd_inverse(phi));
          break;
        }
        case Scenario::kPrecisionUwar2: {
          const auto a_list = generate_A_order2(rng, cfg.p, cfg.delta_true);
          const auto phi_path = generate_precision_uwar(rng, a_list, cfg.delta_true,
                                                        pd_inverse(sigma0), cfg.n_obs,
                                                        LambdaPolicy::zero());
          sigma_path.reserve(phi_path.size());
          for (const Matrix& phi : phi_path) sigma_path.push_back(pd_inverse(phi));
          break;
        }
        case Scenario::kVolatilityUwar1: {
          const Matrix a = generate_A(rng, hp);
          sigma_path = generate_volatility_uwar(rng, a, hp, sigma0, cfg.n_obs);
          break;
        }
      }

      const Matrix y = generate_returns(rng, Vector::Zero(cfg.p), sigma_path);
      const Matrix burn = y.topRows(cfg.burn_in);
      const Vector mu_hat = burn.colwise().mean();
      const Matrix sigma0_hat = sample_cov(burn);
      const Matrix analysis = y.bottomRows(cfg.n_obs - cfg.burn_in);

      const ArPrior prior = make_ar_prior(cfg.p, 0.0, est.prior_scale);
      FitSchedule schedule{est.refit_every, est.tol, est.max_iter};
      const SequentialFit fit = fit_sequential(analysis, mu_hat, sigma0_hat, prior, hp, schedule,
                                               LambdaPolicy::zero());

      double dist = 0.0;
      for (Eigen::Index t = 0; t < analysis.rows(); ++t)
        dist += frobenius_distance(fit.run.steps[static_cast<size_t>(t)].pred_vol_mode,
                                   sigma_path[static_cast<size_t>(cfg.burn_in + t)]);
      out.per_rep.push_back(dist / static_cast<double>(analysis.rows()));
    } catch (const std::exception&) {
      out.failed_reps.push_back(rep);
    }
  }

  const auto n_ok = static_cast<double>(out.per_rep.size());
  if (n_ok > 0) {
    for (double v : out.per_rep) out.mean_distance += v;
    out.mean_distance /= n_ok;
    if (n_ok > 1) {
      double ss = 0.0;
      for (double v : out.per_rep) ss += (v - out.mean_distance) * (v - out.mean_distance);
      out.sd_distance = std::sqrt(ss / (n_ok - 1));
    }
  }
  return out;
}

}  // namespace uwar
