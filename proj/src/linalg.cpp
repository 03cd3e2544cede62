#include "uwar/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace uwar {

double max_abs(const Matrix& x) {
  return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

bool is_symmetric(const Matrix& s, double rel_tol) {
  if (s.rows() != s.cols()) return false;
  const double scale = max_abs(s);
  const double defect = max_abs(s - s.transpose());
  return defect <= rel_tol * std::max(scale, 1e-300);
}

Matrix symmetrize(const Matrix& s) { return 0.5 * (s + s.transpose()); }

Matrix choleski_upper(const Matrix& s) {
  if (s.rows() != s.cols()) throw std::invalid_argument("choleski_upper: matrix must be square");
  if (!is_symmetric(s)) throw std::invalid_argument("choleski_upper: matrix is not symmetric");
  Eigen::LLT<Matrix> llt(symmetrize(s));
  if (llt.info() != Eigen::Success)
    throw std::domain_error("choleski_upper: matrix is not positive definite");
  return llt.matrixU();
}

Vector vec(const Matrix& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw std::invalid_argument("unvec: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix vec_permutation(Eigen::Index p) {
  if (p < 1) throw std::invalid_argument("vec_permutation: p must be >= 1");
  Matrix k = Matrix::Zero(p * p, p * p);
  for (Eigen::Index c = 0; c < p; ++c)
    for (Eigen::Index r = 0; r < p; ++r) k(c * p + r, r * p + c) = 1.0;
  return k;
}

double frobenius_distance(const Matrix& x, const Matrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw std::invalid_argument("frobenius_distance: dimension mismatch");
  return (x - y).norm();
}

Matrix pd_inverse(const Matrix& s) {
  if (s.rows() != s.cols()) throw std::invalid_argument("pd_inverse: matrix must be square");
  if (!is_symmetric(s)) throw std::invalid_argument("pd_inverse: matrix is not symmetric");
  Eigen::LLT<Matrix> llt(symmetrize(s));
  if (llt.info() != Eigen::Success)
    throw std::domain_error("pd_inverse: matrix is not positive definite");
  Matrix inv = llt.solve(Matrix::Identity(s.rows(), s.cols()));
  return symmetrize(inv);
}

double log_det_pd(const Matrix& s) {
  const Matrix u = choleski_upper(s);
  return 2.0 * u.diagonal().array().log().sum();
}

double spectral_radius(const Matrix& a) {
  Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Vector sym_eigenvalues(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(s), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace uwar
