#pragma once

#include <Eigen/Dense>

namespace uwar {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative symmetry tolerance applied before any PD factorization.
inline constexpr double kSymmetryTol = 1e-10;

/// Largest absolute entry, 0 for empty matrices.
double max_abs(const Matrix& x);

/// True if max |S_ij - S_ji| <= tol * max |S_ij|.
bool is_symmetric(const Matrix& s, double rel_tol = kSymmetryTol);

/// (S + S') / 2.
Matrix symmetrize(const Matrix& s);

/// Upper-triangular U with positive diagonal such that U' U = S.
/// Throws std::invalid_argument on a non-square or asymmetric input and
/// std::domain_error when S is not positive definite.
Matrix choleski_upper(const Matrix& s);

/// Column-stacking operator: column 1 first.
Vector vec(const Matrix& x);

/// Inverse of vec for a rows-by-cols target.
Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols);

/// Kronecker product; satisfies vec(A X B') = (B (x) A) vec(X).
Matrix kron(const Matrix& a, const Matrix& b);

/// The p^2 x p^2 vec-permutation matrix K with vec(X') = K vec(X); K K = I.
Matrix vec_permutation(Eigen::Index p);

/// sqrt(sum_ij (X_ij - Y_ij)^2); throws on dimension mismatch.
double frobenius_distance(const Matrix& x, const Matrix& y);

/// Inverse of a symmetric positive definite matrix, result symmetrized.
/// Throws std::domain_error when S is not positive definite.
Matrix pd_inverse(const Matrix& s);

/// log det of a symmetric positive definite matrix via its Choleski factor.
double log_det_pd(const Matrix& s);

/// Largest eigenvalue modulus of a general square matrix.
double spectral_radius(const Matrix& a);

/// Eigenvalues of a symmetric matrix, ascending.
Vector sym_eigenvalues(const Matrix& s);

}  // namespace uwar
