#pragma once

#include <Eigen/Dense>

#include <vector>

namespace patchsparse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Relative singular-value threshold: sigma counts as zero iff
/// sigma <= kRankTol * sigma_max.
inline constexpr double kRankTol = 1e-10;

/// Orthonormal nullspace basis (columns) and its dimension.
struct Kernel {
  Matrix basis;
  int dim = 0;
};

/// Singular values in decreasing order. Tall inputs are reduced by QR first.
Vector singular_values(const Matrix& a);

/// Numerical rank under the relative threshold. Empty matrices have rank 0.
int rank(const Matrix& a, double tol = kRankTol);

/// Nullspace of `a` via SVD. A matrix with zero rows has the full space as
/// kernel.
Kernel kernel(const Matrix& a, double tol = kRankTol);

/// Largest singular value.
double spectral_norm(const Matrix& a);

/// Moore-Penrose pseudoinverse through the SVD.
Matrix pseudoinverse(const Matrix& a, double tol = kRankTol);

/// Orthonormal basis of the column space of `a`; throws NonMinimalSupport when
/// `a` has dependent columns.
Matrix range_basis_full_rank(const Matrix& a, double tol = kRankTol);

/// Columns of `a` listed in `cols`, in that order.
Matrix select_columns(const Matrix& a, const std::vector<int>& cols);

}  // namespace patchsparse
