#include "patchsparse/linalg.hpp"

#include "patchsparse/errors.hpp"

#include <Eigen/SVD>

namespace patchsparse {

namespace {

// Square-or-wide factor with the same singular values and right singular
// vectors as `a`.
Matrix compress_rows(const Matrix& a) {
  if (a.rows() <= a.cols()) return a;
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
}

double threshold(const Vector& sv, double tol) {
  return sv.size() == 0 ? 0.0 : tol * sv(0);
}

}  // namespace

Vector singular_values(const Matrix& a) {
  if (a.size() == 0) return Vector();
  Eigen::BDCSVD<Matrix> svd(compress_rows(a));
  return svd.singularValues();
}

int rank(const Matrix& a, double tol) {
  const Vector sv = singular_values(a);
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double t = threshold(sv, tol);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > t) ++r;
  return r;
}

Kernel kernel(const Matrix& a, double tol) {
  const Eigen::Index n = a.cols();
  Kernel k;
  if (n == 0) return k;
  if (a.rows() == 0 || a.norm() == 0.0) {
    k.basis = Matrix::Identity(n, n);
    k.dim = static_cast<int>(n);
    return k;
  }
  const Matrix c = compress_rows(a);
  Eigen::BDCSVD<Matrix> svd(c, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double t = threshold(sv, tol);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > t) ++r;
  k.dim = static_cast<int>(n) - r;
  k.basis = svd.matrixV().rightCols(k.dim);
  return k;
}

double spectral_norm(const Matrix& a) {
  const Vector sv = singular_values(a);
  return sv.size() == 0 ? 0.0 : sv(0);
}

Matrix pseudoinverse(const Matrix& a, double tol) {
  if (a.size() == 0) return Matrix::Zero(a.cols(), a.rows());
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double t = threshold(sv, tol);
  Vector inv = Vector::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > t) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix range_basis_full_rank(const Matrix& a, double tol) {
  if (a.cols() == 0) return Matrix(a.rows(), 0);
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  const double t = threshold(sv, tol);
  if (sv(0) == 0.0 || sv(sv.size() - 1) <= t || a.cols() > a.rows())
    throw NonMinimalSupport("non-minimal support: selected atoms are linearly dependent");
  return svd.matrixU();
}

Matrix select_columns(const Matrix& a, const std::vector<int>& cols) {
  Matrix out(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
  return out;
}

}  // namespace patchsparse
