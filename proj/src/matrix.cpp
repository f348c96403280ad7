#include "repsim/matrix.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <string>

#include "repsim/errors.hpp"

namespace repsim {

namespace detail {

void validate_matrix(const Eigen::MatrixXd& m) {
  if (m.rows() < 2)
    throw validation_error("activation matrix needs at least 2 examples, got " +
                           std::to_string(m.rows()));
  if (m.cols() < 1)
    throw validation_error("activation matrix needs at least 1 feature");
  if (!m.allFinite())
    throw validation_error("activation matrix contains non-finite entries");
}

bool columns_centered(const Eigen::MatrixXd& m) {
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  return (m.colwise().mean().cwiseAbs().maxCoeff() <= 1e-10 * scale);
}

}  // namespace detail

ActivationMatrix::ActivationMatrix(Eigen::MatrixXd values, bool is_centered)
    : data(std::move(values)), centered(is_centered) {
  detail::validate_matrix(data);
  if (centered && !detail::columns_centered(data))
    throw validation_error("matrix marked centered has nonzero column means");
}

ActivationMatrix center_columns(const ActivationMatrix& x) {
  Eigen::MatrixXd m = x.data;
  m.rowwise() -= m.colwise().mean();
  return ActivationMatrix(std::move(m), true);
}

OrthonormalBasis orthonormal_basis(const ActivationMatrix& x, double rank_tol) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x.data, Eigen::ComputeThinU);
  const Eigen::VectorXd& s = svd.singularValues();
  const double s_max = s.size() > 0 ? s(0) : 0.0;
  if (s_max <= 0.0)
    throw degenerate_error("orthonormal_basis: matrix has rank zero");
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > rank_tol * s_max) ++r;
  OrthonormalBasis basis;
  basis.q = svd.matrixU().leftCols(r);
  basis.r = r;
  basis.source_p = x.p();
  return basis;
}

Spectrum spectrum(const ActivationMatrix& x, Eigen::Index max_components,
                  double rank_tol) {
  if (!x.centered)
    throw validation_error("spectrum requires a column-centered matrix");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x.data, Eigen::ComputeThinU);
  const Eigen::VectorXd& s = svd.singularValues();
  const double s_max = s.size() > 0 ? s(0) : 0.0;
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > rank_tol * s_max && s(r) > 0.0) ++r;
  if (max_components > 0 && max_components < r) r = max_components;

  Spectrum spec;
  spec.eigenvalues = s.head(r).array().square();
  spec.eigenvectors = svd.matrixU().leftCols(r);
  // Sign convention: largest-magnitude entry of each eigenvector positive.
  for (Eigen::Index j = 0; j < r; ++j) {
    Eigen::Index arg = 0;
    spec.eigenvectors.col(j).cwiseAbs().maxCoeff(&arg);
    if (spec.eigenvectors(arg, j) < 0.0) spec.eigenvectors.col(j) *= -1.0;
  }
  return spec;
}

}  // namespace repsim
