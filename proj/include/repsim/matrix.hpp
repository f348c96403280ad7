#pragma once

#include <Eigen/Core>

namespace repsim {

/// Singular values at or below rank_tol * s_max count as zero everywhere a
/// rank decision is made (orthonormal bases, spectra, CCA truncation).
inline constexpr double kDefaultRankTol = 1e-10;

/// Activation matrix: n examples (rows) x p features (columns), float64.
/// Invariants checked on construction: all entries finite, n >= 2, p >= 1.
struct ActivationMatrix {
  Eigen::MatrixXd data;
  bool centered = false;

  ActivationMatrix() = default;
  explicit ActivationMatrix(Eigen::MatrixXd values, bool is_centered = false);

  Eigen::Index n() const { return data.rows(); }
  Eigen::Index p() const { return data.cols(); }
};

/// Orthonormal basis for the column space of a matrix.
struct OrthonormalBasis {
  Eigen::MatrixXd q;       // n x r, orthonormal columns
  Eigen::Index r = 0;      // effective rank
  Eigen::Index source_p = 0;
};

/// Eigenpairs of XX^T (equivalently, squared singular values and left
/// singular vectors of X), descending, zero eigenvalues dropped.
struct Spectrum {
  Eigen::VectorXd eigenvalues;   // descending, all > 0
  Eigen::MatrixXd eigenvectors;  // n x r, unit-norm columns

  Eigen::Index size() const { return eigenvalues.size(); }
};

/// Subtract the column means. Idempotent to float64 rounding.
ActivationMatrix center_columns(const ActivationMatrix& x);

/// Orthonormal basis of the column space via SVD with singular-value
/// thresholding. Directions with singular value <= rank_tol * s_max are
/// dropped. Throws degenerate_error for the all-zero matrix.
OrthonormalBasis orthonormal_basis(const ActivationMatrix& x,
                                   double rank_tol = kDefaultRankTol);

/// Nonzero eigenpairs of XX^T in descending order, at most max_components
/// (0 = no cap). Requires centered input. Eigenvector signs are fixed so the
/// largest-magnitude entry is positive.
Spectrum spectrum(const ActivationMatrix& x, Eigen::Index max_components = 0,
                  double rank_tol = kDefaultRankTol);

namespace detail {
/// Shared validation: finite entries, n >= 2, p >= 1. Throws validation_error.
void validate_matrix(const Eigen::MatrixXd& m);
/// True when every column mean is within 1e-10 * (1 + max |entry|) of zero.
bool columns_centered(const Eigen::MatrixXd& m);
}  // namespace detail

}  // namespace repsim
