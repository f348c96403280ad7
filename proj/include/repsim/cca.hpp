#pragma once

#include <utility>

#include "repsim/cka.hpp"
#include "repsim/matrix.hpp"

namespace repsim {

/// Canonical correlation analysis of two centered activation matrices.
/// rhos are the singular values of Q_X^T Q_Y over rank-truncated orthonormal
/// bases; canonical variables have unit sample variance.
struct CCAResult {
  Eigen::VectorXd rhos;         // descending, in [0, 1] up to rounding
  Eigen::MatrixXd weights_x;    // p1 x r
  Eigen::MatrixXd weights_y;    // p2 x r
  Eigen::MatrixXd canonical_x;  // n x r, columns orthogonal
  Eigen::Index effective_rank = 0;
};

CCAResult cca(const ActivationMatrix& x, const ActivationMatrix& y,
              double rank_tol = kDefaultRankTol);

/// sum rho_i^2 / p1. By the problem-statement convention p1 = min(p1, p2).
SimilarityScore r2_cca(const CCAResult& res, Eigen::Index p1);

/// sum rho_i / p1 (nuclear norm of Q_Y^T Q_X over p1).
SimilarityScore rho_bar_cca(const CCAResult& res, Eigen::Index p1);

struct SVCCAParams {
  double variance_threshold = 0.99;  // in (0, 1]
};

/// CCA on per-matrix principal-component truncations that keep the smallest
/// leading set reaching the cumulative variance threshold. Returns the
/// squared (R^2) and nuclear (rho-bar) statistics, both normalized by
/// min(kept_x, kept_y).
std::pair<SimilarityScore, SimilarityScore> svcca(const ActivationMatrix& x,
                                                  const ActivationMatrix& y,
                                                  const SVCCAParams& params,
                                                  double rank_tol = kDefaultRankTol);

/// ||Q_design^T target||_F^2 / ||target||_F^2: fraction of the target's
/// variance explained by a least-squares fit on the design matrix.
/// Asymmetric; callers choose the direction explicitly.
SimilarityScore linear_regression_r2(const ActivationMatrix& target,
                                     const ActivationMatrix& design,
                                     double rank_tol = kDefaultRankTol);

/// Projection-weighted CCA: sum alpha_i rho_i / sum alpha_i with
/// alpha_i = sum_j |<h_i, x_j>| taken from the FIRST argument. Asymmetric.
SimilarityScore pwcca(const ActivationMatrix& x, const ActivationMatrix& y,
                      double rank_tol = kDefaultRankTol);

/// Squared-weight variant: sum alpha'_i rho_i^2 / sum alpha'_i with
/// alpha'_i = sum_j <h_i, x_j>^2. Equals linear_regression_r2(x, y) when
/// rank(x) <= rank(y).
SimilarityScore modified_pwcca(const ActivationMatrix& x, const ActivationMatrix& y,
                               double rank_tol = kDefaultRankTol);

enum class RidgeNormalization {
  vn_trace,           // paired descending eigenvalue bound (von Neumann)
  cauchy_schwarz_min, // root-sum-squares over the first min-rank terms
  separable           // root-sum-squares over all terms of each matrix
};

struct RidgeParams {
  double kappa_x = 0.0;
  double kappa_y = 0.0;
  RidgeNormalization normalization = RidgeNormalization::vn_trace;
};

/// Regularized-CCA similarity
///   sum_ij lx_i ly_j <ux_i, uy_j>^2 / ((lx_i + kx)(ly_j + ky))
/// over the chosen normalization bound. kappa = 0 recovers R^2_CCA;
/// kappa_x -> inf with vn_trace recovers regression R^2; symmetric
/// kappa -> inf with separable recovers linear CKA.
SimilarityScore canonical_ridge_similarity(const ActivationMatrix& x,
                                           const ActivationMatrix& y,
                                           const RidgeParams& params,
                                           double rank_tol = kDefaultRankTol);

/// Nuclear norm ||Y^T X||_*: the optimal value of the orthogonal alignment
/// problem max_Q tr(Y^T X Q). Unnormalized, symmetric.
SimilarityScore procrustes_nuclear(const ActivationMatrix& x, const ActivationMatrix& y);

}  // namespace repsim
