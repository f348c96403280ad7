#include "repsim/cca.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <string>

#include "repsim/errors.hpp"
#include "repsim/kernels.hpp"

namespace repsim {

namespace {

void require_pair(const ActivationMatrix& x, const ActivationMatrix& y,
                  const char* what) {
  if (x.n() != y.n())
    throw validation_error(std::string(what) + ": example-count mismatch (" +
                           std::to_string(x.n()) + " vs " + std::to_string(y.n()) + ")");
  if (!x.centered || !y.centered)
    throw validation_error(std::string(what) + " requires column-centered inputs");
}

SimilarityScore make_score(const char* name, double value, bool normalized) {
  SimilarityScore s;
  s.value = value;
  s.index_name = name;
  s.normalized = normalized;
  return s;
}

struct ThinSvd {
  Eigen::MatrixXd u;  // n x r
  Eigen::VectorXd s;  // r
  Eigen::MatrixXd v;  // p x r
  Eigen::Index r = 0;
};

ThinSvd rank_truncated_svd(const Eigen::MatrixXd& m, double rank_tol, const char* what) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double s_max = s.size() > 0 ? s(0) : 0.0;
  if (s_max <= 0.0)
    throw degenerate_error(std::string(what) + ": input has rank zero");
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > rank_tol * s_max) ++r;
  ThinSvd out;
  out.u = svd.matrixU().leftCols(r);
  out.s = s.head(r);
  out.v = svd.matrixV().leftCols(r);
  out.r = r;
  return out;
}

}  // namespace

CCAResult cca(const ActivationMatrix& x, const ActivationMatrix& y, double rank_tol) {
  require_pair(x, y, "cca");
  const ThinSvd sx = rank_truncated_svd(x.data, rank_tol, "cca");
  const ThinSvd sy = rank_truncated_svd(y.data, rank_tol, "cca");

  const Eigen::MatrixXd a = kernels::crossprod(sx.u, sy.u);  // r_x x r_y
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::Index r = std::min(sx.r, sy.r);

  CCAResult res;
  res.rhos = svd.singularValues().head(r);
  res.effective_rank = r;
  // Unit-variance canonical variables: h_i = sqrt(n-1) Q_X u_i.
  const double scale = std::sqrt(static_cast<double>(x.n() - 1));
  const Eigen::MatrixXd u = svd.matrixU().leftCols(r);
  const Eigen::MatrixXd v = svd.matrixV().leftCols(r);
  res.canonical_x = scale * (sx.u * u);
  res.weights_x = scale * (sx.v * sx.s.cwiseInverse().asDiagonal() * u);
  res.weights_y = scale * (sy.v * sy.s.cwiseInverse().asDiagonal() * v);
  return res;
}

SimilarityScore r2_cca(const CCAResult& res, Eigen::Index p1) {
  SimilarityScore s = make_score("cca-r2",
                                 res.rhos.squaredNorm() / static_cast<double>(p1), true);
  s.metadata["effective_rank"] = static_cast<double>(res.effective_rank);
  return s;
}

SimilarityScore rho_bar_cca(const CCAResult& res, Eigen::Index p1) {
  SimilarityScore s = make_score("cca-rho",
                                 res.rhos.sum() / static_cast<double>(p1), true);
  s.metadata["effective_rank"] = static_cast<double>(res.effective_rank);
  return s;
}

std::pair<SimilarityScore, SimilarityScore> svcca(const ActivationMatrix& x,
                                                  const ActivationMatrix& y,
                                                  const SVCCAParams& params,
                                                  double rank_tol) {
  require_pair(x, y, "svcca");
  if (!(params.variance_threshold > 0.0) || params.variance_threshold > 1.0)
    throw validation_error("svcca variance_threshold must be in (0, 1]");
  const Spectrum spec_x = spectrum(x, 0, rank_tol);
  const Spectrum spec_y = spectrum(y, 0, rank_tol);
  if (spec_x.size() == 0 || spec_y.size() == 0)
    throw degenerate_error("svcca: rank-zero input");

  // Smallest leading set whose cumulative eigenvalue share reaches the
  // threshold; eigenvalue ties keep the earlier index by construction.
  auto kept_count = [&](const Spectrum& spec) {
    const double total = spec.eigenvalues.sum();
    double cum = 0.0;
    for (Eigen::Index i = 0; i < spec.size(); ++i) {
      cum += spec.eigenvalues(i);
      if (cum >= params.variance_threshold * total) return i + 1;
    }
    return spec.size();
  };
  const Eigen::Index kept_x = kept_count(spec_x);
  const Eigen::Index kept_y = kept_count(spec_y);

  const Eigen::MatrixXd a = kernels::crossprod(spec_x.eigenvectors.leftCols(kept_x),
                                               spec_y.eigenvectors.leftCols(kept_y));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const Eigen::VectorXd rhos = svd.singularValues();
  const double denom = static_cast<double>(std::min(kept_x, kept_y));

  SimilarityScore r2 = make_score("svcca-r2", rhos.squaredNorm() / denom, true);
  SimilarityScore rho = make_score("svcca-rho", rhos.sum() / denom, true);
  for (SimilarityScore* s : {&r2, &rho}) {
    s->metadata["kept_x"] = static_cast<double>(kept_x);
    s->metadata["kept_y"] = static_cast<double>(kept_y);
  }
  return {r2, rho};
}

SimilarityScore linear_regression_r2(const ActivationMatrix& target,
                                     const ActivationMatrix& design, double rank_tol) {
  require_pair(target, design, "linear_regression_r2");
  const double total = target.data.squaredNorm();
  if (total <= 0.0) throw degenerate_error("linear_regression_r2: zero target");
  const OrthonormalBasis q = orthonormal_basis(design, rank_tol);
  const Eigen::MatrixXd proj = kernels::crossprod(q.q, target.data);  // r x p_t
  SimilarityScore s = make_score("linreg", proj.squaredNorm() / total, true);
  s.metadata["design_rank"] = static_cast<double>(q.r);
  return s;
}

namespace {

// Shared PWCCA machinery: weights are projections of X's columns onto X's
// canonical variables. `squared` selects the modified (regression) variant.
SimilarityScore pwcca_impl(const ActivationMatrix& x, const ActivationMatrix& y,
                           double rank_tol, bool squared) {
  const CCAResult res = cca(x, y, rank_tol);
  const Eigen::MatrixXd m = kernels::crossprod(x.data, res.canonical_x);  // p1 x r
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < res.effective_rank; ++i) {
    const double alpha = squared ? m.col(i).squaredNorm() : m.col(i).lpNorm<1>();
    const double rho = squared ? res.rhos(i) * res.rhos(i) : res.rhos(i);
    num += alpha * rho;
    den += alpha;
  }
  if (den <= 0.0)
    throw degenerate_error("pwcca: all projection weights are zero");
  SimilarityScore s = make_score(squared ? "pwcca-modified" : "pwcca", num / den, true);
  s.metadata["effective_rank"] = static_cast<double>(res.effective_rank);
  return s;
}

}  // namespace

SimilarityScore pwcca(const ActivationMatrix& x, const ActivationMatrix& y,
                      double rank_tol) {
  return pwcca_impl(x, y, rank_tol, false);
}

SimilarityScore modified_pwcca(const ActivationMatrix& x, const ActivationMatrix& y,
                               double rank_tol) {
  return pwcca_impl(x, y, rank_tol, true);
}

SimilarityScore canonical_ridge_similarity(const ActivationMatrix& x,
                                           const ActivationMatrix& y,
                                           const RidgeParams& params, double rank_tol) {
  require_pair(x, y, "canonical_ridge");
  if (!(params.kappa_x >= 0.0) || !(params.kappa_y >= 0.0) ||
      !std::isfinite(params.kappa_x) || !std::isfinite(params.kappa_y))
    throw validation_error("canonical_ridge: kappas must be finite and nonnegative");
  const Spectrum sx = spectrum(x, 0, rank_tol);
  const Spectrum sy = spectrum(y, 0, rank_tol);
  if (sx.size() == 0 || sy.size() == 0)
    throw degenerate_error("canonical_ridge: zero spectrum");

  // Shrinkage factors lambda / (lambda + kappa) appear in both the numerator
  // and every normalization bound.
  Eigen::VectorXd wx(sx.size()), wy(sy.size());
  for (Eigen::Index i = 0; i < sx.size(); ++i)
    wx(i) = sx.eigenvalues(i) / (sx.eigenvalues(i) + params.kappa_x);
  for (Eigen::Index j = 0; j < sy.size(); ++j)
    wy(j) = sy.eigenvalues(j) / (sy.eigenvalues(j) + params.kappa_y);

  const Eigen::MatrixXd g = kernels::crossprod(sx.eigenvectors, sy.eigenvectors);
  double num = 0.0;
  for (Eigen::Index i = 0; i < sx.size(); ++i)
    for (Eigen::Index j = 0; j < sy.size(); ++j)
      num += wx(i) * wy(j) * g(i, j) * g(i, j);

  const Eigen::Index m = std::min(sx.size(), sy.size());
  double den = 0.0;
  switch (params.normalization) {
    case RidgeNormalization::vn_trace:
      for (Eigen::Index i = 0; i < m; ++i) den += wx(i) * wy(i);
      break;
    case RidgeNormalization::cauchy_schwarz_min:
      den = std::sqrt(wx.head(m).squaredNorm()) * std::sqrt(wy.head(m).squaredNorm());
      break;
    case RidgeNormalization::separable:
      den = std::sqrt(wx.squaredNorm()) * std::sqrt(wy.squaredNorm());
      break;
  }
  if (den <= 0.0) throw degenerate_error("canonical_ridge: zero normalization bound");
  SimilarityScore s = make_score("ridge", num / den, true);
  s.metadata["kappa_x"] = params.kappa_x;
  s.metadata["kappa_y"] = params.kappa_y;
  return s;
}

SimilarityScore procrustes_nuclear(const ActivationMatrix& x, const ActivationMatrix& y) {
  require_pair(x, y, "procrustes");
  const Eigen::MatrixXd c = kernels::crossprod(y.data, x.data);  // p2 x p1
  Eigen::BDCSVD<Eigen::MatrixXd> svd(c);
  return make_score("procrustes", svd.singularValues().sum(), false);
}

}  // namespace repsim
