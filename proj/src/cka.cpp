#include "repsim/cka.hpp"

#include <cmath>
#include <string>

#include "repsim/errors.hpp"
#include "repsim/kernels.hpp"

namespace repsim {

namespace {

void require_same_n(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b)
    throw validation_error(std::string(what) + ": example-count mismatch (" +
                           std::to_string(a) + " vs " + std::to_string(b) + ")");
}

void require_centered(const ActivationMatrix& x, const char* what) {
  if (!x.centered)
    throw validation_error(std::string(what) + " requires column-centered input");
}

Eigen::MatrixXd centered_values(const GramMatrix& k) {
  if (k.centered) return k.values;
  Eigen::MatrixXd v = k.values;
  kernels::center_gram_inplace(v);
  return v;
}

SimilarityScore make_score(const char* name, double value, bool normalized) {
  SimilarityScore s;
  s.value = value;
  s.index_name = name;
  s.normalized = normalized;
  return s;
}

double clamp_normalized(double value, SimilarityScore& score) {
  if (value < 0.0 && value >= -1e-8) {
    score.metadata["raw_value"] = value;
    return 0.0;
  }
  return value;
}

}  // namespace

SimilarityScore hsic(const GramMatrix& k, const GramMatrix& l) {
  require_same_n(k.n(), l.n(), "hsic");
  if (k.n() < 2) throw validation_error("hsic needs n >= 2");
  const Eigen::MatrixXd kc = centered_values(k);
  const Eigen::MatrixXd lc = centered_values(l);
  const double denom = static_cast<double>(k.n() - 1);
  return make_score("hsic", kernels::dot_trace(kc, lc) / (denom * denom), false);
}

SimilarityScore cka(const GramMatrix& k, const GramMatrix& l) {
  require_same_n(k.n(), l.n(), "cka");
  const Eigen::MatrixXd kc = centered_values(k);
  const Eigen::MatrixXd lc = centered_values(l);
  const double self_k = kernels::dot_trace(kc, kc);
  const double self_l = kernels::dot_trace(lc, lc);
  // A representation that is constant across examples centers away to
  // rounding noise; compare against the uncentered norm to detect it.
  const double scale_k = kernels::dot_trace(k.values, k.values);
  const double scale_l = kernels::dot_trace(l.values, l.values);
  if (self_k <= 0.0 || self_k <= 1e-24 * scale_k)
    throw degenerate_error("cka: first representation is constant (zero self-HSIC)");
  if (self_l <= 0.0 || self_l <= 1e-24 * scale_l)
    throw degenerate_error("cka: second representation is constant (zero self-HSIC)");
  const double cross = kernels::dot_trace(kc, lc);
  SimilarityScore s = make_score("cka", 0.0, true);
  s.value = clamp_normalized(cross / std::sqrt(self_k * self_l), s);
  return s;
}

SimilarityScore linear_cka_feature(const ActivationMatrix& x, const ActivationMatrix& y) {
  require_same_n(x.n(), y.n(), "linear_cka");
  require_centered(x, "linear_cka");
  require_centered(y, "linear_cka");
  const Eigen::Index max_p = std::max(x.p(), y.p());
  if (max_p >= x.n()) {
    // Gram route, O(n^2 p): cheaper once features outnumber examples.
    SimilarityScore s = cka(gram_linear(x), gram_linear(y));
    s.index_name = "cka-linear";
    return s;
  }
  const Eigen::MatrixXd cxy = kernels::crossprod(y.data, x.data);
  const Eigen::MatrixXd cxx = kernels::crossprod(x.data, x.data);
  const Eigen::MatrixXd cyy = kernels::crossprod(y.data, y.data);
  const double num = kernels::dot_trace(cxy, cxy);
  const double nx = kernels::dot_trace(cxx, cxx);
  const double ny = kernels::dot_trace(cyy, cyy);
  if (nx <= 0.0) throw degenerate_error("linear_cka: first input is the zero matrix");
  if (ny <= 0.0) throw degenerate_error("linear_cka: second input is the zero matrix");
  SimilarityScore s = make_score("cka-linear", 0.0, true);
  s.value = clamp_normalized(num / std::sqrt(nx * ny), s);
  return s;
}

SimilarityScore linear_hsic_feature(const ActivationMatrix& x, const ActivationMatrix& y) {
  require_same_n(x.n(), y.n(), "linear_hsic");
  require_centered(x, "linear_hsic");
  require_centered(y, "linear_hsic");
  const Eigen::MatrixXd cxy = kernels::crossprod(y.data, x.data);
  const double denom = static_cast<double>(x.n() - 1);
  return make_score("hsic-linear", kernels::dot_trace(cxy, cxy) / (denom * denom),
                    false);
}

SimilarityScore cka_from_spectra(const Spectrum& sx, const Spectrum& sy) {
  if (sx.size() == 0 || sy.size() == 0)
    throw degenerate_error("cka_from_spectra: empty spectrum");
  if (sx.eigenvectors.rows() != sy.eigenvectors.rows())
    throw validation_error("cka_from_spectra: example-count mismatch");
  const Eigen::MatrixXd g = kernels::crossprod(sx.eigenvectors, sy.eigenvectors);
  double num = 0.0;
  for (Eigen::Index i = 0; i < sx.size(); ++i)
    for (Eigen::Index j = 0; j < sy.size(); ++j)
      num += sx.eigenvalues(i) * sy.eigenvalues(j) * g(i, j) * g(i, j);
  const double nx = sx.eigenvalues.squaredNorm();
  const double ny = sy.eigenvalues.squaredNorm();
  SimilarityScore s = make_score("cka-spectral", 0.0, true);
  s.value = clamp_normalized(num / std::sqrt(nx * ny), s);
  return s;
}

}  // namespace repsim
