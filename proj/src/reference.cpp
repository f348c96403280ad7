#include "repsim/reference.hpp"

#include <cmath>

namespace repsim::ref {

Eigen::MatrixXd gram_linear(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double s = 0.0;
      for (Eigen::Index f = 0; f < p; ++f) s += x(i, f) * x(j, f);
      k(i, j) = s;
    }
  return k;
}

std::vector<double> pairwise_distances(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  std::vector<double> d;
  d.reserve(static_cast<size_t>(n) * (n - 1) / 2);
  for (Eigen::Index i = 0; i < n - 1; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (Eigen::Index f = 0; f < p; ++f) {
        const double diff = x(i, f) - x(j, f);
        s += diff * diff;
      }
      d.push_back(std::sqrt(s));
    }
  return d;
}

Eigen::MatrixXd gram_rbf(const Eigen::MatrixXd& x, double sigma) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) {
        k(i, j) = 1.0;
        continue;
      }
      double s = 0.0;
      for (Eigen::Index f = 0; f < p; ++f) {
        const double diff = x(i, f) - x(j, f);
        s += diff * diff;
      }
      k(i, j) = std::exp(-s / (2.0 * sigma * sigma));
    }
  return k;
}

Eigen::MatrixXd center_gram(const Eigen::MatrixXd& k) {
  const Eigen::Index n = k.rows();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n) -
                      Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  // Literal triple product, quadratic-cost loops.
  Eigen::MatrixXd hk(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double s = 0.0;
      for (Eigen::Index t = 0; t < n; ++t) s += h(i, t) * k(t, j);
      hk(i, j) = s;
    }
  Eigen::MatrixXd hkh(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double s = 0.0;
      for (Eigen::Index t = 0; t < n; ++t) s += hk(i, t) * h(t, j);
      hkh(i, j) = s;
    }
  return hkh;
}

double dot_trace(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) s += a(i, j) * b(i, j);
  return s;
}

Eigen::MatrixXd crossprod(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd c(a.cols(), b.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (Eigen::Index t = 0; t < n; ++t) s += a(t, i) * b(t, j);
      c(i, j) = s;
    }
  return c;
}

}  // namespace repsim::ref
