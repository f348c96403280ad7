#include "repsim/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "repsim/errors.hpp"
#include "repsim/threading.hpp"

namespace repsim::kernels {

namespace {
// Offset of pair (i, i+1) in the condensed distance vector.
inline std::ptrdiff_t condensed_base(Eigen::Index i, Eigen::Index n) {
  return static_cast<std::ptrdiff_t>(i) * (2 * n - i - 1) / 2;
}
}  // namespace

Eigen::MatrixXd gram_linear(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  // Transpose once so each example is a contiguous column.
  const Eigen::MatrixXd xt = x.transpose();
  Eigen::MatrixXd k(n, n);
#pragma omp parallel for schedule(static) num_threads(repsim::thread_limit())
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = xt.col(i).dot(xt.col(j));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

std::vector<double> pairwise_distances(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  const Eigen::MatrixXd xt = x.transpose();
  std::vector<double> d(static_cast<size_t>(n) * (n - 1) / 2);
#pragma omp parallel for schedule(static) num_threads(repsim::thread_limit())
  for (Eigen::Index i = 0; i < n - 1; ++i) {
    double* out = d.data() + condensed_base(i, n);
    for (Eigen::Index j = i + 1; j < n; ++j)
      *out++ = std::sqrt((xt.col(i) - xt.col(j)).squaredNorm());
  }
  return d;
}

double median_of(std::vector<double> values) {
  if (values.empty())
    throw validation_error("median of empty distance set");
  std::sort(values.begin(), values.end());
  const size_t m = values.size();
  if (m % 2 == 1) return values[m / 2];
  return 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

Eigen::MatrixXd rbf_from_distances(const std::vector<double>& distances,
                                   Eigen::Index n, double sigma) {
  Eigen::MatrixXd k(n, n);
  const double inv = 1.0 / (2.0 * sigma * sigma);
#pragma omp parallel for schedule(static) num_threads(repsim::thread_limit())
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    const double* row = distances.data() + condensed_base(i, n);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = row[j - i - 1];
      const double v = std::exp(-d * d * inv);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

void center_gram_inplace(Eigen::MatrixXd& k) {
  const Eigen::Index n = k.rows();
  Eigen::VectorXd mean(n);
#pragma omp parallel for schedule(static) num_threads(repsim::thread_limit())
  for (Eigen::Index j = 0; j < n; ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += k(i, j);
    mean(j) = s / static_cast<double>(n);
  }
  double grand = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) grand += mean(j);
  grand /= static_cast<double>(n);
  // Same mean vector on both sides keeps the result exactly symmetric.
#pragma omp parallel for schedule(static) num_threads(repsim::thread_limit())
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      k(i, j) = k(i, j) - mean(i) - mean(j) + grand;
}

double dot_trace(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw validation_error("dot_trace: shape mismatch");
  const Eigen::Index cols = a.cols();
  Eigen::VectorXd partial(cols);
#pragma omp parallel for schedule(static) num_threads(repsim::thread_limit())
  for (Eigen::Index j = 0; j < cols; ++j) partial(j) = a.col(j).dot(b.col(j));
  double total = 0.0;
  for (Eigen::Index j = 0; j < cols; ++j) total += partial(j);
  return total;
}

Eigen::MatrixXd crossprod(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::Index p = a.cols();
  const Eigen::Index q = b.cols();
  Eigen::MatrixXd c(p, q);
#pragma omp parallel for schedule(static) num_threads(repsim::thread_limit())
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < q; ++j) c(i, j) = a.col(i).dot(b.col(j));
  return c;
}

}  // namespace repsim::kernels
