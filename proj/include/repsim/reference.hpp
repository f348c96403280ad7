#pragma once

#include <Eigen/Core>

#include <vector>

namespace repsim::ref {

// Serial textbook implementations of the parallel kernels. Kept as the
// independent oracle for tests and as the baseline for the benchmark target.
// Plain nested loops, no OpenMP, no shared code with repsim::kernels.

Eigen::MatrixXd gram_linear(const Eigen::MatrixXd& x);

std::vector<double> pairwise_distances(const Eigen::MatrixXd& x);

Eigen::MatrixXd gram_rbf(const Eigen::MatrixXd& x, double sigma);

/// H K H materialized literally from H = I - (1/n) 1 1^T.
Eigen::MatrixXd center_gram(const Eigen::MatrixXd& k);

double dot_trace(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

Eigen::MatrixXd crossprod(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace repsim::ref
