#pragma once

#include <Eigen/Core>

#include <vector>

namespace repsim::kernels {

// OpenMP-parallel inner loops shared by the similarity indexes. Every kernel
// is schedule-independent: each output element (or row partial) is computed
// wholly by one thread in a fixed order, and partials are combined in index
// order, so results are bitwise identical for any thread count.

/// K = X X^T for row-major examples (n x p input, n x n output).
Eigen::MatrixXd gram_linear(const Eigen::MatrixXd& x);

/// Condensed Euclidean distances d(i, j) for i < j, ordered (0,1), (0,2), ...
std::vector<double> pairwise_distances(const Eigen::MatrixXd& x);

/// Median of a condensed distance vector (even count: mean of the middle two).
double median_of(std::vector<double> values);

/// RBF Gram exp(-d^2 / (2 sigma^2)) from a condensed distance vector;
/// diagonal is exactly 1.
Eigen::MatrixXd rbf_from_distances(const std::vector<double>& distances,
                                   Eigen::Index n, double sigma);

/// K <- H K H done as row/column/grand mean subtraction, O(n^2) and exactly
/// symmetric for symmetric input.
void center_gram_inplace(Eigen::MatrixXd& k);

/// Sum of elementwise products over same-shape A, B; equals tr(A B) for
/// symmetric square inputs and ||A||_F^2 for A == B.
double dot_trace(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// C = A^T B where A is n x p, B is n x q (shared leading dimension n).
Eigen::MatrixXd crossprod(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace repsim::kernels
