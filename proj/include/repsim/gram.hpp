#pragma once

#include "repsim/matrix.hpp"

namespace repsim {

/// n x n example-similarity (kernel) matrix, symmetric by construction.
struct GramMatrix {
  Eigen::MatrixXd values;
  bool centered = false;

  Eigen::Index n() const { return values.rows(); }
};

struct KernelSpec {
  enum class Kind { linear, rbf };
  Kind kind = Kind::linear;
  /// sigma = bandwidth_fraction * median pairwise distance (RBF only).
  double bandwidth_fraction = 0.4;
};

/// Median-distance fractions matching the reported RBF variants.
inline constexpr double kRbfFractionPresets[] = {0.2, 0.4, 0.8};

/// K = X X^T. The centered flag is inherited from the input.
GramMatrix gram_linear(const ActivationMatrix& x);

/// Median of the n(n-1)/2 Euclidean distances between distinct example pairs;
/// for even counts, the mean of the two middle order statistics. Throws
/// degenerate_error when every pair coincides.
double median_pairwise_distance(const ActivationMatrix& x);

/// RBF Gram with sigma = bandwidth_fraction * median pairwise distance.
/// Entries in (0, 1], diagonal exactly 1.
GramMatrix gram_rbf(const ActivationMatrix& x, double bandwidth_fraction);

/// H K H with H = I - (1/n) 1 1^T, via mean subtraction. Idempotent.
GramMatrix center_gram(const GramMatrix& k);

/// Dispatch on KernelSpec::Kind.
GramMatrix gram(const ActivationMatrix& x, const KernelSpec& spec);

}  // namespace repsim
