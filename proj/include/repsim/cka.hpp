#pragma once

#include <map>
#include <string>

#include "repsim/gram.hpp"
#include "repsim/matrix.hpp"

namespace repsim {

struct SimilarityScore {
  double value = 0.0;
  std::string index_name;
  bool normalized = false;
  /// Numeric side channel: pre-clamp raw values, effective ranks, kept
  /// component counts and similar diagnostics.
  std::map<std::string, double> metadata;
};

/// tr(K H L H) / (n-1)^2. Symmetric in its arguments (bitwise).
SimilarityScore hsic(const GramMatrix& k, const GramMatrix& l);

/// HSIC(K, L) / sqrt(HSIC(K, K) HSIC(L, L)), in [0, 1] for PSD kernels.
/// Throws degenerate_error when either self-HSIC vanishes (constant
/// representation). Values in [-1e-8, 0) clamp to 0 with the raw value kept
/// in metadata["raw_value"].
SimilarityScore cka(const GramMatrix& k, const GramMatrix& l);

/// Linear CKA ||Y^T X||_F^2 / (||X^T X||_F ||Y^T Y||_F). Picks the
/// feature-space route when max(p1, p2) < n and the Gram route otherwise;
/// both agree to 1e-10.
SimilarityScore linear_cka_feature(const ActivationMatrix& x, const ActivationMatrix& y);

/// Linear HSIC ||Y^T X||_F^2 / (n-1)^2 for centered inputs.
SimilarityScore linear_hsic_feature(const ActivationMatrix& x, const ActivationMatrix& y);

/// Linear CKA from eigendecompositions:
/// sum_ij lx_i ly_j <ux_i, uy_j>^2 / (sqrt(sum lx^2) sqrt(sum ly^2)).
SimilarityScore cka_from_spectra(const Spectrum& sx, const Spectrum& sy);

}  // namespace repsim
