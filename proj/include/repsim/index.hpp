#pragma once

#include <string>

#include "repsim/cca.hpp"
#include "repsim/cka.hpp"

namespace repsim {

enum class IndexName {
  cka_linear,
  cka_rbf,
  hsic_linear,
  hsic_rbf,
  cca_r2,
  cca_rho,
  svcca_r2,
  svcca_rho,
  pwcca,
  pwcca_modified,
  linreg,
  ridge,
  procrustes,
};

/// Which input a regression-style index fits: the first argument (row layer)
/// or the second.
enum class FitDirection { fit_first, fit_second };

struct SimilarityIndexSpec {
  IndexName name = IndexName::cka_linear;
  double bandwidth_fraction = 0.4;   // cka-rbf / hsic-rbf
  double variance_threshold = 0.99;  // svcca
  RidgeParams ridge;                 // ridge
  FitDirection direction = FitDirection::fit_first;  // linreg
  double rank_tol = kDefaultRankTol;
};

/// Parse/print the CLI spelling (e.g. "cka-linear"). Throws validation_error
/// for unknown names.
IndexName parse_index_name(const std::string& name);
std::string index_name_string(IndexName name);

/// Whether index(a, b) == index(b, a) mathematically.
bool index_is_symmetric(IndexName name);

/// Whether values are normalized similarity scores (in [0, 1] up to rounding).
bool index_is_normalized(IndexName name);

/// Evaluate one index on a centered pair. The single entry point used by the
/// CLI, the similarity grids and the sanity check, so every surface computes
/// identical values.
SimilarityScore evaluate_index(const SimilarityIndexSpec& spec,
                               const ActivationMatrix& a, const ActivationMatrix& b);

}  // namespace repsim
