#pragma once

#include <optional>
#include <string>
#include <vector>

#include "repsim/index.hpp"

#include "json.hpp"

namespace repsim {

/// Layer x layer score grid for one similarity index.
struct SimilarityMatrixReport {
  SimilarityIndexSpec index;
  std::vector<std::string> labels_a;
  std::vector<std::string> labels_b;
  Eigen::MatrixXd scores;  // labels_a.size() x labels_b.size()
  bool symmetrized = false;
  bool normalized = false;
  std::map<std::string, std::string> metadata;
};

struct CorrespondenceReport {
  double accuracy = 0.0;
  std::vector<Eigen::Index> per_layer_argmax;
  std::vector<std::string> excluded_layers;
  std::optional<double> jackknife_se;  // set when network pairs are aggregated
};

/// Per-eigenvector comparison of the action of the two Gram operators.
struct SpectrumReport {
  Eigen::VectorXd own_scaling;    // ||XX^T u_i|| = eigenvalue i
  Eigen::VectorXd cross_scaling;  // ||YY^T u_i||
  Eigen::VectorXd cosine;         // u_i^T YY^T u_i / ||YY^T u_i||
};

/// scores[i][j] = index(layers_a[i], layers_b[j]). Cells are evaluated in
/// parallel; the result is bitwise independent of the schedule.
SimilarityMatrixReport similarity_matrix(const std::vector<ActivationMatrix>& layers_a,
                                         const std::vector<ActivationMatrix>& layers_b,
                                         const SimilarityIndexSpec& index,
                                         std::vector<std::string> labels_a = {},
                                         std::vector<std::string> labels_b = {});

/// S + S^T on a square grid. Clears the normalized flag.
SimilarityMatrixReport symmetrize(const SimilarityMatrixReport& report);

/// Scores closer than this (relative to max(1, |best|)) count as ties, which
/// resolve to the lowest index. Keeps degenerate-index grids (constant up to
/// rounding) on the deterministic tie path.
inline constexpr double kArgmaxTieTol = 1e-9;

/// Row-wise argmax accuracy on a square grid with matched layer orderings;
/// excluded labels are dropped from both axes.
CorrespondenceReport correspondence_accuracy(const SimilarityMatrixReport& report,
                                             const std::vector<std::string>& exclude_labels = {});

/// Leave-one-out jackknife standard error of the mean.
double jackknife_se(const std::vector<double>& values);

struct ZTestResult {
  double z = 0.0;
  double p = 1.0;  // two-sided
};

/// (a - b) / sqrt(se_a^2 + se_b^2) with a two-sided normal p-value.
ZTestResult jackknife_z_test(double a, double se_a, double b, double se_b);

/// For the leading eigenvectors u_i of XX^T: the eigenvalue, the norm of
/// YY^T u_i, and the cosine between u_i and YY^T u_i.
SpectrumReport shared_subspace_spectrum(const ActivationMatrix& x,
                                        const ActivationMatrix& y,
                                        Eigen::Index max_components = 0);

/// Multi-network layer-correspondence protocol: per unordered network pair,
/// build the grid (symmetrized as S + S^T for asymmetric indexes), take the
/// row-argmax accuracy, then average over pairs with a leave-one-network-out
/// jackknife SE.
struct SanityCheckResult {
  double accuracy = 0.0;
  double jackknife_se = 0.0;
  std::vector<std::pair<int, int>> pairs;      // unordered network pairs
  std::vector<double> per_pair_accuracy;       // aligned with pairs
  std::vector<CorrespondenceReport> per_pair;  // aligned with pairs
  bool symmetrized = false;
};

SanityCheckResult sanity_check(const std::vector<std::vector<ActivationMatrix>>& networks,
                               const SimilarityIndexSpec& index,
                               const std::vector<std::string>& layer_labels,
                               const std::vector<std::string>& exclude_labels = {});

// --- serialization ---

nlohmann::ordered_json index_spec_json(const SimilarityIndexSpec& spec);
nlohmann::ordered_json report_json(const SimilarityMatrixReport& report);
std::string report_csv(const SimilarityMatrixReport& report);
nlohmann::ordered_json spectrum_report_json(const SpectrumReport& report);

}  // namespace repsim
