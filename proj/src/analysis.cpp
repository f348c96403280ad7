#include "repsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <set>

#include "repsim/errors.hpp"
#include "repsim/io.hpp"
#include "repsim/threading.hpp"

namespace repsim {

namespace {

std::vector<std::string> default_labels(const char* prefix, size_t count) {
  std::vector<std::string> labels;
  labels.reserve(count);
  for (size_t i = 0; i < count; ++i) labels.push_back(prefix + std::to_string(i));
  return labels;
}

}  // namespace

SimilarityMatrixReport similarity_matrix(const std::vector<ActivationMatrix>& layers_a,
                                         const std::vector<ActivationMatrix>& layers_b,
                                         const SimilarityIndexSpec& index,
                                         std::vector<std::string> labels_a,
                                         std::vector<std::string> labels_b) {
  if (layers_a.empty() || layers_b.empty())
    throw validation_error("similarity_matrix: empty layer list");
  const Eigen::Index n = layers_a.front().n();
  for (const auto* layers : {&layers_a, &layers_b})
    for (const ActivationMatrix& layer : *layers)
      if (layer.n() != n)
        throw validation_error("similarity_matrix: example-count mismatch across layers");
  if (labels_a.empty()) labels_a = default_labels("a", layers_a.size());
  if (labels_b.empty()) labels_b = default_labels("b", layers_b.size());
  if (labels_a.size() != layers_a.size() || labels_b.size() != layers_b.size())
    throw validation_error("similarity_matrix: label/layer count mismatch");

  const Eigen::Index rows = static_cast<Eigen::Index>(layers_a.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(layers_b.size());
  SimilarityMatrixReport report;
  report.index = index;
  report.labels_a = std::move(labels_a);
  report.labels_b = std::move(labels_b);
  report.scores.resize(rows, cols);
  report.normalized = index_is_normalized(index.name);

  // Cells are independent; exceptions may not escape the parallel region, so
  // collect them and rethrow the first one in index order.
  std::vector<std::exception_ptr> errors(static_cast<size_t>(rows * cols));
#pragma omp parallel for schedule(static) num_threads(repsim::thread_limit())
  for (Eigen::Index cell = 0; cell < rows * cols; ++cell) {
    const Eigen::Index i = cell / cols;
    const Eigen::Index j = cell % cols;
    try {
      report.scores(i, j) =
          evaluate_index(index, layers_a[static_cast<size_t>(i)],
                         layers_b[static_cast<size_t>(j)])
              .value;
    } catch (...) {
      errors[static_cast<size_t>(cell)] = std::current_exception();
    }
  }
  for (const std::exception_ptr& err : errors)
    if (err) std::rethrow_exception(err);

  report.metadata["centering"] = "columns";
  report.metadata["pair_aggregation"] = "unordered";
  return report;
}

SimilarityMatrixReport symmetrize(const SimilarityMatrixReport& report) {
  if (report.scores.rows() != report.scores.cols())
    throw validation_error("symmetrize requires a square grid");
  SimilarityMatrixReport out = report;
  out.scores = report.scores + report.scores.transpose().eval();
  out.symmetrized = true;
  out.normalized = false;  // S + S^T can reach 2
  return out;
}

CorrespondenceReport correspondence_accuracy(const SimilarityMatrixReport& report,
                                             const std::vector<std::string>& exclude_labels) {
  if (report.scores.rows() != report.scores.cols() ||
      report.labels_a != report.labels_b)
    throw validation_error(
        "correspondence_accuracy requires a square grid with matched layer orderings");
  const std::set<std::string> excluded(exclude_labels.begin(), exclude_labels.end());
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < report.scores.rows(); ++i)
    if (!excluded.count(report.labels_a[static_cast<size_t>(i)])) kept.push_back(i);
  if (kept.empty())
    throw validation_error("correspondence_accuracy: all layers excluded");

  CorrespondenceReport out;
  out.excluded_layers = exclude_labels;
  Eigen::Index matches = 0;
  for (size_t row = 0; row < kept.size(); ++row) {
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index col : kept)
      best = std::max(best, report.scores(kept[row], col));
    // First column within the tie band of the maximum.
    const double band = kArgmaxTieTol * std::max(1.0, std::abs(best));
    Eigen::Index argmax = 0;
    for (size_t col = 0; col < kept.size(); ++col)
      if (report.scores(kept[row], kept[col]) >= best - band) {
        argmax = static_cast<Eigen::Index>(col);
        break;
      }
    out.per_layer_argmax.push_back(argmax);
    if (argmax == static_cast<Eigen::Index>(row)) ++matches;
  }
  out.accuracy = static_cast<double>(matches) / static_cast<double>(kept.size());
  return out;
}

double jackknife_se(const std::vector<double>& values) {
  const size_t m = values.size();
  if (m < 2) throw validation_error("jackknife_se needs at least 2 values");
  double total = 0.0;
  for (double v : values) total += v;
  std::vector<double> loo(m);
  for (size_t i = 0; i < m; ++i)
    loo[i] = (total - values[i]) / static_cast<double>(m - 1);
  double loo_mean = 0.0;
  for (double v : loo) loo_mean += v;
  loo_mean /= static_cast<double>(m);
  double ss = 0.0;
  for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
  return std::sqrt(ss * static_cast<double>(m - 1) / static_cast<double>(m));
}

ZTestResult jackknife_z_test(double a, double se_a, double b, double se_b) {
  ZTestResult result;
  const double denom = std::sqrt(se_a * se_a + se_b * se_b);
  if (denom == 0.0) {
    result.z = a == b ? 0.0 : std::numeric_limits<double>::infinity() * (a > b ? 1 : -1);
    result.p = a == b ? 1.0 : 0.0;
    return result;
  }
  result.z = (a - b) / denom;
  result.p = std::erfc(std::abs(result.z) / std::numbers::sqrt2);
  return result;
}

SpectrumReport shared_subspace_spectrum(const ActivationMatrix& x,
                                        const ActivationMatrix& y,
                                        Eigen::Index max_components) {
  if (x.n() != y.n())
    throw validation_error("shared_subspace_spectrum: example-count mismatch");
  if (!x.centered || !y.centered)
    throw validation_error("shared_subspace_spectrum requires centered inputs");
  const Spectrum spec = spectrum(x, max_components);
  if (spec.size() == 0)
    throw degenerate_error("shared_subspace_spectrum: degenerate spectrum");

  // YY^T u computed as Y (Y^T u); O(np) per eigenvector.
  const Eigen::MatrixXd yu = y.data * (y.data.transpose() * spec.eigenvectors);
  SpectrumReport report;
  report.own_scaling = spec.eigenvalues;
  report.cross_scaling.resize(spec.size());
  report.cosine.resize(spec.size());
  for (Eigen::Index i = 0; i < spec.size(); ++i) {
    const double norm = yu.col(i).norm();
    report.cross_scaling(i) = norm;
    report.cosine(i) = norm > 0.0 ? spec.eigenvectors.col(i).dot(yu.col(i)) / norm : 0.0;
  }
  return report;
}

SanityCheckResult sanity_check(const std::vector<std::vector<ActivationMatrix>>& networks,
                               const SimilarityIndexSpec& index,
                               const std::vector<std::string>& layer_labels,
                               const std::vector<std::string>& exclude_labels) {
  if (networks.size() < 2)
    throw validation_error("sanity_check needs at least 2 networks");
  const size_t layer_count = networks.front().size();
  for (const auto& net : networks)
    if (net.size() != layer_count)
      throw validation_error("sanity_check: layer-count mismatch across networks");
  if (layer_count == 0) throw validation_error("sanity_check: empty networks");

  SanityCheckResult result;
  result.symmetrized = !index_is_symmetric(index.name);
  const int m = static_cast<int>(networks.size());
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      SimilarityMatrixReport grid =
          similarity_matrix(networks[static_cast<size_t>(a)],
                            networks[static_cast<size_t>(b)], index, layer_labels,
                            layer_labels);
      if (result.symmetrized) grid = symmetrize(grid);
      CorrespondenceReport corr = correspondence_accuracy(grid, exclude_labels);
      result.pairs.emplace_back(a, b);
      result.per_pair_accuracy.push_back(corr.accuracy);
      result.per_pair.push_back(std::move(corr));
    }

  double sum = 0.0;
  for (double acc : result.per_pair_accuracy) sum += acc;
  result.accuracy = sum / static_cast<double>(result.per_pair_accuracy.size());

  // Leave one network out: mean accuracy over the pairs not involving it.
  std::vector<double> loo;
  for (int net = 0; net < m; ++net) {
    double s = 0.0;
    int count = 0;
    for (size_t k = 0; k < result.pairs.size(); ++k)
      if (result.pairs[k].first != net && result.pairs[k].second != net) {
        s += result.per_pair_accuracy[k];
        ++count;
      }
    loo.push_back(s / static_cast<double>(count));
  }
  // Same estimator as jackknife_se, applied to the per-network loo means.
  double loo_mean = 0.0;
  for (double v : loo) loo_mean += v;
  loo_mean /= static_cast<double>(m);
  double ss = 0.0;
  for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
  result.jackknife_se =
      std::sqrt(ss * static_cast<double>(m - 1) / static_cast<double>(m));
  return result;
}

nlohmann::ordered_json index_spec_json(const SimilarityIndexSpec& spec) {
  nlohmann::ordered_json params;
  params["rank_tol"] = spec.rank_tol;
  switch (spec.name) {
    case IndexName::cka_rbf:
    case IndexName::hsic_rbf:
      params["bandwidth_fraction"] = spec.bandwidth_fraction;
      break;
    case IndexName::svcca_r2:
    case IndexName::svcca_rho:
      params["variance_threshold"] = spec.variance_threshold;
      break;
    case IndexName::ridge: {
      params["kappa_x"] = spec.ridge.kappa_x;
      params["kappa_y"] = spec.ridge.kappa_y;
      const char* norm = spec.ridge.normalization == RidgeNormalization::vn_trace
                             ? "vn-trace"
                             : spec.ridge.normalization == RidgeNormalization::cauchy_schwarz_min
                                   ? "cauchy-schwarz-min"
                                   : "separable";
      params["normalization"] = norm;
      break;
    }
    case IndexName::linreg:
      params["direction"] =
          spec.direction == FitDirection::fit_first ? "fit-first" : "fit-second";
      break;
    default:
      break;
  }
  return params;
}

nlohmann::ordered_json report_json(const SimilarityMatrixReport& report) {
  nlohmann::ordered_json j;
  j["index"] = index_name_string(report.index.name);
  j["params"] = index_spec_json(report.index);
  j["labels_a"] = report.labels_a;
  j["labels_b"] = report.labels_b;
  std::vector<double> scores;
  scores.reserve(static_cast<size_t>(report.scores.size()));
  for (Eigen::Index i = 0; i < report.scores.rows(); ++i)
    for (Eigen::Index jcol = 0; jcol < report.scores.cols(); ++jcol)
      scores.push_back(report.scores(i, jcol));
  j["scores"] = scores;  // row-major
  j["shape"] = {report.scores.rows(), report.scores.cols()};
  j["symmetrized"] = report.symmetrized;
  j["normalized"] = report.normalized;
  nlohmann::ordered_json meta;
  for (const auto& [key, value] : report.metadata) meta[key] = value;
  j["metadata"] = meta;
  return j;
}

std::string report_csv(const SimilarityMatrixReport& report) {
  std::string out = "layer";
  for (const std::string& label : report.labels_b) out += "," + label;
  out += "\n";
  for (Eigen::Index i = 0; i < report.scores.rows(); ++i) {
    out += report.labels_a[static_cast<size_t>(i)];
    for (Eigen::Index j = 0; j < report.scores.cols(); ++j)
      out += "," + format_double(report.scores(i, j));
    out += "\n";
  }
  return out;
}

nlohmann::ordered_json spectrum_report_json(const SpectrumReport& report) {
  auto to_vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  nlohmann::ordered_json j;
  j["own_scaling"] = to_vec(report.own_scaling);
  j["cross_scaling"] = to_vec(report.cross_scaling);
  j["cosine"] = to_vec(report.cosine);
  return j;
}

}  // namespace repsim
