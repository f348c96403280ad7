#include "repsim/index.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "repsim/errors.hpp"
#include "repsim/gram.hpp"

namespace repsim {

namespace {
constexpr std::array<std::pair<IndexName, const char*>, 13> kIndexNames = {{
    {IndexName::cka_linear, "cka-linear"},
    {IndexName::cka_rbf, "cka-rbf"},
    {IndexName::hsic_linear, "hsic-linear"},
    {IndexName::hsic_rbf, "hsic-rbf"},
    {IndexName::cca_r2, "cca-r2"},
    {IndexName::cca_rho, "cca-rho"},
    {IndexName::svcca_r2, "svcca-r2"},
    {IndexName::svcca_rho, "svcca-rho"},
    {IndexName::pwcca, "pwcca"},
    {IndexName::pwcca_modified, "pwcca-modified"},
    {IndexName::linreg, "linreg"},
    {IndexName::ridge, "ridge"},
    {IndexName::procrustes, "procrustes"},
}};
}  // namespace

IndexName parse_index_name(const std::string& name) {
  for (const auto& [value, text] : kIndexNames)
    if (name == text) return value;
  std::string known;
  for (const auto& [value, text] : kIndexNames) {
    if (!known.empty()) known += ", ";
    known += text;
  }
  throw validation_error("unknown index '" + name + "' (known: " + known + ")");
}

std::string index_name_string(IndexName name) {
  for (const auto& [value, text] : kIndexNames)
    if (name == value) return text;
  return "?";
}

bool index_is_symmetric(IndexName name) {
  switch (name) {
    case IndexName::pwcca:
    case IndexName::pwcca_modified:
    case IndexName::linreg:
      return false;
    default:
      return true;
  }
}

bool index_is_normalized(IndexName name) {
  switch (name) {
    case IndexName::hsic_linear:
    case IndexName::hsic_rbf:
    case IndexName::procrustes:
      return false;
    default:
      return true;
  }
}

SimilarityScore evaluate_index(const SimilarityIndexSpec& spec,
                               const ActivationMatrix& a, const ActivationMatrix& b) {
  SimilarityScore s;
  switch (spec.name) {
    case IndexName::cka_linear:
      s = linear_cka_feature(a, b);
      break;
    case IndexName::cka_rbf:
      s = cka(gram_rbf(a, spec.bandwidth_fraction),
              gram_rbf(b, spec.bandwidth_fraction));
      s.metadata["bandwidth_fraction"] = spec.bandwidth_fraction;
      break;
    case IndexName::hsic_linear:
      s = linear_hsic_feature(a, b);
      break;
    case IndexName::hsic_rbf:
      s = hsic(gram_rbf(a, spec.bandwidth_fraction),
               gram_rbf(b, spec.bandwidth_fraction));
      s.metadata["bandwidth_fraction"] = spec.bandwidth_fraction;
      break;
    case IndexName::cca_r2:
      s = r2_cca(cca(a, b, spec.rank_tol), std::min(a.p(), b.p()));
      break;
    case IndexName::cca_rho:
      s = rho_bar_cca(cca(a, b, spec.rank_tol), std::min(a.p(), b.p()));
      break;
    case IndexName::svcca_r2:
      s = svcca(a, b, SVCCAParams{spec.variance_threshold}, spec.rank_tol).first;
      s.metadata["variance_threshold"] = spec.variance_threshold;
      break;
    case IndexName::svcca_rho:
      s = svcca(a, b, SVCCAParams{spec.variance_threshold}, spec.rank_tol).second;
      s.metadata["variance_threshold"] = spec.variance_threshold;
      break;
    case IndexName::pwcca:
      s = pwcca(a, b, spec.rank_tol);
      break;
    case IndexName::pwcca_modified:
      s = modified_pwcca(a, b, spec.rank_tol);
      break;
    case IndexName::linreg:
      s = spec.direction == FitDirection::fit_first
              ? linear_regression_r2(a, b, spec.rank_tol)
              : linear_regression_r2(b, a, spec.rank_tol);
      s.metadata["fit_second"] = spec.direction == FitDirection::fit_second ? 1.0 : 0.0;
      break;
    case IndexName::ridge:
      s = canonical_ridge_similarity(a, b, spec.ridge, spec.rank_tol);
      break;
    case IndexName::procrustes:
      s = procrustes_nuclear(a, b);
      break;
  }
  s.index_name = index_name_string(spec.name);
  return s;
}

}  // namespace repsim
