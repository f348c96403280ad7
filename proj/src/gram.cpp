#include "repsim/gram.hpp"

#include <string>

#include "repsim/errors.hpp"
#include "repsim/kernels.hpp"

namespace repsim {

GramMatrix gram_linear(const ActivationMatrix& x) {
  GramMatrix k;
  k.values = kernels::gram_linear(x.data);
  k.centered = x.centered;
  return k;
}

double median_pairwise_distance(const ActivationMatrix& x) {
  if (x.n() < 2)
    throw validation_error("median_pairwise_distance needs at least 2 examples");
  std::vector<double> d = kernels::pairwise_distances(x.data);
  const double median = kernels::median_of(std::move(d));
  if (median <= 0.0)
    throw degenerate_error(
        "median pairwise distance is zero (all examples identical)");
  return median;
}

GramMatrix gram_rbf(const ActivationMatrix& x, double bandwidth_fraction) {
  if (!(bandwidth_fraction > 0.0))
    throw validation_error("bandwidth_fraction must be positive, got " +
                           std::to_string(bandwidth_fraction));
  std::vector<double> d = kernels::pairwise_distances(x.data);
  const double median = kernels::median_of(d);
  if (median <= 0.0)
    throw degenerate_error(
        "RBF bandwidth undefined: all pairwise distances are zero");
  GramMatrix k;
  k.values = kernels::rbf_from_distances(d, x.n(), bandwidth_fraction * median);
  k.centered = false;
  return k;
}

GramMatrix center_gram(const GramMatrix& k) {
  GramMatrix out;
  out.values = k.values;
  kernels::center_gram_inplace(out.values);
  out.centered = true;
  return out;
}

GramMatrix gram(const ActivationMatrix& x, const KernelSpec& spec) {
  return spec.kind == KernelSpec::Kind::linear ? gram_linear(x)
                                               : gram_rbf(x, spec.bandwidth_fraction);
}

}  // namespace repsim
