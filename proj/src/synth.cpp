#include "repsim/synth.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <set>
#include <string>

#include "repsim/errors.hpp"

namespace repsim {

namespace {
constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<uint32_t, 4>& ctr, std::array<uint32_t, 2>& key) {
  const uint64_t p0 = static_cast<uint64_t>(kPhiloxM0) * ctr[0];
  const uint64_t p1 = static_cast<uint64_t>(kPhiloxM1) * ctr[2];
  const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
  const uint32_t lo0 = static_cast<uint32_t>(p0);
  const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
  const uint32_t lo1 = static_cast<uint32_t>(p1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  key[0] += kPhiloxW0;
  key[1] += kPhiloxW1;
}
}  // namespace

std::array<uint32_t, 4> RandomStream::block(uint64_t index) const {
  std::array<uint32_t, 4> ctr = {
      static_cast<uint32_t>(index), static_cast<uint32_t>(index >> 32),
      static_cast<uint32_t>(stream_), static_cast<uint32_t>(stream_ >> 32)};
  std::array<uint32_t, 2> key = {static_cast<uint32_t>(seed_),
                                 static_cast<uint32_t>(seed_ >> 32)};
  for (int round = 0; round < 10; ++round) philox_round(ctr, key);
  return ctr;
}

uint64_t RandomStream::next_u64() {
  if (word_pos_ >= 4) {
    buffer_ = block(block_index_++);
    word_pos_ = 0;
  }
  const uint64_t lo = buffer_[word_pos_];
  const uint64_t hi = buffer_[word_pos_ + 1];
  word_pos_ += 2;
  return (hi << 32) | lo;
}

double RandomStream::uniform() {
  // Top 53 bits, shifted into (0, 1] so log() below is always defined.
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RandomStream::gaussian() {
  if (have_cached_gaussian_) {
    have_cached_gaussian_ = false;
    return cached_gaussian_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_gaussian_ = radius * std::sin(angle);
  have_cached_gaussian_ = true;
  return radius * std::cos(angle);
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index n, Eigen::Index p, RandomStream& rng) {
  Eigen::MatrixXd m(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) m(i, j) = rng.gaussian();
  return m;
}

ActivationMatrix gen_random_raw(Eigen::Index n, Eigen::Index p, uint64_t seed) {
  RandomStream rng(seed, 0);
  return ActivationMatrix(gaussian_matrix(n, p, rng), false);
}

ActivationMatrix gen_random(Eigen::Index n, Eigen::Index p, uint64_t seed) {
  return center_columns(gen_random_raw(n, p, seed));
}

Eigen::MatrixXd random_orthogonal(Eigen::Index p, RandomStream& rng) {
  const Eigen::MatrixXd g = gaussian_matrix(p, p, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < p; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return q;
}

AppliedRelation apply_relation(const ActivationMatrix& x, const Relation& relation,
                               uint64_t seed) {
  AppliedRelation out;
  switch (relation.kind) {
    case RelationKind::isotropic_scale: {
      if (!(relation.scale > 0.0))
        throw validation_error("isotropic-scale needs a positive factor");
      out.matrix = ActivationMatrix(relation.scale * x.data, x.centered);
      return out;
    }
    case RelationKind::orthogonal_transform: {
      RandomStream rng(seed, 1);
      const Eigen::MatrixXd u = random_orthogonal(x.p(), rng);
      out.matrix = ActivationMatrix(x.data * u, x.centered);
      return out;
    }
    case RelationKind::invertible_transform: {
      constexpr int kMaxRetries = 8;
      constexpr double kMaxCondition = 1e6;
      for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        RandomStream rng(seed, 2 + static_cast<uint64_t>(attempt));
        const Eigen::MatrixXd a = gaussian_matrix(x.p(), x.p(), rng);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
        const double cond =
            svd.singularValues()(0) / svd.singularValues()(x.p() - 1);
        if (std::isfinite(cond) && cond < kMaxCondition) {
          out.matrix = ActivationMatrix(x.data * a, x.centered);
          out.condition_number = cond;
          return out;
        }
      }
      throw degenerate_error(
          "apply_relation: could not sample a well-conditioned transform");
    }
    case RelationKind::independent:
    case RelationKind::shared_subspace:
      throw validation_error(
          "apply_relation handles orthogonal/invertible/scale relations only");
  }
  throw validation_error("unknown relation kind");
}

std::pair<ActivationMatrix, ActivationMatrix> gen_shared_subspace_pair(
    const SynthSpec& spec) {
  const Eigen::Index k = spec.p;  // one spectral slot per feature
  if (spec.n < 2 || spec.p < 2)
    throw validation_error("shared-subspace generator needs n, p >= 2");
  if (!(spec.spectrum_decay > 0.0) || spec.spectrum_decay > 1.0)
    throw validation_error("spectrum_decay must be in (0, 1]");
  if (spec.noise_level < 0.0) throw validation_error("noise_level must be >= 0");
  if (static_cast<Eigen::Index>(spec.shared_indices.size()) > k)
    throw validation_error("more shared indices than components");
  for (Eigen::Index idx : spec.shared_indices)
    if (idx < 0 || idx >= k)
      throw validation_error("shared index " + std::to_string(idx) +
                             " outside [0, " + std::to_string(k) + ")");
  if (spec.n < 2 * k + 1)
    throw validation_error(
        "shared-subspace generator needs n >= 2p + 1 for a disjoint dictionary");

  // Orthonormal dictionary of 2k directions inside the centered subspace:
  // X always uses slots [0, k); Y reuses the X direction on shared slots and
  // takes the disjoint direction k + i otherwise.
  RandomStream dict_rng(spec.seed, 0);
  Eigen::MatrixXd g = gaussian_matrix(spec.n, 2 * k, dict_rng);
  g.rowwise() -= g.colwise().mean();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd dict =
      Eigen::MatrixXd(qr.householderQ()).leftCols(2 * k);

  const std::set<Eigen::Index> shared(spec.shared_indices.begin(),
                                      spec.shared_indices.end());
  Eigen::MatrixXd base_x(spec.n, k), base_y(spec.n, k);
  Eigen::VectorXd sv(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    base_x.col(i) = dict.col(i);
    base_y.col(i) = shared.count(i) ? dict.col(i) : dict.col(k + i);
    sv(i) = std::sqrt(std::pow(spec.spectrum_decay, static_cast<double>(i)));
  }

  RandomStream rot_x(spec.seed, 1), rot_y(spec.seed, 2);
  Eigen::MatrixXd x = base_x * sv.asDiagonal() * random_orthogonal(k, rot_x).transpose();
  Eigen::MatrixXd y = base_y * sv.asDiagonal() * random_orthogonal(k, rot_y).transpose();
  if (spec.noise_level > 0.0) {
    RandomStream noise_rng(spec.seed, 3);
    x += spec.noise_level * gaussian_matrix(spec.n, spec.p, noise_rng);
    y += spec.noise_level * gaussian_matrix(spec.n, spec.p, noise_rng);
    x.rowwise() -= x.colwise().mean();
    y.rowwise() -= y.colwise().mean();
  }
  return {ActivationMatrix(std::move(x), true), ActivationMatrix(std::move(y), true)};
}

Eigen::MatrixXd matching_linear_transform(const ActivationMatrix& x, const ActivationMatrix& y) {
  const Eigen::Index n = x.n();
  const Eigen::Index p = x.p();
  if (y.n() != n || y.p() != p)
    throw validation_error("matching_linear_transform needs equal n x p shapes");
  if (p < n) throw validation_error("matching_linear_transform needs p >= n");

  // Rows of K are an orthonormal basis of the null space of the rows of M.
  auto stack_with_null_basis = [&](const Eigen::MatrixXd& m) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const Eigen::VectorXd& s = svd.singularValues();
    if (s(n - 1) <= kDefaultRankTol * s(0))
      throw degenerate_error("matching_linear_transform: input is rank-deficient");
    Eigen::MatrixXd stacked(p, p);
    stacked.topRows(n) = m;
    stacked.bottomRows(p - n) = svd.matrixV().rightCols(p - n).transpose();
    return stacked;
  };

  const Eigen::MatrixXd xs = stack_with_null_basis(x.data);
  const Eigen::MatrixXd ys = stack_with_null_basis(y.data);
  return xs.partialPivLu().solve(ys);
}

std::vector<ActivationMatrix> gen_layer_stack(Eigen::Index layers, Eigen::Index n,
                                              Eigen::Index p, uint64_t structural_seed,
                                              uint64_t network_seed, double noise_level,
                                              Eigen::Index signal_rank) {
  if (layers < 2) throw validation_error("gen_layer_stack needs at least 2 layers");
  if (signal_rank < 1 || signal_rank >= n)
    throw validation_error("gen_layer_stack needs 1 <= signal_rank < n");
  if (layers * signal_rank > n)
    throw validation_error(
        "gen_layer_stack: layers * signal_rank must not exceed n "
        "(signal subspaces are mutually orthogonal)");
  if (p < n)
    throw validation_error("gen_layer_stack needs p >= n (full-rank-n layers)");
  if (noise_level < 0.0) throw validation_error("noise_level must be >= 0");

  RandomStream structural_rng(structural_seed, 0);
  const Eigen::MatrixXd g = gaussian_matrix(n, layers * signal_rank, structural_rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd signals =
      Eigen::MatrixXd(qr.householderQ()).leftCols(layers * signal_rank);

  std::vector<ActivationMatrix> stack;
  stack.reserve(static_cast<size_t>(layers));
  for (Eigen::Index l = 0; l < layers; ++l) {
    RandomStream mix_rng(network_seed, 1 + 2 * static_cast<uint64_t>(l));
    RandomStream noise_rng(network_seed, 2 + 2 * static_cast<uint64_t>(l));
    const Eigen::MatrixXd mix = gaussian_matrix(signal_rank, p, mix_rng);
    Eigen::MatrixXd layer =
        signals.middleCols(l * signal_rank, signal_rank) * mix +
        noise_level * gaussian_matrix(n, p, noise_rng);
    stack.emplace_back(std::move(layer), false);
  }
  return stack;
}

}  // namespace repsim
