#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "repsim/matrix.hpp"

namespace repsim {

/// Counter-based PRNG: Philox4x32-10 keyed by (seed, stream). The integer
/// stream is platform-independent; uniforms take the top 53 bits, Gaussians
/// come from the Box-Muller transform on consecutive uniforms.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed, uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  uint64_t next_u64();
  /// Uniform on (0, 1].
  double uniform();
  /// Standard normal.
  double gaussian();

 private:
  std::array<uint32_t, 4> block(uint64_t index) const;

  uint64_t seed_;
  uint64_t stream_;
  uint64_t block_index_ = 0;
  int word_pos_ = 4;  // 4 = buffer exhausted
  std::array<uint32_t, 4> buffer_{};
  bool have_cached_gaussian_ = false;
  double cached_gaussian_ = 0.0;
};

enum class RelationKind {
  independent,
  orthogonal_transform,
  invertible_transform,
  isotropic_scale,
  shared_subspace,
};

struct Relation {
  RelationKind kind = RelationKind::independent;
  double scale = 1.0;  // isotropic_scale only
};

/// Recipe for a generated matrix or related pair.
struct SynthSpec {
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  uint64_t seed = 0;
  Relation relation;
  // shared_subspace parameters
  std::vector<Eigen::Index> shared_indices;
  double spectrum_decay = 0.5;  // eigenvalue i of XX^T is decay^i
  double noise_level = 0.0;
};

/// i.i.d. standard-normal entries (row-major fill order), then column
/// centering. Identical seeds give bitwise-identical output.
ActivationMatrix gen_random(Eigen::Index n, Eigen::Index p, uint64_t seed);

/// Same draw without the centering step (centered = false). Needed wherever
/// full row rank n is required.
ActivationMatrix gen_random_raw(Eigen::Index n, Eigen::Index p, uint64_t seed);

/// Raw Gaussian fill from an existing stream, row-major order.
Eigen::MatrixXd gaussian_matrix(Eigen::Index n, Eigen::Index p, RandomStream& rng);

/// Haar-ish random orthogonal matrix: QR of a Gaussian square matrix with
/// the R diagonal sign fix.
Eigen::MatrixXd random_orthogonal(Eigen::Index p, RandomStream& rng);

struct AppliedRelation {
  ActivationMatrix matrix;
  /// Condition number of the sampled transform (1 for orthogonal/scale).
  double condition_number = 1.0;
};

/// X A (invertible), X U (orthogonal) or alpha X. Invertible transforms are
/// resampled (bounded retries) while the condition number exceeds 1e6.
AppliedRelation apply_relation(const ActivationMatrix& x, const Relation& relation,
                               uint64_t seed);

/// Pair built from one orthonormal component dictionary drawn inside the
/// centered subspace: slots listed in shared_indices use the same direction
/// in both matrices, all other slots use mutually orthogonal directions.
/// Eigenvalue i of each Gram is spectrum_decay^i (before noise).
std::pair<ActivationMatrix, ActivationMatrix> gen_shared_subspace_pair(
    const SynthSpec& spec);

/// The invertible A with X A = Y from stacked row-null-space bases, defined
/// for n x p inputs of full row rank n with p >= n.
Eigen::MatrixXd matching_linear_transform(const ActivationMatrix& x, const ActivationMatrix& y);

/// L related layers for one synthetic network: layer l = S_l M_l + noise N_l
/// where the orthonormal signals S_l (n x signal_rank, mutually orthogonal
/// across layers) depend only on structural_seed and M_l, N_l on
/// network_seed. Layers are full rank n (not centered); requires p >= n.
std::vector<ActivationMatrix> gen_layer_stack(Eigen::Index layers, Eigen::Index n,
                                              Eigen::Index p, uint64_t structural_seed,
                                              uint64_t network_seed,
                                              double noise_level = 0.1,
                                              Eigen::Index signal_rank = 4);

}  // namespace repsim
