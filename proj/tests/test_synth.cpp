#include "doctest.h"

#include <Eigen/SVD>

#include <cmath>

#include "repsim/cca.hpp"
#include "repsim/cka.hpp"
#include "repsim/errors.hpp"
#include "repsim/synth.hpp"
#include "test_util.hpp"

using namespace repsim;

TEST_CASE("random stream basics") {
  RandomStream a(42, 0), b(42, 0), c(43, 0);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
    CHECK(u == b.uniform());
  }
  bool any_diff = false;
  for (int i = 0; i < 10; ++i) any_diff |= (a.next_u64() != c.next_u64());
  CHECK(any_diff);
  // Rough Gaussian moments over a large-ish sample.
  RandomStream g(7, 0);
  double sum = 0.0, sumsq = 0.0;
  const int count = 20000;
  for (int i = 0; i < count; ++i) {
    const double z = g.gaussian();
    sum += z;
    sumsq += z * z;
  }
  CHECK(std::abs(sum / count) < 0.05);
  CHECK(std::abs(sumsq / count - 1.0) < 0.05);
}

TEST_CASE("gen_random determinism and centering") {
  const ActivationMatrix a = gen_random(4, 2, 7);
  const ActivationMatrix b = gen_random(4, 2, 7);
  CHECK(bitwise_equal(a.data, b.data));
  CHECK(a.centered);
  CHECK(a.data.colwise().mean().cwiseAbs().maxCoeff() <= 1e-12);
  const ActivationMatrix c = gen_random(4, 2, 8);
  CHECK_FALSE(bitwise_equal(a.data, c.data));
}

TEST_CASE("apply_relation") {
  const ActivationMatrix x = gen_random(9, 4, 9);
  SUBCASE("isotropic scale is exact") {
    const AppliedRelation out = apply_relation(x, {RelationKind::isotropic_scale, 2.0}, 1);
    CHECK(bitwise_equal(out.matrix.data, Eigen::MatrixXd(2.0 * x.data)));
    CHECK(out.condition_number == 1.0);
  }
  SUBCASE("orthogonal transform preserves the Gram matrix") {
    const AppliedRelation out =
        apply_relation(x, {RelationKind::orthogonal_transform, 1.0}, 2);
    CHECK(max_abs_diff(out.matrix.data * out.matrix.data.transpose(),
                       x.data * x.data.transpose()) <= 1e-10);
  }
  SUBCASE("invertible transform preserves the column space") {
    const AppliedRelation out =
        apply_relation(x, {RelationKind::invertible_transform, 1.0}, 3);
    CHECK(out.condition_number >= 1.0);
    CHECK(out.condition_number < 1e6);
    const OrthonormalBasis qa = orthonormal_basis(x);
    const OrthonormalBasis qb = orthonormal_basis(out.matrix);
    CHECK(max_abs_diff(qa.q * qa.q.transpose(), qb.q * qb.q.transpose()) <= 1e-8);
  }
  SUBCASE("pair-level kinds are rejected") {
    CHECK_THROWS_AS(apply_relation(x, {RelationKind::independent, 1.0}, 4),
                    validation_error);
  }
  SUBCASE("non-positive scale is rejected") {
    CHECK_THROWS_AS(apply_relation(x, {RelationKind::isotropic_scale, 0.0}, 5),
                    validation_error);
  }
}

namespace {
SynthSpec shared_spec(Eigen::Index n, Eigen::Index p, uint64_t seed,
                      std::vector<Eigen::Index> shared, double decay = 0.5) {
  SynthSpec spec;
  spec.n = n;
  spec.p = p;
  spec.seed = seed;
  spec.relation.kind = RelationKind::shared_subspace;
  spec.shared_indices = std::move(shared);
  spec.spectrum_decay = decay;
  return spec;
}
}  // namespace

TEST_CASE("shared-subspace pairs") {
  SUBCASE("all components shared gives CKA 1") {
    const auto [x, y] = gen_shared_subspace_pair(shared_spec(20, 6, 10, {0, 1, 2, 3, 4, 5}));
    CHECK(std::abs(linear_cka_feature(x, y).value - 1.0) <= 1e-8);
  }
  SUBCASE("no components shared gives CKA 0") {
    const auto [x, y] = gen_shared_subspace_pair(shared_spec(20, 6, 11, {}));
    CHECK(std::abs(linear_cka_feature(x, y).value) <= 1e-8);
  }
  SUBCASE("top-shared vs bottom-shared splits CKA but not R2_CCA") {
    const auto [x_top, y_top] = gen_shared_subspace_pair(shared_spec(48, 8, 12, {0, 1}));
    const auto [x_bot, y_bot] = gen_shared_subspace_pair(shared_spec(48, 8, 12, {6, 7}));
    const double r2_top = r2_cca(cca(x_top, y_top), 8).value;
    const double r2_bot = r2_cca(cca(x_bot, y_bot), 8).value;
    CHECK(std::abs(r2_top - r2_bot) <= 1e-6);
    const double cka_top = linear_cka_feature(x_top, y_top).value;
    const double cka_bot = linear_cka_feature(x_bot, y_bot).value;
    CHECK(cka_top - cka_bot >= 0.5);
  }
  SUBCASE("declared spectrum is realized") {
    const SynthSpec spec = shared_spec(20, 4, 13, {0, 2});
    const auto [x, y] = gen_shared_subspace_pair(spec);
    const Spectrum sx = spectrum(x);
    REQUIRE(sx.size() == 4);
    for (Eigen::Index i = 0; i < 4; ++i)
      CHECK(sx.eigenvalues(i) ==
            doctest::Approx(std::pow(0.5, static_cast<double>(i))).epsilon(1e-10));
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(gen_shared_subspace_pair(shared_spec(20, 4, 1, {4})),
                    validation_error);
    CHECK_THROWS_AS(gen_shared_subspace_pair(shared_spec(7, 4, 1, {})),
                    validation_error);
    SynthSpec bad = shared_spec(20, 4, 1, {});
    bad.spectrum_decay = 0.0;
    CHECK_THROWS_AS(gen_shared_subspace_pair(bad), validation_error);
  }
}

TEST_CASE("matching_linear_transform") {
  SUBCASE("square identity case reproduces Y") {
    const ActivationMatrix x(Eigen::MatrixXd::Identity(2, 2));
    const ActivationMatrix y = gen_random_raw(2, 2, 14);
    CHECK(max_abs_diff(matching_linear_transform(x, y), y.data) <= 1e-12);
  }
  SUBCASE("X = Y yields a transform acting as identity on the row space") {
    const ActivationMatrix x = gen_random_raw(3, 5, 15);
    const Eigen::MatrixXd a = matching_linear_transform(x, x);
    CHECK(max_abs_diff(x.data * a, x.data) <= 1e-10);
  }
  SUBCASE("random full-rank wide pair") {
    const ActivationMatrix x = gen_random_raw(3, 5, 16);
    const ActivationMatrix y = gen_random_raw(3, 5, 17);
    const Eigen::MatrixXd a = matching_linear_transform(x, y);
    CHECK(max_abs_diff(x.data * a, y.data) <= 1e-8);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    CHECK(svd.singularValues()(4) > 1e-10 * svd.singularValues()(0));
  }
  SUBCASE("shape and rank preconditions") {
    CHECK_THROWS_AS(matching_linear_transform(gen_random_raw(5, 3, 18), gen_random_raw(5, 3, 19)),
                    validation_error);
    Eigen::MatrixXd deficient = Eigen::MatrixXd::Zero(3, 5);
    deficient.row(0).setOnes();
    deficient.row(1).setOnes();
    deficient(2, 0) = 1.0;
    CHECK_THROWS_AS(
        matching_linear_transform(ActivationMatrix(deficient), gen_random_raw(3, 5, 20)),
        degenerate_error);
  }
}

TEST_CASE("gen_layer_stack") {
  const Eigen::Index layers = 4, n = 16, p = 20;
  SUBCASE("deterministic and full rank n") {
    const auto stack_a = gen_layer_stack(layers, n, p, 21, 22, 0.1, 4);
    const auto stack_b = gen_layer_stack(layers, n, p, 21, 22, 0.1, 4);
    REQUIRE(stack_a.size() == 4);
    for (size_t l = 0; l < stack_a.size(); ++l) {
      CHECK(bitwise_equal(stack_a[l].data, stack_b[l].data));
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack_a[l].data);
      CHECK(svd.singularValues()(n - 1) > 1e-8 * svd.singularValues()(0));
      CHECK_FALSE(stack_a[l].centered);
    }
  }
  SUBCASE("same structural seed aligns layers across networks") {
    const auto net1 = gen_layer_stack(layers, n, p, 23, 24, 0.1, 4);
    const auto net2 = gen_layer_stack(layers, n, p, 23, 25, 0.1, 4);
    double min_diag = 1.0, max_off = 0.0;
    for (Eigen::Index i = 0; i < layers; ++i)
      for (Eigen::Index j = 0; j < layers; ++j) {
        const double value =
            linear_cka_feature(center_columns(net1[static_cast<size_t>(i)]),
                               center_columns(net2[static_cast<size_t>(j)]))
                .value;
        if (i == j) min_diag = std::min(min_diag, value);
        else max_off = std::max(max_off, value);
      }
    CHECK(min_diag - max_off >= 0.1);
  }
  SUBCASE("wide full-rank layers make CCA constant across the grid") {
    const auto net1 = gen_layer_stack(3, 12, 12, 26, 27, 0.1, 4);
    const auto net2 = gen_layer_stack(3, 12, 12, 26, 28, 0.1, 4);
    double min_v = 1e300, max_v = -1e300;
    for (const auto& a : net1)
      for (const auto& b : net2) {
        const double value =
            r2_cca(cca(center_columns(a), center_columns(b)), 12).value;
        min_v = std::min(min_v, value);
        max_v = std::max(max_v, value);
      }
    CHECK(max_v - min_v <= 1e-6);
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(gen_layer_stack(1, 16, 20, 1, 2), validation_error);
    CHECK_THROWS_AS(gen_layer_stack(5, 16, 20, 1, 2, 0.1, 4), validation_error);
    CHECK_THROWS_AS(gen_layer_stack(2, 16, 8, 1, 2), validation_error);
  }
}
