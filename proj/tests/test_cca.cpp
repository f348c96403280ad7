#include "doctest.h"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>

#include "repsim/cca.hpp"
#include "repsim/cka.hpp"
#include "repsim/errors.hpp"
#include "repsim/synth.hpp"
#include "test_util.hpp"

using namespace repsim;

namespace {

ActivationMatrix column(std::initializer_list<double> values, bool centered = false) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index i = 0;
  for (double v : values) m(i++, 0) = v;
  return ActivationMatrix(std::move(m), centered);
}

Eigen::MatrixXd centered_orthobasis(Eigen::Index n, Eigen::Index k, uint64_t seed) {
  RandomStream rng(seed, 0);
  Eigen::MatrixXd g = gaussian_matrix(n, k, rng);
  g.rowwise() -= g.colwise().mean();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return Eigen::MatrixXd(qr.householderQ()).leftCols(k);
}

ActivationMatrix with_invertible_transform(const ActivationMatrix& x, uint64_t seed) {
  return apply_relation(x, {RelationKind::invertible_transform, 1.0}, seed).matrix;
}

const ActivationMatrix kFixtureX = column({1, -1, 0}, true);
const ActivationMatrix kFixtureY = column({0, 1, -1}, true);

}  // namespace

TEST_CASE("cca canonical correlations") {
  SUBCASE("invertible transform gives all rhos = 1") {
    const ActivationMatrix x = gen_random(12, 4, 1);
    const CCAResult res = cca(x, with_invertible_transform(x, 2));
    REQUIRE(res.effective_rank == 4);
    for (Eigen::Index i = 0; i < res.rhos.size(); ++i)
      CHECK(std::abs(res.rhos(i) - 1.0) <= 1e-8);
  }
  SUBCASE("orthogonal column spaces give all rhos = 0") {
    const Eigen::MatrixXd basis = centered_orthobasis(10, 6, 3);
    const CCAResult res = cca(ActivationMatrix(basis.leftCols(3), true),
                              ActivationMatrix(basis.rightCols(3), true));
    for (Eigen::Index i = 0; i < res.rhos.size(); ++i)
      CHECK(std::abs(res.rhos(i)) <= 1e-8);
  }
  SUBCASE("single-feature fixture equals |Pearson correlation|") {
    const CCAResult res = cca(kFixtureX, kFixtureY);
    REQUIRE(res.effective_rank == 1);
    CHECK(res.rhos(0) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("rank-0 input is degenerate") {
    CHECK_THROWS_AS(cca(ActivationMatrix(Eigen::MatrixXd::Zero(4, 2), true),
                        gen_random(4, 2, 4)),
                    degenerate_error);
  }
}

TEST_CASE("cca result invariants") {
  const ActivationMatrix x = gen_random(14, 5, 5);
  const ActivationMatrix y = gen_random(14, 3, 6);
  const CCAResult res = cca(x, y);
  REQUIRE(res.effective_rank == 3);
  for (Eigen::Index i = 0; i < res.rhos.size(); ++i) {
    CHECK(res.rhos(i) >= -1e-8);
    CHECK(res.rhos(i) <= 1.0 + 1e-8);
    if (i > 0) CHECK(res.rhos(i) <= res.rhos(i - 1));
  }
  // Canonical variables are orthogonal with unit sample variance, and the
  // weights reproduce them from the inputs.
  const Eigen::MatrixXd cross = res.canonical_x.transpose() * res.canonical_x;
  const double diag_scale = cross.diagonal().cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < cross.rows(); ++i) {
    CHECK(cross(i, i) / static_cast<double>(x.n() - 1) ==
          doctest::Approx(1.0).epsilon(1e-8));
    for (Eigen::Index j = 0; j < cross.cols(); ++j)
      if (i != j) CHECK(std::abs(cross(i, j)) <= 1e-6 * diag_scale);
  }
  CHECK(max_abs_diff(x.data * res.weights_x, res.canonical_x) <= 1e-8);
  // Correlations between paired canonical variables match the rhos.
  const Eigen::MatrixXd hy = y.data * res.weights_y;
  for (Eigen::Index i = 0; i < res.effective_rank; ++i) {
    const double corr = res.canonical_x.col(i).dot(hy.col(i)) /
                        (res.canonical_x.col(i).norm() * hy.col(i).norm());
    CHECK(std::abs(std::abs(corr) - res.rhos(i)) <= 1e-8);
  }
}

TEST_CASE("r2_cca and rho_bar_cca summaries") {
  SUBCASE("perfect correlation saturates at 1") {
    const ActivationMatrix x = gen_random(10, 3, 7);
    const CCAResult res = cca(x, with_invertible_transform(x, 8));
    CHECK(std::abs(r2_cca(res, 3).value - 1.0) <= 1e-8);
    CHECK(std::abs(rho_bar_cca(res, 3).value - 1.0) <= 1e-8);
  }
  SUBCASE("single-pair fixture") {
    const CCAResult res = cca(kFixtureX, kFixtureY);
    CHECK(r2_cca(res, 1).value == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(rho_bar_cca(res, 1).value == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("rho_bar dominates r2") {
    for (uint64_t seed : {9, 10, 11}) {
      const ActivationMatrix x = gen_random(12, 4, seed);
      const ActivationMatrix y = gen_random(12, 5, seed + 20);
      const CCAResult res = cca(x, y);
      CHECK(rho_bar_cca(res, 4).value >= r2_cca(res, 4).value - 1e-12);
    }
  }
}

TEST_CASE("CCA summary invariances") {
  const ActivationMatrix x = gen_random(16, 4, 12);
  const ActivationMatrix y = gen_random(16, 6, 13);
  const double r2 = r2_cca(cca(x, y), 4).value;
  const double rho = rho_bar_cca(cca(x, y), 4).value;

  SUBCASE("independent invertible transforms") {
    const ActivationMatrix xa = with_invertible_transform(x, 14);
    const ActivationMatrix yb = with_invertible_transform(y, 15);
    CHECK(std::abs(r2_cca(cca(xa, yb), 4).value - r2) <= 1e-8);
    CHECK(std::abs(rho_bar_cca(cca(xa, yb), 4).value - rho) <= 1e-8);
  }
  SUBCASE("orthogonal transforms and isotropic scaling") {
    RandomStream rng(16, 0);
    const ActivationMatrix xu(x.data * random_orthogonal(4, rng), true);
    const ActivationMatrix ys(0.37 * y.data, true);
    CHECK(std::abs(r2_cca(cca(xu, ys), 4).value - r2) <= 1e-8);
    CHECK(std::abs(rho_bar_cca(cca(xu, ys), 4).value - rho) <= 1e-8);
  }
}

TEST_CASE("width degeneracy: wide full-rank inputs are indistinguishable") {
  for (uint64_t seed : {17, 18}) {
    const ActivationMatrix x = center_columns(gen_random_raw(8, 12, seed));
    const ActivationMatrix y = center_columns(gen_random_raw(8, 12, seed + 40));
    const ActivationMatrix z = center_columns(gen_random_raw(8, 12, seed + 80));
    CHECK(std::abs(r2_cca(cca(x, z), 12).value - r2_cca(cca(y, z), 12).value) <= 1e-8);
    CHECK(std::abs(rho_bar_cca(cca(x, z), 12).value -
                   rho_bar_cca(cca(y, z), 12).value) <= 1e-8);
  }
}

TEST_CASE("svcca") {
  SUBCASE("threshold 1 equals full CCA") {
    const ActivationMatrix x = gen_random(12, 4, 19);
    const ActivationMatrix y = gen_random(12, 5, 20);
    const auto [r2, rho] = svcca(x, y, SVCCAParams{1.0});
    const CCAResult full = cca(x, y);
    CHECK(std::abs(r2.value - r2_cca(full, 4).value) <= 1e-10);
    CHECK(std::abs(rho.value - rho_bar_cca(full, 4).value) <= 1e-10);
    CHECK(r2.metadata.at("kept_x") == 4.0);
  }
  SUBCASE("one dominant component is kept alone at threshold 0.99") {
    // First component carries >= 99% of the variance by construction.
    const Eigen::MatrixXd basis = centered_orthobasis(12, 4, 21);
    Eigen::VectorXd scales(4);
    scales << 100.0, 0.1, 0.05, 0.02;
    const ActivationMatrix x(basis * scales.asDiagonal(), true);
    const ActivationMatrix y = gen_random(12, 4, 22);
    const auto [r2, rho] = svcca(x, y, SVCCAParams{0.99});
    CHECK(r2.metadata.at("kept_x") == 1.0);
    CHECK(rho.metadata.at("kept_x") == 1.0);
  }
  SUBCASE("matches the literal truncated-identity formula") {
    const ActivationMatrix x = gen_random(10, 4, 23);
    const ActivationMatrix y = gen_random(10, 4, 24);
    const double threshold = 0.5;
    const auto [r2, rho] = svcca(x, y, SVCCAParams{threshold});

    // Independent oracle: thin SVDs, select singular vectors with truncated
    // identity matrices, evaluate the quotient formulas literally.
    auto truncated = [&](const ActivationMatrix& m) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.data, Eigen::ComputeThinU);
      const Eigen::VectorXd lambda = svd.singularValues().array().square();
      const double total = lambda.sum();
      Eigen::Index kept = lambda.size();
      double cum = 0.0;
      for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        cum += lambda(i);
        if (cum >= threshold * total) {
          kept = i + 1;
          break;
        }
      }
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(lambda.size(), lambda.size());
      for (Eigen::Index i = 0; i < kept; ++i) t(i, i) = 1.0;
      return std::make_pair(Eigen::MatrixXd(svd.matrixU() * t), kept);
    };
    const auto [ux, kx] = truncated(x);
    const auto [uy, ky] = truncated(y);
    const Eigen::MatrixXd a = uy.transpose() * ux;
    Eigen::JacobiSVD<Eigen::MatrixXd> asvd(a);
    const double denom = static_cast<double>(std::min(kx, ky));
    CHECK(std::abs(r2.value - asvd.singularValues().squaredNorm() / denom) <= 1e-10);
    CHECK(std::abs(rho.value - asvd.singularValues().sum() / denom) <= 1e-10);
  }
  SUBCASE("orthogonal transform keeps the retained subspace and scores") {
    const ActivationMatrix x = gen_random(12, 4, 25);
    const ActivationMatrix y = gen_random(12, 5, 26);
    RandomStream rng(27, 0);
    const ActivationMatrix xu(x.data * random_orthogonal(4, rng), true);
    const auto [r2a, rhoa] = svcca(x, y, SVCCAParams{0.9});
    const auto [r2b, rhob] = svcca(xu, y, SVCCAParams{0.9});
    CHECK(r2a.metadata.at("kept_x") == r2b.metadata.at("kept_x"));
    CHECK(std::abs(r2a.value - r2b.value) <= 1e-8);
    CHECK(std::abs(rhoa.value - rhob.value) <= 1e-8);
  }
  SUBCASE("threshold validation") {
    const ActivationMatrix x = gen_random(6, 2, 28);
    CHECK_THROWS_AS(svcca(x, x, SVCCAParams{0.0}), validation_error);
    CHECK_THROWS_AS(svcca(x, x, SVCCAParams{1.5}), validation_error);
  }
}

TEST_CASE("linear regression R^2") {
  SUBCASE("design spanning the target gives 1") {
    const ActivationMatrix design = gen_random(10, 4, 29);
    RandomStream rng(30, 0);
    const Eigen::MatrixXd b = gaussian_matrix(4, 3, rng);
    const ActivationMatrix target(design.data * b, true);
    CHECK(std::abs(linear_regression_r2(target, design).value - 1.0) <= 1e-10);
  }
  SUBCASE("orthogonal design gives 0") {
    const Eigen::MatrixXd basis = centered_orthobasis(10, 6, 31);
    const ActivationMatrix target(basis.leftCols(3), true);
    const ActivationMatrix design(basis.rightCols(3), true);
    CHECK(std::abs(linear_regression_r2(target, design).value) <= 1e-10);
  }
  SUBCASE("single-feature fixture equals squared correlation") {
    CHECK(linear_regression_r2(kFixtureX, kFixtureY).value ==
          doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("zero target is degenerate") {
    CHECK_THROWS_AS(linear_regression_r2(ActivationMatrix(Eigen::MatrixXd::Zero(6, 2), true),
                                         gen_random(6, 2, 32)),
                    degenerate_error);
  }
}

TEST_CASE("regression residual orthogonality against the normal equations") {
  for (uint64_t seed : {33, 34}) {
    const ActivationMatrix x = gen_random(12, 3, seed);
    const ActivationMatrix y = gen_random(12, 5, seed + 60);
    // Explicit least squares min_B ||X - Y B||_F^2 via the normal equations.
    const Eigen::MatrixXd b =
        (y.data.transpose() * y.data).ldlt().solve(y.data.transpose() * x.data);
    const double residual = (x.data - y.data * b).squaredNorm();
    const double explained = linear_regression_r2(x, y).value * x.data.squaredNorm();
    const double total = x.data.squaredNorm();
    CHECK(std::abs((total - explained) - residual) <= 1e-8 * total);
  }
}

TEST_CASE("pwcca") {
  SUBCASE("identical inputs give 1") {
    const ActivationMatrix x = gen_random(10, 3, 35);
    CHECK(std::abs(pwcca(x, x).value - 1.0) <= 1e-10);
  }
  SUBCASE("single feature reduces to rho_1") {
    const ActivationMatrix x = gen_random(10, 1, 36);
    const ActivationMatrix y = gen_random(10, 4, 37);
    CHECK(pwcca(x, y).value == doctest::Approx(cca(x, y).rhos(0)).epsilon(1e-12));
  }
  SUBCASE("matches the literal absolute-weight formula") {
    const ActivationMatrix x = gen_random(12, 3, 38);
    const ActivationMatrix y = gen_random(12, 4, 39);
    const CCAResult res = cca(x, y);
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < res.effective_rank; ++i) {
      double alpha = 0.0;
      for (Eigen::Index j = 0; j < x.p(); ++j)
        alpha += std::abs(res.canonical_x.col(i).dot(x.data.col(j)));
      num += alpha * res.rhos(i);
      den += alpha;
    }
    CHECK(pwcca(x, y).value == doctest::Approx(num / den).epsilon(1e-12));
  }
  SUBCASE("invariant to isotropic scaling, not to orthogonal transforms") {
    const ActivationMatrix x = gen_random(14, 4, 40);
    const ActivationMatrix y = gen_random(14, 5, 41);
    const double base = pwcca(x, y).value;
    const ActivationMatrix xs(2.5 * x.data, true);
    const ActivationMatrix ys(0.2 * y.data, true);
    CHECK(std::abs(pwcca(xs, ys).value - base) <= 1e-8);
    RandomStream rng(42, 0);
    const ActivationMatrix xu(x.data * random_orthogonal(4, rng), true);
    CHECK(std::abs(pwcca(xu, y).value - base) > 1e-6);
  }
}

TEST_CASE("modified pwcca recovers linear regression") {
  SUBCASE("identical inputs give 1") {
    const ActivationMatrix x = gen_random(9, 3, 43);
    CHECK(std::abs(modified_pwcca(x, x).value - 1.0) <= 1e-10);
  }
  SUBCASE("random pairs, including rank-deficient first arguments") {
    for (uint64_t seed : {44, 45, 46}) {
      const ActivationMatrix x = gen_random(12, 3, seed);
      const ActivationMatrix y = gen_random(12, 5, seed + 70);
      CHECK(std::abs(modified_pwcca(x, y).value -
                     linear_regression_r2(x, y).value) <= 1e-8);
      // Duplicate a column: rank(x_deficient) = 3 <= rank(y).
      Eigen::MatrixXd deficient(12, 4);
      deficient << x.data, x.data.col(0);
      const ActivationMatrix xd(deficient, true);
      CHECK(std::abs(modified_pwcca(xd, y).value -
                     linear_regression_r2(xd, y).value) <= 1e-8);
    }
  }
  SUBCASE("orthogonal target and design give 0") {
    const Eigen::MatrixXd basis = centered_orthobasis(10, 6, 47);
    const ActivationMatrix x(basis.leftCols(3), true);
    const ActivationMatrix y(basis.rightCols(3), true);
    CHECK(std::abs(modified_pwcca(x, y).value) <= 1e-10);
  }
}

TEST_CASE("identity: R2_CCA from orthonormal-basis Grams") {
  // R2_CCA = CKA(Qx Qx^T, Qy Qy^T) * sqrt(p2 / p1) for full-rank inputs.
  for (uint64_t seed : {48, 49}) {
    const ActivationMatrix x = gen_random(14, 4, seed);
    const ActivationMatrix y = gen_random(14, 6, seed + 90);
    const OrthonormalBasis qx = orthonormal_basis(x);
    const OrthonormalBasis qy = orthonormal_basis(y);
    GramMatrix gx, gy;
    gx.values = qx.q * qx.q.transpose();
    gy.values = qy.q * qy.q.transpose();
    const double lhs = r2_cca(cca(x, y), 4).value;
    const double rhs = cka(gx, gy).value * std::sqrt(6.0 / 4.0);
    CHECK(std::abs(lhs - rhs) <= 1e-8);
  }
}

TEST_CASE("identity: R2_LR from mixed Grams") {
  // R2_LR = CKA(XX^T, Qy Qy^T) * sqrt(r_y) ||X^T X||_F / ||X||_F^2 where r_y
  // is the design rank (the derivation's constant; sqrt(p2) at full rank).
  for (uint64_t seed : {50, 51}) {
    const ActivationMatrix x = gen_random(14, 4, seed);
    const ActivationMatrix y = gen_random(14, 6, seed + 90);
    const OrthonormalBasis qy = orthonormal_basis(y);
    GramMatrix gx, gy;
    gx.values = x.data * x.data.transpose();
    gy.values = qy.q * qy.q.transpose();
    const double lhs = linear_regression_r2(x, y).value;
    const double rhs = cka(gx, gy).value * std::sqrt(static_cast<double>(qy.r)) *
                       (x.data.transpose() * x.data).norm() / x.data.squaredNorm();
    CHECK(std::abs(lhs - rhs) <= 1e-8);
  }
}

TEST_CASE("identity: R2_CCA from eigenvector inner products") {
  for (uint64_t seed : {52, 53}) {
    const ActivationMatrix x = gen_random(14, 4, seed);
    const ActivationMatrix y = gen_random(14, 6, seed + 90);
    const Spectrum sx = spectrum(x);
    const Spectrum sy = spectrum(y);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < sx.size(); ++i)
      for (Eigen::Index j = 0; j < sy.size(); ++j) {
        const double dot = sx.eigenvectors.col(i).dot(sy.eigenvectors.col(j));
        sum += dot * dot;
      }
    CHECK(std::abs(sum / 4.0 - r2_cca(cca(x, y), 4).value) <= 1e-8);
  }
}

TEST_CASE("canonical ridge") {
  const ActivationMatrix x = gen_random(16, 4, 54);
  const ActivationMatrix y = gen_random(16, 6, 55);
  const double lambda_max =
      std::max(spectrum(x).eigenvalues(0), spectrum(y).eigenvalues(0));

  SUBCASE("kappa = 0 recovers R2_CCA under both tight normalizations") {
    const double r2 = r2_cca(cca(x, y), 4).value;
    for (RidgeNormalization norm :
         {RidgeNormalization::vn_trace, RidgeNormalization::cauchy_schwarz_min}) {
      RidgeParams params{0.0, 0.0, norm};
      CHECK(std::abs(canonical_ridge_similarity(x, y, params).value - r2) <= 1e-8);
    }
  }
  SUBCASE("large kappa_x with vn-trace recovers regression R2") {
    RidgeParams params{1e8 * spectrum(x).eigenvalues(0), 0.0,
                       RidgeNormalization::vn_trace};
    CHECK(std::abs(canonical_ridge_similarity(x, y, params).value -
                   linear_regression_r2(x, y).value) <= 1e-4);
  }
  SUBCASE("large symmetric kappa with separable normalization recovers linear CKA") {
    RidgeParams params{1e8 * lambda_max, 1e8 * lambda_max,
                       RidgeNormalization::separable};
    CHECK(std::abs(canonical_ridge_similarity(x, y, params).value -
                   linear_cka_feature(x, y).value) <= 1e-4);
  }
  SUBCASE("kappa validation") {
    CHECK_THROWS_AS(
        canonical_ridge_similarity(x, y, RidgeParams{-1.0, 0.0,
                                                     RidgeNormalization::vn_trace}),
        validation_error);
  }
}

TEST_CASE("procrustes nuclear norm") {
  SUBCASE("single-feature fixture") {
    CHECK(procrustes_nuclear(kFixtureX, kFixtureY).value ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("self value is the eigenvalue sum") {
    const ActivationMatrix x = gen_random(10, 4, 56);
    const double expected = x.data.squaredNorm();
    CHECK(procrustes_nuclear(x, x).value ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK_FALSE(procrustes_nuclear(x, x).normalized);
  }
  SUBCASE("upper-bounds the alignment trace over orthogonal rotations") {
    const ActivationMatrix x = gen_random(12, 5, 57);
    const ActivationMatrix y = gen_random(12, 5, 58);
    const double value = procrustes_nuclear(x, y).value;
    const Eigen::MatrixXd c = x.data.transpose() * y.data;
    RandomStream rng(59, 0);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXd q = random_orthogonal(5, rng);
      CHECK((y.data.transpose() * x.data * q).trace() <= value + 1e-9);
    }
    // Equality at the SVD-derived optimum Q = U V^T of X^T Y.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        c, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::MatrixXd q_opt = svd.matrixU() * svd.matrixV().transpose();
    CHECK(std::abs((y.data.transpose() * x.data * q_opt).trace() - value) <= 1e-9);
  }
  SUBCASE("symmetric in its arguments") {
    const ActivationMatrix x = gen_random(9, 3, 60);
    const ActivationMatrix y = gen_random(9, 4, 61);
    CHECK(std::abs(procrustes_nuclear(x, y).value - procrustes_nuclear(y, x).value) <=
          1e-10);
  }
}
