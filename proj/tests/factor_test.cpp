#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "hankelpgd/errors.hpp"
#include "hankelpgd/factor.hpp"
#include "hankelpgd/oracle.hpp"
#include "hankelpgd/signal.hpp"
#include "test_support.hpp"

using namespace hankelpgd;
using testing::random_matrix;
using testing::random_unitary;
using testing::random_vector;

namespace {

CxMatrix rank_r_lifting(Index n, Index order, Rng& rng) {
  SpectralModel model;
  model.ndim = 1;
  model.freqs.resize(order, 1);
  model.taus = RealMatrix::Zero(order, 1);
  model.coeffs.resize(order);
  for (Index k = 0; k < order; ++k) {
    model.freqs(k, 0) = (0.13 + 0.31 * k) - std::floor(0.13 + 0.31 * k);
    model.coeffs[k] = rng.complex_gaussian() * 3.0;
  }
  const HankelShape shape({n});
  const CxVector x = synthesize(model, shape.dims());
  return oracle::dense_g(shape, d_scale(shape, x, ScaleDir::forward));
}

}  // namespace

TEST_CASE("truncated_svd: rank-one matrix") {
  Rng rng(31);
  CxVector u = random_vector(rng, 20);
  CxVector v = random_vector(rng, 15);
  u /= u.norm();
  v /= v.norm();
  const double sigma = 3.25;
  const CxMatrix a = sigma * u * v.adjoint();
  const TruncatedSvd svd = truncated_svd(as_operator(a), 1);
  CHECK(svd.values[0] == doctest::Approx(sigma).epsilon(1e-12));
  // match up to a unit phase
  CHECK(std::abs(std::abs(u.dot(svd.u.col(0))) - 1.0) <= 1e-10);
  CHECK(std::abs(std::abs(v.dot(svd.v.col(0))) - 1.0) <= 1e-10);
}

TEST_CASE("truncated_svd: exact on a rank-3 lifting") {
  Rng rng(32);
  const CxMatrix a = rank_r_lifting(40, 3, rng);
  const TruncatedSvd svd = truncated_svd(as_operator(a), 3);
  const CxMatrix approx =
      svd.u * svd.values.asDiagonal() * svd.v.adjoint();
  CHECK((approx - a).norm() <= 1e-10 * svd.values[0]);
  CHECK((svd.u.adjoint() * svd.u - CxMatrix::Identity(3, 3)).norm() <= 1e-10);
  CHECK((svd.v.adjoint() * svd.v - CxMatrix::Identity(3, 3)).norm() <= 1e-10);
}

TEST_CASE("truncated_svd: under-truncation matches dense top values") {
  Rng rng(33);
  const CxMatrix a = rank_r_lifting(40, 3, rng);
  const TruncatedSvd svd = truncated_svd(as_operator(a), 2);
  const oracle::DenseSvd ref = oracle::dense_svd(a);
  CHECK(svd.values[0] ==
        doctest::Approx(ref.values[0]).epsilon(1e-8));
  CHECK(svd.values[1] ==
        doctest::Approx(ref.values[1]).epsilon(1e-8));
}

TEST_CASE("truncated_svd: residual bound against the dense oracle") {
  Rng rng(34);
  for (int c = 0; c < 5; ++c) {
    const Index rows = 12 + static_cast<Index>(rng.uniform_index(30));
    const Index cols = 12 + static_cast<Index>(rng.uniform_index(30));
    const CxMatrix a = random_matrix(rng, rows, cols);
    const Index rank = 1 + static_cast<Index>(rng.uniform_index(4));
    const TruncatedSvd svd = truncated_svd(as_operator(a), rank, 1e-10);
    const oracle::DenseSvd ref = oracle::dense_svd(a);
    const CxMatrix approx = svd.u * svd.values.asDiagonal() * svd.v.adjoint();
    const double tail = rank < std::min(rows, cols) ? ref.values[rank] : 0.0;
    CHECK((a - approx).operatorNorm() <= (1.0 + 1e-6) * tail + 1e-9);
  }
}

TEST_CASE("truncated_svd: diagnostic error carries the residual") {
  Rng rng(35);
  const CxMatrix a = random_matrix(rng, 10, 10);
  try {
    truncated_svd(as_operator(a), 2, 1e-30, 2);
    FAIL("expected SvdConvergenceError");
  } catch (const SvdConvergenceError& e) {
    CHECK(e.residual() > 0.0);
  }
  CHECK_THROWS_AS(truncated_svd(as_operator(a), 11, 1e-10), ValidationError);
}

TEST_CASE("procrustes: orbit membership and invariance") {
  Rng rng(36);
  const CxMatrix m = random_matrix(rng, 25, 3);
  SUBCASE("aligned copy has zero distance") {
    const ProcrustesResult res = procrustes(m, m);
    CHECK(res.dist <= 1e-12 * m.norm());
    CHECK((res.q * res.q.adjoint() - CxMatrix::Identity(3, 3)).norm() <= 1e-12);
  }
  SUBCASE("unitary orbit") {
    const CxMatrix q0 = random_unitary(rng, 3);
    const ProcrustesResult res = procrustes(CxMatrix(m * q0), m);
    CHECK(res.dist <= 1e-12 * m.norm());
  }
}

TEST_CASE("procrustes: optimal among random unitaries") {
  Rng rng(37);
  const CxMatrix z = random_matrix(rng, 12, 2);
  const CxMatrix m = random_matrix(rng, 12, 2);
  const ProcrustesResult res = procrustes(z, m);
  for (int t = 0; t < 1000; ++t) {
    const CxMatrix q = random_unitary(rng, 2);
    CHECK(res.dist <= (z - m * q).norm() + 1e-12);
  }
}

TEST_CASE("procrustes: alignment certificate is Hermitian psd") {
  Rng rng(38);
  const CxMatrix z = random_matrix(rng, 20, 3);
  const CxMatrix m = random_matrix(rng, 20, 3);
  const ProcrustesResult res = procrustes(z, m);
  const CxMatrix aligned = m * res.q;
  const CxMatrix gram = aligned.adjoint() * z;
  CHECK((gram - gram.adjoint()).norm() <= 1e-10 * gram.norm());
  Eigen::SelfAdjointEigenSolver<CxMatrix> eig(
      CxMatrix(0.5 * (gram + gram.adjoint())));
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * gram.norm());
}

TEST_CASE("procrustes: factor distance dominated by the gram mismatch") {
  // dist^2(z, x) <= |z z* - x x*|_F^2 / (2 (sqrt(2) - 1) sigma_r(x)^2)
  Rng rng(39);
  for (int c = 0; c < 20; ++c) {
    const CxMatrix z = random_matrix(rng, 10, 2);
    const CxMatrix x = random_matrix(rng, 10, 2);
    const oracle::DenseSvd sx = oracle::dense_svd(x);
    const double sigma_r = sx.values[1];
    if (sigma_r < 0.3) continue;  // keep the bound well conditioned
    const double dist = procrustes(z, x).dist;
    const double gram_gap = (z * z.adjoint() - x * x.adjoint()).norm();
    const double bound = gram_gap * gram_gap /
                         (2.0 * (std::sqrt(2.0) - 1.0) * sigma_r * sigma_r);
    CHECK(dist * dist <= bound * (1.0 + 1e-10));
  }
}

TEST_CASE("project_feasible: trimming semantics") {
  Rng rng(40);
  ProjectionParams params;
  params.mu = 2.0;
  params.sigma = 3.0;
  params.aspect_const = 2.0;
  params.rank = 2;
  params.ambient = 48;
  const double bound = params.row_bound();
  CHECK(bound == doctest::Approx(std::sqrt(2.0 * 2.0 * 2 * 3.0 / 48.0)));

  SUBCASE("rows inside the bound pass through") {
    FactorPair z{random_matrix(rng, 6, 2), random_matrix(rng, 5, 2)};
    z.u *= 1e-3;
    z.v *= 1e-3;
    const FactorPair out = project_feasible(z, params);
    CHECK((out.u - z.u).norm() == 0.0);
    CHECK((out.v - z.v).norm() == 0.0);
  }
  SUBCASE("an oversized row is rescaled onto the bound") {
    FactorPair z{CxMatrix::Zero(4, 2), CxMatrix::Zero(3, 2)};
    z.u.row(1) << Complex(1.2, 0.4), Complex(-0.3, 0.9);
    z.u.row(1) *= 2.0 * bound / z.u.row(1).norm();
    const FactorPair out = project_feasible(z, params);
    CHECK(out.u.row(1).norm() == doctest::Approx(bound).epsilon(1e-15));
    const Complex scale = out.u(1, 0) / z.u(1, 0);
    CHECK((out.u.row(1) - scale * z.u.row(1)).norm() <= 1e-14 * bound);
  }
  SUBCASE("idempotent and non-expansive") {
    const FactorPair z1{random_matrix(rng, 8, 2), random_matrix(rng, 7, 2)};
    const FactorPair z2{random_matrix(rng, 8, 2), random_matrix(rng, 7, 2)};
    const FactorPair p1 = project_feasible(z1, params);
    const FactorPair p11 = project_feasible(p1, params);
    CHECK(testing::factor_diff_norm(p1, p11) <= 1e-15);
    const FactorPair p2 = project_feasible(z2, params);
    CHECK(testing::factor_diff_norm(p1, p2) <=
          testing::factor_diff_norm(z1, z2) * (1.0 + 1e-12));
  }
}
