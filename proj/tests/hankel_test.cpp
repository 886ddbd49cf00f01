#include <doctest.h>

#include "hankelpgd/errors.hpp"
#include "hankelpgd/hankel.hpp"
#include "hankelpgd/oracle.hpp"
#include "test_support.hpp"

using namespace hankelpgd;
using testing::random_matrix;
using testing::random_vector;

TEST_CASE("shape: pencil, weights and aspect constant") {
  const HankelShape shape({5}, std::vector<Index>{3});
  CHECK(shape.lifted_rows() == 3);
  CHECK(shape.lifted_cols() == 3);
  const RealVector& w = shape.axis_weights(0);
  REQUIRE(w.size() == 5);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == 2.0);
  CHECK(w[2] == 3.0);
  CHECK(w[3] == 2.0);
  CHECK(w[4] == 1.0);
  CHECK(shape.aspect_const() == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("shape: default pencil is the squarest split") {
  const HankelShape shape({127});
  CHECK(shape.pencil()[0] == 64);
  CHECK(shape.copencil()[0] == 64);
  CHECK(shape.pencil()[0] + shape.copencil()[0] == 127 + 1);
}

TEST_CASE("shape: joint weights multiply across axes") {
  const HankelShape shape({4, 4}, std::vector<Index>{2, 2});
  // multi-index (1,1) flattens row-major to 1*4 + 1
  CHECK(shape.sqrt_weights()[5] == doctest::Approx(std::sqrt(4.0)));
}

TEST_CASE("shape: weight identities hold exhaustively") {
  for (Index n = 1; n <= 64; ++n) {
    for (Index pencil = 1; pencil <= n; ++pencil) {
      const HankelShape shape({n}, std::vector<Index>{pencil});
      const RealVector& w = shape.axis_weights(0);
      double sum = 0.0;
      for (Index a = 0; a < n; ++a) {
        REQUIRE(w[a] >= 1.0);
        REQUIRE(w[a] == w[n - 1 - a]);
        sum += w[a];
      }
      REQUIRE(sum == static_cast<double>(pencil * (n - pencil + 1)));
      REQUIRE(shape.pencil()[0] + shape.copencil()[0] == n + 1);
    }
  }
}

TEST_CASE("shape: validation errors") {
  CHECK_THROWS_AS(HankelShape({}), ValidationError);
  CHECK_THROWS_AS(HankelShape({0}), ValidationError);
  CHECK_THROWS_AS(HankelShape({5}, std::vector<Index>{6}), ValidationError);
  CHECK_THROWS_AS(HankelShape({5, 5}, std::vector<Index>{2}), ValidationError);
  CHECK_THROWS_AS(HankelShape({2, 2, 2, 2}), ValidationError);
}

TEST_CASE("d_scale: forward values and exact inverse") {
  const HankelShape shape({5}, std::vector<Index>{3});
  const CxVector ones = CxVector::Ones(5);
  const CxVector scaled = d_scale(shape, ones, ScaleDir::forward);
  CHECK(scaled[0].real() == doctest::Approx(1.0));
  CHECK(scaled[1].real() == doctest::Approx(std::sqrt(2.0)));
  CHECK(scaled[2].real() == doctest::Approx(std::sqrt(3.0)));
  CHECK(scaled[3].real() == doctest::Approx(std::sqrt(2.0)));
  CHECK(scaled[4].real() == doctest::Approx(1.0));

  Rng rng(7);
  const CxVector z = random_vector(rng, 5);
  const CxVector round =
      d_scale(shape, d_scale(shape, z, ScaleDir::forward), ScaleDir::inverse);
  CHECK((round - z).norm() <= 1e-14 * z.norm());

  CHECK_THROWS_AS(d_scale(shape, CxVector::Zero(4), ScaleDir::forward),
                  DimensionError);
}

TEST_CASE("d_scale: degenerate pencil has unit weights") {
  const HankelShape shape({2, 2}, std::vector<Index>{1, 2});
  Rng rng(8);
  const CxVector z = random_vector(rng, 4);
  const CxVector scaled = d_scale(shape, z, ScaleDir::forward);
  CHECK((scaled - z).norm() == 0.0);
}

TEST_CASE("lifting: canonical basis vector hits one corner") {
  const HankelShape shape({5}, std::vector<Index>{3});
  CxVector z = CxVector::Zero(5);
  z[0] = 1.0;
  const CxMatrix lift = g_apply(shape, z).dense();
  CHECK(std::abs(lift(0, 0) - 1.0) <= 1e-15);
  CHECK(lift.cwiseAbs().sum() == doctest::Approx(1.0));
}

TEST_CASE("lifting: unweighted Hankel rows recovered through d_scale") {
  const HankelShape shape({5}, std::vector<Index>{3});
  CxVector z(5);
  for (Index i = 0; i < 5; ++i) z[i] = static_cast<double>(i);
  // lift of the forward-scaled signal is the plain Hankel matrix of z
  const CxMatrix lift =
      g_apply(shape, d_scale(shape, z, ScaleDir::forward)).dense();
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 3; ++j) {
      CHECK(std::abs(lift(i, j) - Complex(static_cast<double>(i + j), 0.0)) <=
            1e-14);
    }
  }
}

TEST_CASE("lifting: implicit dense equals the oracle construction") {
  Rng rng(21);
  const HankelShape shape({32});
  const CxVector z = random_vector(rng, 32);
  const CxMatrix fast = g_apply(shape, z).dense();
  const CxMatrix ref = oracle::dense_g(shape, z);
  CHECK((fast - ref).norm() <= 1e-13 * ref.norm());
}

TEST_CASE("gstar_factored: canonical case and dense agreement") {
  const HankelShape shape({5}, std::vector<Index>{3});
  CxMatrix zu = CxMatrix::Zero(3, 1), zv = CxMatrix::Zero(3, 1);
  zu(0, 0) = 1.0;
  zv(0, 0) = 1.0;
  const CxVector skew = gstar_factored(shape, zu, zv);
  CHECK(std::abs(skew[0] - 1.0) <= 1e-15);
  CHECK(skew.tail(4).norm() <= 1e-15);

  Rng rng(4);
  const HankelShape big({64});
  const CxMatrix u = random_matrix(rng, big.lifted_rows(), 3);
  const CxMatrix v = random_matrix(rng, big.lifted_cols(), 3);
  const CxVector fast = gstar_factored(big, u, v);
  const CxVector ref = oracle::dense_gstar(big, CxMatrix(u * v.adjoint()));
  CHECK((fast - ref).norm() <= 1e-12 * ref.norm());

  CHECK_THROWS_AS(gstar_factored(big, u, CxMatrix(v.topRows(5))),
                  DimensionError);
}

TEST_CASE("gstar_factored: inverts the lifting of a signal") {
  Rng rng(5);
  for (Index n : {17, 32}) {
    const HankelShape shape({n});
    const CxVector z = random_vector(rng, n);
    const CxMatrix lift = oracle::dense_g(shape, z);
    const oracle::DenseSvd svd = oracle::dense_svd(lift);
    const Index full = svd.values.size();
    const RealVector scale = svd.values.cwiseSqrt();
    const CxMatrix zu = svd.u.leftCols(full) * scale.asDiagonal();
    const CxMatrix zv = svd.v.leftCols(full) * scale.asDiagonal();
    const CxVector back = gstar_factored(shape, zu, zv);
    CHECK((back - z).norm() <= 1e-13 * z.norm());
  }
}

TEST_CASE("g_vector_times_factor: canonical case, dense agreement, linearity") {
  const HankelShape shape({5}, std::vector<Index>{3});
  CxVector w = CxVector::Zero(5);
  w[0] = 1.0;
  CxMatrix b = CxMatrix::Zero(3, 1);
  b(0, 0) = 1.0;
  const CxMatrix col = g_vector_times_factor(shape, w, b, LiftSide::left);
  CHECK(std::abs(col(0, 0) - 1.0) <= 1e-14);
  CHECK(col.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-12));

  Rng rng(6);
  const HankelShape big({48});
  const CxVector wr = random_vector(rng, 48);
  const CxMatrix br = random_matrix(rng, big.lifted_cols(), 2);
  const CxMatrix ar = random_matrix(rng, big.lifted_rows(), 2);
  const CxMatrix dense = oracle::dense_g(big, wr);
  const CxMatrix left = g_vector_times_factor(big, wr, br, LiftSide::left);
  CHECK((left - dense * br).norm() <= 1e-12 * left.norm());
  const CxMatrix right = g_vector_times_factor(big, wr, ar, LiftSide::right);
  CHECK((right - dense.adjoint() * ar).norm() <= 1e-12 * right.norm());

  const Complex alpha(0.7, -1.3);
  const CxMatrix scaled =
      g_vector_times_factor(big, CxVector(alpha * wr), br, LiftSide::left);
  CHECK((scaled - alpha * left).norm() <= 1e-14 * scaled.norm());

  CHECK_THROWS_AS(g_vector_times_factor(big, wr, br, LiftSide::right),
                  DimensionError);
}

TEST_CASE("lifting: adjointness and isometry across dimensions") {
  Rng rng(11);
  std::vector<std::vector<Index>> cases = {
      {31}, {64}, {9, 7}, {8, 8}, {4, 5, 3}};
  for (const auto& dims : cases) {
    const HankelShape shape(dims);
    const CxVector z = random_vector(rng, shape.ambient_size());
    const CxMatrix lift = oracle::dense_g(shape, z);
    const CxVector back = oracle::dense_gstar(shape, lift);
    CHECK((back - z).norm() <= 1e-12 * z.norm());

    const CxMatrix w =
        random_matrix(rng, shape.lifted_rows(), shape.lifted_cols());
    const Complex lhs = (lift.conjugate().cwiseProduct(w)).sum();
    const Complex rhs = z.dot(oracle::dense_gstar(shape, w));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));
  }
}

TEST_CASE("lifting: fast paths match dense at the largest 1-d probe") {
  Rng rng(13);
  for (Index n : {511, 512}) {
    const HankelShape shape({n});
    const CxMatrix u = random_matrix(rng, shape.lifted_rows(), 2);
    const CxMatrix v = random_matrix(rng, shape.lifted_cols(), 2);
    const CxVector fast = gstar_factored(shape, u, v);
    const CxVector ref =
        oracle::dense_gstar(shape, CxMatrix(u * v.adjoint()));
    CHECK((fast - ref).norm() <= 1e-11 * ref.norm());

    const CxVector w = random_vector(rng, n);
    const CxMatrix dense = oracle::dense_g(shape, w);
    const CxMatrix left = g_vector_times_factor(shape, w, v, LiftSide::left);
    CHECK((left - dense * v).norm() <= 1e-11 * left.norm());
    const CxMatrix right = g_vector_times_factor(shape, w, u, LiftSide::right);
    CHECK((right - dense.adjoint() * u).norm() <= 1e-11 * right.norm());
  }
}

TEST_CASE("lifting: fast paths match dense in two and three dimensions") {
  Rng rng(12);
  for (const auto& dims :
       std::vector<std::vector<Index>>{{12, 9}, {16, 16}, {4, 6, 5}}) {
    const HankelShape shape(dims);
    const Index rank = 2;
    const CxMatrix u = random_matrix(rng, shape.lifted_rows(), rank);
    const CxMatrix v = random_matrix(rng, shape.lifted_cols(), rank);
    const CxVector fast = gstar_factored(shape, u, v);
    const CxVector ref =
        oracle::dense_gstar(shape, CxMatrix(u * v.adjoint()));
    CHECK((fast - ref).norm() <= 1e-11 * ref.norm());

    const CxVector w = random_vector(rng, shape.ambient_size());
    const CxMatrix dense = oracle::dense_g(shape, w);
    const CxMatrix left = g_vector_times_factor(shape, w, v, LiftSide::left);
    CHECK((left - dense * v).norm() <= 1e-11 * left.norm());
    const CxMatrix right = g_vector_times_factor(shape, w, u, LiftSide::right);
    CHECK((right - dense.adjoint() * u).norm() <= 1e-11 * right.norm());
  }
}
