#include <doctest.h>

#include <nlohmann/json.hpp>

#include "hankelpgd/errors.hpp"
#include "hankelpgd/signal.hpp"
#include "test_support.hpp"

using namespace hankelpgd;

namespace {

SpectralModel single_mode(double freq, double tau, Complex coeff) {
  SpectralModel m;
  m.ndim = 1;
  m.freqs.resize(1, 1);
  m.freqs(0, 0) = freq;
  m.taus.resize(1, 1);
  m.taus(0, 0) = tau;
  m.coeffs.resize(1);
  m.coeffs[0] = coeff;
  return m;
}

}  // namespace

TEST_CASE("synthesize: quarter-period rotation") {
  const SpectralModel m = single_mode(0.25, 0.0, 1.0);
  const std::vector<Index> dims{4};
  const CxVector x = synthesize(m, dims);
  CHECK(std::abs(x[0] - Complex(1, 0)) <= 1e-15);
  CHECK(std::abs(x[1] - Complex(0, 1)) <= 1e-15);
  CHECK(std::abs(x[2] - Complex(-1, 0)) <= 1e-15);
  CHECK(std::abs(x[3] - Complex(0, -1)) <= 1e-15);
}

TEST_CASE("synthesize: pure decay") {
  const SpectralModel m = single_mode(0.0, std::log(2.0), 1.0);
  const std::vector<Index> dims{5};
  const CxVector x = synthesize(m, dims);
  for (Index a = 0; a < 5; ++a) {
    CHECK(std::abs(x[a] - Complex(std::pow(0.5, double(a)), 0)) <= 1e-14);
  }
}

TEST_CASE("synthesize: constant two-dimensional array") {
  SpectralModel m;
  m.ndim = 2;
  m.freqs = RealMatrix::Zero(1, 2);
  m.taus = RealMatrix::Zero(1, 2);
  m.coeffs.resize(1);
  m.coeffs[0] = Complex(0.7, -0.2);
  const std::vector<Index> dims{3, 4};
  const CxVector x = synthesize(m, dims);
  for (Index a = 0; a < x.size(); ++a) {
    CHECK(std::abs(x[a] - m.coeffs[0]) <= 1e-15);
  }
}

TEST_CASE("synthesize: linear in the coefficients") {
  Rng rng(51);
  std::vector<double> no_sep;
  SpectralModel a = random_model(1, 2, no_sep, {}, rng);
  SpectralModel b = random_model(1, 3, no_sep, {}, rng);
  SpectralModel merged;
  merged.ndim = 1;
  merged.freqs.resize(5, 1);
  merged.taus.resize(5, 1);
  merged.coeffs.resize(5);
  merged.freqs << a.freqs, b.freqs;
  merged.taus << a.taus, b.taus;
  merged.coeffs << a.coeffs, b.coeffs;
  const std::vector<Index> dims{33};
  const CxVector sum = synthesize(a, dims) + synthesize(b, dims);
  const CxVector whole = synthesize(merged, dims);
  CHECK((whole - sum).norm() <= 1e-13 * whole.norm());
}

TEST_CASE("synthesize: undamped signals are bounded by the coefficient mass") {
  Rng rng(52);
  std::vector<double> no_sep;
  const SpectralModel m = random_model(1, 4, no_sep, {}, rng);
  const std::vector<Index> dims{64};
  const CxVector x = synthesize(m, dims);
  const double mass = m.coeffs.cwiseAbs().sum();
  for (Index a = 0; a < x.size(); ++a) {
    CHECK(std::abs(x[a]) <= mass * (1.0 + 1e-12));
  }
}

TEST_CASE("wraparound_dist: values") {
  CHECK(wraparound_dist(0.1, 0.9) == doctest::Approx(0.2));
  CHECK(wraparound_dist(0.37, 0.37) == 0.0);
  CHECK(wraparound_dist(0.0, 0.5) == 0.5);
}

TEST_CASE("random_model: separation is a hard postcondition") {
  Rng rng(53);
  const std::vector<double> sep{0.4};
  for (int c = 0; c < 20; ++c) {
    const SpectralModel m = random_model(1, 2, sep, {}, rng);
    CHECK(wraparound_dist(m.freqs(0, 0), m.freqs(1, 0)) >= 0.4);
  }
}

TEST_CASE("random_model: amplitude law") {
  Rng rng(54);
  std::vector<double> no_sep;
  const SpectralModel m = random_model(1, 40, no_sep, {}, rng);
  for (Index k = 0; k < 40; ++k) {
    const double amp = std::abs(m.coeffs[k]);
    CHECK(amp >= 2.0);
    CHECK(amp <= 1.0 + std::sqrt(10.0) + 1e-12);
  }
}

TEST_CASE("random_model: deterministic given the seed") {
  Rng rng1(55), rng2(55);
  const std::vector<double> sep{0.05};
  const std::vector<DampingRange> damping{{8.0, 16.0}};
  const SpectralModel a = random_model(1, 3, sep, damping, rng1);
  const SpectralModel b = random_model(1, 3, sep, damping, rng2);
  CHECK((a.freqs - b.freqs).norm() == 0.0);
  CHECK((a.taus - b.taus).norm() == 0.0);
  CHECK((a.coeffs - b.coeffs).norm() == 0.0);
  for (Index k = 0; k < 3; ++k) {
    CHECK(a.taus(k, 0) >= 1.0 / 16.0);
    CHECK(a.taus(k, 0) <= 1.0 / 8.0);
  }
}

TEST_CASE("random_model: infeasible separation is rejected") {
  Rng rng(56);
  const std::vector<double> sep{0.5};
  CHECK_THROWS_AS(random_model(1, 2, sep, {}, rng), SeparationError);
}

TEST_CASE("add_noise: exact energy normalization") {
  Rng rng(57);
  const Index n = 40;
  const CxVector x = testing::random_vector(rng, n);
  const SampleSet samples =
      SampleSet::draw(n, 25, SampleMode::without_replacement, 7);
  SUBCASE("zero level is the identity") {
    Rng noise_rng(1);
    const CxVector same = add_noise(x, samples, 0.0, noise_rng);
    CHECK((same - x).norm() == 0.0);
  }
  for (double theta : {1e-3, 0.1, 1.0}) {
    Rng noise_rng(2);
    const CxVector noisy = add_noise(x, samples, theta, noise_rng);
    const CxVector e = noisy - x;
    const double ratio = e.norm() / samples.project(x).norm();
    CHECK(ratio == doctest::Approx(theta).epsilon(1e-14));
    // noise lives on the sampled support only
    for (Index a = 0; a < n; ++a) {
      if (samples.multiplicities()[a] == 0.0) {
        CHECK(std::abs(e[a]) == 0.0);
      }
    }
  }
}

TEST_CASE("rmse and the success rule") {
  Rng rng(58);
  const CxVector x = testing::random_vector(rng, 30);
  CHECK(rmse(x, x) == 0.0);
  CHECK(recovery_success(x, x));

  const CxVector close = 1.001 * x;
  CHECK(rmse(close, x) == doctest::Approx(1e-3).epsilon(1e-12));
  // the rule is boundary inclusive
  CHECK(recovery_success(close, x, rmse(close, x)));

  const CxVector zero = CxVector::Zero(30);
  CHECK(rmse(zero, x) == doctest::Approx(1.0));
  CHECK(!recovery_success(zero, x));
  CHECK_THROWS_AS(rmse(x, zero), MetricError);
}

TEST_CASE("coherence_report: single undamped mode") {
  const SpectralModel m = single_mode(0.3, 0.0, Complex(2.0, 1.0));
  const HankelShape shape({63});
  const CoherenceReport report = coherence_report(m, shape);
  // unit-modulus Vandermonde column: row energy exactly 1/n1
  CHECK(report.mu0 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(!report.rank_collapse);
  CHECK(report.kappa == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("coherence_report: coincident undamped modes collapse") {
  SpectralModel m;
  m.ndim = 1;
  m.freqs.resize(2, 1);
  m.freqs << 0.3, 0.3;
  m.taus = RealMatrix::Zero(2, 1);
  m.coeffs.resize(2);
  m.coeffs << Complex(1, 0), Complex(0, 1);
  const HankelShape shape({31});
  const CoherenceReport report = coherence_report(m, shape);
  CHECK(report.rank_collapse);
}

TEST_CASE("coherence_report: separated modes stay well conditioned") {
  Rng rng(59);
  const std::vector<double> sep{1.5 / 63.0};
  const HankelShape shape({63});
  const SpectralModel m = random_model(1, 3, sep, {}, rng);
  const CoherenceReport report = coherence_report(m, shape);
  CHECK(!report.rank_collapse);
  CHECK(report.kappa < 1e4);
  CHECK(report.mu0 <= 2.0);
}

TEST_CASE("spectral model json round trip") {
  Rng rng(60);
  const std::vector<double> sep{0.02, 0.02};
  const std::vector<DampingRange> damping{{8, 16}, {16, 32}};
  const SpectralModel m = random_model(2, 3, sep, damping, rng);
  const SpectralModel back = SpectralModel::from_json(m.to_json());
  CHECK((back.freqs - m.freqs).norm() == 0.0);
  CHECK((back.taus - m.taus).norm() == 0.0);
  CHECK((back.coeffs - m.coeffs).norm() == 0.0);
}
