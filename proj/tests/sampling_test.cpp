#include <algorithm>
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "hankelpgd/errors.hpp"
#include "hankelpgd/rng.hpp"
#include "hankelpgd/sampling.hpp"
#include "test_support.hpp"

using namespace hankelpgd;
using testing::random_vector;

TEST_CASE("draw: exhaustive draw without replacement is a permutation") {
  const SampleSet s = SampleSet::draw(10, 10, SampleMode::without_replacement, 3);
  std::vector<Index> sorted = s.indices();
  std::sort(sorted.begin(), sorted.end());
  for (Index i = 0; i < 10; ++i) CHECK(sorted[i] == i);
}

TEST_CASE("draw: sampling ratio is exact") {
  const SampleSet s = SampleSet::draw(127, 63, SampleMode::without_replacement, 3);
  CHECK(s.ratio() == 63.0 / 127.0);
  CHECK(s.count() == 63);
}

TEST_CASE("draw: deterministic for a fixed seed") {
  for (SampleMode mode :
       {SampleMode::with_replacement, SampleMode::without_replacement}) {
    const SampleSet a = SampleSet::draw(50, 20, mode, 99);
    const SampleSet b = SampleSet::draw(50, 20, mode, 99);
    CHECK(a.indices() == b.indices());
  }
}

TEST_CASE("draw: errors") {
  CHECK_THROWS_AS(SampleSet::draw(5, 6, SampleMode::without_replacement, 0),
                  ValidationError);
  CHECK_THROWS_AS(SampleSet::draw(5, 0, SampleMode::with_replacement, 0),
                  ValidationError);
  CHECK_THROWS_AS(SampleSet(4, SampleMode::without_replacement, {1, 1}),
                  ValidationError);
  CHECK_THROWS_AS(SampleSet(4, SampleMode::with_replacement, {4}),
                  ValidationError);
}

TEST_CASE("project: multiplicities accumulate") {
  const SampleSet s(4, SampleMode::with_replacement, {1, 1, 3});
  CxVector z(4);
  z << Complex(1, 2), Complex(3, -1), Complex(0.5, 0), Complex(-2, 4);
  const CxVector out = s.project(z);
  CHECK(out[0] == Complex(0, 0));
  CHECK(out[1] == 2.0 * z[1]);
  CHECK(out[2] == Complex(0, 0));
  CHECK(out[3] == z[3]);
  CHECK_THROWS_AS(s.project(CxVector::Zero(5)), DimensionError);
}

TEST_CASE("project: identity when every index appears once") {
  std::vector<Index> all(16);
  for (Index i = 0; i < 16; ++i) all[i] = i;
  const SampleSet s(16, SampleMode::without_replacement, all);
  Rng rng(5);
  const CxVector z = random_vector(rng, 16);
  CHECK((s.project(z) - z).norm() == 0.0);
}

TEST_CASE("project: inner product matches the multiset sum") {
  Rng rng(17);
  const SampleSet s = SampleSet::draw(32, 48, SampleMode::with_replacement, 7);
  const CxVector z = random_vector(rng, 32);
  const CxVector w = random_vector(rng, 32);
  const Complex lhs = s.project(z).dot(w);  // <P_Omega z, w>
  Complex rhs = 0.0;
  for (Index a : s.indices()) rhs += std::conj(z[a]) * w[a];
  CHECK(std::abs(lhs - rhs) <= 1e-14 * std::abs(rhs));
}

TEST_CASE("project: self-adjoint and square law") {
  Rng rng(18);
  const SampleSet s = SampleSet::draw(24, 40, SampleMode::with_replacement, 9);
  const CxVector z = random_vector(rng, 24);
  const CxVector w = random_vector(rng, 24);
  const Complex lhs = s.project(z).dot(w);
  const Complex rhs = z.dot(s.project(w));
  CHECK(std::abs(lhs - rhs) <= 1e-13 * std::abs(lhs));

  const CxVector twice = s.project(s.project(z));
  for (Index a = 0; a < 24; ++a) {
    const double c = s.multiplicities()[a];
    CHECK(std::abs(twice[a] - c * c * z[a]) <= 1e-13);
  }
}

TEST_CASE("draw: uniform marginals in expectation") {
  const Index n = 32, m = 64, draws = 10000;
  RealVector counts = RealVector::Zero(n);
  for (Index d = 0; d < draws; ++d) {
    const SampleSet s = SampleSet::draw(
        n, m, SampleMode::with_replacement, derive_seed(0x5EED, d));
    counts += s.multiplicities();
  }
  const double ratio = static_cast<double>(m) / n;
  for (Index a = 0; a < n; ++a) {
    const double normalized = counts[a] / (ratio * draws);
    CHECK(normalized >= 0.95);
    CHECK(normalized <= 1.05);
  }
}

TEST_CASE("serialization: csv line and json round trips") {
  const SampleSet s = SampleSet::draw(40, 25, SampleMode::with_replacement, 10);
  const SampleSet c = SampleSet::from_csv_line(40, s.mode(), s.to_csv_line());
  CHECK(c.indices() == s.indices());
  const SampleSet j = SampleSet::from_json(s.to_json());
  CHECK(j.indices() == s.indices());
  CHECK(j.ambient_size() == s.ambient_size());
  CHECK(j.mode() == s.mode());
}
