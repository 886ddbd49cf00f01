#ifndef HANKELPGD_ORACLE_HPP
#define HANKELPGD_ORACLE_HPP

#include <cstdint>

#include "hankelpgd/factor.hpp"
#include "hankelpgd/hankel.hpp"
#include "hankelpgd/objective.hpp"
#include "hankelpgd/types.hpp"

namespace hankelpgd::oracle {

/// Slow, dense, obviously-correct counterparts of the fast paths. Test and
/// selftest use only; every function is size-guarded and single-threaded.

inline constexpr Index kDenseGuard = Index(1) << 22;

/// Dense weighted lifting: entry (i, j) = z[i (+) j] / sqrt(w[i (+) j])
/// with multi-index addition, by direct placement.
CxMatrix dense_g(const HankelShape& shape, const CxVector& z);

/// Adjoint by direct skew-diagonal summation.
CxVector dense_gstar(const HankelShape& shape, const CxMatrix& a);

struct DenseSvd {
  CxMatrix u;
  RealVector values;
  CxMatrix v;
};

/// Full dense SVD (cubic cost).
DenseSvd dense_svd(const CxMatrix& a);

/// Objective evaluated through the materialized lifting.
double naive_objective(const ObjectiveContext& ctx, const FactorPair& z);

/// Central finite differences of the fast objective over every real and
/// imaginary coordinate, combined per the Wirtinger convention
/// grad = (dF/dRe + i dF/dIm) / 2.
FactorPair fd_gradient(const ObjectiveContext& ctx, const FactorPair& z,
                       double h);

/// The four displayed gradient blocks computed with dense operators.
FactorPair dense_gradient(const ObjectiveContext& ctx, const FactorPair& z);

struct SamplingBoundResult {
  Index trials = 0;
  Index violations = 0;
  double violation_rate = 0.0;
};

/// Monte Carlo check of the skew-diagonal sampling bound: for random real
/// vectors and with-replacement draws, verifies
///   p^{-1} sum_k sum_{i+j=a_k} z_i w_j
///     <= ||z||_1 ||w||_1 + sqrt(24 n log n / p) ||z||_2 ||w||_2.
SamplingBoundResult sampling_bound_check(Index n, Index m, Index trials,
                                         std::uint64_t seed);

}  // namespace hankelpgd::oracle

#endif  // HANKELPGD_ORACLE_HPP
