#ifndef HANKELPGD_FACTOR_HPP
#define HANKELPGD_FACTOR_HPP

#include <functional>

#include "hankelpgd/hankel.hpp"
#include "hankelpgd/types.hpp"

namespace hankelpgd {

/// Low-rank factor pair: the lifted matrix is `u * v^*`.
struct FactorPair {
  CxMatrix u;  // lifted_rows x r
  CxMatrix v;  // lifted_cols x r

  Index rank() const { return u.cols(); }

  /// The factors stacked on top of each other ((rows + cols) x r).
  CxMatrix stacked() const;
  static FactorPair from_stacked(const CxMatrix& s, Index rows);

  double squared_norm() const {
    return u.squaredNorm() + v.squaredNorm();
  }
};

/// Parameters of the row-norm feasible set.
struct ProjectionParams {
  double mu = 1.0;
  double sigma = 1.0;
  double aspect_const = 1.0;
  Index rank = 1;
  Index ambient = 1;

  /// Row l2 bound sqrt(mu * c_s * r * sigma / n).
  double row_bound() const;
};

/// Type-erased linear operator with forward and adjoint matvecs.
/// `apply` maps a cols-vector to a rows-vector.
struct MatVecOperator {
  Index rows = 0;
  Index cols = 0;
  std::function<CxVector(const CxVector&)> apply;
  std::function<CxVector(const CxVector&)> apply_adjoint;
};

/// View of an implicit lifting as a MatVecOperator (non-owning).
MatVecOperator as_operator(const LiftedOperator& lift);

/// View of a dense matrix as a MatVecOperator (non-owning, test use).
MatVecOperator as_operator(const CxMatrix& a);

struct TruncatedSvd {
  CxMatrix u;          // rows x r, orthonormal columns
  RealVector values;   // r, non-increasing
  CxMatrix v;          // cols x r, orthonormal columns
};

/// Best rank-r approximation of an implicit operator by Golub-Kahan-Lanczos
/// bidiagonalization with full reorthogonalization. Deterministic: the start
/// vector comes from a fixed internal seed. Breakdowns restart with a fresh
/// orthogonalized direction; rank-deficient operators yield trailing zero
/// singular values with orthonormal padding. Each left singular vector is
/// normalized so its first significant entry is real positive.
///
/// Throws SvdConvergenceError (carrying the residual) if the residual
/// tolerance is not met within `max_iters` steps (default 30 * rank).
TruncatedSvd truncated_svd(const MatVecOperator& op, Index rank,
                           double tol = 1e-10, Index max_iters = 0);

struct ProcrustesResult {
  CxMatrix q;   // r x r unitary
  double dist;  // ||z - m * q||_F at the optimum
};

/// Optimal unitary alignment of `z` onto the orbit of `m`:
/// minimizes ||z - m q||_F over unitary q, attained at q1 * q2^* from the
/// SVD q1 s q2^* of m^* z. Rank-deficient products are fine; the SVD
/// completes the unitary factors.
ProcrustesResult procrustes(const CxMatrix& z, const CxMatrix& m);
ProcrustesResult procrustes(const FactorPair& z, const FactorPair& m);

/// Projection onto the feasible set: rows with l2 norm above the bound are
/// rescaled onto it, all other rows pass through. Idempotent and
/// non-expansive.
FactorPair project_feasible(const FactorPair& z,
                            const ProjectionParams& params);

}  // namespace hankelpgd

#endif  // HANKELPGD_FACTOR_HPP
