#include "hankelpgd/factor.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "hankelpgd/errors.hpp"
#include "hankelpgd/rng.hpp"

namespace hankelpgd {

CxMatrix FactorPair::stacked() const {
  CxMatrix s(u.rows() + v.rows(), u.cols());
  s.topRows(u.rows()) = u;
  s.bottomRows(v.rows()) = v;
  return s;
}

FactorPair FactorPair::from_stacked(const CxMatrix& s, Index rows) {
  return FactorPair{s.topRows(rows), s.bottomRows(s.rows() - rows)};
}

double ProjectionParams::row_bound() const {
  if (mu <= 0.0 || sigma <= 0.0 || aspect_const <= 0.0 || rank < 1 ||
      ambient < 1) {
    throw ValidationError("ProjectionParams: all fields must be positive");
  }
  return std::sqrt(mu * aspect_const * static_cast<double>(rank) * sigma /
                   static_cast<double>(ambient));
}

MatVecOperator as_operator(const LiftedOperator& lift) {
  MatVecOperator op;
  op.rows = lift.rows();
  op.cols = lift.cols();
  const LiftedOperator* p = &lift;
  op.apply = [p](const CxVector& x) { return p->apply(x); };
  op.apply_adjoint = [p](const CxVector& x) { return p->apply_adjoint(x); };
  return op;
}

MatVecOperator as_operator(const CxMatrix& a) {
  MatVecOperator op;
  op.rows = a.rows();
  op.cols = a.cols();
  const CxMatrix* p = &a;
  op.apply = [p](const CxVector& x) { return CxVector(*p * x); };
  op.apply_adjoint = [p](const CxVector& x) {
    return CxVector(p->adjoint() * x);
  };
  return op;
}

namespace {

// Two classical Gram-Schmidt passes against the first k basis columns.
void reorthogonalize(const CxMatrix& basis, Index k, CxVector& v) {
  if (k == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    CxVector coeffs = basis.leftCols(k).adjoint() * v;
    v.noalias() -= basis.leftCols(k) * coeffs;
  }
}

// Random unit vector orthogonal to the first k basis columns.
bool fresh_direction(Rng& rng, const CxMatrix& basis, Index k, CxVector& v) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    for (Index i = 0; i < v.size(); ++i) v[i] = rng.complex_gaussian();
    reorthogonalize(basis, k, v);
    const double nrm = v.norm();
    if (nrm > 1e-6) {
      v /= nrm;
      return true;
    }
  }
  return false;
}

}  // namespace

TruncatedSvd truncated_svd(const MatVecOperator& op, Index rank, double tol,
                           Index max_iters) {
  const Index nr = op.rows;
  const Index nc = op.cols;
  if (rank < 1 || rank > std::min(nr, nc)) {
    throw ValidationError("truncated_svd: rank out of range");
  }
  const Index cap =
      std::min(std::min(nr, nc),
               max_iters > 0 ? std::max(max_iters, rank)
                             : std::max<Index>(30 * rank, rank + 8));

  CxMatrix left(nr, cap), right(nc, cap);
  CxMatrix prod_right(nr, cap);  // raw op * q_j
  CxMatrix prod_left(nc, cap);   // raw op^* * p_j
  // Cross products p_i^* (op q_j); bidiagonal for exact Golub-Kahan
  // recursions, and still the correct Rayleigh-Ritz input across breakdown
  // restarts.
  CxMatrix core = CxMatrix::Zero(cap, cap);
  Rng rng(derive_seed(0x5D2E0F37C4B1A968ull, static_cast<std::uint64_t>(nr),
                      static_cast<std::uint64_t>(nc),
                      static_cast<std::uint64_t>(rank)));

  CxVector q(nc), p(nr);
  fresh_direction(rng, right, 0, q);

  Index k = 0;
  double residual = 0.0;
  Eigen::JacobiSVD<CxMatrix> small_svd;

  while (k < cap) {
    right.col(k) = q;
    prod_right.col(k) = op.apply(q);
    p = prod_right.col(k);
    reorthogonalize(left, k, p);
    const double diag = p.norm();
    if (diag > 1e-14) {
      left.col(k) = p / diag;
    } else if (fresh_direction(rng, left, k, p)) {
      left.col(k) = p;
    } else {
      break;  // row space exhausted
    }
    prod_left.col(k) = op.apply_adjoint(left.col(k));
    core.col(k).head(k + 1) =
        left.leftCols(k + 1).adjoint() * prod_right.col(k);
    core.row(k).head(k) =
        (left.col(k).adjoint() * prod_right.leftCols(k)).eval();
    q = prod_left.col(k);
    reorthogonalize(right, k + 1, q);
    const double off = q.norm();
    ++k;
    bool space_done = false;
    if (off > 1e-14) {
      q /= off;
    } else if (!fresh_direction(rng, right, k, q)) {
      space_done = true;  // column space exhausted; subspace is final
    }

    if (k >= rank) {
      small_svd.compute(core.topLeftCorner(k, k),
                        Eigen::ComputeFullU | Eigen::ComputeFullV);
      const RealVector& sv = small_svd.singularValues();
      residual = 0.0;
      for (Index i = 0; i < rank; ++i) {
        const CxVector ritz_left =
            left.leftCols(k) * small_svd.matrixU().col(i);
        const CxVector ritz_right =
            right.leftCols(k) * small_svd.matrixV().col(i);
        const double r_fwd =
            (prod_right.leftCols(k) * small_svd.matrixV().col(i) -
             sv[i] * ritz_left)
                .norm();
        const double r_adj =
            (prod_left.leftCols(k) * small_svd.matrixU().col(i) -
             sv[i] * ritz_right)
                .norm();
        residual = std::max({residual, r_fwd, r_adj});
      }
      const bool converged = residual <= tol * std::max(sv[0], 1e-30);
      const bool exact_subspace = space_done || k == std::min(nr, nc);
      if (converged || exact_subspace) {
        TruncatedSvd out;
        out.u = left.leftCols(k) * small_svd.matrixU().leftCols(rank);
        out.values = sv.head(rank);
        out.v = right.leftCols(k) * small_svd.matrixV().leftCols(rank);
        // Unit-phase convention: first significant entry of each left
        // vector real positive (test reproducibility only).
        for (Index i = 0; i < rank; ++i) {
          for (Index j = 0; j < out.u.rows(); ++j) {
            const Complex c = out.u(j, i);
            if (std::abs(c) > 1e-12) {
              const Complex phase = std::conj(c) / std::abs(c);
              out.u.col(i) *= phase;
              out.v.col(i) *= phase;
              break;
            }
          }
        }
        return out;
      }
    }
    if (space_done) break;
  }

  throw SvdConvergenceError(
      "truncated_svd: no convergence after " + std::to_string(k) +
          " iterations, residual " + std::to_string(residual),
      residual);
}

ProcrustesResult procrustes(const CxMatrix& z, const CxMatrix& m) {
  if (z.rows() != m.rows() || z.cols() != m.cols()) {
    throw DimensionError("procrustes: shapes do not match");
  }
  Eigen::JacobiSVD<CxMatrix> svd(m.adjoint() * z,
                                 Eigen::ComputeFullU | Eigen::ComputeFullV);
  CxMatrix q = svd.matrixU() * svd.matrixV().adjoint();
  const double dist = (z - m * q).norm();
  return ProcrustesResult{std::move(q), dist};
}

ProcrustesResult procrustes(const FactorPair& z, const FactorPair& m) {
  return procrustes(z.stacked(), m.stacked());
}

FactorPair project_feasible(const FactorPair& z,
                            const ProjectionParams& params) {
  const double bound = params.row_bound();
  FactorPair out = z;
  auto trim = [bound](CxMatrix& mat) {
    for (Index i = 0; i < mat.rows(); ++i) {
      const double nrm = mat.row(i).norm();
      if (nrm > bound) mat.row(i) *= bound / nrm;
    }
  };
  trim(out.u);
  trim(out.v);
  return out;
}

}  // namespace hankelpgd
