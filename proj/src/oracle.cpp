#include "hankelpgd/oracle.hpp"

#include <cmath>
#include <vector>

#include <Eigen/SVD>

#include "hankelpgd/errors.hpp"
#include "hankelpgd/rng.hpp"
#include "hankelpgd/sampling.hpp"

namespace hankelpgd::oracle {

namespace {

void guard_size(const HankelShape& shape) {
  if (shape.lifted_rows() * shape.lifted_cols() > kDenseGuard) {
    throw ValidationError("oracle: lifting too large for dense path");
  }
}

}  // namespace

CxMatrix dense_g(const HankelShape& shape, const CxVector& z) {
  guard_size(shape);
  if (z.size() != shape.ambient_size()) {
    throw DimensionError("dense_g: signal length mismatch");
  }
  const std::size_t nd = shape.dims().size();
  CxMatrix out(shape.lifted_rows(), shape.lifted_cols());
  std::vector<Index> ri(nd), ci(nd), ai(nd);
  for (Index i = 0; i < out.rows(); ++i) {
    detail::unflatten(i, shape.pencil(), ri);
    for (Index j = 0; j < out.cols(); ++j) {
      detail::unflatten(j, shape.copencil(), ci);
      for (std::size_t k = 0; k < nd; ++k) ai[k] = ri[k] + ci[k];
      const Index a = detail::flatten(ai, shape.dims());
      out(i, j) = z[a] / shape.sqrt_weights()[a];
    }
  }
  return out;
}

CxVector dense_gstar(const HankelShape& shape, const CxMatrix& a) {
  guard_size(shape);
  if (a.rows() != shape.lifted_rows() || a.cols() != shape.lifted_cols()) {
    throw DimensionError("dense_gstar: lifted shape mismatch");
  }
  const std::size_t nd = shape.dims().size();
  CxVector out = CxVector::Zero(shape.ambient_size());
  std::vector<Index> ri(nd), ci(nd), ai(nd);
  for (Index i = 0; i < a.rows(); ++i) {
    detail::unflatten(i, shape.pencil(), ri);
    for (Index j = 0; j < a.cols(); ++j) {
      detail::unflatten(j, shape.copencil(), ci);
      for (std::size_t k = 0; k < nd; ++k) ai[k] = ri[k] + ci[k];
      out[detail::flatten(ai, shape.dims())] += a(i, j);
    }
  }
  for (Index idx = 0; idx < out.size(); ++idx) {
    out[idx] /= shape.sqrt_weights()[idx];
  }
  return out;
}

DenseSvd dense_svd(const CxMatrix& a) {
  if (a.rows() * a.cols() > kDenseGuard) {
    throw ValidationError("dense_svd: matrix too large");
  }
  Eigen::JacobiSVD<CxMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return DenseSvd{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

double naive_objective(const ObjectiveContext& ctx, const FactorPair& z) {
  const HankelShape& shape = ctx.shape();
  guard_size(shape);
  const CxMatrix product = z.u * z.v.adjoint();
  const CxVector skew = dense_gstar(shape, product);
  const CxMatrix off_hankel = product - dense_g(shape, skew);
  const CxVector diff = skew - ctx.observed();
  const CxVector projected = ctx.samples().project(diff);
  double data_term = 0.0;
  for (Index a = 0; a < diff.size(); ++a) {
    data_term += (std::conj(projected[a]) * diff[a]).real();
  }
  const CxMatrix gram_u = z.u.adjoint() * z.u;
  const CxMatrix gram_v = z.v.adjoint() * z.v;
  return off_hankel.squaredNorm() + data_term / ctx.sampling_ratio() +
         ctx.lambda() * 0.5 * (gram_u - gram_v).squaredNorm();
}

FactorPair fd_gradient(const ObjectiveContext& ctx, const FactorPair& z,
                       double h) {
  FactorPair grad;
  grad.u = CxMatrix::Zero(z.u.rows(), z.u.cols());
  grad.v = CxMatrix::Zero(z.v.rows(), z.v.cols());
  FactorPair probe = z;
  auto central = [&](CxMatrix& mat, Index i, Index j, Complex dir) {
    const Complex keep = mat(i, j);
    mat(i, j) = keep + h * dir;
    const double plus = eval_objective(ctx, probe);
    mat(i, j) = keep - h * dir;
    const double minus = eval_objective(ctx, probe);
    mat(i, j) = keep;
    return (plus - minus) / (2.0 * h);
  };
  for (Index j = 0; j < z.u.cols(); ++j) {
    for (Index i = 0; i < z.u.rows(); ++i) {
      const double dre = central(probe.u, i, j, Complex(1.0, 0.0));
      const double dim = central(probe.u, i, j, Complex(0.0, 1.0));
      grad.u(i, j) = 0.5 * Complex(dre, dim);
    }
    for (Index i = 0; i < z.v.rows(); ++i) {
      const double dre = central(probe.v, i, j, Complex(1.0, 0.0));
      const double dim = central(probe.v, i, j, Complex(0.0, 1.0));
      grad.v(i, j) = 0.5 * Complex(dre, dim);
    }
  }
  return grad;
}

FactorPair dense_gradient(const ObjectiveContext& ctx, const FactorPair& z) {
  const HankelShape& shape = ctx.shape();
  guard_size(shape);
  const double lambda = ctx.lambda();
  const CxMatrix product = z.u * z.v.adjoint();
  const CxVector skew = dense_gstar(shape, product);
  const CxMatrix off_hankel = product - dense_g(shape, skew);
  const CxVector resampled =
      ctx.samples().project(skew - ctx.observed()) / ctx.sampling_ratio();
  const CxMatrix lifted_residual = dense_g(shape, resampled);
  const CxMatrix gram_u = z.u.adjoint() * z.u;
  const CxMatrix gram_v = z.v.adjoint() * z.v;
  FactorPair grad;
  grad.u = off_hankel * z.v + lifted_residual * z.v +
           lambda * z.u * (gram_u - gram_v);
  grad.v = off_hankel.adjoint() * z.u + lifted_residual.adjoint() * z.u +
           lambda * z.v * (gram_v - gram_u);
  return grad;
}

SamplingBoundResult sampling_bound_check(Index n, Index m, Index trials,
                                         std::uint64_t seed) {
  if (n < 2 || m < 1 || trials < 1) {
    throw ValidationError("sampling_bound_check: bad arguments");
  }
  const double min_count = std::ceil(8.0 / 3.0 * std::log(n));
  if (static_cast<double>(m) < min_count) {
    throw ValidationError(
        "sampling_bound_check: too few samples for the bound to hold");
  }
  const HankelShape shape({n});
  const Index rows = shape.pencil()[0];
  const Index cols = shape.copencil()[0];
  const double ratio = static_cast<double>(m) / static_cast<double>(n);
  const double spread = std::sqrt(24.0 * n * std::log(n) / ratio);
  SamplingBoundResult result;
  result.trials = trials;
  for (Index t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    RealVector zv(rows), wv(cols);
    for (Index i = 0; i < rows; ++i) zv[i] = rng.normal();
    for (Index j = 0; j < cols; ++j) wv[j] = rng.normal();
    // skew-diagonal sums of the rank-1 outer product
    RealVector conv = RealVector::Zero(n);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) conv[i + j] += zv[i] * wv[j];
    }
    const SampleSet samples = SampleSet::draw(
        n, m, SampleMode::with_replacement,
        derive_seed(seed, static_cast<std::uint64_t>(t), 1));
    double lhs = 0.0;
    for (Index a : samples.indices()) lhs += conv[a];
    lhs /= ratio;
    const double rhs =
        zv.lpNorm<1>() * wv.lpNorm<1>() + spread * zv.norm() * wv.norm();
    if (lhs > rhs) ++result.violations;
  }
  result.violation_rate =
      static_cast<double>(result.violations) / static_cast<double>(trials);
  return result;
}

}  // namespace hankelpgd::oracle
