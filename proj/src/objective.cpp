#include "hankelpgd/objective.hpp"

#include <algorithm>

#include "hankelpgd/errors.hpp"

namespace hankelpgd {

ObjectiveContext::ObjectiveContext(HankelShape shape, SampleSet samples,
                                   CxVector observed, double lambda)
    : shape_(std::move(shape)),
      samples_(std::move(samples)),
      observed_(std::move(observed)),
      lambda_(lambda),
      ratio_(samples_.ratio()) {
  if (samples_.ambient_size() != shape_.ambient_size() ||
      observed_.size() != shape_.ambient_size()) {
    throw DimensionError("ObjectiveContext: sample/observation size mismatch");
  }
  if (lambda_ < 0.0) {
    throw ValidationError("ObjectiveContext: lambda must be nonnegative");
  }
}

namespace {

void check_conforming(const ObjectiveContext& ctx, const FactorPair& z) {
  if (z.u.rows() != ctx.shape().lifted_rows() ||
      z.v.rows() != ctx.shape().lifted_cols() || z.u.cols() != z.v.cols()) {
    throw DimensionError("objective: factor dimensions do not conform");
  }
}

double sampled_mismatch(const ObjectiveContext& ctx, const CxVector& skew) {
  const RealVector& mult = ctx.samples().multiplicities();
  const CxVector& obs = ctx.observed();
  double acc = 0.0;
  for (Index a : ctx.samples().support()) {
    acc += mult[a] * std::norm(skew[a] - obs[a]);
  }
  return acc / ctx.sampling_ratio();
}

}  // namespace

double eval_f(const ObjectiveContext& ctx, const FactorPair& z) {
  check_conforming(ctx, z);
  const CxMatrix gram_u = z.u.adjoint() * z.u;
  const CxMatrix gram_v = z.v.adjoint() * z.v;
  const double product_norm2 = (gram_u * gram_v).trace().real();
  const CxVector skew = gstar_factored(ctx.shape(), z.u, z.v);
  // ||(I - P_hankel) A||_F^2 = ||A||_F^2 - ||G* A||_2^2; clamp the rounding
  // residue so the value stays in range.
  const double off_hankel =
      std::max(product_norm2 - skew.squaredNorm(), 0.0);
  return off_hankel + sampled_mismatch(ctx, skew);
}

double eval_g(const FactorPair& z) {
  if (z.u.cols() != z.v.cols()) {
    throw DimensionError("eval_g: factor rank mismatch");
  }
  const CxMatrix gram_u = z.u.adjoint() * z.u;
  const CxMatrix gram_v = z.v.adjoint() * z.v;
  return 0.5 * (gram_u - gram_v).squaredNorm();
}

double eval_objective(const ObjectiveContext& ctx, const FactorPair& z) {
  return eval_f(ctx, z) + ctx.lambda() * eval_g(z);
}

ObjectiveEval eval_objective_with_gradient(const ObjectiveContext& ctx,
                                           const FactorPair& z) {
  check_conforming(ctx, z);
  const double lambda = ctx.lambda();
  const CxMatrix gram_u = z.u.adjoint() * z.u;
  const CxMatrix gram_v = z.v.adjoint() * z.v;
  const double product_norm2 = (gram_u * gram_v).trace().real();
  const CxVector skew = gstar_factored(ctx.shape(), z.u, z.v);

  const double off_hankel =
      std::max(product_norm2 - skew.squaredNorm(), 0.0);
  const double balance = 0.5 * (gram_u - gram_v).squaredNorm();
  const double value =
      off_hankel + sampled_mismatch(ctx, skew) + lambda * balance;

  // w = (1/p) P_Omega(G* A - y) - G* A, then the gradient is the lift of w
  // times the opposite factor plus gram corrections.
  const RealVector& mult = ctx.samples().multiplicities();
  const CxVector& obs = ctx.observed();
  const double inv_ratio = 1.0 / ctx.sampling_ratio();
  CxVector w = -skew;
  for (Index a : ctx.samples().support()) {
    w[a] += inv_ratio * mult[a] * (skew[a] - obs[a]);
  }
  const LiftedOperator lift(ctx.shape(), w);

  ObjectiveEval out;
  out.value = value;
  out.gradient.u =
      lift.multiply(z.v) + z.u * (lambda * gram_u + (1.0 - lambda) * gram_v);
  out.gradient.v = lift.multiply_adjoint(z.u) +
                   z.v * (lambda * gram_v + (1.0 - lambda) * gram_u);
  return out;
}

FactorPair grad_objective(const ObjectiveContext& ctx, const FactorPair& z) {
  return eval_objective_with_gradient(ctx, z).gradient;
}

}  // namespace hankelpgd
