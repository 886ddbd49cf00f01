#ifndef HANKELPGD_OBJECTIVE_HPP
#define HANKELPGD_OBJECTIVE_HPP

#include "hankelpgd/factor.hpp"
#include "hankelpgd/hankel.hpp"
#include "hankelpgd/sampling.hpp"
#include "hankelpgd/types.hpp"

namespace hankelpgd {

/// Everything fixed during one solve: lifting geometry, sample multiset,
/// observed weighted signal, and the regularization weight. `observed` keeps
/// plain signal values (entry a holds the weighted sample w_a^(1/2) x_a for
/// a on the support, zero elsewhere); multiplicities come from the samples.
/// Immutable; concurrent evaluations on a shared context are fine.
class ObjectiveContext {
 public:
  ObjectiveContext(HankelShape shape, SampleSet samples, CxVector observed,
                   double lambda);

  const HankelShape& shape() const { return shape_; }
  const SampleSet& samples() const { return samples_; }
  const CxVector& observed() const { return observed_; }
  double lambda() const { return lambda_; }
  double sampling_ratio() const { return ratio_; }

 private:
  HankelShape shape_;
  SampleSet samples_;
  CxVector observed_;
  double lambda_;
  double ratio_;
};

/// Data-fit part: distance of the factored matrix from the Hankel subspace
/// plus the (1/p)-weighted mismatch on the sampled entries. Both pieces are
/// evaluated from r x r grams and one factored skew-sum; the lifted product
/// is never formed.
double eval_f(const ObjectiveContext& ctx, const FactorPair& z);

/// Balance penalty: half the squared Frobenius mismatch of the two grams.
double eval_g(const FactorPair& z);

/// Full objective: eval_f + lambda * eval_g.
double eval_objective(const ObjectiveContext& ctx, const FactorPair& z);

/// Wirtinger gradient in the fused fast form: one factored skew-sum, one
/// sampled reweighting, two lifted products and r x r gram corrections,
/// O(r^2 n + r n log n) total.
FactorPair grad_objective(const ObjectiveContext& ctx, const FactorPair& z);

struct ObjectiveEval {
  double value = 0.0;
  FactorPair gradient;
};

/// Objective and gradient at one point, sharing the skew-sum work.
ObjectiveEval eval_objective_with_gradient(const ObjectiveContext& ctx,
                                           const FactorPair& z);

}  // namespace hankelpgd

#endif  // HANKELPGD_OBJECTIVE_HPP
