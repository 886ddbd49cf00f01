#ifndef HANKELPGD_SIGNAL_HPP
#define HANKELPGD_SIGNAL_HPP

#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hankelpgd/hankel.hpp"
#include "hankelpgd/rng.hpp"
#include "hankelpgd/sampling.hpp"
#include "hankelpgd/types.hpp"

namespace hankelpgd {

/// Ground truth generator: a superposition of r complex sinusoids with
/// per-axis frequencies in [0,1) and nonnegative damping rates.
struct SpectralModel {
  Index ndim = 1;
  RealMatrix freqs;   // r x d, entries in [0, 1)
  RealMatrix taus;    // r x d, nonnegative damping rates
  CxVector coeffs;    // r complex amplitudes

  Index order() const { return coeffs.size(); }
  void validate() const;

  nlohmann::json to_json() const;
  static SpectralModel from_json(const nlohmann::json& j);
};

/// Samples of the model on the integer grid of the given extents, flattened
/// row-major: x[a] = sum_k d_k prod_i exp((2 pi i f_ki - tau_ki) a_i).
CxVector synthesize(const SpectralModel& model, std::span<const Index> dims);

/// Uniform range for the damping timescale 1/tau along one axis.
struct DampingRange {
  double inv_lo = 0.0;
  double inv_hi = 0.0;
};

/// Random model following the experiment protocol: frequencies uniform on
/// [0,1) (rejection-resampled per axis until all pairwise wrap-around
/// distances reach `separation[axis]` when given), amplitudes
/// (1 + 10^(c/2)) e^(i phi) with c uniform on [0,1] and phi uniform on
/// [0, 2 pi), and 1/tau uniform in the per-axis range (tau = 0 where absent).
SpectralModel random_model(Index ndim, Index order,
                           std::span<const double> separation,
                           std::span<const DampingRange> damping, Rng& rng);

/// Circular distance of two frequencies on the unit torus, in [0, 1/2].
double wraparound_dist(double f, double g);

/// Adds noise of exact relative energy `theta` on the sampled support:
/// e = theta * ||P_Omega(x)||_2 * w / ||w||_2 with w i.i.d. standard complex
/// Gaussian on the support.
CxVector add_noise(const CxVector& observed, const SampleSet& samples,
                   double theta, Rng& rng);

/// Relative l2 reconstruction error. Throws MetricError for a zero reference.
double rmse(const CxVector& recovered, const CxVector& reference);

/// Success rule: rmse <= threshold (boundary inclusive).
bool recovery_success(const CxVector& recovered, const CxVector& reference,
                      double threshold = 1e-3);

struct CoherenceReport {
  double mu0 = 0.0;     // incoherence of the lifted ground truth
  double sigma1 = 0.0;  // extreme singular values of the lifting
  double sigma_r = 0.0;
  double kappa = 0.0;   // sigma1 / sigma_r
  bool rank_collapse = false;
};

/// Diagnostic-scale report: builds the dense lifting of the model, takes its
/// SVD and measures incoherence and conditioning at the model order.
CoherenceReport coherence_report(const SpectralModel& model,
                                 const HankelShape& shape);

}  // namespace hankelpgd

#endif  // HANKELPGD_SIGNAL_HPP
