#include "hankelpgd/signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "hankelpgd/errors.hpp"
#include "hankelpgd/oracle.hpp"

namespace hankelpgd {

void SpectralModel::validate() const {
  const Index r = coeffs.size();
  if (r < 1) throw ValidationError("SpectralModel: order must be >= 1");
  if (ndim < 1 || ndim > 3) {
    throw ValidationError("SpectralModel: dimension must be 1, 2 or 3");
  }
  if (freqs.rows() != r || freqs.cols() != ndim || taus.rows() != r ||
      taus.cols() != ndim) {
    throw DimensionError("SpectralModel: parameter table shapes mismatch");
  }
  for (Index k = 0; k < r; ++k) {
    for (Index i = 0; i < ndim; ++i) {
      if (freqs(k, i) < 0.0 || freqs(k, i) >= 1.0) {
        throw ValidationError("SpectralModel: frequency outside [0, 1)");
      }
      if (taus(k, i) < 0.0) {
        throw ValidationError("SpectralModel: negative damping");
      }
    }
  }
}

CxVector synthesize(const SpectralModel& model, std::span<const Index> dims) {
  model.validate();
  if (static_cast<Index>(dims.size()) != model.ndim) {
    throw DimensionError("synthesize: dims rank mismatch");
  }
  const Index r = model.order();
  // Per-axis mode tables keep this O(n r d) with one exp per table entry.
  std::vector<CxMatrix> modes(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    modes[i].resize(dims[i], r);
    for (Index k = 0; k < r; ++k) {
      const Complex rate(-model.taus(k, static_cast<Index>(i)),
                         2.0 * M_PI * model.freqs(k, static_cast<Index>(i)));
      for (Index a = 0; a < dims[i]; ++a) {
        modes[i](a, k) = std::exp(rate * static_cast<double>(a));
      }
    }
  }
  Index total = 1;
  for (Index d : dims) total *= d;
  CxVector out(total);
  std::vector<Index> idx(dims.size());
  for (Index flat = 0; flat < total; ++flat) {
    detail::unflatten(flat, dims, idx);
    Complex acc = 0.0;
    for (Index k = 0; k < r; ++k) {
      Complex term = model.coeffs[k];
      for (std::size_t i = 0; i < dims.size(); ++i) term *= modes[i](idx[i], k);
      acc += term;
    }
    out[flat] = acc;
  }
  return out;
}

double wraparound_dist(double f, double g) {
  const double d = std::abs(f - g);
  return std::min(d, 1.0 - d);
}

namespace {

// Uniform draw conditioned on all pairwise wrap-around distances >= delta,
// sampled directly: the circular gaps of conditioned i.i.d. uniforms are the
// minimum gap plus a simplex-distributed share of the slack. Rejection
// sampling is equivalent in law but its acceptance probability
// (1 - r delta)^(r-1) collapses for large r, which the model-order sweeps
// reach routinely.
RealVector separated_frequencies(Index order, double separation, Rng& rng) {
  RealVector f(order);
  if (separation <= 0.0) {
    for (Index k = 0; k < order; ++k) f[k] = rng.uniform();
    return f;
  }
  const double slack = 1.0 - static_cast<double>(order) * separation;
  if (slack <= 0.0) {
    throw SeparationError("random_model: r * separation must be < 1");
  }
  if (order == 1) {
    f[0] = rng.uniform();
    return f;
  }
  RealVector gaps(order);
  double total = 0.0;
  for (Index k = 0; k < order; ++k) {
    gaps[k] = -std::log1p(-rng.uniform());
    total += gaps[k];
  }
  for (Index k = 0; k < order; ++k) {
    gaps[k] = separation + (total > 0.0 ? slack * gaps[k] / total
                                        : slack / static_cast<double>(order));
  }
  // uniform rotation, then a random labeling of the ordered positions
  std::vector<Index> label(order);
  std::iota(label.begin(), label.end(), Index(0));
  for (Index k = 0; k < order - 1; ++k) {
    const Index j = k + static_cast<Index>(rng.uniform_index(order - k));
    std::swap(label[k], label[j]);
  }
  double pos = rng.uniform();
  for (Index k = 0; k < order; ++k) {
    double value = pos - std::floor(pos);
    if (value >= 1.0) value = 0.0;
    f[label[k]] = value;
    pos += gaps[k];
  }
  return f;
}

}  // namespace

SpectralModel random_model(Index ndim, Index order,
                           std::span<const double> separation,
                           std::span<const DampingRange> damping, Rng& rng) {
  if (ndim < 1 || ndim > 3) {
    throw ValidationError("random_model: dimension must be 1, 2 or 3");
  }
  if (order < 1) throw ValidationError("random_model: order must be >= 1");
  if (!separation.empty() && static_cast<Index>(separation.size()) != ndim) {
    throw ValidationError("random_model: separation rank mismatch");
  }
  if (!damping.empty() && static_cast<Index>(damping.size()) != ndim) {
    throw ValidationError("random_model: damping rank mismatch");
  }
  SpectralModel model;
  model.ndim = ndim;
  model.freqs.resize(order, ndim);
  model.taus = RealMatrix::Zero(order, ndim);
  model.coeffs.resize(order);
  for (Index i = 0; i < ndim; ++i) {
    const double sep = separation.empty() ? 0.0 : separation[i];
    model.freqs.col(i) = separated_frequencies(order, sep, rng);
  }
  for (Index k = 0; k < order; ++k) {
    const double amplitude = 1.0 + std::pow(10.0, 0.5 * rng.uniform());
    const double phase = rng.uniform(0.0, 2.0 * M_PI);
    model.coeffs[k] = std::polar(amplitude, phase);
  }
  for (Index i = 0; i < ndim; ++i) {
    if (damping.empty()) continue;
    const DampingRange& range = damping[i];
    if (range.inv_hi <= 0.0) continue;
    if (range.inv_lo <= 0.0 || range.inv_hi < range.inv_lo) {
      throw ValidationError("random_model: invalid damping range");
    }
    for (Index k = 0; k < order; ++k) {
      model.taus(k, i) = 1.0 / rng.uniform(range.inv_lo, range.inv_hi);
    }
  }
  return model;
}

CxVector add_noise(const CxVector& observed, const SampleSet& samples,
                   double theta, Rng& rng) {
  if (observed.size() != samples.ambient_size()) {
    throw DimensionError("add_noise: length mismatch");
  }
  if (theta < 0.0) throw ValidationError("add_noise: theta must be >= 0");
  if (theta == 0.0) return observed;
  const double energy = samples.project(observed).norm();
  CxVector noise = CxVector::Zero(observed.size());
  for (Index a : samples.support()) noise[a] = rng.complex_gaussian();
  const double wnorm = noise.norm();
  if (wnorm == 0.0) return observed;
  return observed + (theta * energy / wnorm) * noise;
}

double rmse(const CxVector& recovered, const CxVector& reference) {
  if (recovered.size() != reference.size()) {
    throw DimensionError("rmse: length mismatch");
  }
  const double ref = reference.norm();
  if (ref == 0.0) throw MetricError("rmse: zero reference signal");
  return (recovered - reference).norm() / ref;
}

bool recovery_success(const CxVector& recovered, const CxVector& reference,
                      double threshold) {
  return rmse(recovered, reference) <= threshold;
}

CoherenceReport coherence_report(const SpectralModel& model,
                                 const HankelShape& shape) {
  const CxVector x = synthesize(model, shape.dims());
  const CxVector y = d_scale(shape, x, ScaleDir::forward);
  const CxMatrix lift = oracle::dense_g(shape, y);
  Eigen::JacobiSVD<CxMatrix> svd(lift,
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Index r = std::min<Index>(model.order(), svd.singularValues().size());
  CoherenceReport report;
  report.sigma1 = svd.singularValues()[0];
  report.sigma_r = svd.singularValues()[r - 1];
  report.rank_collapse = report.sigma_r <= 1e-10 * report.sigma1;
  report.kappa = report.rank_collapse
                     ? std::numeric_limits<double>::infinity()
                     : report.sigma1 / report.sigma_r;
  double max_row = 0.0;
  for (Index i = 0; i < svd.matrixU().rows(); ++i) {
    max_row = std::max(max_row, svd.matrixU().row(i).head(r).squaredNorm());
  }
  for (Index i = 0; i < svd.matrixV().rows(); ++i) {
    max_row = std::max(max_row, svd.matrixV().row(i).head(r).squaredNorm());
  }
  report.mu0 = max_row * static_cast<double>(shape.ambient_size()) /
               (shape.aspect_const() * static_cast<double>(r));
  return report;
}

nlohmann::json SpectralModel::to_json() const {
  nlohmann::json j;
  j["d"] = ndim;
  j["freqs"] = nlohmann::json::array();
  j["taus"] = nlohmann::json::array();
  j["coeffs"] = nlohmann::json::array();
  for (Index k = 0; k < order(); ++k) {
    std::vector<double> f(ndim), t(ndim);
    for (Index i = 0; i < ndim; ++i) {
      f[i] = freqs(k, i);
      t[i] = taus(k, i);
    }
    j["freqs"].push_back(f);
    j["taus"].push_back(t);
    j["coeffs"].push_back({coeffs[k].real(), coeffs[k].imag()});
  }
  return j;
}

SpectralModel SpectralModel::from_json(const nlohmann::json& j) {
  SpectralModel model;
  model.ndim = j.at("d").get<Index>();
  const auto& jf = j.at("freqs");
  const Index r = static_cast<Index>(jf.size());
  model.freqs.resize(r, model.ndim);
  model.taus.resize(r, model.ndim);
  model.coeffs.resize(r);
  for (Index k = 0; k < r; ++k) {
    for (Index i = 0; i < model.ndim; ++i) {
      model.freqs(k, i) = jf[k][i].get<double>();
      model.taus(k, i) = j.at("taus")[k][i].get<double>();
    }
    model.coeffs[k] = Complex(j.at("coeffs")[k][0].get<double>(),
                              j.at("coeffs")[k][1].get<double>());
  }
  model.validate();
  return model;
}

}  // namespace hankelpgd
