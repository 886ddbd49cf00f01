#include "hankelpgd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "hankelpgd/errors.hpp"

namespace hankelpgd {

namespace {

constexpr double kGradientFloor = 1e-14;
constexpr double kResidualFloor = 1e-12;

/// Weighted observed vector: entry a holds sqrt(w_a) x_a on the support.
CxVector observed_weighted(const HankelShape& shape, const SampleSet& samples,
                           const CxVector& x_obs) {
  if (x_obs.size() != shape.ambient_size() ||
      samples.ambient_size() != shape.ambient_size()) {
    throw DimensionError("solver: observation length mismatch");
  }
  CxVector y = CxVector::Zero(shape.ambient_size());
  for (Index a : samples.support()) {
    y[a] = shape.sqrt_weights()[a] * x_obs[a];
  }
  return y;
}

CxVector reconstruct(const HankelShape& shape, const FactorPair& z) {
  return d_scale(shape, gstar_factored(shape, z.u, z.v), ScaleDir::inverse);
}

double stacked_max_row_norm(const FactorPair& z) {
  double best = 0.0;
  for (Index i = 0; i < z.u.rows(); ++i) {
    best = std::max(best, z.u.row(i).norm());
  }
  for (Index i = 0; i < z.v.rows(); ++i) {
    best = std::max(best, z.v.row(i).norm());
  }
  return best;
}

}  // namespace

Initialization initialize(const HankelShape& shape, const SampleSet& samples,
                          const CxVector& x_obs, const PGDConfig& config) {
  if (config.eps0 <= 0.0 || config.eps0 >= 1.0) {
    throw ValidationError("initialize: eps0 must lie in (0, 1)");
  }
  if (config.rank < 1 ||
      config.rank > std::min(shape.lifted_rows(), shape.lifted_cols())) {
    throw ValidationError("initialize: rank out of range for this lifting");
  }
  const CxVector y = observed_weighted(shape, samples, x_obs);
  CxVector seed = samples.project(y) / samples.ratio();
  if (seed.norm() == 0.0) {
    throw DegenerateInputError("initialize: all observed entries are zero");
  }
  const LiftedOperator lift(shape, seed);
  const TruncatedSvd svd = truncated_svd(as_operator(lift), config.rank);
  const double sigma1 = svd.values[0];
  if (!(sigma1 > 0.0)) {
    throw DegenerateInputError("initialize: thresholded seed has zero energy");
  }
  const RealVector scale = svd.values.cwiseMax(0.0).cwiseSqrt();
  FactorPair z0;
  z0.u = svd.u * scale.asDiagonal();
  z0.v = svd.v * scale.asDiagonal();

  ProjectionParams params;
  params.sigma = sigma1 / (1.0 - config.eps0);
  params.aspect_const = shape.aspect_const();
  params.rank = config.rank;
  params.ambient = shape.ambient_size();
  if (config.mu) {
    params.mu = *config.mu;
  } else {
    // Auto policy: the bound sits just above the seed's largest row, so the
    // initial point is barely trimmed.
    const double target = config.mu_slack * stacked_max_row_norm(z0);
    params.mu = target * target * static_cast<double>(params.ambient) /
                (params.aspect_const * static_cast<double>(params.rank) *
                 params.sigma);
  }
  if (params.mu <= 0.0) {
    throw ValidationError("initialize: nonpositive incoherence estimate");
  }
  return Initialization{project_feasible(z0, params), params, sigma1};
}

std::pair<FactorPair, StepRecord> pgd_step(const ObjectiveContext& ctx,
                                           const FactorPair& z,
                                           const ProjectionParams& params,
                                           const LineSearchPolicy& policy,
                                           double step_start) {
  const ObjectiveEval base = eval_objective_with_gradient(ctx, z);
  const double grad_sq = base.gradient.squared_norm();
  StepRecord record;
  record.objective_before = base.value;
  record.objective_after = base.value;
  if (std::sqrt(grad_sq) <= kGradientFloor * (1.0 + base.value)) {
    record.at_stationary = true;
    return {z, record};
  }
  double eta = step_start;
  for (int trial = 1; trial <= policy.max_trials; ++trial) {
    record.trials = trial;
    record.step_size = eta;
    FactorPair cand;
    cand.u = z.u - eta * base.gradient.u;
    cand.v = z.v - eta * base.gradient.v;
    cand = project_feasible(cand, params);
    const double value = eval_objective(ctx, cand);
    // strict inequality: an accepted step always decreases the objective,
    // even when the sufficient-decrease margin underflows at the floor
    if (value < base.value - policy.sufficient_decrease * eta * grad_sq) {
      record.objective_after = value;
      return {std::move(cand), record};
    }
    eta *= policy.shrink;
  }
  record.stalled = true;
  record.step_size = eta;  // where the next attempt should resume
  return {z, record};
}

FactorPair balanced_truth_factors(const HankelShape& shape,
                                  const CxVector& x_true, Index rank) {
  const CxVector y = d_scale(shape, x_true, ScaleDir::forward);
  const LiftedOperator lift(shape, y);
  const TruncatedSvd svd = truncated_svd(as_operator(lift), rank);
  const RealVector scale = svd.values.cwiseMax(0.0).cwiseSqrt();
  FactorPair m;
  m.u = svd.u * scale.asDiagonal();
  m.v = svd.v * scale.asDiagonal();
  return m;
}

double observed_residual(const SampleSet& samples, const CxVector& x_rec,
                         const CxVector& x_obs) {
  if (x_rec.size() != x_obs.size()) {
    throw DimensionError("observed_residual: length mismatch");
  }
  const RealVector& mult = samples.multiplicities();
  double num = 0.0;
  double den = 0.0;
  for (Index a : samples.support()) {
    num += mult[a] * std::norm(x_rec[a] - x_obs[a]);
    den += mult[a] * std::norm(x_obs[a]);
  }
  if (den == 0.0) {
    throw MetricError("observed_residual: zero observed signal");
  }
  return std::sqrt(num / den);
}

SolveResult solve(const HankelShape& shape, const SampleSet& samples,
                  const CxVector& x_obs, const PGDConfig& config,
                  const CxVector* truth) {
  Initialization init = initialize(shape, samples, x_obs, config);
  const ObjectiveContext ctx(shape, samples,
                             observed_weighted(shape, samples, x_obs),
                             config.lambda);
  std::optional<FactorPair> truth_factors;
  if (truth) {
    truth_factors = balanced_truth_factors(shape, *truth, config.rank);
  }
  auto dist_to_truth = [&](const FactorPair& z) {
    return truth_factors ? procrustes(z, *truth_factors).dist : -1.0;
  };

  FactorPair z = std::move(init.z0);
  double objective = eval_objective(ctx, z);
  CxVector x_cur = reconstruct(shape, z);
  double eta_next =
      config.step.initial_step > 0.0
          ? config.step.initial_step
          : 1.0 / (2.0 * init.sigma1 *
                   std::max(1.0, shape.aspect_const() *
                                     static_cast<double>(config.rank)));

  SolveResult result;
  result.dims = shape.dims();
  result.termination = Termination::max_iters;
  int stalls = 0;

  for (Index iter = 0; iter < config.stop.max_iters; ++iter) {
    auto [z_next, record] = pgd_step(ctx, z, init.params, config.step,
                                     eta_next);
    if (record.at_stationary) {
      result.history.push_back(
          IterationRecord{objective, 0.0, 0.0, dist_to_truth(z)});
      result.termination = Termination::tol_x;
      break;
    }
    if (record.stalled) {
      ++stalls;
      result.history.push_back(
          IterationRecord{objective, 0.0, 0.0, dist_to_truth(z)});
      eta_next = std::max(record.step_size, 1e-300);
      if (stalls >= config.stall_limit) {
        result.termination = Termination::diverged;
        break;
      }
      continue;
    }
    stalls = 0;
    z = std::move(z_next);
    const CxVector x_next = reconstruct(shape, z);
    const double denom = x_cur.norm();
    const double x_change =
        denom > 0.0 ? (x_next - x_cur).norm() / denom
                    : (x_next.norm() > 0.0
                           ? std::numeric_limits<double>::infinity()
                           : 0.0);
    const double f_prev = objective;
    objective = record.objective_after;
    const double f_change =
        f_prev > 0.0 ? std::abs(objective - f_prev) / f_prev
                     : (objective == f_prev ? 0.0 : 1.0);
    x_cur = x_next;
    eta_next = record.step_size / config.step.shrink;
    result.history.push_back(IterationRecord{objective, record.step_size,
                                             x_change, dist_to_truth(z)});
    if (config.stop.tol_x > 0.0 && x_change <= config.stop.tol_x) {
      result.termination = Termination::tol_x;
      break;
    }
    if (config.stop.tol_f > 0.0 && f_change <= config.stop.tol_f) {
      result.termination = Termination::tol_f;
      break;
    }
  }

  result.x_rec = std::move(x_cur);
  result.factors = std::move(z);
  result.iterations = static_cast<Index>(result.history.size());
  return result;
}

RankSweepResult rank_sweep(const HankelShape& shape, const SampleSet& samples,
                           const CxVector& x_obs, const PGDConfig& base_config,
                           Index max_rank, double improvement_threshold) {
  if (max_rank < 1) throw ValidationError("rank_sweep: max_rank must be >= 1");
  RankSweepResult sweep;
  PGDConfig config = base_config;
  config.rank = 1;
  sweep.result = solve(shape, samples, x_obs, config);
  sweep.chosen_rank = 1;
  sweep.residuals.push_back(
      observed_residual(samples, sweep.result.x_rec, x_obs));
  for (Index rank = 2; rank <= max_rank; ++rank) {
    if (sweep.residuals.back() <= kResidualFloor) break;
    config.rank = rank;
    SolveResult candidate = solve(shape, samples, x_obs, config);
    const double residual = observed_residual(samples, candidate.x_rec, x_obs);
    sweep.residuals.push_back(residual);
    const double improvement =
        sweep.residuals[rank - 2] / std::max(residual, 1e-300);
    if (improvement < improvement_threshold) break;
    sweep.chosen_rank = rank;
    sweep.result = std::move(candidate);
  }
  return sweep;
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::tol_x: return "tol_x";
    case Termination::tol_f: return "tol_F";
    case Termination::max_iters: return "max_iters";
    case Termination::diverged: return "diverged";
  }
  return "unknown";
}

nlohmann::json PGDConfig::to_json() const {
  nlohmann::json j;
  j["r"] = rank;
  j["lambda"] = lambda;
  j["eps0"] = eps0;
  if (mu) {
    j["mu"] = *mu;
  } else {
    j["mu"] = "auto";
  }
  j["mu_slack"] = mu_slack;
  j["step"] = {{"initial", step.initial_step},
               {"shrink", step.shrink},
               {"sufficient_decrease", step.sufficient_decrease},
               {"max_trials", step.max_trials}};
  j["stop"] = {{"tol_x", stop.tol_x},
               {"tol_F", stop.tol_f},
               {"max_iters", stop.max_iters}};
  j["stall_limit"] = stall_limit;
  j["seed"] = seed;
  return j;
}

PGDConfig PGDConfig::from_json(const nlohmann::json& j) {
  PGDConfig c;
  if (j.contains("r")) c.rank = j["r"].get<Index>();
  if (j.contains("lambda")) c.lambda = j["lambda"].get<double>();
  if (j.contains("eps0")) c.eps0 = j["eps0"].get<double>();
  if (j.contains("mu") && j["mu"].is_number()) {
    c.mu = j["mu"].get<double>();
  }
  if (j.contains("mu_slack")) c.mu_slack = j["mu_slack"].get<double>();
  if (j.contains("step")) {
    const auto& s = j["step"];
    if (s.contains("initial")) c.step.initial_step = s["initial"].get<double>();
    if (s.contains("shrink")) c.step.shrink = s["shrink"].get<double>();
    if (s.contains("sufficient_decrease")) {
      c.step.sufficient_decrease = s["sufficient_decrease"].get<double>();
    }
    if (s.contains("max_trials")) c.step.max_trials = s["max_trials"].get<int>();
  }
  if (j.contains("stop")) {
    const auto& s = j["stop"];
    if (s.contains("tol_x")) c.stop.tol_x = s["tol_x"].get<double>();
    if (s.contains("tol_F")) c.stop.tol_f = s["tol_F"].get<double>();
    if (s.contains("max_iters")) c.stop.max_iters = s["max_iters"].get<Index>();
  }
  if (j.contains("stall_limit")) c.stall_limit = j["stall_limit"].get<int>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (c.step.shrink <= 0.0 || c.step.shrink >= 1.0) {
    throw ValidationError("PGDConfig: shrink must lie in (0, 1)");
  }
  return c;
}

namespace {

nlohmann::json complex_vector_to_json(const CxVector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) {
    arr.push_back({v[i].real(), v[i].imag()});
  }
  return arr;
}

CxVector complex_vector_from_json(const nlohmann::json& arr) {
  CxVector v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    v[static_cast<Index>(i)] =
        Complex(arr[i][0].get<double>(), arr[i][1].get<double>());
  }
  return v;
}

}  // namespace

nlohmann::json SolveResult::to_json(bool include_history) const {
  nlohmann::json j;
  j["dims"] = dims;
  j["iterations"] = iterations;
  j["termination"] = hankelpgd::to_string(termination);
  j["x_rec"] = complex_vector_to_json(x_rec);
  if (include_history) {
    nlohmann::json h = nlohmann::json::array();
    for (const auto& rec : history) {
      h.push_back({{"F", rec.objective},
                   {"step", rec.step_size},
                   {"x_change", rec.x_change},
                   {"dist", rec.dist_to_truth}});
    }
    j["history"] = std::move(h);
  }
  return j;
}

CxVector ProblemInstance::observed_vector() const {
  CxVector out = CxVector::Zero(samples.ambient_size());
  const auto& idx = samples.indices();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    out[idx[k]] = observed_values[static_cast<Index>(k)];
  }
  return out;
}

nlohmann::json ProblemInstance::to_json() const {
  nlohmann::json j;
  j["dims"] = dims;
  if (pencil) j["pencil"] = *pencil;
  j["samples"] = samples.to_json();
  j["observed"] = complex_vector_to_json(observed_values);
  j["config"] = config.to_json();
  return j;
}

ProblemInstance ProblemInstance::from_json(const nlohmann::json& j) {
  std::optional<std::vector<Index>> pencil;
  if (j.contains("pencil")) {
    pencil = j["pencil"].get<std::vector<Index>>();
  }
  ProblemInstance inst{j.at("dims").get<std::vector<Index>>(), pencil,
                       SampleSet::from_json(j.at("samples")),
                       complex_vector_from_json(j.at("observed")),
                       j.contains("config") ? PGDConfig::from_json(j["config"])
                                            : PGDConfig{}};
  if (inst.observed_values.size() != inst.samples.count()) {
    throw ValidationError(
        "ProblemInstance: observed values misaligned with samples");
  }
  return inst;
}

}  // namespace hankelpgd
