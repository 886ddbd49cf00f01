#ifndef HANKELPGD_SOLVER_HPP
#define HANKELPGD_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hankelpgd/factor.hpp"
#include "hankelpgd/objective.hpp"
#include "hankelpgd/types.hpp"

namespace hankelpgd {

/// Backtracking line search policy. A nonpositive `initial_step` selects the
/// automatic scale 1 / (2 sigma1 max(1, c_s r)) from the initialization; the
/// search starts each iteration from the previously accepted step grown by
/// 1/shrink and accepts on the Armijo test
///   F(project(z - eta grad)) <= F(z) - sufficient_decrease * eta * |grad|^2.
struct LineSearchPolicy {
  double initial_step = -1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-3;
  int max_trials = 30;
};

/// Stopping rules; a nonpositive tolerance disables that rule.
struct StoppingRule {
  double tol_x = 1e-7;   // relative iterate change
  double tol_f = 1e-5;   // relative objective change
  Index max_iters = 5000;
};

struct PGDConfig {
  Index rank = 1;
  double lambda = 0.25;
  double eps0 = 1.0 / 11.0;
  std::optional<double> mu;   // empty: estimated from the initialization
  double mu_slack = 1.05;     // auto bound = slack * max row norm of the seed
  LineSearchPolicy step;
  StoppingRule stop;
  int stall_limit = 5;        // consecutive failed searches before giving up
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static PGDConfig from_json(const nlohmann::json& j);
};

enum class Termination { tol_x, tol_f, max_iters, diverged };
std::string to_string(Termination t);

struct IterationRecord {
  double objective = 0.0;      // F after the step
  double step_size = 0.0;      // accepted step (0 on a stalled iteration)
  double x_change = 0.0;       // relative iterate change
  double dist_to_truth = -1.0; // aligned factor distance; -1 without truth
};

struct SolveResult {
  CxVector x_rec;              // flat row-major over dims
  std::vector<Index> dims;
  FactorPair factors;
  Index iterations = 0;
  std::vector<IterationRecord> history;
  Termination termination = Termination::max_iters;

  nlohmann::json to_json(bool include_history = false) const;
};

struct Initialization {
  FactorPair z0;
  ProjectionParams params;
  double sigma1 = 0.0;  // top singular value of the thresholded seed
};

/// One-step hard thresholding seed: the rank-r truncation of the lifting of
/// the rescaled observed entries, split into balanced factors and projected
/// onto the feasible set. sigma is sigma1 / (1 - eps0); mu follows the
/// config policy. Throws DegenerateInputError if every observed entry is 0.
Initialization initialize(const HankelShape& shape, const SampleSet& samples,
                          const CxVector& x_obs, const PGDConfig& config);

struct StepRecord {
  double step_size = 0.0;
  double objective_before = 0.0;
  double objective_after = 0.0;
  int trials = 0;
  bool stalled = false;
  bool at_stationary = false;
};

/// One projected gradient step with backtracking from `step_start`.
/// A stalled record (search exhausted) returns the input point unchanged;
/// the caller decides termination.
std::pair<FactorPair, StepRecord> pgd_step(const ObjectiveContext& ctx,
                                           const FactorPair& z,
                                           const ProjectionParams& params,
                                           const LineSearchPolicy& policy,
                                           double step_start);

/// Full pipeline: initialization, projected descent with line search, the
/// three stopping rules, and output reconstruction. When `truth` is given the
/// history carries per-iteration aligned distances to the balanced truth
/// factors.
SolveResult solve(const HankelShape& shape, const SampleSet& samples,
                  const CxVector& x_obs, const PGDConfig& config,
                  const CxVector* truth = nullptr);

struct RankSweepResult {
  Index chosen_rank = 1;
  std::vector<double> residuals;  // relative residual on observed entries, per rank
  SolveResult result;             // solve at the chosen rank
};

/// Rank-increasing heuristic: solve at r = 1, 2, ... and stop once the
/// relative observed-entry residual stops improving by `improvement_threshold`
/// per step; the chosen rank is the last significantly improving one.
RankSweepResult rank_sweep(const HankelShape& shape, const SampleSet& samples,
                           const CxVector& x_obs, const PGDConfig& base_config,
                           Index max_rank, double improvement_threshold);

/// Relative residual of a reconstruction on the observed entries.
double observed_residual(const SampleSet& samples, const CxVector& x_rec,
                         const CxVector& x_obs);

/// Balanced factors of the lifting of a signal (for truth-distance tracking).
FactorPair balanced_truth_factors(const HankelShape& shape,
                                  const CxVector& x_true, Index rank);

/// A full problem instance as shipped over JSON: geometry, samples, observed
/// values and solver configuration.
struct ProblemInstance {
  std::vector<Index> dims;
  std::optional<std::vector<Index>> pencil;
  SampleSet samples;
  CxVector observed_values;  // aligned with samples.indices()
  PGDConfig config;

  /// Observed entries scattered into a flat length-n vector.
  CxVector observed_vector() const;

  nlohmann::json to_json() const;
  static ProblemInstance from_json(const nlohmann::json& j);
};

}  // namespace hankelpgd

#endif  // HANKELPGD_SOLVER_HPP
