#ifndef HANKELPGD_EXPERIMENTS_HPP
#define HANKELPGD_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hankelpgd/sampling.hpp"
#include "hankelpgd/signal.hpp"
#include "hankelpgd/solver.hpp"
#include "hankelpgd/types.hpp"

namespace hankelpgd {

enum class ExperimentKind {
  phase_transition,
  noise,
  model_order,
  rank_heuristic,
  single_recover
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

/// Declarative description of one experiment family. Per-trial seeds derive
/// from (master_seed, cell coordinates, trial index), never from scheduling,
/// so outputs are byte-identical for any worker count.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::phase_transition;
  std::vector<Index> dims{63};
  std::optional<std::vector<Index>> pencil;

  std::vector<double> p_grid;      // sampling ratios
  std::vector<Index> m_grid;       // explicit sample counts (wins over p_grid)
  std::vector<Index> r_grid;       // tested model orders (model_order kind)
  std::vector<double> theta_grid;  // noise levels

  Index trials = 20;
  Index r_true = 3;    // generator order for noise/model-order/rank kinds
  Index max_rank = 0;  // phase sweep / rank heuristic cap; 0 = automatic

  /// Per-axis wrap-around separation is factor / N_i; absent = no constraint.
  std::optional<double> separation_factor;
  std::vector<DampingRange> damping;  // per axis; empty = undamped
  SampleMode mode = SampleMode::without_replacement;

  PGDConfig solver;
  double success_threshold = 1e-3;
  bool success_threshold_overridden = false;
  double improvement_threshold = 2.0;

  std::uint64_t master_seed = 0;
  int threads = 1;

  nlohmann::json to_json() const;
  static ExperimentSpec from_json(const nlohmann::json& j);
};

/// One solved trial; the seed alone replays it.
struct TrialRow {
  double p = 0.0;
  Index m = 0;
  Index rank = 0;
  double theta = 0.0;
  Index trial = 0;
  std::uint64_t seed = 0;
  double rmse = 0.0;
  Index iterations = 0;
  Termination termination = Termination::max_iters;
  bool success = false;
};

struct PhaseCell {
  double p = 0.0;
  Index m = 0;
  Index rank = 0;
  Index trials = 0;
  Index successes = 0;
  double success_rate = 0.0;
};

struct PhaseTransitionResult {
  std::vector<TrialRow> rows;
  std::vector<PhaseCell> cells;
  /// Largest rank with success rate >= 0.8 per sampling ratio (0 if none).
  std::vector<PhaseCell> curve;
};

struct NoiseSummaryRow {
  double theta = 0.0;
  Index m = 0;
  double snr_in_db = 0.0;
  double mean_rmse = 0.0;
  double rmse_out_db = 0.0;
  Index trials = 0;
};

struct NoiseResult {
  std::vector<TrialRow> rows;
  std::vector<NoiseSummaryRow> summary;
};

struct ModelOrderSummaryRow {
  Index rank_tested = 0;
  double theta = 0.0;
  Index trials = 0;
  double iterations_median = 0.0;
  double snr_out_db_median = 0.0;
};

struct ModelOrderResult {
  std::vector<TrialRow> rows;
  std::vector<ModelOrderSummaryRow> summary;
};

struct RankCurveRow {
  Index trial = 0;
  std::uint64_t seed = 0;
  Index rank = 0;
  double residual = 0.0;
  double improvement = 0.0;  // residual(r-1) / residual(r); 0 at r = 1
  bool chosen = false;
};

struct RankHeuristicSummaryRow {
  Index rank = 0;
  double residual_median = 0.0;
  double improvement_median = 0.0;
  Index chosen_count = 0;
};

struct RankHeuristicResult {
  std::vector<RankCurveRow> rows;
  std::vector<RankHeuristicSummaryRow> summary;
};

PhaseTransitionResult run_phase_transition(const ExperimentSpec& spec);
NoiseResult run_noise(const ExperimentSpec& spec);
ModelOrderResult run_model_order(const ExperimentSpec& spec);
RankHeuristicResult run_rank_heuristic(const ExperimentSpec& spec);

/// CSV renderings: per-trial rows, aggregated summary, and (phase only) the
/// 80% curve. Headers are mandatory; floats carry 17 significant digits;
/// 3D runs and overridden success thresholds are noted in leading comments.
struct CsvBundle {
  std::string main;
  std::string summary;
  std::string extra;
};

CsvBundle to_csv(const ExperimentSpec& spec, const PhaseTransitionResult& r);
CsvBundle to_csv(const ExperimentSpec& spec, const NoiseResult& r);
CsvBundle to_csv(const ExperimentSpec& spec, const ModelOrderResult& r);
CsvBundle to_csv(const ExperimentSpec& spec, const RankHeuristicResult& r);

nlohmann::json to_json(const ExperimentSpec& spec,
                       const PhaseTransitionResult& r);
nlohmann::json to_json(const ExperimentSpec& spec, const NoiseResult& r);
nlohmann::json to_json(const ExperimentSpec& spec, const ModelOrderResult& r);
nlohmann::json to_json(const ExperimentSpec& spec,
                       const RankHeuristicResult& r);

/// Entry point behind the command line tool; returns the process exit code
/// (0 ok, 1 validation error, 2 runtime failure).
int cli_main(int argc, char** argv);

}  // namespace hankelpgd

#endif  // HANKELPGD_EXPERIMENTS_HPP
