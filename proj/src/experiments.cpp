#include "hankelpgd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "hankelpgd/errors.hpp"
#include "hankelpgd/rng.hpp"

namespace hankelpgd {

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::phase_transition: return "phase_transition";
    case ExperimentKind::noise: return "noise";
    case ExperimentKind::model_order: return "model_order";
    case ExperimentKind::rank_heuristic: return "rank_heuristic";
    case ExperimentKind::single_recover: return "single_recover";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  if (s == "phase_transition") return ExperimentKind::phase_transition;
  if (s == "noise") return ExperimentKind::noise;
  if (s == "model_order") return ExperimentKind::model_order;
  if (s == "rank_heuristic") return ExperimentKind::rank_heuristic;
  if (s == "single_recover") return ExperimentKind::single_recover;
  throw ValidationError("unknown experiment kind: " + s);
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Runs fn(0..count-1) on a small worker pool. Task outputs must go to
/// per-index slots; aggregation order never depends on scheduling.
void parallel_tasks(Index count, int threads,
                    const std::function<void(Index)>& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || count <= 1) {
    for (Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const Index i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const Index workers = std::min<Index>(threads, count);
  pool.reserve(workers);
  for (Index t = 0; t < workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

std::vector<double> default_p_grid() {
  std::vector<double> grid(18);
  for (int i = 0; i < 18; ++i) grid[i] = 0.1 + i * (0.95 - 0.1) / 17.0;
  return grid;
}

std::vector<double> default_theta_grid() {
  std::vector<double> grid(7);
  for (int i = 0; i < 7; ++i) grid[i] = std::pow(10.0, -3.0 + 0.5 * i);
  return grid;
}

std::vector<double> separation_vector(const ExperimentSpec& spec) {
  std::vector<double> sep;
  if (spec.separation_factor) {
    for (Index d : spec.dims) {
      sep.push_back(*spec.separation_factor / static_cast<double>(d));
    }
  }
  return sep;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid]
                           : 0.5 * (values[mid - 1] + values[mid]);
}

double snr_db(double relative_error) {
  return -20.0 * std::log10(std::max(relative_error, 1e-300));
}

struct TrialInput {
  Index m = 0;
  Index signal_rank = 1;
  Index solver_rank = 1;
  double theta = 0.0;
  Index trial = 0;
  std::uint64_t seed = 0;
};

TrialRow run_trial(const ExperimentSpec& spec, const HankelShape& shape,
                   const TrialInput& in) {
  const Index n = shape.ambient_size();
  Rng model_rng(derive_seed(in.seed, 11));
  const std::vector<double> sep = separation_vector(spec);
  const SpectralModel model =
      random_model(shape.ndim(), in.signal_rank, sep, spec.damping, model_rng);
  const CxVector x = synthesize(model, shape.dims());
  const SampleSet samples =
      SampleSet::draw(n, in.m, spec.mode, derive_seed(in.seed, 12));
  CxVector x_obs = x;
  if (in.theta > 0.0) {
    Rng noise_rng(derive_seed(in.seed, 13));
    x_obs = add_noise(x, samples, in.theta, noise_rng);
  }
  PGDConfig config = spec.solver;
  config.rank = in.solver_rank;
  config.seed = in.seed;
  const SolveResult result = solve(shape, samples, x_obs, config);
  TrialRow row;
  row.p = static_cast<double>(in.m) / static_cast<double>(n);
  row.m = in.m;
  row.rank = in.solver_rank;
  row.theta = in.theta;
  row.trial = in.trial;
  row.seed = in.seed;
  row.rmse = rmse(result.x_rec, x);
  row.iterations = result.iterations;
  row.termination = result.termination;
  row.success = row.rmse <= spec.success_threshold;
  return row;
}

void validate_common(const ExperimentSpec& spec) {
  if (spec.trials < 1) throw ValidationError("experiment: trials must be >= 1");
  if (spec.dims.empty()) throw ValidationError("experiment: empty dims");
}

}  // namespace

PhaseTransitionResult run_phase_transition(const ExperimentSpec& spec) {
  validate_common(spec);
  if (spec.dims.size() != 1) {
    throw ValidationError("phase_transition: one-dimensional signals only");
  }
  const HankelShape shape(spec.dims, spec.pencil);
  const Index n = shape.ambient_size();
  const std::vector<double> p_grid =
      spec.p_grid.empty() ? default_p_grid() : spec.p_grid;
  Index hard_cap = std::min(shape.lifted_rows(), shape.lifted_cols());
  if (spec.separation_factor) {
    // the separated generator needs r * delta < 1
    const double delta = *spec.separation_factor / static_cast<double>(n);
    hard_cap = std::min<Index>(
        hard_cap, static_cast<Index>(std::ceil(1.0 / delta)) - 1);
  }
  const Index rank_cap =
      spec.max_rank > 0 ? std::min(spec.max_rank, hard_cap) : hard_cap;

  PhaseTransitionResult out;
  for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
    const Index m = std::max<Index>(
        1, static_cast<Index>(std::llround(p_grid[pi] * n)));
    PhaseCell best80;
    best80.p = static_cast<double>(m) / static_cast<double>(n);
    best80.m = m;
    // Sweep the model order upward until a full cell of failures.
    for (Index rank = 1; rank <= rank_cap; ++rank) {
      std::vector<TrialRow> cell(spec.trials);
      parallel_tasks(spec.trials, spec.threads, [&](Index t) {
        TrialInput in;
        in.m = m;
        in.signal_rank = rank;
        in.solver_rank = rank;
        in.trial = t;
        in.seed = derive_seed(spec.master_seed, pi, rank, t);
        cell[t] = run_trial(spec, shape, in);
      });
      Index successes = 0;
      for (const TrialRow& row : cell) successes += row.success ? 1 : 0;
      out.rows.insert(out.rows.end(), cell.begin(), cell.end());
      PhaseCell summary;
      summary.p = best80.p;
      summary.m = m;
      summary.rank = rank;
      summary.trials = spec.trials;
      summary.successes = successes;
      summary.success_rate =
          static_cast<double>(successes) / static_cast<double>(spec.trials);
      out.cells.push_back(summary);
      if (summary.success_rate >= 0.8) best80 = summary;
      if (successes == 0) break;
    }
    out.curve.push_back(best80);
  }
  return out;
}

NoiseResult run_noise(const ExperimentSpec& spec) {
  validate_common(spec);
  const HankelShape shape(spec.dims, spec.pencil);
  const Index n = shape.ambient_size();
  std::vector<Index> m_grid = spec.m_grid;
  if (m_grid.empty()) {
    if (!spec.p_grid.empty()) {
      for (double p : spec.p_grid) {
        m_grid.push_back(std::max<Index>(
            1, static_cast<Index>(std::llround(p * n))));
      }
    } else {
      m_grid = {std::max<Index>(1, n / 2), std::max<Index>(1, (3 * n) / 4)};
    }
  }
  const std::vector<double> thetas =
      spec.theta_grid.empty() ? default_theta_grid() : spec.theta_grid;
  for (double theta : thetas) {
    if (theta < 0.0) throw ValidationError("noise: theta must be >= 0");
  }

  NoiseResult out;
  const Index cells = static_cast<Index>(thetas.size() * m_grid.size());
  const Index total = cells * spec.trials;
  out.rows.resize(total);
  parallel_tasks(total, spec.threads, [&](Index task) {
    const Index trial = task % spec.trials;
    const Index cell = task / spec.trials;
    const Index mi = cell % static_cast<Index>(m_grid.size());
    const Index ti = cell / static_cast<Index>(m_grid.size());
    TrialInput in;
    in.m = m_grid[mi];
    in.signal_rank = spec.r_true;
    in.solver_rank = spec.r_true;
    in.theta = thetas[ti];
    in.trial = trial;
    // seeds ignore the m coordinate: columns of the m grid are paired runs
    // over the same instances
    in.seed = derive_seed(spec.master_seed, ti, 0, trial);
    out.rows[task] = run_trial(spec, shape, in);
  });
  for (std::size_t ti = 0; ti < thetas.size(); ++ti) {
    for (std::size_t mi = 0; mi < m_grid.size(); ++mi) {
      const Index cell = static_cast<Index>(ti * m_grid.size() + mi);
      double mean = 0.0;
      for (Index t = 0; t < spec.trials; ++t) {
        mean += out.rows[cell * spec.trials + t].rmse;
      }
      mean /= static_cast<double>(spec.trials);
      NoiseSummaryRow row;
      row.theta = thetas[ti];
      row.m = m_grid[mi];
      row.snr_in_db = snr_db(thetas[ti]);
      row.mean_rmse = mean;
      row.rmse_out_db = snr_db(mean);
      row.trials = spec.trials;
      out.summary.push_back(row);
    }
  }
  return out;
}

ModelOrderResult run_model_order(const ExperimentSpec& spec) {
  validate_common(spec);
  const HankelShape shape(spec.dims, spec.pencil);
  const Index n = shape.ambient_size();
  const Index hard_cap = std::min(shape.lifted_rows(), shape.lifted_cols());
  std::vector<Index> r_grid = spec.r_grid;
  if (r_grid.empty()) {
    r_grid = {1, 2, spec.r_true, spec.r_true + 1, 2 * spec.r_true};
    std::sort(r_grid.begin(), r_grid.end());
    r_grid.erase(std::unique(r_grid.begin(), r_grid.end()), r_grid.end());
  }
  for (Index r : r_grid) {
    if (r < 1 || r > hard_cap) {
      throw ValidationError("model_order: tested rank out of range");
    }
  }
  const double theta = spec.theta_grid.empty() ? 0.0 : spec.theta_grid[0];
  const Index m = spec.m_grid.empty()
                      ? std::max<Index>(1, static_cast<Index>(std::llround(
                                               (spec.p_grid.empty()
                                                    ? 0.6
                                                    : spec.p_grid[0]) *
                                               n)))
                      : spec.m_grid[0];

  ModelOrderResult out;
  const Index total = static_cast<Index>(r_grid.size()) * spec.trials;
  out.rows.resize(total);
  parallel_tasks(total, spec.threads, [&](Index task) {
    const Index trial = task % spec.trials;
    const Index ri = task / spec.trials;
    TrialInput in;
    in.m = m;
    in.signal_rank = spec.r_true;
    in.solver_rank = r_grid[ri];
    in.theta = theta;
    in.trial = trial;
    in.seed = derive_seed(spec.master_seed, ri, 0, trial);
    out.rows[task] = run_trial(spec, shape, in);
  });
  for (std::size_t ri = 0; ri < r_grid.size(); ++ri) {
    std::vector<double> iters, snrs;
    for (Index t = 0; t < spec.trials; ++t) {
      const TrialRow& row = out.rows[static_cast<Index>(ri) * spec.trials + t];
      iters.push_back(static_cast<double>(row.iterations));
      snrs.push_back(snr_db(row.rmse));
    }
    ModelOrderSummaryRow row;
    row.rank_tested = r_grid[ri];
    row.theta = theta;
    row.trials = spec.trials;
    row.iterations_median = median(std::move(iters));
    row.snr_out_db_median = median(std::move(snrs));
    out.summary.push_back(row);
  }
  return out;
}

RankHeuristicResult run_rank_heuristic(const ExperimentSpec& spec) {
  validate_common(spec);
  const HankelShape shape(spec.dims, spec.pencil);
  const Index n = shape.ambient_size();
  const Index hard_cap = std::min(shape.lifted_rows(), shape.lifted_cols());
  const Index sweep_cap =
      spec.max_rank > 0 ? std::min(spec.max_rank, hard_cap)
                        : std::min(2 * spec.r_true + 2, hard_cap);
  const double theta = spec.theta_grid.empty() ? 0.0 : spec.theta_grid[0];
  const Index m = spec.m_grid.empty()
                      ? std::max<Index>(1, static_cast<Index>(std::llround(
                                               (spec.p_grid.empty()
                                                    ? 0.6
                                                    : spec.p_grid[0]) *
                                               n)))
                      : spec.m_grid[0];

  std::vector<std::vector<RankCurveRow>> curves(spec.trials);
  parallel_tasks(spec.trials, spec.threads, [&](Index trial) {
    const std::uint64_t seed = derive_seed(spec.master_seed, 0, 0, trial);
    Rng model_rng(derive_seed(seed, 11));
    const std::vector<double> sep = separation_vector(spec);
    const SpectralModel model =
        random_model(shape.ndim(), spec.r_true, sep, spec.damping, model_rng);
    const CxVector x = synthesize(model, shape.dims());
    const SampleSet samples =
        SampleSet::draw(n, m, spec.mode, derive_seed(seed, 12));
    CxVector x_obs = x;
    if (theta > 0.0) {
      Rng noise_rng(derive_seed(seed, 13));
      x_obs = add_noise(x, samples, theta, noise_rng);
    }
    PGDConfig config = spec.solver;
    config.seed = seed;
    const RankSweepResult sweep = rank_sweep(shape, samples, x_obs, config,
                                             sweep_cap,
                                             spec.improvement_threshold);
    std::vector<RankCurveRow>& rows = curves[trial];
    for (std::size_t i = 0; i < sweep.residuals.size(); ++i) {
      RankCurveRow row;
      row.trial = trial;
      row.seed = seed;
      row.rank = static_cast<Index>(i + 1);
      row.residual = sweep.residuals[i];
      row.improvement =
          i == 0 ? 0.0
                 : sweep.residuals[i - 1] / std::max(sweep.residuals[i], 1e-300);
      row.chosen = row.rank == sweep.chosen_rank;
      rows.push_back(row);
    }
  });

  RankHeuristicResult out;
  Index max_len = 0;
  for (auto& c : curves) {
    max_len = std::max<Index>(max_len, static_cast<Index>(c.size()));
    out.rows.insert(out.rows.end(), c.begin(), c.end());
  }
  for (Index r = 1; r <= max_len; ++r) {
    std::vector<double> residuals, improvements;
    Index chosen = 0;
    for (const auto& c : curves) {
      if (static_cast<Index>(c.size()) < r) continue;
      residuals.push_back(c[r - 1].residual);
      improvements.push_back(c[r - 1].improvement);
      chosen += c[r - 1].chosen ? 1 : 0;
    }
    RankHeuristicSummaryRow row;
    row.rank = r;
    row.residual_median = median(std::move(residuals));
    row.improvement_median = median(std::move(improvements));
    row.chosen_count = chosen;
    out.summary.push_back(row);
  }
  return out;
}

namespace {

std::string csv_comments(const ExperimentSpec& spec) {
  std::ostringstream os;
  if (spec.dims.size() == 3) {
    os << "# note: 3-d run at reduced desk scale (dims";
    for (Index d : spec.dims) os << ' ' << d;
    os << "); the reference protocol uses 64x128x512\n";
  }
  if (spec.success_threshold_overridden) {
    os << "# success_threshold_overridden: " << fmt(spec.success_threshold)
       << "\n";
  }
  os << "# master_seed: " << spec.master_seed << "\n";
  os << "# max_iters: " << spec.solver.stop.max_iters << "\n";
  return os.str();
}

}  // namespace

CsvBundle to_csv(const ExperimentSpec& spec, const PhaseTransitionResult& r) {
  CsvBundle out;
  std::ostringstream main;
  main << csv_comments(spec);
  main << "p,m,r,trial,seed,rmse,iterations,termination,success\n";
  for (const TrialRow& row : r.rows) {
    main << fmt(row.p) << ',' << row.m << ',' << row.rank << ',' << row.trial
         << ',' << row.seed << ',' << fmt(row.rmse) << ',' << row.iterations
         << ',' << to_string(row.termination) << ',' << (row.success ? 1 : 0)
         << '\n';
  }
  out.main = main.str();
  std::ostringstream summary;
  summary << "p,m,r,trials,successes,success_rate\n";
  for (const PhaseCell& c : r.cells) {
    summary << fmt(c.p) << ',' << c.m << ',' << c.rank << ',' << c.trials
            << ',' << c.successes << ',' << fmt(c.success_rate) << '\n';
  }
  out.summary = summary.str();
  std::ostringstream curve;
  curve << "p,m,r80\n";
  for (const PhaseCell& c : r.curve) {
    curve << fmt(c.p) << ',' << c.m << ',' << c.rank << '\n';
  }
  out.extra = curve.str();
  return out;
}

CsvBundle to_csv(const ExperimentSpec& spec, const NoiseResult& r) {
  CsvBundle out;
  std::ostringstream main;
  main << csv_comments(spec);
  main << "theta,m,trial,seed,rmse,iterations,termination\n";
  for (const TrialRow& row : r.rows) {
    main << fmt(row.theta) << ',' << row.m << ',' << row.trial << ','
         << row.seed << ',' << fmt(row.rmse) << ',' << row.iterations << ','
         << to_string(row.termination) << '\n';
  }
  out.main = main.str();
  std::ostringstream summary;
  summary << "theta,m,snr_db_in,mean_rmse,rmse_db_out,trials\n";
  for (const NoiseSummaryRow& row : r.summary) {
    summary << fmt(row.theta) << ',' << row.m << ',' << fmt(row.snr_in_db)
            << ',' << fmt(row.mean_rmse) << ',' << fmt(row.rmse_out_db) << ','
            << row.trials << '\n';
  }
  out.summary = summary.str();
  return out;
}

CsvBundle to_csv(const ExperimentSpec& spec, const ModelOrderResult& r) {
  CsvBundle out;
  std::ostringstream main;
  main << csv_comments(spec);
  main << "r_test,theta,trial,seed,rmse,snr_out_db,iterations,termination\n";
  for (const TrialRow& row : r.rows) {
    main << row.rank << ',' << fmt(row.theta) << ',' << row.trial << ','
         << row.seed << ',' << fmt(row.rmse) << ',' << fmt(snr_db(row.rmse))
         << ',' << row.iterations << ',' << to_string(row.termination) << '\n';
  }
  out.main = main.str();
  std::ostringstream summary;
  summary << "r_test,theta,trials,iterations_median,snr_out_db_median\n";
  for (const ModelOrderSummaryRow& row : r.summary) {
    summary << row.rank_tested << ',' << fmt(row.theta) << ',' << row.trials
            << ',' << fmt(row.iterations_median) << ','
            << fmt(row.snr_out_db_median) << '\n';
  }
  out.summary = summary.str();
  return out;
}

CsvBundle to_csv(const ExperimentSpec& spec, const RankHeuristicResult& r) {
  CsvBundle out;
  std::ostringstream main;
  main << csv_comments(spec);
  main << "trial,seed,r,relative_residual,improvement,chosen\n";
  for (const RankCurveRow& row : r.rows) {
    main << row.trial << ',' << row.seed << ',' << row.rank << ','
         << fmt(row.residual) << ',' << fmt(row.improvement) << ','
         << (row.chosen ? 1 : 0) << '\n';
  }
  out.main = main.str();
  std::ostringstream summary;
  summary << "r,relative_residual_median,improvement_median,chosen_count\n";
  for (const RankHeuristicSummaryRow& row : r.summary) {
    summary << row.rank << ',' << fmt(row.residual_median) << ','
            << fmt(row.improvement_median) << ',' << row.chosen_count << '\n';
  }
  out.summary = summary.str();
  return out;
}

namespace {

nlohmann::json trial_rows_json(const std::vector<TrialRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const TrialRow& row : rows) {
    arr.push_back({{"p", row.p},
                   {"m", row.m},
                   {"r", row.rank},
                   {"theta", row.theta},
                   {"trial", row.trial},
                   {"seed", row.seed},
                   {"rmse", row.rmse},
                   {"iterations", row.iterations},
                   {"termination", to_string(row.termination)},
                   {"success", row.success}});
  }
  return arr;
}

}  // namespace

nlohmann::json to_json(const ExperimentSpec& spec,
                       const PhaseTransitionResult& r) {
  nlohmann::json j;
  j["spec"] = spec.to_json();
  j["rows"] = trial_rows_json(r.rows);
  j["cells"] = nlohmann::json::array();
  for (const PhaseCell& c : r.cells) {
    j["cells"].push_back({{"p", c.p},
                          {"m", c.m},
                          {"r", c.rank},
                          {"trials", c.trials},
                          {"successes", c.successes},
                          {"success_rate", c.success_rate}});
  }
  j["curve_80"] = nlohmann::json::array();
  for (const PhaseCell& c : r.curve) {
    j["curve_80"].push_back({{"p", c.p}, {"m", c.m}, {"r80", c.rank}});
  }
  return j;
}

nlohmann::json to_json(const ExperimentSpec& spec, const NoiseResult& r) {
  nlohmann::json j;
  j["spec"] = spec.to_json();
  j["rows"] = trial_rows_json(r.rows);
  j["summary"] = nlohmann::json::array();
  for (const NoiseSummaryRow& row : r.summary) {
    j["summary"].push_back({{"theta", row.theta},
                            {"m", row.m},
                            {"snr_db_in", row.snr_in_db},
                            {"mean_rmse", row.mean_rmse},
                            {"rmse_db_out", row.rmse_out_db},
                            {"trials", row.trials}});
  }
  return j;
}

nlohmann::json to_json(const ExperimentSpec& spec, const ModelOrderResult& r) {
  nlohmann::json j;
  j["spec"] = spec.to_json();
  j["rows"] = trial_rows_json(r.rows);
  j["summary"] = nlohmann::json::array();
  for (const ModelOrderSummaryRow& row : r.summary) {
    j["summary"].push_back({{"r_test", row.rank_tested},
                            {"theta", row.theta},
                            {"trials", row.trials},
                            {"iterations_median", row.iterations_median},
                            {"snr_out_db_median", row.snr_out_db_median}});
  }
  return j;
}

nlohmann::json to_json(const ExperimentSpec& spec,
                       const RankHeuristicResult& r) {
  nlohmann::json j;
  j["spec"] = spec.to_json();
  j["rows"] = nlohmann::json::array();
  for (const RankCurveRow& row : r.rows) {
    j["rows"].push_back({{"trial", row.trial},
                         {"seed", row.seed},
                         {"r", row.rank},
                         {"relative_residual", row.residual},
                         {"improvement", row.improvement},
                         {"chosen", row.chosen}});
  }
  j["summary"] = nlohmann::json::array();
  for (const RankHeuristicSummaryRow& row : r.summary) {
    j["summary"].push_back(
        {{"r", row.rank},
         {"relative_residual_median", row.residual_median},
         {"improvement_median", row.improvement_median},
         {"chosen_count", row.chosen_count}});
  }
  return j;
}

nlohmann::json ExperimentSpec::to_json() const {
  nlohmann::json j;
  j["kind"] = hankelpgd::to_string(kind);
  j["dims"] = dims;
  if (pencil) j["pencil"] = *pencil;
  if (!p_grid.empty()) j["p_grid"] = p_grid;
  if (!m_grid.empty()) j["m_grid"] = m_grid;
  if (!r_grid.empty()) j["r_grid"] = r_grid;
  if (!theta_grid.empty()) j["theta_grid"] = theta_grid;
  j["trials"] = trials;
  j["r_true"] = r_true;
  j["max_rank"] = max_rank;
  if (separation_factor) j["separation_factor"] = *separation_factor;
  if (!damping.empty()) {
    j["damping"] = nlohmann::json::array();
    for (const DampingRange& d : damping) {
      j["damping"].push_back({d.inv_lo, d.inv_hi});
    }
  }
  j["mode"] = hankelpgd::to_string(mode);
  j["solver"] = solver.to_json();
  j["success_threshold"] = success_threshold;
  j["success_threshold_overridden"] = success_threshold_overridden;
  j["improvement_threshold"] = improvement_threshold;
  j["master_seed"] = master_seed;
  // threads is a runtime knob, not part of the experiment identity; outputs
  // must be byte-identical across worker counts
  return j;
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  if (j.contains("kind")) {
    spec.kind = experiment_kind_from_string(j["kind"].get<std::string>());
  }
  if (j.contains("dims")) spec.dims = j["dims"].get<std::vector<Index>>();
  if (j.contains("pencil")) {
    spec.pencil = j["pencil"].get<std::vector<Index>>();
  }
  auto grid = [&j](const char* name, auto& target) {
    if (j.contains(name)) {
      target = j[name].get<std::decay_t<decltype(target)>>();
      if (target.empty()) {
        throw ValidationError(std::string("ExperimentSpec: empty grid ") +
                              name);
      }
    }
  };
  grid("p_grid", spec.p_grid);
  grid("m_grid", spec.m_grid);
  grid("r_grid", spec.r_grid);
  grid("theta_grid", spec.theta_grid);
  if (j.contains("trials")) spec.trials = j["trials"].get<Index>();
  if (j.contains("r_true")) spec.r_true = j["r_true"].get<Index>();
  if (j.contains("max_rank")) spec.max_rank = j["max_rank"].get<Index>();
  if (j.contains("separation_factor")) {
    spec.separation_factor = j["separation_factor"].get<double>();
  }
  if (j.contains("damping")) {
    for (const auto& d : j["damping"]) {
      spec.damping.push_back(
          DampingRange{d[0].get<double>(), d[1].get<double>()});
    }
  }
  if (j.contains("mode")) {
    spec.mode = sample_mode_from_string(j["mode"].get<std::string>());
  }
  if (j.contains("solver")) spec.solver = PGDConfig::from_json(j["solver"]);
  if (j.contains("success_threshold")) {
    spec.success_threshold = j["success_threshold"].get<double>();
    spec.success_threshold_overridden = spec.success_threshold != 1e-3;
  }
  if (j.contains("improvement_threshold")) {
    spec.improvement_threshold = j["improvement_threshold"].get<double>();
  }
  if (j.contains("master_seed")) {
    spec.master_seed = j["master_seed"].get<std::uint64_t>();
  }
  if (j.contains("threads")) spec.threads = j["threads"].get<int>();
  return spec;
}

}  // namespace hankelpgd
