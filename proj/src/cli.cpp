#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hankelpgd/errors.hpp"
#include "hankelpgd/experiments.hpp"
#include "hankelpgd/oracle.hpp"
#include "hankelpgd/rng.hpp"

namespace hankelpgd {
namespace {

int default_threads() {
  if (const char* env = std::getenv("HANKEL_PGD_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file: " + path);
  out << content;
}

std::string sibling_path(const std::string& path, const char* tag) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return path + "." + tag;
  return path.substr(0, dot) + "." + tag + path.substr(dot);
}

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  try {
    nlohmann::json j;
    in >> j;
    return j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::vector<DampingRange> parse_damping(const std::string& text) {
  std::vector<DampingRange> out;
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) {
      throw ValidationError("damping ranges must look like lo:hi[,lo:hi...]");
    }
    out.push_back(DampingRange{std::stod(tok.substr(0, colon)),
                               std::stod(tok.substr(colon + 1))});
  }
  return out;
}

struct ExpFlags {
  std::optional<std::string> profile, out, mode, damping;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::vector<Index>> dims, m_grid, r_grid;
  std::optional<std::vector<double>> p_grid, theta_grid;
  std::optional<Index> n, trials, r_true, max_rank;
  std::optional<double> sep, threshold, improvement;
  std::optional<double> lambda, eps0, mu, tol_x, tol_f, eta0;
  std::optional<Index> max_iters;
};

void add_common_flags(CLI::App* sub, ExpFlags& f) {
  sub->add_option("--profile", f.profile, "experiment spec JSON file");
  sub->add_option("--out", f.out, "output path (default: stdout)");
  sub->add_option("--format", f.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--threads", f.threads,
                  "worker threads (default: HANKEL_PGD_THREADS or 1)");
  sub->add_option("--n", f.n, "1-d signal length");
  sub->add_option("--dims", f.dims, "axis lengths, up to 3")->delimiter(',');
  sub->add_option("--trials", f.trials, "trials per grid cell");
  sub->add_option("--r-true", f.r_true, "generator model order");
  sub->add_option("--max-rank", f.max_rank, "rank sweep cap");
  sub->add_option("--p", f.p_grid, "sampling ratio grid")->delimiter(',');
  sub->add_option("--m", f.m_grid, "sample count grid")->delimiter(',');
  sub->add_option("--r", f.r_grid, "tested model orders")->delimiter(',');
  sub->add_option("--theta", f.theta_grid, "noise level grid")->delimiter(',');
  sub->add_option("--sep", f.sep,
                  "wrap-around separation factor (delta_i = factor / N_i)");
  sub->add_option("--damping", f.damping,
                  "per-axis 1/tau ranges, lo:hi[,lo:hi...]");
  sub->add_option("--mode", f.mode, "sampling mode: with|without");
  sub->add_option("--success-threshold", f.threshold,
                  "override the 1e-3 success rule (recorded in output)");
  sub->add_option("--improvement-threshold", f.improvement,
                  "rank heuristic stopping ratio");
  sub->add_option("--lambda", f.lambda, "balance regularization weight");
  sub->add_option("--eps0", f.eps0, "spectral slack in (0,1)");
  sub->add_option("--mu", f.mu, "explicit incoherence bound (default: auto)");
  sub->add_option("--tol-x", f.tol_x, "relative iterate-change tolerance");
  sub->add_option("--tol-F", f.tol_f, "relative objective-change tolerance");
  sub->add_option("--max-iters", f.max_iters, "iteration cap");
  sub->add_option("--eta0", f.eta0, "initial line search step");
}

ExperimentSpec build_spec(const ExpFlags& f, ExperimentSpec defaults) {
  ExperimentSpec spec = std::move(defaults);
  if (f.profile) {
    const ExperimentKind kind = spec.kind;
    spec = ExperimentSpec::from_json(load_json(*f.profile));
    spec.kind = kind;
  }
  if (f.seed) spec.master_seed = *f.seed;
  if (f.threads) spec.threads = *f.threads;
  if (f.n) spec.dims = {*f.n};
  if (f.dims) spec.dims = *f.dims;
  if (f.trials) spec.trials = *f.trials;
  if (f.r_true) spec.r_true = *f.r_true;
  if (f.max_rank) spec.max_rank = *f.max_rank;
  if (f.p_grid) spec.p_grid = *f.p_grid;
  if (f.m_grid) spec.m_grid = *f.m_grid;
  if (f.r_grid) spec.r_grid = *f.r_grid;
  if (f.theta_grid) spec.theta_grid = *f.theta_grid;
  if (f.sep) spec.separation_factor = *f.sep > 0 ? std::optional<double>(*f.sep)
                                                 : std::nullopt;
  if (f.damping) spec.damping = parse_damping(*f.damping);
  if (f.mode) spec.mode = sample_mode_from_string(*f.mode);
  if (f.threshold) {
    spec.success_threshold = *f.threshold;
    spec.success_threshold_overridden = true;
  }
  if (f.improvement) spec.improvement_threshold = *f.improvement;
  if (f.lambda) spec.solver.lambda = *f.lambda;
  if (f.eps0) spec.solver.eps0 = *f.eps0;
  if (f.mu) spec.solver.mu = *f.mu;
  if (f.tol_x) spec.solver.stop.tol_x = *f.tol_x;
  if (f.tol_f) spec.solver.stop.tol_f = *f.tol_f;
  if (f.max_iters) spec.solver.stop.max_iters = *f.max_iters;
  if (f.eta0) spec.solver.step.initial_step = *f.eta0;
  return spec;
}

void emit(const ExpFlags& f, const CsvBundle& csv, const nlohmann::json& json) {
  if (f.format == "json") {
    const std::string text = json.dump(2) + "\n";
    if (!f.out || f.out->empty()) {
      std::cout << text;
    } else {
      write_file(*f.out, text);
    }
    return;
  }
  if (!f.out || f.out->empty()) {
    std::cout << csv.main << '\n' << csv.summary;
    if (!csv.extra.empty()) std::cout << '\n' << csv.extra;
  } else {
    write_file(*f.out, csv.main);
    write_file(sibling_path(*f.out, "summary"), csv.summary);
    if (!csv.extra.empty()) {
      write_file(sibling_path(*f.out, "curve"), csv.extra);
    }
  }
}

// ---------------------------------------------------------------------------
// recover

struct RecoverFlags {
  std::vector<Index> dims{127};
  Index rank = 4;
  double p = 0.5;
  Index m = 0;
  double sep = 0.0;
  double theta = 0.0;
  std::string mode = "without";
  std::string damping;
  std::uint64_t seed = 0;
  std::string instance;
  std::string save_instance;
  std::string result_path;
  bool include_history = false;
  std::optional<Index> n;
};

int run_recover(const RecoverFlags& f) {
  if (!f.instance.empty()) {
    const ProblemInstance inst =
        ProblemInstance::from_json(load_json(f.instance));
    const HankelShape shape(inst.dims, inst.pencil);
    const SolveResult result =
        solve(shape, inst.samples, inst.observed_vector(), inst.config);
    const double residual = observed_residual(inst.samples, result.x_rec,
                                              inst.observed_vector());
    std::cout << "observed_residual=" << residual
              << " iterations=" << result.iterations
              << " termination=" << to_string(result.termination) << "\n";
    if (!f.result_path.empty()) {
      write_file(f.result_path,
                 result.to_json(f.include_history).dump(2) + "\n");
    }
    return 0;
  }

  std::vector<Index> dims = f.dims;
  if (f.n) dims = {*f.n};
  const HankelShape shape(dims);
  const Index n = shape.ambient_size();
  const Index m = f.m > 0
                      ? f.m
                      : std::max<Index>(
                            1, static_cast<Index>(std::llround(f.p * n)));
  Rng model_rng(derive_seed(f.seed, 11));
  std::vector<double> sep;
  if (f.sep > 0.0) {
    for (Index d : dims) sep.push_back(f.sep / static_cast<double>(d));
  }
  const SpectralModel model = random_model(shape.ndim(), f.rank, sep,
                                           parse_damping(f.damping), model_rng);
  const CxVector x = synthesize(model, shape.dims());
  const SampleSet samples = SampleSet::draw(
      n, m, sample_mode_from_string(f.mode), derive_seed(f.seed, 12));
  CxVector x_obs = x;
  if (f.theta > 0.0) {
    Rng noise_rng(derive_seed(f.seed, 13));
    x_obs = add_noise(x, samples, f.theta, noise_rng);
  }
  PGDConfig config;
  config.rank = f.rank;
  config.seed = f.seed;
  if (!f.save_instance.empty()) {
    CxVector observed(samples.count());
    for (Index k = 0; k < samples.count(); ++k) {
      observed[k] = x_obs[samples.indices()[k]];
    }
    const ProblemInstance inst{dims, std::nullopt, samples, observed, config};
    write_file(f.save_instance, inst.to_json().dump(2) + "\n");
  }
  const SolveResult result = solve(shape, samples, x_obs, config, &x);
  std::cout << "rmse=" << rmse(result.x_rec, x)
            << " iterations=" << result.iterations
            << " termination=" << to_string(result.termination) << "\n";
  if (!f.result_path.empty()) {
    write_file(f.result_path, result.to_json(f.include_history).dump(2) + "\n");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// selftest: oracle equivalences for every fast path

struct SelfTest {
  bool all_ok = true;
  void check(const std::string& name, bool ok) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
    all_ok = all_ok && ok;
  }
};

CxVector random_vector(Rng& rng, Index n) {
  CxVector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.complex_gaussian();
  return v;
}

CxMatrix random_matrix(Rng& rng, Index r, Index c) {
  CxMatrix m(r, c);
  for (Index j = 0; j < c; ++j) {
    for (Index i = 0; i < r; ++i) m(i, j) = rng.complex_gaussian();
  }
  return m;
}

HankelShape random_shape(Rng& rng, Index max_axis, Index ndim) {
  std::vector<Index> dims;
  for (Index k = 0; k < ndim; ++k) {
    dims.push_back(2 + static_cast<Index>(rng.uniform_index(max_axis - 1)));
  }
  return HankelShape(dims);
}

int run_selftest() {
  SelfTest st;
  Rng rng(0xC0FFEEULL);

  {
    bool ok = true;
    for (Index n = 1; n <= 24 && ok; ++n) {
      for (Index pencil = 1; pencil <= n && ok; ++pencil) {
        const HankelShape shape({n}, std::vector<Index>{pencil});
        const RealVector& w = shape.axis_weights(0);
        ok = w.sum() ==
             static_cast<double>(pencil * (n - pencil + 1));
        for (Index a = 0; a < n && ok; ++a) {
          ok = w[a] >= 1.0 && w[a] == w[n - 1 - a];
        }
      }
    }
    st.check("skew-diagonal weight identities", ok);
  }

  {
    bool ok = true;
    for (int c = 0; c < 20 && ok; ++c) {
      const HankelShape shape =
          c % 2 ? random_shape(rng, 12, 2) : random_shape(rng, 96, 1);
      const CxVector z = random_vector(rng, shape.ambient_size());
      const CxMatrix lift = oracle::dense_g(shape, z);
      const CxVector back = oracle::dense_gstar(shape, lift);
      ok = (back - z).norm() <= 1e-12 * z.norm();
      const CxMatrix w =
          random_matrix(rng, shape.lifted_rows(), shape.lifted_cols());
      const Complex lhs = (lift.conjugate().cwiseProduct(w)).sum();
      const Complex rhs = z.dot(oracle::dense_gstar(shape, w));
      ok = ok && std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs);
    }
    st.check("lifting isometry and adjointness", ok);
  }

  {
    bool ok = true;
    for (int c = 0; c < 10 && ok; ++c) {
      const HankelShape shape =
          c % 2 ? random_shape(rng, 8, 2) : random_shape(rng, 48, 1);
      const Index rank = 1 + static_cast<Index>(rng.uniform_index(3));
      const CxMatrix zu = random_matrix(rng, shape.lifted_rows(), rank);
      const CxMatrix zv = random_matrix(rng, shape.lifted_cols(), rank);
      const CxVector fast = gstar_factored(shape, zu, zv);
      const CxVector ref =
          oracle::dense_gstar(shape, CxMatrix(zu * zv.adjoint()));
      ok = (fast - ref).norm() <= 1e-11 * ref.norm();
      const CxVector w = random_vector(rng, shape.ambient_size());
      const CxMatrix left = g_vector_times_factor(shape, w, zv, LiftSide::left);
      const CxMatrix dense = oracle::dense_g(shape, w);
      ok = ok && (left - dense * zv).norm() <= 1e-11 * left.norm();
      const CxMatrix right =
          g_vector_times_factor(shape, w, zu, LiftSide::right);
      ok = ok && (right - dense.adjoint() * zu).norm() <= 1e-11 * right.norm();
    }
    st.check("fast lifted products match dense", ok);
  }

  {
    bool ok = true;
    for (int c = 0; c < 6 && ok; ++c) {
      const HankelShape shape = random_shape(rng, 32, 1);
      const Index n = shape.ambient_size();
      const Index rank = 1 + static_cast<Index>(rng.uniform_index(3));
      const Index m = std::max<Index>(1, n / 2);
      const SampleSet samples =
          SampleSet::draw(n, m, SampleMode::with_replacement,
                          derive_seed(0xABCD, c));
      const ObjectiveContext ctx(shape, samples, random_vector(rng, n), 0.25);
      FactorPair z{random_matrix(rng, shape.lifted_rows(), rank),
                   random_matrix(rng, shape.lifted_cols(), rank)};
      const double fast = eval_objective(ctx, z);
      const double ref = oracle::naive_objective(ctx, z);
      ok = std::abs(fast - ref) <= 1e-11 * std::max(1.0, std::abs(ref));
      const FactorPair grad = grad_objective(ctx, z);
      const FactorPair dense = oracle::dense_gradient(ctx, z);
      const double scale = std::sqrt(dense.squared_norm());
      ok = ok && std::sqrt((FactorPair{grad.u - dense.u, grad.v - dense.v})
                               .squared_norm()) <= 1e-11 * scale;
    }
    st.check("objective and gradient match dense", ok);
  }

  {
    bool ok = true;
    for (int c = 0; c < 2 && ok; ++c) {
      const HankelShape shape({14 + 2 * c});
      const Index n = shape.ambient_size();
      const SampleSet samples = SampleSet::draw(
          n, n / 2, SampleMode::with_replacement, derive_seed(0xBEEF, c));
      const ObjectiveContext ctx(shape, samples, random_vector(rng, n), 0.25);
      FactorPair z{random_matrix(rng, shape.lifted_rows(), 2),
                   random_matrix(rng, shape.lifted_cols(), 2)};
      const FactorPair grad = grad_objective(ctx, z);
      const FactorPair fd = oracle::fd_gradient(ctx, z, 1e-6);
      const double scale = std::sqrt(fd.squared_norm());
      ok = std::sqrt((FactorPair{grad.u - fd.u, grad.v - fd.v})
                         .squared_norm()) <= 1e-5 * scale;
    }
    st.check("gradient matches finite differences", ok);
  }

  {
    bool ok = true;
    for (int c = 0; c < 5 && ok; ++c) {
      const Index rows = 10 + static_cast<Index>(rng.uniform_index(20));
      const Index cols = 10 + static_cast<Index>(rng.uniform_index(20));
      const CxMatrix a = random_matrix(rng, rows, cols);
      const Index rank = 1 + static_cast<Index>(rng.uniform_index(4));
      const TruncatedSvd fast = truncated_svd(as_operator(a), rank, 1e-10);
      const oracle::DenseSvd ref = oracle::dense_svd(a);
      for (Index i = 0; i < rank && ok; ++i) {
        ok = std::abs(fast.values[i] - ref.values[i]) <= 1e-8 * ref.values[0];
      }
    }
    st.check("partial svd matches dense singular values", ok);
  }

  {
    const oracle::SamplingBoundResult res =
        oracle::sampling_bound_check(101, 64, 200, 0x1234);
    st.check("sampling bound monte carlo (rate " +
                 std::to_string(res.violation_rate) + ")",
             res.violation_rate <= 0.02);
  }

  return st.all_ok ? 0 : 2;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{
      "Spectral compressed sensing by projected gradient descent on factored "
      "Hankel liftings"};
  app.require_subcommand(1);

  ExpFlags phase_flags, noise_flags, order_flags, rank_flags;
  RecoverFlags recover_flags;

  CLI::App* recover = app.add_subcommand(
      "recover", "solve one instance (synthetic or from a JSON file)");
  recover->add_option("--n", recover_flags.n, "1-d signal length");
  recover
      ->add_option("--dims", recover_flags.dims, "axis lengths, up to 3")
      ->delimiter(',');
  recover->add_option("--r", recover_flags.rank, "model order");
  recover->add_option("--p", recover_flags.p, "sampling ratio");
  recover->add_option("--m", recover_flags.m, "sample count (wins over --p)");
  recover->add_option("--sep", recover_flags.sep, "separation factor");
  recover->add_option("--theta", recover_flags.theta, "noise level");
  recover->add_option("--mode", recover_flags.mode, "with|without");
  recover->add_option("--damping", recover_flags.damping,
                      "per-axis 1/tau ranges lo:hi[,...]");
  recover->add_option("--seed", recover_flags.seed, "instance seed");
  recover->add_option("--instance", recover_flags.instance,
                      "problem instance JSON file");
  recover->add_option("--save-instance", recover_flags.save_instance,
                      "write the generated instance JSON here for replay");
  recover->add_option("--result", recover_flags.result_path,
                      "write the solve result JSON here");
  recover->add_flag("--history", recover_flags.include_history,
                    "include per-iteration history in the result JSON");

  CLI::App* phase = app.add_subcommand(
      "phase-transition", "success-rate table over (p, r) cells");
  add_common_flags(phase, phase_flags);

  CLI::App* noise =
      app.add_subcommand("noise", "reconstruction error under additive noise");
  add_common_flags(noise, noise_flags);

  CLI::App* order = app.add_subcommand(
      "model-order", "sensitivity to under/over-estimated model order");
  add_common_flags(order, order_flags);

  CLI::App* rank = app.add_subcommand(
      "rank-heuristic", "residual curve of the rank-increasing heuristic");
  add_common_flags(rank, rank_flags);

  CLI::App* selftest = app.add_subcommand(
      "selftest", "oracle-equivalence suite for every fast path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 1;
  }

  try {
    if (recover->parsed()) return run_recover(recover_flags);
    if (selftest->parsed()) return run_selftest();

    if (phase->parsed()) {
      ExperimentSpec defaults;
      defaults.kind = ExperimentKind::phase_transition;
      defaults.dims = {63};
      defaults.threads = default_threads();
      defaults.solver.stop.max_iters = 2500;
      const ExperimentSpec spec = build_spec(phase_flags, defaults);
      const PhaseTransitionResult result = run_phase_transition(spec);
      emit(phase_flags, to_csv(spec, result), to_json(spec, result));
      return 0;
    }
    if (noise->parsed()) {
      ExperimentSpec defaults;
      defaults.kind = ExperimentKind::noise;
      defaults.dims = {127};
      defaults.r_true = 4;
      defaults.threads = default_threads();
      defaults.solver.stop.tol_x = 1e-5;
      const ExperimentSpec spec = build_spec(noise_flags, defaults);
      const NoiseResult result = run_noise(spec);
      emit(noise_flags, to_csv(spec, result), to_json(spec, result));
      return 0;
    }
    if (order->parsed()) {
      ExperimentSpec defaults;
      defaults.kind = ExperimentKind::model_order;
      defaults.dims = {63};
      defaults.r_true = 3;
      defaults.threads = default_threads();
      defaults.solver.stop.tol_x = 1e-5;
      const ExperimentSpec spec = build_spec(order_flags, defaults);
      const ModelOrderResult result = run_model_order(spec);
      emit(order_flags, to_csv(spec, result), to_json(spec, result));
      return 0;
    }
    if (rank->parsed()) {
      ExperimentSpec defaults;
      defaults.kind = ExperimentKind::rank_heuristic;
      defaults.dims = {63};
      defaults.r_true = 3;
      defaults.threads = default_threads();
      defaults.solver.stop.tol_x = 1e-5;
      const ExperimentSpec spec = build_spec(rank_flags, defaults);
      const RankHeuristicResult result = run_rank_heuristic(spec);
      emit(rank_flags, to_csv(spec, result), to_json(spec, result));
      return 0;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace hankelpgd
