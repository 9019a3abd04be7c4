#pragma once

// Experiment pipelines behind the `plr` command line: build a ground truth
// and its observations, run one solver, sweep one parameter.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "plr/config.hpp"
#include "plr/core.hpp"
#include "plr/io.hpp"
#include "plr/metrics.hpp"
#include "plr/objectives.hpp"
#include "plr/projections.hpp"
#include "plr/sensing.hpp"
#include "plr/solvers.hpp"
#include "plr/synthdata.hpp"

namespace plr {

enum class Mode { recover, complete };
enum class Source { synthetic, matrix, image, counts };
enum class SolverKind { pmlsvt, proximal_gradient, accelerated };
enum class SweepAxis { none, m, rho, lambda, p_obs };

struct ExperimentConfig {
  Mode mode = Mode::complete;
  Source source = Source::synthetic;

  // synthetic source
  std::string synthetic = "lowrank";  // lowrank | weak_lq
  Eigen::Index rows = 16;
  Eigen::Index cols = 12;
  int rank = 2;
  double decay_q = 0.5;
  double decay_rho = 1.0;

  // file sources
  std::string matrix_file;
  std::string image_file;
  Eigen::Index patch_rows = 8;
  Eigen::Index patch_cols = 8;
  Eigen::Index crop_rows = 0;  // 0 keeps the full image
  Eigen::Index crop_cols = 0;
  std::string counts_file;
  Eigen::Index hours = 0;
  Eigen::Index days = 0;

  // ground-truth shaping, applied in this order
  int truncate_rank = 0;
  std::optional<double> min_entry;
  std::optional<double> intensity;
  double rho = 1.0;

  // observations
  std::size_t m = 1000;
  double sensing_p = 0.5;
  double p_obs = 1.0;
  std::uint64_t seed = 1;

  // feasible set
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<int> rank_budget;
  std::optional<double> entry_floor;

  // solver
  SolverKind solver = SolverKind::pmlsvt;
  SolverConfig solver_config;

  // sweep
  SweepAxis sweep_axis = SweepAxis::none;
  std::vector<double> sweep_values;
  int trials = 5;

  // output
  bool report_wall_time = true;
  std::string input_dir;
  std::string out_dir = ".";
  int threads = 0;
  std::filesystem::path base_dir;  // relative file paths resolve against this

  std::string resolve(const std::string& p) const {
    if (p.empty()) return p;
    const std::filesystem::path path(p);
    if (path.is_absolute() || base_dir.empty()) return p;
    return (base_dir / path).string();
  }

  static const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "mode", "source", "synthetic", "rows", "cols", "rank", "decay_q", "decay_rho",
        "matrix_file", "image_file", "patch_rows", "patch_cols", "crop_rows",
        "crop_cols", "counts_file", "hours", "days", "truncate_rank", "min_entry",
        "intensity", "rho", "m", "sensing_p", "p_obs", "seed", "alpha", "beta",
        "rank_budget", "entry_floor", "solver", "max_iter", "t", "eta", "lambda",
        "tol", "stop_rule", "max_backtracks", "sweep_axis", "sweep_values", "trials",
        "report_wall_time", "input_dir", "out", "threads"};
    return keys;
  }

  static ExperimentConfig from(const KeyValueConfig& kv) {
    kv.require_known(known_keys());
    ExperimentConfig c;
    const auto mode = kv.get_string("mode", "complete");
    if (mode == "recover") c.mode = Mode::recover;
    else if (mode == "complete") c.mode = Mode::complete;
    else throw ParameterError("config: mode must be recover|complete");

    const auto source = kv.get_string("source", "synthetic");
    if (source == "synthetic") c.source = Source::synthetic;
    else if (source == "matrix") c.source = Source::matrix;
    else if (source == "image") c.source = Source::image;
    else if (source == "counts") c.source = Source::counts;
    else throw ParameterError("config: source must be synthetic|matrix|image|counts");

    c.synthetic = kv.get_string("synthetic", c.synthetic);
    if (c.synthetic != "lowrank" && c.synthetic != "weak_lq") {
      throw ParameterError("config: synthetic must be lowrank|weak_lq");
    }
    c.rows = kv.get_int("rows", c.rows);
    c.cols = kv.get_int("cols", c.cols);
    c.rank = static_cast<int>(kv.get_int("rank", c.rank));
    c.decay_q = kv.get_double("decay_q", c.decay_q);
    c.decay_rho = kv.get_double("decay_rho", c.decay_rho);
    c.matrix_file = kv.get_string("matrix_file", "");
    c.image_file = kv.get_string("image_file", "");
    c.patch_rows = kv.get_int("patch_rows", c.patch_rows);
    c.patch_cols = kv.get_int("patch_cols", c.patch_cols);
    c.crop_rows = kv.get_int("crop_rows", 0);
    c.crop_cols = kv.get_int("crop_cols", 0);
    c.counts_file = kv.get_string("counts_file", "");
    c.hours = kv.get_int("hours", 0);
    c.days = kv.get_int("days", 0);
    c.truncate_rank = static_cast<int>(kv.get_int("truncate_rank", 0));
    c.min_entry = kv.get_optional_double("min_entry");
    c.intensity = kv.get_optional_double("intensity");
    c.rho = kv.get_double("rho", 1.0);
    c.m = static_cast<std::size_t>(kv.get_int("m", static_cast<std::int64_t>(c.m)));
    c.sensing_p = kv.get_double("sensing_p", 0.5);
    c.p_obs = kv.get_double("p_obs", 1.0);
    c.seed = kv.get_u64("seed", 1);
    c.alpha = kv.get_optional_double("alpha");
    c.beta = kv.get_optional_double("beta");
    if (kv.has("rank_budget")) c.rank_budget = static_cast<int>(kv.get_int("rank_budget", 1));
    c.entry_floor = kv.get_optional_double("entry_floor");

    const auto solver = kv.get_string("solver", "pmlsvt");
    if (solver == "pmlsvt") c.solver = SolverKind::pmlsvt;
    else if (solver == "pg") c.solver = SolverKind::proximal_gradient;
    else if (solver == "apg") c.solver = SolverKind::accelerated;
    else throw ParameterError("config: solver must be pmlsvt|pg|apg");

    auto& s = c.solver_config;
    s.max_iter = static_cast<int>(kv.get_int("max_iter", s.max_iter));
    s.step_recip = kv.get_double("t", s.step_recip);
    s.eta = kv.get_double("eta", s.eta);
    s.lambda = kv.get_optional_double("lambda");
    s.tol = kv.get_double("tol", s.tol);
    s.max_backtracks = static_cast<int>(kv.get_int("max_backtracks", s.max_backtracks));
    const auto rule = kv.get_string("stop_rule", "quadratic");
    if (rule == "quadratic") s.stop_rule = StopRule::quadratic_gap;
    else if (rule == "objective") s.stop_rule = StopRule::objective_change;
    else throw ParameterError("config: stop_rule must be quadratic|objective");
    s.validate();

    const auto axis = kv.get_string("sweep_axis", "none");
    if (axis == "none") c.sweep_axis = SweepAxis::none;
    else if (axis == "m") c.sweep_axis = SweepAxis::m;
    else if (axis == "rho") c.sweep_axis = SweepAxis::rho;
    else if (axis == "lambda") c.sweep_axis = SweepAxis::lambda;
    else if (axis == "p_obs") c.sweep_axis = SweepAxis::p_obs;
    else throw ParameterError("config: sweep_axis must be none|m|rho|lambda|p_obs");
    c.sweep_values = kv.get_list("sweep_values");
    c.trials = static_cast<int>(kv.get_int("trials", 5));
    if (c.trials < 1) throw ParameterError("config: trials must be >= 1");

    c.report_wall_time = kv.get_bool("report_wall_time", true);
    c.input_dir = kv.get_string("input_dir", "");
    c.out_dir = kv.get_string("out", ".");
    c.threads = static_cast<int>(kv.get_int("threads", 0));
    return c;
  }

  // Checks that referenced files exist and parameters are coherent.
  void validate() const {
    namespace fs = std::filesystem;
    auto need = [&](const std::string& key, const std::string& path) {
      if (path.empty()) throw ParameterError("config: source requires '" + key + "'");
      if (!fs::exists(resolve(path))) {
        throw ParameterError("config: file not found: " + resolve(path));
      }
    };
    switch (source) {
      case Source::matrix: need("matrix_file", matrix_file); break;
      case Source::image: need("image_file", image_file); break;
      case Source::counts: need("counts_file", counts_file); break;
      case Source::synthetic:
        if (rows < 1 || cols < 1) throw ParameterError("config: rows/cols must be >= 1");
        break;
    }
    if (!input_dir.empty() && !fs::is_directory(resolve(input_dir))) {
      throw ParameterError("config: input_dir not found: " + resolve(input_dir));
    }
    if (mode == Mode::recover && source == Source::counts) {
      throw ParameterError("config: count tables are completion-only");
    }
    if (!(p_obs > 0.0 && p_obs <= 1.0)) throw ParameterError("config: p_obs in (0, 1]");
    if (!(sensing_p > 0.0 && sensing_p < 1.0)) {
      throw ParameterError("config: sensing_p in (0, 1)");
    }
    if (m < 1) throw ParameterError("config: m must be >= 1");
    if (!(rho > 0.0)) throw ParameterError("config: rho must be > 0");
    if (sweep_axis != SweepAxis::none && sweep_values.empty()) {
      throw ParameterError("config: sweep_axis set but sweep_values empty");
    }
  }
};

// ---------------------------------------------------------------------------
// Problem construction

struct Problem {
  Mode mode = Mode::complete;
  Matrix truth;
  std::optional<Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>> truth_mask;
  FeasibleSet set;
  // recovery
  std::optional<SensingEnsemble> ensemble;
  CompressiveObservations y;
  // completion
  CompletionObservations obs;
  std::size_t init_clamped = 0;
};

inline Matrix build_truth(const ExperimentConfig& c,
                          Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>* mask,
                          CompletionObservations* table_obs) {
  Matrix M;
  bool shaped_intensity = false;
  switch (c.source) {
    case Source::synthetic:
      if (c.synthetic == "weak_lq") {
        WeakLqSpec spec;
        spec.q = c.decay_q;
        spec.rho = c.decay_rho;
        spec.total_intensity = c.intensity.value_or(1.0);
        spec.rows = c.rows;
        spec.cols = c.cols;
        spec.entry_floor = c.min_entry.value_or(0.0);
        M = gen_weak_lq(spec, derive_seed(c.seed, 0x7a)).M;
        shaped_intensity = true;
      } else {
        const FeasibleSet box(c.alpha.value_or(200.0), c.beta.value_or(1.0), 1);
        M = gen_exact_low_rank(c.rows, c.cols, c.rank, box, derive_seed(c.seed, 0x7a));
      }
      break;
    case Source::matrix:
      M = read_matrix_csv(c.resolve(c.matrix_file));
      break;
    case Source::image: {
      Matrix img = read_pgm(c.resolve(c.image_file)).pixels;
      const Eigen::Index H = c.crop_rows > 0 ? c.crop_rows : img.rows();
      const Eigen::Index W = c.crop_cols > 0 ? c.crop_cols : img.cols();
      if (H > img.rows() || W > img.cols()) {
        throw ParameterError("config: crop larger than image");
      }
      img = img.topLeftCorner(H, W).eval();
      M = image_to_patch_matrix(img, PatchLayout(H, W, c.patch_rows, c.patch_cols));
      break;
    }
    case Source::counts: {
      const CountTable t = load_count_csv(c.resolve(c.counts_file), c.hours, c.days);
      M = t.counts;
      if (mask) *mask = t.present;
      if (table_obs) *table_obs = t.as_observations();
      return M;
    }
  }
  if (c.truncate_rank > 0) M = rank_l_approx(M, c.truncate_rank);
  if (c.min_entry) M = M.cwiseMax(*c.min_entry);
  if (c.intensity && !shaped_intensity) {
    const double total = M.sum();
    if (!(total > 0.0)) throw ParameterError("config: cannot rescale a zero matrix");
    M *= *c.intensity / total;
  }
  M *= c.rho;
  return M;
}

inline FeasibleSet feasible_set_for(const ExperimentConfig& c, const Matrix& truth) {
  const Eigen::Index d = std::min(truth.rows(), truth.cols());
  const int r = c.rank_budget.value_or(
      c.truncate_rank > 0 ? c.truncate_rank
                          : (c.source == Source::synthetic ? c.rank : static_cast<int>(d)));
  if (c.mode == Mode::recover) {
    const double I = truth.sum();
    const double floor = c.entry_floor.value_or(1e-3);
    return FeasibleSet(c.alpha.value_or(I), c.beta.value_or(floor / static_cast<double>(c.m)),
                       r, I, floor);
  }
  const double beta = c.beta.value_or(1.0);
  return FeasibleSet(c.alpha.value_or(200.0), beta, r, 1.0, c.entry_floor.value_or(beta));
}

inline Problem build_problem(const ExperimentConfig& c) {
  Problem p;
  p.mode = c.mode;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask;
  CompletionObservations table;
  p.truth = build_truth(c, &mask, &table);
  if (c.source == Source::counts) p.truth_mask = mask;
  p.set = feasible_set_for(c, p.truth);
  if (c.mode == Mode::recover) {
    p.ensemble = build_sensing_ensemble(p.truth.rows(), p.truth.cols(), c.m, c.sensing_p,
                                        derive_seed(c.seed, 0xe5));
    p.y = sample_compressive_counts(*p.ensemble, p.truth, derive_seed(c.seed, 0x9c));
  } else if (c.source == Source::counts) {
    p.obs = subsample_observations(table, c.p_obs, derive_seed(c.seed, 0x0b));
  } else {
    p.obs = sample_completion_observations(
        p.truth, c.p_obs * static_cast<double>(p.truth.size()), derive_seed(c.seed, 0x0b));
  }
  return p;
}

// Rebuilds a problem from files written by cmd_synth.
inline Problem load_problem(const ExperimentConfig& c, const std::string& dir) {
  namespace fs = std::filesystem;
  Problem p;
  p.mode = c.mode;
  p.truth = read_matrix_csv((fs::path(dir) / "M.csv").string());
  p.set = feasible_set_for(c, p.truth);
  if (c.mode == Mode::recover) {
    p.ensemble = read_ensemble((fs::path(dir) / "ensemble.bin").string());
    p.y = read_counts((fs::path(dir) / "y.csv").string());
    p.y.validate(p.ensemble->size());
  } else {
    p.obs = read_observations_csv((fs::path(dir) / "obs.csv").string(), p.truth.rows(),
                                  p.truth.cols());
  }
  return p;
}

// ---------------------------------------------------------------------------
// Solving and metrics

struct Metrics {
  std::vector<std::pair<std::string, std::string>> entries;
  double normalized_error = 0.0;

  void add(const std::string& k, double v) { entries.emplace_back(k, detail::format_double(v)); }
  void add(const std::string& k, const std::string& v) { entries.emplace_back(k, v); }

  std::string format() const {
    std::string out;
    for (const auto& [k, v] : entries) out += k + "=" + v + "\n";
    return out;
  }
};

struct SolveOutcome {
  Matrix Mhat;
  SolverTrace trace;
  Metrics metrics;
  bool aborted = false;
  std::string abort_reason;
};

namespace detail {

// KL with the 0 log 0 = 0 convention; +inf when q = 0 < p.
inline double kl_nonneg(double p, double q) {
  if (p == 0.0) return q;
  if (q <= 0.0) return std::numeric_limits<double>::infinity();
  return kl_poisson(p, q);
}

}  // namespace detail

inline Metrics compute_metrics(const Problem& p, const Matrix& Mhat) {
  Metrics m;
  const Matrix& M = p.truth;
  double R = 0.0, kl = 0.0, hel = 0.0;
  std::size_t n = 0;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (p.truth_mask && !(*p.truth_mask)(i, j)) continue;
      const double d = M(i, j) - Mhat(i, j);
      R += d * d;
      kl += detail::kl_nonneg(std::max(M(i, j), 0.0), std::max(Mhat(i, j), 0.0));
      hel += hellinger_poisson(std::max(M(i, j), 0.0), std::max(Mhat(i, j), 0.0));
      ++n;
    }
  }
  const double cells = static_cast<double>(std::max<std::size_t>(n, 1));
  m.add("R", R);
  if (p.mode == Mode::recover) {
    const double I = p.set.total_intensity;
    m.normalized_error = R / (I * I);
    m.add("R_over_I2", m.normalized_error);
  } else {
    m.normalized_error = R / cells;
    m.add("R_over_d1d2", m.normalized_error);
  }
  m.add("KL", kl / cells);
  m.add("Hellinger", hel / cells);
  return m;
}

inline SolveOutcome solve_problem(const Problem& p, const ExperimentConfig& c) {
  SolveOutcome out;
  auto run = [&](const auto& f, const Matrix& X0) {
    switch (c.solver) {
      case SolverKind::pmlsvt:
        return pmlsvt(f, p.set, std::nullopt, c.solver_config);
      case SolverKind::proximal_gradient:
        return proximal_gradient(f, p.set, X0, c.solver_config);
      case SolverKind::accelerated:
        return accelerated_proximal_gradient(f, p.set, X0, c.solver_config);
    }
    throw ParameterError("unknown solver");
  };
  const auto start = std::chrono::steady_clock::now();
  try {
    SolverResult r;
    if (p.mode == Mode::recover) {
      const RecoveryObjective f(*p.ensemble, p.y, p.set);
      r = run(f, recovery_init(*p.ensemble, p.y, p.set.total_intensity));
    } else {
      const CompletionObjective f(p.obs, p.set);
      const CompletionInit init = completion_init(p.obs, p.set);
      out.metrics.add("init_clamped", std::to_string(init.clamped));
      r = run(f, init.X);
    }
    out.Mhat = std::move(r.X);
    out.trace = std::move(r.trace);
  } catch (const SolverAborted& e) {
    out.Mhat = e.last_iterate();
    out.trace = e.trace();
    out.aborted = true;
    out.abort_reason = e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Metrics m = compute_metrics(p, out.Mhat);
  for (auto& e : out.metrics.entries) m.entries.push_back(e);
  m.add("iterations", std::to_string(out.trace.iterations_run));
  m.add("terminated_by", out.aborted ? "aborted" : to_string(out.trace.terminated_by));
  if (!out.trace.objective_values.empty()) {
    m.add("final_objective", out.trace.objective_values.back());
    m.add("final_t", out.trace.step_control.back());
  }
  if (c.report_wall_time) m.add("wall_time_s", seconds);
  out.metrics = std::move(m);
  return out;
}

inline std::string format_trace_csv(const SolverTrace& t) {
  std::string out = "iter,objective,t\n";
  for (std::size_t k = 0; k < t.objective_values.size(); ++k) {
    out += std::to_string(k + 1) + "," + detail::format_double(t.objective_values[k]) +
           "," + detail::format_double(t.step_control[k]) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands

inline std::filesystem::path ensure_dir(const std::string& dir) {
  std::filesystem::create_directories(dir);
  return std::filesystem::path(dir);
}

// Writes M.csv plus obs.csv (completion) or y.csv, ensemble.bin and
// ensemble.txt (recovery).
inline void cmd_synth(const ExperimentConfig& c) {
  c.validate();
  const auto dir = ensure_dir(c.out_dir);
  const Problem p = build_problem(c);
  write_matrix_csv((dir / "M.csv").string(), p.truth);
  if (p.mode == Mode::recover) {
    write_file_atomic((dir / "y.csv").string(), format_counts(p.y));
    const auto bin = (dir / "ensemble.bin").string();
    write_ensemble(*p.ensemble, bin + ".tmp");
    std::filesystem::rename(bin + ".tmp", bin);
    const auto& e = *p.ensemble;
    write_file_atomic((dir / "ensemble.txt").string(),
                      "rows=" + std::to_string(e.rows()) + "\ncols=" +
                          std::to_string(e.cols()) + "\nm=" + std::to_string(e.size()) +
                          "\np=" + detail::format_double(e.p()) +
                          "\nseed=" + std::to_string(e.seed()) + "\n");
  } else {
    write_observations_csv((dir / "obs.csv").string(), p.obs);
  }
}

// Writes Mhat.csv, trace.csv and metrics.txt. Throws SolverAborted after
// writing partial outputs when the solver gives up.
inline SolveOutcome cmd_solve(const ExperimentConfig& c) {
  c.validate();
  const auto dir = ensure_dir(c.out_dir);
  const Problem p = c.input_dir.empty() ? build_problem(c) : load_problem(c, c.resolve(c.input_dir));
  SolveOutcome out = solve_problem(p, c);
  write_matrix_csv((dir / "Mhat.csv").string(), out.Mhat);
  write_file_atomic((dir / "trace.csv").string(), format_trace_csv(out.trace));
  write_file_atomic((dir / "metrics.txt").string(), out.metrics.format());
  if (out.aborted) throw SolverAborted(out.abort_reason, out.Mhat, out.trace);
  return out;
}

struct SweepRow {
  double value = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  int trials = 0;
};

inline ExperimentConfig with_sweep_value(ExperimentConfig c, SweepAxis axis, double v) {
  switch (axis) {
    case SweepAxis::m:
      if (!(v >= 1.0)) throw ParameterError("sweep: m must be >= 1");
      c.m = static_cast<std::size_t>(std::llround(v));
      break;
    case SweepAxis::rho: c.rho = v; break;
    case SweepAxis::lambda: c.solver_config.lambda = v; break;
    case SweepAxis::p_obs: c.p_obs = v; break;
    case SweepAxis::none: break;
  }
  return c;
}

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PLR_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// One row per sweep value (sorted): mean and sample stddev of the normalized
// error over trials with seeds seed + trial. Writes sweep.csv and
// sweep_trials.csv.
inline std::vector<SweepRow> cmd_sweep(const ExperimentConfig& c) {
  c.validate();
  if (c.sweep_axis == SweepAxis::none) throw ParameterError("sweep: sweep_axis not set");
  std::vector<double> values = c.sweep_values;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  struct Job {
    std::size_t value_index;
    int trial;
    double error = 0.0;
    int iterations = 0;
    bool aborted = false;
  };
  std::vector<Job> jobs;
  for (std::size_t v = 0; v < values.size(); ++v) {
    for (int t = 0; t < c.trials; ++t) jobs.push_back({v, t});
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      try {
        Job& job = jobs[k];
        ExperimentConfig cfg = with_sweep_value(c, c.sweep_axis, values[job.value_index]);
        cfg.seed = c.seed + static_cast<std::uint64_t>(job.trial);
        cfg.report_wall_time = false;
        const Problem p = build_problem(cfg);
        const SolveOutcome o = solve_problem(p, cfg);
        job.error = o.metrics.normalized_error;
        job.iterations = o.trace.iterations_run;
        job.aborted = o.aborted;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n_threads =
      std::max(1, std::min<int>(resolve_threads(c.threads), static_cast<int>(jobs.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  std::vector<SweepRow> rows(values.size());
  std::string trials_csv = "value,trial,seed,error,iterations,status\n";
  for (std::size_t v = 0; v < values.size(); ++v) {
    rows[v].value = values[v];
    std::vector<double> errs;
    for (const auto& job : jobs) {
      if (job.value_index != v) continue;
      errs.push_back(job.error);
      trials_csv += detail::format_double(values[v]) + "," + std::to_string(job.trial) +
                    "," + std::to_string(c.seed + static_cast<std::uint64_t>(job.trial)) +
                    "," + detail::format_double(job.error) + "," +
                    std::to_string(job.iterations) + "," +
                    (job.aborted ? "aborted" : "ok") + "\n";
    }
    double mean = 0.0;
    for (double e : errs) mean += e;
    mean /= static_cast<double>(errs.size());
    double var = 0.0;
    for (double e : errs) var += (e - mean) * (e - mean);
    rows[v].mean = mean;
    rows[v].stddev =
        errs.size() > 1 ? std::sqrt(var / static_cast<double>(errs.size() - 1)) : 0.0;
    rows[v].trials = static_cast<int>(errs.size());
  }

  const auto dir = ensure_dir(c.out_dir);
  std::string csv = "value,mean_error,stddev_error,trials\n";
  for (const auto& r : rows) {
    csv += detail::format_double(r.value) + "," + detail::format_double(r.mean) + "," +
           detail::format_double(r.stddev) + "," + std::to_string(r.trials) + "\n";
  }
  write_file_atomic((dir / "sweep.csv").string(), csv);
  write_file_atomic((dir / "sweep_trials.csv").string(), trials_csv);
  return rows;
}

}  // namespace plr
