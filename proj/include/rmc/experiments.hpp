#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rmc/datagen.hpp"
#include "rmc/rng.hpp"
#include "rmc/solver.hpp"
#include "rmc/types.hpp"

namespace rmc {

/// A benchmark method: a loss family or the non-robust baseline.
struct MethodSpec {
  std::string label;
  bool robust = true;
  LossSpec loss = LossSpec::how();
};

/// Solver knobs shared across an experiment run.
struct RunOptions {
  double xi = 2.0;
  double zeta = 1e-4;
  int max_iters = 500;
  int min_iters = 2;
  double c_floor = 1e-12;
  int sweeps = 1;
  int warm_starts = 20;
  std::optional<double> fixed_c;
  double hop_p = 0.6;
  std::optional<double> sigma;  // fixed Welsch scale override
  std::optional<double> gamma;  // fixed Cauchy scale override
};

/// The standard comparison set: three robust losses plus the Frobenius
/// baseline, in fixed order.
inline std::vector<MethodSpec> default_methods(const RunOptions& opt) {
  std::vector<MethodSpec> out;
  out.push_back({"rmc-how", true,
                 opt.sigma ? LossSpec::how(*opt.sigma) : LossSpec::how()});
  out.push_back({"rmc-hoc", true,
                 opt.gamma ? LossSpec::hoc(*opt.gamma) : LossSpec::hoc()});
  out.push_back({"rmc-hop", true, LossSpec::hop(opt.hop_p)});
  out.push_back({"fnorm-baseline", false, LossSpec::huber()});
  return out;
}

/// One experiment outcome row.
struct TrialRow {
  std::string method;
  double snr_db = 0.0;
  double observe_fraction = 0.0;
  int trial = 0;
  double rmse = 0.0;
  int iterations = 0;
  double seconds = 0.0;
  StopReason stop_reason = StopReason::max_iters;
};

struct MeanRow {
  std::string method;
  double snr_db = 0.0;
  double observe_fraction = 0.0;
  int trials = 0;
  double mean_rmse = 0.0;
  double mean_iterations = 0.0;
  double mean_seconds = 0.0;
};

inline SolverConfig make_solver_config(const MethodSpec& method, int rank,
                                       std::uint64_t seed, const RunOptions& opt) {
  SolverConfig cfg;
  cfg.rank = rank;
  cfg.loss = method.loss;
  cfg.xi = opt.xi;
  cfg.zeta = opt.zeta;
  cfg.max_iters = opt.max_iters;
  cfg.min_iters = opt.min_iters;
  cfg.c_floor = opt.c_floor;
  cfg.sweeps = opt.sweeps;
  cfg.warm_starts = opt.warm_starts;
  cfg.fixed_c = opt.fixed_c;
  cfg.seed = seed;
  return cfg;
}

/// Generates one corrupted instance and solves it with one method. Everything
/// is keyed off (seed, grid_index, trial_index), so rows are reproducible no
/// matter how the grid is traversed.
inline TrialRow run_trial(const MethodSpec& method, const ExperimentSpec& exp,
                          double snr_db, double fraction, std::uint64_t grid_index,
                          int trial_index, const RunOptions& opt) {
  const std::uint64_t seed_truth = derive_seed(exp.seed, grid_index, trial_index, 0);
  const std::uint64_t seed_mask = derive_seed(exp.seed, grid_index, trial_index, 1);
  const std::uint64_t seed_noise = derive_seed(exp.seed, grid_index, trial_index, 2);
  const std::uint64_t seed_init = derive_seed(exp.seed, grid_index, trial_index, 3);

  const GroundTruth truth = gen_ground_truth(exp.m, exp.n, exp.r, seed_truth);
  const OmegaPtr omega = gen_mask(exp.m, exp.n, fraction, seed_mask);
  std::vector<double> clean = values_on_mask(truth.X, *omega);
  const double energy = frob_norm_sq_omega(clean);
  const GmmVariances var =
      calibrate_gmm(energy, omega->size(), snr_db, exp.tau, exp.variance_ratio);
  std::vector<double> noisy = add_gmm_noise(clean, var.sigma1_sq, var.sigma2_sq,
                                            exp.tau, seed_noise);
  const ObservedMatrix x(omega, std::move(noisy));

  const SolverConfig cfg = make_solver_config(method, exp.r, seed_init, opt);
  const SolveReport rep =
      method.robust ? solve(x, cfg) : solve_fnorm_baseline(x, cfg);

  TrialRow row;
  row.method = method.label;
  row.snr_db = snr_db;
  row.observe_fraction = fraction;
  row.trial = trial_index;
  row.rmse = rmse(truth.X, rep.factors);
  row.iterations = rep.iterations;
  row.seconds = rep.wall_seconds;
  row.stop_reason = rep.stop_reason;
  return row;
}

/// RMSE versus SNR sweep at fixed observation fraction. Rows come out in
/// (snr, method, trial) order.
inline std::vector<TrialRow> run_snr_sweep(const ExperimentSpec& exp,
                                           const std::vector<double>& snr_grid,
                                           const RunOptions& opt) {
  exp.validate();
  const std::vector<MethodSpec> methods = default_methods(opt);
  std::vector<TrialRow> rows;
  rows.reserve(snr_grid.size() * methods.size() * static_cast<std::size_t>(exp.trials));
  for (std::size_t g = 0; g < snr_grid.size(); ++g)
    for (const MethodSpec& method : methods)
      for (int t = 0; t < exp.trials; ++t)
        rows.push_back(
            run_trial(method, exp, snr_grid[g], exp.observe_fraction, g, t, opt));
  return rows;
}

/// RMSE versus observation fraction at fixed SNR.
inline std::vector<TrialRow> run_fraction_sweep(const ExperimentSpec& exp,
                                                const std::vector<double>& fraction_grid,
                                                const RunOptions& opt) {
  exp.validate();
  const std::vector<MethodSpec> methods = default_methods(opt);
  std::vector<TrialRow> rows;
  rows.reserve(fraction_grid.size() * methods.size() *
               static_cast<std::size_t>(exp.trials));
  for (std::size_t g = 0; g < fraction_grid.size(); ++g)
    for (const MethodSpec& method : methods)
      for (int t = 0; t < exp.trials; ++t)
        rows.push_back(
            run_trial(method, exp, exp.snr_db, fraction_grid[g], g, t, opt));
  return rows;
}

/// Mean aggregation over trials, preserving first-seen (grid, method) order.
inline std::vector<MeanRow> aggregate_rows(const std::vector<TrialRow>& rows) {
  std::vector<MeanRow> out;
  std::map<std::pair<std::pair<double, double>, std::string>, std::size_t> where;
  for (const TrialRow& r : rows) {
    const auto key = std::make_pair(std::make_pair(r.snr_db, r.observe_fraction), r.method);
    auto it = where.find(key);
    if (it == where.end()) {
      where.emplace(key, out.size());
      MeanRow m;
      m.method = r.method;
      m.snr_db = r.snr_db;
      m.observe_fraction = r.observe_fraction;
      out.push_back(m);
      it = where.find(key);
    }
    MeanRow& m = out[it->second];
    ++m.trials;
    m.mean_rmse += r.rmse;
    m.mean_iterations += r.iterations;
    m.mean_seconds += r.seconds;
  }
  for (MeanRow& m : out) {
    m.mean_rmse /= m.trials;
    m.mean_iterations /= m.trials;
    m.mean_seconds /= m.trials;
  }
  return out;
}

/// Runtime benchmark case: one matrix geometry.
struct BenchCase {
  int id = 0;
  int m = 0;
  int n = 0;
  int r = 0;
};

/// The standard four geometries, smallest to largest.
inline std::vector<BenchCase> default_bench_cases() {
  return {{1, 300, 200, 5}, {2, 600, 400, 10}, {3, 900, 600, 15}, {4, 1200, 800, 20}};
}

struct BenchRow {
  std::string method;
  int case_id = 0;
  int m = 0;
  int n = 0;
  int r = 0;
  std::size_t omega = 0;
  int trials = 0;
  double mean_rmse = 0.0;
  double mean_iterations = 0.0;
  double mean_seconds = 0.0;
};

/// Mean runtime per method per case at the given SNR and fraction.
inline std::vector<BenchRow> run_bench(const std::vector<BenchCase>& cases,
                                       double snr_db, double fraction, double tau,
                                       double ratio, int trials, std::uint64_t seed,
                                       const RunOptions& opt) {
  const std::vector<MethodSpec> methods = default_methods(opt);
  std::vector<BenchRow> out;
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const BenchCase& bc = cases[ci];
    ExperimentSpec exp;
    exp.m = bc.m;
    exp.n = bc.n;
    exp.r = bc.r;
    exp.observe_fraction = fraction;
    exp.snr_db = snr_db;
    exp.tau = tau;
    exp.variance_ratio = ratio;
    exp.trials = trials;
    exp.seed = seed;
    exp.validate();
    for (const MethodSpec& method : methods) {
      BenchRow row;
      row.method = method.label;
      row.case_id = bc.id;
      row.m = bc.m;
      row.n = bc.n;
      row.r = bc.r;
      row.trials = trials;
      for (int t = 0; t < trials; ++t) {
        const TrialRow tr = run_trial(method, exp, snr_db, fraction, ci, t, opt);
        row.mean_rmse += tr.rmse;
        row.mean_iterations += tr.iterations;
        row.mean_seconds += tr.seconds;
      }
      row.omega = static_cast<std::size_t>(
          std::llround(fraction * static_cast<double>(bc.m) * static_cast<double>(bc.n)));
      row.mean_rmse /= trials;
      row.mean_iterations /= trials;
      row.mean_seconds /= trials;
      out.push_back(row);
    }
  }
  return out;
}

}  // namespace rmc
