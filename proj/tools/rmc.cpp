// rmc: robust low-rank matrix completion from incomplete, outlier-corrupted
// observations, plus synthetic benchmark sweeps.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rmc/rmc.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string out = "rmc-out";
  std::uint64_t seed = 1;
  double xi = 2.0;
  double zeta = 1e-4;
  int max_iters = 500;
  int min_iters = 2;
  int sweeps = 1;
  int warm_starts = 20;
  double hop_p = 0.6;
  std::optional<double> sigma;
  std::optional<double> gamma;
  std::optional<double> fixed_c;
};

void add_solver_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--out", f.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Master seed")->capture_default_str();
  cmd->add_option("--xi", f.xi, "Threshold multiplier on the normalized IQR")
      ->capture_default_str();
  cmd->add_option("--zeta", f.zeta, "Relative objective-change stopping tolerance")
      ->capture_default_str();
  cmd->add_option("--max-iters", f.max_iters, "Iteration cap")->capture_default_str();
  cmd->add_option("--min-iters", f.min_iters, "Iterations before the stop rule arms")
      ->capture_default_str();
  cmd->add_option("--sweeps", f.sweeps, "Factor sweeps per outer iteration")
      ->capture_default_str();
  cmd->add_option("--warm-starts", f.warm_starts,
                  "Plain factor sweeps before the threshold schedule engages")
      ->capture_default_str();
  cmd->add_option("--p", f.hop_p, "Tail exponent for the hop loss, in (0, 1]")
      ->capture_default_str();
  cmd->add_option("--sigma", f.sigma, "Fixed Welsch scale (default: tied to c)");
  cmd->add_option("--gamma", f.gamma, "Fixed Cauchy scale (default: tied to c)");
  cmd->add_option("--fixed-c", f.fixed_c, "Freeze the threshold c at this value");
}

rmc::json common_to_json(const CommonFlags& f) {
  rmc::json j;
  j["out"] = f.out;
  j["seed"] = f.seed;
  j["xi"] = f.xi;
  j["zeta"] = f.zeta;
  j["max_iters"] = f.max_iters;
  j["min_iters"] = f.min_iters;
  j["sweeps"] = f.sweeps;
  j["warm_starts"] = f.warm_starts;
  j["p"] = f.hop_p;
  j["sigma"] = f.sigma ? rmc::json(*f.sigma) : rmc::json();
  j["gamma"] = f.gamma ? rmc::json(*f.gamma) : rmc::json();
  j["fixed_c"] = f.fixed_c ? rmc::json(*f.fixed_c) : rmc::json();
  return j;
}

rmc::RunOptions to_run_options(const CommonFlags& f) {
  rmc::RunOptions opt;
  opt.xi = f.xi;
  opt.zeta = f.zeta;
  opt.max_iters = f.max_iters;
  opt.min_iters = f.min_iters;
  opt.sweeps = f.sweeps;
  opt.warm_starts = f.warm_starts;
  opt.fixed_c = f.fixed_c;
  opt.hop_p = f.hop_p;
  opt.sigma = f.sigma;
  opt.gamma = f.gamma;
  return opt;
}

void write_manifest(const std::string& out_dir, const std::string& subcommand,
                    std::uint64_t seed, rmc::json config) {
  rmc::json j;
  j["subcommand"] = subcommand;
  j["config"] = std::move(config);
  j["seed"] = seed;
  j["version"] = rmc::version_string;
  j["timestamp"] = rmc::timestamp_utc();
  rmc::write_json_file(out_dir + "/manifest.json", j);
}

rmc::LossSpec loss_from_flags(const std::string& loss, const CommonFlags& f) {
  if (loss == "how") return f.sigma ? rmc::LossSpec::how(*f.sigma) : rmc::LossSpec::how();
  if (loss == "hoc") return f.gamma ? rmc::LossSpec::hoc(*f.gamma) : rmc::LossSpec::hoc();
  if (loss == "hop") return rmc::LossSpec::hop(f.hop_p);
  if (loss == "huber") return rmc::LossSpec::huber();
  throw CLI::ValidationError("--loss must be one of how, hoc, hop, huber");
}

int cmd_solve(const std::string& input, const std::string& loss, int rank, bool dense,
              const CommonFlags& f) {
  const rmc::ObservedMatrix x = rmc::read_observed_matrix(input);

  rmc::SolverConfig cfg;
  cfg.rank = rank;
  cfg.loss = loss_from_flags(loss, f);
  cfg.xi = f.xi;
  cfg.zeta = f.zeta;
  cfg.max_iters = f.max_iters;
  cfg.min_iters = f.min_iters;
  cfg.sweeps = f.sweeps;
  cfg.warm_starts = f.warm_starts;
  cfg.fixed_c = f.fixed_c;
  cfg.seed = f.seed;

  fs::create_directories(f.out);
  rmc::json config = common_to_json(f);
  config["input"] = input;
  config["loss"] = loss;
  config["rank"] = rank;
  config["dense"] = dense;
  write_manifest(f.out, "solve", f.seed, std::move(config));

  const rmc::SolveReport rep = rmc::solve(x, cfg);

  rmc::write_dense_matrix(f.out + "/U.mtx", rep.factors.U);
  rmc::write_dense_matrix(f.out + "/V.mtx", rep.factors.V);
  if (dense) rmc::write_dense_matrix(f.out + "/completed.mtx", rep.factors.product());
  rmc::json report = rmc::report_to_json(rep);
  report["m"] = x.m();
  report["n"] = x.n();
  report["rank"] = rank;
  report["observed"] = x.size();
  rmc::write_json_file(f.out + "/report.json", report);

  if (rep.stop_reason == rmc::StopReason::rank_deficiency) {
    std::cerr << "rmc solve: aborted after " << rep.iterations
              << " iterations: factors lost full rank\n";
    return 1;
  }
  std::cout << "rmc solve: " << rmc::stop_reason_name(rep.stop_reason) << " after "
            << rep.iterations << " iterations; outputs in " << f.out << "\n";
  return 0;
}

int cmd_sweep_snr(const rmc::ExperimentSpec& exp, const std::vector<double>& grid,
                  const CommonFlags& f) {
  const auto rows = rmc::run_snr_sweep(exp, grid, to_run_options(f));
  fs::create_directories(f.out);
  rmc::write_trial_csv(f.out + "/results.csv", rows);
  rmc::write_mean_csv(f.out + "/results_mean.csv", rmc::aggregate_rows(rows));
  rmc::json config = common_to_json(f);
  config["m"] = exp.m;
  config["n"] = exp.n;
  config["rank"] = exp.r;
  config["observe_fraction"] = exp.observe_fraction;
  config["snr_grid"] = grid;
  config["tau"] = exp.tau;
  config["ratio"] = exp.variance_ratio;
  config["trials"] = exp.trials;
  write_manifest(f.out, "sweep-snr", exp.seed, std::move(config));
  std::cout << "rmc sweep-snr: " << rows.size() << " rows in " << f.out << "\n";
  return 0;
}

int cmd_sweep_fraction(const rmc::ExperimentSpec& exp, const std::vector<double>& grid,
                       const CommonFlags& f) {
  const auto rows = rmc::run_fraction_sweep(exp, grid, to_run_options(f));
  fs::create_directories(f.out);
  rmc::write_trial_csv(f.out + "/results.csv", rows);
  rmc::write_mean_csv(f.out + "/results_mean.csv", rmc::aggregate_rows(rows));
  rmc::json config = common_to_json(f);
  config["m"] = exp.m;
  config["n"] = exp.n;
  config["rank"] = exp.r;
  config["fraction_grid"] = grid;
  config["snr_db"] = exp.snr_db;
  config["tau"] = exp.tau;
  config["ratio"] = exp.variance_ratio;
  config["trials"] = exp.trials;
  write_manifest(f.out, "sweep-fraction", exp.seed, std::move(config));
  std::cout << "rmc sweep-fraction: " << rows.size() << " rows in " << f.out << "\n";
  return 0;
}

int cmd_bench(double snr_db, double fraction, double tau, double ratio, int trials,
              const CommonFlags& f) {
  const auto rows = rmc::run_bench(rmc::default_bench_cases(), snr_db, fraction, tau,
                                   ratio, trials, f.seed, to_run_options(f));
  fs::create_directories(f.out);
  rmc::write_bench_csv(f.out + "/bench.csv", rows);
  rmc::json config = common_to_json(f);
  config["snr_db"] = snr_db;
  config["observe_fraction"] = fraction;
  config["tau"] = tau;
  config["ratio"] = ratio;
  config["trials"] = trials;
  write_manifest(f.out, "bench", f.seed, std::move(config));
  std::cout << "rmc bench: " << rows.size() << " rows in " << f.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust low-rank matrix completion toolkit"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "Complete a matrix given in "
                                            "MatrixMarket coordinate format");
  std::string input;
  std::string loss = "how";
  int rank = 1;
  bool dense = false;
  CommonFlags sf;
  solve->add_option("input", input, "Observed matrix (MatrixMarket coordinate)")
      ->required();
  solve->add_option("--loss", loss, "Loss family: how, hoc, hop, huber")
      ->capture_default_str();
  solve->add_option("--rank", rank, "Factorization rank")->capture_default_str();
  solve->add_flag("--dense", dense, "Also write the dense completion");
  add_solver_flags(solve, sf);

  // sweep-snr
  auto* ssnr = app.add_subcommand("sweep-snr", "RMSE versus SNR on synthetic data");
  rmc::ExperimentSpec snr_exp;
  std::vector<double> snr_grid = {0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20};
  CommonFlags nf;
  ssnr->add_option("--m", snr_exp.m, "Rows")->capture_default_str();
  ssnr->add_option("--n", snr_exp.n, "Columns")->capture_default_str();
  ssnr->add_option("--rank", snr_exp.r, "Ground-truth and solver rank")
      ->capture_default_str();
  ssnr->add_option("--observe-fraction", snr_exp.observe_fraction,
                   "Fraction of observed cells")
      ->capture_default_str();
  ssnr->add_option("--snr-grid", snr_grid, "SNR grid in dB")->delimiter(',');
  ssnr->add_option("--tau", snr_exp.tau, "Outlier probability")->capture_default_str();
  ssnr->add_option("--ratio", snr_exp.variance_ratio, "sigma2^2 / sigma1^2")
      ->capture_default_str();
  ssnr->add_option("--trials", snr_exp.trials, "Trials per grid point")
      ->capture_default_str();
  add_solver_flags(ssnr, nf);

  // sweep-fraction
  auto* sfrac = app.add_subcommand("sweep-fraction",
                                   "RMSE versus observation percentage");
  rmc::ExperimentSpec frac_exp;
  std::vector<double> fraction_grid = {0.2, 0.3, 0.4, 0.5, 0.6};
  CommonFlags ff;
  sfrac->add_option("--m", frac_exp.m, "Rows")->capture_default_str();
  sfrac->add_option("--n", frac_exp.n, "Columns")->capture_default_str();
  sfrac->add_option("--rank", frac_exp.r, "Ground-truth and solver rank")
      ->capture_default_str();
  sfrac->add_option("--snr-db", frac_exp.snr_db, "Fixed SNR in dB")
      ->capture_default_str();
  sfrac->add_option("--fraction-grid", fraction_grid, "Observation fractions")
      ->delimiter(',');
  sfrac->add_option("--tau", frac_exp.tau, "Outlier probability")->capture_default_str();
  sfrac->add_option("--ratio", frac_exp.variance_ratio, "sigma2^2 / sigma1^2")
      ->capture_default_str();
  sfrac->add_option("--trials", frac_exp.trials, "Trials per grid point")
      ->capture_default_str();
  add_solver_flags(sfrac, ff);

  // bench
  auto* bench = app.add_subcommand("bench", "Runtime benchmark over matrix sizes");
  double bench_snr = 10.0, bench_fraction = 0.5, bench_tau = 0.1, bench_ratio = 100.0;
  int bench_trials = 10;
  CommonFlags bf;
  bench->add_option("--snr-db", bench_snr, "SNR in dB")->capture_default_str();
  bench->add_option("--observe-fraction", bench_fraction, "Fraction of observed cells")
      ->capture_default_str();
  bench->add_option("--tau", bench_tau, "Outlier probability")->capture_default_str();
  bench->add_option("--ratio", bench_ratio, "sigma2^2 / sigma1^2")
      ->capture_default_str();
  bench->add_option("--trials", bench_trials, "Trials per case")->capture_default_str();
  add_solver_flags(bench, bf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(input, loss, rank, dense, sf);
    if (ssnr->parsed()) {
      snr_exp.seed = nf.seed;
      return cmd_sweep_snr(snr_exp, snr_grid, nf);
    }
    if (sfrac->parsed()) {
      frac_exp.seed = ff.seed;
      return cmd_sweep_fraction(frac_exp, fraction_grid, ff);
    }
    if (bench->parsed()) {
      return cmd_bench(bench_snr, bench_fraction, bench_tau, bench_ratio, bench_trials,
                       bf);
    }
  } catch (const rmc::parse_error& e) {
    std::cerr << "rmc: " << e.what() << "\n";
    return 2;
  } catch (const rmc::rank_deficiency_error& e) {
    std::cerr << "rmc: " << e.what() << "\n";
    return 1;
  } catch (const rmc::degenerate_direction_error& e) {
    std::cerr << "rmc: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "rmc: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "rmc: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
