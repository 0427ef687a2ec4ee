#pragma once

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmc/experiments.hpp"
#include "rmc/solver.hpp"

namespace rmc {

using json = nlohmann::json;  // keys serialize in sorted order

namespace detail {

/// Shortest round-trip decimal form; exact and deterministic.
inline std::string csv_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// UTC wall-clock stamp; excluded from the determinism contract.
inline std::string timestamp_utc() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << j.dump(2) << '\n';
}

/// Per-trial sweep rows. Header first, then one row per (grid point, method,
/// trial) in deterministic order.
inline void write_trial_csv(const std::string& path, const std::vector<TrialRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "method,snr_db,observe_fraction,trial,rmse,iterations,seconds,stop_reason\n";
  for (const TrialRow& r : rows)
    out << r.method << ',' << detail::csv_double(r.snr_db) << ','
        << detail::csv_double(r.observe_fraction) << ',' << r.trial << ','
        << detail::csv_double(r.rmse) << ',' << r.iterations << ','
        << detail::csv_double(r.seconds) << ',' << stop_reason_name(r.stop_reason)
        << '\n';
}

inline void write_mean_csv(const std::string& path, const std::vector<MeanRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "method,snr_db,observe_fraction,trials,mean_rmse,mean_iterations,mean_seconds\n";
  for (const MeanRow& r : rows)
    out << r.method << ',' << detail::csv_double(r.snr_db) << ','
        << detail::csv_double(r.observe_fraction) << ',' << r.trials << ','
        << detail::csv_double(r.mean_rmse) << ','
        << detail::csv_double(r.mean_iterations) << ','
        << detail::csv_double(r.mean_seconds) << '\n';
}

inline void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "method,case,m,n,rank,omega,trials,mean_rmse,mean_iterations,mean_seconds\n";
  for (const BenchRow& r : rows)
    out << r.method << ',' << r.case_id << ',' << r.m << ',' << r.n << ',' << r.r << ','
        << r.omega << ',' << r.trials << ',' << detail::csv_double(r.mean_rmse) << ','
        << detail::csv_double(r.mean_iterations) << ','
        << detail::csv_double(r.mean_seconds) << '\n';
}

/// JSON view of a solve report. Wall time rides along but is excluded from
/// the determinism contract.
inline json report_to_json(const SolveReport& rep) {
  json j;
  j["iterations"] = rep.iterations;
  j["stop_reason"] = stop_reason_name(rep.stop_reason);
  j["objective_history"] = rep.objective_history;
  j["surrogate_history"] = rep.surrogate_history;
  j["c_history"] = rep.c_history;
  j["final_objective"] =
      rep.objective_history.empty() ? json() : json(rep.objective_history.back());
  j["wall_time_seconds"] = rep.wall_seconds;
  return j;
}

}  // namespace rmc
