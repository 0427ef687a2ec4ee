#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rmc/losses.hpp"
#include "rmc/masked.hpp"
#include "rmc/rng.hpp"
#include "rmc/types.hpp"

namespace rmc {

struct SolverConfig {
  int rank = 1;
  LossSpec loss = LossSpec::how();
  double xi = 2.0;        // threshold multiplier on the normalized IQR
  double zeta = 1e-4;     // relative objective-change stopping tolerance
  int max_iters = 500;
  int min_iters = 2;
  std::uint64_t seed = 0;
  double c_floor = 1e-12;            // lower clamp on the threshold schedule
  int sweeps = 1;                    // factor-update sweeps per outer iteration
  int warm_starts = 20;              // plain SASD sweeps before the schedule engages
  std::optional<double> fixed_c;     // freeze c, disabling the IQR schedule

  void validate() const {
    loss.validate();
    if (rank < 1) throw std::invalid_argument("SolverConfig: rank must be >= 1");
    if (!(xi > 0.0)) throw std::invalid_argument("SolverConfig: xi must be > 0");
    if (!(zeta > 0.0)) throw std::invalid_argument("SolverConfig: zeta must be > 0");
    if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
    if (min_iters < 0) throw std::invalid_argument("SolverConfig: min_iters must be >= 0");
    if (!(c_floor >= 0.0)) throw std::invalid_argument("SolverConfig: c_floor must be >= 0");
    if (sweeps < 1) throw std::invalid_argument("SolverConfig: sweeps must be >= 1");
    if (warm_starts < 0)
      throw std::invalid_argument("SolverConfig: warm_starts must be >= 0");
    if (fixed_c && !(*fixed_c > 0.0))
      throw std::invalid_argument("SolverConfig: fixed_c must be > 0");
  }
};

enum class StopReason { tolerance, max_iters, rank_deficiency };

inline const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::tolerance: return "tolerance";
    case StopReason::max_iters: return "max_iters";
    case StopReason::rank_deficiency: return "rank_deficiency";
  }
  return "?";
}

/// Everything the loop carries between iterations. Histories hold one record
/// per completed iteration; c_history stays empty for the Frobenius baseline.
struct SolverState {
  FactorPair factors;
  SparseResidual s;
  double c = std::numeric_limits<double>::infinity();
  std::vector<double> objective_history;
  std::vector<double> surrogate_history;
  std::vector<double> c_history;
  int iter = 0;
};

struct SolveReport {
  FactorPair factors;
  int iterations = 0;
  StopReason stop_reason = StopReason::max_iters;
  std::vector<double> objective_history;
  std::vector<double> surrogate_history;
  std::vector<double> c_history;
  double wall_seconds = 0.0;
};

/// Gaussian factors scaled to the observed data energy: entries are
/// N(0, 1) draws times sqrt(nu / r), where nu estimates the per-entry energy
/// robustly as median(X^2) / 0.4549 (the chi^2_1 median), so a handful of
/// gross outliers cannot inflate the starting scale. Identical seeds give
/// bit-identical factors.
inline FactorPair init_factors(const ObservedMatrix& x, int rank, std::uint64_t seed) {
  if (rank < 1 || rank > std::min(x.m(), x.n()))
    throw std::invalid_argument("init_factors: rank must lie in [1, min(m, n)]");
  std::vector<double> squares(x.values());
  for (double& v : squares) v = v * v;
  const auto mid = squares.begin() + static_cast<std::ptrdiff_t>(squares.size() / 2);
  std::nth_element(squares.begin(), mid, squares.end());
  const double nu = *mid / 0.4549364;
  const double scale = std::sqrt(nu / static_cast<double>(rank));
  Rng rng(seed);
  MatU u(x.m(), rank);
  for (int i = 0; i < x.m(); ++i)
    for (int k = 0; k < rank; ++k) u(i, k) = scale * rng.normal();
  MatV v(rank, x.n());
  for (int k = 0; k < rank; ++k)
    for (int j = 0; j < x.n(); ++j) v(k, j) = scale * rng.normal();
  return FactorPair(std::move(u), std::move(v));
}

namespace detail {

/// Quantile with linear interpolation between order statistics at 0-based
/// position q * (N - 1). Permutes buf.
inline double interpolated_quantile(std::vector<double>& buf, double q) {
  const double pos = q * static_cast<double>(buf.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  std::nth_element(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.end());
  const double vlo = buf[lo];
  if (frac == 0.0) return vlo;
  const double vhi = *std::min_element(buf.begin() + static_cast<std::ptrdiff_t>(lo) + 1,
                                       buf.end());
  return vlo + frac * (vhi - vlo);
}

}  // namespace detail

/// IQR / 1.349: a robust scale estimate that is ~1 for standard Gaussian data.
inline double normalized_iqr(std::span<const double> values) {
  if (values.size() < 2)
    throw std::invalid_argument("normalized_iqr: need at least 2 values");
  std::vector<double> buf(values.begin(), values.end());
  const double q1 = detail::interpolated_quantile(buf, 0.25);
  const double q3 = detail::interpolated_quantile(buf, 0.75);
  return (q3 - q1) / 1.349;
}

/// Threshold schedule c <- max(c_floor, min(xi * niqr(d), previous c)).
/// The previous c is +inf on the first iteration. Fewer than 2 residual
/// values clamp straight to the floor.
inline double update_c(double c_prev, std::span<const double> d_values, double xi,
                       double c_floor) {
  const double d = d_values.size() >= 2 ? normalized_iqr(d_values) : 0.0;
  return std::max(c_floor, std::min(xi * d, c_prev));
}

/// Outlier step: entrywise shrinkage of D = X - UV over Omega. Entries with
/// |D| <= c come out exactly zero.
inline SparseResidual s_step(const ObservedMatrix& x, const FactorPair& f,
                             const LossSpec& loss, double c) {
  SparseResidual d = residual(x, f);
  for (double& v : d.values) v = shrink(loss, c, v);
  return d;
}

/// One SASD sweep on h(U, V) = 1/2 ||H_Omega - (UV)_Omega||_F^2 with
/// H = X - S: exact line search on U along the (V V^T)^{-1}-scaled gradient,
/// then the same on V using the updated U. Never increases h.
inline FactorPair uv_step(const ObservedMatrix& x, const SparseResidual& s,
                          FactorPair f) {
  const OmegaPtr& omega = x.omega();
  {
    const SparseResidual r = residual(x, f, s);
    const MatU g = detail::grad_u(r, f.V);
    const auto llt = detail::gram_llt(f.V * f.V.transpose(), "V V^T");
    const MatU d = llt.solve(g.transpose()).transpose();
    const double num = g.cwiseProduct(d).sum();
    const double den = frob_norm_sq_omega(detail::masked_product(d, f.V, *omega));
    const double mu = detail::step_size(num, den, d.isZero(0.0));
    f.U += mu * d;
  }
  {
    const SparseResidual r = residual(x, f, s);
    const MatV g = detail::grad_v(r, f.U);
    const auto llt = detail::gram_llt(f.U.transpose() * f.U, "U^T U");
    const MatV d = llt.solve(g);
    const double num = g.cwiseProduct(d).sum();
    const double den = frob_norm_sq_omega(detail::masked_product(f.U, d, *omega));
    const double mu = detail::step_size(num, den, d.isZero(0.0));
    f.V += mu * d;
  }
  return f;
}

/// E = sum of the hybrid loss over the observed residual X - UV.
inline double objective(const ObservedMatrix& x, const FactorPair& f,
                        const LossSpec& loss, double c) {
  const SparseResidual d = residual(x, f);
  double acc = 0.0;
  for (double v : d.values) acc += loss_value(loss, c, v);
  return acc;
}

namespace detail {

inline SolveReport solve_impl(const ObservedMatrix& x, const SolverConfig& cfg,
                              bool robust) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  SolverState st;
  st.factors = init_factors(x, cfg.rank, cfg.seed);
  st.s = SparseResidual{x.omega(), std::vector<double>(x.size(), 0.0)};
  if (cfg.fixed_c) st.c = *cfg.fixed_c;

  StopReason stop = StopReason::max_iters;
  const double eps = std::numeric_limits<double>::epsilon();

  // Warm-up sweeps before the threshold schedule engages. Starting the
  // schedule from the raw random init mis-classifies the heavy tail of the
  // initial misfit as outliers and strands the iterate at a spurious
  // stationary point, so the first IQR must be measured on a settled fit.
  // The warm sweeps are plain SASD except for a redescending clip far out at
  // 10x the initial residual scale: residuals inside it keep full pull, while
  // gross spikes exert none and cannot be chased into the factors. The guard
  // is measured once, up front; re-measuring it on a converged fit would
  // chase stragglers of the shrinking residual instead of true spikes.
  try {
    double guard = std::numeric_limits<double>::infinity();
    if (robust && cfg.warm_starts > 0 && x.size() >= 2) {
      const SparseResidual d0 = residual(x, st.factors);
      const double niqr = normalized_iqr(d0.values);
      if (niqr > 0.0) guard = 10.0 * niqr;
    }
    for (int k = 0; k < cfg.warm_starts; ++k) {
      if (robust && std::isfinite(guard)) {
        const SparseResidual d = residual(x, st.factors);
        for (std::size_t e = 0; e < d.values.size(); ++e)
          st.s.values[e] = shrink(LossSpec::how(), guard, d.values[e]);
      }
      st.factors = uv_step(x, st.s, st.factors);
    }
    if (robust) std::fill(st.s.values.begin(), st.s.values.end(), 0.0);
  } catch (const rank_deficiency_error&) {
    SolveReport rep;
    rep.factors = std::move(st.factors);
    rep.stop_reason = StopReason::rank_deficiency;
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  }

  for (int k = 1; k <= cfg.max_iters; ++k) {
    double phi_sum = 0.0;
    if (robust) {
      SparseResidual d = residual(x, st.factors);
      if (!cfg.fixed_c) st.c = update_c(st.c, d.values, cfg.xi, cfg.c_floor);
      for (std::size_t e = 0; e < d.values.size(); ++e) {
        const double dv = d.values[e];
        const double sv = shrink(cfg.loss, st.c, dv);
        st.s.values[e] = sv;
        const double q = dv - sv;
        phi_sum += loss_value(cfg.loss, st.c, dv) - 0.5 * q * q;
      }
    }

    try {
      for (int sweep = 0; sweep < cfg.sweeps; ++sweep)
        st.factors = uv_step(x, st.s, st.factors);
    } catch (const rank_deficiency_error&) {
      stop = StopReason::rank_deficiency;
      break;
    }

    // Record E_k and the surrogate L(U, V, S) from one masked product.
    const SparseResidual d_after = residual(x, st.factors);
    double e_k = 0.0;
    double quad = 0.0;
    for (std::size_t e = 0; e < d_after.values.size(); ++e) {
      const double dv = d_after.values[e];
      e_k += robust ? loss_value(cfg.loss, st.c, dv) : 0.5 * dv * dv;
      const double r = dv - st.s.values[e];
      quad += 0.5 * r * r;
    }
    st.objective_history.push_back(e_k);
    st.surrogate_history.push_back(quad + phi_sum);
    if (robust) st.c_history.push_back(st.c);
    st.iter = k;

    const std::size_t h = st.objective_history.size();
    if (k >= cfg.min_iters && h >= 2) {
      const double prev = st.objective_history[h - 2];
      const double rel = std::abs(e_k - prev) / std::max(prev, eps);
      if (rel < cfg.zeta) {
        stop = StopReason::tolerance;
        break;
      }
    }
  }

  SolveReport rep;
  rep.factors = std::move(st.factors);
  rep.iterations = st.iter;
  rep.stop_reason = stop;
  rep.objective_history = std::move(st.objective_history);
  rep.surrogate_history = std::move(st.surrogate_history);
  rep.c_history = std::move(st.c_history);
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace detail

/// Robust matrix completion: after a short plain-SASD warm-up, alternates the
/// shrinkage S-step with SASD factor sweeps on H = X - S, driving the
/// threshold c down by the normalized-IQR schedule. Stops when the relative
/// objective change falls below zeta (never before two iterations), at
/// max_iters, or on factor rank deficiency (which yields a partial report
/// rather than a throw).
inline SolveReport solve(const ObservedMatrix& x, const SolverConfig& cfg) {
  return detail::solve_impl(x, cfg, true);
}

/// Non-robust baseline: the same loop with S pinned to zero and no threshold
/// schedule, i.e. plain SASD on min 1/2 ||X_Omega - (UV)_Omega||_F^2.
inline SolveReport solve_fnorm_baseline(const ObservedMatrix& x,
                                        const SolverConfig& cfg) {
  return detail::solve_impl(x, cfg, false);
}

}  // namespace rmc
