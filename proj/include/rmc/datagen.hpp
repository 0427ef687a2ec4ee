#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "rmc/rng.hpp"
#include "rmc/types.hpp"

namespace rmc {

/// One synthetic-experiment configuration.
struct ExperimentSpec {
  int m = 300;
  int n = 200;
  int r = 5;
  double observe_fraction = 0.3;
  double snr_db = 10.0;
  double tau = 0.1;              // outlier probability per observed entry
  double variance_ratio = 100.0; // sigma2^2 / sigma1^2
  int trials = 10;
  std::uint64_t seed = 1;

  void validate() const {
    if (m <= 0 || n <= 0) throw std::invalid_argument("ExperimentSpec: bad dimensions");
    if (r < 1 || r > std::min(m, n))
      throw std::invalid_argument("ExperimentSpec: rank must lie in [1, min(m, n)]");
    if (!(observe_fraction > 0.0) || observe_fraction > 1.0)
      throw std::invalid_argument("ExperimentSpec: observe_fraction must lie in (0, 1]");
    if (!(tau >= 0.0) || tau >= 1.0)
      throw std::invalid_argument("ExperimentSpec: tau must lie in [0, 1)");
    if (!(variance_ratio > 0.0))
      throw std::invalid_argument("ExperimentSpec: variance_ratio must be > 0");
    if (trials < 1) throw std::invalid_argument("ExperimentSpec: trials must be >= 1");
  }
};

struct GroundTruth {
  Eigen::MatrixXd X;   // dense m-by-n truth
  FactorPair factors;  // the generating factors
};

/// X = U V with i.i.d. standard Gaussian factor entries; rank r almost surely.
inline GroundTruth gen_ground_truth(int m, int n, int r, std::uint64_t seed) {
  if (m <= 0 || n <= 0 || r < 1 || r > std::min(m, n))
    throw std::invalid_argument("gen_ground_truth: bad dimensions");
  Rng rng(seed);
  MatU u(m, r);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < r; ++k) u(i, k) = rng.normal();
  MatV v(r, n);
  for (int k = 0; k < r; ++k)
    for (int j = 0; j < n; ++j) v(k, j) = rng.normal();
  GroundTruth gt;
  gt.X = u * v;
  gt.factors = FactorPair(std::move(u), std::move(v));
  return gt;
}

/// Uniform observation mask: round(fraction * m * n) distinct cells drawn
/// without replacement, returned in canonical row-major order.
inline OmegaPtr gen_mask(int m, int n, double fraction, std::uint64_t seed) {
  if (m <= 0 || n <= 0) throw std::invalid_argument("gen_mask: bad dimensions");
  if (!(fraction > 0.0) || fraction > 1.0)
    throw std::invalid_argument("gen_mask: fraction must lie in (0, 1]");
  const auto total = static_cast<std::uint64_t>(m) * static_cast<std::uint64_t>(n);
  const auto count = static_cast<std::uint64_t>(
      std::llround(fraction * static_cast<double>(total)));
  if (count < 1) throw std::invalid_argument("gen_mask: empty mask");

  std::vector<std::uint64_t> cells(total);
  std::iota(cells.begin(), cells.end(), std::uint64_t{0});
  Rng rng(seed);
  for (std::uint64_t k = 0; k < count; ++k) {
    const std::uint64_t pick = k + rng.below(total - k);
    std::swap(cells[k], cells[pick]);
  }
  cells.resize(count);
  std::sort(cells.begin(), cells.end());

  auto idx = std::make_shared<OmegaIndex>();
  idx->m = m;
  idx->n = n;
  idx->rows.reserve(count);
  idx->cols.reserve(count);
  for (std::uint64_t cell : cells) {
    idx->rows.push_back(static_cast<std::int32_t>(cell / static_cast<std::uint64_t>(n)));
    idx->cols.push_back(static_cast<std::int32_t>(cell % static_cast<std::uint64_t>(n)));
  }
  return idx;
}

/// Extracts X at the observed cells.
inline std::vector<double> values_on_mask(const Eigen::MatrixXd& x, const OmegaIndex& omega) {
  if (x.rows() != omega.m || x.cols() != omega.n)
    throw std::invalid_argument("values_on_mask: dimension mismatch");
  std::vector<double> out(omega.size());
  for (std::size_t k = 0; k < omega.size(); ++k)
    out[k] = x(omega.rows[k], omega.cols[k]);
  return out;
}

struct GmmVariances {
  double sigma1_sq = 0.0;
  double sigma2_sq = 0.0;
};

/// Mixture variances hitting a target SNR exactly:
/// SNR = ||X_Omega||_F^2 / (|Omega| ((1 - tau) sigma1^2 + tau sigma2^2))
/// with sigma2^2 = ratio * sigma1^2 and the SNR given in dB.
inline GmmVariances calibrate_gmm(double x_omega_energy, std::size_t omega_size,
                                  double snr_db, double tau, double ratio) {
  if (!(x_omega_energy > 0.0))
    throw std::invalid_argument("calibrate_gmm: observed energy must be > 0");
  const double snr_lin = std::pow(10.0, snr_db / 10.0);
  const double mix = (1.0 - tau) + tau * ratio;
  const double s1 = x_omega_energy / (static_cast<double>(omega_size) * snr_lin * mix);
  return {s1, ratio * s1};
}

/// Two-component zero-mean Gaussian mixture noise: with probability tau an
/// entry draws from the high-variance component. Noise exists only on Omega.
inline std::vector<double> add_gmm_noise(std::span<const double> x_omega,
                                         double sigma1_sq, double sigma2_sq,
                                         double tau, std::uint64_t seed) {
  if (!(sigma1_sq >= 0.0) || !(sigma2_sq >= 0.0))
    throw std::invalid_argument("add_gmm_noise: variances must be >= 0");
  Rng rng(seed);
  const double s1 = std::sqrt(sigma1_sq);
  const double s2 = std::sqrt(sigma2_sq);
  std::vector<double> out(x_omega.begin(), x_omega.end());
  for (double& v : out) {
    const bool outlier = rng.uniform01() < tau;
    v += (outlier ? s2 : s1) * rng.normal();
  }
  return out;
}

/// ||X - U V||_F / sqrt(m n) over all cells, observed or not.
inline double rmse(const Eigen::MatrixXd& x_true, const FactorPair& m_hat) {
  if (x_true.rows() != m_hat.rows() || x_true.cols() != m_hat.cols())
    throw std::invalid_argument("rmse: dimension mismatch");
  const double dist = (x_true - m_hat.U * m_hat.V).norm();
  return dist / std::sqrt(static_cast<double>(x_true.size()));
}

}  // namespace rmc
