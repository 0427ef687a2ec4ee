#pragma once

#include <Eigen/Cholesky>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "rmc/errors.hpp"
#include "rmc/types.hpp"

namespace rmc {

/// Gram matrices below this reciprocal-condition estimate are treated as
/// rank deficient rather than silently regularized.
inline constexpr double kGramRcondFloor = 1e-12;

namespace detail {

/// (A * B)_{ij} for (i, j) in omega, one dot product per observed cell.
/// Never forms the dense m-by-n product.
inline std::vector<double> masked_product(const MatU& A, const MatV& B,
                                          const OmegaIndex& omega) {
  if (A.rows() != omega.m || B.cols() != omega.n || A.cols() != B.rows())
    throw std::invalid_argument("masked_product: dimension mismatch");
  const std::size_t nnz = omega.size();
  std::vector<double> out(nnz);
  for (std::size_t k = 0; k < nnz; ++k)
    out[k] = A.row(omega.rows[k]).dot(B.col(omega.cols[k]));
  return out;
}

/// R_embedded * V^T where R is sparse on omega; m-by-r accumulation.
inline MatU grad_u(const SparseResidual& r, const MatV& V) {
  const OmegaIndex& omega = *r.omega;
  MatU g = MatU::Zero(omega.m, V.rows());
  for (std::size_t k = 0; k < r.values.size(); ++k)
    g.row(omega.rows[k]) += r.values[k] * V.col(omega.cols[k]).transpose();
  return g;
}

/// U^T * R_embedded; r-by-n accumulation.
inline MatV grad_v(const SparseResidual& r, const MatU& U) {
  const OmegaIndex& omega = *r.omega;
  MatV g = MatV::Zero(U.cols(), omega.n);
  for (std::size_t k = 0; k < r.values.size(); ++k)
    g.col(omega.cols[k]) += r.values[k] * U.row(omega.rows[k]).transpose();
  return g;
}

/// Cholesky of an r-by-r Gram matrix with a rank-deficiency gate.
inline Eigen::LLT<Eigen::MatrixXd> gram_llt(const Eigen::MatrixXd& gram,
                                            const char* which) {
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success || llt.rcond() < kGramRcondFloor)
    throw rank_deficiency_error(std::string("singular Gram matrix ") + which +
                                " (factor lost full rank)");
  return llt;
}

}  // namespace detail

/// Sum of squares of values living on Omega; sequential in canonical order.
inline double frob_norm_sq_omega(std::span<const double> values) {
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return acc;
}

/// Entrywise (U V)_{ij} over the observed cells; cost O(|Omega| r).
inline SparseResidual product_on_omega(const FactorPair& f, const OmegaPtr& omega) {
  return {omega, detail::masked_product(f.U, f.V, *omega)};
}

/// X - UV on Omega.
inline SparseResidual residual(const ObservedMatrix& x, const FactorPair& f) {
  std::vector<double> vals = detail::masked_product(f.U, f.V, *x.omega());
  for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = x.value(k) - vals[k];
  return {x.omega(), std::move(vals)};
}

/// X - UV - S on Omega; S must live on the same index set.
inline SparseResidual residual(const ObservedMatrix& x, const FactorPair& f,
                               const SparseResidual& s) {
  if (!same_omega(x.omega(), s.omega))
    throw std::invalid_argument("residual: mismatched index sets");
  std::vector<double> vals = detail::masked_product(f.U, f.V, *x.omega());
  for (std::size_t k = 0; k < vals.size(); ++k)
    vals[k] = x.value(k) - vals[k] - s.values[k];
  return {x.omega(), std::move(vals)};
}

/// Gradients of 1/2 ||H_Omega - (UV)_Omega||_F^2 in the ascent-of-fit sense
/// (positive residual), and the same gradients preconditioned by the factor
/// Grams. Throws rank_deficiency_error when either r-by-r Gram is singular.
struct GradDirections {
  MatU grad_u;  // R V^T
  MatV grad_v;  // U^T R
  MatU dir_u;   // R V^T (V V^T)^{-1}
  MatV dir_v;   // (U^T U)^{-1} U^T R
};

inline GradDirections grad_directions(const SparseResidual& h, const FactorPair& f) {
  if (!h.omega || h.omega->m != f.rows() || h.omega->n != f.cols())
    throw std::invalid_argument("grad_directions: dimension mismatch");
  GradDirections g;
  g.grad_u = detail::grad_u(h, f.V);
  g.grad_v = detail::grad_v(h, f.U);
  const Eigen::MatrixXd gram_v = f.V * f.V.transpose();
  const Eigen::MatrixXd gram_u = f.U.transpose() * f.U;
  auto llt_v = detail::gram_llt(gram_v, "V V^T");
  auto llt_u = detail::gram_llt(gram_u, "U^T U");
  g.dir_u = llt_v.solve(g.grad_u.transpose()).transpose();
  g.dir_v = llt_u.solve(g.grad_v);
  return g;
}

namespace detail {

inline double step_size(double numerator, double denominator, bool dir_is_zero) {
  if (denominator > 0.0) return numerator / denominator;
  if (dir_is_zero) return 0.0;
  throw degenerate_direction_error(
      "scaled direction vanishes on the observed set; cannot line-search");
}

}  // namespace detail

/// Exact line-search steps along the scaled directions. The numerator is the
/// full-array inner product <grad, dir>; the denominator masks the direction
/// image (dir_u V, resp. U dir_v) to Omega before the squared Frobenius norm.
struct StepSizes {
  double mu_u = 0.0;
  double mu_v = 0.0;
};

inline StepSizes sasd_step_sizes(const GradDirections& g, const FactorPair& f,
                                 const OmegaPtr& omega) {
  const double num_u = g.grad_u.cwiseProduct(g.dir_u).sum();
  const double num_v = g.grad_v.cwiseProduct(g.dir_v).sum();
  const double den_u =
      frob_norm_sq_omega(detail::masked_product(g.dir_u, f.V, *omega));
  const double den_v =
      frob_norm_sq_omega(detail::masked_product(f.U, g.dir_v, *omega));
  StepSizes mu;
  mu.mu_u = detail::step_size(num_u, den_u, g.dir_u.isZero(0.0));
  mu.mu_v = detail::step_size(num_v, den_v, g.dir_v.isZero(0.0));
  return mu;
}

}  // namespace rmc
