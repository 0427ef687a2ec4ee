#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rmc {

// U rows and V columns are the hot vectors in every masked kernel, so U is
// stored row-major and V column-major; both dot products then run over
// contiguous memory.
using MatU = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatV = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;

/// The index set Omega of observed cells, row-major sorted and duplicate-free.
/// Shared (immutably) by every value vector living on the same mask.
struct OmegaIndex {
  int m = 0;
  int n = 0;
  std::vector<std::int32_t> rows;
  std::vector<std::int32_t> cols;

  std::size_t size() const { return rows.size(); }
};

using OmegaPtr = std::shared_ptr<const OmegaIndex>;

struct Entry {
  int i = 0;
  int j = 0;
  double value = 0.0;
};

/// Values of a residual (X - UV - S, or H - UV) restricted to a shared Omega.
struct SparseResidual {
  OmegaPtr omega;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

inline bool same_omega(const OmegaPtr& a, const OmegaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->m == b->m && a->n == b->n && a->rows == b->rows && a->cols == b->cols;
}

/// A coordinate-sparse view of the observed data X_Omega.
class ObservedMatrix {
 public:
  ObservedMatrix(OmegaPtr omega, std::vector<double> values)
      : omega_(std::move(omega)), values_(std::move(values)) {
    if (!omega_ || values_.size() != omega_->size())
      throw std::invalid_argument("ObservedMatrix: values do not match the index set");
  }

  /// Validates, sorts row-major, and rejects duplicates or out-of-range cells.
  static ObservedMatrix from_entries(int m, int n, std::vector<Entry> entries) {
    if (m <= 0 || n <= 0)
      throw std::invalid_argument("ObservedMatrix: dimensions must be positive");
    if (entries.empty())
      throw std::invalid_argument("ObservedMatrix: need at least one observed entry");
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    auto idx = std::make_shared<OmegaIndex>();
    idx->m = m;
    idx->n = n;
    idx->rows.reserve(entries.size());
    idx->cols.reserve(entries.size());
    std::vector<double> vals;
    vals.reserve(entries.size());
    int prev_i = -1, prev_j = -1;
    for (const Entry& e : entries) {
      if (e.i < 0 || e.i >= m || e.j < 0 || e.j >= n)
        throw std::invalid_argument("ObservedMatrix: index (" + std::to_string(e.i) +
                                    ", " + std::to_string(e.j) + ") out of range");
      if (e.i == prev_i && e.j == prev_j)
        throw std::invalid_argument("ObservedMatrix: duplicate index (" +
                                    std::to_string(e.i) + ", " + std::to_string(e.j) + ")");
      if (!std::isfinite(e.value))
        throw std::invalid_argument("ObservedMatrix: non-finite value at (" +
                                    std::to_string(e.i) + ", " + std::to_string(e.j) + ")");
      prev_i = e.i;
      prev_j = e.j;
      idx->rows.push_back(static_cast<std::int32_t>(e.i));
      idx->cols.push_back(static_cast<std::int32_t>(e.j));
      vals.push_back(e.value);
    }
    return ObservedMatrix(std::move(idx), std::move(vals));
  }

  int m() const { return omega_->m; }
  int n() const { return omega_->n; }
  std::size_t size() const { return values_.size(); }
  int row(std::size_t k) const { return omega_->rows[k]; }
  int col(std::size_t k) const { return omega_->cols[k]; }
  double value(std::size_t k) const { return values_[k]; }
  const std::vector<double>& values() const { return values_; }
  const OmegaPtr& omega() const { return omega_; }

 private:
  OmegaPtr omega_;
  std::vector<double> values_;
};

/// Dense factors of the low-rank iterate M = U * V; U is m-by-r, V is r-by-n.
struct FactorPair {
  MatU U;
  MatV V;

  FactorPair() = default;
  FactorPair(MatU u, MatV v) : U(std::move(u)), V(std::move(v)) {
    if (U.cols() != V.rows())
      throw std::invalid_argument("FactorPair: inner dimensions disagree");
    if (U.cols() > std::min(U.rows(), V.cols()))
      throw std::invalid_argument("FactorPair: rank exceeds min(m, n)");
  }

  int rows() const { return static_cast<int>(U.rows()); }
  int cols() const { return static_cast<int>(V.cols()); }
  int rank() const { return static_cast<int>(U.cols()); }

  /// Materializes the dense product; intended for metrics and small outputs.
  Eigen::MatrixXd product() const { return U * V; }
};

}  // namespace rmc
