#pragma once

#include <Eigen/Dense>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rmc/errors.hpp"
#include "rmc/types.hpp"

namespace rmc {

/// MatrixMarket coordinate reader for observed matrices:
/// `%%MatrixMarket matrix coordinate real general`, 1-based indices.
inline ObservedMatrix read_observed_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);

  std::string line;
  long lineno = 0;
  // Header.
  if (!std::getline(in, line)) throw parse_error(path, 1, "empty file");
  ++lineno;
  {
    std::istringstream hs(line);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix" || format != "coordinate" ||
        field != "real" || symmetry != "general")
      throw parse_error(path, lineno,
                        "expected header '%%MatrixMarket matrix coordinate real general'");
  }
  // Size line, skipping comments and blanks.
  int m = 0, n = 0;
  long nnz = 0;
  for (;;) {
    if (!std::getline(in, line)) throw parse_error(path, lineno, "missing size line");
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    if (!(ss >> m >> n >> nnz)) throw parse_error(path, lineno, "malformed size line");
    break;
  }
  if (m <= 0 || n <= 0 || nnz <= 0)
    throw parse_error(path, lineno, "dimensions and entry count must be positive");

  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(nnz));
  long seen = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    long i = 0, j = 0;
    double v = 0.0;
    if (!(ss >> i >> j >> v)) throw parse_error(path, lineno, "malformed entry line");
    if (i < 1 || i > m || j < 1 || j > n)
      throw parse_error(path, lineno, "entry index out of range (indices are 1-based)");
    entries.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), v});
    ++seen;
  }
  if (seen != nnz)
    throw parse_error(path, lineno,
                      "entry count mismatch: header declares " + std::to_string(nnz) +
                          ", file has " + std::to_string(seen));
  try {
    return ObservedMatrix::from_entries(m, n, std::move(entries));
  } catch (const std::invalid_argument& e) {
    throw parse_error(path, lineno, e.what());
  }
}

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// Writes an observed matrix in coordinate format (1-based indices).
inline void write_observed_matrix(const std::string& path, const ObservedMatrix& x) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << x.m() << ' ' << x.n() << ' ' << x.size() << '\n';
  for (std::size_t k = 0; k < x.size(); ++k)
    out << x.row(k) + 1 << ' ' << x.col(k) + 1 << ' '
        << detail::format_double(x.value(k)) << '\n';
}

/// Writes a dense matrix in MatrixMarket array format (column-major values).
inline void write_dense_matrix(const std::string& path, const Eigen::MatrixXd& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "%%MatrixMarket matrix array real general\n";
  out << a.rows() << ' ' << a.cols() << '\n';
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      out << detail::format_double(a(i, j)) << '\n';
}

/// Reads a MatrixMarket array file back into a dense matrix.
inline Eigen::MatrixXd read_dense_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::string line;
  long lineno = 0;
  if (!std::getline(in, line)) throw parse_error(path, 1, "empty file");
  ++lineno;
  {
    std::istringstream hs(line);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix" || format != "array" ||
        field != "real" || symmetry != "general")
      throw parse_error(path, lineno,
                        "expected header '%%MatrixMarket matrix array real general'");
  }
  long m = 0, n = 0;
  for (;;) {
    if (!std::getline(in, line)) throw parse_error(path, lineno, "missing size line");
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    if (!(ss >> m >> n)) throw parse_error(path, lineno, "malformed size line");
    break;
  }
  if (m <= 0 || n <= 0) throw parse_error(path, lineno, "dimensions must be positive");
  Eigen::MatrixXd a(m, n);
  for (long j = 0; j < n; ++j)
    for (long i = 0; i < m; ++i) {
      if (!std::getline(in, line))
        throw parse_error(path, lineno, "unexpected end of file in value block");
      ++lineno;
      std::istringstream ss(line);
      double v = 0.0;
      if (!(ss >> v)) throw parse_error(path, lineno, "malformed value line");
      a(i, j) = v;
    }
  return a;
}

}  // namespace rmc
