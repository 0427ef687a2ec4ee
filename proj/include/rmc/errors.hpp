#pragma once

#include <stdexcept>
#include <string>

namespace rmc {

/// U or V lost full rank: an r-by-r Gram system is numerically singular.
class rank_deficiency_error : public std::runtime_error {
 public:
  explicit rank_deficiency_error(const std::string& what)
      : std::runtime_error(what) {}
};

/// A nonzero descent direction produced a zero curvature denominator.
class degenerate_direction_error : public std::runtime_error {
 public:
  explicit degenerate_direction_error(const std::string& what)
      : std::runtime_error(what) {}
};

/// Malformed input file; message carries the 1-based line number.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& path, long line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

}  // namespace rmc
