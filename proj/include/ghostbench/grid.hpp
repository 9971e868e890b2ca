#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace ghost {

/// Square real-valued image, row-major so that a flattened view walks x fastest.
/// Row index is y, column index is x.
using Grid = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<const Eigen::VectorXd> flatten(const Grid& g) {
  return {g.data(), g.size()};
}

/// Invalid user-supplied configuration or input data.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text or file syntax (scenario files, graymaps, key=value files).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure during a computation.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ghost
