#pragma once

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>
#include <string>

namespace topp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Sentinel for unbounded velocities. Compares greater than any finite
/// velocity; arithmetic on it is forbidden by contract.
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

inline bool is_unbounded(double x) { return std::isinf(x); }

struct zero_length_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct model_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct malformed_constraint_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace topp
