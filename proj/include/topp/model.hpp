#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "topp/common.hpp"
#include "topp/geometry.hpp"

namespace topp {

/// Kinematic model plug-in: actuator velocity = J(q) * qdot. `jacobian_s` is
/// the derivative of J along the path, dJ/ds = (dJ/dq) q_s.
struct KinematicModel {
  int state_dim = 0;
  int actuator_dim = 0;
  std::function<Mat(const Vec& q)> jacobian;
  std::function<Mat(const Vec& q, const Vec& q_s)> jacobian_s;

  /// Identity mapping, any dimension.
  static KinematicModel unit(int dim) {
    KinematicModel m;
    m.state_dim = dim;
    m.actuator_dim = dim;
    m.jacobian = [dim](const Vec&) { return Mat::Identity(dim, dim); };
    m.jacobian_s = [dim](const Vec&, const Vec&) { return Mat::Zero(dim, dim); };
    return m;
  }

  /// Two-actuator analytic toy model on (x, y, theta): wheel speeds of a
  /// differential pair offset by `wheel_offset` from the heading axis.
  static KinematicModel diff_caster(double wheel_offset = 0.2) {
    KinematicModel m;
    m.state_dim = 3;
    m.actuator_dim = 2;
    const double b = wheel_offset;
    m.jacobian = [b](const Vec& q) {
      const double ct = std::cos(q[2]), st = std::sin(q[2]);
      Mat j(2, 3);
      j << ct, st, b,
           ct, st, -b;
      return j;
    };
    m.jacobian_s = [](const Vec& q, const Vec& q_s) {
      const double ct = std::cos(q[2]), st = std::sin(q[2]);
      const double ts = q_s[2];
      Mat js(2, 3);
      js << -st * ts, ct * ts, 0.0,
            -st * ts, ct * ts, 0.0;
      return js;
    };
    return m;
  }
};

struct ActuatorLimits {
  Vec v_max;
  Vec a_max;
};

/// Per-grid-node constraint vectors for
///   A(s) sddot + B(s) sdot^2 + C(s) <= 0   (acceleration rows)
///   A(s) sdot + D(s) <= 0                  (velocity rows)
/// Rows are stacked as [+; -] pairs of size 2m. Immutable after build.
struct ConstraintTable {
  double path_length = 0.0;
  int grid_size = 0;  // N intervals, N+1 nodes
  Mat A, B, C, D;     // 2m x (N+1)
  double zero_tol = 0.0;  // rows with |A_i| below this are zero-inertia

  int rows() const { return static_cast<int>(A.rows()); }
  double ds() const { return path_length / grid_size; }
  double s_at(int k) const { return k * path_length / grid_size; }

  /// Linear interpolation of A, B, C between bracketing nodes.
  void rows_at(double s, Vec& a, Vec& b, Vec& c) const {
    const double x = std::clamp(s / ds(), 0.0, static_cast<double>(grid_size));
    int k = static_cast<int>(x);
    if (k >= grid_size) k = grid_size - 1;
    const double w = x - k;
    a = (1.0 - w) * A.col(k) + w * A.col(k + 1);
    b = (1.0 - w) * B.col(k) + w * B.col(k + 1);
    c = (1.0 - w) * C.col(k) + w * C.col(k + 1);
  }
};

inline ConstraintTable build_constraint_table(const KinematicModel& model,
                                              const ActuatorLimits& limits,
                                              const BezierPath& path,
                                              const ArcLengthMap& map, int grid_size) {
  if (grid_size < 16)
    throw std::invalid_argument("build_constraint_table: grid size must be >= 16");
  if (model.state_dim != path.config_dim())
    throw std::invalid_argument("build_constraint_table: model dimension " +
                                std::to_string(model.state_dim) +
                                " does not match path dimension " +
                                std::to_string(path.config_dim()));
  const int m = model.actuator_dim;
  if (limits.v_max.size() != m || limits.a_max.size() != m)
    throw std::invalid_argument("build_constraint_table: limit vectors must have length m");
  if (limits.v_max.minCoeff() <= 0.0 || limits.a_max.minCoeff() <= 0.0)
    throw std::invalid_argument("build_constraint_table: limits must be strictly positive");

  ConstraintTable t;
  t.path_length = map.total_length;
  t.grid_size = grid_size;
  t.A.resize(2 * m, grid_size + 1);
  t.B.resize(2 * m, grid_size + 1);
  t.C.resize(2 * m, grid_size + 1);
  t.D.resize(2 * m, grid_size + 1);

  // Per-node computations are independent (table build parallelizes).
  for (int k = 0; k <= grid_size; ++k) {
    const double s = std::min(t.s_at(k), map.total_length);
    const ConfigDerivatives cd = config_derivatives(path, map, s);
    const Mat J = model.jacobian(cd.q);
    const Mat Js = model.jacobian_s(cd.q, cd.q_s);
    if (!J.allFinite() || !Js.allFinite())
      throw model_error("build_constraint_table: non-finite Jacobian entry at s=" +
                        std::to_string(s));
    const Vec f = J * cd.q_s;
    const Vec g = Js * cd.q_s + J * cd.q_ss;
    t.A.col(k) << f, -f;
    t.B.col(k) << g, -g;
    t.C.col(k) << -limits.a_max, -limits.a_max;
    t.D.col(k) << -limits.v_max, -limits.v_max;
  }
  t.zero_tol = 1e-8 * t.A.cwiseAbs().maxCoeff();
  return t;
}

struct AccelBounds {
  double alpha;
  double beta;
};

namespace detail {

inline AccelBounds accel_bounds_rows(const Vec& a, const Vec& b, const Vec& c,
                                     double zero_tol, double sdot) {
  const double u = sdot * sdot;
  double alpha = -kUnbounded, beta = kUnbounded;
  bool any = false;
  for (int i = 0; i < a.size(); ++i) {
    if (std::abs(a[i]) <= zero_tol) continue;  // zero-inertia row
    const double v = (-b[i] * u - c[i]) / a[i];
    if (a[i] > 0.0) {
      beta = std::min(beta, v);
    } else {
      alpha = std::max(alpha, v);
    }
    any = true;
  }
  if (!any)
    throw malformed_constraint_error("accel_bounds: all rows are zero-inertia");
  return {alpha, beta};
}

}  // namespace detail

/// alpha(s, sdot), beta(s, sdot) of the path acceleration window
/// alpha <= sddot <= beta. Between nodes A, B, C interpolate linearly.
inline AccelBounds accel_bounds(const ConstraintTable& t, double s, double sdot) {
  Vec a, b, c;
  t.rows_at(s, a, b, c);
  return detail::accel_bounds_rows(a, b, c, t.zero_tol, sdot);
}

/// Node-exact variant used by the limit-curve builders.
inline AccelBounds accel_bounds_at_node(const ConstraintTable& t, int k, double sdot) {
  return detail::accel_bounds_rows(t.A.col(k), t.B.col(k), t.C.col(k), t.zero_tol, sdot);
}

}  // namespace topp
