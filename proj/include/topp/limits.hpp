#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "topp/model.hpp"

namespace topp {

/// Epsilon-independent limit curves, built once per problem (PreCompute).
struct LimitTables {
  std::vector<double> mvc_v;  // velocity-constraint limit, per node
  std::vector<double> mvc_a;  // acceleration-constraint limit, per node
  std::vector<double> mvc;    // min of the two
  std::vector<double> cvb;    // constant velocity boundary L(s)
  double max_mvc = 0.0;       // Max over finite MVC nodes
  double ds = 0.0;
  double path_length = 0.0;
};

/// Epsilon-dependent view: MVC* and the cruise partition.
struct LimitCurves {
  double epsilon = 0.0;
  double max_mvc = 0.0;
  double ds = 0.0;
  double path_length = 0.0;
  std::vector<double> mvc_v, mvc_a, mvc, cvb;
  std::vector<double> mvc_star;        // min(mvc, epsilon)
  std::vector<bool> cruise;            // per node: epsilon <= cvb
  struct Interval {
    double lo, hi;
    bool cruise;  // true = M-under (feasible constant velocity)
  };
  std::vector<Interval> partition;     // covers [0, s_e]

  int grid_size() const { return static_cast<int>(mvc_star.size()) - 1; }
  /// O(1) table query of the partition label at path coordinate s.
  bool cruise_at(double s) const {
    int k = static_cast<int>(std::clamp(s / ds, 0.0, double(grid_size())) + 0.5);
    return cruise[static_cast<std::size_t>(k)];
  }
};

inline std::vector<double> compute_mvc_v(const ConstraintTable& t) {
  const int n = t.grid_size;
  std::vector<double> out(n + 1, kUnbounded);
  for (int k = 0; k <= n; ++k) {
    double v = kUnbounded;
    for (int i = 0; i < t.rows(); ++i) {
      if (t.A(i, k) > t.zero_tol) v = std::min(v, -t.D(i, k) / t.A(i, k));
    }
    out[k] = std::max(0.0, v);
  }
  return out;
}

inline std::vector<double> compute_cvb(const ConstraintTable& t) {
  const int n = t.grid_size;
  std::vector<double> out(n + 1, kUnbounded);
  for (int k = 0; k <= n; ++k) {
    double v = kUnbounded;
    for (int i = 0; i < t.rows(); ++i) {
      if (std::abs(t.A(i, k)) <= t.zero_tol) continue;
      const double b = t.B(i, k), c = t.C(i, k);
      if (b <= 0.0) continue;  // C <= 0, so C/B <= 0 requires B > 0
      v = std::min(v, std::sqrt(-c / b));
    }
    out[k] = v;
  }
  return out;
}

namespace detail {

inline double beta_minus_alpha(const ConstraintTable& t, int k, double sdot) {
  const AccelBounds ab = accel_bounds_at_node(t, k, sdot);
  if (is_unbounded(ab.beta) || is_unbounded(ab.alpha)) return kUnbounded;
  return ab.beta - ab.alpha;
}

}  // namespace detail

/// Smallest sdot >= 0 with alpha = beta, per node; bisection on beta - alpha
/// after a coarse scan over [0, sdot_cap]. Zero-inertia rows with B > 0 cap
/// the node at sqrt(-C/B).
inline std::vector<double> compute_mvc_a(const ConstraintTable& t, double sdot_cap) {
  const int n = t.grid_size;
  std::vector<double> out(n + 1, kUnbounded);
  constexpr int kScan = 64;
  for (int k = 0; k <= n; ++k) {
    double zi_cap = kUnbounded;
    for (int i = 0; i < t.rows(); ++i) {
      if (std::abs(t.A(i, k)) > t.zero_tol) continue;
      const double b = t.B(i, k), c = t.C(i, k);
      if (b > t.zero_tol) zi_cap = std::min(zi_cap, std::sqrt(std::max(0.0, -c) / b));
    }
    double root = kUnbounded;
    double g0 = detail::beta_minus_alpha(t, k, 0.0);
    if (g0 < 0.0) {
      root = 0.0;  // infeasible even at rest; planning fails cleanly downstream
    } else if (!is_unbounded(g0)) {
      double xlo = 0.0, glo = g0;
      for (int j = 1; j <= kScan; ++j) {
        const double x = sdot_cap * j / kScan;
        const double g = detail::beta_minus_alpha(t, k, x);
        if (g <= 0.0) {
          double xhi = x;
          for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (xlo + xhi);
            if (detail::beta_minus_alpha(t, k, mid) <= 0.0)
              xhi = mid;
            else
              xlo = mid;
          }
          root = 0.5 * (xlo + xhi);
          break;
        }
        xlo = x;
        glo = g;
      }
      (void)glo;
    }
    out[k] = std::min(root, zi_cap);
  }
  return out;
}

/// PreCompute: all epsilon-independent curves. `velocity_cap_fallback` seeds
/// the MVC_A search cap and Max(MVC) when every node is unbounded.
inline LimitTables build_limit_tables(const ConstraintTable& t,
                                      double velocity_cap_fallback = 100.0) {
  LimitTables lt;
  lt.ds = t.ds();
  lt.path_length = t.path_length;
  lt.mvc_v = compute_mvc_v(t);

  double vtop = 0.0;
  for (double v : lt.mvc_v)
    if (!is_unbounded(v)) vtop = std::max(vtop, v);
  if (vtop <= 0.0) vtop = velocity_cap_fallback;
  lt.mvc_a = compute_mvc_a(t, 10.0 * vtop);

  lt.cvb = compute_cvb(t);
  const int n = t.grid_size;
  lt.mvc.resize(n + 1);
  double mx = 0.0;
  bool any_finite = false;
  for (int k = 0; k <= n; ++k) {
    lt.mvc[k] = std::min(lt.mvc_a[k], lt.mvc_v[k]);
    if (!is_unbounded(lt.mvc[k])) {
      mx = std::max(mx, lt.mvc[k]);
      any_finite = true;
    }
  }
  lt.max_mvc = any_finite ? mx : velocity_cap_fallback;
  return lt;
}

/// MVC* = min(MVC, epsilon) and the cruise partition, from stored tables
/// only; no integration. `epsilon_floor` is max(sdot_0, sdot_e).
inline LimitCurves reconstruct(const LimitTables& lt, double epsilon,
                               double epsilon_floor = 0.0) {
  if (epsilon < epsilon_floor || epsilon > lt.max_mvc * (1.0 + 1e-9)) {
    throw std::invalid_argument(
        "reconstruct: epsilon outside valid interval [" +
        std::to_string(epsilon_floor) + ", " + std::to_string(lt.max_mvc) + "]");
  }
  LimitCurves c;
  c.epsilon = epsilon;
  c.max_mvc = lt.max_mvc;
  c.ds = lt.ds;
  c.path_length = lt.path_length;
  c.mvc_v = lt.mvc_v;
  c.mvc_a = lt.mvc_a;
  c.mvc = lt.mvc;
  c.cvb = lt.cvb;

  const int n = static_cast<int>(lt.mvc.size()) - 1;
  c.mvc_star.resize(n + 1);
  c.cruise.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    c.mvc_star[k] = std::min(lt.mvc[k], epsilon);
    c.cruise[k] = (epsilon <= lt.cvb[k]);
  }

  // Maximal intervals; crossings between adjacent nodes are located by
  // linear interpolation of cvb when both sides are finite.
  double lo = 0.0;
  for (int k = 0; k < n; ++k) {
    if (c.cruise[k] == c.cruise[k + 1]) continue;
    double cross;
    const double a = lt.cvb[k], b = lt.cvb[k + 1];
    if (!is_unbounded(a) && !is_unbounded(b) && std::abs(b - a) > 1e-15) {
      cross = (k + (epsilon - a) / (b - a)) * lt.ds;
    } else {
      cross = (k + 0.5) * lt.ds;
    }
    cross = std::clamp(cross, k * lt.ds, (k + 1) * lt.ds);
    c.partition.push_back({lo, cross, static_cast<bool>(c.cruise[k])});
    lo = cross;
  }
  c.partition.push_back({lo, lt.path_length, static_cast<bool>(c.cruise[n])});
  return c;
}

}  // namespace topp
