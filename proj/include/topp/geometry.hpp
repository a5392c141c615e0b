#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "topp/common.hpp"

namespace topp {

/// Cubic Bezier path in configuration space. When `linear_orientation` is
/// set, a heading row theta(s) = pi*s/s_e is appended to every configuration
/// query; the heading does not contribute to arc length.
struct BezierPath {
  std::array<Vec, 4> control;
  bool linear_orientation = false;

  int position_dim() const { return static_cast<int>(control[0].size()); }
  int config_dim() const { return position_dim() + (linear_orientation ? 1 : 0); }
};

inline Vec bezier_eval(const BezierPath& path, double lambda) {
  if (lambda < 0.0 || lambda > 1.0)
    throw std::domain_error("bezier_eval: lambda outside [0,1]");
  const double c = 1.0 - lambda;
  return c * c * c * path.control[0] + 3.0 * c * c * lambda * path.control[1] +
         3.0 * c * lambda * lambda * path.control[2] +
         lambda * lambda * lambda * path.control[3];
}

/// dP/dlambda
inline Vec bezier_d1(const BezierPath& path, double lambda) {
  const double c = 1.0 - lambda;
  return 3.0 * c * c * (path.control[1] - path.control[0]) +
         6.0 * c * lambda * (path.control[2] - path.control[1]) +
         3.0 * lambda * lambda * (path.control[3] - path.control[2]);
}

/// d2P/dlambda2
inline Vec bezier_d2(const BezierPath& path, double lambda) {
  const double c = 1.0 - lambda;
  return 6.0 * c * (path.control[2] - 2.0 * path.control[1] + path.control[0]) +
         6.0 * lambda * (path.control[3] - 2.0 * path.control[2] + path.control[1]);
}

/// Monotone lambda <-> arc length table. Queries between nodes use monotone
/// cubic (Fritsch-Carlson) interpolation so that q_ss stays free of ringing.
struct ArcLengthMap {
  double total_length = 0.0;
  std::vector<double> lambda_grid;
  std::vector<double> s_grid;     // strictly increasing, s_0 = 0, s_M = total_length
  std::vector<double> dlam_ds;    // pchip slopes on (s, lambda)
  double tol_s = 1e-9;

  double lambda_at(double s) const {
    if (s < -tol_s || s > total_length + tol_s)
      throw std::domain_error("ArcLengthMap: s outside [0, s_e]");
    s = std::clamp(s, 0.0, total_length);
    const auto it = std::upper_bound(s_grid.begin(), s_grid.end(), s);
    if (it == s_grid.begin()) return lambda_grid.front();
    if (it == s_grid.end()) return lambda_grid.back();
    const std::size_t j = static_cast<std::size_t>(it - s_grid.begin()) - 1;
    const double h = s_grid[j + 1] - s_grid[j];
    const double t = (s - s_grid[j]) / h;
    const double y0 = lambda_grid[j], y1 = lambda_grid[j + 1];
    const double m0 = dlam_ds[j] * h, m1 = dlam_ds[j + 1] * h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
           (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
  }
};

namespace detail {

inline double speed(const BezierPath& path, double lambda) {
  return bezier_d1(path, lambda).norm();
}

// Fritsch-Carlson slopes for a strictly monotone table y(x).
inline std::vector<double> pchip_slopes(const std::vector<double>& x,
                                        const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n - 1), m(n);
  for (std::size_t j = 0; j + 1 < n; ++j) d[j] = (y[j + 1] - y[j]) / (x[j + 1] - x[j]);
  m[0] = d[0];
  m[n - 1] = d[n - 2];
  for (std::size_t j = 1; j + 1 < n; ++j) {
    if (d[j - 1] * d[j] <= 0.0) {
      m[j] = 0.0;
    } else {
      const double h0 = x[j] - x[j - 1], h1 = x[j + 1] - x[j];
      const double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
      m[j] = (w1 + w2) / (w1 / d[j - 1] + w2 / d[j]);
    }
  }
  return m;
}

}  // namespace detail

/// Cumulative arc length by per-interval Simpson quadrature of |dP/dlambda|.
inline ArcLengthMap build_arclength_map(const BezierPath& path, int n_samples) {
  if (n_samples < 2)
    throw std::invalid_argument("build_arclength_map: n_samples must be >= 2");
  ArcLengthMap map;
  map.lambda_grid.resize(static_cast<std::size_t>(n_samples) + 1);
  map.s_grid.resize(static_cast<std::size_t>(n_samples) + 1);
  map.s_grid[0] = 0.0;
  map.lambda_grid[0] = 0.0;
  const double h = 1.0 / n_samples;
  for (int j = 0; j < n_samples; ++j) {
    const double a = j * h, b = (j + 1) * h;
    const double seg = (h / 6.0) * (detail::speed(path, a) +
                                    4.0 * detail::speed(path, 0.5 * (a + b)) +
                                    detail::speed(path, b));
    map.lambda_grid[j + 1] = b;
    map.s_grid[j + 1] = map.s_grid[j] + seg;
  }
  map.lambda_grid.back() = 1.0;
  map.total_length = map.s_grid.back();
  if (map.total_length <= 1e-12)
    throw zero_length_error("build_arclength_map: degenerate zero-length path");
  map.dlam_ds = detail::pchip_slopes(map.s_grid, map.lambda_grid);
  return map;
}

struct ConfigDerivatives {
  Vec q;     // configuration (position rows, then optional heading row)
  Vec q_s;   // dq/ds
  Vec q_ss;  // d2q/ds2
};

/// q, q_s, q_ss at path coordinate s. Position rows are converted through
/// lambda(s) by chain rule against the exact |dP/dlambda|, which keeps q_s at
/// unit norm independent of the interpolation of the map.
inline ConfigDerivatives config_derivatives(const BezierPath& path,
                                            const ArcLengthMap& map, double s) {
  if (s < -map.tol_s || s > map.total_length + map.tol_s)
    throw std::domain_error("config_derivatives: s outside [0, s_e]");
  s = std::clamp(s, 0.0, map.total_length);
  const double lambda = map.lambda_at(s);
  const Vec d1 = bezier_d1(path, lambda);
  const Vec d2 = bezier_d2(path, lambda);
  const double sigma = d1.norm();
  if (sigma < 1e-12)
    throw model_error("config_derivatives: vanishing path speed at s=" + std::to_string(s));
  const double sigma_l = d1.dot(d2) / sigma;  // dsigma/dlambda
  const Vec pos = bezier_eval(path, lambda);
  const Vec pos_s = d1 / sigma;
  const Vec pos_ss = (d2 - pos_s * sigma_l) / (sigma * sigma);

  const int nd = path.position_dim();
  const int nc = path.config_dim();
  ConfigDerivatives out;
  out.q = Vec::Zero(nc);
  out.q_s = Vec::Zero(nc);
  out.q_ss = Vec::Zero(nc);
  out.q.head(nd) = pos;
  out.q_s.head(nd) = pos_s;
  out.q_ss.head(nd) = pos_ss;
  if (path.linear_orientation) {
    out.q[nd] = M_PI * s / map.total_length;
    out.q_s[nd] = M_PI / map.total_length;
    out.q_ss[nd] = 0.0;
  }
  return out;
}

}  // namespace topp
