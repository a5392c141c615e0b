#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "topp/planner.hpp"

namespace topp {

struct SmoothingWindow {
  int p2_node = 0;  // left edge
  int p1_node = 0;  // the intersection, p2 < p1 < p3
  int p3_node = 0;  // right edge
  double sddot_p2 = 0.0;
  double sddot_p3 = 0.0;
  double delta1 = 0.0;  // blend fraction matching sddot at p2
  double delta2 = 0.0;  // blend fraction matching sddot at p3
};

struct BlendFields {
  double beta_star;
  double alpha_star;
};

struct SmoothingOptions {
  double window_fraction = 0.01;  // of path length
  int min_window_nodes = 8;
  int max_shrink = 8;
  double degenerate_tol = 1e-12;  // beta - alpha below this pins delta at 0.5
};

struct smoothing_failure : std::runtime_error {
  double s;
  explicit smoothing_failure(double s_)
      : std::runtime_error("bio: smoothing failed at s=" + std::to_string(s_)), s(s_) {}
};

/// Convex blends of the acceleration window at (s, sdot) with the window's
/// fixed weights delta1, delta2.
inline BlendFields blend_fields(const ConstraintTable& t, const SmoothingWindow& w,
                                double s, double sdot) {
  const AccelBounds ab = accel_bounds(t, s, sdot);
  const double a = detail::clamp_field(ab.alpha), b = detail::clamp_field(ab.beta);
  return {a + (b - a) * w.delta1, a + (b - a) * w.delta2};
}

namespace detail {

// Eq-style ramp between the two blended fields; algebraically the forward
// and backward window accelerations are the same function of (s, sdot).
inline double blend_accel(const ConstraintTable& t, const SmoothingWindow& w,
                          double ds, double s, double sdot) {
  const BlendFields f = blend_fields(t, w, s, sdot);
  const double span = (w.p3_node - w.p2_node) * ds;
  const double r = std::clamp((s - w.p2_node * ds) / span, 0.0, 1.0);
  return f.beta_star - r * (f.beta_star - f.alpha_star);
}

inline double window_delta(const ConstraintTable& t, int node, double sdot,
                           double sddot, double tol) {
  const AccelBounds ab = accel_bounds_at_node(t, node, sdot);
  const double a = clamp_field(ab.alpha), b = clamp_field(ab.beta);
  if (b - a < tol) return 0.5;  // degenerate pinch
  return std::clamp((sddot - a) / (b - a), 0.0, 1.0);
}

}  // namespace detail

/// Bidirectional integration at one intersection. Integrates the blended
/// field forward from p2 and backward from p3 to the intersection, stitches
/// the residual velocity gap by local re-interpolation, and writes the blend
/// back into `p`. Returns false when the blend would exceed MVC* (caller
/// shrinks the window and retries).
inline bool bio_apply(const ConstraintTable& t, const LimitCurves& c, PhaseProfile& p,
                      int p1_node, int half_width_nodes, const SmoothingOptions& opt) {
  const int j = p1_node, w = half_width_nodes;
  const double ds = p.ds;
  const double tolv = detail::velocity_tol(c);

  SmoothingWindow win;
  win.p1_node = j;
  win.p2_node = j - w;
  win.p3_node = j + w;
  win.sddot_p2 = p.sddot[static_cast<std::size_t>(win.p2_node)];
  win.sddot_p3 = p.sddot[static_cast<std::size_t>(win.p3_node)];
  win.delta1 = detail::window_delta(t, win.p2_node, p.sdot[static_cast<std::size_t>(win.p2_node)],
                                    win.sddot_p2, opt.degenerate_tol);
  win.delta2 = detail::window_delta(t, win.p3_node, p.sdot[static_cast<std::size_t>(win.p3_node)],
                                    win.sddot_p3, opt.degenerate_tol);

  // l1: forward from p2 to p1.
  std::vector<double> l1(static_cast<std::size_t>(w) + 1);
  l1[0] = p.sdot[static_cast<std::size_t>(win.p2_node)];
  double u = l1[0] * l1[0];
  for (int k = win.p2_node; k < j; ++k) {
    const double f1 = detail::blend_accel(t, win, ds, k * ds, std::sqrt(std::max(0.0, u)));
    const double uh = u + ds * f1;
    const double f2 = detail::blend_accel(t, win, ds, (k + 0.5) * ds,
                                          std::sqrt(std::max(0.0, uh)));
    u += 2.0 * ds * f2;
    if (u <= 0.0) return false;
    l1[static_cast<std::size_t>(k - win.p2_node + 1)] = std::sqrt(u);
  }

  // l2: backward from p3 to p1.
  std::vector<double> l2(static_cast<std::size_t>(w) + 1);  // index 0 at p1
  l2[static_cast<std::size_t>(w)] = p.sdot[static_cast<std::size_t>(win.p3_node)];
  u = l2[static_cast<std::size_t>(w)] * l2[static_cast<std::size_t>(w)];
  for (int k = win.p3_node; k > j; --k) {
    const double f1 = detail::blend_accel(t, win, ds, k * ds, std::sqrt(std::max(0.0, u)));
    const double uh = u - ds * f1;
    const double f2 = detail::blend_accel(t, win, ds, (k - 0.5) * ds,
                                          std::sqrt(std::max(0.0, uh)));
    u -= 2.0 * ds * f2;
    if (u <= 0.0) return false;
    l2[static_cast<std::size_t>(k - j - 1)] = std::sqrt(u);
  }

  // Residual gap at p1 (O(ds), from the grid-snapped intersection): stitch to
  // the lower of the two meeting velocities so neither half is lifted above a
  // ceiling it already touches (e.g. a cruise arc at mvc_star).
  const double v1 = l1[static_cast<std::size_t>(w)], v2 = l2[0];
  const double vjoin = std::min(v1, v2);
  // Quintic fade: zero value/slope/curvature at 0 and unit value with zero
  // slope/curvature at 1, so the correction leaves the acceleration (and its
  // first derivative) continuous at the junction and at the window interior.
  const auto fade = [](double x) { return ((6.0 * x - 15.0) * x + 10.0) * x * x * x; };
  std::vector<double> blended(static_cast<std::size_t>(2 * w) + 1);
  for (int i = 0; i <= w; ++i) {
    blended[static_cast<std::size_t>(i)] =
        l1[static_cast<std::size_t>(i)] + (vjoin - v1) * fade(double(i) / w);
  }
  for (int i = 1; i <= w; ++i) {
    blended[static_cast<std::size_t>(w + i)] =
        l2[static_cast<std::size_t>(i)] + (vjoin - v2) * fade(double(w - i) / w);
  }

  // Only interior samples are committed; edges keep their original values,
  // so a resting endpoint at a window edge is fine.
  for (int i = 1; i < 2 * w; ++i) {
    const int k = win.p2_node + i;
    if (blended[static_cast<std::size_t>(i)] >
        c.mvc_star[static_cast<std::size_t>(k)] + tolv)
      return false;
    if (blended[static_cast<std::size_t>(i)] <= 0.0) return false;
  }

  // Commit interior samples; edges keep their original provenance.
  for (int i = 1; i < 2 * w; ++i) {
    const int k = win.p2_node + i;
    p.sdot[static_cast<std::size_t>(k)] = blended[static_cast<std::size_t>(i)];
    p.tag[static_cast<std::size_t>(k)] = SegTag::Blend;
    p.sddot[static_cast<std::size_t>(k)] =
        detail::blend_accel(t, win, ds, k * ds, blended[static_cast<std::size_t>(i)]);
  }
  return true;
}

/// BIO at one intersection with window shrink-and-retry.
inline void bio(const ConstraintTable& t, const LimitCurves& c, PhaseProfile& p,
                int p1_node, int half_width_nodes, const SmoothingOptions& opt = {}) {
  int w = half_width_nodes;
  if (w < 1) return;  // degenerate window: profile unchanged
  for (int attempt = 0; attempt <= opt.max_shrink; ++attempt) {
    if (w < 1) break;
    if (bio_apply(t, c, p, p1_node, w, opt)) return;
    w /= 2;
  }
  throw smoothing_failure(p1_node * p.ds);
}

/// Applies BIO at every recorded intersection of a CNI profile. Adjacent
/// windows are jointly shrunk to half the gap so each window contains only
/// its own intersection.
inline PhaseProfile smooth_all(const ConstraintTable& t, const LimitCurves& c,
                               PhaseProfile p, const SmoothingOptions& opt = {}) {
  const int n = p.grid_size();
  const int w_default =
      std::max(opt.min_window_nodes,
               static_cast<int>(std::lround(opt.window_fraction * n)));
  const auto& xs = p.intersections;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const int j = xs[i].node;
    int w = w_default;
    if (i > 0) w = std::min(w, (j - xs[i - 1].node) / 2);
    if (i + 1 < xs.size()) w = std::min(w, (xs[i + 1].node - j) / 2);
    w = std::min({w, j, n - j});
    if (w < 1) continue;
    bio(t, c, p, j, w, opt);
  }
  return p;
}

}  // namespace topp
