#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "topp/limits.hpp"
#include "topp/model.hpp"

namespace topp {

enum class SegTag : std::uint8_t { Accel, Decel, Arc, Blend };

inline const char* to_string(SegTag t) {
  switch (t) {
    case SegTag::Accel: return "accel-beta";
    case SegTag::Decel: return "decel-alpha";
    case SegTag::Arc: return "switch-arc";
    case SegTag::Blend: return "bio-blend";
  }
  return "?";
}

enum class SwitchKind : std::uint8_t { Tangent, Discontinuity, ZeroInertia, ArcEntry };

struct SwitchPoint {
  int node = 0;
  double s = 0.0;
  double sdot = 0.0;
  SwitchKind kind = SwitchKind::Tangent;
};

struct Intersection {
  int node = 0;       // junction between node and node+1
  double s = 0.0;
  double sdot = 0.0;
  SegTag left = SegTag::Accel;
  SegTag right = SegTag::Accel;
};

/// Sampled phase-plane velocity profile on the uniform planner grid.
struct PhaseProfile {
  double ds = 0.0;
  double path_length = 0.0;
  std::vector<double> sdot;
  std::vector<double> sddot;
  std::vector<SegTag> tag;
  double sdot_start = 0.0;
  double sdot_end = 0.0;
  std::vector<Intersection> intersections;

  int grid_size() const { return static_cast<int>(sdot.size()) - 1; }
  double s_at(int k) const { return k * ds; }
};

enum class FailureReason : std::uint8_t {
  BoundaryAboveMvcStar,
  ForwardStall,
  NoConnection,
};

inline const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::BoundaryAboveMvcStar: return "boundary-above-mvc-star";
    case FailureReason::ForwardStall: return "forward-stall";
    case FailureReason::NoConnection: return "no-connection";
  }
  return "?";
}

struct CniResult {
  std::optional<PhaseProfile> profile;
  FailureReason reason = FailureReason::NoConnection;
  double failure_s = 0.0;
  bool ok() const { return profile.has_value(); }
};

namespace detail {

inline double clamp_field(double x) { return std::clamp(x, -1e9, 1e9); }

// One explicit-midpoint step of d(u)/ds = 2*beta forward from node k.
inline double forward_step_u(const ConstraintTable& t, int k, double u) {
  const double ds = t.ds();
  const double s = t.s_at(k);
  const double b1 = clamp_field(accel_bounds(t, s, std::sqrt(std::max(0.0, u))).beta);
  const double uh = u + ds * b1;
  const double b2 =
      clamp_field(accel_bounds(t, s + 0.5 * ds, std::sqrt(std::max(0.0, uh))).beta);
  return u + 2.0 * ds * b2;
}

// One explicit-midpoint step of d(u)/ds = 2*alpha backward from node k.
inline double backward_step_u(const ConstraintTable& t, int k, double u) {
  const double ds = t.ds();
  const double s = t.s_at(k);
  const double a1 = clamp_field(accel_bounds(t, s, std::sqrt(std::max(0.0, u))).alpha);
  const double uh = u - ds * a1;
  const double a2 =
      clamp_field(accel_bounds(t, s - 0.5 * ds, std::sqrt(std::max(0.0, uh))).alpha);
  return u - 2.0 * ds * a2;
}

inline double velocity_tol(const LimitCurves& c) {
  return std::max(1e-6 * c.max_mvc, 1e-12);
}

// Allowed ceiling penetration for backward curves launched on MVC*; the
// field is undefined on the curve itself so a discrete step can graze it.
inline double penetration_tol(const LimitCurves& c) {
  return std::max(velocity_tol(c), 1e-3 * c.epsilon);
}

inline bool eps_dominated(const LimitCurves& c, int k) {
  return c.mvc[static_cast<std::size_t>(k)] >= c.epsilon;
}

inline double jump_tol(const LimitCurves& c) {
  std::vector<double> d;
  d.reserve(c.mvc_star.size());
  for (std::size_t k = 0; k + 1 < c.mvc_star.size(); ++k)
    d.push_back(std::abs(c.mvc_star[k + 1] - c.mvc_star[k]));
  if (d.empty()) return kUnbounded;
  std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
  return std::max(10.0 * d[d.size() / 2], 1e-9 * std::max(c.max_mvc, 1.0));
}

}  // namespace detail

enum class StopReason : std::uint8_t { ReachedEnd, ReachedStart, Ceiling, Stalled };

/// Integration result sampled on grid nodes [start_node, start_node + n).
struct IntegratedSegment {
  int start_node = 0;
  std::vector<double> sdot;  // ascending node order
  StopReason stop = StopReason::ReachedEnd;
  int last_node() const { return start_node + static_cast<int>(sdot.size()) - 1; }
};

/// Forward integration of d(sdot^2)/ds = 2*beta from (node, sdot) toward s_e.
/// Terminates on MVC*, sdot = 0 (stalled, clamped) or s = s_e.
inline IntegratedSegment forward_integrate(const ConstraintTable& t,
                                           const LimitCurves& c, int start_node,
                                           double sdot_start) {
  const int n = t.grid_size;
  const double tolv = detail::velocity_tol(c);
  IntegratedSegment seg;
  seg.start_node = start_node;
  seg.sdot.push_back(sdot_start);
  double u = sdot_start * sdot_start;
  for (int k = start_node; k < n; ++k) {
    const double un = detail::forward_step_u(t, k, u);
    if (un <= 0.0) {
      seg.sdot.push_back(0.0);
      seg.stop = StopReason::Stalled;
      return seg;
    }
    const double vn = std::sqrt(un);
    if (vn > c.mvc_star[static_cast<std::size_t>(k + 1)] + tolv) {
      seg.stop = StopReason::Ceiling;
      return seg;
    }
    seg.sdot.push_back(vn);
    u = un;
  }
  seg.stop = StopReason::ReachedEnd;
  return seg;
}

/// Mirror of forward_integrate toward s = 0, integrating 2*alpha. Samples are
/// still returned in ascending node order, ending at `start_node`.
inline IntegratedSegment backward_integrate(const ConstraintTable& t,
                                            const LimitCurves& c, int start_node,
                                            double sdot_start) {
  const double tolv = detail::velocity_tol(c);
  std::vector<double> rev;  // descending order while integrating
  rev.push_back(sdot_start);
  double u = sdot_start * sdot_start;
  StopReason stop = StopReason::ReachedStart;
  int k = start_node;
  for (; k > 0; --k) {
    const double up = detail::backward_step_u(t, k, u);
    if (up <= 0.0) {
      rev.push_back(0.0);
      stop = StopReason::Stalled;
      --k;
      break;
    }
    const double vp = std::sqrt(up);
    if (vp > c.mvc_star[static_cast<std::size_t>(k - 1)] + tolv) {
      stop = StopReason::Ceiling;
      break;
    }
    rev.push_back(vp);
    u = up;
  }
  IntegratedSegment seg;
  seg.start_node = std::max(k, 0);
  seg.sdot.assign(rev.rbegin(), rev.rend());
  seg.stop = stop;
  return seg;
}

namespace detail {

inline std::vector<SwitchPoint> find_switch_candidates(const ConstraintTable& t,
                                                       const LimitCurves& c,
                                                       int from_node,
                                                       bool include_arc_entries) {
  const int n = c.grid_size();
  const double ds = c.ds;
  const double tjump = jump_tol(c);
  const int m = t.rows() / 2;
  std::vector<SwitchPoint> out;

  auto cruise_dom = [&](int k) { return c.cruise[k] && eps_dominated(c, k); };

  for (int k = from_node; k <= n; ++k) {
    if (include_arc_entries && cruise_dom(k) &&
        (k == from_node || !cruise_dom(k - 1))) {
      out.push_back({k, k * ds, c.epsilon, SwitchKind::ArcEntry});
    }
    if (k < n) {
      const double d = c.mvc_star[k + 1] - c.mvc_star[k];
      if (std::abs(d) > tjump) {
        const int node = d < 0.0 ? k + 1 : k;
        out.push_back({node, node * ds,
                       std::min(c.mvc_star[k], c.mvc_star[k + 1]),
                       SwitchKind::Discontinuity});
      }
      for (int i = 0; i < m; ++i) {
        if (t.A(i, k) * t.A(i, k + 1) < 0.0) {
          const int node = std::abs(t.A(i, k)) < std::abs(t.A(i, k + 1)) ? k : k + 1;
          out.push_back({node, node * ds, c.mvc_star[node], SwitchKind::ZeroInertia});
          break;
        }
      }
    }
    // Tangent points live on the MVC(s) portion of MVC*: sign change of the
    // curve slope minus the sddot/sdot field evaluated just below the curve.
    if (k >= std::max(from_node, 1) && k < n && c.mvc[k] < c.epsilon &&
        c.mvc[k - 1] < c.epsilon && c.mvc[k + 1] < c.epsilon) {
      auto chi = [&](int j) {
        const double veval = std::max(c.mvc_star[j] - 1e-3 * c.epsilon, 1e-9);
        const double slope = (c.mvc_star[j + 1] - c.mvc_star[j - 1]) / (2.0 * ds);
        const double field =
            clamp_field(accel_bounds_at_node(t, j, veval).beta) / std::max(veval, 1e-9);
        return field - slope;
      };
      if (chi(k - 1) * chi(k) < 0.0)
        out.push_back({k, k * ds, c.mvc_star[k], SwitchKind::Tangent});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SwitchPoint& a, const SwitchPoint& b) { return a.node < b.node; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const SwitchPoint& a, const SwitchPoint& b) {
                          return a.node == b.node && a.kind == b.kind;
                        }),
            out.end());
  return out;
}

}  // namespace detail

struct SwitchSearchResult {
  std::vector<SwitchPoint> points;                 // tangent / discontinuity / zero-inertia
  std::vector<LimitCurves::Interval> switch_arcs;  // cruise intervals of the partition
};

/// Switch search along MVC*: cruise intervals become switch arcs directly via
/// the O(1) partition; the MVC portion is scanned for switch points.
inline SwitchSearchResult switch_search(const ConstraintTable& t, const LimitCurves& c) {
  SwitchSearchResult r;
  for (const auto& iv : c.partition)
    if (iv.cruise) r.switch_arcs.push_back(iv);
  for (const auto& sp : detail::find_switch_candidates(t, c, 0, false))
    r.points.push_back(sp);
  return r;
}

/// Complete numerical integration: assembles the time-optimal profile under
/// MVC* between (0, sdot0) and (s_e, sdote), or returns a failure verdict in
/// finite time.
inline CniResult construct_profile(const ConstraintTable& t, const LimitCurves& c,
                                   double sdot0, double sdote) {
  const int n = c.grid_size();
  const double ds = c.ds;
  const double tolv = detail::velocity_tol(c);
  const double tolpen = detail::penetration_tol(c);

  auto fail = [&](FailureReason r, double s) {
    CniResult res;
    res.reason = r;
    res.failure_s = s;
    return res;
  };

  if (sdot0 < 0.0 || sdote < 0.0)
    throw std::invalid_argument("construct_profile: boundary velocities must be >= 0");
  if (sdot0 > c.mvc_star[0] + tolv)
    return fail(FailureReason::BoundaryAboveMvcStar, 0.0);
  if (sdote > c.mvc_star[static_cast<std::size_t>(n)] + tolv)
    return fail(FailureReason::BoundaryAboveMvcStar, c.path_length);

  std::vector<double> v(static_cast<std::size_t>(n) + 1, -1.0);
  std::vector<SegTag> tag(static_cast<std::size_t>(n) + 1, SegTag::Accel);
  v[0] = sdot0;

  auto cruise_dom = [&](int k) { return c.cruise[k] && detail::eps_dominated(c, k); };
  auto arc_end_node = [&](int k) {
    while (k < n && cruise_dom(k + 1)) ++k;
    return k;
  };

  // Backward alpha-curve from (cand_node, vc); splices into v/tag on success.
  auto attempt_backward = [&](int cand_node, double vc, int coverage) -> bool {
    std::vector<double> tmp(static_cast<std::size_t>(cand_node) + 1, -1.0);
    tmp[static_cast<std::size_t>(cand_node)] = vc;
    double u = vc * vc;
    int junction = -1;
    for (int k = cand_node; k > 0; --k) {
      const double up = detail::backward_step_u(t, k, u);
      if (up <= 0.0) return false;
      const double vp = std::sqrt(up);
      // Junction first: crossing the stored profile may coincide with grazing
      // the ceiling (e.g. when the profile rides an arc at mvc_star).
      if (k - 1 <= coverage && vp >= v[static_cast<std::size_t>(k - 1)]) {
        junction = k - 1;
        break;
      }
      if (vp > c.mvc_star[static_cast<std::size_t>(k - 1)] + tolpen) return false;
      tmp[static_cast<std::size_t>(k - 1)] = vp;
      u = up;
    }
    if (junction < 0) return false;
    for (int j = junction + 1; j <= cand_node; ++j) {
      v[static_cast<std::size_t>(j)] = tmp[static_cast<std::size_t>(j)];
      tag[static_cast<std::size_t>(j)] = SegTag::Decel;
    }
    return true;
  };

  int cur = 0;
  double vcur = sdot0;
  int guard = 0;
  while (cur < n) {
    if (++guard > 2 * n + 16) return fail(FailureReason::NoConnection, cur * ds);

    // Forward beta-integration from (cur, vcur).
    double u = vcur * vcur;
    int k = cur;
    int hit = -1;
    bool stalled = false;
    while (k < n) {
      const double un = detail::forward_step_u(t, k, u);
      if (un <= 0.0) {
        stalled = true;
        break;
      }
      const double vn = std::sqrt(un);
      if (vn > c.mvc_star[static_cast<std::size_t>(k + 1)] + tolv) {
        hit = k + 1;
        break;
      }
      v[static_cast<std::size_t>(k + 1)] = vn;
      tag[static_cast<std::size_t>(k + 1)] = SegTag::Accel;
      u = un;
      ++k;
    }
    if (k == n) {
      cur = n;
      break;
    }
    if (stalled) return fail(FailureReason::ForwardStall, (k + 1) * ds);

    if (hit == n) {
      // Overshoot only at the terminal node: clamp, final backward fixes it.
      v[static_cast<std::size_t>(n)] = c.mvc_star[static_cast<std::size_t>(n)];
      tag[static_cast<std::size_t>(n)] = SegTag::Accel;
      cur = n;
      break;
    }

    const int cov = hit - 1;
    if (cruise_dom(hit) && v[static_cast<std::size_t>(cov)] <= c.epsilon + tolv) {
      // Gentle entry into a switch arc from below: ride it.
      const int e = arc_end_node(hit);
      for (int j = hit; j <= e; ++j) {
        v[static_cast<std::size_t>(j)] = c.epsilon;
        tag[static_cast<std::size_t>(j)] = SegTag::Arc;
      }
      cur = e;
      vcur = c.epsilon;
      continue;
    }

    bool connected = false;
    for (const SwitchPoint& cand : detail::find_switch_candidates(t, c, hit, true)) {
      const double vc =
          std::min(cand.sdot, c.mvc_star[static_cast<std::size_t>(cand.node)]);
      if (!attempt_backward(cand.node, vc, cov)) continue;
      if (cand.kind == SwitchKind::ArcEntry) {
        const int e = arc_end_node(cand.node);
        for (int j = cand.node; j <= e; ++j) {
          v[static_cast<std::size_t>(j)] = c.epsilon;
          tag[static_cast<std::size_t>(j)] = SegTag::Arc;
        }
        cur = e;
        vcur = c.epsilon;
      } else {
        cur = cand.node;
        vcur = vc;
      }
      connected = true;
      break;
    }
    if (!connected) {
      // Last resort: the terminal deceleration curve from (s_e, sdote) may
      // reach the covered prefix directly (e.g. a cruise arc that must be
      // left early because constant velocity is infeasible downstream).
      if (attempt_backward(n, std::min(sdote, c.mvc_star[static_cast<std::size_t>(n)]),
                           cov)) {
        cur = n;
        break;
      }
      return fail(FailureReason::NoConnection, hit * ds);
    }
  }

  // Final backward pass from (s_e, sdote).
  if (v[static_cast<std::size_t>(n)] + tolv < sdote)
    return fail(FailureReason::NoConnection, c.path_length);
  if (sdote < v[static_cast<std::size_t>(n)] - tolv) {
    if (!attempt_backward(n, sdote, n))
      return fail(FailureReason::NoConnection, c.path_length);
  } else {
    v[static_cast<std::size_t>(n)] = sdote;
  }

  // Assemble the profile: per-node acceleration from the segment provenance.
  PhaseProfile p;
  p.ds = ds;
  p.path_length = c.path_length;
  p.sdot_start = sdot0;
  p.sdot_end = sdote;
  p.sdot.resize(static_cast<std::size_t>(n) + 1);
  p.sddot.resize(static_cast<std::size_t>(n) + 1);
  p.tag = tag;
  if (n >= 1) p.tag[0] = tag[1];
  for (int k = 0; k <= n; ++k) {
    p.sdot[static_cast<std::size_t>(k)] = std::max(0.0, v[static_cast<std::size_t>(k)]);
    switch (p.tag[static_cast<std::size_t>(k)]) {
      case SegTag::Arc:
        p.sddot[static_cast<std::size_t>(k)] = 0.0;
        break;
      case SegTag::Decel:
        p.sddot[static_cast<std::size_t>(k)] = detail::clamp_field(
            accel_bounds_at_node(t, k, p.sdot[static_cast<std::size_t>(k)]).alpha);
        break;
      default:
        p.sddot[static_cast<std::size_t>(k)] = detail::clamp_field(
            accel_bounds_at_node(t, k, p.sdot[static_cast<std::size_t>(k)]).beta);
        break;
    }
  }
  for (int k = 0; k < n; ++k) {
    if (p.tag[static_cast<std::size_t>(k)] != p.tag[static_cast<std::size_t>(k + 1)]) {
      p.intersections.push_back({k, k * ds, p.sdot[static_cast<std::size_t>(k)],
                                 p.tag[static_cast<std::size_t>(k)],
                                 p.tag[static_cast<std::size_t>(k + 1)]});
    }
  }
  CniResult res;
  res.profile = std::move(p);
  return res;
}

}  // namespace topp
