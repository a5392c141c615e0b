#pragma once

#include <chrono>

#include "topp/geometry.hpp"
#include "topp/limits.hpp"
#include "topp/model.hpp"
#include "topp/planner.hpp"
#include "topp/smoother.hpp"
#include "topp/trajectory.hpp"

namespace topp {

struct Problem {
  BezierPath path;
  KinematicModel model;
  ActuatorLimits limits;
  double sdot_start = 0.0;
  double sdot_end = 0.0;
  int grid = 1000;
  double velocity_cap = 100.0;  // Max(MVC) fallback when every node is unbounded
};

/// Epsilon-independent tables (PreCompute of the planning pipeline).
struct Precomputed {
  ArcLengthMap map;
  ConstraintTable table;
  LimitTables tables;
  double precompute_ms = 0.0;
};

namespace detail {

inline double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace detail

inline Precomputed precompute(const Problem& prob) {
  const auto t0 = std::chrono::steady_clock::now();
  Precomputed pre;
  // Arc-length integration on 8x the planner grid density.
  pre.map = build_arclength_map(prob.path, 8 * prob.grid);
  pre.table = build_constraint_table(prob.model, prob.limits, prob.path, pre.map, prob.grid);
  pre.tables = build_limit_tables(pre.table, prob.velocity_cap);
  pre.precompute_ms = detail::ms_since(t0);
  return pre;
}

struct PlanOutput {
  bool ok = false;
  FailureReason reason = FailureReason::NoConnection;
  double failure_s = 0.0;
  LimitCurves curves;
  PhaseProfile raw;       // CNI output, acceleration-discontinuous
  PhaseProfile smoothed;  // after BIO
  Trajectory trajectory;
  TrajectoryMetrics metric;
  double reconstruct_ms = 0.0;
  double cni_ms = 0.0;
  double bio_ms = 0.0;
};

/// One planning query: reconstruct MVC*, run CNI, then BIO, then convert to
/// the time domain. Throws std::invalid_argument when epsilon is outside its
/// valid interval; planner infeasibility is reported in the result.
inline PlanOutput plan(const Problem& prob, const Precomputed& pre, double epsilon,
                       const SmoothingOptions& smoothing = {}) {
  PlanOutput out;

  auto t0 = std::chrono::steady_clock::now();
  // Boundary velocities above epsilon are left to the planner, which reports
  // them as a boundary failure rather than a parameter error.
  out.curves = reconstruct(pre.tables, epsilon, 0.0);
  out.reconstruct_ms = detail::ms_since(t0);

  t0 = std::chrono::steady_clock::now();
  CniResult cni = construct_profile(pre.table, out.curves, prob.sdot_start, prob.sdot_end);
  out.cni_ms = detail::ms_since(t0);
  if (!cni.ok()) {
    out.reason = cni.reason;
    out.failure_s = cni.failure_s;
    return out;
  }
  out.raw = std::move(*cni.profile);

  t0 = std::chrono::steady_clock::now();
  out.smoothed = smooth_all(pre.table, out.curves, out.raw, smoothing);
  out.bio_ms = detail::ms_since(t0);

  out.trajectory = time_reparameterize(out.smoothed);
  actuator_traces(out.trajectory, prob.model, prob.path, pre.map);
  out.metric = metrics(out.trajectory, out.smoothed);
  out.trajectory.cruise_proportion = out.metric.cruise_proportion;
  out.trajectory.comp_time_ms = out.cni_ms + out.bio_ms;
  out.ok = true;
  return out;
}

}  // namespace topp
