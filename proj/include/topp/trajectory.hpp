#pragma once

#include <cmath>
#include <vector>

#include "topp/geometry.hpp"
#include "topp/model.hpp"
#include "topp/planner.hpp"

namespace topp {

/// Time-domain trajectory: t -> (s, sdot, sddot) plus actuator traces.
struct Trajectory {
  std::vector<double> t;
  std::vector<double> s, sdot, sddot;
  Mat act_vel;  // m x samples, filled by actuator_traces
  Mat act_acc;
  double traveling_time = 0.0;
  double cruise_proportion = 0.0;
  double comp_time_ms = 0.0;
};

/// t(s) accumulated per grid cell with the constant-acceleration closed form
/// dt = 2*ds / (sdot_k + sdot_{k+1}), which is exact for piecewise-constant
/// path acceleration and handles resting endpoints.
inline Trajectory time_reparameterize(const PhaseProfile& p) {
  const int n = p.grid_size();
  Trajectory tr;
  tr.t.resize(static_cast<std::size_t>(n) + 1);
  tr.s.resize(static_cast<std::size_t>(n) + 1);
  tr.sdot = p.sdot;
  tr.sddot = p.sddot;
  tr.t[0] = 0.0;
  for (int k = 0; k <= n; ++k) tr.s[static_cast<std::size_t>(k)] = p.s_at(k);
  for (int k = 1; k < n; ++k) {
    if (p.sdot[static_cast<std::size_t>(k)] <= 0.0)
      throw std::runtime_error("time_reparameterize: degenerate profile, sdot=0 at s=" +
                               std::to_string(p.s_at(k)));
  }
  for (int k = 0; k < n; ++k) {
    const double vsum = p.sdot[static_cast<std::size_t>(k)] + p.sdot[static_cast<std::size_t>(k + 1)];
    if (vsum <= 0.0)
      throw std::runtime_error("time_reparameterize: degenerate cell at s=" +
                               std::to_string(p.s_at(k)));
    tr.t[static_cast<std::size_t>(k + 1)] = tr.t[static_cast<std::size_t>(k)] + 2.0 * p.ds / vsum;
  }
  tr.traveling_time = tr.t.back();
  return tr;
}

/// Actuator traces v = J q_s sdot and a = J q_s sddot + (J_s q_s + J q_ss) sdot^2.
inline void actuator_traces(Trajectory& tr, const KinematicModel& model,
                            const BezierPath& path, const ArcLengthMap& map) {
  const int m = model.actuator_dim;
  const int ns = static_cast<int>(tr.s.size());
  tr.act_vel.resize(m, ns);
  tr.act_acc.resize(m, ns);
  for (int k = 0; k < ns; ++k) {
    const ConfigDerivatives cd = config_derivatives(path, map, tr.s[static_cast<std::size_t>(k)]);
    const Mat J = model.jacobian(cd.q);
    const Mat Js = model.jacobian_s(cd.q, cd.q_s);
    const Vec f = J * cd.q_s;
    const Vec g = Js * cd.q_s + J * cd.q_ss;
    const double sd = tr.sdot[static_cast<std::size_t>(k)];
    tr.act_vel.col(k) = f * sd;
    tr.act_acc.col(k) = f * tr.sddot[static_cast<std::size_t>(k)] + g * sd * sd;
  }
}

struct TrajectoryMetrics {
  double traveling_time = 0.0;
  double cruise_proportion = 0.0;  // path-length fraction spent on switch arcs
};

/// Cruise proportion is measured as the path-length fraction of cells whose
/// samples carry the switch-arc tag.
inline TrajectoryMetrics metrics(const Trajectory& tr, const PhaseProfile& p) {
  const int n = p.grid_size();
  int arc_cells = 0;
  for (int k = 0; k < n; ++k) {
    if (p.tag[static_cast<std::size_t>(k)] == SegTag::Arc &&
        p.tag[static_cast<std::size_t>(k + 1)] == SegTag::Arc)
      ++arc_cells;
  }
  TrajectoryMetrics m;
  m.traveling_time = tr.traveling_time;
  m.cruise_proportion = static_cast<double>(arc_cells) / n;
  return m;
}

}  // namespace topp
