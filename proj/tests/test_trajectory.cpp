#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "topp/pipeline.hpp"

using namespace topp;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Vec vm2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Problem unit_problem(double v_max, double a_max, double len = 2.0, int grid = 1000) {
  Problem prob;
  prob.path.control = {v2(0, 0), v2(len / 3.0, 0), v2(2.0 * len / 3.0, 0), v2(len, 0)};
  prob.model = KinematicModel::unit(2);
  prob.limits = {vm2(v_max, v_max), vm2(a_max, a_max)};
  prob.grid = grid;
  return prob;
}

Problem caster_problem(int grid = 1000) {
  Problem prob;
  prob.path.control = {v2(0, 0), v2(1, 0), v2(1, 1), v2(2, 1)};
  prob.path.linear_orientation = true;
  prob.model = KinematicModel::diff_caster(0.2);
  prob.limits = {vm2(2.0, 2.0), vm2(3.0, 3.0)};
  prob.grid = grid;
  return prob;
}

}  // namespace

TEST_CASE("trapezoid traveling time matches the closed form") {
  const Problem prob = unit_problem(1.0, 1.0);
  const Precomputed pre = precompute(prob);
  const PlanOutput out = plan(prob, pre, 1.0);
  REQUIRE(out.ok);
  CHECK(std::abs(out.trajectory.traveling_time - 3.0) < 1e-3);
  CHECK(out.trajectory.t.front() == 0.0);
  for (std::size_t k = 1; k < out.trajectory.t.size(); ++k)
    CHECK(out.trajectory.t[k] > out.trajectory.t[k - 1]);
}

TEST_CASE("triangle traveling time matches the closed form") {
  const Problem prob = unit_problem(5.0, 1.0);
  const Precomputed pre = precompute(prob);
  const PlanOutput out = plan(prob, pre, 5.0);
  REQUIRE(out.ok);
  CHECK(std::abs(out.trajectory.traveling_time - 2.0 * std::sqrt(2.0)) < 1e-3);
}

TEST_CASE("a constant cruise cell contributes length over velocity") {
  PhaseProfile p;
  p.ds = 0.01;
  p.path_length = 1.0;
  p.sdot.assign(101, 0.5);
  p.sddot.assign(101, 0.0);
  p.tag.assign(101, SegTag::Arc);
  const Trajectory tr = time_reparameterize(p);
  CHECK(tr.traveling_time == doctest::Approx(1.0 / 0.5).epsilon(1e-12));
}

TEST_CASE("interior zero velocity is a degenerate profile") {
  PhaseProfile p;
  p.ds = 0.01;
  p.path_length = 1.0;
  p.sdot.assign(101, 0.5);
  p.sddot.assign(101, 0.0);
  p.tag.assign(101, SegTag::Arc);
  p.sdot[50] = 0.0;
  CHECK_THROWS_AS(time_reparameterize(p), std::runtime_error);
}

TEST_CASE("halving the step size converges on the trapezoid time") {
  const Problem p1 = unit_problem(1.0, 1.0, 2.0, 500);
  const Problem p2 = unit_problem(1.0, 1.0, 2.0, 1000);
  const double t1 = plan(p1, precompute(p1), 1.0).trajectory.traveling_time;
  const double t2 = plan(p2, precompute(p2), 1.0).trajectory.traveling_time;
  const double e1 = std::abs(t1 - 3.0), e2 = std::abs(t2 - 3.0);
  CHECK(e2 <= 0.75 * e1 + 1e-9);  // at least ~1st order step-halving gain
}

TEST_CASE("unit model actuator traces reduce to the phase profile") {
  const Problem prob = unit_problem(1.0, 1.0);
  const Precomputed pre = precompute(prob);
  const PlanOutput out = plan(prob, pre, 1.0);
  REQUIRE(out.ok);
  const Trajectory& tr = out.trajectory;
  for (int k = 0; k < static_cast<int>(tr.s.size()); k += 97) {
    CHECK(tr.act_vel(0, k) == doctest::Approx(tr.sdot[k]).epsilon(1e-9));
    CHECK(tr.act_acc(0, k) == doctest::Approx(tr.sddot[k]).epsilon(1e-9));
  }
}

TEST_CASE("acceleration saturates on pure bang segments before smoothing") {
  const Problem prob = unit_problem(5.0, 1.0);
  const Precomputed pre = precompute(prob);
  const PlanOutput out = plan(prob, pre, 5.0);
  REQUIRE(out.ok);
  // raw CNI profile: beta segments run exactly at +a_max on the unit model
  int saturated = 0;
  for (int k = 0; k <= out.raw.grid_size(); ++k)
    if (out.raw.tag[k] == SegTag::Accel &&
        std::abs(out.raw.sddot[k] - 1.0) < 1e-9)
      ++saturated;
  CHECK(saturated > out.raw.grid_size() / 4);
}

TEST_CASE("toy model traces match finite-differenced positions") {
  const Problem prob = caster_problem();
  const Precomputed pre = precompute(prob);
  const PlanOutput out = plan(prob, pre, 1.0);
  REQUIRE(out.ok);
  const Trajectory& tr = out.trajectory;
  // oracle: v_i(t) ~ d/dt of actuator displacement integral, via chain rule
  // against finite differences of q(s(t)) through the Jacobian at midpoints
  for (std::size_t k = 10; k + 10 < tr.s.size(); k += 53) {
    const double dt = tr.t[k + 1] - tr.t[k - 1];
    const ConfigDerivatives a = config_derivatives(prob.path, pre.map, tr.s[k - 1]);
    const ConfigDerivatives b = config_derivatives(prob.path, pre.map, tr.s[k + 1]);
    const ConfigDerivatives c = config_derivatives(prob.path, pre.map, tr.s[k]);
    const Vec qdot = (b.q - a.q) / dt;
    const Vec v_fd = prob.model.jacobian(c.q) * qdot;
    for (int i = 0; i < 2; ++i)
      CHECK(std::abs(v_fd[i] - tr.act_vel(i, static_cast<int>(k))) < 1e-4 +
            1e-2 * std::abs(tr.act_vel(i, static_cast<int>(k))));
  }
}

TEST_CASE("trajectory satisfies the actuator constraint certificate") {
  for (double eps : {0.6, 1.0}) {
    const Problem prob = caster_problem();
    const Precomputed pre = precompute(prob);
    const PlanOutput out = plan(prob, pre, eps);
    REQUIRE(out.ok);
    const Trajectory& tr = out.trajectory;
    for (int k = 0; k < static_cast<int>(tr.s.size()); ++k) {
      for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(tr.act_vel(i, k)) <= prob.limits.v_max[i] + 1e-6);
        CHECK(std::abs(tr.act_acc(i, k)) <= prob.limits.a_max[i] + 1e-6);
      }
    }
  }
}

TEST_CASE("cruise proportion: trapezoid near one half, triangle zero") {
  const Problem trap = unit_problem(1.0, 1.0);
  const PlanOutput a = plan(trap, precompute(trap), 1.0);
  REQUIRE(a.ok);
  CHECK(a.metric.cruise_proportion > 0.4);
  CHECK(a.metric.cruise_proportion < 0.55);

  const Problem tri = unit_problem(5.0, 1.0);
  const PlanOutput b = plan(tri, precompute(tri), 5.0);
  REQUIRE(b.ok);
  CHECK(b.metric.cruise_proportion == 0.0);
}

TEST_CASE("an all-cruise profile reports full proportion minus end ramps") {
  const Problem prob = unit_problem(1.0, 10.0, 2.0, 1000);  // sharp ramps
  Problem p = prob;
  p.sdot_start = 0.0;
  p.sdot_end = 0.0;
  const PlanOutput out = plan(p, precompute(p), 0.5);
  REQUIRE(out.ok);
  CHECK(out.metric.cruise_proportion > 0.9);
}
