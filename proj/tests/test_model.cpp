#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "topp/model.hpp"

using namespace topp;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Vec vm(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

BezierPath straight2(double len) {
  BezierPath p;
  p.control = {v2(0, 0), v2(len / 3.0, 0), v2(2.0 * len / 3.0, 0), v2(len, 0)};
  return p;
}

BezierPath curved_oriented() {
  BezierPath p;
  p.control = {v2(0, 0), v2(1, 0), v2(1, 1), v2(2, 1)};
  p.linear_orientation = true;
  return p;
}

}  // namespace

TEST_CASE("unit model on a straight path: A rows are +/-1, B zero") {
  const BezierPath p = straight2(3.0);
  const ArcLengthMap map = build_arclength_map(p, 256);
  const KinematicModel m = KinematicModel::unit(2);
  const ActuatorLimits lim{vm({1, 1}), vm({1, 1})};
  const ConstraintTable t = build_constraint_table(m, lim, p, map, 64);
  for (int k = 0; k <= t.grid_size; ++k) {
    CHECK(t.A(0, k) == doctest::Approx(1.0).epsilon(1e-9));   // x row, path along x
    CHECK(t.A(2, k) == doctest::Approx(-1.0).epsilon(1e-9));  // negated stack
    CHECK(t.B.col(k).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("C and D columns are constant -a_max / -v_max stacks") {
  const BezierPath p = straight2(2.0);
  const ArcLengthMap map = build_arclength_map(p, 256);
  const KinematicModel m = KinematicModel::unit(2);
  const ActuatorLimits lim{vm({1.5, 2.5}), vm({0.5, 3.0})};
  const ConstraintTable t = build_constraint_table(m, lim, p, map, 32);
  for (int k = 0; k <= t.grid_size; ++k) {
    CHECK(t.C(0, k) == -0.5);
    CHECK(t.C(1, k) == -3.0);
    CHECK(t.C(2, k) == -0.5);
    CHECK(t.C(3, k) == -3.0);
    CHECK(t.D(0, k) == -1.5);
    CHECK(t.D(1, k) == -2.5);
  }
  CHECK((t.C.array() <= 0.0).all());
  CHECK((t.D.array() <= 0.0).all());
}

TEST_CASE("stacked rows are exact negations for A and B") {
  const BezierPath p = curved_oriented();
  const ArcLengthMap map = build_arclength_map(p, 512);
  const KinematicModel m = KinematicModel::diff_caster(0.2);
  const ActuatorLimits lim{vm({2, 2}), vm({3, 3})};
  const ConstraintTable t = build_constraint_table(m, lim, p, map, 128);
  const int half = t.rows() / 2;
  for (int k = 0; k <= t.grid_size; ++k)
    for (int i = 0; i < half; ++i) {
      CHECK(t.A(i, k) == doctest::Approx(-t.A(i + half, k)).epsilon(1e-15));
      CHECK(t.B(i, k) == doctest::Approx(-t.B(i + half, k)).epsilon(1e-15));
    }
}

TEST_CASE("diff caster at s=0 matches a symbolic hand expansion") {
  const BezierPath p = curved_oriented();
  const ArcLengthMap map = build_arclength_map(p, 512);
  const double b = 0.2;
  const KinematicModel m = KinematicModel::diff_caster(b);
  const ActuatorLimits lim{vm({2, 2}), vm({3, 3})};
  const ConstraintTable t = build_constraint_table(m, lim, p, map, 128);

  // At s=0: theta = 0, tangent of the Bezier points along +x, so
  // q_s = (1, 0, pi/s_e) and J = [[1, 0, b], [1, 0, -b]].
  const double se = map.total_length;
  const double ts = M_PI / se;
  CHECK(t.A(0, 0) == doctest::Approx(1.0 + b * ts).epsilon(1e-12));
  CHECK(t.A(1, 0) == doctest::Approx(1.0 - b * ts).epsilon(1e-12));

  // B = Js q_s + J q_ss with Js = [[0, ts, 0], [0, ts, 0]] at theta = 0.
  const ConfigDerivatives cd = config_derivatives(p, map, 0.0);
  const double b0 = ts * cd.q_s[1] + cd.q_ss[0] + b * cd.q_ss[2];
  const double b1 = ts * cd.q_s[1] + cd.q_ss[0] - b * cd.q_ss[2];
  CHECK(t.B(0, 0) == doctest::Approx(b0).epsilon(1e-12));
  CHECK(t.B(1, 0) == doctest::Approx(b1).epsilon(1e-12));
}

TEST_CASE("jacobian_s matches finite differences of J along s") {
  const BezierPath p = curved_oriented();
  const ArcLengthMap map = build_arclength_map(p, 2048);
  const KinematicModel m = KinematicModel::diff_caster(0.2);
  const double h = 1e-6;
  for (int i = 1; i < 10; ++i) {
    const double s = map.total_length * i / 10.0;
    const ConfigDerivatives cd = config_derivatives(p, map, s);
    const ConfigDerivatives cp = config_derivatives(p, map, s + h);
    const ConfigDerivatives cm = config_derivatives(p, map, s - h);
    const Mat fd = (m.jacobian(cp.q) - m.jacobian(cm.q)) / (2.0 * h);
    const Mat js = m.jacobian_s(cd.q, cd.q_s);
    CHECK((fd - js).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("unit model acceleration bounds are the box limits") {
  const BezierPath p = straight2(2.0);
  const ArcLengthMap map = build_arclength_map(p, 256);
  const KinematicModel m = KinematicModel::unit(2);
  const ActuatorLimits lim{vm({1, 1}), vm({1.25, 2.0})};
  const ConstraintTable t = build_constraint_table(m, lim, p, map, 64);
  for (double s : {0.0, 0.4, 1.0, 1.9}) {
    for (double sdot : {0.0, 0.5, 1.0}) {
      const AccelBounds ab = accel_bounds(t, s, sdot);
      CHECK(ab.alpha == doctest::Approx(-1.25).epsilon(1e-9));
      CHECK(ab.beta == doctest::Approx(1.25).epsilon(1e-9));
    }
  }
}

TEST_CASE("acceleration bounds match brute-force row enumeration") {
  const BezierPath p = curved_oriented();
  const ArcLengthMap map = build_arclength_map(p, 512);
  const KinematicModel m = KinematicModel::diff_caster(0.2);
  const ActuatorLimits lim{vm({2, 2}), vm({3, 3})};
  const ConstraintTable t = build_constraint_table(m, lim, p, map, 200);
  const double s = 0.5, sdot = 0.3;
  const AccelBounds ab = accel_bounds(t, s, sdot);

  Vec a, b, c;
  t.rows_at(s, a, b, c);
  double alpha = -kUnbounded, beta = kUnbounded;
  for (int i = 0; i < a.size(); ++i) {
    if (std::abs(a[i]) <= t.zero_tol) continue;
    const double v = (-b[i] * sdot * sdot - c[i]) / a[i];
    if (a[i] > 0.0)
      beta = std::min(beta, v);
    else
      alpha = std::max(alpha, v);
  }
  CHECK(ab.alpha == doctest::Approx(alpha).epsilon(1e-14));
  CHECK(ab.beta == doctest::Approx(beta).epsilon(1e-14));
}

TEST_CASE("any sddot in [alpha, beta] satisfies every row") {
  const BezierPath p = curved_oriented();
  const ArcLengthMap map = build_arclength_map(p, 512);
  const KinematicModel m = KinematicModel::diff_caster(0.2);
  const ActuatorLimits lim{vm({2, 2}), vm({3, 3})};
  const ConstraintTable t = build_constraint_table(m, lim, p, map, 200);
  for (int k = 0; k <= t.grid_size; k += 25) {
    const double sdot = 0.4;
    const AccelBounds ab = accel_bounds_at_node(t, k, sdot);
    if (ab.beta < ab.alpha) continue;
    for (double w : {0.0, 0.5, 1.0}) {
      const double sddot = ab.alpha + w * (ab.beta - ab.alpha);
      const Vec lhs = t.A.col(k) * sddot + t.B.col(k) * sdot * sdot + t.C.col(k);
      for (int i = 0; i < lhs.size(); ++i)
        if (std::abs(t.A(i, k)) > t.zero_tol) CHECK(lhs[i] <= 1e-9);
    }
  }
}

TEST_CASE("bounds at rest reduce to -C/A over positive-A rows") {
  const BezierPath p = curved_oriented();
  const ArcLengthMap map = build_arclength_map(p, 512);
  const KinematicModel m = KinematicModel::diff_caster(0.2);
  const ActuatorLimits lim{vm({2, 2}), vm({3, 3})};
  const ConstraintTable t = build_constraint_table(m, lim, p, map, 128);
  const int k = 40;
  const AccelBounds ab = accel_bounds_at_node(t, k, 0.0);
  double beta = kUnbounded;
  for (int i = 0; i < t.rows(); ++i)
    if (t.A(i, k) > t.zero_tol) beta = std::min(beta, -t.C(i, k) / t.A(i, k));
  CHECK(ab.beta == doctest::Approx(beta).epsilon(1e-14));
}

TEST_CASE("dimension and validity checks") {
  const BezierPath p = straight2(2.0);
  const ArcLengthMap map = build_arclength_map(p, 128);
  const ActuatorLimits lim{vm({1, 1}), vm({1, 1})};
  CHECK_THROWS_AS(
      build_constraint_table(KinematicModel::unit(2), lim, p, map, 8),
      std::invalid_argument);  // grid too small
  CHECK_THROWS_AS(
      build_constraint_table(KinematicModel::unit(3), lim, p, map, 64),
      std::invalid_argument);  // dim mismatch
  CHECK_THROWS_AS(
      build_constraint_table(KinematicModel::diff_caster(), lim, p, map, 64),
      std::invalid_argument);  // caster needs 3-dim configs
}

TEST_CASE("non-finite jacobian reports the offending location") {
  const BezierPath p = straight2(2.0);
  const ArcLengthMap map = build_arclength_map(p, 128);
  KinematicModel m = KinematicModel::unit(2);
  m.jacobian = [](const Vec& q) {
    Mat j = Mat::Identity(2, 2);
    if (q[0] > 1.0) j(0, 0) = std::numeric_limits<double>::quiet_NaN();
    return j;
  };
  const ActuatorLimits lim{vm({1, 1}), vm({1, 1})};
  CHECK_THROWS_AS(build_constraint_table(m, lim, p, map, 64), model_error);
}
