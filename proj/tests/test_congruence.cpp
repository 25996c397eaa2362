#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "disloc/congruence.hpp"

using namespace disloc;

namespace {
MetricField flat_metric(const Chart& ch) {
  return MetricField::direct(
      ch, [](const Vec3&) { return Mat3(Mat3::Identity()); },
      [](int, const Vec3&) { return Mat3(Mat3::Zero()); });
}

Vec3 circle_tangent(const Vec3& p) {
  double r = std::hypot(p[0], p[1]);
  return Vec3(-p[1] / r, p[0] / r, 0.0);
}
}  // namespace

TEST_CASE("frenet data of planar circles") {
  Chart ch(Vec3(-3, -3, -1), Vec3(3, 3, 1));
  MetricField g = flat_metric(ch);
  for (double r : {0.5, 1.0, 2.0}) {
    FrenetState st = frenet_along(g, circle_tangent, Vec3(r, 0, 0));
    CHECK(st.kappa == doctest::Approx(1.0 / r).epsilon(1e-6));
    CHECK(std::abs(st.tau) < 1e-6);
    CHECK((st.e1 - Vec3(0, 1, 0)).norm() < 1e-8);
    CHECK((st.e2 - Vec3(-1, 0, 0)).norm() < 1e-6);
  }
}

TEST_CASE("straight congruences have no frenet frame") {
  Chart ch(Vec3(-1, -1, -1), Vec3(1, 1, 1));
  MetricField g = flat_metric(ch);
  auto l = [](const Vec3&) { return Vec3(1, 0, 0); };
  CHECK_THROWS_AS(frenet_along(g, l, Vec3(0, 0, 0)), VanishingCurvature);
}

TEST_CASE("non-unit tangents are rejected") {
  Chart ch(Vec3(-1, -1, -1), Vec3(1, 1, 1));
  MetricField g = flat_metric(ch);
  auto l = [](const Vec3&) { return Vec3(2, 0, 0); };
  CHECK_THROWS_AS(frenet_along(g, l, Vec3(0, 0, 0)), InvalidField);
}

TEST_CASE("complex curvature tracks the burgers angle") {
  Chart ch(Vec3(-3, -3, -1), Vec3(3, 3, 1));
  MetricField g = flat_metric(ch);
  VolterraFields edge_vf;
  edge_vf.l = circle_tangent;
  edge_vf.m = [](const Vec3& p) {
    double r = std::hypot(p[0], p[1]);
    return Vec3(-p[0] / r, -p[1] / r, 0.0);
  };
  edge_vf.n = [](const Vec3&) { return Vec3(0, 0, 1); };

  SUBCASE("theta = 0 gives a real psi = kappa") {
    for (double a : {0.0, 0.8, 2.0, 4.5}) {
      Vec3 p(std::cos(a), std::sin(a), 0.0);
      FrenetState st = frenet_along(g, circle_tangent, p, edge_vf);
      CHECK(std::abs(st.theta) < 1e-8);
      CHECK(std::abs(st.psi.real() - st.kappa) < 1e-8);
      CHECK(std::abs(st.psi.imag()) < 1e-8);
      CHECK(st.complex_frenet_residual < 1e-6);
      CHECK((st.burgers_direction() - st.e2).norm() < 1e-8);
    }
  }
  SUBCASE("theta = pi/2 gives an imaginary psi = i kappa") {
    VolterraFields screwlike;
    screwlike.l = circle_tangent;
    screwlike.m = [](const Vec3&) { return Vec3(0, 0, 1); };
    screwlike.n = [](const Vec3& p) {
      double r = std::hypot(p[0], p[1]);
      return Vec3(-p[0] / r, -p[1] / r, 0.0);
    };
    Vec3 p(1, 0, 0);
    FrenetState st = frenet_along(g, circle_tangent, p, screwlike);
    CHECK(st.theta == doctest::Approx(M_PI / 2.0).epsilon(1e-8));
    CHECK(std::abs(st.psi.real()) < 1e-8);
    CHECK(st.psi.imag() == doctest::Approx(st.kappa).epsilon(1e-8));
    CHECK(st.complex_frenet_residual < 1e-6);
  }
}

TEST_CASE("climb component") {
  Chart ch(Vec3(-3, -3, -1), Vec3(3, 3, 1));
  MetricField g = flat_metric(ch);
  VolterraFields edge_vf;
  edge_vf.l = circle_tangent;
  edge_vf.m = [](const Vec3& p) {
    double r = std::hypot(p[0], p[1]);
    return Vec3(-p[0] / r, -p[1] / r, 0.0);
  };
  edge_vf.n = [](const Vec3&) { return Vec3(0, 0, 1); };
  Vec3 p(1, 0, 0);

  SUBCASE("radial burgers field on a circle does not climb") {
    FrenetState st = frenet_along(g, circle_tangent, p, edge_vf);
    auto b = [&](const Vec3& q) { return Vec3(0.1 * edge_vf.m(q)); };
    double climb = climb_component(b, st, g, p);
    CHECK(std::abs(climb) < 1e-6);
    CHECK(std::abs(climb_closed_form(0.0, 0.1, st.kappa, st.tau, st.theta, 0.0)) < 1e-12);
  }
  SUBCASE("tangential burgers at theta = pi/2 climbs at b0 kappa sin(theta)") {
    VolterraFields screwlike;
    screwlike.l = circle_tangent;
    screwlike.m = [](const Vec3&) { return Vec3(0, 0, 1); };
    screwlike.n = [](const Vec3& q) {
      double r = std::hypot(q[0], q[1]);
      return Vec3(-q[0] / r, -q[1] / r, 0.0);
    };
    FrenetState st = frenet_along(g, circle_tangent, p, screwlike);
    double b0 = 0.1;
    auto b = [b0](const Vec3& q) { return Vec3(b0 * circle_tangent(q)); };
    double climb = climb_component(b, st, g, p);
    double want = climb_closed_form(b0, 0.0, st.kappa, st.tau, st.theta, 0.0);
    CHECK(want == doctest::Approx(b0).epsilon(1e-6));  // kappa = 1, sin(theta) = 1
    CHECK(climb == doctest::Approx(want).epsilon(1e-6));
  }
  SUBCASE("constant burgers field along a frame line does not climb") {
    FrenetState st;
    st.e1 = Vec3(1, 0, 0);
    st.e2 = Vec3(0, 1, 0);
    st.e3 = Vec3(0, 0, 1);
    st.kappa = 1.0;
    st.theta = 0.0;
    st.has_theta = true;
    auto b = [](const Vec3&) { return Vec3(0.3, 0.0, 0.0); };
    CHECK(std::abs(climb_component(b, st, g, Vec3(0.5, 0.5, 0.0))) < 1e-10);
  }
  SUBCASE("out-of-plane burgers vector is rejected") {
    FrenetState st = frenet_along(g, circle_tangent, p, edge_vf);
    auto b = [&](const Vec3& q) { return Vec3(0.1 * edge_vf.n(q)); };
    CHECK_THROWS_AS(climb_component(b, st, g, p), NotVolterra);
  }
}

TEST_CASE("principal congruences") {
  SUBCASE("pattern recovery") {
    double gam = 0.3, phi = M_PI / 6.0, H = 0.4;
    Vec3 k(std::sin(phi), -std::cos(phi), 0.0);
    Vec3 e3(0, 0, 1);
    Mat3 gt = Mat3(-gam * (k * e3.transpose() + e3 * k.transpose()));
    Vec3 g3(std::cos(phi), std::sin(phi), 0.0);
    Vec3 t = Vec3(-2.0 * gam * g3 + 2.0 * H * e3);
    PrincipalDecomposition pd = principal_congruences(gt, t);
    CHECK(pd.gamma_scalar == doctest::Approx(gam).epsilon(1e-8));
    CHECK(pd.phi == doctest::Approx(phi).epsilon(1e-8));
    CHECK(pd.H == doctest::Approx(H).epsilon(1e-12));
    CHECK(pd.mu == doctest::Approx(std::hypot(H, gam)).epsilon(1e-8));
    CHECK(pd.rho_bg == doctest::Approx(pd.mu).epsilon(1e-12));
    CHECK(pd.t_residual < 1e-8);
    CHECK((pd.gamma3 - g3).norm() < 1e-8);
    CHECK_FALSE(pd.degenerate);
  }
  SUBCASE("wrong eigenvalue pattern is rejected") {
    Mat3 gt = Vec3(1, 2, 3).asDiagonal();
    CHECK_THROWS_AS(principal_congruences(gt, Vec3(0, 0, 1)), PatternMismatch);
  }
  SUBCASE("umbilical degenerate branch") {
    double h0 = 0.5;
    PrincipalDecomposition pd =
        principal_congruences(Mat3(Mat3::Zero()), Vec3(0, 0, 2 * h0));
    CHECK(pd.degenerate);
    CHECK(pd.H == doctest::Approx(h0));
    CHECK(pd.rho_bg == doctest::Approx(h0));
    CHECK(pd.t_residual < 1e-12);
  }
  SUBCASE("asymmetric input is rejected") {
    Mat3 gt = Mat3::Zero();
    gt(0, 1) = 1.0;
    CHECK_THROWS_AS(principal_congruences(gt, Vec3::Zero()), InvalidField);
  }
}

TEST_CASE("leaf normal curvature of the umbilical metric is H in every direction") {
  Chart ch(Vec3(0, 0, 0), Vec3(1, 1, 1));
  double h0 = 0.5;
  MovingFrame frame(ch, umbilical_coframe(h0));
  MetricField g = MetricField::from_frame(frame);
  for (double phi : {0.0, 0.7, 1.9, 3.4}) {
    Vec3 u(std::cos(phi), std::sin(phi), 0.0);
    CHECK(leaf_normal_curvature(g, Vec3(0.5, 0.5, 0.5), u) ==
          doctest::Approx(h0).epsilon(1e-8));
  }
}
