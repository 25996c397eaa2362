#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "disloc/density.hpp"

using namespace disloc;

namespace {
Chart box() { return Chart(Vec3(-0.5, -0.5, -0.5), Vec3(1.5, 1.5, 1.5)); }
}  // namespace

TEST_CASE("holonomic frame carries no torsion") {
  MovingFrame frame(box(), holonomic_coframe());
  auto verdict = is_holonomic(frame, 1e-10);
  CHECK(verdict.holonomic);
  CHECK(verdict.max_torsion < 1e-12);
  DislocationDensity d(frame);
  CHECK(d.alpha_at(Vec3(0.3, 0.3, 0.3)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("screw frame anholonomy and torsion") {
  double b0 = 0.1;
  MovingFrame frame(box(), screw_coframe(b0));
  Vec3 p(0.6, 0.2, 0.9);
  Rank3 c = anholonomy_at(frame, p);
  CHECK(c[2](0, 1) == doctest::Approx(-b0).epsilon(1e-10));
  CHECK(c[2](1, 0) == doctest::Approx(b0).epsilon(1e-10));
  CHECK(std::abs(c[0].cwiseAbs().maxCoeff()) < 1e-10);
  CHECK(std::abs(c[1].cwiseAbs().maxCoeff()) < 1e-10);
  Rank3 s = torsion_at(frame, p);
  CHECK(s[2](0, 1) == doctest::Approx(0.5 * b0).epsilon(1e-10));
  CHECK_FALSE(is_holonomic(frame, 1e-10).holonomic);
}

TEST_CASE("screw density is a pure screw dyad") {
  double b0 = 0.1;
  DislocationDensity d(MovingFrame(box(), screw_coframe(b0)));
  for (const Vec3& p : d.frame().chart().test_lattice()) {
    Mat3 a = d.alpha_at(p);
    Mat3 expect = Mat3::Zero();
    expect(2, 2) = b0;
    CHECK((a - expect).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(d.t_at(p).norm() < 1e-10);  // traceless axial part
  }
}

TEST_CASE("edge density and axial covector") {
  double beta = 0.2;
  DislocationDensity d(MovingFrame(box(), edge_coframe(beta)));
  Vec3 p(0.4, 0.7, 0.1);
  Mat3 a = d.alpha_at(p);
  Mat3 expect = Mat3::Zero();
  expect(2, 0) = beta;
  CHECK((a - expect).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((d.t_at(p) - Vec3(0, beta, 0)).norm() < 1e-10);
}

TEST_CASE("umbilical density is antisymmetric with axial t = 2 h0 E3") {
  double h0 = 0.5;
  DislocationDensity d(MovingFrame(box(), umbilical_coframe(h0)));
  for (const Vec3& p : d.frame().chart().test_lattice()) {
    Mat3 a = d.alpha_at(p);
    Mat3 expect = Mat3::Zero();
    expect(0, 1) = h0;
    expect(1, 0) = -h0;
    CHECK((a - expect).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(d.gamma_at(p).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((d.t_at(p) - Vec3(0, 0, 2 * h0)).norm() < 1e-8);
  }
}

TEST_CASE("axial covector equals the anholonomy trace") {
  MovingFrame frame(box(), edge_coframe(0.35));
  DislocationDensity d(frame);
  for (const Vec3& p : frame.chart().test_lattice()) {
    Rank3 c = anholonomy_at(frame, p);
    Vec3 trace;
    for (int a = 0; a < 3; ++a) {
      double acc = 0.0;
      for (int b = 0; b < 3; ++b) acc += c[b](a, b);
      trace[a] = frame.epsilon() * acc;
    }
    CHECK((d.t_at(p) - trace).norm() < 1e-8);
  }
}

TEST_CASE("decomposition closes on every built-in frame") {
  for (const CoframeSpec& spec :
       {holonomic_coframe(), screw_coframe(0.1), edge_coframe(0.2), umbilical_coframe(0.5)}) {
    DislocationDensity d(MovingFrame(box(), spec));
    for (const Vec3& p : d.frame().chart().test_lattice()) {
      CHECK(d.decomposition_residual(p) < 1e-10);
      CHECK(d.trace_identity_residual(p) < 1e-8);
    }
  }
}

TEST_CASE("orientation constant flips the density sign") {
  double b0 = 0.1;
  Vec3 p(0.3, 0.3, 0.3);
  DislocationDensity plus(MovingFrame(box(), screw_coframe(b0), +1.0));
  DislocationDensity minus(MovingFrame(box(), screw_coframe(b0), -1.0));
  CHECK((plus.alpha_at(p) + minus.alpha_at(p)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("grid-sampled frame reproduces the analytic density") {
  double b0 = 0.1;
  DislocationDensity analytic(MovingFrame(box(), screw_coframe(b0)));
  DislocationDensity gridded(MovingFrame(box(), screw_coframe(b0), +1.0, true));
  for (const Vec3& p : analytic.frame().chart().test_lattice()) {
    CHECK((analytic.alpha_at(p) - gridded.alpha_at(p)).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("a sign defect in the axial part breaks the closure identity") {
  MovingFrame frame(box(), umbilical_coframe(0.5));
  DislocationDensity d(frame);
  Vec3 p(0.5, 0.5, 0.5);
  Rank3 cobj = anholonomy_at(frame, p);
  Mat3 g = d.gamma_at(p);
  Vec3 t = -d.t_at(p);  // deliberately corrupted
  double res = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        double rhs = 0.5 * (t[a] * (b == c ? 1.0 : 0.0) - t[b] * (a == c ? 1.0 : 0.0));
        for (int dd = 0; dd < 3; ++dd) rhs -= levi_civita(a, b, dd) * g(dd, c);
        res = std::max(res, std::abs(frame.epsilon() * cobj[c](a, b) - rhs));
      }
  CHECK(res > 0.4);  // h0-sized violation, far above the closure tolerance
}

TEST_CASE("exterior derivative of the screw coframe") {
  double b0 = 0.1;
  MovingFrame frame(box(), screw_coframe(b0));
  Rank3 d = coframe_exterior_derivative_at(frame, Vec3(0.2, 0.8, 0.5));
  // dE^3 = b0 dX^1 ^ dX^2
  CHECK(d[2](0, 1) == doctest::Approx(b0).epsilon(1e-10));
  CHECK(d[2](1, 0) == doctest::Approx(-b0).epsilon(1e-10));
  CHECK(d[0].cwiseAbs().maxCoeff() < 1e-10);
  CHECK(d[1].cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("total line length over the unit cube") {
  double h0 = 0.5;
  MetricField g = MetricField::from_frame(MovingFrame(box(), umbilical_coframe(h0)));
  ScalarDensitySpec rho{[](const Vec3&) { return 1.0; }};
  double len = total_line_length(rho, g, Vec3(0, 0, 0), Vec3(1, 1, 1), 12);
  CHECK(len == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-10));
}

TEST_CASE("non-positive scalar density is rejected") {
  MetricField g = MetricField::from_frame(MovingFrame(box(), holonomic_coframe()));
  ScalarDensitySpec rho{[](const Vec3& p) { return p[0] - 0.5; }};
  CHECK_THROWS_AS(total_line_length(rho, g, Vec3(0, 0, 0), Vec3(1, 1, 1)), NonPositiveDensity);
}
