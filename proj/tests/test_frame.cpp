#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "disloc/frame.hpp"

using namespace disloc;

namespace {
Chart box() { return Chart(Vec3(-0.5, -0.5, -0.5), Vec3(1.5, 1.5, 1.5)); }
}  // namespace

TEST_CASE("coframe and frame are dual") {
  MovingFrame frame(box(), screw_coframe(0.1));
  for (const Vec3& p : frame.chart().test_lattice()) {
    Mat3 prod = frame.coframe_at(p) * frame.frame_at(p).transpose();
    CHECK((prod - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("screw coframe metric components") {
  double b0 = 0.1;
  MovingFrame frame(box(), screw_coframe(b0));
  MetricField g = MetricField::from_frame(frame);
  Vec3 p(0.7, 0.2, 0.4);
  Mat3 gm = g.at(p);
  CHECK(gm(0, 0) == doctest::Approx(1.0));
  CHECK(gm(1, 1) == doctest::Approx(1.0 + b0 * b0 * p[0] * p[0]).epsilon(1e-12));
  CHECK(gm(1, 2) == doctest::Approx(b0 * p[0]).epsilon(1e-12));
  CHECK(gm(2, 1) == doctest::Approx(b0 * p[0]).epsilon(1e-12));
  CHECK(gm(2, 2) == doctest::Approx(1.0));
  CHECK(g.sqrt_g(p) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("umbilical volume density") {
  double h0 = 0.5;
  MovingFrame frame(box(), umbilical_coframe(h0));
  for (const Vec3& p : frame.chart().test_lattice()) {
    CHECK(frame.volume_density(p) ==
          doctest::Approx(std::exp(-2.0 * h0 * p[2])).epsilon(1e-12));
  }
}

TEST_CASE("holonomic christoffels vanish") {
  MovingFrame frame(box(), holonomic_coframe());
  MetricField g = MetricField::from_frame(frame);
  auto gamma = g.christoffel(Vec3(0.3, 0.6, 0.1));
  for (const auto& m : gamma) CHECK(m.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("levi-civita connection is metric compatible") {
  MovingFrame frame(box(), screw_coframe(0.25));
  MetricField g = MetricField::from_frame(frame);
  for (const Vec3& p : frame.chart().test_lattice()) {
    auto gamma = g.christoffel(p);
    Mat3 gm = g.at(p);
    for (int C = 0; C < 3; ++C) {
      Mat3 dg = g.partial(C, p);
      for (int A = 0; A < 3; ++A)
        for (int B = 0; B < 3; ++B) {
          double nabla = dg(A, B);
          for (int D = 0; D < 3; ++D)
            nabla -= gamma[D](C, A) * gm(D, B) + gamma[D](C, B) * gm(A, D);
          CHECK(std::abs(nabla) < 1e-10);
        }
    }
  }
}

TEST_CASE("degenerate inputs are rejected") {
  SUBCASE("mirror coframe") {
    CoframeSpec spec;
    spec.name = "mirror";
    spec.components = [](const Vec3&) {
      Mat3 c = Mat3::Identity();
      c(0, 0) = -1.0;
      return c;
    };
    CHECK_THROWS_AS(MovingFrame(box(), spec), SingularCoframe);
  }
  SUBCASE("singular coframe") {
    CoframeSpec spec;
    spec.name = "rank2";
    spec.components = [](const Vec3&) {
      Mat3 c = Mat3::Identity();
      c(2, 2) = 0.0;
      return c;
    };
    CHECK_THROWS_AS(MovingFrame(box(), spec), SingularCoframe);
  }
  SUBCASE("invalid orientation constant") {
    CHECK_THROWS_AS(MovingFrame(box(), holonomic_coframe(), 2.0), InvalidField);
  }
  SUBCASE("non positive-definite metric") {
    CHECK_THROWS_AS(
        MetricField::direct(box(), [](const Vec3&) { return Mat3(-Mat3::Identity()); }),
        SingularMetric);
  }
}

TEST_CASE("metric cross product completes orthonormal triples") {
  MovingFrame frame(box(), holonomic_coframe());
  MetricField g = MetricField::from_frame(frame);
  Vec3 p(0.5, 0.5, 0.5);
  Vec3 c = g.cross(Vec3(1, 0, 0), Vec3(0, 1, 0), p);
  CHECK((c - Vec3(0, 0, 1)).norm() < 1e-14);

  MovingFrame uf(box(), umbilical_coframe(0.5));
  MetricField ug = MetricField::from_frame(uf);
  // frame legs are g-orthonormal, so their g-cross must close the triple
  Mat3 f = uf.frame_at(p).transpose();  // columns = frame legs E_a
  Vec3 e1 = f.col(0), e2 = f.col(1), e3 = f.col(2);
  CHECK((ug.cross(e1, e2, p) - e3).norm() < 1e-10);
  CHECK(ug.dot(e1, e2, p) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ug.norm(e1, p) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("covariant derivative") {
  SUBCASE("constant field in flat space is parallel") {
    MovingFrame frame(box(), holonomic_coframe());
    MetricField g = MetricField::from_frame(frame);
    auto v = [](const Vec3&) { return Vec3(0.3, -0.2, 0.9); };
    CHECK(levi_civita_covariant(g, v, Vec3(1, 1, 1), Vec3(0.4, 0.4, 0.4)).norm() < 1e-10);
  }
  SUBCASE("umbilical metric bends in-plane directions") {
    double h0 = 0.5;
    MovingFrame frame(box(), umbilical_coframe(h0));
    MetricField g = MetricField::from_frame(frame);
    Vec3 p(0.5, 0.5, 0.5);
    auto v = [](const Vec3&) { return Vec3(1, 0, 0); };
    Vec3 nab = levi_civita_covariant(g, v, Vec3(1, 0, 0), p);
    // Gamma^3_{11} = H g_11 with H = h0 here
    double g11 = g.at(p)(0, 0);
    CHECK(nab[2] == doctest::Approx(h0 * g11).epsilon(1e-8));
    CHECK(std::abs(nab[0]) < 1e-10);
    CHECK(std::abs(nab[1]) < 1e-10);
  }
}

TEST_CASE("frame partial matches finite differences of the inverse") {
  MovingFrame frame(box(), screw_coframe(0.3));
  Vec3 p(0.4, 0.1, 0.8);
  double h = 1e-5;
  for (int ax = 0; ax < 3; ++ax) {
    Vec3 pp = p, pm = p;
    pp[ax] += h;
    pm[ax] -= h;
    Mat3 fd = (frame.frame_at(pp) - frame.frame_at(pm)) / (2 * h);
    CHECK((frame.frame_partial(ax, p) - fd).cwiseAbs().maxCoeff() < 1e-8);
  }
}
