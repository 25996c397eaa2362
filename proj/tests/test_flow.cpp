#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "disloc/flow.hpp"

using namespace disloc;

namespace {
Chart box(double lo = -0.5, double hi = 1.5) {
  return Chart(Vec3(lo, lo, lo), Vec3(hi, hi, hi));
}

MetricField flat_metric(const Chart& ch) {
  return MetricField::direct(
      ch, [](const Vec3&) { return Mat3(Mat3::Identity()); },
      [](int, const Vec3&) { return Mat3(Mat3::Zero()); });
}

std::vector<double> time_lattice(int n, double dt, double t0 = 0.0) {
  std::vector<double> ts(n);
  for (int i = 0; i < n; ++i) ts[i] = t0 + i * dt;
  return ts;
}
}  // namespace

TEST_CASE("distortion rates") {
  SUBCASE("identity distortion is rate-free") {
    DistortionHistory h;
    h.chart = box();
    h.P = [](const Vec3&, double) { return Mat3(Mat3::Identity()); };
    h.t_samples = time_lattice(21, 0.05);
    DistortionRates r = distortion_rates(h, Vec3(0.5, 0.5, 0.5), 0.5);
    CHECK(r.S_p.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(r.D_p.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(r.gdot_residual < 1e-12);
  }
  SUBCASE("exponential dilation has constant rate a I") {
    double a = 0.3;
    DistortionHistory h;
    h.chart = box();
    h.P = [a](const Vec3&, double t) { return Mat3(std::exp(a * t) * Mat3::Identity()); };
    h.P_dot = [a](const Vec3&, double t) {
      return Mat3(a * std::exp(a * t) * Mat3::Identity());
    };
    h.t_samples = time_lattice(21, 0.05);
    DistortionRates r = distortion_rates(h, Vec3(0.5, 0.5, 0.5), 0.5);
    CHECK((r.S_p - Mat3(a * Mat3::Identity())).cwiseAbs().maxCoeff() < 1e-12);
    // g = e^{-2at} I, so D_p = a g and gdot = -2 D_p
    Mat3 want_dp = Mat3(a * std::exp(-2.0 * a * 0.5) * Mat3::Identity());
    CHECK((r.D_p - want_dp).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(r.gdot_residual < 1e-6);
  }
  SUBCASE("finite-difference rate matches the analytic one") {
    double a = 0.3;
    DistortionHistory ha, hf;
    ha.chart = hf.chart = box();
    auto P = [a](const Vec3&, double t) { return Mat3(std::exp(a * t) * Mat3::Identity()); };
    ha.P = hf.P = P;
    ha.P_dot = [a](const Vec3&, double t) {
      return Mat3(a * std::exp(a * t) * Mat3::Identity());
    };
    ha.t_samples = hf.t_samples = time_lattice(21, 0.05);
    Vec3 p(0.5, 0.5, 0.5);
    DistortionRates ra = distortion_rates(ha, p, 0.5);
    DistortionRates rf = distortion_rates(hf, p, 0.5);
    CHECK((ra.S_p - rf.S_p).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("simple shear at t = 0") {
    double b0 = 0.25;
    Mat3 shear = Mat3::Zero();
    shear(0, 1) = b0;
    DistortionHistory h;
    h.chart = box();
    h.P = [shear](const Vec3&, double t) { return Mat3(Mat3::Identity() + t * shear); };
    h.P_dot = [shear](const Vec3&, double) { return shear; };
    h.t_samples = time_lattice(21, 0.05, -0.5);
    DistortionRates r = distortion_rates(h, Vec3(0.5, 0.5, 0.5), 0.0);
    CHECK((r.S_p - shear).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((r.D_p - Mat3(0.5 * (shear + shear.transpose()))).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("singular distortion is rejected") {
    DistortionHistory h;
    h.chart = box();
    h.P = [](const Vec3&, double t) { return Mat3((1.0 - t) * Mat3::Identity()); };
    h.t_samples = time_lattice(21, 0.05);
    CHECK_THROWS_AS(h.at(Vec3(0.5, 0.5, 0.5), 1.0), SingularP);
  }
  SUBCASE("off-lattice times are rejected") {
    DistortionHistory h;
    h.chart = box();
    h.P = [](const Vec3&, double) { return Mat3(Mat3::Identity()); };
    h.t_samples = time_lattice(21, 0.05);
    CHECK_THROWS_AS(distortion_rates(h, Vec3(0.5, 0.5, 0.5), 0.512), InvalidField);
  }
}

TEST_CASE("advance_flow") {
  SUBCASE("rigid rotation returns seeds with no plastic strain") {
    Chart ch(Vec3(-2, -2, -2), Vec3(2, 2, 2));
    MetricField g = flat_metric(ch);
    auto v = [](const Vec3& p, double) { return Vec3(-p[1], p[0], 0.0); };
    std::vector<Vec3> seeds{Vec3(1, 0, 0), Vec3(0.5, 0.5, 0.3)};
    FlowState st = advance_flow(v, g, seeds, 2.0 * M_PI, 2.0 * M_PI / 2000);
    for (const auto& rec : st.records) {
      CHECK((rec.position - rec.seed).norm() < 1e-6);
      CHECK(rec.E_p.cwiseAbs().maxCoeff() < 1e-6);
      CHECK(rec.J == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(rec.det_residual < 1e-8);
      CHECK(rec.path.size() == 2001);
    }
  }
  SUBCASE("uniaxial stretch pulls back to the exact strain") {
    double a = 0.3, T = 0.5;
    Chart ch(Vec3(0, 0, 0), Vec3(2, 2, 2));
    MetricField g = flat_metric(ch);
    auto v = [a](const Vec3& p, double) { return Vec3(a * p[0], 0.0, 0.0); };
    FlowState st = advance_flow(v, g, {Vec3(1, 0.5, 0.5)}, T, 0.005);
    const auto& rec = st.records[0];
    double want = std::exp(2.0 * a * T);
    CHECK(rec.G(0, 0) == doctest::Approx(want).epsilon(1e-5));
    CHECK(rec.E_p(0, 0) == doctest::Approx(0.5 * (want - 1.0)).epsilon(1e-5));
    CHECK(rec.J == doctest::Approx(std::exp(a * T)).epsilon(1e-5));
  }
  SUBCASE("non-integer step count is rejected") {
    MetricField g = flat_metric(box());
    auto v = [](const Vec3&, double) { return Vec3(0, 0, 0.001); };
    CHECK_THROWS_AS(advance_flow(v, g, {Vec3(0.5, 0.5, 0.5)}, 1.0, 0.3), InvalidField);
  }
  SUBCASE("trajectories leaving the chart are reported") {
    MetricField g = flat_metric(box());
    auto v = [](const Vec3&, double) { return Vec3(1.0, 0, 0); };
    CHECK_THROWS_AS(advance_flow(v, g, {Vec3(1.0, 0.5, 0.5)}, 1.0, 0.01), ExitedDomain);
  }
}

TEST_CASE("rate of stretchings") {
  SUBCASE("uniaxial flat stretch") {
    MetricField g = flat_metric(box());
    double a = 0.4;
    auto v = [a](const Vec3& p) { return Vec3(a * p[0], 0.0, 0.0); };
    StretchingRate sr = rate_of_stretchings(g, v, Vec3(0.5, 0.5, 0.5));
    Mat3 want = Mat3::Zero();
    want(0, 0) = a;
    CHECK((sr.D - want).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(sr.trace == doctest::Approx(a).epsilon(1e-8));
    CHECK(sr.divergence == doctest::Approx(a).epsilon(1e-8));
    CHECK(sr.trace_residual < 1e-8);
  }
  SUBCASE("rigid rotation is stretch-free") {
    MetricField g = flat_metric(box());
    auto v = [](const Vec3& p) { return Vec3(-p[1], p[0], 0.0); };
    StretchingRate sr = rate_of_stretchings(g, v, Vec3(0.4, 0.2, 0.7));
    CHECK(sr.D.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(sr.divergence) < 1e-9);
  }
  SUBCASE("umbilical metric: symmetric rate drops the curvature term") {
    Chart ch(Vec3(0, 0, 0), Vec3(1, 1, 1));
    double h0 = 0.5, v0 = 0.7;
    MovingFrame frame(ch, umbilical_coframe(h0));
    MetricField g = MetricField::from_frame(frame);
    Vec3 p(0.5, 0.5, 0.5);
    auto v = [v0](const Vec3&) { return Vec3(v0, 0.0, 0.0); };
    StretchingRate sr = rate_of_stretchings(g, v, p);
    CHECK(std::abs(sr.D(0, 2)) < 1e-6);
    // unsymmetrized covariant gradient keeps nabla_1 v_3 = H v_1
    auto gamma = g.christoffel(p);
    double v1_low = g.at(p)(0, 0) * v0;
    CHECK(-gamma[0](0, 2) * v1_low == doctest::Approx(h0 * v1_low).epsilon(1e-6));
  }
}

TEST_CASE("lie derivatives") {
  Chart ch = box();
  Vec3 p(0.5, 0.5, 0.5);
  SUBCASE("scalar advection") {
    auto u = [](const Vec3&) { return Vec3(1, 0, 0); };
    CHECK(lie_scalar([](const Vec3& q) { return q[0] * q[0]; }, u, ch, p) ==
          doctest::Approx(2.0 * p[0]).epsilon(1e-8));
  }
  SUBCASE("vector bracket") {
    auto u = [](const Vec3&) { return Vec3(1, 0, 0); };
    auto vf = [](const Vec3& q) { return Vec3(0.0, q[0], 0.0); };
    CHECK((lie_vector(vf, u, ch, p) - Vec3(0, 1, 0)).norm() < 1e-8);
    // antisymmetry: L_u v = -L_v u
    auto bruv = lie_vector(vf, u, ch, p);
    auto brvu = lie_vector(u, vf, ch, p);
    CHECK((bruv + brvu).norm() < 1e-8);
  }
  SUBCASE("metric dragged by an isometry vanishes") {
    auto flat = [](const Vec3&) { return Mat3(Mat3::Identity()); };
    auto rot = [](const Vec3& q) { return Vec3(-q[1], q[0], 0.0); };
    CHECK(lie_cov2(flat, rot, ch, p).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("metric dragged by a stretch gives twice the strain rate") {
    auto flat = [](const Vec3&) { return Mat3(Mat3::Identity()); };
    double a = 0.4;
    auto stretch = [a](const Vec3& q) { return Vec3(a * q[0], 0.0, 0.0); };
    Mat3 want = Mat3::Zero();
    want(0, 0) = 2.0 * a;
    CHECK((lie_cov2(flat, stretch, ch, p) - want).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("rank-3 leibniz rule") {
    auto u = [](const Vec3& q) { return Vec3(0.3 * q[1], -0.2 * q[0], 0.1); };
    auto vf = [](const Vec3& q) { return Vec3(q[0] * q[1], q[2], 1.0 + q[0]); };
    auto wf = [](const Vec3& q) { return Vec3(q[1], q[0] * q[2], q[0]); };
    TensorField T{3, {true, false, false}, [&](const Vec3& q, int i, int j, int k) {
                    return vf(q)[i] * wf(q)[j] * wf(q)[k];
                  }};
    auto flat = lie_derivative(T, u, ch, p);
    Vec3 lv = lie_vector(vf, u, ch, p);
    Vec3 lw = lie_covector(wf, u, ch, p);
    Vec3 vp = vf(p), wp = wf(p);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          double want =
              lv[i] * wp[j] * wp[k] + vp[i] * lw[j] * wp[k] + vp[i] * wp[j] * lw[k];
          CHECK(flat[9 * i + 3 * j + k] == doctest::Approx(want).epsilon(1e-6));
        }
  }
  SUBCASE("unsupported rank") {
    TensorField T{4, {}, [](const Vec3&, int, int, int) { return 0.0; }};
    auto u = [](const Vec3&) { return Vec3(1, 0, 0); };
    CHECK_THROWS_AS(lie_derivative(T, u, ch, p), UnsupportedRank);
  }
}

TEST_CASE("flow consistency") {
  Chart ch = box();
  SUBCASE("static configuration is consistent and conservative") {
    auto g = [](const Vec3&, double) { return Mat3(Mat3::Identity()); };
    auto v = [](const Vec3&, double) { return Vec3(0, 0, 0); };
    auto dp = [](const Vec3&, double) { return Mat3(Mat3::Zero()); };
    FlowConsistency fc = flow_consistency(ch, g, v, dp, 0.5, 0.0, 1.0);
    CHECK(fc.consistent);
    CHECK(fc.conservative);
    CHECK(fc.r_balance < 1e-10);
    CHECK(fc.r_volume < 1e-10);
  }
  SUBCASE("conformal relaxation is consistent but not conservative") {
    double a = 0.3;
    auto g = [a](const Vec3&, double t) {
      return Mat3(std::exp(-2.0 * a * t) * Mat3::Identity());
    };
    auto v = [a](const Vec3& p, double) { return Vec3(a * p); };
    auto dp = [a, g](const Vec3& p, double t) { return Mat3(a * g(p, t)); };
    FlowConsistency fc = flow_consistency(ch, g, v, dp, 0.5, 0.0, 1.0);
    CHECK(fc.consistent);
    CHECK_FALSE(fc.conservative);
    CHECK(fc.max_divergence == doctest::Approx(3.0 * a).epsilon(1e-6));
    CHECK(fc.r_balance < 1e-8);
    CHECK(fc.r_volume < 1e-7);
  }
  SUBCASE("mismatched plastic rate is flagged") {
    auto g = [](const Vec3&, double) { return Mat3(Mat3::Identity()); };
    auto v = [](const Vec3&, double) { return Vec3(0, 0, 0); };
    auto dp = [](const Vec3&, double) { return Mat3(0.1 * Mat3::Identity()); };
    FlowConsistency fc = flow_consistency(ch, g, v, dp, 0.5, 0.0, 1.0);
    CHECK_FALSE(fc.consistent);
    CHECK(fc.r_rates_equal == doctest::Approx(0.1).epsilon(1e-8));
  }
  SUBCASE("in-leaf rotation of the umbilical metric is conservative") {
    Chart ch2(Vec3(-1, -1, 0), Vec3(1, 1, 1));
    double h0 = 0.5;
    auto g = [h0](const Vec3& p, double) {
      Mat3 m = Mat3::Identity();
      double w = std::exp(-2.0 * h0 * p[2]);
      m(0, 0) = w;
      m(1, 1) = w;
      return m;
    };
    auto v = [](const Vec3& p, double) { return Vec3(-p[1], p[0], 0.0); };
    auto dp = [](const Vec3&, double) { return Mat3(Mat3::Zero()); };
    FlowConsistency fc = flow_consistency(ch2, g, v, dp, 0.5, 0.0, 1.0);
    CHECK(fc.conservative);
    CHECK(fc.max_divergence < 1e-9);
  }
}
