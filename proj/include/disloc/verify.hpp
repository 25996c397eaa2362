#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "disloc/burgers.hpp"
#include "disloc/congruence.hpp"
#include "disloc/core.hpp"
#include "disloc/density.hpp"
#include "disloc/field.hpp"
#include "disloc/flow.hpp"
#include "disloc/frame.hpp"
#include "disloc/geometry.hpp"
#include "disloc/glide.hpp"
#include "disloc/kinematics.hpp"
#include "disloc/quadrature.hpp"

namespace disloc {

struct CheckResult {
  std::string module;
  std::string name;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string note;
};

namespace verify_detail {

struct Check {
  std::string module;
  std::string name;
  double tol;
  std::function<double()> residual;  // pass iff residual < tol (after scaling)
};

inline Chart unit_chart(std::array<int, 3> shape = {33, 33, 33}) {
  return Chart(Vec3(-0.5, -0.5, -0.5), Vec3(1.5, 1.5, 1.5), shape);
}

inline Field rotation_field(const Chart& ch) {
  return Field::analytic(ch, {[](const Vec3& p) { return -p[1]; },
                              [](const Vec3& p) { return p[0]; },
                              [](const Vec3&) { return 0.0; }});
}

inline MetricField flat_metric(const Chart& ch) {
  return MetricField::direct(
      ch, [](const Vec3&) { return Mat3(Mat3::Identity()); },
      [](int, const Vec3&) { return Mat3(Mat3::Zero()); });
}

inline Polyline unit_square_circuit() {
  return Polyline({Vec3(0, 0, 0.5), Vec3(1, 0, 0.5), Vec3(1, 1, 0.5), Vec3(0, 1, 0.5)},
                  true);
}

inline ParametricPatch unit_square_patch() {
  return ParametricPatch::rectangle(Vec3(0, 0, 0.5), Vec3(1, 0, 0), Vec3(0, 1, 0));
}

inline std::vector<Check> build_checks() {
  std::vector<Check> checks;
  auto add = [&](std::string module, std::string name, double tol,
                 std::function<double()> fn) {
    checks.push_back({std::move(module), std::move(name), tol, std::move(fn)});
  };

  // ---- geometry_core -------------------------------------------------------
  add("geometry_core", "gauss-legendre-sine", 1e-10, [] {
    auto rule = gauss_legendre(8);
    double acc = 0.0;
    for (int i = 0; i < 8; ++i)
      acc += rule.weights[i] * std::sin(M_PI * 0.5 * (rule.nodes[i] + 1.0));
    return std::abs(acc * M_PI * 0.5 - 2.0);
  });
  add("geometry_core", "fd-derivative-order", 1e-12, [] {
    auto f = [](double x) { return std::sin(x); };
    return std::abs(fd_derivative_1d(f, 0.3, -1.0, 1.0, 1e-3) - std::cos(0.3));
  });
  add("geometry_core", "greens-theorem-area", 1e-12, [] {
    Chart ch = unit_chart();
    Field omega = Field::analytic(ch, {[](const Vec3&) { return 0.0; },
                                       [](const Vec3& p) { return p[0]; },
                                       [](const Vec3&) { return 0.0; }});
    Polyline square({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)}, true);
    return std::abs(line_integral(omega, square) - 1.0);
  });
  add("geometry_core", "integral-curve-orbit", 1e-8, [] {
    Chart ch(Vec3(-2, -2, -2), Vec3(2, 2, 2));
    Field v = rotation_field(ch);
    auto ic = integral_curve(v, Vec3(1, 0, 0), 2.0 * M_PI, 2.0 * M_PI / 4000);
    if (ic.exited_domain) return 1.0;
    return (ic.curve.vertices.back() - Vec3(1, 0, 0)).norm();
  });
  add("geometry_core", "stokes-scalar-form", 1e-10, [] {
    // d(x dy) = dx ^ dy over the unit square equals the boundary circulation
    Chart ch = unit_chart();
    Field omega = Field::analytic(ch, {[](const Vec3&) { return 0.0; },
                                       [](const Vec3& p) { return p[0]; },
                                       [](const Vec3&) { return 0.0; }});
    std::vector<Field::Fn> tau(9, [](const Vec3&) { return 0.0; });
    tau[3 * 0 + 1] = [](const Vec3&) { return 1.0; };
    tau[3 * 1 + 0] = [](const Vec3&) { return -1.0; };
    Field two_form = Field::analytic(ch, std::move(tau));
    ParametricPatch patch =
        ParametricPatch::rectangle(Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0));
    double surf = surface_integral(two_form, patch);
    double line = line_integral(omega, patch.boundary());
    return std::abs(surf - line);
  });

  // ---- bravais_frame -------------------------------------------------------
  add("bravais_frame", "coframe-frame-duality", 1e-12, [] {
    MovingFrame frame(unit_chart(), screw_coframe(0.1));
    double worst = 0.0;
    for (const Vec3& p : frame.chart().test_lattice()) {
      Mat3 gram = frame.coframe_at(p) * frame.frame_at(p).transpose();
      worst = std::max(worst, (gram - Mat3::Identity()).cwiseAbs().maxCoeff());
    }
    return worst;
  });
  add("bravais_frame", "umbilical-volume-density", 1e-12, [] {
    Chart ch(Vec3(0, 0, 0), Vec3(1, 1, 1));
    MovingFrame frame(ch, umbilical_coframe(0.5));
    double worst = 0.0;
    for (const Vec3& p : ch.test_lattice())
      worst = std::max(worst,
                       std::abs(frame.volume_density(p) - std::exp(-2.0 * 0.5 * p[2])));
    return worst;
  });
  add("bravais_frame", "flat-christoffels-vanish", 1e-12, [] {
    MovingFrame frame(unit_chart(), holonomic_coframe());
    MetricField g = MetricField::from_frame(frame);
    double worst = 0.0;
    for (const Vec3& p : g.chart().test_lattice()) {
      auto gamma = g.christoffel(p);
      for (const auto& m : gamma) worst = std::max(worst, m.cwiseAbs().maxCoeff());
    }
    return worst;
  });
  add("bravais_frame", "metric-from-coframe", 1e-12, [] {
    MovingFrame frame(unit_chart(), screw_coframe(0.1));
    MetricField g = MetricField::from_frame(frame);
    double worst = 0.0;
    for (const Vec3& p : g.chart().test_lattice()) {
      Mat3 c = frame.coframe_at(p);
      worst = std::max(worst, (g.at(p) - Mat3(c.transpose() * c)).cwiseAbs().maxCoeff());
    }
    return worst;
  });

  // ---- dislocation_density -------------------------------------------------
  add("dislocation_density", "holonomic-torsion-free", 1e-10, [] {
    MovingFrame frame(unit_chart(), holonomic_coframe());
    return is_holonomic(frame, 1e-10).max_torsion;
  });
  add("dislocation_density", "screw-torsion-analytic", 1e-8, [] {
    MovingFrame frame(unit_chart(), screw_coframe(0.1));
    double worst = 0.0;
    for (const Vec3& p : frame.chart().test_lattice()) {
      Rank3 s = torsion_at(frame, p);
      worst = std::max(worst, std::abs(s[2](0, 1) - 0.05));
    }
    return worst;
  });
  add("dislocation_density", "screw-torsion-gridded", 1e-4, [] {
    MovingFrame frame(unit_chart(), screw_coframe(0.1), +1.0, /*gridded=*/true);
    double worst = 0.0;
    for (const Vec3& p : frame.chart().test_lattice())
      worst = std::max(worst, std::abs(torsion_at(frame, p)[2](0, 1) - 0.05));
    return worst;
  });
  add("dislocation_density", "decomposition-round-trip", 1e-10, [] {
    double worst = 0.0;
    for (const CoframeSpec& spec :
         {screw_coframe(0.1), edge_coframe(0.2), umbilical_coframe(0.5)}) {
      DislocationDensity dd{MovingFrame(unit_chart(), spec)};
      for (const Vec3& p : dd.frame().chart().test_lattice())
        worst = std::max(worst, dd.decomposition_residual(p));
    }
    return worst;
  });
  add("dislocation_density", "anholonomy-trace-identity", 1e-8, [] {
    double worst = 0.0;
    for (const CoframeSpec& spec :
         {screw_coframe(0.1), edge_coframe(0.2), umbilical_coframe(0.5)}) {
      DislocationDensity dd{MovingFrame(unit_chart(), spec)};
      for (const Vec3& p : dd.frame().chart().test_lattice())
        worst = std::max(worst, dd.trace_identity_residual(p));
    }
    return worst;
  });
  add("dislocation_density", "umbilical-axial-vector", 1e-8, [] {
    DislocationDensity dd{MovingFrame(unit_chart(), umbilical_coframe(0.5))};
    double worst = 0.0;
    for (const Vec3& p : dd.frame().chart().test_lattice()) {
      worst = std::max(worst, (dd.t_at(p) - Vec3(0, 0, 1.0)).norm());
      worst = std::max(worst, dd.gamma_at(p).cwiseAbs().maxCoeff());
    }
    return worst;
  });
  add("dislocation_density", "total-line-length", 1e-10, [] {
    Chart ch(Vec3(0, 0, 0), Vec3(1, 1, 1));
    MovingFrame frame(ch, umbilical_coframe(0.5));
    MetricField g = MetricField::from_frame(frame);
    ScalarDensitySpec rho{[](const Vec3&) { return 1.0; }};
    double got = total_line_length(rho, g, Vec3(0, 0, 0), Vec3(1, 1, 1), 12);
    return std::abs(got - (1.0 - std::exp(-1.0)));
  });

  // ---- burgers ---------------------------------------------------------------
  add("burgers", "screw-circuit-value", 1e-10, [] {
    MovingFrame frame(unit_chart(), screw_coframe(0.1));
    BurgersResult b = burgers_circuit(frame, unit_square_circuit());
    return (b.components - Vec3(0, 0, 0.1)).norm();
  });
  add("burgers", "stokes-equivalence-analytic", 1e-6, [] {
    MovingFrame frame(unit_chart(), screw_coframe(0.1));
    DislocationDensity dd(frame);
    Vec3 bc = burgers_circuit(frame, unit_square_circuit()).components;
    Vec3 bs = burgers_surface(frame, dd, unit_square_patch()).components;
    return (bc - bs).norm() / bc.norm();
  });
  add("burgers", "stokes-equivalence-gridded", 1e-3, [] {
    MovingFrame frame(unit_chart(), screw_coframe(0.1), +1.0, /*gridded=*/true);
    DislocationDensity dd(frame);
    Vec3 bc = burgers_circuit(frame, unit_square_circuit()).components;
    Vec3 bs = burgers_surface(frame, dd, unit_square_patch()).components;
    return (bc - bs).norm() / bc.norm();
  });
  add("burgers", "screw-line-classification", 0.5, [] {
    DislocationDensity dd{MovingFrame(unit_chart(), screw_coframe(0.1))};
    ScalarDensitySpec rho{[](const Vec3&) { return 0.1; }};
    auto cls = local_burgers_classify(dd, Vec3(0, 0, 1), rho, Vec3(0.5, 0.5, 0.5));
    double res = cls.local.line_type == LineType::Screw ? 0.0 : 1.0;
    res += (cls.local.b - Vec3(0, 0, 1.0)).norm();
    return res;
  });
  add("burgers", "edge-line-volterra-triple", 0.5, [] {
    DislocationDensity dd{MovingFrame(unit_chart(), edge_coframe(0.2))};
    ScalarDensitySpec rho{[](const Vec3&) { return 0.2; }};
    auto cls = local_burgers_classify(dd, Vec3(0, 0, 1), rho, Vec3(0.5, 0.5, 0.5));
    double res = cls.local.line_type == LineType::Edge ? 0.0 : 1.0;
    if (!cls.triple || !cls.triple->volterra) res += 1.0;
    if (cls.triple) {
      res += (cls.triple->m - Vec3(1, 0, 0)).norm();
      res += (cls.triple->n - Vec3(0, 1, 0)).norm();
    }
    return res;
  });

  // ---- congruence ------------------------------------------------------------
  add("congruence", "circle-frenet-curvature", 1e-6, [] {
    Chart ch(Vec3(-3, -3, -1), Vec3(3, 3, 1));
    MetricField g = flat_metric(ch);
    auto l = [](const Vec3& p) {
      double r = std::hypot(p[0], p[1]);
      return Vec3(-p[1] / r, p[0] / r, 0.0);
    };
    double worst = 0.0;
    for (double r : {0.5, 1.0, 2.0}) {
      FrenetState st = frenet_along(g, l, Vec3(r, 0, 0));
      worst = std::max(worst, std::abs(st.kappa - 1.0 / r));
      worst = std::max(worst, std::abs(st.tau));
    }
    return worst;
  });
  add("congruence", "straight-line-guard", 0.5, [] {
    Chart ch(Vec3(-1, -1, -1), Vec3(1, 1, 1));
    MetricField g = flat_metric(ch);
    auto l = [](const Vec3&) { return Vec3(1, 0, 0); };
    try {
      frenet_along(g, l, Vec3(0, 0, 0));
    } catch (const VanishingCurvature&) {
      return 0.0;
    }
    return 1.0;
  });
  add("congruence", "complex-frenet-residual", 1e-6, [] {
    Chart ch(Vec3(-3, -3, -1), Vec3(3, 3, 1));
    MetricField g = flat_metric(ch);
    auto l = [](const Vec3& p) {
      double r = std::hypot(p[0], p[1]);
      return Vec3(-p[1] / r, p[0] / r, 0.0);
    };
    VolterraFields vf;
    vf.l = l;
    vf.m = [](const Vec3& p) {
      double r = std::hypot(p[0], p[1]);
      return Vec3(-p[0] / r, -p[1] / r, 0.0);
    };
    vf.n = [](const Vec3&) { return Vec3(0, 0, 1); };
    double worst = 0.0;
    // sample along the traced unit circle
    for (double a : {0.0, 0.7, 1.9, 3.1, 4.4, 5.6}) {
      Vec3 p(std::cos(a), std::sin(a), 0.0);
      FrenetState st = frenet_along(g, l, p, vf);
      worst = std::max(worst, st.complex_frenet_residual);
      worst = std::max(worst, std::abs(st.theta));
    }
    return worst;
  });
  add("congruence", "umbilical-line-strength", 1e-8, [] {
    DislocationDensity dd{MovingFrame(unit_chart(), umbilical_coframe(0.5))};
    ScalarDensitySpec rho{[](const Vec3&) { return 1.0; }};
    double worst = 0.0;
    for (int k = 0; k < 8; ++k) {
      double phi = 2.0 * M_PI * k / 8.0 + 0.1;
      Vec3 l(std::cos(phi), std::sin(phi), 0.0);
      auto cls = local_burgers_classify(dd, l, rho, Vec3(0.5, 0.5, 0.5));
      worst = std::max(worst, std::abs(cls.local.b_g - 0.5));
    }
    return worst;
  });
  add("congruence", "principal-pattern-recovery", 1e-8, [] {
    double gam = 0.3, phi = 0.7, H = 0.4;
    Vec3 k(std::sin(phi), -std::cos(phi), 0.0);
    Vec3 e3(0, 0, 1);
    Mat3 gt = Mat3(-gam * (k * e3.transpose() + e3 * k.transpose()));
    Vec3 g3(std::cos(phi), std::sin(phi), 0.0);
    Vec3 t = Vec3(-2.0 * gam * g3 + 2.0 * H * e3);
    PrincipalDecomposition pd = principal_congruences(gt, t);
    double worst = std::abs(pd.gamma_scalar - gam);
    worst = std::max(worst, std::abs(pd.phi - phi));
    worst = std::max(worst, std::abs(pd.H - H));
    worst = std::max(worst, std::abs(pd.mu - std::sqrt(H * H + gam * gam)));
    worst = std::max(worst, pd.t_residual);
    return worst;
  });
  add("congruence", "leaf-normal-curvature", 1e-8, [] {
    Chart ch(Vec3(0, 0, 0), Vec3(1, 1, 1));
    MovingFrame frame(ch, umbilical_coframe(0.5));
    MetricField g = MetricField::from_frame(frame);
    double worst = 0.0;
    for (double phi : {0.0, 0.9, 2.1, 4.0}) {
      Vec3 u(std::cos(phi), std::sin(phi), 0.0);
      worst = std::max(
          worst, std::abs(leaf_normal_curvature(g, Vec3(0.5, 0.5, 0.5), u) - 0.5));
    }
    return worst;
  });

  // ---- kinematics ------------------------------------------------------------
  add("kinematics", "static-closed-form", 1e-6, [] {
    double kappa0 = 0.8, omega0 = 0.4, zeta0 = -0.3;
    double s_max = 10.0 / kappa0, ds = 1e-3;
    double om = omega0, ze = zeta0, s = 0.0;
    double worst = 0.0;
    auto f = [&](double w, double z) { return std::pair(kappa0 * z, -kappa0 * w); };
    int steps = static_cast<int>(std::llround(s_max / ds));
    for (int i = 0; i < steps; ++i) {
      auto [k1w, k1z] = f(om, ze);
      auto [k2w, k2z] = f(om + 0.5 * ds * k1w, ze + 0.5 * ds * k1z);
      auto [k3w, k3z] = f(om + 0.5 * ds * k2w, ze + 0.5 * ds * k2z);
      auto [k4w, k4z] = f(om + ds * k3w, ze + ds * k3z);
      om += ds / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w);
      ze += ds / 6.0 * (k1z + 2 * k2z + 2 * k3z + k4z);
      s += ds;
      auto [ow, oz] = static_congruence_solution(kappa0, omega0, zeta0, s);
      worst = std::max(worst, std::hypot(om - ow, ze - oz));
    }
    return worst;
  });
  add("kinematics", "static-norm-drift", 1e-8, [] {
    double kappa0 = 0.8, omega0 = 0.4, zeta0 = -0.3;
    double norm0 = omega0 * omega0 + zeta0 * zeta0;
    double worst = 0.0;
    for (double s = 0.0; s <= 10.0 / kappa0; s += 0.05) {
      auto [ow, oz] = static_congruence_solution(kappa0, omega0, zeta0, s);
      worst = std::max(worst, std::abs(ow * ow + oz * oz - norm0));
    }
    return worst;
  });
  add("kinematics", "evolution-convergence", 1.0, [] {
    auto omega = [](double s, double t) { return 0.3 * std::sin(s) * std::cos(0.7 * t); };
    auto run = [&](int n, int steps, double dt) {
      std::vector<double> s(n), k0(n), th0(n), z0(n);
      for (int i = 0; i < n; ++i) {
        s[i] = 2.0 * M_PI * i / n;
        k0[i] = 1.2 + 0.2 * std::sin(s[i]);
        th0[i] = 0.3 * std::cos(s[i]);
        z0[i] = 0.1 * std::sin(s[i]);
      }
      KinematicProfile prof = evolve_kinematics(s, k0, th0, z0, omega, steps, dt);
      return consistency_residual(prof, steps / 2).max();
    };
    double coarse = run(64, 10, 0.02);
    double fine = run(128, 20, 0.01);
    // 4th-order scheme: simultaneous halving must shrink residuals >= 8x
    return 8.0 * fine / std::max(coarse, 1e-300);
  });
  add("kinematics", "right-angle-branch", 1e-10, [] {
    const int n = 256;
    double w0 = 0.4, z0c = 0.2;
    auto omega = [&](double s, double t) {
      return w0 * std::cos(s + t) - z0c * std::sin(s + t);
    };
    std::vector<double> s(n), k0(n, 1.0), th0(n, M_PI / 2.0), z0(n);
    for (int i = 0; i < n; ++i) s[i] = 2.0 * M_PI * i / n;
    for (int i = 0; i < n; ++i) z0[i] = w0 * std::sin(s[i]) + z0c * std::cos(s[i]);
    KinematicProfile prof = evolve_kinematics(s, k0, th0, z0, omega, 50, 0.01);
    double worst = 0.0;
    for (std::size_t j = 0; j + 1 < prof.kappa.size(); ++j)
      for (int i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(prof.kappa[j + 1][i] - prof.kappa[j][i]));
    return worst;
  });
  add("kinematics", "complex-real-branch-agreement", 1e-6, [] {
    // theta == pi/2 scenario where psi = kappa e^{i theta} is purely imaginary
    const int n = 128;
    double w0 = 0.4, z0c = 0.2;
    auto omega_r = [&](double s, double t) {
      return w0 * std::cos(s + t) - z0c * std::sin(s + t);
    };
    auto omega_c = [&](double s, double t) {
      return std::complex<double>(omega_r(s, t), 0.0);
    };
    std::vector<double> s(n), k0(n, 1.0), th0(n, M_PI / 2.0), z0(n);
    std::vector<std::complex<double>> psi0(n);
    for (int i = 0; i < n; ++i) {
      s[i] = 2.0 * M_PI * i / n;
      z0[i] = w0 * std::sin(s[i]) + z0c * std::cos(s[i]);
      psi0[i] = std::polar(1.0, M_PI / 2.0);
    }
    KinematicProfile real = evolve_kinematics(s, k0, th0, z0, omega_r, 20, 0.01);
    ComplexProfile cplx = evolve_kinematics_complex(s, psi0, z0, omega_c, 20, 0.01);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      std::complex<double> want =
          std::polar(real.kappa.back()[i], real.theta.back()[i]);
      worst = std::max(worst, std::abs(cplx.psi.back()[i] - want));
      worst = std::max(worst, std::abs(cplx.zeta.back()[i] - real.zeta.back()[i]));
    }
    return worst;
  });

  // ---- material_flow -----------------------------------------------------------
  add("material_flow", "identity-distortion", 1e-12, [] {
    DistortionHistory h;
    h.chart = unit_chart();
    h.P = [](const Vec3&, double) { return Mat3(Mat3::Identity()); };
    h.t_samples.resize(21);
    for (int i = 0; i < 21; ++i) h.t_samples[i] = 0.05 * i;
    DistortionRates r = distortion_rates(h, Vec3(0.5, 0.5, 0.5), 0.5);
    return std::max({r.S_p.cwiseAbs().maxCoeff(), r.D_p.cwiseAbs().maxCoeff(),
                     r.gdot_residual});
  });
  add("material_flow", "exponential-distortion-analytic", 1e-12, [] {
    double a = 0.3;
    DistortionHistory h;
    h.chart = unit_chart();
    h.P = [a](const Vec3&, double t) { return Mat3(std::exp(a * t) * Mat3::Identity()); };
    h.P_dot = [a](const Vec3&, double t) {
      return Mat3(a * std::exp(a * t) * Mat3::Identity());
    };
    h.t_samples.resize(21);
    for (int i = 0; i < 21; ++i) h.t_samples[i] = 0.05 * i;
    DistortionRates r = distortion_rates(h, Vec3(0.5, 0.5, 0.5), 0.5);
    return (r.S_p - Mat3(a * Mat3::Identity())).cwiseAbs().maxCoeff();
  });
  add("material_flow", "exponential-distortion-fd", 1e-6, [] {
    double a = 0.3;
    DistortionHistory h;
    h.chart = unit_chart();
    h.P = [a](const Vec3&, double t) { return Mat3(std::exp(a * t) * Mat3::Identity()); };
    h.t_samples.resize(21);
    for (int i = 0; i < 21; ++i) h.t_samples[i] = 0.05 * i;
    DistortionRates r = distortion_rates(h, Vec3(0.5, 0.5, 0.5), 0.5);
    double res = (r.S_p - Mat3(a * Mat3::Identity())).cwiseAbs().maxCoeff();
    return std::max(res, r.gdot_residual);
  });
  add("material_flow", "shear-distortion-rate", 1e-10, [] {
    double b0 = 0.25;
    Mat3 shear = Mat3::Zero();
    shear(0, 1) = b0;
    DistortionHistory h;
    h.chart = unit_chart();
    h.P = [shear](const Vec3&, double t) { return Mat3(Mat3::Identity() + t * shear); };
    h.P_dot = [shear](const Vec3&, double) { return shear; };
    h.t_samples.resize(21);
    for (int i = 0; i < 21; ++i) h.t_samples[i] = 0.05 * i - 0.5;
    DistortionRates r = distortion_rates(h, Vec3(0.5, 0.5, 0.5), 0.0);
    return (r.S_p - shear).cwiseAbs().maxCoeff();
  });
  add("material_flow", "rigid-rotation-return", 1e-6, [] {
    Chart ch(Vec3(-2, -2, -2), Vec3(2, 2, 2));
    MetricField g = flat_metric(ch);
    auto v = [](const Vec3& p, double) { return Vec3(-p[1], p[0], 0.0); };
    std::vector<Vec3> seeds{Vec3(1, 0, 0), Vec3(0.5, 0.5, 0.3), Vec3(-0.4, 0.8, -0.5)};
    FlowState st = advance_flow(v, g, seeds, 2.0 * M_PI, 2.0 * M_PI / 2000);
    double worst = 0.0;
    for (const auto& rec : st.records) {
      worst = std::max(worst, (rec.position - rec.seed).norm());
      worst = std::max(worst, rec.E_p.cwiseAbs().maxCoeff());
      worst = std::max(worst, std::abs(rec.J - 1.0));
    }
    return worst;
  });
  add("material_flow", "uniaxial-stretch-pullback", 1e-5, [] {
    double a = 0.3, T = 0.5;
    Chart ch(Vec3(0, 0, 0), Vec3(2, 2, 2));
    MetricField g = flat_metric(ch);
    auto v = [a](const Vec3& p, double) { return Vec3(a * p[0], 0.0, 0.0); };
    FlowState st = advance_flow(v, g, {Vec3(1, 0.5, 0.5)}, T, 0.005);
    const auto& rec = st.records[0];
    double want = std::exp(2.0 * a * T);
    double worst = std::abs(rec.G(0, 0) - want);
    worst = std::max(worst, std::abs(rec.E_p(0, 0) - 0.5 * (want - 1.0)));
    worst = std::max(worst, rec.det_residual);
    return worst;
  });
  add("material_flow", "pullback-pushforward-duality", 1e-6, [] {
    Chart ch(Vec3(-2, -2, -2), Vec3(2, 2, 2));
    MetricField g = flat_metric(ch);
    auto v = [](const Vec3& p, double) { return Vec3(0.2 * p[0], -0.1 * p[1], 0.05); };
    FlowState st = advance_flow(v, g, {Vec3(0.5, 0.5, 0.5)}, 0.4, 0.004);
    const auto& rec = st.records[0];
    Mat3 chi_inv = rec.gradient.inverse();
    Mat3 pushed = chi_inv.transpose() * g.at(rec.seed) * chi_inv;  // chi_* g0
    Mat3 back = rec.gradient.transpose() * pushed * rec.gradient;
    return (back - g.at(rec.seed)).cwiseAbs().maxCoeff();
  });
  add("material_flow", "stretch-rate-trace", 1e-8, [] {
    Chart ch = unit_chart();
    MetricField g = flat_metric(ch);
    double a = 0.4;
    auto v = [a](const Vec3& p) { return Vec3(a * p[0], 0.0, 0.0); };
    StretchingRate sr = rate_of_stretchings(g, v, Vec3(0.5, 0.5, 0.5));
    Mat3 want = Mat3::Zero();
    want(0, 0) = a;
    double worst = (sr.D - want).cwiseAbs().maxCoeff();
    worst = std::max(worst, std::abs(sr.divergence - a));
    worst = std::max(worst, sr.trace_residual);
    return worst;
  });
  add("material_flow", "umbilical-velocity-gradient", 1e-6, [] {
    // constant in-plane velocity: the unsymmetrized gradient picks up the
    // mean-curvature term nabla_1 v_3 = H v_1, while D_13 cancels
    Chart ch(Vec3(0, 0, 0), Vec3(1, 1, 1));
    double h0 = 0.5, v0 = 0.7;
    MovingFrame frame(ch, umbilical_coframe(h0));
    MetricField g = MetricField::from_frame(frame);
    Vec3 p(0.5, 0.5, 0.5);
    auto v = [v0](const Vec3&) { return Vec3(v0, 0.0, 0.0); };
    StretchingRate sr = rate_of_stretchings(g, v, p);
    double worst = std::abs(sr.D(0, 2));
    // oracle: covariant gradient entry from the closed-form Christoffels
    auto gamma = g.christoffel(p);
    double v1_low = g.at(p)(0, 0) * v0;
    double nabla_13 = -gamma[0](0, 2) * v1_low;  // d_1 v_3 - Gamma^C_13 v_C
    worst = std::max(worst, std::abs(nabla_13 - h0 * v1_low));
    worst = std::max(worst, sr.trace_residual);
    return worst;
  });
  add("material_flow", "lie-derivative-specializations", 1e-8, [] {
    Chart ch = unit_chart();
    auto u1 = [](const Vec3&) { return Vec3(1, 0, 0); };
    Vec3 p(0.5, 0.5, 0.5);
    double worst =
        std::abs(lie_scalar([](const Vec3& q) { return q[0]; }, u1, ch, p) - 1.0);
    auto rot = [](const Vec3& q) { return Vec3(-q[1], q[0], 0.0); };
    auto flat = [](const Vec3&) { return Mat3(Mat3::Identity()); };
    worst = std::max(worst, lie_cov2(flat, rot, ch, p).cwiseAbs().maxCoeff());
    double a = 0.4;
    auto stretch = [a](const Vec3& q) { return Vec3(a * q[0], 0.0, 0.0); };
    Mat3 want = Mat3::Zero();
    want(0, 0) = 2.0 * a;
    worst = std::max(worst, (lie_cov2(flat, stretch, ch, p) - want).cwiseAbs().maxCoeff());
    auto vfield = [](const Vec3& q) { return Vec3(0.0, q[0], 0.0); };
    worst = std::max(worst, (lie_vector(vfield, u1, ch, p) - Vec3(0, 1, 0)).norm());
    return worst;
  });
  add("material_flow", "lie-rank3-leibniz", 1e-7, [] {
    Chart ch = unit_chart();
    Vec3 p(0.5, 0.5, 0.5);
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
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) {
          double want = lv[i] * wp[j] * wp[k] + vp[i] * lw[j] * wp[k] +
                        vp[i] * wp[j] * lw[k];
          worst = std::max(worst, std::abs(flat[9 * i + 3 * j + k] - want));
        }
    return worst;
  });
  add("material_flow", "static-flow-consistency", 1e-9, [] {
    Chart ch = unit_chart();
    auto g = [](const Vec3&, double) { return Mat3(Mat3::Identity()); };
    auto v = [](const Vec3&, double) { return Vec3(0, 0, 0); };
    auto dp = [](const Vec3&, double) { return Mat3(Mat3::Zero()); };
    FlowConsistency fc = flow_consistency(ch, g, v, dp, 0.5, 0.0, 1.0);
    if (!fc.consistent || !fc.conservative) return 1.0;
    return std::max({fc.r_balance, fc.r_rates_equal, fc.r_metric_rate, fc.r_volume});
  });
  add("material_flow", "constructed-flow-consistency", 1e-8, [] {
    Chart ch = unit_chart();
    double a = 0.3;
    auto g = [a](const Vec3&, double t) {
      return Mat3(std::exp(-2.0 * a * t) * Mat3::Identity());
    };
    auto v = [a](const Vec3& p, double) { return Vec3(a * p); };
    auto dp = [a, g](const Vec3& p, double t) { return Mat3(a * g(p, t)); };
    FlowConsistency fc = flow_consistency(ch, g, v, dp, 0.5, 0.0, 1.0);
    if (!fc.consistent) return 1.0;
    if (fc.conservative) return 1.0;  // div = 3a, not volume preserving
    return std::max({fc.r_balance, fc.r_rates_equal, fc.r_metric_rate, fc.r_volume});
  });
  add("material_flow", "umbilical-rotation-conservative", 1e-9, [] {
    Chart ch(Vec3(-1, -1, 0), Vec3(1, 1, 1));
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
    FlowConsistency fc = flow_consistency(ch, g, v, dp, 0.5, 0.0, 1.0);
    if (!fc.conservative) return 1.0;
    return std::max({fc.r_metric_rate, fc.max_divergence});
  });

  // ---- glide_orowan --------------------------------------------------------------
  add("glide_orowan", "umbilical-christoffel-closed-form", 1e-8, [] {
    Chart ch(Vec3(0, 0, 0), Vec3(1, 1, 1));
    UmbilicalSpace sp = build_umbilical_space(ch, [](double x3) { return 0.5 * x3; });
    double res = sp.christoffel_residual;
    if (sp.leaf_class != LeafCurvatureClass::Parabolic) res = std::max(res, 1.0);
    double worst_h = 0.0;
    for (double x3 : {0.1, 0.5, 0.9}) worst_h = std::max(worst_h, std::abs(sp.H(x3) - 0.5));
    return std::max(res, worst_h);
  });
  add("glide_orowan", "leaf-curvature-classification", 1e-5, [] {
    Chart ch(Vec3(0.5, 0.0, 0.0), Vec3(1.5, 1.0, 1.0));
    auto sphere = [](const Vec3& p) {
      Mat3 m = Mat3::Zero();
      m(0, 0) = 1.0;
      m(1, 1) = sq(std::sin(p[0]));
      return m;
    };
    UmbilicalSpace el = build_umbilical_space(ch, [](double) { return 0.0; }, sphere);
    double res = std::abs(el.gauss_K - 1.0);
    if (el.leaf_class != LeafCurvatureClass::Elliptic) res = std::max(res, 1.0);
    auto pseudo = [](const Vec3& p) {
      Mat3 m = Mat3::Zero();
      m(0, 0) = 1.0;
      m(1, 1) = std::exp(2.0 * p[0]);
      return m;
    };
    UmbilicalSpace hy = build_umbilical_space(ch, [](double) { return 0.0; }, pseudo);
    res = std::max(res, std::abs(hy.gauss_K + 1.0));
    if (hy.leaf_class != LeafCurvatureClass::Hyperbolic) res = std::max(res, 1.0);
    return res;
  });
  add("glide_orowan", "slip-system-pure-glide", 1e-12, [] {
    VolterraTriple tri;
    tri.l = Vec3(1, 0, 0);
    tri.m = Vec3(0, 1, 0);
    tri.n = Vec3(0, 0, 1);
    Mat3 dg = Mat3(0.7 * (tri.m * tri.n.transpose() + tri.n * tri.m.transpose()));
    SlipSystem ss = slip_system(dg, tri);
    double worst = std::abs(ss.gamma_dot - 0.7);
    worst = std::max(worst, std::abs(ss.delta_g));
    worst = std::max(worst, std::abs(ss.S_g - 1.0));
    worst = std::max(worst, (ss.s - tri.m).norm());
    worst = std::max(worst, std::abs(ss.psi_angle));
    worst = std::max(worst, ss.reconstruction_residual);
    return worst;
  });
  add("glide_orowan", "slip-system-oblique", 1e-12, [] {
    VolterraTriple tri;
    tri.l = Vec3(1, 0, 0);
    tri.m = Vec3(0, 1, 0);
    tri.n = Vec3(0, 0, 1);
    Vec3 s = Vec3((tri.l + tri.m) / std::sqrt(2.0));
    double D = 0.7 * std::sqrt(2.0);  // S_g * gamma_dot with delta_g = 1
    Mat3 dg = Mat3(D * (s * tri.n.transpose() + tri.n * s.transpose()));
    SlipSystem ss = slip_system(dg, tri);
    double worst = std::abs(ss.gamma_dot - 0.7);
    worst = std::max(worst, std::abs(ss.delta_g - 1.0));
    worst = std::max(worst, std::abs(ss.S_g - std::sqrt(2.0)));
    worst = std::max(worst, std::abs(ss.psi_angle - M_PI / 4.0));
    worst = std::max(worst, ss.reconstruction_residual);
    return worst;
  });
  add("glide_orowan", "inextensibility-guard", 0.5, [] {
    VolterraTriple tri;
    tri.l = Vec3(1, 0, 0);
    tri.m = Vec3(0, 1, 0);
    tri.n = Vec3(0, 0, 1);
    Mat3 dg = Mat3::Zero();
    dg(0, 0) = 1.0;
    try {
      slip_system(dg, tri);
    } catch (const NotInextensible&) {
      return 0.0;
    }
    return 1.0;
  });
  add("glide_orowan", "killing-isometries", 1e-10, [] {
    Chart ch(Vec3(-1, -1, 0), Vec3(1, 1, 1));
    auto flat = [](const Vec3&) {
      Mat3 m = Mat3::Zero();
      m(0, 0) = 1.0;
      m(1, 1) = 1.0;
      return m;
    };
    double worst = killing_residual(
        ch, flat, [](const Vec3& p) { return Vec3(-p[1], p[0], 0.0); });
    worst = std::max(worst, killing_residual(ch, flat, [](const Vec3&) {
                       return Vec3(0.3, -0.7, 0.0);
                     }));
    return worst;
  });
  add("glide_orowan", "killing-stretch-residual", 1e-8, [] {
    Chart ch(Vec3(-1, -1, 0), Vec3(1, 1, 1));
    auto flat = [](const Vec3&) {
      Mat3 m = Mat3::Zero();
      m(0, 0) = 1.0;
      m(1, 1) = 1.0;
      return m;
    };
    double r = killing_residual(ch, flat,
                                [](const Vec3& p) { return Vec3(p[0], 0.0, 0.0); });
    return std::abs(r - 2.0);
  });
  add("glide_orowan", "orowan-aligned", 1e-15, [] {
    return std::abs(orowan_rate(0.5, 2.0, 0.0, OrowanVariant::Aligned) - 1.0);
  });
  add("glide_orowan", "orowan-directional", 1e-8, [] {
    double r = std::abs(orowan_rate(0.5, 2.0, M_PI / 3.0, OrowanVariant::Directional) - 0.5);
    // near-orthogonal motion contributes nothing
    r = std::max(r, orowan_rate(0.5, 2.0, M_PI / 2.0 - 1e-9, OrowanVariant::Directional));
    return r;
  });
  add("glide_orowan", "power-law-chain", 1e-12, [] {
    StressInput in;
    in.T0 = 1.5;
    in.v0 = 2.0;
    in.n_exp = 2.0;
    in.H = 0.5;
    PowerLawResult unit = dislocation_speed_power_law(in.T0, in);
    double worst = std::abs(unit.v_g - in.v0);
    worst = std::max(worst, std::abs(unit.gamma_dot -
                                     orowan_rate(in.H, unit.v_g, 0.0, OrowanVariant::Aligned)));
    StressInput in2;
    in2.T0 = 1.0;
    in2.v0 = 1.0;
    in2.n_exp = 2.0;
    in2.H = 0.5;
    PowerLawResult twice = dislocation_speed_power_law(2.0, in2);
    worst = std::max(worst, std::abs(twice.v_g - 4.0));
    worst = std::max(worst, std::abs(twice.gamma_dot - 2.0));
    StressInput in3;
    in3.T0 = 1.0;
    in3.v0 = 3.0;
    in3.n_exp = 1.0;
    in3.H = 0.5;
    PowerLawResult g0 = dislocation_speed_power_law(1.0, in3);
    worst = std::max(worst, std::abs(g0.gamma_dot0 - 1.5));
    worst = std::max(worst, std::abs(g0.gamma_dot - 1.5));
    return worst;
  });
  add("glide_orowan", "dissipation-identity", 1e-10, [] {
    Vec3 m(0, 1, 0), n(0, 0, 1);
    double tau0 = 2.0, D = 0.7;
    Mat3 T = Mat3(tau0 * (m * n.transpose() + n * m.transpose()));
    Mat3 dg = Mat3(D * (m * n.transpose() + n * m.transpose()));
    DissipationResult r = dissipation_check(T, dg);
    double worst = std::abs(r.value - 2.0 * tau0 * D);
    if (!r.nonnegative) worst = std::max(worst, 1.0);
    DissipationResult zero = dissipation_check(T, Mat3(Mat3::Zero()));
    worst = std::max(worst, std::abs(zero.value));
    if (!zero.nonnegative) worst = std::max(worst, 1.0);
    return worst;
  });
  add("glide_orowan", "dissipation-sign-flag", 1e-10, [] {
    Vec3 m(0, 1, 0), n(0, 0, 1);
    Mat3 T = Mat3(-1.0 * (m * n.transpose() + n * m.transpose()));
    Mat3 dg = Mat3(0.7 * (m * n.transpose() + n * m.transpose()));
    DissipationResult r = dissipation_check(T, dg);
    double worst = std::abs(r.value + 1.4);
    if (r.nonnegative) worst = std::max(worst, 1.0);
    return worst;
  });

  return checks;
}

}  // namespace verify_detail

/// Runs the deterministic invariant suite, optionally filtered to the given
/// module names. Tolerances scale with tol_scale.
inline std::vector<CheckResult> run_verify_suite(
    const std::vector<std::string>& modules = {}, double tol_scale = 1.0) {
  if (tol_scale <= 0.0) throw InvalidField("tol_scale must be positive");
  std::vector<CheckResult> results;
  for (const auto& check : verify_detail::build_checks()) {
    if (!modules.empty() &&
        std::find(modules.begin(), modules.end(), check.module) == modules.end())
      continue;
    CheckResult r;
    r.module = check.module;
    r.name = check.name;
    r.tol = check.tol * tol_scale;
    try {
      r.residual = check.residual();
      r.pass = r.residual < r.tol;
    } catch (const std::exception& e) {
      r.residual = std::numeric_limits<double>::infinity();
      r.pass = false;
      r.note = e.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

inline bool all_pass(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.pass; });
}

}  // namespace disloc
