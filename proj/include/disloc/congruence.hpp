#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>

#include "disloc/core.hpp"
#include "disloc/frame.hpp"

namespace disloc {

/// Volterra triple as coordinate-component closures, differentiable along
/// congruence lines.
struct VolterraFields {
  std::function<Vec3(const Vec3&)> l, m, n;
};

struct FrenetState {
  Vec3 e1, e2, e3;  // coordinate components, g-orthonormal
  double kappa = 0.0;
  double tau = 0.0;
  double theta = 0.0;                       // angle between e2 and the Burgers direction m
  std::complex<double> psi{0.0, 0.0};       // kappa * exp(i theta)
  bool has_theta = false;
  double complex_frenet_residual = 0.0;     // | nabla_l N + psi l |_g, N = m + i n

  /// Burgers direction and slip normal recovered from (e2, e3, theta).
  Vec3 burgers_direction() const { return Vec3(std::cos(theta) * e2 - std::sin(theta) * e3); }
  Vec3 slip_normal() const { return Vec3(std::sin(theta) * e2 + std::cos(theta) * e3); }
};

/// Frenet data of the congruence of l at p. e2 = (nabla_l l)/kappa with
/// kappa = |nabla_l l|_g > 0; e3 completes the right-handed g-orthonormal
/// triple; tau is extracted from nabla_l e2 = -kappa e1 + tau e3 and kept
/// nonnegative by orienting e3.
inline FrenetState frenet_along(const MetricField& g,
                                const std::function<Vec3(const Vec3&)>& l, const Vec3& p,
                                const std::optional<VolterraFields>& volterra = std::nullopt,
                                double kappa_min = 1e-8) {
  FrenetState st;
  st.e1 = l(p);
  if (std::abs(g.norm(st.e1, p) - 1.0) > 1e-6)
    throw InvalidField("congruence tangent must be g-unit near p");
  Vec3 curv = levi_civita_covariant(g, l, st.e1, p);
  st.kappa = g.norm(curv, p);
  if (st.kappa < kappa_min)
    throw VanishingCurvature("Frenet frame undefined: curvature below threshold");
  st.e2 = curv / st.kappa;
  st.e3 = g.cross(st.e1, st.e2, p);
  double n3 = g.norm(st.e3, p);
  if (n3 < 1e-12) throw VanishingCurvature("degenerate Frenet triple");
  st.e3 /= n3;

  auto e2_field = [&g, l](const Vec3& q) -> Vec3 {
    Vec3 lq = l(q);
    Vec3 c = levi_civita_covariant(g, l, lq, q);
    double k = c.norm() > 0 ? g.norm(c, q) : 0.0;
    if (k < 1e-14) throw VanishingCurvature();
    return Vec3(c / k);
  };
  Vec3 de2 = levi_civita_covariant(g, std::function<Vec3(const Vec3&)>(e2_field), st.e1, p);
  st.tau = g.dot(de2, st.e3, p);
  if (st.tau < 0.0) {  // keep tau >= 0 by flipping the second normal
    st.e3 = -st.e3;
    st.tau = -st.tau;
  }

  if (volterra) {
    Vec3 m = volterra->m(p), n = volterra->n(p);
    double c = g.dot(st.e2, m, p);
    double s = g.dot(st.e2, n, p);
    st.theta = std::atan2(s, c);
    st.psi = std::polar(st.kappa, st.theta);
    st.has_theta = true;
    // nabla_l N = -psi l with N = m + i n
    Vec3 dm = levi_civita_covariant(g, volterra->m, st.e1, p);
    Vec3 dn = levi_civita_covariant(g, volterra->n, st.e1, p);
    Vec3 re = dm + st.psi.real() * st.e1;
    Vec3 im = dn + st.psi.imag() * st.e1;
    st.complex_frenet_residual = std::max(g.norm(re, p), g.norm(im, p));
  }
  return st;
}

/// Out-of-slip-plane rate of the local Burgers vector: n . nabla_l b.
/// Requires b to lie in the slip plane at p (Volterra line).
inline double climb_component(const std::function<Vec3(const Vec3&)>& b_field,
                              const FrenetState& frenet, const MetricField& g, const Vec3& p,
                              double tol = 1e-6) {
  if (!frenet.has_theta)
    throw InvalidField("climb component needs a Frenet state with the Burgers angle");
  Vec3 n = frenet.slip_normal();
  Vec3 b = b_field(p);
  double bg = g.norm(b, p);
  if (bg > 0 && std::abs(g.dot(b, n, p)) > tol * std::max(bg, 1.0))
    throw NotVolterra("Burgers vector leaves the slip plane");
  Vec3 db = levi_civita_covariant(g, b_field, frenet.e1, p);
  return g.dot(n, db, p);
}

/// Closed-form climb rate b_m (tau - d theta/ds) + b_l kappa sin(theta).
inline double climb_closed_form(double b_l, double b_m, double kappa, double tau,
                                double theta, double dtheta_ds) {
  return b_m * (tau - dtheta_ds) + b_l * kappa * std::sin(theta);
}

struct PrincipalDecomposition {
  double gamma_scalar = 0.0;
  double phi = 0.0;
  Vec3 gamma1 = Vec3::Zero(), gamma2 = Vec3::Zero(), gamma3 = Vec3::Zero();
  Vec3 k = Vec3::Zero();
  double H = 0.0;
  Vec3 t_reconstructed = Vec3::Zero();
  double t_residual = 0.0;
  double mu = 0.0;           // sqrt(H^2 + gamma^2)
  bool degenerate = false;   // gamma = 0: rho b_g = H for any in-plane tangent
  double rho_bg = 0.0;
};

/// Spectral decomposition of the symmetric part gamma^{ab} (frame indices).
/// Requires the eigenvalue pattern (-gamma, 0, +gamma); the axial vector t
/// supplies the mean curvature H and fixes orientations.
inline PrincipalDecomposition principal_congruences(const Mat3& gamma_tensor, const Vec3& t,
                                                    double tol = 1e-6) {
  if ((gamma_tensor - gamma_tensor.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidField("gamma tensor must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> es(gamma_tensor);
  Vec3 ev = es.eigenvalues();  // ascending
  double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-30);
  PrincipalDecomposition out;
  out.H = t[2] / 2.0;

  if (ev.cwiseAbs().maxCoeff() < tol) {
    // gamma = 0: any in-plane direction is principal
    out.degenerate = true;
    out.gamma_scalar = 0.0;
    out.mu = std::abs(out.H);
    out.rho_bg = out.H;
    out.gamma3 = Vec3(1, 0, 0);
    out.k = Vec3(0, -1, 0);
    out.t_reconstructed = Vec3(0, 0, 2.0 * out.H);
    out.t_residual = (out.t_reconstructed - t).norm();
    return out;
  }

  if (std::abs(ev[0] + ev[2]) > tol * scale || std::abs(ev[1]) > tol * scale)
    throw PatternMismatch("eigenvalues do not fit the (-gamma, 0, +gamma) pattern");
  double gam = 0.5 * (ev[2] - ev[0]);
  out.gamma_scalar = gam;
  Vec3 u0 = es.eigenvectors().col(0);  // eigenvalue -gamma
  Vec3 u2 = es.eigenvectors().col(2);  // eigenvalue +gamma

  // fix signs so that (gamma1 - gamma2)/sqrt(2) = E_3
  const Vec3 e3(0, 0, 1);
  double best = std::numeric_limits<double>::max();
  for (double s0 : {1.0, -1.0})
    for (double s2 : {1.0, -1.0}) {
      Vec3 d = (s0 * u0 - s2 * u2) / std::sqrt(2.0);
      double err = (d - e3).norm();
      if (err < best) {
        best = err;
        out.gamma1 = s0 * u0;
        out.gamma2 = s2 * u2;
      }
    }
  if (best > tol * 10)
    throw PatternMismatch("principal plane is not aligned with the frame E_3 axis");
  out.k = (out.gamma1 + out.gamma2) / std::sqrt(2.0);
  out.phi = std::atan2(out.k[0], -out.k[1]);  // k = sin(phi) E_1 - cos(phi) E_2
  out.gamma3 = Vec3(std::cos(out.phi), std::sin(out.phi), 0.0);
  out.mu = std::sqrt(out.H * out.H + gam * gam);
  out.rho_bg = out.mu;
  out.t_reconstructed = Vec3(-2.0 * gam * out.gamma3 + 2.0 * out.H * e3);
  out.t_residual = (out.t_reconstructed - t).norm();
  return out;
}

/// Normal curvature of the X^3 = const leaves in a tangent direction u,
/// from the second fundamental form Gamma^3_{alpha beta} of the metric.
inline double leaf_normal_curvature(const MetricField& g, const Vec3& p, const Vec3& u_inplane) {
  auto gamma = g.christoffel(p);
  Vec3 u = u_inplane;
  u[2] = 0.0;
  double ii = u.dot(gamma[2] * u);
  double i1 = u.dot(g.at(p) * u);
  if (i1 < 1e-30) throw InvalidField("degenerate tangent direction");
  return ii / i1;
}

}  // namespace disloc
