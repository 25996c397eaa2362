#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "disloc/core.hpp"
#include "disloc/quadrature.hpp"

namespace disloc {

/// Sampled congruence kinematics on a uniform arclength x time lattice.
struct KinematicProfile {
  std::vector<double> s;  // cm, uniform
  std::vector<double> t;  // s, uniform
  // [time][arclength]
  std::vector<std::vector<double>> kappa, theta, zeta, omega;
  bool periodic = true;

  double ds() const { return s.size() > 1 ? s[1] - s[0] : 0.0; }
  double dt() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
};

namespace detail {

/// 4th-order first derivative of a sampled profile along its own axis;
/// periodic wrap or one-sided stencils at clamped boundaries.
inline std::vector<double> deriv_uniform(const std::vector<double>& f, double h,
                                         bool periodic) {
  const int n = static_cast<int>(f.size());
  std::vector<double> d(n, 0.0);
  if (periodic) {
    // last sample is distinct from the first (period = n*h)
    auto at = [&](int i) { return f[((i % n) + n) % n]; };
    for (int i = 0; i < n; ++i)
      d[i] = (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * h);
    return d;
  }
  constexpr int npts = 5;
  for (int i = 0; i < n; ++i) {
    int st = std::clamp(i - 2, 0, n - npts);
    std::vector<double> xs(npts);
    for (int k = 0; k < npts; ++k) xs[k] = (st + k) * h;
    auto w = fd_weights(i * h, xs, 1);
    for (int k = 0; k < npts; ++k) d[i] += w[1][k] * f[st + k];
  }
  return d;
}

}  // namespace detail

/// Closed-form arc profile of the static edge congruence:
/// (omega + i zeta)(s) = (omega0 + i zeta0) exp(-i kappa0 s).
inline std::pair<double, double> static_congruence_solution(double kappa0, double omega0,
                                                            double zeta0, double s) {
  if (kappa0 <= 0.0) throw NonPositiveCurvature();
  double c = std::cos(kappa0 * s), sn = std::sin(kappa0 * s);
  return {omega0 * c + zeta0 * sn, -omega0 * sn + zeta0 * c};
}

/// Real-branch consistency equations with omega prescribed:
///   d_t kappa = -cos(theta) d_s omega
///   d_t theta = zeta + sin(theta) d_s omega / kappa
///   d_t zeta  = omega kappa sin(theta)
/// Method of lines: 4th-order differences in s, classical 4th-order stepping.
inline KinematicProfile evolve_kinematics(
    const std::vector<double>& s_grid, const std::vector<double>& kappa0,
    const std::vector<double>& theta0, const std::vector<double>& zeta0,
    const std::function<double(double, double)>& omega_closure,  // omega(s, t)
    int steps, double dt, bool periodic = true) {
  if (!omega_closure) throw ClosureMissing("the system needs one prescribed variable");
  const int n = static_cast<int>(s_grid.size());
  if (n < 5) throw InvalidField("need at least 5 arclength samples");
  const double ds = s_grid[1] - s_grid[0];

  KinematicProfile prof;
  prof.s = s_grid;
  prof.periodic = periodic;

  struct State {
    std::vector<double> kappa, theta, zeta;
  };
  State y{kappa0, theta0, zeta0};

  auto rhs = [&](const State& st, double time) -> State {
    std::vector<double> om(n);
    for (int i = 0; i < n; ++i) om[i] = omega_closure(s_grid[i], time);
    auto dom = detail::deriv_uniform(om, ds, periodic);
    State d;
    d.kappa.resize(n);
    d.theta.resize(n);
    d.zeta.resize(n);
    for (int i = 0; i < n; ++i) {
      if (st.kappa[i] < 1e-8) throw CurvatureCollapse();
      double sn = std::sin(st.theta[i]), cs = std::cos(st.theta[i]);
      d.kappa[i] = -cs * dom[i];
      d.theta[i] = st.zeta[i] + sn * dom[i] / st.kappa[i];
      d.zeta[i] = om[i] * st.kappa[i] * sn;
    }
    return d;
  };
  auto axpy = [n](const State& a, double c, const State& b) -> State {
    State r = a;
    for (int i = 0; i < n; ++i) {
      r.kappa[i] += c * b.kappa[i];
      r.theta[i] += c * b.theta[i];
      r.zeta[i] += c * b.zeta[i];
    }
    return r;
  };

  auto record = [&](const State& st, double time) {
    prof.t.push_back(time);
    prof.kappa.push_back(st.kappa);
    prof.theta.push_back(st.theta);
    prof.zeta.push_back(st.zeta);
    std::vector<double> om(n);
    for (int i = 0; i < n; ++i) om[i] = omega_closure(s_grid[i], time);
    prof.omega.push_back(om);
  };

  double time = 0.0;
  record(y, time);
  for (int step = 0; step < steps; ++step) {
    State k1 = rhs(y, time);
    State k2 = rhs(axpy(y, 0.5 * dt, k1), time + 0.5 * dt);
    State k3 = rhs(axpy(y, 0.5 * dt, k2), time + 0.5 * dt);
    State k4 = rhs(axpy(y, dt, k3), time + dt);
    for (int i = 0; i < n; ++i) {
      y.kappa[i] += dt / 6.0 * (k1.kappa[i] + 2 * k2.kappa[i] + 2 * k3.kappa[i] + k4.kappa[i]);
      y.theta[i] += dt / 6.0 * (k1.theta[i] + 2 * k2.theta[i] + 2 * k3.theta[i] + k4.theta[i]);
      y.zeta[i] += dt / 6.0 * (k1.zeta[i] + 2 * k2.zeta[i] + 2 * k3.zeta[i] + k4.zeta[i]);
      if (y.kappa[i] < 1e-8) throw CurvatureCollapse();
    }
    time += dt;
    record(y, time);
  }
  return prof;
}

struct ConsistencyResidual {
  double r_zeta = 0.0;   // d_t zeta - omega kappa sin(theta)
  double r_kappa = 0.0;  // d_t kappa + cos(theta) d_s omega
  double r_theta = 0.0;  // kappa (zeta - d_t theta) + sin(theta) d_s omega
  double max() const { return std::max({r_zeta, r_kappa, r_theta}); }
};

/// A-posteriori residuals at one stored time index, by finite differences on
/// the stored lattice (4th-order in both s and t).
inline ConsistencyResidual consistency_residual(const KinematicProfile& prof, int ti) {
  const int n = static_cast<int>(prof.s.size());
  const int m = static_cast<int>(prof.t.size());
  if (m < 5) throw InvalidField("need at least 5 stored time levels");
  const double ds = prof.ds(), dt = prof.dt();

  // time derivatives per arclength node
  auto time_deriv = [&](const std::vector<std::vector<double>>& f, int i) {
    constexpr int npts = 5;
    int st = std::clamp(ti - 2, 0, m - npts);
    std::vector<double> xs(npts);
    for (int k = 0; k < npts; ++k) xs[k] = (st + k) * dt;
    auto w = fd_weights(ti * dt, xs, 1);
    double d = 0.0;
    for (int k = 0; k < npts; ++k) d += w[1][k] * f[st + k][i];
    return d;
  };
  auto dom = detail::deriv_uniform(prof.omega[ti], ds, prof.periodic);

  ConsistencyResidual res;
  for (int i = 0; i < n; ++i) {
    double kap = prof.kappa[ti][i], th = prof.theta[ti][i];
    double ze = prof.zeta[ti][i], om = prof.omega[ti][i];
    res.r_zeta = std::max(res.r_zeta,
                          std::abs(time_deriv(prof.zeta, i) - om * kap * std::sin(th)));
    res.r_kappa = std::max(res.r_kappa,
                           std::abs(time_deriv(prof.kappa, i) + std::cos(th) * dom[i]));
    res.r_theta = std::max(res.r_theta, std::abs(kap * (ze - time_deriv(prof.theta, i)) +
                                                 std::sin(th) * dom[i]));
  }
  return res;
}

/// Complex branch: d_t psi = -d_s omega + i zeta psi, d_t zeta = Im(conj(omega) psi).
struct ComplexProfile {
  std::vector<double> s, t;
  std::vector<std::vector<std::complex<double>>> psi, omega;
  std::vector<std::vector<double>> zeta;
  bool periodic = true;
};

inline ComplexProfile evolve_kinematics_complex(
    const std::vector<double>& s_grid, const std::vector<std::complex<double>>& psi0,
    const std::vector<double>& zeta0,
    const std::function<std::complex<double>(double, double)>& omega_closure, int steps,
    double dt, bool periodic = true) {
  if (!omega_closure) throw ClosureMissing();
  const int n = static_cast<int>(s_grid.size());
  const double ds = s_grid[1] - s_grid[0];
  ComplexProfile prof;
  prof.s = s_grid;
  prof.periodic = periodic;

  auto deriv_c = [&](const std::vector<std::complex<double>>& f) {
    std::vector<double> re(n), im(n);
    for (int i = 0; i < n; ++i) {
      re[i] = f[i].real();
      im[i] = f[i].imag();
    }
    auto dre = detail::deriv_uniform(re, ds, periodic);
    auto dim = detail::deriv_uniform(im, ds, periodic);
    std::vector<std::complex<double>> d(n);
    for (int i = 0; i < n; ++i) d[i] = {dre[i], dim[i]};
    return d;
  };

  std::vector<std::complex<double>> psi = psi0;
  std::vector<double> zeta = zeta0;
  auto rhs = [&](const std::vector<std::complex<double>>& ps, const std::vector<double>& ze,
                 double time, std::vector<std::complex<double>>& dps,
                 std::vector<double>& dze) {
    std::vector<std::complex<double>> om(n);
    for (int i = 0; i < n; ++i) om[i] = omega_closure(s_grid[i], time);
    auto dom = deriv_c(om);
    dps.resize(n);
    dze.resize(n);
    for (int i = 0; i < n; ++i) {
      if (std::abs(ps[i]) < 1e-8) throw CurvatureCollapse();
      dps[i] = -dom[i] + std::complex<double>(0, 1) * ze[i] * ps[i];
      dze[i] = std::imag(std::conj(om[i]) * ps[i]);
    }
  };

  double time = 0.0;
  auto record = [&]() {
    prof.t.push_back(time);
    prof.psi.push_back(psi);
    prof.zeta.push_back(zeta);
    std::vector<std::complex<double>> om(n);
    for (int i = 0; i < n; ++i) om[i] = omega_closure(s_grid[i], time);
    prof.omega.push_back(om);
  };
  record();
  std::vector<std::complex<double>> k1p, k2p, k3p, k4p, tmp_p(n);
  std::vector<double> k1z, k2z, k3z, k4z, tmp_z(n);
  for (int step = 0; step < steps; ++step) {
    rhs(psi, zeta, time, k1p, k1z);
    for (int i = 0; i < n; ++i) {
      tmp_p[i] = psi[i] + 0.5 * dt * k1p[i];
      tmp_z[i] = zeta[i] + 0.5 * dt * k1z[i];
    }
    rhs(tmp_p, tmp_z, time + 0.5 * dt, k2p, k2z);
    for (int i = 0; i < n; ++i) {
      tmp_p[i] = psi[i] + 0.5 * dt * k2p[i];
      tmp_z[i] = zeta[i] + 0.5 * dt * k2z[i];
    }
    rhs(tmp_p, tmp_z, time + 0.5 * dt, k3p, k3z);
    for (int i = 0; i < n; ++i) {
      tmp_p[i] = psi[i] + dt * k3p[i];
      tmp_z[i] = zeta[i] + dt * k3z[i];
    }
    rhs(tmp_p, tmp_z, time + dt, k4p, k4z);
    for (int i = 0; i < n; ++i) {
      psi[i] += dt / 6.0 * (k1p[i] + 2.0 * k2p[i] + 2.0 * k3p[i] + k4p[i]);
      zeta[i] += dt / 6.0 * (k1z[i] + 2.0 * k2z[i] + 2.0 * k3z[i] + k4z[i]);
    }
    time += dt;
    record();
  }
  return prof;
}

}  // namespace disloc
