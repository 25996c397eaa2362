#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "disloc/core.hpp"
#include "disloc/frame.hpp"
#include "disloc/geometry.hpp"

namespace disloc {

/// Time-parametrized plastic distortion P(X, t) with det P > 0. The induced
/// intrinsic metric is g = P^{-T} P^{-1} (holonomic reference coframe).
struct DistortionHistory {
  Chart chart;
  std::function<Mat3(const Vec3&, double)> P;
  std::function<Mat3(const Vec3&, double)> P_dot;  // optional analytic rate
  std::vector<double> t_samples;                   // s, uniform

  Mat3 at(const Vec3& p, double t) const {
    Mat3 m = P(p, t);
    if (m.determinant() <= 1e-10) throw SingularP();
    return m;
  }

  Mat3 metric(const Vec3& p, double t) const {
    Mat3 pinv = at(p, t).inverse();
    return Mat3(pinv.transpose() * pinv);
  }
};

struct DistortionRates {
  Mat3 S_p;  // mixed indices S^A_B, s^-1
  Mat3 L_p;  // lowered S_AB = g_AC S^C_B
  Mat3 D_p;  // symmetric part of L_p
  double gdot_residual = 0.0;  // max |d_t g + 2 D_p|
};

namespace detail {

/// 4th-order time derivative of a matrix-valued closure on a stored lattice;
/// interior points centered, endpoints one-sided.
inline Mat3 time_derivative(const std::function<Mat3(double)>& f,
                            const std::vector<double>& ts, double t) {
  if (ts.size() < 5) throw InvalidField("need at least 5 time samples");
  double dt = ts[1] - ts[0];
  int m = static_cast<int>(ts.size());
  int ti = static_cast<int>(std::llround((t - ts[0]) / dt));
  if (ti < 0 || ti >= m || std::abs(ts[ti] - t) > 1e-9 * std::max(1.0, std::abs(t)))
    throw InvalidField("t must lie on the sampled time lattice");
  constexpr int npts = 5;
  int st = std::clamp(ti - 2, 0, m - npts);
  std::vector<double> xs(npts);
  for (int k = 0; k < npts; ++k) xs[k] = ts[st + k];
  auto w = fd_weights(t, xs, 1);
  Mat3 d = Mat3::Zero();
  for (int k = 0; k < npts; ++k) d += w[1][k] * f(ts[st + k]);
  return d;
}

}  // namespace detail

/// Plastic rates S_p = P_dot P^{-1}, lowered form and its symmetric part, and
/// the residual of d_t g + 2 D_p = 0 for the induced metric.
inline DistortionRates distortion_rates(const DistortionHistory& h, const Vec3& p, double t) {
  h.chart.require_inside(p);
  Mat3 P = h.at(p, t);
  Mat3 Pdot = h.P_dot ? h.P_dot(p, t)
                      : detail::time_derivative([&](double tt) { return h.at(p, tt); },
                                                h.t_samples, t);
  DistortionRates out;
  out.S_p = Pdot * P.inverse();
  Mat3 g = h.metric(p, t);
  out.L_p = g * out.S_p;
  out.D_p = 0.5 * (out.L_p + out.L_p.transpose());
  Mat3 gdot = detail::time_derivative([&](double tt) { return h.metric(p, tt); },
                                      h.t_samples, t);
  out.gdot_residual = (gdot + 2.0 * out.D_p).cwiseAbs().maxCoeff();
  return out;
}

/// One material trajectory with its seed-stencil deformation gradient.
struct TrajectoryRecord {
  Vec3 seed;
  Vec3 position;             // chi_T(seed)
  std::vector<Vec3> path;    // stored every step, path.front() = seed
  Mat3 gradient;             // chi^A_a, d(chi^A)/d(xi^a)
  double J = 0.0;            // det gradient
  Mat3 G;                    // pulled-back metric G_ab at the seed
  Mat3 E_p;                  // plastic strain 1/2 (G - g0)
  double det_residual = 0.0; // relative |det G - J^2 det(g o chi)|
};

struct FlowState {
  std::vector<TrajectoryRecord> records;
  double T = 0.0;
  double dt = 0.0;
};

/// Integrates seeds along v with a classical 4th-order fixed step, then
/// differentiates the flow map across a 6-satellite stencil (+-h per axis)
/// to pull the metric back and form the plastic strain.
inline FlowState advance_flow(const std::function<Vec3(const Vec3&, double)>& v,
                              const MetricField& g, const std::vector<Vec3>& seeds,
                              double T, double dt, double stencil_h = 1e-4) {
  if (dt <= 0.0) throw InvalidField("dt must be positive");
  const Chart& ch = g.chart();
  int steps = static_cast<int>(std::llround(T / dt));
  if (steps < 1 || std::abs(steps * dt - T) > 1e-9 * std::max(1.0, T))
    throw InvalidField("T must be an integer number of steps");

  auto integrate = [&](Vec3 q, std::vector<Vec3>* path) {
    if (path) path->push_back(q);
    double t = 0.0;
    for (int s = 0; s < steps; ++s) {
      if (!ch.contains(q)) throw ExitedDomain();
      Vec3 k1 = v(q, t);
      Vec3 k2 = v(Vec3(q + 0.5 * dt * k1), t + 0.5 * dt);
      Vec3 k3 = v(Vec3(q + 0.5 * dt * k2), t + 0.5 * dt);
      Vec3 k4 = v(Vec3(q + dt * k3), t + dt);
      q += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += dt;
      if (path) path->push_back(q);
    }
    if (!ch.contains(q)) throw ExitedDomain();
    return q;
  };

  FlowState st;
  st.T = T;
  st.dt = dt;
  for (const Vec3& seed : seeds) {
    ch.require_inside(seed);
    TrajectoryRecord rec;
    rec.seed = seed;
    rec.position = integrate(seed, &rec.path);
    for (int a = 0; a < 3; ++a) {
      Vec3 plus = seed, minus = seed;
      plus[a] += stencil_h;
      minus[a] -= stencil_h;
      Vec3 fp = integrate(plus, nullptr);
      Vec3 fm = integrate(minus, nullptr);
      rec.gradient.col(a) = (fp - fm) / (2.0 * stencil_h);
    }
    rec.J = rec.gradient.determinant();
    if (rec.J < 1e-8) throw JacobianCollapse();
    Mat3 g_end = g.at(rec.position);
    rec.G = rec.gradient.transpose() * g_end * rec.gradient;
    rec.E_p = 0.5 * (rec.G - g.at(seed));
    double lhs = rec.G.determinant();
    double rhs = rec.J * rec.J * g_end.determinant();
    rec.det_residual = std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-30);
    if (rec.det_residual > 1e-6)
      throw JacobianCollapse("pullback determinant identity violated");
    st.records.push_back(std::move(rec));
  }
  return st;
}

struct StretchingRate {
  Mat3 D;                    // D_AB, s^-1
  double trace = 0.0;        // g^{AB} D_AB
  double divergence = 0.0;   // div_g v
  double trace_residual = 0.0;
};

/// D_AB = sym(nabla_A v_B) of the lowered velocity; the trace must equal the
/// covariant divergence.
inline StretchingRate rate_of_stretchings(const MetricField& g,
                                          const std::function<Vec3(const Vec3&)>& v,
                                          const Vec3& p) {
  const Chart& ch = g.chart();
  auto gamma = g.christoffel(p);
  Vec3 vp = v(p);
  Vec3 v_low = g.at(p) * vp;
  auto v_low_fn = [&](const Vec3& q) { return Vec3(g.at(q) * v(q)); };

  Mat3 dvlow;  // d_A v_B
  Mat3 dv;     // d_A v^B
  for (int A = 0; A < 3; ++A) {
    double h = 1e-3 * ch.extent(A);
    for (int B = 0; B < 3; ++B) {
      auto f_low = [&](double x) {
        Vec3 q = p;
        q[A] = x;
        return v_low_fn(q)[B];
      };
      auto f_up = [&](double x) {
        Vec3 q = p;
        q[A] = x;
        return v(q)[B];
      };
      dvlow(A, B) = fd_derivative_1d(f_low, p[A], ch.lower[A], ch.upper[A], h);
      dv(A, B) = fd_derivative_1d(f_up, p[A], ch.lower[A], ch.upper[A], h);
    }
  }
  Mat3 nabla;  // nabla_A v_B
  for (int A = 0; A < 3; ++A)
    for (int B = 0; B < 3; ++B) {
      double acc = dvlow(A, B);
      for (int C = 0; C < 3; ++C) acc -= gamma[C](A, B) * v_low[C];
      nabla(A, B) = acc;
    }
  StretchingRate out;
  out.D = 0.5 * (nabla + nabla.transpose());
  out.trace = (g.inverse_at(p) * out.D).trace();
  out.divergence = dv.trace();
  for (int A = 0; A < 3; ++A)
    for (int B = 0; B < 3; ++B) out.divergence += gamma[A](A, B) * vp[B];
  out.trace_residual = std::abs(out.trace - out.divergence);
  return out;
}

/// Tensor field of rank <= 3 with declared index variance (true = upper).
struct TensorField {
  int rank = 0;
  std::array<bool, 3> up{};
  // unused trailing indices are passed as 0
  std::function<double(const Vec3&, int, int, int)> comp;
};

/// Lie derivative along u: the convective term plus one correction per slot
/// (+T d u for lower indices, -T d u for upper ones). Returned flattened
/// row-major over 3^rank entries.
inline std::vector<double> lie_derivative(const TensorField& T,
                                          const std::function<Vec3(const Vec3&)>& u,
                                          const Chart& ch, const Vec3& p) {
  if (T.rank < 0 || T.rank > 3) throw UnsupportedRank();
  auto d_scalar = [&](const std::function<double(const Vec3&)>& f, int axis) {
    double h = 1e-3 * ch.extent(axis);
    auto f1d = [&](double x) {
      Vec3 q = p;
      q[axis] = x;
      return f(q);
    };
    return fd_derivative_1d(f1d, p[axis], ch.lower[axis], ch.upper[axis], h);
  };
  Vec3 up_vec = u(p);
  Mat3 du;  // du(A, B) = d_A u^B
  for (int A = 0; A < 3; ++A)
    for (int B = 0; B < 3; ++B)
      du(A, B) = d_scalar([&](const Vec3& q) { return u(q)[B]; }, A);

  int n = 1;
  for (int r = 0; r < T.rank; ++r) n *= 3;
  std::vector<double> out(n, 0.0);
  std::array<int, 3> idx{0, 0, 0};
  for (int flat = 0; flat < n; ++flat) {
    int rem = flat;
    for (int r = T.rank - 1; r >= 0; --r) {
      idx[r] = rem % 3;
      rem /= 3;
    }
    double val = 0.0;
    for (int C = 0; C < 3; ++C)
      val += up_vec[C] * d_scalar([&](const Vec3& q) { return T.comp(q, idx[0], idx[1], idx[2]); }, C);
    for (int r = 0; r < T.rank; ++r) {
      std::array<int, 3> jdx = idx;
      for (int C = 0; C < 3; ++C) {
        jdx[r] = C;
        double tc = T.comp(p, jdx[0], jdx[1], jdx[2]);
        if (T.up[r])
          val -= tc * du(C, idx[r]);
        else
          val += tc * du(idx[r], C);
      }
    }
    out[flat] = val;
  }
  return out;
}

inline double lie_scalar(const std::function<double(const Vec3&)>& f,
                         const std::function<Vec3(const Vec3&)>& u, const Chart& ch,
                         const Vec3& p) {
  TensorField T{0, {}, [&](const Vec3& q, int, int, int) { return f(q); }};
  return lie_derivative(T, u, ch, p)[0];
}

/// L_u v = [u, v].
inline Vec3 lie_vector(const std::function<Vec3(const Vec3&)>& vf,
                       const std::function<Vec3(const Vec3&)>& u, const Chart& ch,
                       const Vec3& p) {
  TensorField T{1, {true, false, false},
                [&](const Vec3& q, int i, int, int) { return vf(q)[i]; }};
  auto flat = lie_derivative(T, u, ch, p);
  return Vec3(flat[0], flat[1], flat[2]);
}

inline Vec3 lie_covector(const std::function<Vec3(const Vec3&)>& w,
                         const std::function<Vec3(const Vec3&)>& u, const Chart& ch,
                         const Vec3& p) {
  TensorField T{1, {false, false, false},
                [&](const Vec3& q, int i, int, int) { return w(q)[i]; }};
  auto flat = lie_derivative(T, u, ch, p);
  return Vec3(flat[0], flat[1], flat[2]);
}

/// L_u g for a covariant rank-2 field; for the metric this is twice the
/// small-strain tensor of u.
inline Mat3 lie_cov2(const std::function<Mat3(const Vec3&)>& g2,
                     const std::function<Vec3(const Vec3&)>& u, const Chart& ch,
                     const Vec3& p) {
  TensorField T{2, {false, false, false},
                [&](const Vec3& q, int i, int j, int) { return g2(q)(i, j); }};
  auto flat = lie_derivative(T, u, ch, p);
  Mat3 out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out(i, j) = flat[3 * i + j];
  return out;
}

struct FlowConsistency {
  double r_balance = 0.0;         // 1/2 (d_t g + L_v g) - (D_g - D_p)
  double r_rates_equal = 0.0;     // D_p - D_g
  double r_metric_rate = 0.0;     // d_t g + 2 D_g
  double r_volume = 0.0;          // d_t ln sqrt(g) + div_g v
  double max_divergence = 0.0;    // incompressibility measure
  bool consistent = false;
  bool conservative = false;
};

/// Residuals of the rate balance over the test lattice at one instant. The
/// flow is consistent when the plastic and stretching rates agree and the
/// metric relaxes at rate -2 D_g; conservative when also incompressible.
inline FlowConsistency flow_consistency(
    const Chart& chart, const std::function<Mat3(const Vec3&, double)>& g_of_t,
    const std::function<Vec3(const Vec3&, double)>& v,
    const std::function<Mat3(const Vec3&, double)>& D_p, double t, double t_lo,
    double t_hi, double tol = 1e-8) {
  auto metric_now = MetricField::direct(
      chart, [&](const Vec3& q) { return g_of_t(q, t); });
  FlowConsistency out;
  double ht = std::max(1e-3 * (t_hi - t_lo), 1e-6);
  for (const Vec3& p : chart.test_lattice()) {
    Mat3 gdot;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        gdot(i, j) = fd_derivative_1d(
            [&](double tt) { return g_of_t(p, tt)(i, j); }, t, t_lo, t_hi, ht);
    auto v_now = [&](const Vec3& q) { return v(q, t); };
    StretchingRate sr = rate_of_stretchings(metric_now, v_now, p);
    Mat3 lvg = lie_cov2([&](const Vec3& q) { return g_of_t(q, t); }, v_now, chart, p);
    Mat3 dp = D_p(p, t);
    out.r_balance = std::max(out.r_balance, (0.5 * (gdot + lvg) - (sr.D - dp)).cwiseAbs().maxCoeff());
    out.r_rates_equal = std::max(out.r_rates_equal, (dp - sr.D).cwiseAbs().maxCoeff());
    out.r_metric_rate = std::max(out.r_metric_rate, (gdot + 2.0 * sr.D).cwiseAbs().maxCoeff());
    double dlnsg = fd_derivative_1d(
        [&](double tt) { return std::log(std::sqrt(g_of_t(p, tt).determinant())); }, t,
        t_lo, t_hi, ht);
    out.r_volume = std::max(out.r_volume, std::abs(dlnsg + sr.divergence));
    out.max_divergence = std::max(out.max_divergence, std::abs(sr.divergence));
  }
  out.consistent = out.r_rates_equal < tol && out.r_metric_rate < tol;
  out.conservative = out.consistent && out.max_divergence < tol;
  return out;
}

}  // namespace disloc
