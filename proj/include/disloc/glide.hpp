#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "disloc/burgers.hpp"
#include "disloc/core.hpp"
#include "disloc/flow.hpp"
#include "disloc/frame.hpp"

namespace disloc {

enum class LeafCurvatureClass { Parabolic, Hyperbolic, Elliptic };

inline std::string to_string(LeafCurvatureClass c) {
  switch (c) {
    case LeafCurvatureClass::Parabolic: return "parabolic";
    case LeafCurvatureClass::Hyperbolic: return "hyperbolic";
    default: return "elliptic";
  }
}

/// Equidistant material space g = Psi a + dX3 (x) dX3 with Psi = a_scale^2
/// e^{-2h(X3)} normalized to Psi(0) = 1, and mean curvature H = d_3 h of the
/// X3 = const leaves.
struct UmbilicalSpace {
  Chart chart;
  std::function<double(double)> h;        // h(X3)
  std::function<Mat3(const Vec3&)> leaf;  // a_{alpha beta} of X1, X2 (3x3 with zero 3-row/col)
  double a_scale = 1.0;
  MetricField metric;                     // assembled 3D metric
  std::function<double(double)> H;        // d_3 h, cm^-1
  double gauss_K = 0.0;                   // leaf Gaussian curvature at chart center
  LeafCurvatureClass leaf_class = LeafCurvatureClass::Parabolic;
  double christoffel_residual = 0.0;
};

namespace detail {

/// Gaussian curvature of the 2D leaf metric a at p, K = R_1212 / det a, by
/// chart-aware finite differences of the 2D Christoffels.
inline double leaf_gaussian_curvature(const Chart& ch,
                                      const std::function<Mat3(const Vec3&)>& leaf,
                                      const Vec3& p) {
  auto a2 = [&](const Vec3& q) {
    Eigen::Matrix2d m;
    Mat3 full = leaf(q);
    m << full(0, 0), full(0, 1), full(1, 0), full(1, 1);
    return m;
  };
  auto christoffel2 = [&](const Vec3& q) {
    Eigen::Matrix2d a = a2(q);
    if (a.determinant() <= 0.0) throw NonPositiveLeafMetric();
    Eigen::Matrix2d ainv = a.inverse();
    std::array<Eigen::Matrix2d, 2> da;
    for (int ax = 0; ax < 2; ++ax) {
      double h = 1e-3 * ch.extent(ax);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          auto f1d = [&](double x) {
            Vec3 r = q;
            r[ax] = x;
            return a2(r)(i, j);
          };
          da[ax](i, j) = fd_derivative_1d(f1d, q[ax], ch.lower[ax], ch.upper[ax], h);
        }
    }
    std::array<Eigen::Matrix2d, 2> gam;
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double acc = 0.0;
          for (int l = 0; l < 2; ++l)
            acc += ainv(k, l) * (da[i](l, j) + da[j](i, l) - da[l](i, j));
          gam[k](i, j) = 0.5 * acc;
        }
    return gam;
  };
  // R^1_{212} = d_1 Gamma^1_{22} - d_2 Gamma^1_{12} + Gamma^1_{1l}Gamma^l_{22}
  //             - Gamma^1_{2l}Gamma^l_{12}
  auto gamma_comp = [&](const Vec3& q, int k, int i, int j) {
    return christoffel2(q)[k](i, j);
  };
  double h1 = 1e-3 * ch.extent(0), h2 = 1e-3 * ch.extent(1);
  auto d1 = fd_derivative_1d(
      [&](double x) {
        Vec3 q = p;
        q[0] = x;
        return gamma_comp(q, 0, 1, 1);
      },
      p[0], ch.lower[0], ch.upper[0], h1);
  auto d2 = fd_derivative_1d(
      [&](double x) {
        Vec3 q = p;
        q[1] = x;
        return gamma_comp(q, 0, 0, 1);
      },
      p[1], ch.lower[1], ch.upper[1], h2);
  auto gam = christoffel2(p);
  double r1_212 = d1 - d2;
  for (int l = 0; l < 2; ++l)
    r1_212 += gam[0](0, l) * gam[l](1, 1) - gam[0](1, l) * gam[l](0, 1);
  Eigen::Matrix2d a = a2(p);
  // K = a_{1l} R^l_{212} / det a; lower the first index
  double r_1212 = a(0, 0) * r1_212;
  {
    // second component R^2_{212}
    auto d1b = fd_derivative_1d(
        [&](double x) {
          Vec3 q = p;
          q[0] = x;
          return gamma_comp(q, 1, 1, 1);
        },
        p[0], ch.lower[0], ch.upper[0], h1);
    auto d2b = fd_derivative_1d(
        [&](double x) {
          Vec3 q = p;
          q[1] = x;
          return gamma_comp(q, 1, 0, 1);
        },
        p[1], ch.lower[1], ch.upper[1], h2);
    double r2_212 = d1b - d2b;
    for (int l = 0; l < 2; ++l)
      r2_212 += gam[1](0, l) * gam[l](1, 1) - gam[1](1, l) * gam[l](0, 1);
    r_1212 += a(0, 1) * r2_212;
  }
  return r_1212 / a.determinant();
}

}  // namespace detail

/// Assembles the 3D metric Psi(X3) a + dX3 (x) dX3, checks the Christoffel
/// closed forms (the only nonzero symbols are Gamma^alpha_{beta 3} = -H delta
/// and Gamma^3_{alpha beta} = H g_{alpha beta}) and classifies the leaves by
/// their Gaussian curvature sign.
inline UmbilicalSpace build_umbilical_space(
    Chart chart, const std::function<double(double)>& h_spec,
    std::function<Mat3(const Vec3&)> a_spec = nullptr, double a_scale = 1.0,
    double k_tol = 1e-8) {
  if (std::abs(a_scale * a_scale * std::exp(-2.0 * h_spec(0.0)) - 1.0) > 1e-10)
    throw InvalidField("normalization Psi(0) = 1 requires a_scale = e^{h(0)}");
  if (!a_spec)
    a_spec = [](const Vec3&) {
      Mat3 m = Mat3::Zero();
      m(0, 0) = 1.0;
      m(1, 1) = 1.0;
      return m;
    };
  auto psi = [h_spec, a_scale](double x3) {
    return a_scale * a_scale * std::exp(-2.0 * h_spec(x3));
  };
  auto metric_fn = [a_spec, psi](const Vec3& p) {
    Mat3 a = a_spec(p);
    Eigen::Matrix2d a2;
    a2 << a(0, 0), a(0, 1), a(1, 0), a(1, 1);
    if (a2.determinant() <= 0.0 || a2(0, 0) <= 0.0) throw NonPositiveLeafMetric();
    Mat3 g = Mat3::Zero();
    double w = psi(p[2]);
    if (w <= 0.0) throw NonPositiveLeafMetric();
    g.topLeftCorner<2, 2>() = w * a2;
    g(2, 2) = 1.0;
    return g;
  };
  MetricField metric = MetricField::direct(chart, metric_fn);

  auto H_fn = [h_spec, chart](double x3) {
    double h = 1e-3 * chart.extent(2);
    return fd_derivative_1d(h_spec, x3, chart.lower[2], chart.upper[2], h);
  };

  UmbilicalSpace out{chart,  h_spec, a_spec, a_scale, std::move(metric),
                     H_fn,   0.0,    LeafCurvatureClass::Parabolic, 0.0};

  // Christoffel closed forms hold when the leaf metric is X3-independent.
  for (const Vec3& p : chart.test_lattice()) {
    auto gamma = out.metric.christoffel(p);
    double Hp = H_fn(p[2]);
    Mat3 g = metric_fn(p);
    double res = 0.0;
    res = std::max(res, std::abs(gamma[2](2, 2)));
    for (int al = 0; al < 2; ++al) {
      res = std::max(res, std::abs(gamma[2](al, 2)));
      res = std::max(res, std::abs(gamma[al](2, 2)));
      for (int be = 0; be < 2; ++be) {
        res = std::max(res, std::abs(gamma[al](be, 2) + Hp * (al == be ? 1.0 : 0.0)));
        res = std::max(res, std::abs(gamma[2](al, be) - Hp * g(al, be)));
      }
    }
    out.christoffel_residual = std::max(out.christoffel_residual, res);
  }
  if (out.christoffel_residual > 1e-8)
    throw InvalidField("metric is not of the equidistant umbilical form");

  Vec3 center = 0.5 * (chart.lower + chart.upper);
  // Gaussian curvature of the leaf metric Psi a; the conformal factor is
  // constant on each leaf so K(Psi a) = K(a) / Psi.
  double Ka = detail::leaf_gaussian_curvature(chart, a_spec, center);
  out.gauss_K = Ka / psi(center[2]);
  if (std::abs(out.gauss_K) < k_tol)
    out.leaf_class = LeafCurvatureClass::Parabolic;
  else
    out.leaf_class = out.gauss_K < 0 ? LeafCurvatureClass::Hyperbolic
                                     : LeafCurvatureClass::Elliptic;
  return out;
}

struct SlipSystem {
  Vec3 s = Vec3::Zero();  // unit shear direction
  Vec3 n = Vec3::Zero();  // slip-plane normal
  double gamma_dot = 0.0; // s^-1
  double delta_g = 0.0;
  double S_g = 1.0;
  double psi_angle = 0.0; // cos psi = 1 / S_g
  double reconstruction_residual = 0.0;
};

/// Extracts the shear system from a symmetric stretching rate restricted by
/// the glide geometry: gamma_dot = n D m, delta_g = (n D l)/(n D m),
/// s = (delta_g l + m)/S_g. All components are in the g-orthonormal Volterra
/// basis so Euclidean algebra applies.
inline SlipSystem slip_system(const Mat3& D_g, const VolterraTriple& volterra,
                              double tol = 1e-8) {
  if ((D_g - D_g.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidField("stretching rate must be symmetric");
  const Vec3 &l = volterra.l, &m = volterra.m, &n = volterra.n;
  double scale = std::max(D_g.cwiseAbs().maxCoeff(), 1e-30);
  // inextensibility of the glide distribution: u D u = 0 in span(l, m) and
  // along the normal
  Vec3 lm = (l + m) / std::sqrt(2.0);
  for (const Vec3& u : {l, m, lm})
    if (std::abs(u.dot(D_g * u)) > tol * scale)
      throw NotInextensible("in-plane direction is stretched by the flow");
  if (std::abs(n.dot(D_g * n)) > tol * scale)
    throw NotInextensible("glide-plane normal is stretched by the flow");

  SlipSystem out;
  out.n = n;
  out.gamma_dot = n.dot(D_g * m);
  double d_nl = n.dot(D_g * l);
  if (std::abs(out.gamma_dot) < 1e-30)
    throw InvalidField("vanishing shear rate: slip direction undefined");
  out.delta_g = d_nl / out.gamma_dot;
  out.S_g = std::sqrt(1.0 + out.delta_g * out.delta_g);
  out.s = (out.delta_g * l + m) / out.S_g;
  out.psi_angle = std::acos(1.0 / out.S_g);
  double D = out.S_g * out.gamma_dot;
  Mat3 rebuilt = D * (out.s * n.transpose() + n * out.s.transpose());
  out.reconstruction_residual = (rebuilt - D_g).cwiseAbs().maxCoeff();
  return out;
}

/// Max-norm of the symmetrized 2D covariant gradient of the lowered leaf
/// velocity over the test lattice; zero identifies a Killing field of a.
inline double killing_residual(const Chart& chart,
                               const std::function<Mat3(const Vec3&)>& a_leaf,
                               const std::function<Vec3(const Vec3&)>& v) {
  double worst = 0.0;
  for (const Vec3& p : chart.test_lattice()) {
    if (std::abs(v(p)[2]) > 1e-12)
      throw InvalidField("velocity must be tangent to the leaves");
    Eigen::Matrix2d a;
    Mat3 full = a_leaf(p);
    a << full(0, 0), full(0, 1), full(1, 0), full(1, 1);
    if (a.determinant() <= 0.0) throw NonPositiveLeafMetric();
    Eigen::Matrix2d ainv = a.inverse();
    std::array<Eigen::Matrix2d, 2> da;
    Eigen::Matrix2d dvlow;
    auto vlow = [&](const Vec3& q) {
      Mat3 aq = a_leaf(q);
      Vec3 vq = v(q);
      return Eigen::Vector2d(aq(0, 0) * vq[0] + aq(0, 1) * vq[1],
                             aq(1, 0) * vq[0] + aq(1, 1) * vq[1]);
    };
    for (int ax = 0; ax < 2; ++ax) {
      double h = 1e-3 * chart.extent(ax);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j)
          da[ax](i, j) = fd_derivative_1d(
              [&](double x) {
                Vec3 q = p;
                q[ax] = x;
                return a_leaf(q)(i, j);
              },
              p[ax], chart.lower[ax], chart.upper[ax], h);
        dvlow(ax, i) = fd_derivative_1d(
            [&](double x) {
              Vec3 q = p;
              q[ax] = x;
              return vlow(q)[i];
            },
            p[ax], chart.lower[ax], chart.upper[ax], h);
      }
    }
    std::array<Eigen::Matrix2d, 2> gam;
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          double acc = 0.0;
          for (int l = 0; l < 2; ++l)
            acc += ainv(k, l) * (da[i](l, j) + da[j](i, l) - da[l](i, j));
          gam[k](i, j) = 0.5 * acc;
        }
    Eigen::Vector2d vl = vlow(p);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double nij = dvlow(i, j), nji = dvlow(j, i);
        for (int k = 0; k < 2; ++k) {
          nij -= gam[k](i, j) * vl[k];
          nji -= gam[k](j, i) * vl[k];
        }
        worst = std::max(worst, std::abs(nij + nji));
      }
  }
  return worst;
}

enum class OrowanVariant { Directional, Aligned };

/// Macroscopic shear rate produced by a density of moving effective lines:
/// rho b_g v_g, reduced by cos(psi) when the motion is not Burgers-aligned.
inline double orowan_rate(double rho_bg, double v_g, double psi_angle,
                          OrowanVariant variant) {
  if (v_g <= 0.0) throw NonPositiveSpeed();
  if (variant == OrowanVariant::Aligned) return rho_bg * v_g;
  if (std::abs(psi_angle) >= M_PI / 2.0)
    throw InvalidField("directional variant needs |psi| < pi/2");
  return std::cos(psi_angle) * rho_bg * v_g;
}

struct StressInput {
  double T0 = 1.0;     // kg cm^-2
  double n_exp = 1.0;
  double v0 = 1.0;     // cm s^-1
  double H = 0.0;      // optional mean curvature, cm^-1
};

struct PowerLawResult {
  double v_g = 0.0;          // cm s^-1
  double gamma_dot = 0.0;    // s^-1, H v0 (T/T0)^n when H is supplied
  double gamma_dot0 = 0.0;   // H v0
  double chain_residual = 0.0;
};

/// v_g = v0 (T/T0)^n with the Orowan chain gamma_dot = rho b_g v_g, rho b_g = H.
inline PowerLawResult dislocation_speed_power_law(double T_resolved,
                                                  const StressInput& in) {
  if (T_resolved < 0.0) throw NegativeStress();
  if (in.T0 <= 0.0 || in.v0 <= 0.0) throw InvalidField("T0 and v0 must be positive");
  if (in.n_exp < 1.0) throw InvalidField("stress exponent must be >= 1");
  PowerLawResult out;
  out.v_g = in.v0 * std::pow(T_resolved / in.T0, in.n_exp);
  out.gamma_dot0 = in.H * in.v0;
  out.gamma_dot = out.gamma_dot0 * std::pow(T_resolved / in.T0, in.n_exp);
  if (out.v_g > 0.0)
    out.chain_residual = std::abs(out.gamma_dot - in.H * out.v_g);
  if (out.chain_residual > 1e-12)
    throw InvalidField("power-law shear rate breaks the Orowan chain");
  return out;
}

struct DissipationResult {
  double value = 0.0;  // tr(T D_g)
  bool nonnegative = false;
};

/// tr(T D_g) with the mixed contraction T^{AB} D_AB; both inputs symmetric.
inline DissipationResult dissipation_check(const Mat3& T_up, const Mat3& D_g) {
  if ((T_up - T_up.transpose()).cwiseAbs().maxCoeff() > 1e-10 ||
      (D_g - D_g.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidField("stress and stretching rate must be symmetric");
  DissipationResult out;
  out.value = (T_up * D_g).trace();
  out.nonnegative = out.value >= 0.0;
  return out;
}

}  // namespace disloc
