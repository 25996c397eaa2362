#pragma once

#include <cmath>
#include <functional>

#include "disloc/core.hpp"
#include "disloc/frame.hpp"
#include "disloc/geometry.hpp"

namespace disloc {

/// Rank-3 frame-index object stored as result[c](a,b).
using Rank3 = std::array<Mat3, 3>;

/// Lie-bracket coefficients of the frame: [E_a, E_b] = C_ab^c E_c.
/// C_ab^c = e^c_A (E_a^B d_B E_b^A - E_b^B d_B E_a^A).
inline Rank3 anholonomy_at(const MovingFrame& frame, const Vec3& p) {
  Mat3 f = frame.frame_at(p);     // e_a^A
  Mat3 co = frame.coframe_at(p);  // e^c_A
  std::array<Mat3, 3> df;         // df[B](a,A) = d_B e_a^A
  for (int B = 0; B < 3; ++B) df[B] = frame.frame_partial(B, p);
  Rank3 c;
  for (int idx = 0; idx < 3; ++idx) c[idx].setZero();
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      Vec3 bracket = Vec3::Zero();
      for (int A = 0; A < 3; ++A)
        for (int B = 0; B < 3; ++B)
          bracket[A] += f(a, B) * df[B](b, A) - f(b, B) * df[B](a, A);
      for (int cc = 0; cc < 3; ++cc) {
        double val = co.row(cc).dot(bracket);
        c[cc](a, b) = val;
        c[cc](b, a) = -val;  // antisymmetric by construction
      }
    }
  return c;
}

/// Torsion in frame indices: S_ab^c = -C_ab^c / 2, stored as result[c](a,b).
inline Rank3 torsion_at(const MovingFrame& frame, const Vec3& p) {
  Rank3 s = anholonomy_at(frame, p);
  for (auto& m : s) m *= -0.5;
  return s;
}

/// Exterior derivative of the coframe rows: (dE^a)_{AB} = d_A e^a_B - d_B e^a_A,
/// returned as result[a](A,B). Feeds the surface-integral Burgers route.
inline Rank3 coframe_exterior_derivative_at(const MovingFrame& frame, const Vec3& p) {
  std::array<Mat3, 3> dc;
  for (int A = 0; A < 3; ++A) dc[A] = frame.coframe_partial(A, p);
  Rank3 d;
  for (int a = 0; a < 3; ++a)
    for (int A = 0; A < 3; ++A)
      for (int B = 0; B < 3; ++B) d[a](A, B) = dc[A](a, B) - dc[B](a, A);
  return d;
}

/// Dislocation density tensor alpha^{ab} = eps S_cd^b e^{cda} together with
/// its symmetric part gamma and axial covector t_a = e_abc alpha^{bc}.
class DislocationDensity {
 public:
  explicit DislocationDensity(MovingFrame frame) : frame_(std::move(frame)) {
    for (const Vec3& p : frame_.chart().test_lattice()) check_reconstruction(p);
  }

  const MovingFrame& frame() const { return frame_; }
  double epsilon() const { return frame_.epsilon(); }

  /// alpha^{ab}, stored as (a,b).
  Mat3 alpha_at(const Vec3& p) const {
    Rank3 s = torsion_at(frame_, p);
    Mat3 alpha = Mat3::Zero();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double acc = 0.0;
        for (int c = 0; c < 3; ++c)
          for (int d = 0; d < 3; ++d) acc += s[b](c, d) * levi_civita(c, d, a);
        alpha(a, b) = frame_.epsilon() * acc;
      }
    return alpha;
  }

  Mat3 gamma_at(const Vec3& p) const {
    Mat3 a = alpha_at(p);
    return Mat3(0.5 * (a + a.transpose()));
  }

  /// t_a = e_abc alpha^{bc} (equals eps C_ab^b).
  Vec3 t_at(const Vec3& p) const {
    Mat3 a = alpha_at(p);
    Vec3 t = Vec3::Zero();
    for (int i = 0; i < 3; ++i)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) t[i] += levi_civita(i, b, c) * a(b, c);
    return t;
  }

  /// Residual of rebuilding alpha from (gamma, t): alpha - gamma - t_c e^{cab}/2.
  double decomposition_residual(const Vec3& p) const {
    Mat3 a = alpha_at(p);
    Mat3 g = gamma_at(p);
    Vec3 t = t_at(p);
    double res = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double sigma = 0.0;
        for (int c = 0; c < 3; ++c) sigma += 0.5 * t[c] * levi_civita(c, i, j);
        res = std::max(res, std::abs(a(i, j) - g(i, j) - sigma));
      }
    return res;
  }

  /// Residual of eps C_ab^c = t_[a delta_b]^c - e_abd gamma^{dc}.
  double trace_identity_residual(const Vec3& p) const {
    Rank3 cobj = anholonomy_at(frame_, p);
    Mat3 g = gamma_at(p);
    Vec3 t = t_at(p);
    double res = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) {
          double rhs = 0.5 * (t[a] * (b == c ? 1.0 : 0.0) - t[b] * (a == c ? 1.0 : 0.0));
          for (int d = 0; d < 3; ++d) rhs -= levi_civita(a, b, d) * g(d, c);
          res = std::max(res, std::abs(frame_.epsilon() * cobj[c](a, b) - rhs));
        }
    return res;
  }

 private:
  void check_reconstruction(const Vec3& p) const {
    // grid-sampled frames carry interpolation error; analytic ones must close
    double tol = frame_.coframe_field().gridded() ? 1e-3 : 1e-8;
    if (decomposition_residual(p) > 1e-10 || trace_identity_residual(p) > tol)
      throw ReconstructionFailure("dislocation density decomposition does not close");
  }

  MovingFrame frame_;
};

inline DislocationDensity dislocation_tensor(const MovingFrame& frame) {
  return DislocationDensity(frame);
}

struct HolonomyVerdict {
  bool holonomic;
  double max_torsion;
};

inline HolonomyVerdict is_holonomic(const MovingFrame& frame, double tol) {
  if (tol <= 0.0) throw InvalidField("tolerance must be positive");
  double max_s = 0.0;
  for (const Vec3& p : frame.chart().test_lattice()) {
    Rank3 s = torsion_at(frame, p);
    for (const auto& m : s) max_s = std::max(max_s, m.cwiseAbs().maxCoeff());
  }
  return {max_s < tol, max_s};
}

/// Positive scalar dislocation density (cm^-2).
struct ScalarDensitySpec {
  std::function<double(const Vec3&)> rho;

  double at(const Vec3& p) const {
    double r = rho(p);
    if (r <= 0.0) throw NonPositiveDensity();
    return r;
  }
};

/// Total dislocation line length over an axis-aligned region:
/// quadrature of rho * sqrt(g).
inline double total_line_length(const ScalarDensitySpec& rho, const MetricField& g,
                                const Vec3& region_lower, const Vec3& region_upper,
                                int nodes = 8) {
  g.chart().require_inside(region_lower);
  g.chart().require_inside(region_upper);
  auto rule = gauss_legendre(nodes);
  Vec3 half = 0.5 * (region_upper - region_lower);
  Vec3 mid = 0.5 * (region_upper + region_lower);
  double total = 0.0;
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j)
      for (int k = 0; k < nodes; ++k) {
        Vec3 p(mid[0] + half[0] * rule.nodes[i], mid[1] + half[1] * rule.nodes[j],
               mid[2] + half[2] * rule.nodes[k]);
        total += rule.weights[i] * rule.weights[j] * rule.weights[k] * rho.at(p) * g.sqrt_g(p);
      }
  return total * half[0] * half[1] * half[2];
}

}  // namespace disloc
