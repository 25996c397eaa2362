#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "disloc/core.hpp"
#include "disloc/density.hpp"
#include "disloc/frame.hpp"
#include "disloc/geometry.hpp"

namespace disloc {

struct BurgersResult {
  Vec3 components = Vec3::Zero();  // b^a, cm
  double epsilon = +1.0;
  std::string method;  // "circuit" | "surface"
};

/// b^a = eps * closed line integral of the coframe row E^a.
inline BurgersResult burgers_circuit(const MovingFrame& frame, const Polyline& circuit,
                                     int nodes_per_segment = 8) {
  if (!circuit.closed) throw OpenPath("Burgers circuit must be closed");
  BurgersResult r;
  r.epsilon = frame.epsilon();
  r.method = "circuit";
  const Field& co = frame.coframe_field();
  for (int a = 0; a < 3; ++a) {
    // row a of the coframe as a covector field
    std::vector<Field::Fn> comps;
    for (int A = 0; A < 3; ++A)
      comps.push_back([&co, a, A](const Vec3& p) { return co.value(3 * a + A, p); });
    Field row = Field::analytic(frame.chart(), std::move(comps));
    r.components[a] = frame.epsilon() * line_integral(row, circuit, nodes_per_segment);
  }
  return r;
}

/// b^a = integral over the patch of alpha^{ba} l_b with the metric area
/// element; l is the g-unit patch normal. In coordinates the g-area-weighted
/// normal covector is N_A = sqrt(g) eps_ABC (d_u x)^B (d_v x)^C.
inline BurgersResult burgers_surface(const MovingFrame& frame, const DislocationDensity& alpha,
                                     const ParametricPatch& patch, int nodes = 8) {
  MetricField g = MetricField::from_frame(frame);
  auto rule = gauss_legendre(nodes);
  BurgersResult r;
  r.epsilon = frame.epsilon();
  r.method = "surface";
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      double u = 0.5 * (rule.nodes[i] + 1.0);
      double v = 0.5 * (rule.nodes[j] + 1.0);
      Vec3 p = patch.map(u, v);
      frame.chart().require_inside(p);
      Vec3 tu = patch.du(u, v), tv = patch.dv(u, v);
      if (tu.cross(tv).norm() < 1e-12) throw DegeneratePatch();
      double sg = g.sqrt_g(p);
      Vec3 n_cov;  // N_A, |N|_g equals the metric area density
      for (int A = 0; A < 3; ++A) {
        double acc = 0.0;
        for (int B = 0; B < 3; ++B)
          for (int C = 0; C < 3; ++C) acc += levi_civita(A, B, C) * tu[B] * tv[C];
        n_cov[A] = sg * acc;
      }
      // l in frame indices: l^a = e^a_A l^A, l_a = l^a; l^A = g^{AB} N_B / |N|
      Vec3 l_up = g.inverse_at(p) * n_cov;
      double area_density = std::sqrt(n_cov.dot(l_up));
      if (area_density < 1e-14) throw DegeneratePatch();
      l_up /= area_density;
      Vec3 l_frame = frame.coframe_at(p) * l_up;
      Mat3 a = alpha.alpha_at(p);  // alpha^{ab} as (a,b)
      Vec3 integrand;              // alpha^{ba} l_b
      for (int idx = 0; idx < 3; ++idx) integrand[idx] = a.col(idx).dot(l_frame);
      r.components += 0.25 * rule.weights[i] * rule.weights[j] * area_density *
                      patch.orientation * integrand;
    }
  return r;
}

enum class LineType { Edge, Screw, Mixed };

inline std::string to_string(LineType t) {
  switch (t) {
    case LineType::Edge: return "edge";
    case LineType::Screw: return "screw";
    default: return "mixed";
  }
}

struct LocalBurgers {
  Vec3 b = Vec3::Zero();  // frame components, cm
  double b_g = 0.0;
  LineType line_type = LineType::Mixed;
  double angle_bl = 0.0;  // angle between b and l
};

/// Volterra triple at a point, in frame components: line tangent l, Burgers
/// direction m, slip-plane normal n. mu >= 0 by the orientation convention.
struct VolterraTriple {
  Vec3 l, m, n;
  double mu = 0.0;
  double gamma_scalar = 0.0;
  bool volterra = false;  // |b.n| below tolerance
};

struct Classification {
  LocalBurgers local;
  std::optional<VolterraTriple> triple;
};

/// Local Burgers vector rho b^a = l_b alpha^{ba} of the congruence line with
/// tangent l (frame components, g-unit), classified by the angle between b
/// and l. For edge/mixed lines the Volterra triple is constructed from the
/// axial vector t.
inline Classification local_burgers_classify(const DislocationDensity& alpha,
                                             const Vec3& l_frame,
                                             const ScalarDensitySpec& rho, const Vec3& p,
                                             double tol = 1e-6) {
  if (std::abs(l_frame.norm() - 1.0) > 1e-8)
    throw InvalidField("l must be g-unit (frame components Euclidean-unit)");
  double r = rho.at(p);
  Mat3 a = alpha.alpha_at(p);
  Vec3 b;  // b^a = (1/rho) l_b alpha^{ba}
  for (int idx = 0; idx < 3; ++idx) b[idx] = a.col(idx).dot(l_frame) / r;
  Classification out;
  out.local.b = b;
  out.local.b_g = b.norm();
  if (out.local.b_g < 1e-12) throw ZeroBurgers("no effective dislocation line: b vanishes");
  double cos_bl = b.dot(l_frame) / out.local.b_g;
  cos_bl = std::clamp(cos_bl, -1.0, 1.0);
  double sin_bl = std::sqrt(std::max(0.0, 1.0 - cos_bl * cos_bl));
  out.local.angle_bl = std::acos(cos_bl);
  if (std::abs(sin_bl) < tol) {
    out.local.line_type = LineType::Screw;
    return out;
  }
  out.local.line_type = std::abs(cos_bl) < tol ? LineType::Edge : LineType::Mixed;

  Vec3 t = alpha.t_at(p);
  Vec3 mu_vec;  // mu^a = t_b l_c e^{bca} / 2
  for (int idx = 0; idx < 3; ++idx) {
    double acc = 0.0;
    for (int bb = 0; bb < 3; ++bb)
      for (int cc = 0; cc < 3; ++cc) acc += t[bb] * l_frame[cc] * levi_civita(bb, cc, idx);
    mu_vec[idx] = 0.5 * acc;
  }
  double mu = mu_vec.norm();
  if (mu < 1e-12)
    throw UndefinedBurgersDirection("m undefined: t parallel to l or vanishing");
  VolterraTriple tri;
  tri.l = l_frame;
  tri.m = mu_vec / mu;
  tri.n = l_frame.cross(tri.m);  // right-handed in the frame metric
  tri.mu = mu;
  tri.gamma_scalar = r * b.dot(l_frame);
  tri.volterra = std::abs(b.dot(tri.n)) < tol * out.local.b_g;
  out.triple = tri;
  return out;
}

}  // namespace disloc
