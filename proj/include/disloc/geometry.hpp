#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "disloc/core.hpp"
#include "disloc/field.hpp"
#include "disloc/quadrature.hpp"

namespace disloc {

struct Polyline {
  std::vector<Vec3> vertices;
  bool closed = false;

  Polyline() = default;
  Polyline(std::vector<Vec3> v, bool is_closed) : vertices(std::move(v)), closed(is_closed) {
    if (vertices.size() < 2) throw InvalidField("polyline needs at least 2 vertices");
    if (closed && (vertices[0] - vertices[1]).norm() == 0.0)
      throw InvalidField("closed polyline: first and second vertex coincide");
  }

  /// Segment endpoints, including the wrap-around segment when closed.
  std::vector<std::pair<Vec3, Vec3>> segments() const {
    std::vector<std::pair<Vec3, Vec3>> segs;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
      segs.emplace_back(vertices[i], vertices[i + 1]);
    if (closed && (vertices.back() - vertices.front()).norm() > 0.0)
      segs.emplace_back(vertices.back(), vertices.front());
    return segs;
  }
};

struct ParametricPatch {
  std::function<Vec3(double, double)> map;                      // (u,v) in [0,1]^2
  std::function<Vec3(double, double)> du, dv;                   // partials of the map
  double orientation = +1.0;

  static ParametricPatch rectangle(const Vec3& origin, const Vec3& edge_u, const Vec3& edge_v,
                                   double orientation = +1.0) {
    ParametricPatch patch;
    patch.map = [=](double u, double v) { return Vec3(origin + u * edge_u + v * edge_v); };
    patch.du = [=](double, double) { return edge_u; };
    patch.dv = [=](double, double) { return edge_v; };
    patch.orientation = orientation;
    return patch;
  }

  Polyline boundary() const {
    std::vector<Vec3> verts;
    const int n = 8;  // polyline approximation of each side
    for (int k = 0; k < n; ++k) verts.push_back(map(double(k) / n, 0.0));
    for (int k = 0; k < n; ++k) verts.push_back(map(1.0, double(k) / n));
    for (int k = 0; k < n; ++k) verts.push_back(map(1.0 - double(k) / n, 1.0));
    for (int k = 0; k < n; ++k) verts.push_back(map(0.0, 1.0 - double(k) / n));
    Polyline b(verts, true);
    if (orientation < 0) std::reverse(b.vertices.begin(), b.vertices.end());
    return b;
  }
};

/// d(component c of f)/dX^axis at p.
inline double partial_derivative(const Field& f, int c, int axis, const Vec3& p) {
  return f.partial(c, axis, p);
}

/// Gauss-Legendre quadrature of <omega, tangent> over the (piecewise
/// straight) path. omega: 3-component covector field.
inline double line_integral(const Field& omega, const Polyline& path,
                            int nodes_per_segment = 8) {
  if (omega.ncomp() != 3) throw InvalidField("line_integral expects a covector field");
  if (nodes_per_segment < 2) throw InvalidField("need at least 2 quadrature nodes");
  auto rule = gauss_legendre(nodes_per_segment);
  double total = 0.0;
  for (const auto& [a, b] : path.segments()) {
    Vec3 d = b - a;
    double acc = 0.0;
    for (int q = 0; q < nodes_per_segment; ++q) {
      double t = 0.5 * (rule.nodes[q] + 1.0);
      Vec3 p = a + t * d;
      omega.chart().require_inside(p);
      acc += rule.weights[q] * omega.vec_at(p).dot(d);
    }
    total += 0.5 * acc;
  }
  return total;
}

/// Tensor-product quadrature of the pulled-back 2-form over the patch.
/// tau holds the full antisymmetric component matrix tau_AB, with the form
/// equal to (1/2) tau_AB dX^A ^ dX^B.
inline double surface_integral(const Field& tau, const ParametricPatch& patch, int nodes = 8) {
  if (tau.ncomp() != 9) throw InvalidField("surface_integral expects a rank-2 covector field");
  if (nodes < 2) throw InvalidField("need at least 2 quadrature nodes");
  auto rule = gauss_legendre(nodes);
  double total = 0.0;
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      double u = 0.5 * (rule.nodes[i] + 1.0);
      double v = 0.5 * (rule.nodes[j] + 1.0);
      Vec3 p = patch.map(u, v);
      tau.chart().require_inside(p);
      Vec3 tu = patch.du(u, v), tv = patch.dv(u, v);
      if (tu.cross(tv).norm() < 1e-12) throw DegeneratePatch();
      Mat3 t = tau.mat_at(p);
      total += rule.weights[i] * rule.weights[j] * tu.dot(t * tv);
    }
  return patch.orientation * 0.25 * total;
}

struct IntegralCurve {
  Polyline curve;
  bool exited_domain = false;
  std::vector<double> params;  // parameter value at each vertex
};

/// Classical 4th-order fixed-step integration of dx/ds = v(x). Terminates
/// early (soft) if a step would leave the chart.
inline IntegralCurve integral_curve(const Field& v, const Vec3& start, double param_length,
                                    double step, bool arclength = false) {
  if (v.ncomp() != 3) throw InvalidField("integral_curve expects a vector field");
  if (step <= 0.0) throw InvalidField("step must be positive");
  auto rhs = [&](const Vec3& p) -> Vec3 {
    Vec3 w = v.vec_at(p);
    double n = w.norm();
    if (n < 1e-10) throw VanishingField();
    return arclength ? Vec3(w / n) : w;
  };
  IntegralCurve out;
  Vec3 p = start;
  v.chart().require_inside(p);
  out.curve.vertices.push_back(p);
  out.params.push_back(0.0);
  double s = 0.0;
  while (s < param_length - 1e-14) {
    double h = std::min(step, param_length - s);
    Vec3 k1, k2, k3, k4, next;
    try {
      k1 = rhs(p);
      k2 = rhs(p + 0.5 * h * k1);
      k3 = rhs(p + 0.5 * h * k2);
      k4 = rhs(p + h * k3);
      next = p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      v.chart().require_inside(next);
    } catch (const PointOutsideChart&) {
      out.exited_domain = true;
      break;
    }
    p = next;
    s += h;
    out.curve.vertices.push_back(p);
    out.params.push_back(s);
  }
  return out;
}

}  // namespace disloc
