#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "disloc/core.hpp"
#include "disloc/field.hpp"
#include "disloc/quadrature.hpp"

namespace disloc {

/// Coframe component matrix e^a_A as a closure (row a, column A), with
/// optional analytic partials per coordinate direction.
struct CoframeSpec {
  std::string name;
  std::function<Mat3(const Vec3&)> components;
  std::array<std::function<Mat3(const Vec3&)>, 3> partials;
  bool has_partials = false;
};

inline CoframeSpec holonomic_coframe() {
  CoframeSpec s;
  s.name = "holonomic";
  s.components = [](const Vec3&) { return Mat3::Identity(); };
  for (int ax = 0; ax < 3; ++ax) s.partials[ax] = [](const Vec3&) { return Mat3::Zero(); };
  s.has_partials = true;
  return s;
}

/// E^3 = dX^3 + b0 X^1 dX^2, other rows holonomic.
inline CoframeSpec screw_coframe(double b0) {
  CoframeSpec s;
  s.name = "screw";
  s.components = [b0](const Vec3& p) {
    Mat3 c = Mat3::Identity();
    c(2, 1) = b0 * p[0];
    return c;
  };
  s.partials[0] = [b0](const Vec3&) {
    Mat3 d = Mat3::Zero();
    d(2, 1) = b0;
    return d;
  };
  s.partials[1] = [](const Vec3&) { return Mat3::Zero(); };
  s.partials[2] = [](const Vec3&) { return Mat3::Zero(); };
  s.has_partials = true;
  return s;
}

/// E^1 = dX^1 + beta X^1 dX^2, other rows holonomic.
inline CoframeSpec edge_coframe(double beta) {
  CoframeSpec s;
  s.name = "edge";
  s.components = [beta](const Vec3& p) {
    Mat3 c = Mat3::Identity();
    c(0, 1) = beta * p[0];
    return c;
  };
  s.partials[0] = [beta](const Vec3&) {
    Mat3 d = Mat3::Zero();
    d(0, 1) = beta;
    return d;
  };
  s.partials[1] = [](const Vec3&) { return Mat3::Zero(); };
  s.partials[2] = [](const Vec3&) { return Mat3::Zero(); };
  s.has_partials = true;
  return s;
}

/// E^alpha = exp(-h0 X^3) dX^alpha for alpha = 1,2; E^3 = dX^3.
inline CoframeSpec umbilical_coframe(double h0) {
  CoframeSpec s;
  s.name = "umbilical";
  s.components = [h0](const Vec3& p) {
    Mat3 c = Mat3::Zero();
    double w = std::exp(-h0 * p[2]);
    c(0, 0) = w;
    c(1, 1) = w;
    c(2, 2) = 1.0;
    return c;
  };
  s.partials[0] = [](const Vec3&) { return Mat3::Zero(); };
  s.partials[1] = [](const Vec3&) { return Mat3::Zero(); };
  s.partials[2] = [h0](const Vec3& p) {
    Mat3 d = Mat3::Zero();
    double w = -h0 * std::exp(-h0 * p[2]);
    d(0, 0) = w;
    d(1, 1) = w;
    return d;
  };
  s.has_partials = true;
  return s;
}

/// Bravais moving frame: coframe components are canonical, the frame is the
/// pointwise inverse. epsilon fixes the Burgers orientation convention.
class MovingFrame {
 public:
  MovingFrame(Chart chart, const CoframeSpec& spec, double epsilon = +1.0,
              bool gridded = false)
      : epsilon_(epsilon) {
    std::vector<Field::Fn> comps;
    comps.reserve(9);
    for (int a = 0; a < 3; ++a)
      for (int A = 0; A < 3; ++A)
        comps.push_back([spec, a, A](const Vec3& p) { return spec.components(p)(a, A); });
    if (gridded) {
      coframe_ = Field::sampled(chart, comps);
    } else if (spec.has_partials) {
      std::vector<std::array<Field::Fn, 3>> parts;
      parts.reserve(9);
      for (int a = 0; a < 3; ++a)
        for (int A = 0; A < 3; ++A) {
          std::array<Field::Fn, 3> row;
          for (int ax = 0; ax < 3; ++ax)
            row[ax] = [spec, a, A, ax](const Vec3& p) { return spec.partials[ax](p)(a, A); };
          parts.push_back(row);
        }
      coframe_ = Field::analytic(chart, std::move(comps), std::move(parts));
    } else {
      coframe_ = Field::analytic(chart, std::move(comps));
    }
    validate();
  }

  const Chart& chart() const { return coframe_.chart(); }
  const Field& coframe_field() const { return coframe_; }
  double epsilon() const { return epsilon_; }

  /// e^a_A (row a, column A).
  Mat3 coframe_at(const Vec3& p) const { return coframe_.mat_at(p); }

  /// e_a^A (row a, column A); duality e^a_A e_b^A = delta gives F = C^{-T}.
  Mat3 frame_at(const Vec3& p) const {
    Mat3 c = coframe_at(p);
    if (std::abs(c.determinant()) < 1e-10) throw SingularCoframe();
    return Mat3(c.inverse().transpose());
  }

  Mat3 coframe_partial(int axis, const Vec3& p) const { return coframe_.mat_partial(axis, p); }

  /// d(e_a^A)/dX^axis from d(C^{-1}) = -C^{-1} dC C^{-1}.
  Mat3 frame_partial(int axis, const Vec3& p) const {
    Mat3 c = coframe_at(p);
    Mat3 cinv = c.inverse();
    Mat3 dinv = Mat3(-cinv * coframe_partial(axis, p) * cinv);
    return Mat3(dinv.transpose());
  }

  double volume_density(const Vec3& p) const { return coframe_at(p).determinant(); }

 private:
  void validate() const {
    if (epsilon_ != 1.0 && epsilon_ != -1.0)
      throw InvalidField("epsilon must be +1 or -1");
    for (const Vec3& p : chart().test_lattice()) {
      Mat3 c = coframe_at(p);
      double det = c.determinant();
      if (std::abs(det) < 1e-10) throw SingularCoframe();
      if (det < 0.0) throw SingularCoframe("mirror coframe: negative determinant");
      Mat3 gram = c * c.inverse();
      if ((gram - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-10)
        throw SingularCoframe("coframe/frame duality violated");
    }
  }

  Field coframe_;
  double epsilon_ = +1.0;
};

/// Riemannian metric over a chart with its Levi-Civita connection. Built
/// either from a coframe (g = C^T C) or from a directly supplied matrix
/// closure (with optional analytic partials).
class MetricField {
 public:
  using MatFn = std::function<Mat3(const Vec3&)>;

  static MetricField from_frame(const MovingFrame& frame) {
    MetricField m;
    m.chart_ = frame.chart();
    m.g_ = [frame](const Vec3& p) {
      Mat3 c = frame.coframe_at(p);
      return Mat3(c.transpose() * c);
    };
    m.dg_ = [frame](int axis, const Vec3& p) {
      Mat3 c = frame.coframe_at(p);
      Mat3 dc = frame.coframe_partial(axis, p);
      return Mat3(dc.transpose() * c + c.transpose() * dc);
    };
    m.validate();
    return m;
  }

  static MetricField direct(Chart chart, MatFn g,
                            std::function<Mat3(int, const Vec3&)> dg = nullptr) {
    MetricField m;
    m.chart_ = std::move(chart);
    m.g_ = std::move(g);
    if (dg) {
      m.dg_ = std::move(dg);
    } else {
      auto gf = m.g_;
      Chart ch = m.chart_;
      m.dg_ = [gf, ch](int axis, const Vec3& p) {
        Mat3 d;
        double h = 1e-3 * ch.extent(axis);
        for (int A = 0; A < 3; ++A)
          for (int B = 0; B < 3; ++B) {
            auto f1d = [&](double x) {
              Vec3 q = p;
              q[axis] = x;
              return gf(q)(A, B);
            };
            d(A, B) = fd_derivative_1d(f1d, p[axis], ch.lower[axis], ch.upper[axis], h);
          }
        return d;
      };
    }
    m.validate();
    return m;
  }

  const Chart& chart() const { return chart_; }

  Mat3 at(const Vec3& p) const { return g_(p); }
  Mat3 inverse_at(const Vec3& p) const {
    Mat3 g = g_(p);
    if (g.determinant() < 1e-14) throw SingularMetric();
    return Mat3(g.inverse());
  }
  Mat3 partial(int axis, const Vec3& p) const { return dg_(axis, p); }
  double sqrt_g(const Vec3& p) const {
    double det = g_(p).determinant();
    if (det <= 0.0) throw SingularMetric();
    return std::sqrt(det);
  }

  /// Gamma^A_{BC}: result[A](B,C).
  std::array<Mat3, 3> christoffel(const Vec3& p) const {
    Mat3 ginv = inverse_at(p);
    std::array<Mat3, 3> dg;
    for (int ax = 0; ax < 3; ++ax) dg[ax] = dg_(ax, p);
    std::array<Mat3, 3> gamma;
    for (int A = 0; A < 3; ++A) {
      for (int B = 0; B < 3; ++B)
        for (int C = 0; C < 3; ++C) {
          double acc = 0.0;
          for (int D = 0; D < 3; ++D)
            acc += ginv(A, D) * (dg[B](D, C) + dg[C](B, D) - dg[D](B, C));
          gamma[A](B, C) = 0.5 * acc;
        }
    }
    return gamma;
  }

  double dot(const Vec3& u, const Vec3& v, const Vec3& p) const {
    return u.dot(g_(p) * v);
  }
  double norm(const Vec3& u, const Vec3& p) const { return std::sqrt(dot(u, u, p)); }

  /// g-cross product completing right-handed g-orthonormal triples:
  /// (u x_g v)^A = g^{AD} sqrt(g) eps_{DBC} u^B v^C.
  Vec3 cross(const Vec3& u, const Vec3& v, const Vec3& p) const {
    Vec3 lowered;
    double sg = sqrt_g(p);
    for (int D = 0; D < 3; ++D) {
      double acc = 0.0;
      for (int B = 0; B < 3; ++B)
        for (int C = 0; C < 3; ++C) acc += levi_civita(D, B, C) * u[B] * v[C];
      lowered[D] = sg * acc;
    }
    return inverse_at(p) * lowered;
  }

 private:
  MetricField() = default;

  void validate() const {
    for (const Vec3& p : chart_.test_lattice()) {
      Mat3 g = g_(p);
      if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw SingularMetric("metric not symmetric");
      Eigen::SelfAdjointEigenSolver<Mat3> es(g);
      if (es.eigenvalues().minCoeff() <= 0.0)
        throw SingularMetric("metric not positive-definite");
    }
  }

  Chart chart_;
  MatFn g_;
  std::function<Mat3(int, const Vec3&)> dg_;
};

struct FrameBundle {
  MovingFrame frame;
  MetricField metric;
  std::function<double(const Vec3&)> volume_form;  // density of E^1 ^ E^2 ^ E^3
};

inline FrameBundle build_frame_bundle(Chart chart, const CoframeSpec& spec,
                                      double epsilon = +1.0, bool gridded = false) {
  MovingFrame frame(std::move(chart), spec, epsilon, gridded);
  MetricField metric = MetricField::from_frame(frame);
  auto vol = [frame](const Vec3& p) { return frame.volume_density(p); };
  return FrameBundle{std::move(frame), std::move(metric), std::move(vol)};
}

/// (nabla^g_u v)(p) with u a direction at p and v a vector field.
inline Vec3 levi_civita_covariant(const MetricField& g, const Field& v, const Vec3& u,
                                  const Vec3& p) {
  auto gamma = g.christoffel(p);
  Vec3 vp = v.vec_at(p);
  Vec3 out;
  for (int A = 0; A < 3; ++A) {
    double acc = 0.0;
    for (int B = 0; B < 3; ++B) {
      acc += u[B] * v.partial(A, B, p);
      for (int C = 0; C < 3; ++C) acc += u[B] * gamma[A](B, C) * vp[C];
    }
    out[A] = acc;
  }
  return out;
}

/// Same with v given as a closure (no stored Field); derivatives by
/// chart-aware finite differences.
inline Vec3 levi_civita_covariant(const MetricField& g,
                                  const std::function<Vec3(const Vec3&)>& v, const Vec3& u,
                                  const Vec3& p) {
  auto gamma = g.christoffel(p);
  Vec3 vp = v(p);
  Vec3 out;
  const Chart& ch = g.chart();
  for (int A = 0; A < 3; ++A) {
    double acc = 0.0;
    for (int B = 0; B < 3; ++B) {
      if (u[B] != 0.0) {
        double h = 1e-3 * ch.extent(B);
        auto f1d = [&](double x) {
          Vec3 q = p;
          q[B] = x;
          return v(q)[A];
        };
        acc += u[B] * fd_derivative_1d(f1d, p[B], ch.lower[B], ch.upper[B], h);
      }
      for (int C = 0; C < 3; ++C) acc += u[B] * gamma[A](B, C) * vp[C];
    }
    out[A] = acc;
  }
  return out;
}

}  // namespace disloc
