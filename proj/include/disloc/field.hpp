#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "disloc/core.hpp"
#include "disloc/quadrature.hpp"

namespace disloc {

/// Axis-aligned box domain with a uniform node lattice. Coordinates in cm.
struct Chart {
  Vec3 lower{0, 0, 0};
  Vec3 upper{1, 1, 1};
  std::array<int, 3> grid_shape{33, 33, 33};  // nodes per axis

  Chart() = default;
  Chart(const Vec3& lo, const Vec3& hi, std::array<int, 3> shape = {33, 33, 33})
      : lower(lo), upper(hi), grid_shape(shape) {
    for (int i = 0; i < 3; ++i) {
      if (!(upper[i] > lower[i])) throw InvalidField("chart: upper must exceed lower");
      if (grid_shape[i] < 4) throw InvalidField("chart: grid_shape must be >= 4");
    }
  }

  double spacing(int axis) const {
    return (upper[axis] - lower[axis]) / (grid_shape[axis] - 1);
  }
  double extent(int axis) const { return upper[axis] - lower[axis]; }

  bool contains(const Vec3& p, double eps = 1e-12) const {
    for (int i = 0; i < 3; ++i) {
      double tol = eps * extent(i);
      if (p[i] < lower[i] - tol || p[i] > upper[i] + tol) return false;
    }
    return true;
  }
  void require_inside(const Vec3& p) const {
    if (!contains(p)) throw PointOutsideChart("point outside chart box");
  }

  Vec3 node(int i, int j, int k) const {
    return {lower[0] + i * spacing(0), lower[1] + j * spacing(1), lower[2] + k * spacing(2)};
  }

  /// 5x5x5 uniform interior lattice plus extra seeded random points.
  std::vector<Vec3> test_lattice(unsigned seed = 12345, int n_random = 16) const {
    std::vector<Vec3> pts;
    for (int i = 1; i <= 5; ++i)
      for (int j = 1; j <= 5; ++j)
        for (int k = 1; k <= 5; ++k)
          pts.emplace_back(lower[0] + i * extent(0) / 6.0, lower[1] + j * extent(1) / 6.0,
                           lower[2] + k * extent(2) / 6.0);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.15, 0.85);
    for (int r = 0; r < n_random; ++r)
      pts.emplace_back(lower[0] + u(rng) * extent(0), lower[1] + u(rng) * extent(1),
                       lower[2] + u(rng) * extent(2));
    return pts;
  }
};

/// Component field over a chart: analytic closures (with optional analytic
/// partials) or samples on the chart lattice. Rank bookkeeping is left to the
/// callers; components are flat-indexed.
class Field {
 public:
  using Fn = std::function<double(const Vec3&)>;

  static Field analytic(Chart chart, std::vector<Fn> comps,
                        std::vector<std::array<Fn, 3>> partials = {}) {
    Field f;
    f.chart_ = std::move(chart);
    f.comps_ = std::move(comps);
    f.partials_ = std::move(partials);
    if (!f.partials_.empty()) {
      if (f.partials_.size() != f.comps_.size())
        throw InvalidField("analytic partials must cover every component");
      f.validate_partials();
    }
    return f;
  }

  /// Samples the given closures onto the chart lattice; evaluation and
  /// differentiation afterwards go through the interpolant only.
  static Field sampled(Chart chart, const std::vector<Fn>& comps) {
    Field f;
    f.chart_ = std::move(chart);
    f.gridded_ = true;
    const auto& s = f.chart_.grid_shape;
    f.grid_.resize(comps.size());
    for (std::size_t c = 0; c < comps.size(); ++c) {
      f.grid_[c].resize(static_cast<std::size_t>(s[0]) * s[1] * s[2]);
      for (int i = 0; i < s[0]; ++i)
        for (int j = 0; j < s[1]; ++j)
          for (int k = 0; k < s[2]; ++k)
            f.grid_[c][f.flat(i, j, k)] = comps[c](f.chart_.node(i, j, k));
    }
    return f;
  }

  int ncomp() const {
    return static_cast<int>(gridded_ ? grid_.size() : comps_.size());
  }
  const Chart& chart() const { return chart_; }
  bool gridded() const { return gridded_; }
  bool has_analytic_partials() const { return !partials_.empty(); }

  double value(int c, const Vec3& p) const {
    chart_.require_inside(p);
    if (!gridded_) return comps_[c](p);
    return interpolate(c, p, -1);
  }

  /// d(component c)/dX^axis at p. Analytic partials when supplied, otherwise
  /// finite differences (lattice-spacing step for gridded fields).
  double partial(int c, int axis, const Vec3& p) const {
    chart_.require_inside(p);
    if (!partials_.empty()) return partials_[c][axis](p);
    if (gridded_) return interpolate(c, p, axis);
    double h = 1e-3 * chart_.extent(axis);
    auto f1d = [&](double x) {
      Vec3 q = p;
      q[axis] = x;
      return comps_[c](q);
    };
    return fd_derivative_1d(f1d, p[axis], chart_.lower[axis], chart_.upper[axis], h);
  }

  Vec3 vec_at(const Vec3& p) const {
    return {value(0, p), value(1, p), value(2, p)};
  }
  Mat3 mat_at(const Vec3& p) const {  // row-major components, idx = 3*row + col
    Mat3 m;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = value(3 * r + c, p);
    return m;
  }
  Mat3 mat_partial(int axis, const Vec3& p) const {
    Mat3 m;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = partial(3 * r + c, axis, p);
    return m;
  }

  Field() = default;

 private:
  std::size_t flat(int i, int j, int k) const {
    const auto& s = chart_.grid_shape;
    return (static_cast<std::size_t>(i) * s[1] + j) * s[2] + k;
  }

  // Separable Lagrange interpolation on a 7-node stencil per axis; deriv_axis
  // selects which axis gets the first-derivative weights (-1: plain value).
  double interpolate(int c, const Vec3& p, int deriv_axis) const {
    const auto& s = chart_.grid_shape;
    std::array<std::vector<double>, 3> w;
    std::array<int, 3> start;
    for (int ax = 0; ax < 3; ++ax) {
      int npts = std::min(7, s[ax]);
      double h = chart_.spacing(ax);
      int ic = static_cast<int>(std::floor((p[ax] - chart_.lower[ax]) / h + 0.5));
      int st = std::clamp(ic - npts / 2, 0, s[ax] - npts);
      start[ax] = st;
      std::vector<double> xs(npts);
      for (int k = 0; k < npts; ++k) xs[k] = chart_.lower[ax] + (st + k) * h;
      auto weights = fd_weights(p[ax], xs, deriv_axis == ax ? 1 : 0);
      w[ax] = weights[deriv_axis == ax ? 1 : 0];
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < w[0].size(); ++i)
      for (std::size_t j = 0; j < w[1].size(); ++j) {
        double wij = w[0][i] * w[1][j];
        if (wij == 0.0) continue;
        for (std::size_t k = 0; k < w[2].size(); ++k)
          acc += wij * w[2][k] *
                 grid_[c][flat(start[0] + static_cast<int>(i), start[1] + static_cast<int>(j),
                               start[2] + static_cast<int>(k))];
      }
    return acc;
  }

  // Supplied analytic partials must agree with central differences at a few
  // seeded random interior points.
  void validate_partials() const {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> u(0.2, 0.8);
    for (int r = 0; r < 8; ++r) {
      Vec3 p;
      for (int i = 0; i < 3; ++i) p[i] = chart_.lower[i] + u(rng) * chart_.extent(i);
      for (int c = 0; c < ncomp(); ++c)
        for (int ax = 0; ax < 3; ++ax) {
          double h = 1e-3 * chart_.extent(ax);
          auto f1d = [&](double x) {
            Vec3 q = p;
            q[ax] = x;
            return comps_[c](q);
          };
          double fd = fd_derivative_1d(f1d, p[ax], chart_.lower[ax], chart_.upper[ax], h);
          double an = partials_[c][ax](p);
          double scale = std::max({std::abs(fd), std::abs(an), 1.0});
          if (std::abs(fd - an) > 1e-5 * scale)
            throw InvalidField("analytic partial disagrees with finite differences");
        }
    }
  }

  Chart chart_;
  bool gridded_ = false;
  std::vector<Fn> comps_;
  std::vector<std::array<Fn, 3>> partials_;
  std::vector<std::vector<double>> grid_;
};

}  // namespace disloc
