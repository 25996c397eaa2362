#pragma once

#include <Eigen/Dense>
#include <array>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace disloc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define DISLOC_DEFINE_ERROR(Name)                                   \
  struct Name : Error {                                             \
    explicit Name(const std::string& what = #Name) : Error(what) {} \
  }

DISLOC_DEFINE_ERROR(PointOutsideChart);
DISLOC_DEFINE_ERROR(StencilOutOfRange);
DISLOC_DEFINE_ERROR(DegeneratePatch);
DISLOC_DEFINE_ERROR(VanishingField);
DISLOC_DEFINE_ERROR(SingularCoframe);
DISLOC_DEFINE_ERROR(SingularMetric);
DISLOC_DEFINE_ERROR(ReconstructionFailure);
DISLOC_DEFINE_ERROR(NonPositiveDensity);
DISLOC_DEFINE_ERROR(OpenPath);
DISLOC_DEFINE_ERROR(ZeroBurgers);
DISLOC_DEFINE_ERROR(UndefinedBurgersDirection);
DISLOC_DEFINE_ERROR(VanishingCurvature);
DISLOC_DEFINE_ERROR(PatternMismatch);
DISLOC_DEFINE_ERROR(CurvatureCollapse);
DISLOC_DEFINE_ERROR(ClosureMissing);
DISLOC_DEFINE_ERROR(NonPositiveCurvature);
DISLOC_DEFINE_ERROR(SingularP);
DISLOC_DEFINE_ERROR(JacobianCollapse);
DISLOC_DEFINE_ERROR(NotVolterra);
DISLOC_DEFINE_ERROR(NotInextensible);
DISLOC_DEFINE_ERROR(NonPositiveLeafMetric);
DISLOC_DEFINE_ERROR(NonPositiveSpeed);
DISLOC_DEFINE_ERROR(NegativeStress);
DISLOC_DEFINE_ERROR(UnsupportedRank);
DISLOC_DEFINE_ERROR(ConfigParseError);
DISLOC_DEFINE_ERROR(InvalidField);
DISLOC_DEFINE_ERROR(ExitedDomain);

#undef DISLOC_DEFINE_ERROR

/// Numeric permutation symbol in frame indices (positively oriented frames).
inline double levi_civita(int a, int b, int c) {
  if (a == b || b == c || a == c) return 0.0;
  if ((a == 0 && b == 1 && c == 2) || (a == 1 && b == 2 && c == 0) ||
      (a == 2 && b == 0 && c == 1))
    return 1.0;
  return -1.0;
}

inline double sq(double x) { return x * x; }

}  // namespace disloc
