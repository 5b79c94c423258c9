#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mscr {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Permeability of free space (N/A^2).
inline constexpr double kMu0 = 4.0e-7 * std::numbers::pi;

inline constexpr double kPi = std::numbers::pi;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of the model (negative length, x > L, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A requested target cannot be reached under the configured limits.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Raised by the plant when a commanded field leaves the safety envelope.
class SafetyStop : public Error {
 public:
  using Error::Error;
};

/// Missing calibration or characterization data.
class MissingDataError : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw DomainError(what);
}

inline bool is_finite(const Vec3& v) { return v.allFinite(); }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

}  // namespace mscr
