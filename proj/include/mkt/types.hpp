#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace mkt {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Error raised for malformed numeric input (NaN, infinities, bad sizes).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Error raised when a query point lies outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a quantity that only exists off the singular set is requested on it.
class SingularPointError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid geometric or variational configuration (e.g. a body that is not C^2_+).
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IterationLimitError : public std::runtime_error {
 public:
  IterationLimitError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

inline bool is_finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

inline void require_finite(const Vec2& v, const char* what) {
  if (!is_finite(v)) throw InputError(std::string(what) + ": non-finite input");
}

inline Vec2 unit_direction(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Counterclockwise rotation by 90 degrees.
inline Vec2 rot90(const Vec2& v) { return {-v.y(), v.x()}; }

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Wraps an angle into [0, 2*pi).
inline double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

/// Uniform [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace mkt
