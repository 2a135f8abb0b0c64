#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace esdcbf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Failure categories surfaced through the C API as distinct status codes.
enum class ErrorKind {
  InvalidArgument,
  UnknownScenario,
  Config,
  SingularMatrix,
  DegeneratePoint,
  InfeasibleQp,
  InsufficientTransient,
  EmptyLog,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Safety tolerance on barrier values [mm]; discretization allowance for a 1 ms step.
inline constexpr double kSafetyTolerance = 1e-3;

}  // namespace esdcbf
