#pragma once

#include "esdcbf/common.hpp"

#include <array>
#include <numbers>

namespace esdcbf {

// Geometry of the endoscopic arm. All lengths in millimetres.
struct KinematicParams {
  double l1 = 3.0;
  double l2 = 10.0;
  double l_end = 17.0;
  double od = 3.7;  // outer diameter, informational only
  double d1_max = 50.0;
  double angle_limit = std::numbers::pi / 2.0;

  void validate() const;
};

// q = (d1 [mm], theta2 [rad], theta3 [rad]).
struct JointConfig {
  double d1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;

  Vec3 vector() const { return {d1, theta2, theta3}; }
  static JointConfig from_vector(const Vec3& v) { return {v[0], v[1], v[2]}; }
  bool within_limits(const KinematicParams& p) const;
};

// Joint convention:
//   joint 1 prismatic along base z, then a fixed l1 offset along z,
//   joint 2 revolute about base y, link l2 along the rotated z,
//   joint 3 revolute about the rotated x, link l_end along the final z.
Vec3 forward_kinematics(const JointConfig& q, const KinematicParams& p);

// Linear-velocity Jacobian dx/dq. Column 0 is mm/mm, columns 1-2 are mm/rad.
Mat3 jacobian(const JointConfig& q, const KinematicParams& p);

// J^T (J J^T + damping^2 I)^-1. Throws SingularMatrix when damping is zero and
// J J^T has condition number above 1e12.
Mat3 damped_pseudo_inverse(const Mat3& J, double damping);

// Number of singular values above tol * largest.
int numerical_rank(const Mat3& J, double tol = 1e-10);

// A point rigidly attached to the chain at distance `along_l2` on link 2 and
// `along_end` on the end link, together with its first and second derivatives.
// Used by the dynamics model to place point masses.
struct ChainPoint {
  Vec3 position;
  Mat3 jacobian;
  std::array<Mat3, 3> jacobian_derivative;  // [k] = d(jacobian)/dq_k
};

ChainPoint chain_point(const JointConfig& q, double l1, double along_l2, double along_end);

}  // namespace esdcbf
