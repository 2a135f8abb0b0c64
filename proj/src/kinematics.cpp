#include "esdcbf/kinematics.hpp"

#include <cmath>

namespace esdcbf {

void KinematicParams::validate() const {
  if (!(l1 > 0.0) || !(l2 > 0.0) || !(l_end > 0.0))
    throw Error(ErrorKind::InvalidArgument, "link lengths must be positive");
  if (!(d1_max > 0.0) || !(angle_limit > 0.0))
    throw Error(ErrorKind::InvalidArgument, "joint limits must be positive");
}

bool JointConfig::within_limits(const KinematicParams& p) const {
  return d1 >= 0.0 && d1 <= p.d1_max && std::abs(theta2) <= p.angle_limit &&
         std::abs(theta3) <= p.angle_limit;
}

ChainPoint chain_point(const JointConfig& q, double l1, double along_l2, double along_end) {
  const double s2 = std::sin(q.theta2), c2 = std::cos(q.theta2);
  const double s3 = std::sin(q.theta3), c3 = std::cos(q.theta3);
  const double b = along_end;
  // Distance of the point from the joint-2 axis, measured along the rotated z.
  const double w = along_l2 + b * c3;

  ChainPoint cp;
  cp.position = Vec3(s2 * w, -b * s3, q.d1 + l1 + c2 * w);

  cp.jacobian.col(0) = Vec3(0.0, 0.0, 1.0);
  cp.jacobian.col(1) = Vec3(c2 * w, 0.0, -s2 * w);
  cp.jacobian.col(2) = Vec3(-s2 * b * s3, -b * c3, -c2 * b * s3);

  const Vec3 d22(-s2 * w, 0.0, -c2 * w);
  const Vec3 d23(-c2 * b * s3, 0.0, s2 * b * s3);
  const Vec3 d33(-s2 * b * c3, b * s3, -c2 * b * c3);

  cp.jacobian_derivative[0].setZero();
  cp.jacobian_derivative[1].col(0).setZero();
  cp.jacobian_derivative[1].col(1) = d22;
  cp.jacobian_derivative[1].col(2) = d23;
  cp.jacobian_derivative[2].col(0).setZero();
  cp.jacobian_derivative[2].col(1) = d23;
  cp.jacobian_derivative[2].col(2) = d33;
  return cp;
}

Vec3 forward_kinematics(const JointConfig& q, const KinematicParams& p) {
  const double s2 = std::sin(q.theta2), c2 = std::cos(q.theta2);
  const double s3 = std::sin(q.theta3), c3 = std::cos(q.theta3);
  const double w = p.l2 + p.l_end * c3;
  return {s2 * w, -p.l_end * s3, q.d1 + p.l1 + c2 * w};
}

Mat3 jacobian(const JointConfig& q, const KinematicParams& p) {
  return chain_point(q, p.l1, p.l2, p.l_end).jacobian;
}

Mat3 damped_pseudo_inverse(const Mat3& J, double damping) {
  if (!(damping >= 0.0)) throw Error(ErrorKind::InvalidArgument, "damping must be non-negative");
  const Mat3 JJt = J * J.transpose();
  if (damping == 0.0) {
    const Vec3 sv = Eigen::JacobiSVD<Mat3>(JJt).singularValues();
    if (!(sv[2] > 0.0) || sv[0] / sv[2] > 1e12)
      throw Error(ErrorKind::SingularMatrix, "J J^T is numerically singular");
  }
  const Mat3 A = JJt + damping * damping * Mat3::Identity();
  // A is symmetric, so J^T A^-1 = (A^-1 J)^T.
  return A.ldlt().solve(J).transpose();
}

int numerical_rank(const Mat3& J, double tol) {
  const Vec3 sv = Eigen::JacobiSVD<Mat3>(J).singularValues();
  int rank = 0;
  for (int i = 0; i < 3; ++i)
    if (sv[i] > tol * sv[0]) ++rank;
  return rank;
}

}  // namespace esdcbf
