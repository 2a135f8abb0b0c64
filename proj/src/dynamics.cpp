#include "esdcbf/dynamics.hpp"

#include <cmath>

namespace esdcbf {
namespace {

std::array<ChainPoint, 3> mass_points(const JointConfig& q, const KinematicParams& kp) {
  return {chain_point(q, kp.l1, 0.0, 0.0), chain_point(q, kp.l1, kp.l2, 0.0),
          chain_point(q, kp.l1, kp.l2, kp.l_end)};
}

Mat3 rotational_inertia(const DynamicParams& dp) {
  // The end link spins with theta2 about y and theta3 about the rotated x;
  // those axes stay orthogonal so the terms do not couple.
  Mat3 I = Mat3::Zero();
  I(1, 1) = dp.link_inertias[1] + dp.link_inertias[2];
  I(2, 2) = dp.link_inertias[2];
  return I;
}

}  // namespace

void DynamicParams::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(link_masses[i] > 0.0)) throw Error(ErrorKind::InvalidArgument, "link masses must be positive");
    if (!(link_inertias[i] >= 0.0))
      throw Error(ErrorKind::InvalidArgument, "link inertias must be non-negative");
  }
  if (!gravity.allFinite() || !input_map.allFinite())
    throw Error(ErrorKind::InvalidArgument, "gravity and input map must be finite");
}

Mat3 mass_matrix(const JointConfig& q, const KinematicParams& kp, const DynamicParams& dp) {
  Mat3 M = rotational_inertia(dp);
  const auto pts = mass_points(q, kp);
  for (int i = 0; i < 3; ++i) M += dp.link_masses[i] * pts[i].jacobian.transpose() * pts[i].jacobian;
  return 0.5 * (M + M.transpose());
}

Mat3 coriolis_matrix(const JointConfig& q, const Vec3& qdot, const KinematicParams& kp,
                     const DynamicParams& dp) {
  const auto pts = mass_points(q, kp);
  std::array<Mat3, 3> dM;  // dM[k] = dM/dq_k
  for (int k = 0; k < 3; ++k) {
    dM[k].setZero();
    for (int i = 0; i < 3; ++i) {
      const Mat3 JtD = pts[i].jacobian.transpose() * pts[i].jacobian_derivative[k];
      dM[k] += dp.link_masses[i] * (JtD + JtD.transpose());
    }
  }
  Mat3 C = Mat3::Zero();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        C(i, j) += 0.5 * (dM[k](i, j) + dM[j](i, k) - dM[i](j, k)) * qdot[k];
  return C;
}

Vec3 gravity_vector(const JointConfig& q, const KinematicParams& kp, const DynamicParams& dp) {
  Vec3 g = Vec3::Zero();
  const auto pts = mass_points(q, kp);
  for (int i = 0; i < 3; ++i) g -= dp.link_masses[i] * pts[i].jacobian.transpose() * dp.gravity;
  return g;
}

double kinetic_energy(const RobotState& s, const KinematicParams& kp, const DynamicParams& dp) {
  return 0.5 * s.qdot.dot(mass_matrix(s.q, kp, dp) * s.qdot);
}

double potential_energy(const JointConfig& q, const KinematicParams& kp, const DynamicParams& dp) {
  double V = 0.0;
  const auto pts = mass_points(q, kp);
  for (int i = 0; i < 3; ++i) V -= dp.link_masses[i] * dp.gravity.dot(pts[i].position);
  return V;
}

Vec3 forward_dynamics(const RobotState& s, const Vec3& u, const KinematicParams& kp,
                      const DynamicParams& dp) {
  const Mat3 M = mass_matrix(s.q, kp, dp);
  const Vec3 rhs = dp.input_map * u - coriolis_matrix(s.q, s.qdot, kp, dp) * s.qdot -
                   gravity_vector(s.q, kp, dp);
  const Eigen::LLT<Mat3> llt(M);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::SingularMatrix, "mass matrix is not positive definite");
  return llt.solve(rhs);
}

RobotState rk4_step(const RobotState& s, double dt, const AccelerationFn& accel) {
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");
  auto shifted = [&](const Vec3& dq, const Vec3& dv, double h) {
    RobotState r;
    r.q = JointConfig::from_vector(s.q.vector() + h * dq);
    r.qdot = s.qdot + h * dv;
    return r;
  };
  const Vec3 k1q = s.qdot;
  const Vec3 k1v = accel(s);
  const RobotState s2 = shifted(k1q, k1v, 0.5 * dt);
  const Vec3 k2q = s2.qdot;
  const Vec3 k2v = accel(s2);
  const RobotState s3 = shifted(k2q, k2v, 0.5 * dt);
  const Vec3 k3q = s3.qdot;
  const Vec3 k3v = accel(s3);
  const RobotState s4 = shifted(k3q, k3v, dt);
  const Vec3 k4q = s4.qdot;
  const Vec3 k4v = accel(s4);

  RobotState out;
  out.q = JointConfig::from_vector(s.q.vector() + dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q));
  out.qdot = s.qdot + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  return out;
}

RobotState rk4_step(const RobotState& s, const Vec3& u, double dt, const KinematicParams& kp,
                    const DynamicParams& dp) {
  return rk4_step(s, dt, [&](const RobotState& x) { return forward_dynamics(x, u, kp, dp); });
}

}  // namespace esdcbf
