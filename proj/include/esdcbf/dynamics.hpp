#pragma once

#include "esdcbf/state.hpp"

#include <functional>

namespace esdcbf {

// Point-mass model: link_masses[0] rides on the prismatic joint at the joint-2
// axis, [1] sits at the distal end of l2, [2] at the tip. link_inertias[1] and
// [2] add rotational inertia of link l2 and the end link; [0] is unused since
// the insertion link only translates. Units: g, mm, s.
struct DynamicParams {
  Vec3 link_masses{2.0, 1.5, 1.0};
  Vec3 link_inertias{0.0, 1.0, 1.0};
  Vec3 gravity{0.0, 0.0, -9810.0};
  Mat3 input_map = Mat3::Identity();

  void validate() const;
};

Mat3 mass_matrix(const JointConfig& q, const KinematicParams& kp, const DynamicParams& dp);

// Christoffel-symbol Coriolis matrix, so that dM/dt - 2C is skew-symmetric.
Mat3 coriolis_matrix(const JointConfig& q, const Vec3& qdot, const KinematicParams& kp,
                     const DynamicParams& dp);

// dV/dq for V the gravitational potential energy.
Vec3 gravity_vector(const JointConfig& q, const KinematicParams& kp, const DynamicParams& dp);

double kinetic_energy(const RobotState& s, const KinematicParams& kp, const DynamicParams& dp);
double potential_energy(const JointConfig& q, const KinematicParams& kp, const DynamicParams& dp);

// Solves M qddot = B u - C qdot - g.
Vec3 forward_dynamics(const RobotState& s, const Vec3& u, const KinematicParams& kp,
                      const DynamicParams& dp);

using AccelerationFn = std::function<Vec3(const RobotState&)>;

// Classical RK4 on (q, qdot) with the input held over the step.
RobotState rk4_step(const RobotState& s, double dt, const AccelerationFn& accel);
RobotState rk4_step(const RobotState& s, const Vec3& u, double dt, const KinematicParams& kp,
                    const DynamicParams& dp);

}  // namespace esdcbf
