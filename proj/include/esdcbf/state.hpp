#pragma once

#include "esdcbf/kinematics.hpp"

namespace esdcbf {

struct RobotState {
  JointConfig q;
  Vec3 qdot = Vec3::Zero();  // [mm/s, rad/s, rad/s]
};

}  // namespace esdcbf
