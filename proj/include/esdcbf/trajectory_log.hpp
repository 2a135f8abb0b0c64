#pragma once

#include "esdcbf/common.hpp"

#include <string>
#include <vector>

namespace esdcbf {

// One closed-loop step. Units: mm, rad, s; velocities per second; u and d in
// joint torque/force units (g*mm^2/s^2 for revolute, g*mm/s^2 for prismatic).
struct LogRecord {
  double t = 0.0;
  Vec3 q = Vec3::Zero();
  Vec3 qdot = Vec3::Zero();
  Vec3 x = Vec3::Zero();
  Vec3 xdot = Vec3::Zero();
  Vec3 xdot_d = Vec3::Zero();
  Vec3 xdot_s = Vec3::Zero();
  Vec3 edot = Vec3::Zero();
  Vec3 u = Vec3::Zero();
  Vec3 d = Vec3::Zero();
  std::vector<double> h;  // one per barrier, same order as TrajectoryLog::barrier_names
  int active_rows = 0;
  bool gate_engaged = false;

  bool operator==(const LogRecord&) const = default;
};

struct TrajectoryLog {
  std::vector<std::string> barrier_names;
  std::vector<LogRecord> records;

  bool empty() const { return records.empty(); }
  bool operator==(const TrajectoryLog&) const = default;
};

}  // namespace esdcbf
