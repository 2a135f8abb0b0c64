#pragma once

#include "esdcbf/control.hpp"
#include "esdcbf/dynamics.hpp"
#include "esdcbf/safety.hpp"

#include <vector>

namespace esdcbf {

struct MarkingSet {
  std::size_t tumor_index = 0;
  std::vector<Vec3> points;
  std::vector<bool> unsafe_flags;

  void validate() const;
};

struct Intrusion {
  std::size_t index = 0;  // marking point to move
  TumorSpec target;
  double depth = 0.0;  // [mm] below the target's keep-out boundary
};

struct ReferenceSample {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
};

// Constant-speed piecewise-linear path sampled at a fixed dt.
struct ReferenceTrajectory {
  double dt = 1e-3;
  std::vector<ReferenceSample> samples;
  std::vector<Vec3> waypoints;

  double duration() const { return samples.empty() ? 0.0 : samples.back().t; }
  double path_length() const;
  // Nearest sample at or before t, clamped to the final sample. After the end
  // the velocity is zero.
  const ReferenceSample& at(double t) const;
};

// m points equally spaced on the keep-out circle in the plane through the
// tumor center orthogonal to plane_normal, counterclockwise about it.
MarkingSet generate_marking_points(const TumorSpec& t, std::size_t tumor_index, std::size_t m,
                                   const Vec3& plane_normal);

MarkingSet inject_unsafe_points(const MarkingSet& ms, const std::vector<Intrusion>& intrusions);

// Approach from approach_from to the first marking point, then each marking
// loop in order, each closed back onto its first point.
ReferenceTrajectory build_reference(const std::vector<MarkingSet>& markings, double speed, double dt,
                                    const Vec3& approach_from);

struct ScenarioSpec {
  int id = 1;
  KinematicParams kinematics;
  DynamicParams dynamics;
  SafeSetSpec safe_set;
  std::vector<MarkingSet> markings;
  FilterParams filter;
  ControllerParams controller;
  DisturbanceSpec disturbance;
  RobotState initial_state;
  double speed = 2.0;      // reference path speed [mm/s]
  double kp_gain = 5.0;    // desired-velocity position feedback [1/s]
  double dt = 1e-3;        // [s]
  double duration = 0.0;   // [s]; 0 means path completion + settle
  double settle = 1.0;     // [s]

  void validate() const;
  double effective_duration() const;
  ReferenceTrajectory reference() const;
};

inline constexpr int kScenarioCount = 4;

// Built-in configurations 1-4. Throws UnknownScenario otherwise.
ScenarioSpec scenario_catalog(int id);

}  // namespace esdcbf
