#include "esdcbf/scenario.hpp"

#include <cmath>
#include <numbers>

namespace esdcbf {
namespace {

constexpr double kMarkingTolerance = 1e-12;

// Scenario geometry shared by the catalog.
const TumorSpec kRemovable{Vec3(0.0, 6.0, 30.0), 4.0, true};
const TumorSpec kPreserved{Vec3(0.0, -6.0, 30.0), 4.0, false};
constexpr double kShellRadius = 7.0;
constexpr std::size_t kMarkingCount = 8;
constexpr double kUnsafeDepth = 1.5;

// Straight insertion with no bending that leaves the tip `distance` from the
// removable tumor center.
RobotState insertion_state(double distance, const KinematicParams& kp) {
  const double lateral = kRemovable.center.y();
  const double axial = std::sqrt(distance * distance - lateral * lateral);
  RobotState s;
  s.q.d1 = kRemovable.center.z() + axial - kp.l1 - kp.l2 - kp.l_end;
  return s;
}

}  // namespace

void MarkingSet::validate() const {
  if (points.size() < 3) throw Error(ErrorKind::InvalidArgument, "a marking set needs at least 3 points");
  if (unsafe_flags.size() != points.size())
    throw Error(ErrorKind::InvalidArgument, "marking flags must match the point count");
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    if ((points[i + 1] - points[i]).norm() <= kMarkingTolerance)
      throw Error(ErrorKind::InvalidArgument, "consecutive marking points must be distinct");
}

double ReferenceTrajectory::path_length() const {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) len += (waypoints[i + 1] - waypoints[i]).norm();
  return len;
}

const ReferenceSample& ReferenceTrajectory::at(double t) const {
  if (samples.empty()) throw Error(ErrorKind::InvalidArgument, "empty reference trajectory");
  if (!(t > 0.0)) return samples.front();
  const auto k = static_cast<std::size_t>(std::floor(t / dt + 1e-6));
  return samples[std::min(k, samples.size() - 1)];
}

MarkingSet generate_marking_points(const TumorSpec& t, std::size_t tumor_index, std::size_t m,
                                   const Vec3& plane_normal) {
  if (m < 3) throw Error(ErrorKind::InvalidArgument, "need at least 3 marking points");
  const double nn = plane_normal.norm();
  if (!(nn > 1e-12) || !plane_normal.allFinite())
    throw Error(ErrorKind::InvalidArgument, "degenerate marking plane normal");
  const Vec3 n = plane_normal / nn;

  // In-plane basis from the world axis least aligned with the normal.
  Eigen::Index axis = 0;
  n.cwiseAbs().minCoeff(&axis);
  const Vec3 a = Vec3::Unit(axis);
  const Vec3 e1 = (a - a.dot(n) * n).normalized();
  const Vec3 e2 = n.cross(e1);

  MarkingSet ms;
  ms.tumor_index = tumor_index;
  for (std::size_t k = 0; k < m; ++k) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
    ms.points.push_back(t.center + t.margin * (std::cos(phi) * e1 + std::sin(phi) * e2));
  }
  ms.unsafe_flags.assign(m, false);
  return ms;
}

MarkingSet inject_unsafe_points(const MarkingSet& ms, const std::vector<Intrusion>& intrusions) {
  MarkingSet out = ms;
  for (const auto& in : intrusions) {
    if (in.index >= out.points.size()) throw Error(ErrorKind::InvalidArgument, "intrusion index out of range");
    if (!(in.depth > 0.0) || !(in.depth < in.target.margin))
      throw Error(ErrorKind::InvalidArgument, "intrusion depth must lie in (0, margin)");
    const Vec3 r = out.points[in.index] - in.target.center;
    const double dist = r.norm();
    if (!(dist > kDegenerateDistance))
      throw Error(ErrorKind::DegeneratePoint, "marking point coincides with the target center");
    out.points[in.index] = in.target.center + r / dist * (in.target.margin - in.depth);
    out.unsafe_flags[in.index] = true;
  }
  return out;
}

ReferenceTrajectory build_reference(const std::vector<MarkingSet>& markings, double speed, double dt,
                                    const Vec3& approach_from) {
  if (!(speed > 0.0)) throw Error(ErrorKind::InvalidArgument, "reference speed must be positive");
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt must be positive");

  ReferenceTrajectory ref;
  ref.dt = dt;
  auto add = [&](const Vec3& p) {
    if (ref.waypoints.empty() || (p - ref.waypoints.back()).norm() > 0.0) ref.waypoints.push_back(p);
  };
  add(approach_from);
  for (const auto& ms : markings) {
    for (const auto& p : ms.points) add(p);
    if (!ms.points.empty()) add(ms.points.front());
  }

  std::vector<double> cumulative{0.0};
  for (std::size_t i = 0; i + 1 < ref.waypoints.size(); ++i)
    cumulative.push_back(cumulative.back() + (ref.waypoints[i + 1] - ref.waypoints[i]).norm());
  const double length = cumulative.back();
  const double total_time = length / speed;
  const auto steps = static_cast<std::size_t>(std::ceil(total_time / dt - 1e-6));

  ref.samples.reserve(steps + 1);
  std::size_t seg = 0;
  for (std::size_t k = 0; k <= steps; ++k) {
    ReferenceSample s;
    s.t = static_cast<double>(k) * dt;
    const double arc = speed * s.t;
    if (arc >= length) {
      s.position = ref.waypoints.back();
      s.velocity.setZero();
    } else {
      while (seg + 2 < cumulative.size() && arc >= cumulative[seg + 1]) ++seg;
      const Vec3 dir = (ref.waypoints[seg + 1] - ref.waypoints[seg]) / (cumulative[seg + 1] - cumulative[seg]);
      s.position = ref.waypoints[seg] + (arc - cumulative[seg]) * dir;
      s.velocity = speed * dir;
    }
    ref.samples.push_back(s);
  }
  return ref;
}

void ScenarioSpec::validate() const {
  if (id < 1) throw Error(ErrorKind::InvalidArgument, "scenario id must be positive");
  kinematics.validate();
  dynamics.validate();
  safe_set.validate();
  controller.validate();
  disturbance.validate();
  if (!(filter.alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be positive");
  if (!(dt > 0.0) || !(speed > 0.0) || !(kp_gain >= 0.0) || !(duration >= 0.0) || !(settle >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "timing and tracking parameters out of range");
  for (const auto& ms : markings) {
    ms.validate();
    if (ms.tumor_index >= safe_set.tumors.size())
      throw Error(ErrorKind::InvalidArgument, "marking set refers to an unknown tumor");
  }
  if (!initial_state.q.within_limits(kinematics) || !initial_state.qdot.allFinite())
    throw Error(ErrorKind::InvalidArgument, "initial state outside joint limits");
  const Vec3 x0 = forward_kinematics(initial_state.q, kinematics);
  for (const auto& t : safe_set.tumors)
    if (barrier_value(x0, t) < 0.0)
      throw Error(ErrorKind::InvalidArgument, "initial tip position lies inside a keep-out sphere");
}

ReferenceTrajectory ScenarioSpec::reference() const {
  return build_reference(markings, speed, dt, forward_kinematics(initial_state.q, kinematics));
}

double ScenarioSpec::effective_duration() const {
  return duration > 0.0 ? duration : reference().duration() + settle;
}

ScenarioSpec scenario_catalog(int id) {
  if (id < 1 || id > kScenarioCount)
    throw Error(ErrorKind::UnknownScenario, "unknown scenario id " + std::to_string(id));

  ScenarioSpec spec;
  spec.id = id;
  // The velocity loop carries no gravity compensation; the instrument is
  // treated as supported, and loads enter through the disturbance channel.
  spec.dynamics.gravity.setZero();
  spec.filter.alpha = 0.4;
  spec.initial_state = insertion_state(kRemovable.margin + 10.0, spec.kinematics);

  const Vec3 mucosa_normal = Vec3::UnitZ();
  spec.safe_set.tumors.push_back(kRemovable);
  if (id >= 2) spec.safe_set.tumors.push_back(kPreserved);

  const MarkingSet ring = generate_marking_points(kRemovable, 0, kMarkingCount, mucosa_normal);
  std::vector<Intrusion> intrusions;
  switch (id) {
    case 1:
      intrusions = {{2, kRemovable, kUnsafeDepth}, {5, kRemovable, kUnsafeDepth}};
      break;
    case 2:
      intrusions = {{6, kPreserved, kUnsafeDepth}};
      break;
    default:
      intrusions = {{6, kPreserved, kUnsafeDepth}, {2, kRemovable, kUnsafeDepth}, {4, kRemovable, kUnsafeDepth}};
      break;
  }
  spec.markings.push_back(inject_unsafe_points(ring, intrusions));

  if (id == 4) {
    spec.safe_set.shells.push_back({kRemovable.center, kShellRadius});
    spec.filter.alpha = 1.5;
    spec.filter.mode = FilterMode::KeepOutAndDepth;
    spec.filter.activation_gate = true;
    // Start just outside the depth shell so the gate opens shortly after launch.
    spec.initial_state = insertion_state(kShellRadius + 2.0, spec.kinematics);
  }
  return spec;
}

}  // namespace esdcbf
