#include "esdcbf/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace esdcbf {

Vec3 desired_velocity(const Vec3& x, double t, const ReferenceTrajectory& ref, double kp_gain) {
  const ReferenceSample& s = ref.at(t);
  return kp_gain * (s.position - x) + s.velocity;
}

TrajectoryLog run(const ScenarioSpec& spec) {
  spec.validate();
  const ReferenceTrajectory ref = spec.reference();
  const double duration = spec.duration > 0.0 ? spec.duration : ref.duration() + spec.settle;
  const auto steps = static_cast<std::size_t>(std::llround(duration / spec.dt));
  const KinematicParams& kp = spec.kinematics;

  TrajectoryLog log;
  log.barrier_names = spec.safe_set.barrier_names();
  log.records.reserve(steps + 1);

  RobotState state = spec.initial_state;
  bool gate = !spec.filter.activation_gate;
  for (std::size_t k = 0; k <= steps; ++k) {
    try {
      LogRecord rec;
      rec.t = static_cast<double>(k) * spec.dt;
      const Mat3 J = jacobian(state.q, kp);
      rec.q = state.q.vector();
      rec.qdot = state.qdot;
      rec.x = forward_kinematics(state.q, kp);
      rec.xdot = J * state.qdot;
      rec.xdot_d = desired_velocity(rec.x, rec.t, ref, spec.kp_gain);
      rec.h = barrier_values(rec.x, spec.safe_set);

      const auto rows = assemble_constraints(rec.x, spec.safe_set, spec.filter);
      if (!gate)
        gate = std::all_of(rows.begin(), rows.end(), [](const HalfspaceConstraint& r) { return r.h >= 0.0; });
      rec.gate_engaged = gate;

      rec.xdot_s = rec.xdot_d;
      if (spec.filter.enabled && gate) {
        const FilterResult res = solve_safety_qp(rec.xdot_d, rows);
        rec.xdot_s = res.velocity;
        rec.active_rows = static_cast<int>(res.active.size());
      }

      rec.edot = damped_pseudo_inverse(J, spec.controller.damping) * (rec.xdot - rec.xdot_s);
      rec.u = control_law(rec.edot, spec.controller);
      rec.d = disturbance(rec.t, spec.disturbance);
      log.records.push_back(rec);

      if (k < steps) state = rk4_step(state, rec.u + rec.d, spec.dt, kp, spec.dynamics);
    } catch (const Error& e) {
      char where[96];
      std::snprintf(where, sizeof where, " (step %zu, t = %.6g s)", k, static_cast<double>(k) * spec.dt);
      throw RunFailure(e.kind(), e.what() + std::string(where), k, std::move(log));
    }
  }
  return log;
}

TrajectoryLog step_response(const ScenarioSpec& spec, const Vec3& tip_velocity, double duration) {
  spec.validate();
  if (!(duration > 0.0)) throw Error(ErrorKind::InvalidArgument, "duration must be positive");
  const KinematicParams& kp = spec.kinematics;
  RobotState state = spec.initial_state;
  state.qdot = jacobian(state.q, kp).partialPivLu().solve(tip_velocity);

  TrajectoryLog log;
  log.barrier_names = spec.safe_set.barrier_names();
  const auto steps = static_cast<std::size_t>(std::llround(duration / spec.dt));
  for (std::size_t k = 0; k <= steps; ++k) {
    LogRecord rec;
    rec.t = static_cast<double>(k) * spec.dt;
    const Mat3 J = jacobian(state.q, kp);
    rec.q = state.q.vector();
    rec.qdot = state.qdot;
    rec.x = forward_kinematics(state.q, kp);
    rec.xdot = J * state.qdot;
    rec.h = barrier_values(rec.x, spec.safe_set);
    rec.edot = damped_pseudo_inverse(J, spec.controller.damping) * rec.xdot;
    rec.u = control_law(rec.edot, spec.controller);
    rec.gate_engaged = true;
    log.records.push_back(rec);
    if (k < steps) state = rk4_step(state, rec.u, spec.dt, kp, spec.dynamics);
  }
  return log;
}

double SafetyReport::min_h_overall() const {
  double m = std::numeric_limits<double>::infinity();
  for (double h : min_h) m = std::min(m, h);
  return m;
}

bool SafetyReport::safe() const {
  return std::all_of(min_h.begin(), min_h.end(), [](double h) { return h >= -kSafetyTolerance; });
}

SafetyReport summarize(const TrajectoryLog& log, const ScenarioSpec& spec) {
  if (log.empty()) throw Error(ErrorKind::EmptyLog, "trajectory log is empty");
  const auto& recs = log.records;

  SafetyReport rep;
  rep.alpha = spec.filter.alpha;
  rep.barrier_names = log.barrier_names;
  rep.min_h.assign(log.barrier_names.size(), std::numeric_limits<double>::infinity());
  for (const auto& r : recs) {
    if (!r.gate_engaged) continue;
    if (!rep.gate_time) rep.gate_time = r.t;
    for (std::size_t i = 0; i < r.h.size() && i < rep.min_h.size(); ++i) {
      rep.min_h[i] = std::min(rep.min_h[i], r.h[i]);
      if (!rep.first_violation_time && r.h[i] < -kSafetyTolerance) rep.first_violation_time = r.t;
    }
  }

  std::vector<double> err(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    err[i] = (recs[i].xdot - recs[i].xdot_s).norm();
    rep.max_tracking_error = std::max(rep.max_tracking_error, err[i]);
  }
  std::size_t peak = 0;
  while (peak + 1 < err.size() && err[peak + 1] >= err[peak]) ++peak;
  for (std::size_t i = peak; i < err.size(); ++i) {
    if (err[i] < 0.05 * err[peak]) {
      rep.tracking_settle_time = recs[i].t - recs.front().t;
      break;
    }
  }

  try {
    rep.decay_rate = measure_decay_rate(log);
  } catch (const Error&) {
    rep.decay_rate.reset();
  }

  for (std::size_t i = 1; i < recs.size(); ++i) {
    const double a = (recs[i - 1].xdot_s - recs[i - 1].xdot_d).norm();
    const double b = (recs[i].xdot_s - recs[i].xdot_d).norm();
    rep.deviation_integral += 0.5 * (a + b) * (recs[i].t - recs[i - 1].t);
  }

  // A reference sample counts as reached when the tip passes within tolerance
  // of it during the following second (the tip trails the reference).
  const ReferenceTrajectory ref = spec.reference();
  std::size_t reached = 0;
  std::size_t j0 = 0;
  for (const auto& s : ref.samples) {
    while (j0 < recs.size() && recs[j0].t < s.t) ++j0;
    for (std::size_t j = j0; j < recs.size() && recs[j].t <= s.t + 1.0; ++j) {
      if ((recs[j].x - s.position).norm() <= kPathCompletionTolerance) {
        ++reached;
        break;
      }
    }
  }
  rep.path_completion = ref.samples.empty() ? 1.0 : static_cast<double>(reached) / static_cast<double>(ref.samples.size());
  return rep;
}

}  // namespace esdcbf
