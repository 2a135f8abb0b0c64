#pragma once

#include "esdcbf/scenario.hpp"
#include "esdcbf/trajectory_log.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace esdcbf {

// xdot_d = kp_gain * (p_ref(t) - x) + v_ref(t); after the reference ends the
// feedforward is zero and the pull targets the final point.
Vec3 desired_velocity(const Vec3& x, double t, const ReferenceTrajectory& ref, double kp_gain);

// Raised by run() when a step fails; step() is the index of the failing step.
class RunFailure : public Error {
 public:
  RunFailure(ErrorKind kind, const std::string& what, std::size_t step, TrajectoryLog partial)
      : Error(kind, what), step_(step), partial_(std::move(partial)) {}
  std::size_t step() const noexcept { return step_; }
  const TrajectoryLog& partial_log() const noexcept { return partial_; }

 private:
  std::size_t step_;
  TrajectoryLog partial_;
};

// Fixed-step closed loop: reference -> desired velocity -> constraints -> QP
// filter -> velocity controller -> disturbance -> RK4 plant step. Deterministic.
TrajectoryLog run(const ScenarioSpec& spec);

// Velocity-loop step response at the scenario's initial configuration: the
// joints start moving so the tip has velocity `tip_velocity` and the safe
// velocity is held at zero (no reference, no filter, no disturbance).
TrajectoryLog step_response(const ScenarioSpec& spec, const Vec3& tip_velocity, double duration);

struct SafetyReport {
  std::vector<std::string> barrier_names;
  std::vector<double> min_h;               // over steps with the gate engaged [mm]
  std::optional<double> gate_time;         // first engaged step [s]
  std::optional<double> first_violation_time;  // first enforced h < -tolerance [s]
  double max_tracking_error = 0.0;         // max ||xdot - xdot_s|| [mm/s]
  std::optional<double> tracking_settle_time;  // first time below 5% of the initial peak [s]
  std::optional<double> decay_rate;        // fitted lambda-hat [1/s]
  double path_completion = 0.0;            // fraction of reference samples reached
  double deviation_integral = 0.0;         // integral of ||xdot_s - xdot_d|| dt [mm]
  double alpha = 0.0;

  double min_h_overall() const;
  // Every enforced barrier stays above -kSafetyTolerance.
  bool safe() const;
};

inline constexpr double kPathCompletionTolerance = 0.5;  // [mm]

SafetyReport summarize(const TrajectoryLog& log, const ScenarioSpec& spec);

// CSV schema v1: a "# esdcbf-log v1" line, one header row, then one row per
// step. Fixed columns (30): t, q[3], qdot[3], x[3], xdot[3], xdot_d[3],
// xdot_s[3], edot[3], u[3], d[3], active_rows, gate_engaged; then one h column
// per barrier. Values use 17 significant digits so doubles round-trip.
inline constexpr std::size_t kCsvFixedColumns = 30;
std::vector<std::string> csv_header(const TrajectoryLog& log);
void export_csv(const TrajectoryLog& log, const std::filesystem::path& path);
TrajectoryLog read_csv(const std::filesystem::path& path);

// Writes scenario<id>_path.dat, scenario<id>_barrier.dat and
// scenario<id>_velocity.dat into dir.
void export_plot_data(const TrajectoryLog& log, const ScenarioSpec& spec, const std::filesystem::path& dir);

}  // namespace esdcbf
