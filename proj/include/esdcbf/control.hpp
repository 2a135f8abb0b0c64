#pragma once

#include "esdcbf/state.hpp"
#include "esdcbf/trajectory_log.hpp"

#include <cstdint>
#include <span>

namespace esdcbf {

// Model-free velocity tracking: u = -k_d * J^+(q) (xdot - xdot_s).
// Nothing here touches M, C or g.
struct ControllerParams {
  double k_d = 6000.0;
  double damping = 1e-3;

  void validate() const;
};

enum class Waveform { None, Constant, Sinusoid };

struct DisturbanceSpec {
  // Signed per-joint amplitude, same units as u. |d_i(t)| <= |amplitude_i|;
  // the constant waveform applies it as is.
  Vec3 amplitude = Vec3::Zero();
  Waveform waveform = Waveform::None;
  double frequency = 1.0;  // [Hz], sinusoid only
  std::uint64_t seed = 0;  // picks the sinusoid phases

  void validate() const;
};

Vec3 velocity_error(const RobotState& s, const Vec3& xdot_s, const ControllerParams& cp,
                    const KinematicParams& kp);

Vec3 control_law(const Vec3& edot, const ControllerParams& cp);

Vec3 disturbance(double t, const DisturbanceSpec& ds);

// Least-squares slope of -log||edot|| against t over the first transient:
// from the first peak until ||edot|| first drops below 1% of it (or, if it
// never does, until its first local minimum). Throws InsufficientTransient.
double measure_decay_rate(std::span<const double> t, std::span<const double> edot_norm);
double measure_decay_rate(const TrajectoryLog& log);

}  // namespace esdcbf
