#include "esdcbf/control.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace esdcbf {

void ControllerParams::validate() const {
  if (!(k_d > 0.0)) throw Error(ErrorKind::InvalidArgument, "controller gain must be positive");
  if (!(damping >= 0.0)) throw Error(ErrorKind::InvalidArgument, "damping must be non-negative");
}

void DisturbanceSpec::validate() const {
  if (!amplitude.allFinite()) throw Error(ErrorKind::InvalidArgument, "disturbance amplitude must be finite");
  if (waveform == Waveform::Sinusoid && !(frequency > 0.0))
    throw Error(ErrorKind::InvalidArgument, "sinusoid frequency must be positive");
}

Vec3 velocity_error(const RobotState& s, const Vec3& xdot_s, const ControllerParams& cp,
                    const KinematicParams& kp) {
  const Mat3 J = jacobian(s.q, kp);
  const Vec3 xdot = J * s.qdot;
  return damped_pseudo_inverse(J, cp.damping) * (xdot - xdot_s);
}

Vec3 control_law(const Vec3& edot, const ControllerParams& cp) { return -cp.k_d * edot; }

Vec3 disturbance(double t, const DisturbanceSpec& ds) {
  switch (ds.waveform) {
    case Waveform::None:
      return Vec3::Zero();
    case Waveform::Constant:
      return ds.amplitude;
    case Waveform::Sinusoid: {
      std::mt19937_64 rng(ds.seed);
      std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
      Vec3 d;
      for (int i = 0; i < 3; ++i)
        d[i] = ds.amplitude[i] * std::sin(2.0 * std::numbers::pi * ds.frequency * t + phase(rng));
      return d;
    }
  }
  return Vec3::Zero();
}

double measure_decay_rate(std::span<const double> t, std::span<const double> edot_norm) {
  constexpr double kThreshold = 1e-9;
  const std::size_t n = std::min(t.size(), edot_norm.size());
  std::size_t start = 0;
  while (start < n && !(edot_norm[start] > kThreshold)) ++start;
  if (start == n) throw Error(ErrorKind::InsufficientTransient, "velocity error never leaves zero");
  // climb to the first local peak
  while (start + 1 < n && edot_norm[start + 1] >= edot_norm[start]) ++start;
  const double peak = edot_norm[start];

  std::size_t end = start + 1;
  while (end < n && edot_norm[end] >= 0.01 * peak) ++end;
  if (end == n) {
    end = start + 1;
    while (end < n && edot_norm[end] < edot_norm[end - 1]) ++end;
  }
  if (end - start < 3) throw Error(ErrorKind::InsufficientTransient, "transient too short to fit a decay rate");

  double st = 0, sy = 0, stt = 0, sty = 0;
  std::size_t m = 0;
  for (std::size_t i = start; i < end; ++i) {
    if (!(edot_norm[i] > 0.0)) continue;
    const double y = std::log(edot_norm[i]);
    st += t[i];
    sy += y;
    stt += t[i] * t[i];
    sty += t[i] * y;
    ++m;
  }
  const double denom = static_cast<double>(m) * stt - st * st;
  if (m < 3 || !(denom > 0.0)) throw Error(ErrorKind::InsufficientTransient, "degenerate decay window");
  return -(static_cast<double>(m) * sty - st * sy) / denom;
}

double measure_decay_rate(const TrajectoryLog& log) {
  if (log.empty()) throw Error(ErrorKind::EmptyLog, "trajectory log is empty");
  std::vector<double> t, e;
  t.reserve(log.records.size());
  e.reserve(log.records.size());
  for (const auto& r : log.records) {
    t.push_back(r.t);
    e.push_back(r.edot.norm());
  }
  return measure_decay_rate(t, e);
}

}  // namespace esdcbf
