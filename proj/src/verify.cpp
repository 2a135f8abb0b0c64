#include "esdcbf/verify.hpp"

#include "esdcbf/dynamics.hpp"
#include "esdcbf/oracles.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace esdcbf {
namespace {

using Rng = std::mt19937_64;

std::string describe(const char* fmt, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

JointConfig random_config(Rng& rng, const KinematicParams& kp) {
  std::uniform_real_distribution<double> d1(0.0, kp.d1_max), ang(-kp.angle_limit, kp.angle_limit);
  return {d1(rng), ang(rng), ang(rng)};
}

Vec3 random_vec(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng)};
}

Vec3 random_unit(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vec3 v;
  do v = Vec3(n(rng), n(rng), n(rng));
  while (v.norm() < 1e-6);
  return v.normalized();
}

double total_energy(const RobotState& s, const KinematicParams& kp, const DynamicParams& dp) {
  return kinetic_energy(s, kp, dp) + potential_energy(s.q, kp, dp);
}

SuiteResult jacobian_fd(const VerifyOptions& o) {
  Rng rng(o.seed);
  KinematicParams kp;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const JointConfig q = random_config(rng, kp);
    const Mat3 fd = oracle::fd_jacobian(
        [&](const Vec3& v) { return forward_kinematics(JointConfig::from_vector(v), kp); }, q.vector(), 1e-6);
    worst = std::max(worst, (jacobian(q, kp) - fd).cwiseAbs().maxCoeff());
  }
  return {"jacobian-fd", worst <= 1e-4, describe("max |J - FD| = %.3g (tol 1e-4)", worst)};
}

SuiteResult barrier_gradient_fd(const VerifyOptions& o) {
  Rng rng(o.seed + 1);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const TumorSpec t{random_vec(rng, -10, 10), 4.0, true};
    const DepthShell s{t.center, 7.0};
    const Vec3 x = t.center + random_unit(rng) * std::uniform_real_distribution<double>(1.0, 12.0)(rng);
    const Vec3 g_in = oracle::fd_gradient([&](const Vec3& v) { return barrier_value(v, t); }, x, 1e-6);
    const Vec3 g_out = oracle::fd_gradient([&](const Vec3& v) { return depth_barrier_value(v, s); }, x, 1e-6);
    worst = std::max(worst, (barrier_gradient(x, t) - g_in).cwiseAbs().maxCoeff());
    worst = std::max(worst, (depth_barrier_gradient(x, s) - g_out).cwiseAbs().maxCoeff());
  }
  return {"barrier-gradient-fd", worst <= 1e-6, describe("max |grad - FD| = %.3g (tol 1e-6)", worst)};
}

SuiteResult pseudo_inverse(const VerifyOptions& o) {
  Rng rng(o.seed + 2);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Mat3 J = Mat3::Identity() * 2.0;
    J += Mat3::NullaryExpr([&] { return std::uniform_real_distribution<double>(-1, 1)(rng); });
    const Eigen::JacobiSVD<Mat3> svd(J);
    if (svd.singularValues().minCoeff() < 0.1) continue;
    const Mat3 lu = J.partialPivLu().solve(Mat3::Identity());
    worst = std::max(worst, (damped_pseudo_inverse(J, 0.0) - lu).cwiseAbs().maxCoeff());
  }
  return {"pseudo-inverse", worst <= 1e-9, describe("max |J+ - LU inverse| = %.3g (tol 1e-9)", worst)};
}

SuiteResult mass_matrix_spd(const VerifyOptions& o) {
  Rng rng(o.seed + 3);
  KinematicParams kp;
  DynamicParams dp;
  double min_eig = std::numeric_limits<double>::infinity(), asym = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Mat3 M = mass_matrix(random_config(rng, kp), kp, dp);
    asym = std::max(asym, (M - M.transpose()).cwiseAbs().maxCoeff());
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Mat3>(M).eigenvalues().minCoeff());
  }
  return {"mass-matrix-spd", asym == 0.0 && min_eig > 0.0,
          describe("min eigenvalue %.4g, max asymmetry %.3g over 1000 samples", min_eig, asym)};
}

SuiteResult coriolis_skew(const VerifyOptions& o) {
  Rng rng(o.seed + 4);
  KinematicParams kp;
  DynamicParams dp;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const JointConfig q = random_config(rng, kp);
    const Vec3 qdot = random_vec(rng, -2.0, 2.0);
    const Mat3 Mdot = oracle::fd_matrix_derivative(
        [&](double s) { return mass_matrix(JointConfig::from_vector(q.vector() + s * qdot), kp, dp); }, 3e-4);
    const Mat3 N = Mdot - 2.0 * coriolis_matrix(q, qdot, kp, dp);
    worst = std::max(worst, (N + N.transpose()).cwiseAbs().maxCoeff());
  }
  return {"coriolis-skew", worst <= 1e-8, describe("max |(Mdot-2C) + (Mdot-2C)^T| = %.3g (tol 1e-8)", worst)};
}

SuiteResult gravity_fd(const VerifyOptions& o) {
  Rng rng(o.seed + 5);
  KinematicParams kp;
  DynamicParams dp;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const JointConfig q = random_config(rng, kp);
    const Vec3 fd = oracle::fd_gradient(
        [&](const Vec3& v) { return potential_energy(JointConfig::from_vector(v), kp, dp); }, q.vector(), 1e-4);
    const Vec3 g = gravity_vector(q, kp, dp);
    worst = std::max(worst, (g - fd).cwiseAbs().maxCoeff() / std::max(1.0, g.cwiseAbs().maxCoeff()));
  }
  return {"gravity-fd", worst <= 1e-6, describe("max relative |g - dV/dq| = %.3g (tol 1e-6)", worst)};
}

SuiteResult dynamics_residual(const VerifyOptions& o) {
  Rng rng(o.seed + 6);
  KinematicParams kp;
  DynamicParams dp;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    RobotState s{random_config(rng, kp), random_vec(rng, -3.0, 3.0)};
    const Vec3 u = random_vec(rng, -1e4, 1e4);
    const Vec3 qddot = forward_dynamics(s, u, kp, dp);
    const Vec3 r = mass_matrix(s.q, kp, dp) * qddot + coriolis_matrix(s.q, s.qdot, kp, dp) * s.qdot +
                   gravity_vector(s.q, kp, dp) - u;
    const double scale = std::max({1.0, u.cwiseAbs().maxCoeff(), gravity_vector(s.q, kp, dp).cwiseAbs().maxCoeff()});
    worst = std::max(worst, r.cwiseAbs().maxCoeff() / scale);
  }
  return {"dynamics-residual", worst <= 1e-9, describe("max relative residual %.3g (tol 1e-9)", worst)};
}

SuiteResult energy_audit(const VerifyOptions& o) {
  Rng rng(o.seed + 7);
  KinematicParams kp;
  DynamicParams dp;  // gravity on
  const double gsign = o.corrupt_gravity_sign ? -1.0 : 1.0;
  auto accel = [&](const RobotState& s, const Vec3& u) {
    const Mat3 M = mass_matrix(s.q, kp, dp);
    const Vec3 rhs = dp.input_map * u - coriolis_matrix(s.q, s.qdot, kp, dp) * s.qdot -
                     gsign * gravity_vector(s.q, kp, dp);
    return Vec3(M.llt().solve(rhs));
  };

  // Power balance: d/dt (KE + PE) along the flow equals qdot^T B u.
  double worst_power = 0.0;
  for (int i = 0; i < 200; ++i) {
    const RobotState s{random_config(rng, kp), random_vec(rng, -2.0, 2.0)};
    const Vec3 u = random_vec(rng, -5e4, 5e4);
    const Vec3 qddot = accel(s, u);
    const double dE = oracle::fd_scalar_derivative(
        [&](double h) {
          RobotState x{JointConfig::from_vector(s.q.vector() + h * s.qdot), s.qdot + h * qddot};
          return total_energy(x, kp, dp);
        },
        1e-4);
    const double supplied = s.qdot.dot(dp.input_map * u);
    const double scale = std::abs(supplied) + std::abs(s.qdot.dot(gravity_vector(s.q, kp, dp))) +
                         std::abs(s.qdot.dot(mass_matrix(s.q, kp, dp) * qddot)) + 1e-12;
    worst_power = std::max(worst_power, std::abs(dE - supplied) / scale);
  }

  // Free motion without gravity conserves kinetic energy.
  DynamicParams free = dp;
  free.gravity.setZero();
  RobotState s{JointConfig{20.0, 0.3, -0.4}, Vec3(1.0, 1.5, -2.0)};
  const double e0 = kinetic_energy(s, kp, free);
  for (int k = 0; k < 1000; ++k) s = rk4_step(s, 1e-3, [&](const RobotState& x) {
    return forward_dynamics(x, Vec3::Zero(), kp, free);
  });
  const double drift = std::abs(kinetic_energy(s, kp, free) - e0) / e0;

  const bool ok = worst_power <= 1e-6 && drift <= 1e-6;
  return {"energy-audit", ok,
          describe("power balance rel err %.3g (tol 1e-6), free-motion KE drift %.3g (tol 1e-6)", worst_power, drift)};
}

SuiteResult rk4_order(const VerifyOptions&) {
  KinematicParams kp;
  DynamicParams dp;
  dp.gravity.setZero();
  const Vec3 u(50.0, 2000.0, -1500.0);
  const RobotState s0{JointConfig{20.0, 0.2, -0.3}, Vec3(1.0, 2.0, -1.5)};
  auto integrate = [&](double dt) {
    RobotState s = s0;
    const auto n = static_cast<int>(std::llround(1.0 / dt));
    for (int k = 0; k < n; ++k) s = rk4_step(s, u, dt, kp, dp);
    Eigen::Matrix<double, 6, 1> v;
    v << s.q.vector(), s.qdot;
    return v;
  };
  const auto ref = integrate(1e-3);
  const double e1 = (integrate(2e-2) - ref).norm();
  const double e2 = (integrate(1e-2) - ref).norm();
  const double order = std::log2(e1 / e2);
  return {"rk4-order", order >= 3.8, describe("observed order %.3f (need >= 3.8), error at dt=0.01: %.3g", order, e2)};
}

SuiteResult qp_oracle(const VerifyOptions& o) {
  Rng rng(o.seed + 8);
  std::uniform_int_distribution<int> nrows(1, 3);
  std::uniform_real_distribution<double> off(-2.0, 2.0);
  double worst_grid = 0.0, worst_dykstra = 0.0, worst_kkt = 0.0;
  std::size_t failures = 0;
  for (std::size_t i = 0; i < o.qp_instances; ++i) {
    // Nearly dependent normals put the projection far out in a thin wedge the iterative
    // oracles cannot resolve; such draws are redrawn.
    std::vector<HalfspaceConstraint> rows(static_cast<std::size_t>(nrows(rng)));
    Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, 3> N(3, static_cast<Eigen::Index>(rows.size()));
    do {
      for (std::size_t k = 0; k < rows.size(); ++k) {
        rows[k].normal = random_unit(rng);
        rows[k].offset = off(rng);
        N.col(static_cast<Eigen::Index>(k)) = rows[k].normal;
      }
    } while (Eigen::JacobiSVD<Eigen::MatrixXd>(N).singularValues().minCoeff() < 0.2);
    const Vec3 v_d = random_vec(rng, -3.0, 3.0);
    const Vec3 v = safety_filter(v_d, rows);
    const Vec3 grid = oracle::grid_search_dual_projection(v_d, rows);
    const Vec3 dyk = oracle::dykstra_projection(v_d, rows);
    const double e_grid = (v - grid).norm() / std::max(1.0, grid.norm());
    const double e_dyk = (v - dyk).norm() / std::max(1.0, dyk.norm());
    worst_grid = std::max(worst_grid, e_grid);
    worst_dykstra = std::max(worst_dykstra, e_dyk);
    worst_kkt = std::max(worst_kkt, oracle::kkt_residual(v_d, rows, v));
    if (e_grid > 1e-3 || e_dyk > 1e-3) ++failures;
  }
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "%zu instances, max rel err vs grid %.3g and vs Dykstra %.3g (tol 1e-3), max KKT residual %.3g",
                o.qp_instances, worst_grid, worst_dykstra, worst_kkt);
  return {"qp-oracle", failures == 0 && worst_kkt <= 1e-6, buf};
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names{"jacobian-fd",     "barrier-gradient-fd", "pseudo-inverse",
                                              "mass-matrix-spd", "coriolis-skew",       "gravity-fd",
                                              "dynamics-residual", "energy-audit",      "rk4-order",
                                              "qp-oracle"};
  return names;
}

SuiteResult run_suite(const std::string& name, const VerifyOptions& o) {
  if (name == "jacobian-fd") return jacobian_fd(o);
  if (name == "barrier-gradient-fd") return barrier_gradient_fd(o);
  if (name == "pseudo-inverse") return pseudo_inverse(o);
  if (name == "mass-matrix-spd") return mass_matrix_spd(o);
  if (name == "coriolis-skew") return coriolis_skew(o);
  if (name == "gravity-fd") return gravity_fd(o);
  if (name == "dynamics-residual") return dynamics_residual(o);
  if (name == "energy-audit") return energy_audit(o);
  if (name == "rk4-order") return rk4_order(o);
  if (name == "qp-oracle") return qp_oracle(o);
  throw Error(ErrorKind::InvalidArgument, "unknown verification suite " + name);
}

std::vector<SuiteResult> run_verification(const VerifyOptions& o) {
  std::vector<SuiteResult> out;
  for (const auto& n : verify_suite_names()) {
    try {
      out.push_back(run_suite(n, o));
    } catch (const std::exception& e) {
      out.push_back({n, false, std::string("threw: ") + e.what()});
    }
  }
  return out;
}

}  // namespace esdcbf
