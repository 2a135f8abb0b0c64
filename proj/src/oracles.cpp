#include "esdcbf/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace esdcbf::oracle {

Vec3 fd_gradient(const std::function<double(const Vec3&)>& f, const Vec3& x, double h) {
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

Mat3 fd_jacobian(const std::function<Vec3(const Vec3&)>& f, const Vec3& x, double h) {
  Mat3 J;
  for (int i = 0; i < 3; ++i) {
    Vec3 a = x, b = x;
    a[i] += h;
    b[i] -= h;
    J.col(i) = (f(a) - f(b)) / (2.0 * h);
  }
  return J;
}

Mat3 fd_matrix_derivative(const std::function<Mat3(double)>& f, double h) {
  return (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h);
}

double fd_scalar_derivative(const std::function<double(double)>& f, double h) {
  return (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h);
}

Vec3 dykstra_projection(const Vec3& v_d, const std::vector<HalfspaceConstraint>& rows, std::size_t max_cycles,
                        double tol) {
  Vec3 x = v_d;
  std::vector<Vec3> p(rows.size(), Vec3::Zero());
  for (std::size_t cycle = 0; cycle < max_cycles; ++cycle) {
    const Vec3 start = x;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Vec3 y = x + p[i];
      const Vec3& n = rows[i].normal;
      const double slack = n.dot(y) - rows[i].offset;
      x = slack >= 0.0 ? y : Vec3(y - slack * n / n.squaredNorm());
      p[i] = y - x;
    }
    if ((x - start).norm() <= tol * std::max(1.0, x.norm()) && cycle > 0) break;
  }
  return x;
}

bool grid_search_projection(const Vec3& v_d, const std::vector<HalfspaceConstraint>& rows, Vec3& out,
                            int points_per_axis, int refinements) {
  auto feasible = [&](const Vec3& v) {
    return std::all_of(rows.begin(), rows.end(), [&](const HalfspaceConstraint& r) {
      return r.normal.dot(v) >= r.offset;
    });
  };
  // One zoom sequence from a box of the given half-width around v_d.
  auto zoom = [&](double half) {
    Vec3 center = v_d;
    for (int level = 0; level < refinements; ++level) {
      const double step = 2.0 * half / (points_per_axis - 1);
      double best = std::numeric_limits<double>::infinity();
      Vec3 best_pt = center;
      for (int i = 0; i < points_per_axis; ++i)
        for (int j = 0; j < points_per_axis; ++j)
          for (int k = 0; k < points_per_axis; ++k) {
            const Vec3 v = center - Vec3::Constant(half) + step * Vec3(i, j, k);
            if (!feasible(v)) continue;
            const double d = (v - v_d).squaredNorm();
            if (d < best) {
              best = d;
              best_pt = v;
            }
          }
      if (!std::isfinite(best)) return level > 0;
      center = best_pt;
      out = center;
      half *= 0.25;
    }
    return true;
  };

  double half = 1.0 + v_d.norm();
  for (const auto& r : rows) half += std::abs(r.offset);
  for (int widen = 0; widen < 8; ++widen, half *= 4.0)
    if (zoom(half)) return true;
  return false;
}

Vec3 grid_search_dual_projection(const Vec3& v_d, const std::vector<HalfspaceConstraint>& rows,
                                 int points_per_axis, int refinements) {
  const auto m = static_cast<int>(rows.size());
  if (m == 0) return v_d;
  using Multipliers = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 8, 1>;
  using Normals = Eigen::Matrix<double, 3, Eigen::Dynamic, 0, 3, 8>;
  if (m > 8) throw Error(ErrorKind::InvalidArgument, "dual grid search supports at most 8 rows");
  Normals N(3, m);
  Multipliers c(m);
  for (int j = 0; j < m; ++j) {
    N.col(j) = rows[static_cast<std::size_t>(j)].normal;
    c[j] = rows[static_cast<std::size_t>(j)].normal.dot(v_d) - rows[static_cast<std::size_t>(j)].offset;
  }
  auto dual = [&](const Multipliers& lambda) { return -0.5 * (N * lambda).squaredNorm() - lambda.dot(c); };

  double half = 1.0 + c.cwiseAbs().sum();
  Multipliers center = Multipliers::Constant(m, half);
  Multipliers best_pt = Multipliers::Zero(m);
  double best = dual(best_pt);
  int total = 1;
  for (int j = 0; j < m; ++j) total *= points_per_axis;
  for (int level = 0; level < refinements; ++level) {
    const double step = 2.0 * half / (points_per_axis - 1);
    bool on_upper_edge = false;
    for (int idx = 0; idx < total; ++idx) {
      Multipliers lambda(m);
      int rest = idx;
      for (int j = 0; j < m; ++j) {
        lambda[j] = std::max(0.0, center[j] - half + step * (rest % points_per_axis));
        rest /= points_per_axis;
      }
      const double d = dual(lambda);
      if (d > best) {
        best = d;
        best_pt = lambda;
      }
    }
    for (int j = 0; j < m; ++j) on_upper_edge |= best_pt[j] >= center[j] + half - 0.5 * step;
    center = best_pt;
    // An optimum on the upper edge of the box may lie beyond it: keep the box size.
    if (!on_upper_edge) half *= 0.5;
  }
  return v_d + N * best_pt;
}

double kkt_residual(const Vec3& v_d, const std::vector<HalfspaceConstraint>& rows, const Vec3& v,
                    double active_tol) {
  double worst = 0.0;
  std::vector<const HalfspaceConstraint*> active;
  for (const auto& r : rows) {
    const double slack = r.normal.dot(v) - r.offset;
    worst = std::max(worst, -slack);
    if (std::abs(slack) <= active_tol * std::max(1.0, std::abs(r.offset))) active.push_back(&r);
  }
  const Vec3 step = v - v_d;
  if (active.empty()) return std::max(worst, step.norm());
  Eigen::MatrixXd N(3, static_cast<Eigen::Index>(active.size()));
  for (std::size_t j = 0; j < active.size(); ++j) N.col(static_cast<Eigen::Index>(j)) = active[j]->normal;
  const Eigen::VectorXd lambda = N.completeOrthogonalDecomposition().solve(step);
  worst = std::max(worst, (N * lambda - step).norm());
  worst = std::max(worst, std::max(0.0, -lambda.minCoeff()));
  return worst;
}

}  // namespace esdcbf::oracle
