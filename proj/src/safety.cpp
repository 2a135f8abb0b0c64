#include "esdcbf/safety.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace esdcbf {
namespace {

Vec3 unit_from(const Vec3& x, const Vec3& center) {
  const Vec3 r = x - center;
  const double n = r.norm();
  if (!(n > kDegenerateDistance))
    throw Error(ErrorKind::DegeneratePoint, "point coincides with a barrier center");
  return r / n;
}

HalfspaceConstraint tumor_row(const Vec3& x, const TumorSpec& t, std::size_t barrier, double alpha) {
  const double h = barrier_value(x, t);
  return {barrier_gradient(x, t), -alpha * h, barrier, h};
}

HalfspaceConstraint shell_row(const Vec3& x, const DepthShell& s, std::size_t barrier, double alpha) {
  const double h = depth_barrier_value(x, s);
  return {depth_barrier_gradient(x, s), -alpha * h, barrier, h};
}

// Calls fn(subset) for every subset of {0..m-1} with size <= max_size, smallest first.
template <typename Fn>
void for_each_subset(std::size_t m, std::size_t max_size, Fn&& fn) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k <= std::min(m, max_size); ++k) {
    idx.resize(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      fn(idx);
      if (k == 0) break;
      std::size_t pos = k;
      while (pos > 0 && idx[pos - 1] == m - k + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
}

}  // namespace

std::vector<std::string> SafeSetSpec::barrier_names() const {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < tumors.size(); ++i) names.push_back("tumor" + std::to_string(i));
  for (std::size_t i = 0; i < shells.size(); ++i) names.push_back("shell" + std::to_string(i));
  return names;
}

void SafeSetSpec::validate() const {
  for (const auto& t : tumors)
    if (!(t.margin > 0.0) || !t.center.allFinite())
      throw Error(ErrorKind::InvalidArgument, "tumor margin must be positive");
  const auto owners = shell_owners(*this);
  for (std::size_t i = 0; i < shells.size(); ++i) {
    if (!(shells[i].outer_radius > 0.0) || !shells[i].center.allFinite())
      throw Error(ErrorKind::InvalidArgument, "shell radius must be positive");
    if (!tumors.empty() && !(shells[i].outer_radius > tumors[owners[i]].margin))
      throw Error(ErrorKind::InvalidArgument, "shell radius must exceed the enclosed tumor margin");
  }
}

double barrier_value(const Vec3& x, const TumorSpec& t) { return (x - t.center).norm() - t.margin; }

Vec3 barrier_gradient(const Vec3& x, const TumorSpec& t) { return unit_from(x, t.center); }

double depth_barrier_value(const Vec3& x, const DepthShell& s) {
  return s.outer_radius - (x - s.center).norm();
}

Vec3 depth_barrier_gradient(const Vec3& x, const DepthShell& s) { return -unit_from(x, s.center); }

std::vector<double> barrier_values(const Vec3& x, const SafeSetSpec& spec) {
  std::vector<double> h;
  h.reserve(spec.barrier_count());
  for (const auto& t : spec.tumors) h.push_back(barrier_value(x, t));
  for (const auto& s : spec.shells) h.push_back(depth_barrier_value(x, s));
  return h;
}

std::vector<std::size_t> shell_owners(const SafeSetSpec& spec) {
  std::vector<std::size_t> owners;
  for (const auto& s : spec.shells) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < spec.tumors.size(); ++i) {
      const double d = (spec.tumors[i].center - s.center).norm();
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    owners.push_back(best);
  }
  return owners;
}

std::vector<HalfspaceConstraint> assemble_constraints(const Vec3& x, const SafeSetSpec& spec,
                                                      const FilterParams& fp) {
  std::vector<HalfspaceConstraint> rows;
  const std::size_t nt = spec.tumors.size();
  if (fp.mode == FilterMode::KeepOutOnly) {
    for (std::size_t i = 0; i < nt; ++i) rows.push_back(tumor_row(x, spec.tumors[i], i, fp.alpha));
    return rows;
  }

  // Closest barrier per tumor/shell group: smallest h wins, near-ties keep all.
  constexpr double kTie = 1e-12;
  const auto owners = shell_owners(spec);
  for (std::size_t i = 0; i < nt; ++i) {
    const double h_in = barrier_value(x, spec.tumors[i]);
    double h_min = h_in;
    for (std::size_t s = 0; s < spec.shells.size(); ++s)
      if (owners[s] == i) h_min = std::min(h_min, depth_barrier_value(x, spec.shells[s]));
    if (h_in - h_min <= kTie) rows.push_back(tumor_row(x, spec.tumors[i], i, fp.alpha));
    for (std::size_t s = 0; s < spec.shells.size(); ++s)
      if (owners[s] == i && depth_barrier_value(x, spec.shells[s]) - h_min <= kTie)
        rows.push_back(shell_row(x, spec.shells[s], nt + s, fp.alpha));
  }
  if (nt == 0)
    for (std::size_t s = 0; s < spec.shells.size(); ++s) rows.push_back(shell_row(x, spec.shells[s], s, fp.alpha));
  return rows;
}

FilterResult solve_safety_qp(const Vec3& v_d, const std::vector<HalfspaceConstraint>& rows) {
  const bool feasible_as_is = std::all_of(rows.begin(), rows.end(), [&](const HalfspaceConstraint& r) {
    return r.normal.dot(v_d) >= r.offset;
  });
  if (feasible_as_is) return {v_d, {}, {}};

  FilterResult best;
  double best_dist = std::numeric_limits<double>::infinity();
  for_each_subset(rows.size(), 3, [&](const std::vector<std::size_t>& subset) {
    const auto k = static_cast<Eigen::Index>(subset.size());
    if (k == 0) return;
    Eigen::MatrixXd N(3, k);
    Eigen::VectorXd b(k);
    for (Eigen::Index j = 0; j < k; ++j) {
      N.col(j) = rows[subset[j]].normal;
      b[j] = rows[subset[j]].offset;
    }
    const Eigen::MatrixXd G = N.transpose() * N;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
    lu.setThreshold(1e-10);
    if (lu.rank() < k) return;
    const Eigen::VectorXd lambda = lu.solve(b - N.transpose() * v_d);
    const double lambda_tol = 1e-12 * std::max(1.0, lambda.cwiseAbs().maxCoeff());
    if ((lambda.array() < -lambda_tol).any()) return;
    const Vec3 v = v_d + N * lambda.cwiseMax(0.0);
    for (const auto& r : rows) {
      const double tol = 1e-10 * std::max({1.0, std::abs(r.offset), v.norm()});
      if (r.normal.dot(v) < r.offset - tol) return;
    }
    const double dist = (v - v_d).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best.velocity = v;
      best.active = subset;
      best.multipliers.assign(lambda.data(), lambda.data() + k);
      for (auto& m : best.multipliers) m = std::max(m, 0.0);
    }
  });
  if (!std::isfinite(best_dist)) throw Error(ErrorKind::InfeasibleQp, "no velocity satisfies every safety constraint");
  return best;
}

Vec3 safety_filter(const Vec3& v_d, const std::vector<HalfspaceConstraint>& rows) {
  return solve_safety_qp(v_d, rows).velocity;
}

double issf_margin(const TrajectoryLog& log, double d_bound) {
  if (log.empty()) throw Error(ErrorKind::EmptyLog, "trajectory log is empty");
  double margin = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& r : log.records) {
    if (r.d.cwiseAbs().maxCoeff() > d_bound * (1.0 + 1e-12) + 1e-12)
      throw Error(ErrorKind::InvalidArgument, "logged disturbance exceeds the stated bound");
    if (!r.gate_engaged) continue;
    any = true;
    for (double h : r.h) margin = std::min(margin, h);
  }
  if (!any) throw Error(ErrorKind::EmptyLog, "no record has the safety filter engaged");
  return margin;
}

}  // namespace esdcbf
