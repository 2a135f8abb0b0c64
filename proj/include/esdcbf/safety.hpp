#pragma once

#include "esdcbf/common.hpp"
#include "esdcbf/trajectory_log.hpp"

#include <string>
#include <vector>

namespace esdcbf {

// Keep-out sphere around a tumor: safe when ||x - center|| >= margin.
struct TumorSpec {
  Vec3 center = Vec3::Zero();
  double margin = 1.0;  // [mm]
  bool removable = true;
};

// Outer sphere bounding cutting depth: safe when ||x - center|| <= outer_radius.
struct DepthShell {
  Vec3 center = Vec3::Zero();
  double outer_radius = 1.0;  // [mm]
};

struct SafeSetSpec {
  std::vector<TumorSpec> tumors;
  std::vector<DepthShell> shells;

  // Barrier order used everywhere: tumors first, then shells.
  std::size_t barrier_count() const { return tumors.size() + shells.size(); }
  std::vector<std::string> barrier_names() const;
  void validate() const;
};

enum class FilterMode { KeepOutOnly, KeepOutAndDepth };

struct FilterParams {
  double alpha = 0.4;
  FilterMode mode = FilterMode::KeepOutOnly;
  bool activation_gate = false;
  bool enabled = true;  // false runs the desired velocity through unfiltered
};

// normal . v >= offset, tagged with the barrier it came from and its value.
struct HalfspaceConstraint {
  Vec3 normal = Vec3::UnitX();
  double offset = 0.0;
  std::size_t barrier = 0;
  double h = 0.0;
};

inline constexpr double kDegenerateDistance = 1e-9;

double barrier_value(const Vec3& x, const TumorSpec& t);
Vec3 barrier_gradient(const Vec3& x, const TumorSpec& t);
double depth_barrier_value(const Vec3& x, const DepthShell& s);
Vec3 depth_barrier_gradient(const Vec3& x, const DepthShell& s);

// Every barrier value at x, in SafeSetSpec barrier order.
std::vector<double> barrier_values(const Vec3& x, const SafeSetSpec& spec);

// Index of the tumor each shell bounds (nearest tumor center).
std::vector<std::size_t> shell_owners(const SafeSetSpec& spec);

std::vector<HalfspaceConstraint> assemble_constraints(const Vec3& x, const SafeSetSpec& spec,
                                                      const FilterParams& fp);

struct FilterResult {
  Vec3 velocity = Vec3::Zero();
  std::vector<std::size_t> active;  // indices into the row list
  std::vector<double> multipliers;  // one per active row, all >= 0
};

// argmin ||v - v_d||^2 s.t. every row. Exact active-set enumeration over
// subsets of at most three rows; throws InfeasibleQp when nothing satisfies
// the rows.
FilterResult solve_safety_qp(const Vec3& v_d, const std::vector<HalfspaceConstraint>& rows);
Vec3 safety_filter(const Vec3& v_d, const std::vector<HalfspaceConstraint>& rows);

// Smallest enforced barrier value over the run. Only records with the gate
// engaged count. Throws InvalidArgument when the logged disturbance exceeds
// d_bound.
double issf_margin(const TrajectoryLog& log, double d_bound);

}  // namespace esdcbf
