#pragma once

// Reference computations used to check the production code paths. None of
// these share an algorithm with the code they check.

#include "esdcbf/safety.hpp"

#include <functional>
#include <vector>

namespace esdcbf::oracle {

// Central differences, step h.
Vec3 fd_gradient(const std::function<double(const Vec3&)>& f, const Vec3& x, double h);
Mat3 fd_jacobian(const std::function<Vec3(const Vec3&)>& f, const Vec3& x, double h);

// Five-point stencil derivative of a matrix-valued path s -> f(s) at s = 0.
Mat3 fd_matrix_derivative(const std::function<Mat3(double)>& f, double h);
double fd_scalar_derivative(const std::function<double(double)>& f, double h);

// Euclidean projection of v_d onto the intersection of the halfspaces by
// Dykstra's alternating projections.
Vec3 dykstra_projection(const Vec3& v_d, const std::vector<HalfspaceConstraint>& rows,
                        std::size_t max_cycles = 200000, double tol = 1e-14);

// Coarse-to-fine grid search for the feasible point closest to v_d.
// Returns false when no feasible grid point is found.
bool grid_search_projection(const Vec3& v_d, const std::vector<HalfspaceConstraint>& rows, Vec3& out,
                            int points_per_axis = 41, int refinements = 40);

// Grid search over the dual multipliers lambda >= 0 of the same projection. The dual is a
// concave quadratic on the nonnegative orthant, so coarse-to-fine zooming converges even when
// the primal feasible set is a thin wedge. Returns v_d + N lambda for the best multipliers.
Vec3 grid_search_dual_projection(const Vec3& v_d, const std::vector<HalfspaceConstraint>& rows,
                                 int points_per_axis = 11, int refinements = 50);

// Max violation of primal feasibility and of the stationarity condition
// (v - v_d in the cone of the normals of rows active at v).
double kkt_residual(const Vec3& v_d, const std::vector<HalfspaceConstraint>& rows, const Vec3& v,
                    double active_tol = 1e-7);

}  // namespace esdcbf::oracle
