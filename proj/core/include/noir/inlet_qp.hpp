#pragma once

#include <Eigen/Dense>

#include "noir/errors.hpp"

namespace noir {

// Per-time-step inflow allocation problem
//   minimize   1/2 u^T diag(w) u + f^T u
//   subject to u >= 0,  sum(u) = budget
// with strictly positive weights. `f` is the co-state pull B^T lambda.
struct InletQp {
  Eigen::VectorXd w;
  Eigen::VectorXd f;
  double budget = 0.0;
};

// Exact minimizer by water-filling: u_i = max(0, (nu - f_i) / w_i) with the
// level nu solved in closed form on the active segment of the sorted
// breakpoints f_i. No iteration, no tolerance; the returned point satisfies
// the constraints exactly and has KKT residual at roundoff level (<= 1e-10).
// Coordinates pinned at zero are the boundary-active inlets.
Eigen::VectorXd solve_inlet_qp(const InletQp& qp);

// Max over constraint violation, nonnegativity violation, stationarity
// spread on the active set, and multiplier sign violations on the inactive
// set, for the best-fit level. Zero exactly at the unique minimizer.
double kkt_residual(const Eigen::VectorXd& u, const InletQp& qp);

}  // namespace noir
