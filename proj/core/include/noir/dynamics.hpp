#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "noir/graph.hpp"
#include "noir/routing.hpp"

namespace noir {

// Interior-to-interior tendency matrix Q in state order (columns index the
// source road, rows the destination): Q(i, j) is the split of road
// (j + boundary) routed to road (i + boundary), zero off the edge set.
Eigen::MatrixXd tendency_matrix(const RoutingModel& routing, const NoirGraph& graph);

// Diagonal of the outflow matrix P, state order.
Eigen::VectorXd outflow_rates(const RoutingModel& routing, const NoirGraph& graph);

// Per interior road, the fraction of its outflow routed directly to outlets,
// i.e. one minus its column sum of Q.
Eigen::VectorXd outlet_fractions(const RoutingModel& routing, const NoirGraph& graph);

// Continuous-time state matrix A = (Q - I) P over the interior densities.
Eigen::MatrixXd state_matrix(const RoutingModel& routing, const NoirGraph& graph);

// Boundary input matrix B: B(i, j) = 1 iff inlet j feeds interior road
// (i + boundary). One nonzero per inlet.
Eigen::MatrixXd input_matrix(const NoirGraph& graph);

// Assembled LTI traffic dynamics xdot = A x + B u.
struct LtiTraffic {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
};

LtiTraffic assemble_lti(const RoutingModel& routing, const NoirGraph& graph);

// Absolute slack allowed on |mu + 1| < 1 for the unit-disk verdict.
inline constexpr double kSpectrumDiskTol = 1e-9;

struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;
  double max_real_part = 0.0;
  bool hurwitz = false;               // max_real_part < 0
  bool inside_unit_disk = false;      // every |mu + 1| < 1 + kSpectrumDiskTol
};

// Dense eigendecomposition of A with the two stability verdicts. Throws
// Error(non_finite) if A has non-finite entries.
SpectrumReport spectrum_check(const Eigen::MatrixXd& a);

// The two scalars the density-flow relation contributes: the density cap and
// the outflow cap. Both strictly positive.
struct FundamentalDiagram {
  double rho_max = 0.0;
  double z_max = 0.0;
};

// Largest admissible outflow probability z_max / rho_max, clamped to (0, 1].
// Throws ValidationError when the diagram is not strictly positive.
double feasible_outflow_bound(const FundamentalDiagram& fd);

struct DensityViolation {
  int node = 0;    // 1-based road index
  int step = 0;    // grid point
  double value = 0.0;
};

// Scans a density trajectory (rows = grid points, columns = interior roads in
// state order) for entries above the density cap. Empty result means the
// trajectory is feasible.
std::vector<DensityViolation> check_density_constraint(const Eigen::MatrixXd& x,
                                                       const NoirGraph& graph,
                                                       const FundamentalDiagram& fd);

}  // namespace noir
