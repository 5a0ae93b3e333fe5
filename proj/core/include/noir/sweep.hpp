#pragma once

#include <vector>

#include <Eigen/Dense>

#include "noir/dynamics.hpp"
#include "noir/graph.hpp"
#include "noir/routing.hpp"
#include "noir/transition.hpp"

namespace noir {

// Objective weights and horizon for the boundary-inflow optimization
//   minimize 1/2 integral( x^T diag(r) x + u^T diag(w) u ) dt
// with the net inflow pinned to u0 at every instant.
struct CostSpec {
  Eigen::VectorXd r;  // per interior road, >= 0
  Eigen::VectorXd w;  // per inlet, > 0
  double u0 = 0.0;
  TimeGrid grid;
};

struct IterationRecord {
  int iteration = 0;
  double delta_u = 0.0;             // max-norm change of u vs the previous iterate
  double cost = 0.0;                // objective value of this iterate
  double lambda_tf_residual = 0.0;  // max-norm of the stored co-state at tf
};

struct SweepOptions {
  int iterations = 15;  // outer sweep count
  // Stop once delta_u falls below early_exit_tol. Off by default so the
  // requested iteration count is always honored.
  bool early_exit = false;
  double early_exit_tol = 1e-10;
  // Blend factor on the previous control iterate; 0 replaces it wholesale.
  double damping = 0.0;
  // Worker threads for the per-grid-point allocation solves. Results are
  // assembled in grid order, so the trajectory is identical for any value.
  int threads = 1;
  // Run even when the connectivity check fails (the stability guarantee is
  // void in that case).
  bool allow_unverified_connectivity = false;
  ConnectivityMode connectivity_mode = ConnectivityMode::every_inlet;
};

// Full solution state: trajectories over the grid (one row per grid point)
// plus per-iteration convergence diagnostics.
struct SweepState {
  Eigen::MatrixXd x;       // interior densities
  Eigen::MatrixXd lambda;  // co-states; final row is exactly zero
  Eigen::MatrixXd u;       // inlet inflows; every row on the budget simplex
  Eigen::VectorXd lambda0;
  std::vector<IterationRecord> iterations;
};

// Control Hamiltonian 1/2 (x^T R x + u^T W u) + lambda^T (A x + B u).
double hamiltonian(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& lambda, const CostSpec& spec,
                   const LtiTraffic& lti);

// Initial co-state of the two-point boundary value problem by single
// shooting over the whole horizon: lambda0 = -phi22^{-1} (phi21 x0 + psi2)
// with the transition blocks and forced response taken at tf. Exact for the
// grid discretization up to the conditioning of phi22, which grows
// exponentially with the horizon; throws SingularTransitionError when the
// solve is beyond double precision.
Eigen::VectorXd solve_initial_costate(const AugmentedSystem& sys,
                                      const Eigen::VectorXd& x0,
                                      const Eigen::MatrixXd& u, const TimeGrid& grid);

// Forward-backward sweep: each outer iteration allocates the inflow budget
// per grid point against the current co-state (f = B^T lambda), then
// propagates densities forward from x0 and co-states backward from the zero
// terminal condition. The backward substitution solves the same linear
// two-point system as single shooting but stays well conditioned on long
// horizons, and pins lambda(tf) = 0 exactly.
SweepState run_sweep(const NoirGraph& graph, const RoutingModel& routing,
                     const CostSpec& spec, const Eigen::VectorXd& x0,
                     const SweepOptions& options = {});

// Trapezoidal value of the objective for stored trajectories.
double total_cost(const SweepState& state, const CostSpec& spec);

// Aggregate outflow that leaves the network through outlets, per grid point:
// sum_i p_i x_i(t) (outlet fraction of road i).
Eigen::VectorXd net_outlet_outflow(const SweepState& state, const RoutingModel& routing,
                                   const NoirGraph& graph);

struct ZetaSweepRow {
  double zeta = 0.0;
  double max_abs_lambda0 = 0.0;
};

// Re-runs the sweep with the density weights set to zeta * ones for each
// entry of `zetas` and reports the largest initial co-state magnitude.
std::vector<ZetaSweepRow> run_zeta_sweep(const NoirGraph& graph,
                                         const RoutingModel& routing,
                                         const CostSpec& base, const Eigen::VectorXd& x0,
                                         const std::vector<double>& zetas,
                                         const SweepOptions& options = {});

}  // namespace noir
