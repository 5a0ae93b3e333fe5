#include "noir/sweep.hpp"

#include <cmath>
#include <sstream>
#include <thread>
#include <vector>

#include "noir/inlet_qp.hpp"

namespace noir {

namespace {

void check_cost_spec(const CostSpec& spec, const NoirGraph& graph) {
  std::vector<Issue> issues;
  if (spec.r.size() != graph.interior_count()) {
    issues.push_back({Errc::dimension_mismatch, 0, static_cast<double>(spec.r.size()),
                      "density weight vector does not match the interior count"});
  } else if ((spec.r.array() < 0.0).any()) {
    issues.push_back({Errc::validation_error, 0, spec.r.minCoeff(),
                      "density weights must be nonnegative"});
  }
  if (spec.w.size() != graph.inlet_count()) {
    issues.push_back({Errc::dimension_mismatch, 0, static_cast<double>(spec.w.size()),
                      "control weight vector does not match the inlet count"});
  } else if ((spec.w.array() <= 0.0).any()) {
    issues.push_back({Errc::validation_error, 0, spec.w.minCoeff(),
                      "control weights must be strictly positive"});
  }
  if (!(spec.u0 > 0.0)) {
    issues.push_back({Errc::validation_error, 0, spec.u0,
                      "net inflow must be strictly positive"});
  }
  if (!issues.empty()) throw ValidationError("cost", issues);
}

// Budget allocation at every grid point against the current co-state.
void allocate_controls(const Eigen::MatrixXd& lambda, const Eigen::MatrixXd& b,
                       const CostSpec& spec, int threads, Eigen::MatrixXd& u) {
  const int rows = static_cast<int>(lambda.rows());
  auto solve_range = [&](int begin, int end) {
    for (int j = begin; j < end; ++j) {
      const InletQp qp{spec.w, b.transpose() * lambda.row(j).transpose(), spec.u0};
      u.row(j) = solve_inlet_qp(qp).transpose();
    }
  };

  if (threads <= 1 || rows < 2 * threads) {
    solve_range(0, rows);
    return;
  }
  std::vector<std::thread> workers;
  const int chunk = (rows + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(rows, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back(solve_range, begin, end);
  }
  for (std::thread& worker : workers) worker.join();
}

double trapezoid_weight(int k, int steps) { return (k == 0 || k == steps) ? 0.5 : 1.0; }

}  // namespace

double hamiltonian(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& lambda, const CostSpec& spec,
                   const LtiTraffic& lti) {
  if (x.size() != lti.A.rows() || lambda.size() != lti.A.rows() ||
      u.size() != lti.B.cols() || spec.r.size() != x.size() ||
      spec.w.size() != u.size()) {
    throw Error(Errc::dimension_mismatch, "hamiltonian operand sizes disagree");
  }
  const double running = 0.5 * (x.dot(spec.r.cwiseProduct(x)) + u.dot(spec.w.cwiseProduct(u)));
  return running + lambda.dot(lti.A * x + lti.B * u);
}

Eigen::VectorXd solve_initial_costate(const AugmentedSystem& sys,
                                      const Eigen::VectorXd& x0,
                                      const Eigen::MatrixXd& u, const TimeGrid& grid) {
  const int dim = sys.state_dim;
  if (x0.size() != dim) {
    throw Error(Errc::dimension_mismatch, "initial state does not match the system");
  }
  if (!x0.allFinite() || !u.allFinite()) {
    throw Error(Errc::non_finite, "shooting inputs must be finite");
  }

  const TransitionBlocks blocks = transition_blocks(sys, grid.tf - grid.t0);
  const Eigen::VectorXd psi2 =
      forced_response(sys, u, grid, grid.steps).tail(dim);

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(blocks.phi22);
  const Eigen::MatrixXd inverse = lu.inverse();
  const double cond = blocks.phi22.cwiseAbs().colwise().sum().maxCoeff() *
                      inverse.cwiseAbs().colwise().sum().maxCoeff();
  if (!inverse.allFinite() || cond > 1e16) {
    throw SingularTransitionError(cond);
  }

  const Eigen::VectorXd rhs = -(blocks.phi21 * x0 + psi2);
  Eigen::VectorXd lambda0 = lu.solve(rhs);
  lambda0 += lu.solve(rhs - blocks.phi22 * lambda0);  // one refinement pass
  if (!lambda0.allFinite()) {
    throw Error(Errc::non_finite, "initial co-state solve produced non-finite values");
  }
  return lambda0;
}

SweepState run_sweep(const NoirGraph& graph, const RoutingModel& routing,
                     const CostSpec& spec, const Eigen::VectorXd& x0,
                     const SweepOptions& options) {
  check_cost_spec(spec, graph);
  const int dim = graph.interior_count();
  if (x0.size() != dim) {
    throw Error(Errc::dimension_mismatch, "initial state does not match the interior count");
  }
  if (!x0.allFinite() || (x0.array() < 0.0).any()) {
    throw Error(Errc::validation_error, "initial densities must be finite and nonnegative");
  }
  if (options.iterations < 1) {
    throw Error(Errc::validation_error, "sweep needs at least one iteration");
  }
  if (options.damping < 0.0 || options.damping >= 1.0) {
    throw Error(Errc::validation_error, "damping must lie in [0, 1)");
  }

  if (!options.allow_unverified_connectivity) {
    const ConnectivityReport report = check_connectivity(graph, options.connectivity_mode);
    if (!report.satisfied()) {
      std::ostringstream msg;
      msg << "network fails the connectivity conditions for stability";
      if (!report.inlet_gaps.empty()) {
        msg << "; e.g. no path from inlet " << report.inlet_gaps.front().from
            << " to road " << report.inlet_gaps.front().to;
      }
      if (!report.outlet_gaps.empty()) {
        msg << "; e.g. no path from road " << report.outlet_gaps.front().from
            << " to outlet " << report.outlet_gaps.front().to;
      }
      msg << " (rerun with the override to proceed)";
      throw Error(Errc::connectivity_refused, msg.str());
    }
  }

  const LtiTraffic lti = assemble_lti(routing, graph);
  const Eigen::MatrixXd r_matrix = spec.r.asDiagonal();
  const AugmentedSystem sys = AugmentedSystem::build(lti.A, r_matrix, lti.B);

  const TimeGrid& grid = spec.grid;
  const double dt = grid.dt();
  const int points = grid.points();

  // One-step transition blocks; the augmented matrix is block lower
  // triangular so phi11 = exp(A dt) and phi22 = exp(-A^T dt).
  const TransitionBlocks step = transition_blocks(sys, dt);
  const Eigen::PartialPivLU<Eigen::MatrixXd> phi22_lu(step.phi22);
  const Eigen::MatrixXd forced_old = 0.5 * dt * (step.phi11 * lti.B);
  const Eigen::MatrixXd forced_new = 0.5 * dt * lti.B;
  const Eigen::MatrixXd forced_costate = 0.5 * dt * lti.B;  // enters via phi21

  SweepState state;
  state.x = x0.transpose().replicate(points, 1);
  state.lambda = Eigen::MatrixXd::Zero(points, dim);
  state.u = Eigen::MatrixXd::Zero(points, graph.inlet_count());

  Eigen::MatrixXd u_next = Eigen::MatrixXd::Zero(points, graph.inlet_count());

  for (int iteration = 1; iteration <= options.iterations; ++iteration) {
    allocate_controls(state.lambda, lti.B, spec, options.threads, u_next);
    if (options.damping > 0.0 && iteration > 1) {
      u_next = (1.0 - options.damping) * u_next + options.damping * state.u;
    }

    const double delta_u = (u_next - state.u).cwiseAbs().maxCoeff();
    state.u.swap(u_next);

    // Densities forward from x0.
    Eigen::VectorXd x = x0;
    state.x.row(0) = x.transpose();
    for (int k = 0; k < grid.steps; ++k) {
      x = step.phi11 * x + forced_old * state.u.row(k).transpose() +
          forced_new * state.u.row(k + 1).transpose();
      state.x.row(k + 1) = x.transpose();
    }

    // Co-states backward from the zero terminal condition. This inverts the
    // one-step augmented recursion
    //   lambda_{k+1} = phi21 x_k + phi22 lambda_k + dt/2 phi21 B u_k
    // exactly, so the terminal condition holds by construction and the
    // substitution is stable in the decaying direction.
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(dim);
    state.lambda.row(grid.steps).setZero();
    for (int k = grid.steps - 1; k >= 0; --k) {
      const Eigen::VectorXd xu =
          state.x.row(k).transpose() + forced_costate * state.u.row(k).transpose();
      lambda = phi22_lu.solve(lambda - step.phi21 * xu);
      state.lambda.row(k) = lambda.transpose();
    }

    if (!state.x.allFinite() || !state.lambda.allFinite()) {
      throw Error(Errc::non_finite, "sweep produced non-finite trajectories");
    }

    IterationRecord record;
    record.iteration = iteration;
    record.delta_u = delta_u;
    record.cost = total_cost(state, spec);
    record.lambda_tf_residual = state.lambda.row(grid.steps).cwiseAbs().maxCoeff();
    state.iterations.push_back(record);

    if (options.early_exit && delta_u < options.early_exit_tol) break;
  }

  state.lambda0 = state.lambda.row(0).transpose();
  return state;
}

double total_cost(const SweepState& state, const CostSpec& spec) {
  const int steps = spec.grid.steps;
  if (state.x.rows() != steps + 1 || state.u.rows() != steps + 1) {
    throw Error(Errc::dimension_mismatch, "trajectories do not cover the grid");
  }
  double sum = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const Eigen::VectorXd xk = state.x.row(k);
    const Eigen::VectorXd uk = state.u.row(k);
    const double integrand = xk.dot(spec.r.cwiseProduct(xk)) + uk.dot(spec.w.cwiseProduct(uk));
    sum += trapezoid_weight(k, steps) * integrand;
  }
  return 0.5 * sum * spec.grid.dt();
}

Eigen::VectorXd net_outlet_outflow(const SweepState& state, const RoutingModel& routing,
                                   const NoirGraph& graph) {
  const Eigen::VectorXd rates = outflow_rates(routing, graph);
  const Eigen::VectorXd fractions = outlet_fractions(routing, graph);
  const Eigen::VectorXd weights = rates.cwiseProduct(fractions);
  return state.x * weights;
}

std::vector<ZetaSweepRow> run_zeta_sweep(const NoirGraph& graph,
                                         const RoutingModel& routing,
                                         const CostSpec& base, const Eigen::VectorXd& x0,
                                         const std::vector<double>& zetas,
                                         const SweepOptions& options) {
  if (zetas.empty()) {
    throw Error(Errc::validation_error, "zeta sweep needs at least one value");
  }
  std::vector<ZetaSweepRow> rows;
  rows.reserve(zetas.size());
  for (double zeta : zetas) {
    if (!(zeta >= 0.0) || !std::isfinite(zeta)) {
      throw Error(Errc::validation_error, "zeta values must be finite and nonnegative");
    }
    CostSpec spec = base;
    spec.r = Eigen::VectorXd::Constant(graph.interior_count(), zeta);
    const SweepState state = run_sweep(graph, routing, spec, x0, options);
    rows.push_back({zeta, state.lambda0.cwiseAbs().maxCoeff()});
  }
  return rows;
}

}  // namespace noir
