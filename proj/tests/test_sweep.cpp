#include <doctest.h>

#include <chrono>
#include <cmath>

#include "noir/scenario.hpp"
#include "noir/sweep.hpp"
#include "noir/trajectory_io.hpp"
#include "oracles.hpp"

using noir::AugmentedSystem;
using noir::CostSpec;
using noir::LtiTraffic;
using noir::NoirGraph;
using noir::RoutingModel;
using noir::SweepOptions;
using noir::SweepState;
using noir::TimeGrid;

namespace {

struct Fixture {
  noir::Scenario scenario;
  NoirGraph graph;
  RoutingModel routing;
  CostSpec spec;

  explicit Fixture(const std::string& name)
      : scenario(noir::load_scenario(std::string(NOIR_SCENARIO_DIR) + "/" + name)),
        graph(build_graph(scenario)),
        routing(build_routing_model(scenario, graph)),
        spec(build_cost_spec(scenario)) {}
};

}  // namespace

TEST_CASE("hamiltonian closed forms") {
  Fixture f("chain-minimal.scenario");
  const LtiTraffic lti = assemble_lti(f.routing, f.graph);

  const Eigen::VectorXd zero1 = Eigen::VectorXd::Zero(1);
  CHECK(hamiltonian(zero1, zero1, zero1, f.spec, lti) == 0.0);

  Eigen::VectorXd x(1), u(1), lambda(1);
  x << 3.0;
  u << 2.0;
  lambda << 0.0;
  const double running = 0.5 * (f.spec.r(0) * 9.0 + f.spec.w(0) * 4.0);
  CHECK(hamiltonian(x, u, lambda, f.spec, lti) == doctest::Approx(running));

  CHECK_THROWS_AS(hamiltonian(Eigen::VectorXd::Zero(2), u, lambda, f.spec, lti),
                  noir::Error);
}

TEST_CASE("hamiltonian matches a term-by-term evaluation on random instances") {
  Fixture f("fig3.scenario");
  const LtiTraffic lti = assemble_lti(f.routing, f.graph);
  const int dim = f.graph.interior_count();
  const int inlets = f.graph.inlet_count();

  oracles::Rng rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    Eigen::VectorXd x(dim), lambda(dim), u(inlets);
    for (int i = 0; i < dim; ++i) {
      x(i) = rng.uniform(0.0, 15.0);
      lambda(i) = rng.uniform(-5.0, 5.0);
    }
    for (int j = 0; j < inlets; ++j) u(j) = rng.uniform(0.0, 8.0);

    double direct = 0.0;
    for (int i = 0; i < dim; ++i) direct += 0.5 * f.spec.r(i) * x(i) * x(i);
    for (int j = 0; j < inlets; ++j) direct += 0.5 * f.spec.w(j) * u(j) * u(j);
    for (int i = 0; i < dim; ++i) {
      double rate = 0.0;
      for (int j = 0; j < dim; ++j) rate += lti.A(i, j) * x(j);
      for (int j = 0; j < inlets; ++j) rate += lti.B(i, j) * u(j);
      direct += lambda(i) * rate;
    }
    CHECK(hamiltonian(x, u, lambda, f.spec, lti) ==
          doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("initial co-state vanishes without a density weight") {
  Eigen::MatrixXd a(2, 2);
  a << -1.0, 0.3, 0.1, -0.7;
  const AugmentedSystem sys =
      AugmentedSystem::build(a, Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Ones(2, 1));
  const TimeGrid grid(0.0, 5.0, 100);
  Eigen::MatrixXd u = Eigen::MatrixXd::Ones(grid.points(), 1) * 1.7;
  Eigen::VectorXd x0(2);
  x0 << 4.0, 2.0;
  const Eigen::VectorXd lambda0 = solve_initial_costate(sys, x0, u, grid);
  CHECK(lambda0 == Eigen::VectorXd::Zero(2));
}

TEST_CASE("initial co-state reproduces the scalar closed form") {
  Eigen::MatrixXd a(1, 1), r(1, 1), b(1, 1);
  a << -1.0;
  r << 1.0;
  b << 1.0;
  const AugmentedSystem sys = AugmentedSystem::build(a, r, b);
  const TimeGrid grid(0.0, 1.0, 2000);
  const Eigen::MatrixXd quiet = Eigen::MatrixXd::Zero(grid.points(), 1);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(1);

  const Eigen::VectorXd lambda0 = solve_initial_costate(sys, x0, quiet, grid);
  const double exact = oracles::scalar_initial_costate(1.0, 1.0, 1.0, 0.0, 1.0);
  CHECK(std::abs(lambda0(0) - exact) <= 1e-8);

  // shooting consistency: the propagated co-state hits zero at the horizon
  Eigen::VectorXd s0(2);
  s0 << x0(0), lambda0(0);
  const Eigen::MatrixXd traj = propagate(sys, s0, quiet, grid);
  CHECK(std::abs(traj(grid.steps, 1)) <= 1e-8);
}

TEST_CASE("first iteration allocates on the control weights alone") {
  Fixture f("fig3.scenario");
  CostSpec spec = f.spec;
  spec.w = Eigen::Vector4d(1.0, 2.0, 4.0, 8.0);
  spec.grid = TimeGrid(0.0, 2.0, 50);

  SweepOptions options;
  options.iterations = 1;
  const SweepState state = run_sweep(f.graph, f.routing, spec, f.scenario.x0, options);

  const double harmonic = (1.0 / 1.0 + 1.0 / 2.0 + 1.0 / 4.0 + 1.0 / 8.0);
  for (int k = 0; k < spec.grid.points(); ++k) {
    for (int j = 0; j < 4; ++j) {
      CHECK(state.u(k, j) ==
            doctest::Approx(spec.u0 / (spec.w(j) * harmonic)).epsilon(1e-13));
    }
  }
}

TEST_CASE("sweep state honors every stored invariant on the fixture") {
  Fixture f("fig3.scenario");
  const SweepState state =
      run_sweep(f.graph, f.routing, f.spec, f.scenario.x0,
                SweepOptions{.iterations = f.scenario.iterations});
  const int n = f.spec.grid.steps;
  const double dt = f.spec.grid.dt();

  REQUIRE(state.x.rows() == n + 1);
  REQUIRE(state.iterations.size() == static_cast<std::size_t>(f.scenario.iterations));

  // terminal boundary condition, exactly
  CHECK(state.lambda.row(n).cwiseAbs().maxCoeff() == 0.0);
  for (const noir::IterationRecord& record : state.iterations) {
    CHECK(record.lambda_tf_residual <= 1e-8);
  }

  // initial condition row
  CHECK((state.x.row(0).transpose() - f.scenario.x0).cwiseAbs().maxCoeff() == 0.0);

  // simplex constraints at every grid point
  for (int k = 0; k <= n; ++k) {
    CHECK(state.u.row(k).minCoeff() >= 0.0);
    CHECK(std::abs(state.u.row(k).sum() - f.spec.u0) <= 1e-12);
  }

  // positive system
  CHECK(state.x.minCoeff() >= -1e-9);

  // feasibility cap holds along the whole computed trajectory
  CHECK(check_density_constraint(state.x, f.graph, f.scenario.fd).empty());

  // the stored densities satisfy the differential equation to first order
  const LtiTraffic lti = assemble_lti(f.routing, f.graph);
  double worst_residual = 0.0;
  for (int k = 1; k < n; ++k) {
    const Eigen::VectorXd derivative =
        (state.x.row(k + 1) - state.x.row(k - 1)).transpose() / (2.0 * dt);
    const Eigen::VectorXd model = lti.A * state.x.row(k).transpose() +
                                  lti.B * state.u.row(k).transpose();
    worst_residual = std::max(worst_residual, (derivative - model).cwiseAbs().maxCoeff());
  }
  CHECK(worst_residual <= dt);

  // mass ledger: d/dt(total density) = inflow - outlet outflow
  const Eigen::VectorXd z_net = net_outlet_outflow(state, f.routing, f.graph);
  double worst_ledger = 0.0;
  for (int k = 1; k < n; ++k) {
    const double derivative = (state.x.row(k + 1).sum() - state.x.row(k - 1).sum()) /
                              (2.0 * dt);
    const double balance = state.u.row(k).sum() - z_net(k);
    worst_ledger = std::max(worst_ledger, std::abs(derivative - balance));
  }
  CHECK(worst_ledger <= 0.1);

  // once the control settles it stays settled
  std::size_t settled = state.iterations.size();
  for (std::size_t k = 0; k < state.iterations.size(); ++k) {
    if (state.iterations[k].delta_u <= 1e-10) {
      settled = k;
      break;
    }
  }
  for (std::size_t k = settled + 1; k < state.iterations.size(); ++k) {
    CHECK(state.iterations[k].delta_u <= 1e-9);
  }

  // the objective should not rise once the iteration is past its first swap
  for (std::size_t k = 2; k < state.iterations.size(); ++k) {
    CHECK(state.iterations[k].cost <= state.iterations[k - 1].cost + 1e-9);
  }
}

TEST_CASE("identical runs produce identical trajectories") {
  Fixture f("fig3.scenario");
  SweepOptions options;
  options.iterations = 6;
  const SweepState a = run_sweep(f.graph, f.routing, f.spec, f.scenario.x0, options);
  const SweepState b = run_sweep(f.graph, f.routing, f.spec, f.scenario.x0, options);
  CHECK(a.x == b.x);
  CHECK(a.lambda == b.lambda);
  CHECK(a.u == b.u);

  options.threads = 3;
  const SweepState c = run_sweep(f.graph, f.routing, f.spec, f.scenario.x0, options);
  CHECK(a.x == c.x);
  CHECK(a.u == c.u);
}

TEST_CASE("early exit stops after convergence without changing the answer") {
  Fixture f("fig3.scenario");
  SweepOptions full;
  full.iterations = 15;
  const SweepState reference = run_sweep(f.graph, f.routing, f.spec, f.scenario.x0, full);

  SweepOptions early = full;
  early.early_exit = true;
  const SweepState stopped = run_sweep(f.graph, f.routing, f.spec, f.scenario.x0, early);
  CHECK(stopped.iterations.size() < reference.iterations.size());
  CHECK(stopped.iterations.back().delta_u < 1e-10);
  CHECK((stopped.u - reference.u).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("damping reaches the same fixed point") {
  Fixture f("fig3.scenario");
  SweepOptions plain;
  plain.iterations = 15;
  SweepOptions damped = plain;
  damped.damping = 0.5;
  damped.iterations = 40;
  const SweepState a = run_sweep(f.graph, f.routing, f.spec, f.scenario.x0, plain);
  const SweepState b = run_sweep(f.graph, f.routing, f.spec, f.scenario.x0, damped);
  CHECK((a.u - b.u).cwiseAbs().maxCoeff() <= 1e-6);
  for (int k = 0; k <= f.spec.grid.steps; ++k) {
    CHECK(std::abs(b.u.row(k).sum() - f.spec.u0) <= 1e-12);
  }
}

TEST_CASE("disconnected networks are refused unless overridden") {
  Fixture f("fig1-mini.scenario");
  CostSpec spec = f.spec;
  spec.grid = TimeGrid(0.0, 2.0, 50);
  SweepOptions options;
  options.iterations = 2;

  try {
    run_sweep(f.graph, f.routing, spec, f.scenario.x0, options);
    FAIL("expected a connectivity refusal");
  } catch (const noir::Error& error) {
    CHECK(error.code() == noir::Errc::connectivity_refused);
  }

  options.allow_unverified_connectivity = true;
  CHECK_NOTHROW(run_sweep(f.graph, f.routing, spec, f.scenario.x0, options));
}

TEST_CASE("cost of constant trajectories is the rectangle value") {
  Fixture f("chain-minimal.scenario");
  CostSpec spec = f.spec;
  spec.grid = TimeGrid(0.0, 8.0, 100);

  SweepState state;
  state.x = Eigen::MatrixXd::Constant(101, 1, 3.0);
  state.u = Eigen::MatrixXd::Constant(101, 1, 2.0);
  state.lambda = Eigen::MatrixXd::Zero(101, 1);

  const double expected = 0.5 * 8.0 * (spec.r(0) * 9.0 + spec.w(0) * 4.0);
  CHECK(total_cost(state, spec) == doctest::Approx(expected).epsilon(1e-12));

  state.x.setZero();
  state.u.setZero();
  CHECK(total_cost(state, spec) == 0.0);
}

TEST_CASE("net outflow of an equilibrium chain equals the inflow") {
  Fixture f("chain-minimal.scenario");
  SweepState state;
  const double equilibrium = f.scenario.u0 / f.routing.outflow_probability(3);
  state.x = Eigen::MatrixXd::Constant(f.spec.grid.points(), 1, equilibrium);
  state.u = Eigen::MatrixXd::Constant(f.spec.grid.points(), 1, f.scenario.u0);
  state.lambda = Eigen::MatrixXd::Zero(f.spec.grid.points(), 1);

  const Eigen::VectorXd z = net_outlet_outflow(state, f.routing, f.graph);
  CHECK(z.minCoeff() == doctest::Approx(f.scenario.u0).epsilon(1e-12));
  CHECK(z.maxCoeff() == doctest::Approx(f.scenario.u0).epsilon(1e-12));

  state.x.setZero();
  CHECK(net_outlet_outflow(state, f.routing, f.graph).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("running sweep reproduces the terminal equilibrium on the chain") {
  Fixture f("chain-minimal.scenario");
  const SweepState state =
      run_sweep(f.graph, f.routing, f.spec, f.scenario.x0,
                SweepOptions{.iterations = f.scenario.iterations});
  const Eigen::VectorXd z = net_outlet_outflow(state, f.routing, f.graph);
  // tf = 10 is five time constants at p = 0.5
  CHECK(std::abs(z(f.spec.grid.steps) - f.scenario.u0) <= 0.01 * f.scenario.u0);
}

TEST_CASE("zeta zero gives a zero co-state") {
  Fixture f("chain-minimal.scenario");
  const auto rows =
      run_zeta_sweep(f.graph, f.routing, f.spec, f.scenario.x0, {0.0},
                     SweepOptions{.iterations = 3});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].zeta == 0.0);
  CHECK(rows[0].max_abs_lambda0 == 0.0);
}

TEST_CASE("scalar zeta sweep matches the closed form and scales linearly") {
  Fixture f("scalar-bench.scenario");
  const auto rows = run_zeta_sweep(f.graph, f.routing, f.spec, f.scenario.x0,
                                   f.scenario.zetas,
                                   SweepOptions{.iterations = f.scenario.iterations});
  REQUIRE(rows.size() == 4);
  const double p = f.routing.outflow_probability(3);
  for (const noir::ZetaSweepRow& row : rows) {
    // single inlet: u is pinned to u0, so the co-state is linear in zeta
    const double exact = oracles::scalar_initial_costate(p, row.zeta, f.scenario.x0(0),
                                                         f.scenario.u0, f.scenario.tf);
    CHECK(std::abs(row.max_abs_lambda0 - exact) <= 1e-6);
  }
  CHECK(rows[1].max_abs_lambda0 / rows[0].max_abs_lambda0 ==
        doctest::Approx(2.0).epsilon(1e-9));
  CHECK(rows[3].max_abs_lambda0 / rows[2].max_abs_lambda0 ==
        doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("fixture zeta sweep is nondecreasing") {
  Fixture f("fig3.scenario");
  const auto rows = run_zeta_sweep(f.graph, f.routing, f.spec, f.scenario.x0,
                                   f.scenario.zetas,
                                   SweepOptions{.iterations = f.scenario.iterations});
  REQUIRE(rows.size() == f.scenario.zetas.size());
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(rows[k].max_abs_lambda0 >= rows[k - 1].max_abs_lambda0);
  }
}

TEST_CASE("sweep input validation") {
  Fixture f("chain-minimal.scenario");
  CostSpec bad = f.spec;
  bad.w = Eigen::VectorXd::Zero(1);
  CHECK_THROWS_AS(run_sweep(f.graph, f.routing, bad, f.scenario.x0, {}),
                  noir::ValidationError);

  CHECK_THROWS_AS(
      run_sweep(f.graph, f.routing, f.spec, Eigen::VectorXd::Constant(1, -1.0), {}),
      noir::Error);
  CHECK_THROWS_AS(run_sweep(f.graph, f.routing, f.spec, Eigen::VectorXd::Zero(2), {}),
                  noir::Error);

  SweepOptions options;
  options.iterations = 0;
  CHECK_THROWS_AS(run_sweep(f.graph, f.routing, f.spec, f.scenario.x0, options),
                  noir::Error);
  options.iterations = 1;
  options.damping = 1.0;
  CHECK_THROWS_AS(run_sweep(f.graph, f.routing, f.spec, f.scenario.x0, options),
                  noir::Error);
}
