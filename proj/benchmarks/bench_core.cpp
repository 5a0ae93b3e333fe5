#include <benchmark/benchmark.h>

#include "noir/dynamics.hpp"
#include "noir/inlet_qp.hpp"
#include "noir/scenario.hpp"
#include "noir/sweep.hpp"
#include "noir/transition.hpp"

namespace {

struct Fixture {
  noir::Scenario scenario;
  noir::NoirGraph graph;
  noir::RoutingModel routing;
  noir::CostSpec spec;

  Fixture()
      : scenario(noir::load_scenario(std::string(NOIR_SCENARIO_DIR) + "/fig3.scenario")),
        graph(build_graph(scenario)),
        routing(build_routing_model(scenario, graph)),
        spec(build_cost_spec(scenario)) {}
};

const Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_Expm(benchmark::State& state) {
  const auto& f = fixture();
  const noir::LtiTraffic lti = assemble_lti(f.routing, f.graph);
  const noir::AugmentedSystem sys = noir::AugmentedSystem::build(
      lti.A, Eigen::MatrixXd(f.spec.r.asDiagonal()), lti.B);
  const Eigen::MatrixXd scaled = sys.a_sys * f.spec.grid.dt();
  for (auto _ : state) {
    benchmark::DoNotOptimize(noir::expm(scaled));
  }
}
BENCHMARK(BM_Expm);

void BM_InletQp(benchmark::State& state) {
  noir::InletQp qp;
  qp.w = Eigen::Vector4d(1.0, 2.0, 0.5, 1.5);
  qp.f = Eigen::Vector4d(0.3, -0.2, 0.1, 0.4);
  qp.budget = 20.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_inlet_qp(qp));
  }
}
BENCHMARK(BM_InletQp);

void BM_Propagate(benchmark::State& state) {
  const auto& f = fixture();
  const noir::LtiTraffic lti = assemble_lti(f.routing, f.graph);
  const noir::AugmentedSystem sys = noir::AugmentedSystem::build(
      lti.A, Eigen::MatrixXd(f.spec.r.asDiagonal()), lti.B);
  const Eigen::MatrixXd u =
      Eigen::MatrixXd::Constant(f.spec.grid.points(), f.graph.inlet_count(), 5.0);
  Eigen::VectorXd s0 = Eigen::VectorXd::Zero(2 * f.graph.interior_count());
  s0.head(f.graph.interior_count()) = f.scenario.x0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagate(sys, s0, u, f.spec.grid));
  }
}
BENCHMARK(BM_Propagate);

void BM_SweepIteration(benchmark::State& state) {
  const auto& f = fixture();
  noir::SweepOptions options;
  options.iterations = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_sweep(f.graph, f.routing, f.spec, f.scenario.x0, options));
  }
}
BENCHMARK(BM_SweepIteration);

void BM_FullSweep(benchmark::State& state) {
  const auto& f = fixture();
  noir::SweepOptions options;
  options.iterations = f.scenario.iterations;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_sweep(f.graph, f.routing, f.spec, f.scenario.x0, options));
  }
}
BENCHMARK(BM_FullSweep);

void BM_SpectrumCheck(benchmark::State& state) {
  const auto& f = fixture();
  const Eigen::MatrixXd a = state_matrix(f.routing, f.graph);
  for (auto _ : state) {
    benchmark::DoNotOptimize(noir::spectrum_check(a));
  }
}
BENCHMARK(BM_SpectrumCheck);

}  // namespace

BENCHMARK_MAIN();
