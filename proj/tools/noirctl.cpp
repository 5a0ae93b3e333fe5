// noirctl: validate, optimize, and inspect road-network inflow scenarios.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "noir/dynamics.hpp"
#include "noir/graph.hpp"
#include "noir/routing.hpp"
#include "noir/scenario.hpp"
#include "noir/sweep.hpp"
#include "noir/trajectory_io.hpp"

namespace {

namespace fs = std::filesystem;

// Exit codes, also documented in the README:
//   0 success / all checks passed
//   2 scenario parse error
//   3 scenario validation error
//   4 checks failed (validate/spectrum) or connectivity refused
//   5 numerical failure
//   6 file i/o error
// Argument mistakes exit with the parser's own codes (>= 100).
constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitValidation = 3;
constexpr int kExitChecksFailed = 4;
constexpr int kExitNumerical = 5;
constexpr int kExitIo = 6;

int exit_code_for(const noir::Error& error) {
  switch (error.code()) {
    case noir::Errc::parse_error:
      return kExitParse;
    case noir::Errc::validation_error:
      return kExitValidation;
    case noir::Errc::connectivity_refused:
      return kExitChecksFailed;
    case noir::Errc::non_finite:
    case noir::Errc::singular_transition:
      return kExitNumerical;
    case noir::Errc::io_error:
      return kExitIo;
    default:
      return kExitValidation;
  }
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw noir::Error(noir::Errc::io_error, "cannot write " + path.string());
  out << contents;
  if (!out) throw noir::Error(noir::Errc::io_error, "short write to " + path.string());
}

struct CommonArgs {
  std::string scenario_path;
  std::string output_dir = ".";
  bool any_inlet_mode = false;
  bool force = false;
  bool early_exit = false;
  bool plots = false;
  bool costate = false;
  int threads = 1;
};

noir::ConnectivityMode mode_of(const CommonArgs& args) {
  return args.any_inlet_mode ? noir::ConnectivityMode::any_inlet
                             : noir::ConnectivityMode::every_inlet;
}

int run_validate(const CommonArgs& args) {
  const noir::Scenario scenario = noir::load_scenario(args.scenario_path);
  const noir::NoirGraph graph = noir::build_graph(scenario);
  const noir::RoutingModel routing = noir::build_routing_model(scenario, graph);

  std::cout << "graph: " << graph.node_count() << " roads (" << graph.inlet_count()
            << " inlets, " << graph.outlet_count() << " outlets, "
            << graph.interior_count() << " interior), " << graph.edges().size()
            << " edges — OK\n";
  std::cout << "routing: outflow and tendency maps validated — OK\n";

  bool all_ok = true;

  const noir::ConnectivityReport report = noir::check_connectivity(graph, mode_of(args));
  std::cout << "connectivity (" << (args.any_inlet_mode ? "any-inlet" : "every-inlet")
            << " mode): ";
  if (report.satisfied()) {
    std::cout << "both conditions hold — OK\n";
  } else {
    all_ok = false;
    std::cout << "FAILED\n";
    if (!report.inlets_reach_all_interior) {
      const auto& gap = report.inlet_gaps.front();
      std::cout << "  condition 1: road " << gap.to << " unreachable"
                << (gap.from ? " from inlet " + std::to_string(gap.from) : "")
                << " (" << report.inlet_gaps.size() << " gap(s))\n";
    }
    if (!report.interior_reaches_all_outlets) {
      const auto& gap = report.outlet_gaps.front();
      std::cout << "  condition 2: road " << gap.from << " cannot reach outlet "
                << gap.to << " (" << report.outlet_gaps.size() << " gap(s))\n";
    }
  }

  const double bound = noir::feasible_outflow_bound(scenario.fd);
  double worst = 0.0;
  int worst_node = 0;
  for (const auto& [node, value] : routing.p()) {
    if (value > worst) {
      worst = value;
      worst_node = node;
    }
  }
  std::cout << "outflow bound: max p = " << worst << " at road " << worst_node
            << ", cap z_max/rho_max = " << bound << " — "
            << (worst <= bound ? "OK" : "FAILED") << "\n";
  if (worst > bound) all_ok = false;

  const noir::SpectrumReport spectrum =
      noir::spectrum_check(noir::state_matrix(routing, graph));
  std::cout << "spectrum: max real part " << spectrum.max_real_part << ", "
            << (spectrum.hurwitz ? "hurwitz" : "NOT hurwitz") << ", "
            << (spectrum.inside_unit_disk ? "inside the unit disk at -1"
                                          : "OUTSIDE the unit disk at -1")
            << " — " << (spectrum.hurwitz && spectrum.inside_unit_disk ? "OK" : "FAILED")
            << "\n";
  if (!spectrum.hurwitz || !spectrum.inside_unit_disk) all_ok = false;

  return all_ok ? kExitOk : kExitChecksFailed;
}

int run_optimize(const CommonArgs& args) {
  const noir::Scenario scenario = noir::load_scenario(args.scenario_path);
  const noir::NoirGraph graph = noir::build_graph(scenario);
  const noir::RoutingModel routing = noir::build_routing_model(scenario, graph);
  const noir::CostSpec spec = noir::build_cost_spec(scenario);

  noir::SweepOptions options;
  options.iterations = scenario.iterations;
  options.early_exit = args.early_exit;
  options.threads = args.threads;
  options.allow_unverified_connectivity = args.force;
  options.connectivity_mode = mode_of(args);

  const noir::SweepState state = noir::run_sweep(graph, routing, spec, scenario.x0, options);

  fs::create_directories(args.output_dir);
  const fs::path out_dir(args.output_dir);

  {
    std::ostringstream csv;
    noir::write_trajectory_csv(csv, state, graph, routing, spec.grid,
                               noir::ExportOptions{args.costate});
    write_file(out_dir / "trajectory.csv", csv.str());
  }
  {
    std::ostringstream csv;
    noir::write_diagnostics_csv(csv, state.iterations);
    write_file(out_dir / "diagnostics.csv", csv.str());
  }

  Eigen::VectorXd time(spec.grid.points());
  for (int k = 0; k < spec.grid.points(); ++k) time(k) = spec.grid.time(k);

  if (args.plots) {
    std::vector<std::string> inflow_names;
    for (int j = 1; j <= graph.inlet_count(); ++j) {
      inflow_names.push_back("u_" + std::to_string(j));
    }
    std::ostringstream svg;
    noir::write_line_plot_svg(svg, "Optimal boundary inflows", "inflow rate",
                              inflow_names, time, state.u);
    write_file(out_dir / "inflows.svg", svg.str());

    const Eigen::VectorXd z_net = noir::net_outlet_outflow(state, routing, graph);
    std::ostringstream svg_z;
    noir::write_line_plot_svg(svg_z, "Net outlet outflow", "outflow rate", {"z_net"},
                              time, z_net);
    write_file(out_dir / "outflow.svg", svg_z.str());

    std::vector<std::string> density_names;
    for (int i = graph.first_interior(); i <= graph.node_count(); ++i) {
      density_names.push_back("x_" + std::to_string(i));
    }
    std::ostringstream svg_x;
    noir::write_line_plot_svg(svg_x, "Interior road densities", "density",
                              density_names, time, state.x);
    write_file(out_dir / "densities.svg", svg_x.str());
  }

  const noir::IterationRecord& last = state.iterations.back();
  const Eigen::VectorXd z_net = noir::net_outlet_outflow(state, routing, graph);
  std::cout << "iterations: " << last.iteration << " (delta_u " << last.delta_u
            << ")\ncost: " << last.cost << "\nnet outlet outflow at tf: "
            << z_net(spec.grid.steps) << " (budget " << spec.u0 << ")\n";
  std::cout << "inflows at tf:";
  for (Eigen::Index j = 0; j < state.u.cols(); ++j) {
    std::cout << ' ' << state.u(spec.grid.steps, j);
  }
  std::cout << "\n";

  const auto violations =
      noir::check_density_constraint(state.x, graph, scenario.fd);
  if (violations.empty()) {
    std::cout << "density cap: respected everywhere (rho_max " << scenario.fd.rho_max
              << ")\n";
  } else {
    std::cerr << "warning: " << violations.size()
              << " density-cap violations, first at road " << violations.front().node
              << " step " << violations.front().step << " (value "
              << violations.front().value << ")\n";
  }

  int boundary_active = 0;
  for (Eigen::Index k = 0; k < state.u.rows(); ++k) {
    if ((state.u.row(k).array() == 0.0).any()) ++boundary_active;
  }
  if (boundary_active > 0) {
    std::cerr << "note: an inlet sits at the zero bound on " << boundary_active << " of "
              << state.u.rows() << " grid points\n";
  }

  std::cout << "wrote " << (out_dir / "trajectory.csv").string() << ", "
            << (out_dir / "diagnostics.csv").string()
            << (args.plots ? ", inflows.svg, outflow.svg, densities.svg" : "") << "\n";
  return kExitOk;
}

int run_zeta_sweep(const CommonArgs& args) {
  const noir::Scenario scenario = noir::load_scenario(args.scenario_path);
  if (scenario.zetas.empty()) {
    std::cerr << "error: scenario has no zeta list\n";
    return kExitValidation;
  }
  const noir::NoirGraph graph = noir::build_graph(scenario);
  const noir::RoutingModel routing = noir::build_routing_model(scenario, graph);
  const noir::CostSpec spec = noir::build_cost_spec(scenario);

  noir::SweepOptions options;
  options.iterations = scenario.iterations;
  options.early_exit = args.early_exit;
  options.threads = args.threads;
  options.allow_unverified_connectivity = args.force;
  options.connectivity_mode = mode_of(args);

  const auto rows =
      noir::run_zeta_sweep(graph, routing, spec, scenario.x0, scenario.zetas, options);

  fs::create_directories(args.output_dir);
  std::ostringstream csv;
  noir::write_zeta_csv(csv, rows);
  write_file(fs::path(args.output_dir) / "zeta.csv", csv.str());

  std::cout << "zeta,max_abs_lambda0\n";
  for (const auto& row : rows) {
    std::cout << row.zeta << ',' << row.max_abs_lambda0 << "\n";
  }
  std::cout << "wrote " << (fs::path(args.output_dir) / "zeta.csv").string() << "\n";
  return kExitOk;
}

int run_generate(const CommonArgs& args, std::optional<std::uint64_t> seed,
                 const std::string& output_file) {
  noir::Scenario scenario = noir::load_scenario(args.scenario_path);
  if (seed) scenario.routing_seed = *seed;
  if (!scenario.routing_seed) {
    std::cerr << "error: no seed given and the scenario has explicit routing; "
                 "pass --seed\n";
    return kExitValidation;
  }
  const noir::Scenario materialized = noir::with_explicit_routing(scenario);
  write_file(output_file, noir::serialize_scenario(materialized));
  std::cout << "wrote " << output_file << "\n";
  return kExitOk;
}

int run_spectrum(const CommonArgs& args) {
  const noir::Scenario scenario = noir::load_scenario(args.scenario_path);
  const noir::NoirGraph graph = noir::build_graph(scenario);
  const noir::RoutingModel routing = noir::build_routing_model(scenario, graph);
  const noir::SpectrumReport report =
      noir::spectrum_check(noir::state_matrix(routing, graph));

  std::cout << "eigenvalues of A:\n";
  for (const auto& mu : report.eigenvalues) {
    std::cout << "  " << mu.real() << (mu.imag() < 0 ? " - " : " + ")
              << std::abs(mu.imag()) << "i   |mu+1| = " << std::abs(mu + 1.0) << "\n";
  }
  std::cout << "max real part: " << report.max_real_part << "\n"
            << "hurwitz: " << (report.hurwitz ? "yes" : "no") << "\n"
            << "inside unit disk at -1: " << (report.inside_unit_disk ? "yes" : "no")
            << "\n";
  return (report.hurwitz && report.inside_unit_disk) ? kExitOk : kExitChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary inflow control for networks of interconnected roads"};
  app.require_subcommand(1);

  CommonArgs args;
  std::optional<std::uint64_t> seed;
  std::string output_file = "generated.scenario";

  auto add_scenario = [&](CLI::App* cmd) {
    cmd->add_option("scenario", args.scenario_path, "scenario file")->required();
    cmd->add_flag("--any-inlet", args.any_inlet_mode,
                  "weaker connectivity reading: reachable from some inlet");
  };

  CLI::App* validate = app.add_subcommand("validate", "run every model check");
  add_scenario(validate);

  CLI::App* optimize = app.add_subcommand("optimize", "solve and export trajectories");
  add_scenario(optimize);
  optimize->add_option("-o,--output", args.output_dir, "output directory");
  optimize->add_flag("--early-exit", args.early_exit, "stop when the control settles");
  optimize->add_option("--threads", args.threads, "allocation solver threads")
      ->check(CLI::PositiveNumber);
  optimize->add_flag("--plots", args.plots, "emit SVG plots");
  optimize->add_flag("--costate", args.costate, "include co-states in the CSV");
  optimize->add_flag("--force", args.force, "run despite failed connectivity");

  CLI::App* zeta = app.add_subcommand("zeta-sweep",
                                      "rerun with density weight zeta*I per zeta entry");
  add_scenario(zeta);
  zeta->add_option("-o,--output", args.output_dir, "output directory");
  zeta->add_flag("--early-exit", args.early_exit, "stop when the control settles");
  zeta->add_option("--threads", args.threads, "allocation solver threads")
      ->check(CLI::PositiveNumber);
  zeta->add_flag("--force", args.force, "run despite failed connectivity");

  CLI::App* generate =
      app.add_subcommand("generate", "embed seeded routing as an explicit scenario");
  add_scenario(generate);
  generate->add_option("--seed", seed, "routing seed (overrides the scenario's)");
  generate->add_option("-o,--output", output_file, "output scenario file");

  CLI::App* spectrum = app.add_subcommand("spectrum", "print the eigenvalues of A");
  add_scenario(spectrum);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return run_validate(args);
    if (optimize->parsed()) return run_optimize(args);
    if (zeta->parsed()) return run_zeta_sweep(args);
    if (generate->parsed()) return run_generate(args, seed, output_file);
    if (spectrum->parsed()) return run_spectrum(args);
  } catch (const noir::Error& error) {
    std::cerr << "error [" << noir::errc_name(error.code()) << "]: " << error.what()
              << "\n";
    return exit_code_for(error);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
