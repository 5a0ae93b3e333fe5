#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "noir/dynamics.hpp"
#include "noir/graph.hpp"
#include "noir/routing.hpp"
#include "noir/sweep.hpp"

namespace noir {

inline constexpr int kScenarioSchemaVersion = 1;

// One fully validated problem instance as described by a scenario file:
// network, routing (explicit or seeded), objective weights, horizon, initial
// densities, feasibility caps, and the optional zeta list for sweeps.
// Vector-valued fields are stored expanded even when the file used the
// scalar broadcast shorthand.
struct Scenario {
  GraphSpec graph;

  // Exactly one of the two: a seed to derive routing deterministically, or
  // explicit per-road maps.
  std::optional<std::uint64_t> routing_seed;
  std::map<int, double> p;
  std::map<std::pair<int, int>, double> q;

  Eigen::VectorXd r;   // per interior road
  Eigen::VectorXd w;   // per inlet
  double u0 = 0.0;
  double t0 = 0.0;
  double tf = 0.0;
  int steps = 0;       // grid steps (n)
  int iterations = 0;  // outer sweep iterations (m)

  Eigen::VectorXd x0;  // per interior road

  FundamentalDiagram fd;

  std::vector<double> zetas;  // empty when the file has no zeta list

  bool operator==(const Scenario& other) const;
};

// Parses and validates scenario text (JSON with a required schema_version).
// Unknown keys are rejected with the offending path; syntax errors carry
// line/column context. Module-level validation failures surface as
// ValidationError with every violation listed. `origin` tags error messages.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<scenario>");

// Reads the file and parses it; throws Error(io_error) when unreadable.
Scenario load_scenario(const std::filesystem::path& path);

// Canonical text form; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const Scenario& scenario);

// Materialization helpers.
NoirGraph build_graph(const Scenario& scenario);
RoutingModel build_routing_model(const Scenario& scenario, const NoirGraph& graph);
CostSpec build_cost_spec(const Scenario& scenario);

// Copy of `scenario` with the seed replaced by the explicit routing maps it
// derives, as written by the generate command.
Scenario with_explicit_routing(const Scenario& scenario);

}  // namespace noir
