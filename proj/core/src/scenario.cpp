#include "noir/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace noir {

using Json = nlohmann::ordered_json;

bool Scenario::operator==(const Scenario& other) const {
  auto vec_eq = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.size() == b.size() && a == b;
  };
  return graph == other.graph && routing_seed == other.routing_seed && p == other.p &&
         q == other.q && vec_eq(r, other.r) && vec_eq(w, other.w) && u0 == other.u0 &&
         t0 == other.t0 && tf == other.tf && steps == other.steps &&
         iterations == other.iterations && vec_eq(x0, other.x0) &&
         fd.rho_max == other.fd.rho_max && fd.z_max == other.fd.z_max &&
         zetas == other.zetas;
}

namespace {

[[noreturn]] void parse_fail(const std::string& origin, const std::string& what) {
  throw Error(Errc::parse_error, origin + ": " + what);
}

void require_keys(const Json& object, const std::string& origin, const std::string& path,
                  const std::vector<std::string>& required,
                  const std::vector<std::string>& optional = {}) {
  if (!object.is_object()) parse_fail(origin, path + " must be an object");
  for (const auto& item : object.items()) {
    const std::string& key = item.key();
    const bool known =
        std::find(required.begin(), required.end(), key) != required.end() ||
        std::find(optional.begin(), optional.end(), key) != optional.end();
    if (!known) parse_fail(origin, "unknown key \"" + path + "." + key + "\"");
  }
  for (const std::string& key : required) {
    if (!object.contains(key)) {
      parse_fail(origin, "missing key \"" + path + "." + key + "\"");
    }
  }
}

double as_number(const Json& value, const std::string& origin, const std::string& path) {
  if (!value.is_number()) parse_fail(origin, path + " must be a number");
  return value.get<double>();
}

int as_int(const Json& value, const std::string& origin, const std::string& path) {
  if (!value.is_number_integer()) parse_fail(origin, path + " must be an integer");
  return value.get<int>();
}

int node_key(const std::string& key, const std::string& origin, const std::string& path) {
  int node = 0;
  const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), node);
  if (ec != std::errc{} || ptr != key.data() + key.size()) {
    parse_fail(origin, path + " key \"" + key + "\" is not a road index");
  }
  return node;
}

Eigen::VectorXd expand_vector(const Json& value, int size, const std::string& origin,
                              const std::string& path) {
  if (value.is_number()) {
    return Eigen::VectorXd::Constant(size, value.get<double>());
  }
  if (!value.is_array()) {
    parse_fail(origin, path + " must be a number or an array of numbers");
  }
  if (static_cast<int>(value.size()) != size) {
    std::ostringstream msg;
    msg << path << " has " << value.size() << " entries, expected " << size;
    parse_fail(origin, msg.str());
  }
  Eigen::VectorXd out(size);
  for (int k = 0; k < size; ++k) {
    out(k) = as_number(value[k], origin, path);
  }
  return out;
}

std::pair<int, int> line_and_column(const std::string& text, std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& error) {
    const auto [line, column] = line_and_column(text, error.byte);
    std::ostringstream msg;
    msg << "syntax error at line " << line << ", column " << column << ": " << error.what();
    parse_fail(origin, msg.str());
  }

  require_keys(doc, origin, "scenario",
               {"schema_version", "graph", "routing", "cost", "initial_state",
                "fundamental_diagram"},
               {"zeta"});

  const int version = as_int(doc["schema_version"], origin, "schema_version");
  if (version != kScenarioSchemaVersion) {
    std::ostringstream msg;
    msg << "unsupported schema_version " << version << " (expected "
        << kScenarioSchemaVersion << ")";
    parse_fail(origin, msg.str());
  }

  Scenario scenario;

  const Json& graph = doc["graph"];
  require_keys(graph, origin, "graph", {"inlets", "outlets", "interior", "edges"});
  scenario.graph.inlets = as_int(graph["inlets"], origin, "graph.inlets");
  scenario.graph.outlets = as_int(graph["outlets"], origin, "graph.outlets");
  scenario.graph.interior = as_int(graph["interior"], origin, "graph.interior");
  if (!graph["edges"].is_array()) parse_fail(origin, "graph.edges must be an array");
  for (const Json& edge : graph["edges"]) {
    if (!edge.is_array() || edge.size() != 2) {
      parse_fail(origin, "graph.edges entries must be [from, to] pairs");
    }
    scenario.graph.edges.emplace_back(as_int(edge[0], origin, "graph.edges"),
                                      as_int(edge[1], origin, "graph.edges"));
  }

  // Validate the graph before its counts size anything downstream.
  try {
    build_graph(scenario);
  } catch (const ValidationError& error) {
    throw ValidationError(origin, error.issues());
  }

  const Json& routing = doc["routing"];
  if (!routing.is_object()) parse_fail(origin, "routing must be an object");
  if (routing.contains("seed")) {
    require_keys(routing, origin, "routing", {"seed"});
    if (!routing["seed"].is_number_unsigned()) {
      parse_fail(origin, "routing.seed must be a nonnegative integer");
    }
    scenario.routing_seed = routing["seed"].get<std::uint64_t>();
  } else {
    require_keys(routing, origin, "routing", {"p", "q"});
    if (!routing["p"].is_object()) parse_fail(origin, "routing.p must be an object");
    for (const auto& item : routing["p"].items()) {
      const int node = node_key(item.key(), origin, "routing.p");
      scenario.p[node] = as_number(item.value(), origin, "routing.p." + item.key());
    }
    if (!routing["q"].is_object()) parse_fail(origin, "routing.q must be an object");
    for (const auto& source : routing["q"].items()) {
      const int from = node_key(source.key(), origin, "routing.q");
      if (!source.value().is_object()) {
        parse_fail(origin, "routing.q." + source.key() + " must be an object");
      }
      for (const auto& dest : source.value().items()) {
        const int to = node_key(dest.key(), origin, "routing.q." + source.key());
        scenario.q[{from, to}] = as_number(
            dest.value(), origin, "routing.q." + source.key() + "." + dest.key());
      }
    }
  }

  const Json& cost = doc["cost"];
  require_keys(cost, origin, "cost", {"r", "w", "u0", "t0", "tf", "n", "m"});
  scenario.r = expand_vector(cost["r"], scenario.graph.interior, origin, "cost.r");
  scenario.w = expand_vector(cost["w"], scenario.graph.inlets, origin, "cost.w");
  scenario.u0 = as_number(cost["u0"], origin, "cost.u0");
  scenario.t0 = as_number(cost["t0"], origin, "cost.t0");
  scenario.tf = as_number(cost["tf"], origin, "cost.tf");
  scenario.steps = as_int(cost["n"], origin, "cost.n");
  scenario.iterations = as_int(cost["m"], origin, "cost.m");

  const Json& initial = doc["initial_state"];
  require_keys(initial, origin, "initial_state", {"x0"});
  scenario.x0 =
      expand_vector(initial["x0"], scenario.graph.interior, origin, "initial_state.x0");

  const Json& fd = doc["fundamental_diagram"];
  require_keys(fd, origin, "fundamental_diagram", {"rho_max", "z_max"});
  scenario.fd.rho_max = as_number(fd["rho_max"], origin, "fundamental_diagram.rho_max");
  scenario.fd.z_max = as_number(fd["z_max"], origin, "fundamental_diagram.z_max");

  if (doc.contains("zeta")) {
    if (!doc["zeta"].is_array() || doc["zeta"].empty()) {
      parse_fail(origin, "zeta must be a nonempty array of numbers");
    }
    for (const Json& value : doc["zeta"]) {
      scenario.zetas.push_back(as_number(value, origin, "zeta"));
    }
  }

  // Cross-validate through the module constructors so every violation is
  // reported with its structured issue list.
  try {
    const NoirGraph g = build_graph(scenario);
    build_routing_model(scenario, g);
    build_cost_spec(scenario);
    feasible_outflow_bound(scenario.fd);

    std::vector<Issue> issues;
    if ((scenario.x0.array() < 0.0).any()) {
      issues.push_back({Errc::validation_error, 0, scenario.x0.minCoeff(),
                        "initial densities must be nonnegative"});
    }
    if ((scenario.r.array() < 0.0).any()) {
      issues.push_back({Errc::validation_error, 0, scenario.r.minCoeff(),
                        "density weights must be nonnegative"});
    }
    if ((scenario.w.array() <= 0.0).any()) {
      issues.push_back({Errc::validation_error, 0, scenario.w.minCoeff(),
                        "control weights must be strictly positive"});
    }
    if (!(scenario.u0 > 0.0)) {
      issues.push_back(
          {Errc::validation_error, 0, scenario.u0, "net inflow must be strictly positive"});
    }
    if (scenario.iterations < 1) {
      issues.push_back({Errc::validation_error, 0,
                        static_cast<double>(scenario.iterations),
                        "iteration count must be at least 1"});
    }
    for (double zeta : scenario.zetas) {
      if (!(zeta >= 0.0)) {
        issues.push_back(
            {Errc::validation_error, 0, zeta, "zeta values must be nonnegative"});
        break;
      }
    }
    if (!issues.empty()) throw ValidationError("scenario", issues);
  } catch (const ValidationError& error) {
    throw ValidationError(origin, error.issues());
  }

  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::io_error, "cannot open scenario file " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), path.filename().string());
}

std::string serialize_scenario(const Scenario& scenario) {
  Json doc;
  doc["schema_version"] = kScenarioSchemaVersion;

  Json graph;
  graph["inlets"] = scenario.graph.inlets;
  graph["outlets"] = scenario.graph.outlets;
  graph["interior"] = scenario.graph.interior;
  Json edges = Json::array();
  for (const auto& [from, to] : scenario.graph.edges) {
    edges.push_back(Json::array({from, to}));
  }
  graph["edges"] = edges;
  doc["graph"] = graph;

  Json routing;
  if (scenario.routing_seed) {
    routing["seed"] = *scenario.routing_seed;
  } else {
    Json p;
    for (const auto& [node, value] : scenario.p) {
      p[std::to_string(node)] = value;
    }
    Json q;
    for (const auto& [edge, value] : scenario.q) {
      q[std::to_string(edge.first)][std::to_string(edge.second)] = value;
    }
    routing["p"] = p;
    routing["q"] = q;
  }
  doc["routing"] = routing;

  Json cost;
  cost["r"] = std::vector<double>(scenario.r.begin(), scenario.r.end());
  cost["w"] = std::vector<double>(scenario.w.begin(), scenario.w.end());
  cost["u0"] = scenario.u0;
  cost["t0"] = scenario.t0;
  cost["tf"] = scenario.tf;
  cost["n"] = scenario.steps;
  cost["m"] = scenario.iterations;
  doc["cost"] = cost;

  doc["initial_state"]["x0"] = std::vector<double>(scenario.x0.begin(), scenario.x0.end());

  doc["fundamental_diagram"]["rho_max"] = scenario.fd.rho_max;
  doc["fundamental_diagram"]["z_max"] = scenario.fd.z_max;

  if (!scenario.zetas.empty()) doc["zeta"] = scenario.zetas;

  return doc.dump(2) + "\n";
}

NoirGraph build_graph(const Scenario& scenario) { return NoirGraph::build(scenario.graph); }

RoutingModel build_routing_model(const Scenario& scenario, const NoirGraph& graph) {
  if (scenario.routing_seed) {
    return random_routing(graph, *scenario.routing_seed);
  }
  return build_routing(graph, scenario.p, scenario.q);
}

CostSpec build_cost_spec(const Scenario& scenario) {
  return CostSpec{scenario.r, scenario.w, scenario.u0,
                  TimeGrid(scenario.t0, scenario.tf, scenario.steps)};
}

Scenario with_explicit_routing(const Scenario& scenario) {
  Scenario out = scenario;
  if (!scenario.routing_seed) return out;
  const NoirGraph graph = build_graph(scenario);
  const RoutingModel model = random_routing(graph, *scenario.routing_seed);
  out.routing_seed.reset();
  out.p = model.p();
  out.q = model.q();
  return out;
}

}  // namespace noir
