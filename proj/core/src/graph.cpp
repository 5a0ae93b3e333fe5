#include "noir/graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace noir {

namespace {

NodeKind classify(const GraphSpec& spec, int node) {
  if (node <= spec.inlets) return NodeKind::inlet;
  if (node <= spec.inlets + spec.outlets) return NodeKind::outlet;
  return NodeKind::interior;
}

}  // namespace

NoirGraph NoirGraph::build(const GraphSpec& spec) {
  std::vector<Issue> issues;
  auto add = [&](Errc code, int node, const std::string& detail) {
    issues.push_back(Issue{code, node, 0.0, detail});
  };

  if (spec.inlets <= 0) add(Errc::invalid_count, 0, "inlet count must be positive");
  if (spec.outlets <= 0) add(Errc::invalid_count, 0, "outlet count must be positive");
  if (spec.interior <= 0) add(Errc::invalid_count, 0, "interior count must be positive");
  if (!issues.empty()) throw ValidationError("graph", issues);

  const int n = spec.total_nodes();
  std::vector<std::set<int>> in(static_cast<std::size_t>(n) + 1);
  std::vector<std::set<int>> out(static_cast<std::size_t>(n) + 1);

  std::set<std::pair<int, int>> seen;
  for (const auto& [from, to] : spec.edges) {
    if (from < 1 || from > n || to < 1 || to > n) {
      std::ostringstream msg;
      msg << "edge (" << from << ", " << to << ") references a road outside 1.." << n;
      add(Errc::invalid_index, 0, msg.str());
      continue;
    }
    if (from == to) {
      std::ostringstream msg;
      msg << "edge (" << from << ", " << to << ") is a self loop";
      add(Errc::self_loop, from, msg.str());
      continue;
    }
    if (!seen.insert({from, to}).second) {
      std::ostringstream msg;
      msg << "edge (" << from << ", " << to << ") appears more than once";
      add(Errc::duplicate_edge, from, msg.str());
      continue;
    }
    out[from].insert(to);
    in[to].insert(from);
  }

  for (int node = 1; node <= n; ++node) {
    const NodeKind kind = classify(spec, node);
    if (kind == NodeKind::inlet) {
      if (!in[node].empty()) {
        std::ostringstream msg;
        msg << "inlet must have no in-neighbors, found " << in[node].size();
        add(Errc::assumption_violation, node, msg.str());
      }
      if (out[node].size() != 1) {
        std::ostringstream msg;
        msg << "inlet must have exactly one out-neighbor, found " << out[node].size();
        add(Errc::assumption_violation, node, msg.str());
      }
    } else if (kind == NodeKind::outlet) {
      if (in[node].size() != 1) {
        std::ostringstream msg;
        msg << "outlet must have exactly one in-neighbor, found " << in[node].size();
        add(Errc::assumption_violation, node, msg.str());
      }
      if (!out[node].empty()) {
        std::ostringstream msg;
        msg << "outlet must have no out-neighbors, found " << out[node].size();
        add(Errc::assumption_violation, node, msg.str());
      }
    }
  }

  if (!issues.empty()) throw ValidationError("graph", issues);

  NoirGraph g;
  g.inlets_ = spec.inlets;
  g.outlets_ = spec.outlets;
  g.interior_ = spec.interior;
  g.edges_.assign(seen.begin(), seen.end());
  g.in_ = std::move(in);
  g.out_ = std::move(out);
  return g;
}

void NoirGraph::check_index(int node) const {
  if (node < 1 || node > node_count()) {
    std::ostringstream msg;
    msg << "road index " << node << " outside 1.." << node_count();
    throw Error(Errc::invalid_index, msg.str());
  }
}

NodeKind NoirGraph::kind(int node) const {
  check_index(node);
  if (node <= inlets_) return NodeKind::inlet;
  if (node <= inlets_ + outlets_) return NodeKind::outlet;
  return NodeKind::interior;
}

const std::set<int>& NoirGraph::in_neighbors(int node) const {
  check_index(node);
  return in_[node];
}

const std::set<int>& NoirGraph::out_neighbors(int node) const {
  check_index(node);
  return out_[node];
}

bool NoirGraph::has_edge(int from, int to) const {
  check_index(from);
  check_index(to);
  return out_[from].count(to) > 0;
}

GraphSpec NoirGraph::spec() const {
  return GraphSpec{inlets_, outlets_, interior_, edges_};
}

namespace {

// All nodes reachable from `start` following edge direction.
std::vector<bool> reachable_from(const NoirGraph& g, int start) {
  std::vector<bool> seen(static_cast<std::size_t>(g.node_count()) + 1, false);
  std::deque<int> frontier{start};
  seen[start] = true;
  while (!frontier.empty()) {
    const int node = frontier.front();
    frontier.pop_front();
    for (int next : g.out_neighbors(node)) {
      if (!seen[next]) {
        seen[next] = true;
        frontier.push_back(next);
      }
    }
  }
  return seen;
}

}  // namespace

ConnectivityReport check_connectivity(const NoirGraph& graph, ConnectivityMode mode) {
  ConnectivityReport report;
  report.mode = mode;

  const int first_interior = graph.first_interior();
  const int n = graph.node_count();

  std::vector<std::vector<bool>> from_inlet;
  from_inlet.reserve(graph.inlet_count());
  for (int inlet = 1; inlet <= graph.inlet_count(); ++inlet) {
    from_inlet.push_back(reachable_from(graph, inlet));
  }

  for (int node = first_interior; node <= n; ++node) {
    if (mode == ConnectivityMode::every_inlet) {
      for (int inlet = 1; inlet <= graph.inlet_count(); ++inlet) {
        if (!from_inlet[inlet - 1][node]) {
          report.inlets_reach_all_interior = false;
          report.inlet_gaps.push_back({inlet, node});
        }
      }
    } else {
      const bool reached = std::any_of(
          from_inlet.begin(), from_inlet.end(),
          [node](const std::vector<bool>& seen) { return seen[node]; });
      if (!reached) {
        report.inlets_reach_all_interior = false;
        report.inlet_gaps.push_back({0, node});
      }
    }
  }

  for (int node = first_interior; node <= n; ++node) {
    const std::vector<bool> seen = reachable_from(graph, node);
    for (int outlet = graph.inlet_count() + 1; outlet <= graph.boundary_count(); ++outlet) {
      if (!seen[outlet]) {
        report.interior_reaches_all_outlets = false;
        report.outlet_gaps.push_back({node, outlet});
      }
    }
  }

  return report;
}

}  // namespace noir
