#pragma once

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "noir/errors.hpp"

namespace noir {

// Road network description as it appears in scenario files: three node counts
// plus a directed edge list over 1-based road indices. Index convention:
// inlets occupy 1..inlets, outlets the next `outlets` indices, interior roads
// the remainder up to total_nodes().
struct GraphSpec {
  int inlets = 0;
  int outlets = 0;
  int interior = 0;
  std::vector<std::pair<int, int>> edges;

  int total_nodes() const { return inlets + outlets + interior; }

  friend bool operator==(const GraphSpec&, const GraphSpec&) = default;
};

enum class NodeKind { inlet, outlet, interior };

// Validated road network. Immutable after construction; all member queries
// are pure and safe to call concurrently.
class NoirGraph {
 public:
  // Validates the full invariant set and throws ValidationError listing every
  // violation: positive counts, index range, no self loops, no duplicate
  // edges, and the boundary degree rules (an inlet has no in-neighbors and
  // exactly one out-neighbor; an outlet has exactly one in-neighbor and no
  // out-neighbors).
  static NoirGraph build(const GraphSpec& spec);

  int inlet_count() const { return inlets_; }
  int outlet_count() const { return outlets_; }
  int interior_count() const { return interior_; }
  int node_count() const { return inlets_ + outlets_ + interior_; }
  int boundary_count() const { return inlets_ + outlets_; }
  // 1-based index of the first interior road.
  int first_interior() const { return boundary_count() + 1; }

  NodeKind kind(int node) const;
  bool is_inlet(int node) const { return kind(node) == NodeKind::inlet; }
  bool is_outlet(int node) const { return kind(node) == NodeKind::outlet; }
  bool is_interior(int node) const { return kind(node) == NodeKind::interior; }

  // Upstream adjacent roads {j | (j, node) is an edge}. Throws
  // Error(invalid_index) for out-of-range nodes.
  const std::set<int>& in_neighbors(int node) const;
  // Downstream adjacent roads {j | (node, j) is an edge}.
  const std::set<int>& out_neighbors(int node) const;

  bool has_edge(int from, int to) const;
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  // Inverse of build(); build(g.spec()) reconstructs an identical graph.
  GraphSpec spec() const;

 private:
  NoirGraph() = default;

  void check_index(int node) const;

  int inlets_ = 0;
  int outlets_ = 0;
  int interior_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::set<int>> in_;   // 0-based storage, queried 1-based
  std::vector<std::set<int>> out_;
};

// Reading of the connectivity hypothesis for the stability result.
// `every_inlet` demands a path from each inlet to each interior road (the
// strict reading used by default); `any_inlet` only demands that each
// interior road is reachable from at least one inlet.
enum class ConnectivityMode { every_inlet, any_inlet };

struct ReachabilityGap {
  int from = 0;  // inlet (or 0 for any_inlet mode) / interior road
  int to = 0;    // unreached interior road / unreached outlet
  friend bool operator==(const ReachabilityGap&, const ReachabilityGap&) = default;
};

struct ConnectivityReport {
  ConnectivityMode mode = ConnectivityMode::every_inlet;
  bool inlets_reach_all_interior = true;
  bool interior_reaches_all_outlets = true;
  std::vector<ReachabilityGap> inlet_gaps;
  std::vector<ReachabilityGap> outlet_gaps;

  bool satisfied() const {
    return inlets_reach_all_interior && interior_reaches_all_outlets;
  }
};

// Checks both connectivity conditions by breadth-first search and reports
// every failing node pair as a witness. Never throws on a valid graph.
ConnectivityReport check_connectivity(
    const NoirGraph& graph, ConnectivityMode mode = ConnectivityMode::every_inlet);

}  // namespace noir
