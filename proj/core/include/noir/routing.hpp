#pragma once

#include <cstdint>
#include <map>
#include <utility>

#include "noir/graph.hpp"

namespace noir {

// Tolerance on each interior road's tendency split summing to one.
inline constexpr double kTendencySumTol = 1e-12;

// Per-road outflow fractions and per-edge tendency splits. `p[i]` is the
// fraction of road i's density discharged per unit time, in (0, 1].
// `q[{i, j}]` is the fraction of road i's outflow routed to out-neighbor j;
// the splits of each interior road sum to one over its out-neighbors
// (interior and outlet destinations alike). Immutable once validated.
class RoutingModel {
 public:
  double outflow_probability(int node) const;
  double tendency(int from, int to) const;  // 0 when (from, to) is not an edge

  const std::map<int, double>& p() const { return p_; }
  const std::map<std::pair<int, int>, double>& q() const { return q_; }

  friend bool operator==(const RoutingModel&, const RoutingModel&) = default;

 private:
  friend RoutingModel build_routing(const NoirGraph&,
                                    const std::map<int, double>&,
                                    const std::map<std::pair<int, int>, double>&);

  std::map<int, double> p_;
  std::map<std::pair<int, int>, double> q_;
};

// Validates and assembles a routing model. `p` must cover exactly the
// interior roads; `q` must cover exactly the edges leaving interior roads.
// Throws ValidationError listing every violation (out-of-range probability,
// split sum away from one, missing or extraneous entries).
RoutingModel build_routing(const NoirGraph& graph,
                           const std::map<int, double>& p,
                           const std::map<std::pair<int, int>, double>& q);

// Deterministic random model for a given (graph, seed): outflow fractions
// drawn uniformly from (0.3, 0.95), tendency splits drawn uniformly on the
// probability simplex over each road's out-neighbors. The generator is
// self-contained, so the stream does not depend on the standard library's
// distribution implementations. Output always passes build_routing validation.
RoutingModel random_routing(const NoirGraph& graph, std::uint64_t seed);

}  // namespace noir
