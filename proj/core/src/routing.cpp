#include "noir/routing.hpp"

#include <cmath>
#include <sstream>
#include <vector>

namespace noir {

double RoutingModel::outflow_probability(int node) const {
  auto it = p_.find(node);
  if (it == p_.end()) {
    std::ostringstream msg;
    msg << "no outflow probability stored for road " << node;
    throw Error(Errc::invalid_index, msg.str());
  }
  return it->second;
}

double RoutingModel::tendency(int from, int to) const {
  auto it = q_.find({from, to});
  return it == q_.end() ? 0.0 : it->second;
}

RoutingModel build_routing(const NoirGraph& graph,
                           const std::map<int, double>& p,
                           const std::map<std::pair<int, int>, double>& q) {
  std::vector<Issue> issues;

  for (const auto& [node, value] : p) {
    if (node < graph.first_interior() || node > graph.node_count()) {
      std::ostringstream msg;
      msg << "outflow probability given for non-interior road " << node;
      issues.push_back({Errc::missing_entry, node, value, msg.str()});
    } else if (!std::isfinite(value) || value <= 0.0 || value > 1.0) {
      std::ostringstream msg;
      msg << "outflow probability " << value << " outside (0, 1]";
      issues.push_back({Errc::probability_out_of_range, node, value, msg.str()});
    }
  }
  for (int node = graph.first_interior(); node <= graph.node_count(); ++node) {
    if (!p.count(node)) {
      issues.push_back({Errc::missing_entry, node, 0.0,
                        "no outflow probability for interior road"});
    }
  }

  for (const auto& [edge, value] : q) {
    const auto& [from, to] = edge;
    std::ostringstream where;
    where << "tendency (" << from << " -> " << to << ")";
    if (from < 1 || from > graph.node_count() || to < 1 || to > graph.node_count() ||
        !graph.has_edge(from, to)) {
      issues.push_back({Errc::missing_entry, from, value,
                        where.str() + " does not correspond to an edge"});
      continue;
    }
    if (!graph.is_interior(from)) {
      issues.push_back({Errc::missing_entry, from, value,
                        where.str() + " leaves a non-interior road"});
      continue;
    }
    if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
      issues.push_back({Errc::probability_out_of_range, from, value,
                        where.str() + " outside [0, 1]"});
    }
  }

  for (int node = graph.first_interior(); node <= graph.node_count(); ++node) {
    double sum = 0.0;
    bool complete = true;
    for (int next : graph.out_neighbors(node)) {
      auto it = q.find({node, next});
      if (it == q.end()) {
        std::ostringstream msg;
        msg << "no tendency value for edge (" << node << " -> " << next << ")";
        issues.push_back({Errc::missing_entry, node, 0.0, msg.str()});
        complete = false;
      } else {
        sum += it->second;
      }
    }
    if (complete && std::abs(sum - 1.0) > kTendencySumTol) {
      std::ostringstream msg;
      msg << "tendency split sums to " << sum << " instead of 1";
      issues.push_back({Errc::tendency_row_sum, node, sum, msg.str()});
    }
  }

  if (!issues.empty()) throw ValidationError("routing", issues);

  RoutingModel model;
  model.p_ = p;
  model.q_ = q;
  return model;
}

namespace {

// splitmix64; keeps the stream independent of the standard library's
// distribution implementations.
struct Splitmix64 {
  std::uint64_t state;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in (0, 1)
  double uniform() {
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return u == 0.0 ? 0x1.0p-53 : u;
  }
};

}  // namespace

RoutingModel random_routing(const NoirGraph& graph, std::uint64_t seed) {
  Splitmix64 rng{seed};

  std::map<int, double> p;
  std::map<std::pair<int, int>, double> q;
  for (int node = graph.first_interior(); node <= graph.node_count(); ++node) {
    p[node] = 0.3 + 0.65 * rng.uniform();

    const auto& next = graph.out_neighbors(node);
    std::vector<double> weights;
    weights.reserve(next.size());
    double total = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) {
      const double w = -std::log(rng.uniform());
      weights.push_back(w);
      total += w;
    }
    std::size_t k = 0;
    for (int to : next) {
      q[{node, to}] = weights[k++] / total;
    }
  }
  return build_routing(graph, p, q);
}

}  // namespace noir
