#include "noir/dynamics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace noir {

Eigen::MatrixXd tendency_matrix(const RoutingModel& routing, const NoirGraph& graph) {
  const int dim = graph.interior_count();
  const int boundary = graph.boundary_count();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(dim, dim);
  for (int col = 0; col < dim; ++col) {
    const int from = boundary + 1 + col;
    for (int to : graph.out_neighbors(from)) {
      if (graph.is_interior(to)) {
        q(to - boundary - 1, col) = routing.tendency(from, to);
      }
    }
  }
  return q;
}

Eigen::VectorXd outflow_rates(const RoutingModel& routing, const NoirGraph& graph) {
  const int dim = graph.interior_count();
  Eigen::VectorXd rates(dim);
  for (int i = 0; i < dim; ++i) {
    rates(i) = routing.outflow_probability(graph.boundary_count() + 1 + i);
  }
  return rates;
}

Eigen::VectorXd outlet_fractions(const RoutingModel& routing, const NoirGraph& graph) {
  const int dim = graph.interior_count();
  Eigen::VectorXd fractions = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < dim; ++i) {
    const int from = graph.boundary_count() + 1 + i;
    for (int to : graph.out_neighbors(from)) {
      if (graph.is_outlet(to)) fractions(i) += routing.tendency(from, to);
    }
  }
  return fractions;
}

Eigen::MatrixXd state_matrix(const RoutingModel& routing, const NoirGraph& graph) {
  const int dim = graph.interior_count();
  const Eigen::MatrixXd q = tendency_matrix(routing, graph);
  const Eigen::VectorXd p = outflow_rates(routing, graph);
  return (q - Eigen::MatrixXd::Identity(dim, dim)) * p.asDiagonal();
}

Eigen::MatrixXd input_matrix(const NoirGraph& graph) {
  const int dim = graph.interior_count();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim, graph.inlet_count());
  for (int i = 0; i < dim; ++i) {
    const int node = graph.boundary_count() + 1 + i;
    for (int from : graph.in_neighbors(node)) {
      if (graph.is_inlet(from)) b(i, from - 1) = 1.0;
    }
  }
  return b;
}

LtiTraffic assemble_lti(const RoutingModel& routing, const NoirGraph& graph) {
  return LtiTraffic{state_matrix(routing, graph), input_matrix(graph)};
}

SpectrumReport spectrum_check(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw Error(Errc::dimension_mismatch, "spectrum check needs a square matrix");
  }
  if (!a.allFinite()) {
    throw Error(Errc::non_finite, "state matrix has non-finite entries");
  }

  SpectrumReport report;
  if (a.rows() == 0) {
    report.hurwitz = true;
    report.inside_unit_disk = true;
    report.max_real_part = -std::numeric_limits<double>::infinity();
    return report;
  }

  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
  report.max_real_part = -std::numeric_limits<double>::infinity();
  report.inside_unit_disk = true;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    const std::complex<double> mu = solver.eigenvalues()(k);
    report.eigenvalues.push_back(mu);
    report.max_real_part = std::max(report.max_real_part, mu.real());
    if (std::abs(mu + 1.0) >= 1.0 + kSpectrumDiskTol) report.inside_unit_disk = false;
  }
  report.hurwitz = report.max_real_part < 0.0;
  return report;
}

double feasible_outflow_bound(const FundamentalDiagram& fd) {
  std::vector<Issue> issues;
  if (!(fd.rho_max > 0.0) || !std::isfinite(fd.rho_max)) {
    issues.push_back({Errc::probability_out_of_range, 0, fd.rho_max,
                      "density cap must be strictly positive"});
  }
  if (!(fd.z_max > 0.0) || !std::isfinite(fd.z_max)) {
    issues.push_back({Errc::probability_out_of_range, 0, fd.z_max,
                      "outflow cap must be strictly positive"});
  }
  if (!issues.empty()) throw ValidationError("fundamental diagram", issues);
  return std::min(1.0, fd.z_max / fd.rho_max);
}

std::vector<DensityViolation> check_density_constraint(const Eigen::MatrixXd& x,
                                                       const NoirGraph& graph,
                                                       const FundamentalDiagram& fd) {
  if (x.cols() != graph.interior_count()) {
    std::ostringstream msg;
    msg << "trajectory has " << x.cols() << " columns, graph has "
        << graph.interior_count() << " interior roads";
    throw Error(Errc::dimension_mismatch, msg.str());
  }
  std::vector<DensityViolation> violations;
  for (Eigen::Index step = 0; step < x.rows(); ++step) {
    for (Eigen::Index col = 0; col < x.cols(); ++col) {
      if (x(step, col) > fd.rho_max) {
        violations.push_back({graph.boundary_count() + 1 + static_cast<int>(col),
                              static_cast<int>(step), x(step, col)});
      }
    }
  }
  return violations;
}

}  // namespace noir
