#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "noir/graph.hpp"
#include "noir/routing.hpp"
#include "noir/sweep.hpp"

namespace noir {

struct ExportOptions {
  bool include_costate = false;
};

// One row per grid point: time, per-inlet inflows, per-road densities, net
// outlet outflow, and optionally the co-states. Column names derive from the
// 1-based road indices; numbers are printed with enough digits to round-trip
// exactly, so identical runs produce identical bytes.
void write_trajectory_csv(std::ostream& out, const SweepState& state,
                          const NoirGraph& graph, const RoutingModel& routing,
                          const TimeGrid& grid, const ExportOptions& options = {});

// Per-iteration convergence records.
void write_diagnostics_csv(std::ostream& out, const std::vector<IterationRecord>& records);

void write_zeta_csv(std::ostream& out, const std::vector<ZetaSweepRow>& rows);

// Static line plot of trajectory columns against time, written as a small
// self-contained SVG.
void write_line_plot_svg(std::ostream& out, const std::string& title,
                         const std::string& y_label,
                         const std::vector<std::string>& series_names,
                         const Eigen::VectorXd& time, const Eigen::MatrixXd& columns);

// Full-precision decimal form of a double (round-trips exactly).
std::string format_number(double value);

}  // namespace noir
