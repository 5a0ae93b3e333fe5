#include "noir/trajectory_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace noir {

std::string format_number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

std::string format_short(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const SweepState& state,
                          const NoirGraph& graph, const RoutingModel& routing,
                          const TimeGrid& grid, const ExportOptions& options) {
  if (state.x.rows() != grid.points() || state.u.rows() != grid.points()) {
    throw Error(Errc::dimension_mismatch, "trajectories do not cover the grid");
  }

  out << "time";
  for (int j = 1; j <= graph.inlet_count(); ++j) out << ",u_" << j;
  for (int i = graph.first_interior(); i <= graph.node_count(); ++i) out << ",x_" << i;
  out << ",z_net";
  if (options.include_costate) {
    for (int i = graph.first_interior(); i <= graph.node_count(); ++i) {
      out << ",lambda_" << i;
    }
  }
  out << "\n";

  const Eigen::VectorXd z_net = net_outlet_outflow(state, routing, graph);
  for (int k = 0; k < grid.points(); ++k) {
    out << format_number(grid.time(k));
    for (Eigen::Index j = 0; j < state.u.cols(); ++j) {
      out << ',' << format_number(state.u(k, j));
    }
    for (Eigen::Index i = 0; i < state.x.cols(); ++i) {
      out << ',' << format_number(state.x(k, i));
    }
    out << ',' << format_number(z_net(k));
    if (options.include_costate) {
      for (Eigen::Index i = 0; i < state.lambda.cols(); ++i) {
        out << ',' << format_number(state.lambda(k, i));
      }
    }
    out << "\n";
  }
}

void write_diagnostics_csv(std::ostream& out, const std::vector<IterationRecord>& records) {
  out << "iteration,delta_u,cost,lambda_tf_residual\n";
  for (const IterationRecord& record : records) {
    out << record.iteration << ',' << format_number(record.delta_u) << ','
        << format_number(record.cost) << ',' << format_number(record.lambda_tf_residual)
        << "\n";
  }
}

void write_zeta_csv(std::ostream& out, const std::vector<ZetaSweepRow>& rows) {
  out << "zeta,max_abs_lambda0\n";
  for (const ZetaSweepRow& row : rows) {
    out << format_number(row.zeta) << ',' << format_number(row.max_abs_lambda0) << "\n";
  }
}

void write_line_plot_svg(std::ostream& out, const std::string& title,
                         const std::string& y_label,
                         const std::vector<std::string>& series_names,
                         const Eigen::VectorXd& time, const Eigen::MatrixXd& columns) {
  if (columns.rows() != time.size() || time.size() < 2 ||
      static_cast<Eigen::Index>(series_names.size()) != columns.cols()) {
    throw Error(Errc::dimension_mismatch, "plot series do not match the time axis");
  }

  constexpr int kWidth = 840;
  constexpr int kHeight = 480;
  constexpr int kLeft = 70;
  constexpr int kRight = 190;  // room for the legend
  constexpr int kTop = 40;
  constexpr int kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  const double t_min = time.minCoeff();
  const double t_max = time.maxCoeff();
  double y_min = std::min(0.0, columns.minCoeff());
  double y_max = columns.maxCoeff();
  if (y_max <= y_min) y_max = y_min + 1.0;
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;

  auto map_x = [&](double t) { return kLeft + (t - t_min) / (t_max - t_min) * plot_w; };
  auto map_y = [&](double y) { return kTop + (y_max - y) / (y_max - y_min) * plot_h; };

  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                   "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
                                   "#98df8a"};
  constexpr int kPaletteSize = 13;

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << kLeft << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
      << title << "</text>\n";

  // axes and ticks
  out << "<g stroke=\"#333\" stroke-width=\"1\" fill=\"none\">\n";
  out << "<path d=\"M" << kLeft << ' ' << kTop << " V" << kTop + plot_h << " H"
      << kLeft + plot_w << "\"/>\n";
  out << "</g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  constexpr int kTicks = 5;
  for (int k = 0; k <= kTicks; ++k) {
    const double t = t_min + (t_max - t_min) * k / kTicks;
    const double y = y_min + (y_max - y_min) * k / kTicks;
    out << "<text x=\"" << format_short(map_x(t)) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\">" << format_short(t) << "</text>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << format_short(map_y(y) + 4)
        << "\" text-anchor=\"end\">" << format_short(y) << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">time</text>\n";
  out << "<text x=\"18\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << kTop + plot_h / 2
      << ")\">" << y_label << "</text>\n";
  out << "</g>\n";

  // Large grids do not need every point; stride to ~600 segments per curve.
  const Eigen::Index stride = std::max<Eigen::Index>(1, time.size() / 600);
  for (Eigen::Index col = 0; col < columns.cols(); ++col) {
    out << "<polyline fill=\"none\" stroke=\"" << kPalette[col % kPaletteSize]
        << "\" stroke-width=\"1.5\" points=\"";
    for (Eigen::Index k = 0; k < time.size(); k += stride) {
      out << format_short(map_x(time(k))) << ',' << format_short(map_y(columns(k, col)))
          << ' ';
    }
    if ((time.size() - 1) % stride != 0) {
      out << format_short(map_x(time(time.size() - 1))) << ','
          << format_short(map_y(columns(time.size() - 1, col)));
    }
    out << "\"/>\n";
  }

  out << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
  for (Eigen::Index col = 0; col < columns.cols(); ++col) {
    const double y = kTop + 14.0 * static_cast<double>(col);
    out << "<rect x=\"" << kLeft + plot_w + 14 << "\" y=\"" << format_short(y)
        << "\" width=\"10\" height=\"10\" fill=\"" << kPalette[col % kPaletteSize]
        << "\"/>\n";
    out << "<text x=\"" << kLeft + plot_w + 30 << "\" y=\"" << format_short(y + 9)
        << "\">" << series_names[col] << "</text>\n";
  }
  out << "</g>\n</svg>\n";
}

}  // namespace noir
