#include "noir/errors.hpp"

#include <sstream>

namespace noir {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_count: return "InvalidCount";
    case Errc::invalid_index: return "InvalidIndex";
    case Errc::duplicate_edge: return "DuplicateEdge";
    case Errc::self_loop: return "SelfLoop";
    case Errc::assumption_violation: return "AssumptionViolation";
    case Errc::probability_out_of_range: return "ProbabilityOutOfRange";
    case Errc::tendency_row_sum: return "TendencyRowSumError";
    case Errc::missing_entry: return "MissingEntry";
    case Errc::non_finite: return "NonFinite";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::index_out_of_grid: return "IndexOutOfGrid";
    case Errc::singular_transition: return "SingularTransition";
    case Errc::connectivity_refused: return "ConnectivityRefused";
    case Errc::parse_error: return "ParseError";
    case Errc::validation_error: return "ValidationError";
    case Errc::io_error: return "IoError";
  }
  return "UnknownError";
}

std::string ValidationError::format(const std::string& context,
                                    const std::vector<Issue>& issues) {
  std::ostringstream out;
  out << context << ": " << issues.size()
      << (issues.size() == 1 ? " violation" : " violations");
  for (const Issue& issue : issues) {
    out << "\n  [" << errc_name(issue.code) << "]";
    if (issue.node != 0) out << " node " << issue.node;
    out << ": " << issue.detail;
  }
  return out.str();
}

ValidationError::ValidationError(const std::string& context,
                                 std::vector<Issue> issues)
    : Error(Errc::validation_error, format(context, issues)),
      issues_(std::move(issues)) {}

SingularTransitionError::SingularTransitionError(double condition_estimate)
    : Error(Errc::singular_transition,
            "terminal transition block is numerically singular (condition estimate " +
                std::to_string(condition_estimate) + ")"),
      condition_estimate_(condition_estimate) {}

}  // namespace noir
