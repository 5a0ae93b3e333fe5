#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace noir {

// Every failure the library can report, one code per distinct condition so
// callers (and the CLI exit-code mapping) can dispatch without parsing text.
enum class Errc {
  invalid_count,
  invalid_index,
  duplicate_edge,
  self_loop,
  assumption_violation,      // inlet/outlet degree rules
  probability_out_of_range,
  tendency_row_sum,
  missing_entry,
  non_finite,
  dimension_mismatch,
  index_out_of_grid,
  singular_transition,
  connectivity_refused,
  parse_error,
  validation_error,
  io_error,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// One violated invariant. `node` is the 1-based road index when the issue is
// tied to a node, 0 otherwise. `value` carries the offending number when there
// is one (a probability, a row sum), NaN otherwise.
struct Issue {
  Errc code;
  int node = 0;
  double value = 0.0;
  std::string detail;
};

// Structured rejection: carries every violated invariant found during a
// validation pass, not just the first.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& context, std::vector<Issue> issues);

  const std::vector<Issue>& issues() const noexcept { return issues_; }

  static std::string format(const std::string& context,
                            const std::vector<Issue>& issues);

 private:
  std::vector<Issue> issues_;
};

class SingularTransitionError : public Error {
 public:
  explicit SingularTransitionError(double condition_estimate);

  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

}  // namespace noir
