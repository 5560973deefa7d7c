#pragma once

#include <stdexcept>
#include <string>

namespace tsdist {

// Every failure the library can report. User-caused conditions (bad files,
// degenerate inputs, mismatched shapes at the API boundary) are kept apart
// from numeric failures so callers can map them to distinct exit codes.
enum class errc {
  // io / parsing
  io,
  parse,
  // ingest
  empty_dataset,
  non_finite_value,
  degenerate_range,
  no_valid_window,
  resample_exhausted,
  // linear algebra
  not_square,
  asymmetry_too_large,
  no_convergence,
  not_psd,
  shape_mismatch,
  // distances
  too_few_samples,
  dimension_mismatch,
  empty_input,
  empty_matrix,
  // analysis
  length_mismatch,
  degenerate_variance,
  metric_needs_raw_data,
  unknown_source_label,
  insufficient_overlap,
  // layout
  too_few_nodes,
  non_positive_distance,
  label_mismatch,
  // catch-all validation
  invalid_argument,
};

const char* errc_name(errc code);

// True for conditions caused by the caller's inputs rather than by the
// library itself; the CLI maps these to exit code 2, the rest to 1.
bool is_user_error(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace tsdist
