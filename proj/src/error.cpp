#include "tsdist/error.hpp"

namespace tsdist {

const char* errc_name(errc code) {
  switch (code) {
    case errc::io: return "IoError";
    case errc::parse: return "ParseError";
    case errc::empty_dataset: return "EmptyDataset";
    case errc::non_finite_value: return "NonFiniteValue";
    case errc::degenerate_range: return "DegenerateRange";
    case errc::no_valid_window: return "NoValidWindow";
    case errc::resample_exhausted: return "ResampleExhausted";
    case errc::not_square: return "NotSquare";
    case errc::asymmetry_too_large: return "AsymmetryTooLarge";
    case errc::no_convergence: return "NoConvergence";
    case errc::not_psd: return "NotPSD";
    case errc::shape_mismatch: return "ShapeMismatch";
    case errc::too_few_samples: return "TooFewSamples";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::empty_input: return "EmptyInput";
    case errc::empty_matrix: return "EmptyMatrix";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::degenerate_variance: return "DegenerateVariance";
    case errc::metric_needs_raw_data: return "MetricNeedsRawData";
    case errc::unknown_source_label: return "UnknownSourceLabel";
    case errc::insufficient_overlap: return "InsufficientOverlap";
    case errc::too_few_nodes: return "TooFewNodes";
    case errc::non_positive_distance: return "NonPositiveDistance";
    case errc::label_mismatch: return "LabelMismatch";
    case errc::invalid_argument: return "InvalidArgument";
  }
  return "UnknownError";
}

bool is_user_error(errc code) {
  switch (code) {
    case errc::io:
    case errc::parse:
    case errc::empty_dataset:
    case errc::non_finite_value:
    case errc::degenerate_range:
    case errc::no_valid_window:
    case errc::resample_exhausted:
    case errc::too_few_samples:
    case errc::dimension_mismatch:
    case errc::empty_input:
    case errc::empty_matrix:
    case errc::length_mismatch:
    case errc::degenerate_variance:
    case errc::metric_needs_raw_data:
    case errc::unknown_source_label:
    case errc::insufficient_overlap:
    case errc::too_few_nodes:
    case errc::non_positive_distance:
    case errc::label_mismatch:
    case errc::invalid_argument:
      return true;
    case errc::not_square:
    case errc::asymmetry_too_large:
    case errc::no_convergence:
    case errc::not_psd:
    case errc::shape_mismatch:
      return false;
  }
  return false;
}

}  // namespace tsdist
