#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tsdist/distance_matrix.hpp"

namespace tsdist::analysis {

// Pearson correlation and the least-squares fit of loss on distance, plus a
// Spearman rank correlation reported as supplementary context.
struct CorrelationReport {
  double pearson_r = 0.0;
  double spearman_r = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t n = 0;

  struct Pair {
    std::string label;
    double distance = 0.0;
    double loss = 0.0;
  };
  std::vector<Pair> pairs;
  std::vector<std::string> missing_labels;  // matrix labels with no loss value
};

// Core statistic: inputs must be equal-length (>= 3), finite, and neither
// vector constant.
CorrelationReport correlate(std::span<const double> distances, std::span<const double> losses,
                            std::span<const std::string> labels);

// Join one matrix row against a label->loss table: keeps the datasets
// present in both, records the rest in missing_labels, then correlates.
CorrelationReport correlate_against_losses(const DistanceMatrix& m,
                                           const std::string& source_label,
                                           std::span<const std::string> loss_labels,
                                           std::span<const double> loss_values);

void save_correlation_json(const CorrelationReport& r, const std::filesystem::path& path);

// Scatter of (distance, loss) points with the best-fit line drawn in red.
void export_scatter(const CorrelationReport& r, const std::filesystem::path& path);

}  // namespace tsdist::analysis
