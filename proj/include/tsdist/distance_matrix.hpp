#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tsdist/mvn.hpp"
#include "tsdist/sampling.hpp"

namespace tsdist::analysis {

enum class Metric { wasserstein, euclidean, dtw, link_min, link_avg, link_max };

const char* metric_name(Metric m);
Metric metric_from_name(const std::string& name);
bool metric_needs_raw_data(Metric m);  // linkage metrics need sample rows, not sketches

// Symmetric M x M matrix of pairwise dataset distances. Entries are computed
// once per unordered pair and mirrored, so values[i][j] == values[j][i]
// holds exactly. The diagonal is zero for distribution/mean metrics and the
// genuine self-distance for linkage metrics.
struct DistanceMatrix {
  Metric metric = Metric::wasserstein;
  std::vector<std::string> labels;
  std::vector<double> values;  // row-major M x M

  std::size_t size() const { return labels.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * size() + j]; }

  void validate() const;  // shape, symmetry, finiteness, non-negativity
};

// Pairwise distances over sample matrices. MVN-backed metrics fit each
// dataset exactly once and reuse the parameters across pairs; pairs are
// distributed over `threads` workers with each writing only its own cells.
DistanceMatrix pairwise_matrix(std::span<const ingest::SampleMatrix> datasets, Metric metric,
                               int threads = 0, std::size_t linkage_subsample = 0);

// Same, starting from already-fitted parameters (sketches). Linkage metrics
// are rejected here since sketches carry no raw rows.
DistanceMatrix pairwise_from_mvns(std::span<const gaussian::MvnParams> params, Metric metric,
                                  int threads = 0);

// CSV: header "label,<l1>,...", one row per dataset, first column the label.
// JSON: {"metric":..., "labels":[...], "values":[[...]]}. Doubles are
// written with round-trip-exact formatting, so load(save(m)) == m bitwise.
void save_matrix_csv(const DistanceMatrix& m, const std::filesystem::path& path);
void save_matrix_json(const DistanceMatrix& m, const std::filesystem::path& path);
DistanceMatrix load_matrix(const std::filesystem::path& path);  // .csv or .json by content

// Square SVG heatmap with row/column labels and a min/max-annotated
// colorbar. The minimum distance maps to the darkest color. Byte output is
// deterministic for identical input.
void export_heatmap(const DistanceMatrix& m, const std::filesystem::path& path);

}  // namespace tsdist::analysis
