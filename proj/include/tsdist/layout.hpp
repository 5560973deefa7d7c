#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tsdist/distance_matrix.hpp"

namespace tsdist::layout {

struct LayoutCoordinates {
  std::vector<std::string> labels;
  std::vector<std::array<double, 2>> positions;
  double final_stress = 0.0;
};

// 2-D embedding minimizing sum_{i<j} (||p_i - p_j|| - d_ij)^2 / d_ij^2 by
// node-at-a-time Newton descent (gradient-descent fallback keeps the stress
// sequence non-increasing). Nodes start on a circle of radius max(d)/2 in
// label order with a seeded jitter of 1e-3 * radius. Stops when the largest
// per-node gradient norm is <= 1e-6 or after 1000 full passes. Zero target
// distances are floored at 1e-6 * max off-diagonal distance. The result is
// centered on the origin, rotated so node 0 sits on the +x axis, and
// reflected so node 1 has y >= 0.
//
// stress_trace, when given, receives the stress after initialization and
// after every accepted node move.
LayoutCoordinates kamada_kawai_layout(const analysis::DistanceMatrix& m, uint64_t seed,
                                      std::vector<double>* stress_trace = nullptr);

// {"labels":[...], "positions":[[x,y],...], "stress": s}
void save_layout_json(const LayoutCoordinates& lc, const std::filesystem::path& path);

// CSV "label,css_color" rows; labels absent from the file keep the default
// node color.
std::vector<std::pair<std::string, std::string>> load_color_map(
    const std::filesystem::path& path);

// SVG scatter of the laid-out nodes with text labels. `m` must carry the
// same labels (it supplies context such as the metric tag).
void export_layout(const LayoutCoordinates& lc, const analysis::DistanceMatrix& m,
                   const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, std::string>>* color_map = nullptr);

}  // namespace tsdist::layout
