#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tsdist/matrix.hpp"
#include "tsdist/sampling.hpp"

namespace tsdist::gaussian {

// Fitted multivariate-normal summary of one dataset: mean over windows and
// the maximum-likelihood covariance (divisor N).
struct MvnParams {
  std::string dataset_name;
  std::vector<double> mean;
  linalg::Matrix cov;
  uint64_t sample_count = 0;

  std::size_t dim() const { return mean.size(); }
};

MvnParams fit_mvn(const ingest::SampleMatrix& samples);

// 2-Wasserstein distance between the two fitted Gaussians:
//   d^2 = ||mu_a - mu_b||^2 + tr(cov_a) + tr(cov_b) - 2 tr sqrt(S_a cov_b S_a)
// with S_a = psd_sqrt(cov_a). Arguments are ordered canonically first so the
// result is bit-identical under swapping.
double wasserstein_distance(const MvnParams& a, const MvnParams& b);

// Precomputed per-dataset state for building full distance matrices without
// repeating the O(L^3) square root per pair.
struct WassersteinPrep {
  const MvnParams* params = nullptr;
  linalg::Matrix sqrt_cov;
  double cov_trace = 0.0;
};

WassersteinPrep prepare_wasserstein(const MvnParams& params);
double wasserstein_prepared(const WassersteinPrep& a, const MvnParams& b);

// Sketch (de)serialization: a JSON document carrying name, mean, row-major
// covariance and the fitting sample count, so distances can be computed
// without re-ingesting raw data. Loading validates all MvnParams invariants.
std::string sketch_to_json(const MvnParams& params);
MvnParams sketch_from_json(const std::string& text, const std::string& origin = "<memory>");
void save_sketch(const MvnParams& params, const std::filesystem::path& path);
MvnParams load_sketch(const std::filesystem::path& path);

}  // namespace tsdist::gaussian
