#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tsdist/dataset.hpp"

namespace tsdist::ingest {

struct SamplingConfig {
  uint32_t window_length = 48;
  uint32_t sample_count = 20000;
  uint64_t seed = 42;
  uint32_t max_resample_attempts = 1000;

  void validate() const;  // window_length >= 2, sample_count >= window_length
};

// N x L matrix of normalized windows drawn from one dataset. Every entry is
// in [0, 1] and no row is constant.
class SampleMatrix {
 public:
  static SampleMatrix from_data(std::string dataset_name, std::size_t rows, std::size_t cols,
                                std::vector<double> data, SamplingConfig config);

  const std::string& dataset_name() const { return name_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const SamplingConfig& config() const { return config_; }

  const double* row(std::size_t i) const { return data_.data() + i * cols_; }
  std::span<const double> data() const { return data_; }

 private:
  SampleMatrix() = default;
  friend SampleMatrix sample_windows(const TimeSeriesDataset&, const SamplingConfig&,
                                     std::vector<std::string>*);

  std::string name_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
  SamplingConfig config_;
};

// Draw cfg.sample_count windows of length cfg.window_length uniformly over
// all valid (series, start offset) pairs, with replacement, from a
// normalized dataset. Constant windows are rejected and redrawn; the draw
// sequence is a per-dataset stream derived from (cfg.seed, dataset name), so
// output is reproducible regardless of how many datasets are processed or in
// what order. Series shorter than the window length are skipped (one warning
// per series when `warnings` is non-null).
SampleMatrix sample_windows(const TimeSeriesDataset& ds, const SamplingConfig& cfg,
                            std::vector<std::string>* warnings = nullptr);

}  // namespace tsdist::ingest
