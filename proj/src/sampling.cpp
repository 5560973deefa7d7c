#include "tsdist/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "tsdist/error.hpp"
#include "tsdist/rng.hpp"

namespace tsdist::ingest {

void SamplingConfig::validate() const {
  if (window_length < 2)
    fail(errc::invalid_argument, "window_length must be at least 2");
  if (sample_count < window_length)
    fail(errc::invalid_argument, "sample_count must be at least the window length");
  if (max_resample_attempts == 0)
    fail(errc::invalid_argument, "max_resample_attempts must be positive");
}

SampleMatrix SampleMatrix::from_data(std::string dataset_name, std::size_t rows, std::size_t cols,
                                     std::vector<double> data, SamplingConfig config) {
  if (rows == 0 || cols == 0 || data.size() != rows * cols)
    fail(errc::invalid_argument, "sample matrix shape does not match data length");
  for (std::size_t r = 0; r < rows; ++r) {
    double lo = data[r * cols], hi = lo;
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = data[r * cols + c];
      if (!(v >= 0.0 && v <= 1.0))
        fail(errc::invalid_argument, "sample entry outside [0, 1] in row " + std::to_string(r));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(hi - lo > 0.0))
      fail(errc::invalid_argument, "constant sample row " + std::to_string(r));
  }
  SampleMatrix m;
  m.name_ = std::move(dataset_name);
  m.rows_ = rows;
  m.cols_ = cols;
  m.data_ = std::move(data);
  m.config_ = config;
  return m;
}

SampleMatrix sample_windows(const TimeSeriesDataset& ds, const SamplingConfig& cfg,
                            std::vector<std::string>* warnings) {
  cfg.validate();
  const std::size_t window = cfg.window_length;

  if (ds.global_min() < 0.0 || ds.global_max() > 1.0)
    fail(errc::invalid_argument,
         "dataset '" + ds.name() + "' is not normalized to [0, 1]; normalize before sampling");

  // sampling pool: all (series, offset) pairs of eligible series
  struct Pool {
    const Series* series;
    uint64_t cumulative;  // windows up to and including this series
  };
  std::vector<Pool> pool;
  uint64_t total_windows = 0;
  for (const Series& s : ds.series()) {
    if (s.values.size() < window) {
      if (warnings)
        warnings->push_back("series '" + s.id + "' is shorter than the window length (" +
                            std::to_string(s.values.size()) + " < " + std::to_string(window) +
                            "); excluded from sampling");
      continue;
    }
    total_windows += s.values.size() - window + 1;
    pool.push_back({&s, total_windows});
  }
  if (pool.empty())
    fail(errc::no_valid_window,
         "dataset '" + ds.name() + "' has no series of length >= " + std::to_string(window));

  rng::Engine eng = rng::make_engine(cfg.seed, ds.name());

  std::vector<double> data(static_cast<std::size_t>(cfg.sample_count) * window);
  uint32_t consecutive_constant = 0;
  for (std::size_t r = 0; r < cfg.sample_count;) {
    const uint64_t pick = rng::bounded(eng, total_windows);
    const auto it = std::upper_bound(pool.begin(), pool.end(), pick,
                                     [](uint64_t v, const Pool& p) { return v < p.cumulative; });
    const Pool& entry = *it;
    const uint64_t prev = it == pool.begin() ? 0 : (it - 1)->cumulative;
    const std::size_t offset = static_cast<std::size_t>(pick - prev);

    const double* src = entry.series->values.data() + offset;
    double lo = src[0], hi = src[0];
    double* dst = data.data() + r * window;
    for (std::size_t c = 0; c < window; ++c) {
      dst[c] = src[c];
      lo = std::min(lo, src[c]);
      hi = std::max(hi, src[c]);
    }
    if (!(hi - lo > 0.0)) {
      if (++consecutive_constant >= cfg.max_resample_attempts)
        fail(errc::resample_exhausted,
             "drew " + std::to_string(consecutive_constant) +
                 " constant windows in a row from dataset '" + ds.name() + "'");
      continue;  // redraw this row
    }
    consecutive_constant = 0;
    ++r;
  }

  SampleMatrix m;
  m.name_ = ds.name();
  m.rows_ = cfg.sample_count;
  m.cols_ = window;
  m.data_ = std::move(data);
  m.config_ = cfg;
  return m;
}

}  // namespace tsdist::ingest
