#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tsdist::ingest {

struct Series {
  std::string id;
  std::vector<double> values;
};

// A named collection of univariate series of arbitrary (>= 1) lengths, as
// loaded from disk. Values are finite; ids are unique within the dataset.
class TimeSeriesDataset {
 public:
  TimeSeriesDataset(std::string name, std::vector<Series> series);

  const std::string& name() const { return name_; }
  const std::vector<Series>& series() const { return series_; }

  double global_min() const { return min_; }
  double global_max() const { return max_; }

 private:
  std::string name_;
  std::vector<Series> series_;
  double min_ = 0.0;
  double max_ = 0.0;
};

enum class FileFormat { jsonl, csv_long };

// Infer a format from the file extension: ".jsonl" or ".csv". Anything else
// is an error; callers that know better pass the format explicitly.
FileFormat format_from_extension(const std::filesystem::path& path);

// Load a dataset. The dataset name is the file stem. JSONL: one object per
// line with fields "id" and "values". CSV long: header series_id,t,value,
// rows grouped by series_id and ordered by integer t (unsorted input is
// sorted on load).
TimeSeriesDataset load_dataset(const std::filesystem::path& path, FileFormat format);

// Map every value through (v - min) / (max - min) with the dataset-wide
// min/max, landing in [0, 1]. All-identical datasets are an error.
TimeSeriesDataset minmax_normalize(const TimeSeriesDataset& ds);

}  // namespace tsdist::ingest
