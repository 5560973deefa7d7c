#include "tsdist/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "tsdist/error.hpp"

namespace tsdist::ingest {

namespace {

bool looks_non_finite(const std::string& text) {
  for (const char* token : {"NaN", "nan", "NAN", "Infinity", "infinity", "inf", "Inf", "INF"})
    if (text.find(token) != std::string::npos) return true;
  return false;
}

std::string at_line(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

TimeSeriesDataset load_jsonl(const std::filesystem::path& path, std::ifstream& in) {
  std::vector<Series> series;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;  // blank line
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      if (looks_non_finite(line))
        fail(errc::non_finite_value, "non-finite value at " + at_line(path, line_no));
      fail(errc::parse, std::string(e.what()) + " at " + at_line(path, line_no));
    }
    if (!obj.is_object() || !obj.contains("id") || !obj.contains("values"))
      fail(errc::parse, "expected {\"id\", \"values\"} object at " + at_line(path, line_no));
    if (!obj["id"].is_string())
      fail(errc::parse, "\"id\" must be a string at " + at_line(path, line_no));
    if (!obj["values"].is_array() || obj["values"].empty())
      fail(errc::parse, "\"values\" must be a non-empty array at " + at_line(path, line_no));

    Series s;
    s.id = obj["id"].get<std::string>();
    s.values.reserve(obj["values"].size());
    for (const auto& v : obj["values"]) {
      if (!v.is_number())
        fail(v.is_null() ? errc::non_finite_value : errc::parse,
             "non-numeric value at " + at_line(path, line_no));
      const double x = v.get<double>();
      if (!std::isfinite(x))
        fail(errc::non_finite_value, "non-finite value at " + at_line(path, line_no));
      s.values.push_back(x);
    }
    series.push_back(std::move(s));
  }
  return TimeSeriesDataset(path.stem().string(), std::move(series));
}

// minimal CSV field splitter with RFC-4180 style quoting for the id column
std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

TimeSeriesDataset load_csv_long(const std::filesystem::path& path, std::ifstream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(errc::empty_dataset, "empty file: " + path.string());
  {
    auto header = split_csv_row(line);
    if (header.size() != 3 || header[0] != "series_id" || header[1] != "t" ||
        header[2] != "value")
      fail(errc::parse, "expected header series_id,t,value at " + at_line(path, 1));
  }

  struct Row {
    int64_t t;
    double value;
  };
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<Row>> by_id;

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_csv_row(line);
    if (fields.size() != 3)
      fail(errc::parse, "expected 3 fields, got " + std::to_string(fields.size()) + " at " +
                            at_line(path, line_no));

    int64_t t = 0;
    try {
      std::size_t used = 0;
      t = std::stoll(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      fail(errc::parse, "t is not an integer at " + at_line(path, line_no));
    }

    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      if (looks_non_finite(fields[2]))
        fail(errc::non_finite_value, "non-finite value at " + at_line(path, line_no));
      fail(errc::parse, "value is not a number at " + at_line(path, line_no));
    }
    if (!std::isfinite(value))
      fail(errc::non_finite_value, "non-finite value at " + at_line(path, line_no));

    auto [it, inserted] = by_id.try_emplace(fields[0]);
    if (inserted) order.push_back(fields[0]);
    it->second.push_back(Row{t, value});
  }

  std::vector<Series> series;
  series.reserve(order.size());
  for (const auto& id : order) {
    auto& rows = by_id[id];
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.t < b.t; });
    Series s;
    s.id = id;
    s.values.reserve(rows.size());
    for (const Row& r : rows) s.values.push_back(r.value);
    series.push_back(std::move(s));
  }
  return TimeSeriesDataset(path.stem().string(), std::move(series));
}

}  // namespace

TimeSeriesDataset::TimeSeriesDataset(std::string name, std::vector<Series> series)
    : name_(std::move(name)), series_(std::move(series)) {
  if (series_.empty()) fail(errc::empty_dataset, "dataset '" + name_ + "' has no series");
  std::unordered_set<std::string> seen;
  min_ = std::numeric_limits<double>::infinity();
  max_ = -std::numeric_limits<double>::infinity();
  for (const Series& s : series_) {
    if (s.values.empty())
      fail(errc::empty_dataset, "series '" + s.id + "' in dataset '" + name_ + "' is empty");
    if (!seen.insert(s.id).second)
      fail(errc::invalid_argument, "duplicate series id '" + s.id + "' in dataset '" + name_ + "'");
    for (double v : s.values) {
      if (!std::isfinite(v))
        fail(errc::non_finite_value, "non-finite value in series '" + s.id + "'");
      min_ = std::min(min_, v);
      max_ = std::max(max_, v);
    }
  }
}

FileFormat format_from_extension(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".jsonl") return FileFormat::jsonl;
  if (ext == ".csv") return FileFormat::csv_long;
  fail(errc::invalid_argument,
       "cannot infer format from extension '" + ext + "' (expected .jsonl or .csv)");
}

TimeSeriesDataset load_dataset(const std::filesystem::path& path, FileFormat format) {
  std::ifstream in(path);
  if (!in) fail(errc::io, "cannot open " + path.string());
  TimeSeriesDataset ds = format == FileFormat::jsonl ? load_jsonl(path, in)
                                                     : load_csv_long(path, in);
  return ds;
}

TimeSeriesDataset minmax_normalize(const TimeSeriesDataset& ds) {
  const double lo = ds.global_min();
  const double hi = ds.global_max();
  if (!(hi > lo))
    fail(errc::degenerate_range,
         "dataset '" + ds.name() + "' has no value spread (min == max == " +
             std::to_string(lo) + ")");
  const double span = hi - lo;
  std::vector<Series> out;
  out.reserve(ds.series().size());
  for (const Series& s : ds.series()) {
    Series t;
    t.id = s.id;
    t.values.reserve(s.values.size());
    for (double v : s.values) t.values.push_back((v - lo) / span);
    out.push_back(std::move(t));
  }
  return TimeSeriesDataset(ds.name(), std::move(out));
}

}  // namespace tsdist::ingest
