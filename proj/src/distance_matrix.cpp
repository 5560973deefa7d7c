#include "tsdist/distance_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "tsdist/baselines.hpp"
#include "tsdist/detail/svg_util.hpp"
#include "tsdist/error.hpp"
#include "tsdist/io_util.hpp"
#include "tsdist/parallel.hpp"

namespace tsdist::analysis {

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::wasserstein: return "wasserstein";
    case Metric::euclidean: return "euclidean";
    case Metric::dtw: return "dtw";
    case Metric::link_min: return "link-min";
    case Metric::link_avg: return "link-avg";
    case Metric::link_max: return "link-max";
  }
  return "?";
}

Metric metric_from_name(const std::string& name) {
  for (Metric m : {Metric::wasserstein, Metric::euclidean, Metric::dtw, Metric::link_min,
                   Metric::link_avg, Metric::link_max})
    if (name == metric_name(m)) return m;
  fail(errc::invalid_argument, "unknown metric '" + name + "'");
}

bool metric_needs_raw_data(Metric m) {
  return m == Metric::link_min || m == Metric::link_avg || m == Metric::link_max;
}

void DistanceMatrix::validate() const {
  const std::size_t m = labels.size();
  if (m < 2) fail(errc::too_few_nodes, "distance matrix needs at least 2 datasets");
  if (values.size() != m * m)
    fail(errc::invalid_argument, "distance matrix value count does not match label count");
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double v = at(i, j);
      if (!std::isfinite(v) || v < 0.0)
        fail(errc::invalid_argument, "distance matrix entry (" + std::to_string(i) + "," +
                                         std::to_string(j) + ") is negative or non-finite");
      if (at(i, j) != at(j, i))
        fail(errc::invalid_argument, "distance matrix is not symmetric at (" + std::to_string(i) +
                                         "," + std::to_string(j) + ")");
    }
}

namespace {

struct PairTask {
  std::size_t i, j;
};

std::vector<PairTask> unordered_pairs(std::size_t m, bool with_diagonal) {
  std::vector<PairTask> tasks;
  tasks.reserve(m * (m + 1) / 2);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = with_diagonal ? i : i + 1; j < m; ++j) tasks.push_back({i, j});
  return tasks;
}

void check_unique_labels(const std::vector<std::string>& labels) {
  std::vector<std::string> sorted = labels;
  std::sort(sorted.begin(), sorted.end());
  auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end())
    fail(errc::invalid_argument, "duplicate dataset label '" + *dup + "'");
}

template <typename PairFn>
DistanceMatrix assemble(std::vector<std::string> labels, Metric metric, bool with_diagonal,
                        int threads, PairFn&& pair_distance) {
  const std::size_t m = labels.size();
  DistanceMatrix out;
  out.metric = metric;
  out.labels = std::move(labels);
  out.values.assign(m * m, 0.0);

  const auto tasks = unordered_pairs(m, with_diagonal);
  parallel_tasks(tasks.size(), threads, [&](std::size_t t) {
    const auto [i, j] = tasks[t];
    double d;
    try {
      d = pair_distance(i, j);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(e.what()) + " (pair '" + out.labels[i] + "' vs '" +
                                out.labels[j] + "')");
    }
    out.at(i, j) = d;
    out.at(j, i) = d;  // one computation per unordered pair keeps symmetry exact
  });
  return out;
}

}  // namespace

DistanceMatrix pairwise_from_mvns(std::span<const gaussian::MvnParams> params, Metric metric,
                                  int threads) {
  if (params.size() < 2) fail(errc::too_few_nodes, "need at least 2 datasets");
  if (metric_needs_raw_data(metric))
    fail(errc::metric_needs_raw_data,
         std::string(metric_name(metric)) + " requires raw sample matrices, not sketches");

  std::vector<std::string> labels;
  labels.reserve(params.size());
  for (const auto& p : params) labels.push_back(p.dataset_name);
  check_unique_labels(labels);
  for (std::size_t i = 1; i < params.size(); ++i)
    if (params[i].dim() != params[0].dim())
      fail(errc::dimension_mismatch, "dataset '" + params[i].dataset_name + "' has dimension " +
                                         std::to_string(params[i].dim()) + ", expected " +
                                         std::to_string(params[0].dim()));

  if (metric == Metric::wasserstein) {
    // one O(L^3) square root per dataset, reused across all pairs
    std::vector<gaussian::WassersteinPrep> preps(params.size());
    parallel_tasks(params.size(), threads,
                   [&](std::size_t i) { preps[i] = gaussian::prepare_wasserstein(params[i]); });
    return assemble(std::move(labels), metric, false, threads, [&](std::size_t i, std::size_t j) {
      return gaussian::wasserstein_prepared(preps[i], params[j]);
    });
  }
  if (metric == Metric::euclidean)
    return assemble(std::move(labels), metric, false, threads, [&](std::size_t i, std::size_t j) {
      return baselines::euclidean_mean_distance(params[i], params[j]);
    });
  return assemble(std::move(labels), metric, false, threads, [&](std::size_t i, std::size_t j) {
    return baselines::dtw_mean_distance(params[i], params[j]);
  });
}

DistanceMatrix pairwise_matrix(std::span<const ingest::SampleMatrix> datasets, Metric metric,
                               int threads, std::size_t linkage_subsample) {
  if (datasets.size() < 2) fail(errc::too_few_nodes, "need at least 2 datasets");
  for (std::size_t i = 1; i < datasets.size(); ++i)
    if (datasets[i].cols() != datasets[0].cols())
      fail(errc::dimension_mismatch,
           "dataset '" + datasets[i].dataset_name() + "' has window length " +
               std::to_string(datasets[i].cols()) + ", expected " +
               std::to_string(datasets[0].cols()));

  if (!metric_needs_raw_data(metric)) {
    std::vector<gaussian::MvnParams> params(datasets.size());
    parallel_tasks(datasets.size(), threads,
                   [&](std::size_t i) { params[i] = gaussian::fit_mvn(datasets[i]); });
    return pairwise_from_mvns(params, metric, threads);
  }

  std::vector<std::string> labels;
  labels.reserve(datasets.size());
  for (const auto& d : datasets) labels.push_back(d.dataset_name());
  check_unique_labels(labels);

  const baselines::LinkageKind kind = metric == Metric::link_min ? baselines::LinkageKind::min
                                      : metric == Metric::link_avg
                                          ? baselines::LinkageKind::avg
                                          : baselines::LinkageKind::max;
  // parallelism lives inside linkage_all's row blocks; the diagonal is a
  // genuine self-distance for linkage metrics
  return assemble(std::move(labels), metric, true, 1, [&](std::size_t i, std::size_t j) {
    return baselines::linkage_distance(datasets[i], datasets[j], kind, threads,
                                       linkage_subsample);
  });
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += "\"";
  return out;
}

std::vector<std::string> csv_split(const std::string& line) {
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

DistanceMatrix matrix_from_json_text(const std::string& text, const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(errc::parse, std::string(e.what()) + " in " + origin);
  }
  if (!doc.is_object() || !doc.contains("metric") || !doc.contains("labels") ||
      !doc.contains("values"))
    fail(errc::parse, "matrix JSON must carry metric/labels/values: " + origin);

  DistanceMatrix m;
  m.metric = metric_from_name(doc["metric"].get<std::string>());
  m.labels = doc["labels"].get<std::vector<std::string>>();
  const auto& rows = doc["values"];
  if (!rows.is_array() || rows.size() != m.labels.size())
    fail(errc::parse, "values row count does not match labels in " + origin);
  m.values.reserve(m.labels.size() * m.labels.size());
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != m.labels.size())
      fail(errc::parse, "ragged values rows in " + origin);
    for (const auto& v : row) {
      if (!v.is_number()) fail(errc::parse, "non-numeric matrix entry in " + origin);
      m.values.push_back(v.get<double>());
    }
  }
  m.validate();
  return m;
}

DistanceMatrix matrix_from_csv_text(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(errc::parse, "empty matrix CSV: " + origin);
  auto header = csv_split(line);
  if (header.size() < 3 || header[0] != "label")
    fail(errc::parse, "matrix CSV header must start with 'label': " + origin);

  DistanceMatrix m;
  m.labels.assign(header.begin() + 1, header.end());
  const std::size_t n = m.labels.size();
  m.values.assign(n * n, 0.0);

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (row >= n) fail(errc::parse, "too many rows in " + origin);
    auto fields = csv_split(line);
    if (fields.size() != n + 1)
      fail(errc::parse, "row " + std::to_string(row + 2) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(n + 1) + " in " + origin);
    if (fields[0] != m.labels[row])
      fail(errc::parse, "row label '" + fields[0] + "' does not match column label '" +
                            m.labels[row] + "' in " + origin);
    for (std::size_t j = 0; j < n; ++j) {
      try {
        std::size_t used = 0;
        m.values[row * n + j] = std::stod(fields[j + 1], &used);
        if (used != fields[j + 1].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        fail(errc::parse, "bad numeric field in row " + std::to_string(row + 2) + " of " + origin);
      }
    }
    ++row;
  }
  if (row != n) fail(errc::parse, "expected " + std::to_string(n) + " rows in " + origin);

  // the CSV layout carries no metric tag; default it (the JSON form keeps it)
  m.metric = Metric::wasserstein;
  m.validate();
  return m;
}

}  // namespace

void save_matrix_csv(const DistanceMatrix& m, const std::filesystem::path& path) {
  m.validate();
  std::string out = "label";
  for (const auto& l : m.labels) {
    out += ",";
    out += csv_quote(l);
  }
  out += "\n";
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    out += csv_quote(m.labels[i]);
    for (std::size_t j = 0; j < n; ++j) {
      out += ",";
      out += io::format_double(m.at(i, j));
    }
    out += "\n";
  }
  io::atomic_write(path, out);
}

void save_matrix_json(const DistanceMatrix& m, const std::filesystem::path& path) {
  m.validate();
  nlohmann::json doc;
  doc["metric"] = metric_name(m.metric);
  doc["labels"] = m.labels;
  nlohmann::json rows = nlohmann::json::array();
  const std::size_t n = m.size();
  for (std::size_t i = 0; i < n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < n; ++j) row.push_back(m.at(i, j));
    rows.push_back(std::move(row));
  }
  doc["values"] = std::move(rows);
  io::atomic_write(path, doc.dump(2) + "\n");
}

DistanceMatrix load_matrix(const std::filesystem::path& path) {
  const std::string text = io::read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) fail(errc::parse, "empty matrix file: " + path.string());
  if (text[first] == '{') return matrix_from_json_text(text, path.string());
  return matrix_from_csv_text(text, path.string());
}

void export_heatmap(const DistanceMatrix& m, const std::filesystem::path& path) {
  m.validate();
  const std::size_t n = m.size();

  double vmin = m.values[0], vmax = m.values[0];
  for (double v : m.values) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }

  std::size_t label_chars = 0;
  for (const auto& l : m.labels) label_chars = std::max(label_chars, l.size());

  const int cell = 22;
  const int left = static_cast<int>(label_chars) * 7 + 16;
  const int top = static_cast<int>(label_chars) * 7 + 16;
  const int grid = cell * static_cast<int>(n);
  const int bar_gap = 24, bar_w = 18, bar_right = 64;
  const int width = left + grid + bar_gap + bar_w + bar_right;
  const int height = top + grid + 16;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
       "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
       " " + std::to_string(height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto c = svg::distance_color(m.at(i, j), vmin, vmax);
      s += "<rect x=\"" + std::to_string(left + static_cast<int>(j) * cell) + "\" y=\"" +
           std::to_string(top + static_cast<int>(i) * cell) + "\" width=\"" +
           std::to_string(cell) + "\" height=\"" + std::to_string(cell) + "\" fill=\"" +
           svg::rgb_string(c) + "\"/>\n";
    }

  const char* font = " font-family=\"monospace\" font-size=\"11\"";
  for (std::size_t i = 0; i < n; ++i) {
    const int cy = top + static_cast<int>(i) * cell + cell / 2 + 4;
    s += "<text x=\"" + std::to_string(left - 6) + "\" y=\"" + std::to_string(cy) +
         "\" text-anchor=\"end\"" + font + ">" + svg::xml_escape(m.labels[i]) + "</text>\n";
    const int cx = left + static_cast<int>(i) * cell + cell / 2 + 4;
    s += "<text x=\"" + std::to_string(cx) + "\" y=\"" + std::to_string(top - 6) +
         "\" text-anchor=\"start\"" + font + " transform=\"rotate(-90 " + std::to_string(cx) +
         " " + std::to_string(top - 6) + ")\">" + svg::xml_escape(m.labels[i]) + "</text>\n";
  }

  // colorbar, dark (minimum) at the bottom
  const int bar_x = left + grid + bar_gap;
  const int strips = 64;
  for (int k = 0; k < strips; ++k) {
    const double t = (k + 0.5) / strips;
    const int y = top + grid - (k + 1) * grid / strips;
    const int h = top + grid - k * grid / strips - y;
    s += "<rect x=\"" + std::to_string(bar_x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
         std::to_string(bar_w) + "\" height=\"" + std::to_string(h) + "\" fill=\"" +
         svg::rgb_string(svg::sequential_color(t)) + "\"/>\n";
  }
  s += "<rect x=\"" + std::to_string(bar_x) + "\" y=\"" + std::to_string(top) + "\" width=\"" +
       std::to_string(bar_w) + "\" height=\"" + std::to_string(grid) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  s += "<text x=\"" + std::to_string(bar_x + bar_w + 4) + "\" y=\"" + std::to_string(top + 10) +
       "\"" + font + ">" + svg::fmt_value(vmax) + "</text>\n";
  s += "<text x=\"" + std::to_string(bar_x + bar_w + 4) + "\" y=\"" + std::to_string(top + grid) +
       "\"" + font + ">" + svg::fmt_value(vmin) + "</text>\n";
  s += "<text x=\"" + std::to_string(left) + "\" y=\"" + std::to_string(height - 4) + "\"" + font +
       ">metric: " + metric_name(m.metric) + "</text>\n";
  s += "</svg>\n";

  io::atomic_write(path, s);
}

}  // namespace tsdist::analysis
