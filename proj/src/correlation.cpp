#include "tsdist/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

#include "tsdist/detail/svg_util.hpp"
#include "tsdist/error.hpp"
#include "tsdist/io_util.hpp"

namespace tsdist::analysis {

namespace {

// average ranks, ties share the mean of their positions
std::vector<double> ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double shared = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = shared;
    i = j + 1;
  }
  return r;
}

double pearson(std::span<const double> x, std::span<const double> y, double* slope,
               double* intercept) {
  const std::size_t n = x.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx *= inv_n;
  my *= inv_n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (!(sxx > 0.0)) fail(errc::degenerate_variance, "distance vector is constant");
  if (!(syy > 0.0)) fail(errc::degenerate_variance, "loss vector is constant");
  if (slope) *slope = sxy / sxx;
  if (intercept) *intercept = my - (sxy / sxx) * mx;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

CorrelationReport correlate(std::span<const double> distances, std::span<const double> losses,
                            std::span<const std::string> labels) {
  if (distances.size() != losses.size() ||
      (!labels.empty() && labels.size() != distances.size()))
    fail(errc::length_mismatch, "distance/loss/label lengths differ");
  if (distances.size() < 3)
    fail(errc::insufficient_overlap,
         "need at least 3 points, got " + std::to_string(distances.size()));
  for (double v : distances)
    if (!std::isfinite(v)) fail(errc::non_finite_value, "non-finite distance");
  for (double v : losses)
    if (!std::isfinite(v)) fail(errc::non_finite_value, "non-finite loss");

  CorrelationReport r;
  r.n = distances.size();
  r.pearson_r = pearson(distances, losses, &r.slope, &r.intercept);
  const auto rx = ranks(distances);
  const auto ry = ranks(losses);
  r.spearman_r = pearson(rx, ry, nullptr, nullptr);
  r.pairs.reserve(r.n);
  for (std::size_t i = 0; i < r.n; ++i)
    r.pairs.push_back({labels.empty() ? std::string() : labels[i], distances[i], losses[i]});
  return r;
}

CorrelationReport correlate_against_losses(const DistanceMatrix& m,
                                           const std::string& source_label,
                                           std::span<const std::string> loss_labels,
                                           std::span<const double> loss_values) {
  if (loss_labels.size() != loss_values.size())
    fail(errc::length_mismatch, "loss label/value lengths differ");
  const auto it = std::find(m.labels.begin(), m.labels.end(), source_label);
  if (it == m.labels.end())
    fail(errc::unknown_source_label, "'" + source_label + "' is not a dataset in the matrix");
  const std::size_t src = static_cast<std::size_t>(it - m.labels.begin());

  std::unordered_map<std::string, double> table;
  for (std::size_t i = 0; i < loss_labels.size(); ++i) table[loss_labels[i]] = loss_values[i];

  std::vector<double> distances, losses;
  std::vector<std::string> kept, missing;
  for (std::size_t j = 0; j < m.size(); ++j) {
    const auto found = table.find(m.labels[j]);
    if (found == table.end()) {
      missing.push_back(m.labels[j]);
      continue;
    }
    kept.push_back(m.labels[j]);
    distances.push_back(m.at(src, j));
    losses.push_back(found->second);
  }
  if (distances.size() < 3)
    fail(errc::insufficient_overlap, "only " + std::to_string(distances.size()) +
                                         " matrix datasets have loss values; need at least 3");

  CorrelationReport r = correlate(distances, losses, kept);
  r.missing_labels = std::move(missing);
  return r;
}

void save_correlation_json(const CorrelationReport& r, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["pearson_r"] = r.pearson_r;
  doc["spearman_r"] = r.spearman_r;
  doc["slope"] = r.slope;
  doc["intercept"] = r.intercept;
  doc["n"] = r.n;
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : r.pairs)
    pairs.push_back({{"label", p.label}, {"distance", p.distance}, {"loss", p.loss}});
  doc["pairs"] = std::move(pairs);
  doc["missing_labels"] = r.missing_labels;
  io::atomic_write(path, doc.dump(2) + "\n");
}

void export_scatter(const CorrelationReport& r, const std::filesystem::path& path) {
  if (r.pairs.empty()) fail(errc::empty_input, "nothing to plot");

  double xmin = r.pairs[0].distance, xmax = xmin, ymin = r.pairs[0].loss, ymax = ymin;
  for (const auto& p : r.pairs) {
    xmin = std::min(xmin, p.distance);
    xmax = std::max(xmax, p.distance);
    ymin = std::min(ymin, p.loss);
    ymax = std::max(ymax, p.loss);
  }
  const double xpad = xmax > xmin ? 0.05 * (xmax - xmin) : 1.0;
  const double ypad = ymax > ymin ? 0.05 * (ymax - ymin) : 1.0;
  xmin -= xpad;
  xmax += xpad;
  ymin -= ypad;
  ymax += ypad;

  const int width = 480, height = 360, left = 64, right = 16, top = 16, bottom = 48;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * plot_h; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
       "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
       " " + std::to_string(height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<rect x=\"" + std::to_string(left) + "\" y=\"" + std::to_string(top) + "\" width=\"" +
       svg::fmt(plot_w) + "\" height=\"" + svg::fmt(plot_h) +
       "\" fill=\"none\" stroke=\"black\"/>\n";

  const char* font = " font-family=\"monospace\" font-size=\"11\"";
  // best-fit line drawn in red across the x range
  {
    const double y0 = r.slope * xmin + r.intercept;
    const double y1 = r.slope * xmax + r.intercept;
    s += "<line x1=\"" + svg::fmt(px(xmin)) + "\" y1=\"" + svg::fmt(py(y0)) + "\" x2=\"" +
         svg::fmt(px(xmax)) + "\" y2=\"" + svg::fmt(py(y1)) +
         "\" stroke=\"red\" stroke-width=\"1.5\"/>\n";
  }
  for (const auto& p : r.pairs) {
    s += "<circle cx=\"" + svg::fmt(px(p.distance)) + "\" cy=\"" + svg::fmt(py(p.loss)) +
         "\" r=\"3\" fill=\"rgb(40,90,160)\"/>\n";
    if (!p.label.empty())
      s += "<text x=\"" + svg::fmt(px(p.distance) + 5) + "\" y=\"" + svg::fmt(py(p.loss) - 4) +
           "\"" + font + " font-size=\"8\">" + svg::xml_escape(p.label) + "</text>\n";
  }

  // axis annotations: min/max on each axis plus the fitted statistics
  s += "<text x=\"" + std::to_string(left) + "\" y=\"" + std::to_string(height - bottom + 16) +
       "\"" + font + ">" + svg::fmt_value(xmin + xpad) + "</text>\n";
  s += "<text x=\"" + std::to_string(width - right) + "\" y=\"" +
       std::to_string(height - bottom + 16) + "\" text-anchor=\"end\"" + font + ">" +
       svg::fmt_value(xmax - xpad) + "</text>\n";
  s += "<text x=\"" + std::to_string(left - 6) + "\" y=\"" + std::to_string(height - bottom) +
       "\" text-anchor=\"end\"" + font + ">" + svg::fmt_value(ymin + ypad) + "</text>\n";
  s += "<text x=\"" + std::to_string(left - 6) + "\" y=\"" + std::to_string(top + 10) +
       "\" text-anchor=\"end\"" + font + ">" + svg::fmt_value(ymax - ypad) + "</text>\n";
  s += "<text x=\"" + std::to_string(left + 4) + "\" y=\"" + std::to_string(height - 8) + "\"" +
       font + ">distance vs loss; pearson r = " + svg::fmt_value(r.pearson_r) + ", fit y = " +
       svg::fmt_value(r.slope) + "x + " + svg::fmt_value(r.intercept) + "</text>\n";
  s += "</svg>\n";

  io::atomic_write(path, s);
}

}  // namespace tsdist::analysis
