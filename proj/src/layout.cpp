#include "tsdist/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "tsdist/detail/svg_util.hpp"
#include "tsdist/error.hpp"
#include "tsdist/io_util.hpp"
#include "tsdist/rng.hpp"

namespace tsdist::layout {

namespace {

constexpr double kGradientTolerance = 1e-6;
constexpr int kMaxPasses = 1000;
constexpr double kDistanceFloorScale = 1e-6;
constexpr double kTinySeparation = 1e-12;

using Point = std::array<double, 2>;

struct Problem {
  std::size_t n = 0;
  std::vector<double> target;  // floored target distances, row-major
  std::vector<double> weight;  // 1 / target^2

  double t(std::size_t i, std::size_t j) const { return target[i * n + j]; }
  double w(std::size_t i, std::size_t j) const { return weight[i * n + j]; }
};

double stress(const Problem& p, const std::vector<Point>& pos) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.n; ++i)
    for (std::size_t j = i + 1; j < p.n; ++j) {
      const double dx = pos[i][0] - pos[j][0];
      const double dy = pos[i][1] - pos[j][1];
      const double r = std::sqrt(dx * dx + dy * dy);
      const double gap = r - p.t(i, j);
      s += p.w(i, j) * gap * gap;
    }
  return s;
}

Point gradient(const Problem& p, const std::vector<Point>& pos, std::size_t m) {
  double gx = 0.0, gy = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    if (i == m) continue;
    const double dx = pos[m][0] - pos[i][0];
    const double dy = pos[m][1] - pos[i][1];
    const double r = std::max(std::sqrt(dx * dx + dy * dy), kTinySeparation);
    const double f = 2.0 * p.w(m, i) * (1.0 - p.t(m, i) / r);
    gx += f * dx;
    gy += f * dy;
  }
  return {gx, gy};
}

// Newton step for node m: solves the 2x2 system of second partials.
Point newton_step(const Problem& p, const std::vector<Point>& pos, std::size_t m,
                  const Point& grad) {
  double hxx = 0.0, hxy = 0.0, hyy = 0.0;
  for (std::size_t i = 0; i < p.n; ++i) {
    if (i == m) continue;
    const double dx = pos[m][0] - pos[i][0];
    const double dy = pos[m][1] - pos[i][1];
    const double r2 = std::max(dx * dx + dy * dy, kTinySeparation * kTinySeparation);
    const double r = std::sqrt(r2);
    const double r3 = r2 * r;
    const double w = 2.0 * p.w(m, i);
    const double t = p.t(m, i);
    hxx += w * (1.0 - t * dy * dy / r3);
    hyy += w * (1.0 - t * dx * dx / r3);
    hxy += w * t * dx * dy / r3;
  }
  const double det = hxx * hyy - hxy * hxy;
  if (!(std::abs(det) > 1e-300)) return {-grad[0], -grad[1]};  // fall back to steepest descent
  return {(-grad[0] * hyy + grad[1] * hxy) / det, (-grad[1] * hxx + grad[0] * hxy) / det};
}

void canonicalize(std::vector<Point>& pos) {
  const std::size_t n = pos.size();
  double cx = 0.0, cy = 0.0;
  for (const Point& p : pos) {
    cx += p[0];
    cy += p[1];
  }
  cx /= static_cast<double>(n);
  cy /= static_cast<double>(n);
  for (Point& p : pos) {
    p[0] -= cx;
    p[1] -= cy;
  }

  const double r0 = std::hypot(pos[0][0], pos[0][1]);
  if (r0 > kTinySeparation) {
    const double c = pos[0][0] / r0;
    const double s = pos[0][1] / r0;
    for (Point& p : pos) {
      const double x = p[0], y = p[1];
      p[0] = c * x + s * y;   // rotate node 0 onto the +x axis
      p[1] = -s * x + c * y;
    }
  }
  if (n >= 2 && pos[1][1] < 0.0)
    for (Point& p : pos) p[1] = -p[1];
}

}  // namespace

LayoutCoordinates kamada_kawai_layout(const analysis::DistanceMatrix& m, uint64_t seed,
                                      std::vector<double>* stress_trace) {
  m.validate();
  const std::size_t n = m.size();
  if (n < 2) fail(errc::too_few_nodes, "layout needs at least 2 datasets");

  double max_off = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) max_off = std::max(max_off, m.at(i, j));
  if (!(max_off > 0.0))
    fail(errc::non_positive_distance, "all pairwise distances are zero; nothing to embed");
  const double floor = kDistanceFloorScale * max_off;

  Problem prob;
  prob.n = n;
  prob.target.assign(n * n, 0.0);
  prob.weight.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = std::max(m.at(i, j), floor);
      prob.target[i * n + j] = d;
      prob.weight[i * n + j] = 1.0 / (d * d);
    }

  // circle initialization in label order, with a small seeded jitter
  std::vector<std::size_t> label_rank(n);
  {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return m.labels[a] < m.labels[b]; });
    for (std::size_t r = 0; r < n; ++r) label_rank[order[r]] = r;
  }
  const double radius = max_off / 2.0;
  rng::Engine eng(rng::splitmix64(seed));
  std::vector<Point> pos(n);
  std::vector<Point> jitter(n);
  for (std::size_t r = 0; r < n; ++r) {  // draw jitter in label order for order-independence
    jitter[r][0] = rng::uniform(eng, -1.0, 1.0);
    jitter[r][1] = rng::uniform(eng, -1.0, 1.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double angle =
        2.0 * std::numbers::pi * static_cast<double>(label_rank[i]) / static_cast<double>(n);
    pos[i][0] = radius * std::cos(angle) + 1e-3 * radius * jitter[label_rank[i]][0];
    pos[i][1] = radius * std::sin(angle) + 1e-3 * radius * jitter[label_rank[i]][1];
  }

  double current = stress(prob, pos);
  if (stress_trace) {
    stress_trace->clear();
    stress_trace->push_back(current);
  }

  const std::size_t max_updates = static_cast<std::size_t>(kMaxPasses) * n;
  for (std::size_t update = 0; update < max_updates; ++update) {
    // pick the node with the largest gradient norm
    std::size_t worst = 0;
    double worst_norm = -1.0;
    std::vector<Point> grads(n);
    for (std::size_t i = 0; i < n; ++i) {
      grads[i] = gradient(prob, pos, i);
      const double g = std::hypot(grads[i][0], grads[i][1]);
      if (g > worst_norm) {
        worst_norm = g;
        worst = i;
      }
    }
    if (worst_norm <= kGradientTolerance) break;

    const Point step = newton_step(prob, pos, worst, grads[worst]);
    const Point saved = pos[worst];
    bool accepted = false;
    double scale = 1.0;
    for (int halving = 0; halving < 40; ++halving, scale *= 0.5) {
      pos[worst][0] = saved[0] + scale * step[0];
      pos[worst][1] = saved[1] + scale * step[1];
      const double trial = stress(prob, pos);
      if (trial < current) {
        current = trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // try plain steepest descent before giving up on this configuration
      scale = 1.0 / std::max(worst_norm, 1.0);
      for (int halving = 0; halving < 40; ++halving, scale *= 0.5) {
        pos[worst][0] = saved[0] - scale * grads[worst][0];
        pos[worst][1] = saved[1] - scale * grads[worst][1];
        const double trial = stress(prob, pos);
        if (trial < current) {
          current = trial;
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) {
      pos[worst] = saved;  // numerical floor reached; no move can lower stress
      break;
    }
    if (stress_trace) stress_trace->push_back(current);
  }

  canonicalize(pos);

  LayoutCoordinates out;
  out.labels = m.labels;
  out.positions = std::move(pos);
  out.final_stress = current;
  return out;
}

void save_layout_json(const LayoutCoordinates& lc, const std::filesystem::path& path) {
  nlohmann::json doc;
  doc["labels"] = lc.labels;
  nlohmann::json positions = nlohmann::json::array();
  for (const auto& p : lc.positions) positions.push_back({p[0], p[1]});
  doc["positions"] = std::move(positions);
  doc["stress"] = lc.final_stress;
  io::atomic_write(path, doc.dump(2) + "\n");
}

std::vector<std::pair<std::string, std::string>> load_color_map(
    const std::filesystem::path& path) {
  const std::string text = io::read_file(path);
  std::istringstream in(text);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 >= line.size())
      fail(errc::parse,
           "expected 'label,css_color' at " + path.string() + ":" + std::to_string(line_no));
    out.emplace_back(line.substr(0, comma), line.substr(comma + 1));
  }
  return out;
}

void export_layout(const LayoutCoordinates& lc, const analysis::DistanceMatrix& m,
                   const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, std::string>>* color_map) {
  if (lc.labels != m.labels)
    fail(errc::label_mismatch, "layout and matrix carry different dataset labels");
  if (lc.positions.size() != lc.labels.size())
    fail(errc::label_mismatch, "layout has " + std::to_string(lc.positions.size()) +
                                   " positions for " + std::to_string(lc.labels.size()) +
                                   " labels");

  double xmin = lc.positions[0][0], xmax = xmin, ymin = lc.positions[0][1], ymax = ymin;
  for (const auto& p : lc.positions) {
    xmin = std::min(xmin, p[0]);
    xmax = std::max(xmax, p[0]);
    ymin = std::min(ymin, p[1]);
    ymax = std::max(ymax, p[1]);
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-9});
  const int size = 520, margin = 56;
  const double scale = (size - 2 * margin) / span;
  auto px = [&](double x) { return margin + (x - xmin) * scale; };
  auto py = [&](double y) { return size - margin - (y - ymin) * scale; };  // y up

  auto color_for = [&](const std::string& label) -> std::string {
    if (color_map)
      for (const auto& [key, color] : *color_map)
        if (key == label) return color;
    return "rgb(40,90,160)";
  };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(size) +
       "\" height=\"" + std::to_string(size) + "\" viewBox=\"0 0 " + std::to_string(size) + " " +
       std::to_string(size) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const char* font = " font-family=\"monospace\" font-size=\"10\"";
  for (std::size_t i = 0; i < lc.labels.size(); ++i) {
    const double x = px(lc.positions[i][0]);
    const double y = py(lc.positions[i][1]);
    s += "<circle cx=\"" + svg::fmt(x) + "\" cy=\"" + svg::fmt(y) + "\" r=\"5\" fill=\"" +
         svg::xml_escape(color_for(lc.labels[i])) + "\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    s += "<text x=\"" + svg::fmt(x + 7) + "\" y=\"" + svg::fmt(y - 5) + "\"" + font + ">" +
         svg::xml_escape(lc.labels[i]) + "</text>\n";
  }
  s += "<text x=\"8\" y=\"" + std::to_string(size - 8) + "\"" + font +
       ">metric: " + std::string(analysis::metric_name(m.metric)) +
       ", stress: " + svg::fmt_value(lc.final_stress) + "</text>\n";
  s += "</svg>\n";

  io::atomic_write(path, s);
}

}  // namespace tsdist::layout
