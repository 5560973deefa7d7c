#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "tsdist/error.hpp"
#include "tsdist/io_util.hpp"
#include "tsdist/layout.hpp"

using tsdist::Error;
using tsdist::errc;
using tsdist::analysis::DistanceMatrix;
using tsdist::analysis::Metric;
using namespace tsdist::layout;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("tsdist_layout_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

DistanceMatrix matrix_of(std::vector<std::string> labels, std::vector<double> values) {
  DistanceMatrix m;
  m.metric = Metric::wasserstein;
  m.labels = std::move(labels);
  m.values = std::move(values);
  return m;
}

double realized(const LayoutCoordinates& lc, std::size_t i, std::size_t j) {
  return std::hypot(lc.positions[i][0] - lc.positions[j][0],
                    lc.positions[i][1] - lc.positions[j][1]);
}

std::vector<double> realized_multiset(const LayoutCoordinates& lc) {
  std::vector<double> out;
  for (std::size_t i = 0; i < lc.positions.size(); ++i)
    for (std::size_t j = i + 1; j < lc.positions.size(); ++j) out.push_back(realized(lc, i, j));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("two nodes settle exactly one target distance apart") {
  const auto m = matrix_of({"a", "b"}, {0.0, 1.0, 1.0, 0.0});
  const auto lc = kamada_kawai_layout(m, 42);
  // the gradient stop at 1e-6 pins the realized gap to ~5e-7 of the target
  CHECK(std::abs(realized(lc, 0, 1) - 1.0) <= 1e-6);
  CHECK(lc.final_stress <= 1e-12);
  // canonical frame: centroid at origin, node 0 on the +x axis
  CHECK(std::abs(lc.positions[0][0] + lc.positions[1][0]) <= 1e-9);
  CHECK(std::abs(lc.positions[0][1] + lc.positions[1][1]) <= 1e-9);
  CHECK(lc.positions[0][0] >= 0.0);
  CHECK(std::abs(lc.positions[0][1]) <= 1e-9);
}

TEST_CASE("unit equilateral triangle embeds with near-zero stress") {
  const auto m = matrix_of({"a", "b", "c"},
                           {0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0});
  std::vector<double> trace;
  const auto lc = kamada_kawai_layout(m, 42, &trace);
  CHECK(lc.final_stress <= 1e-6);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) CHECK(std::abs(realized(lc, i, j) - 1.0) <= 1e-4);
  CHECK(std::is_sorted(trace.begin(), trace.end(), std::greater<double>()));  // non-increasing
}

TEST_CASE("3-4-5 triangle realizes its target distances") {
  const auto m = matrix_of({"a", "b", "c"},
                           {0.0, 3.0, 4.0, 3.0, 0.0, 5.0, 4.0, 5.0, 0.0});
  std::vector<double> trace;
  const auto lc = kamada_kawai_layout(m, 7, &trace);
  CHECK(lc.final_stress <= 1e-6);
  CHECK(std::abs(realized(lc, 0, 1) - 3.0) <= 1e-3);
  CHECK(std::abs(realized(lc, 0, 2) - 4.0) <= 1e-3);
  CHECK(std::abs(realized(lc, 1, 2) - 5.0) <= 1e-3);
  CHECK(std::is_sorted(trace.begin(), trace.end(), std::greater<double>()));
}

TEST_CASE("stress is monotone non-increasing on a non-embeddable metric") {
  // K4 with all distances 1 cannot embed in the plane: stress stays positive
  std::vector<double> v(16, 1.0);
  for (int i = 0; i < 4; ++i) v[i * 4 + i] = 0.0;
  const auto m = matrix_of({"a", "b", "c", "d"}, std::move(v));
  std::vector<double> trace;
  const auto lc = kamada_kawai_layout(m, 3, &trace);
  CHECK(lc.final_stress > 1e-4);
  REQUIRE(trace.size() >= 2);
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1]);
}

TEST_CASE("centroid is at the origin and orientation is canonical") {
  const auto m = matrix_of({"a", "b", "c"},
                           {0.0, 1.0, 2.0, 1.0, 0.0, 2.5, 2.0, 2.5, 0.0});
  const auto lc = kamada_kawai_layout(m, 11);
  double cx = 0.0, cy = 0.0;
  for (const auto& p : lc.positions) {
    cx += p[0];
    cy += p[1];
  }
  CHECK(std::abs(cx / 3.0) <= 1e-9);
  CHECK(std::abs(cy / 3.0) <= 1e-9);
  CHECK(std::abs(lc.positions[0][1]) <= 1e-9);  // node 0 on the x axis
  CHECK(lc.positions[0][0] >= -1e-12);
  CHECK(lc.positions[1][1] >= -1e-12);  // reflection rule
}

TEST_CASE("permuting labels leaves the realized distance multiset unchanged") {
  const auto m = matrix_of({"a", "b", "c"},
                           {0.0, 1.0, 2.0, 1.0, 0.0, 2.5, 2.0, 2.5, 0.0});
  // same metric with rows/cols permuted (order c, a, b)
  const auto p = matrix_of({"c", "a", "b"},
                           {0.0, 2.0, 2.5, 2.0, 0.0, 1.0, 2.5, 1.0, 0.0});
  const auto lc1 = kamada_kawai_layout(m, 99);
  const auto lc2 = kamada_kawai_layout(p, 99);
  const auto d1 = realized_multiset(lc1);
  const auto d2 = realized_multiset(lc2);
  REQUIRE(d1.size() == d2.size());
  for (std::size_t i = 0; i < d1.size(); ++i) CHECK(std::abs(d1[i] - d2[i]) <= 1e-9);
}

TEST_CASE("duplicate datasets (zero distance) get a floored target") {
  const auto m = matrix_of({"a", "b", "c"},
                           {0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0});
  const auto lc = kamada_kawai_layout(m, 1);
  CHECK(std::isfinite(lc.final_stress));
  CHECK(realized(lc, 0, 1) < 0.1);  // the duplicates land close together
}

TEST_CASE("layout error paths") {
  DistanceMatrix tiny;
  tiny.metric = Metric::wasserstein;
  tiny.labels = {"only"};
  tiny.values = {0.0};
  CHECK_THROWS_AS(kamada_kawai_layout(tiny, 1), Error);

  const auto zeros = matrix_of({"a", "b"}, {0.0, 0.0, 0.0, 0.0});
  try {
    kamada_kawai_layout(zeros, 1);
    FAIL("expected NonPositiveDistance");
  } catch (const Error& e) {
    CHECK(e.code() == errc::non_positive_distance);
  }
}

TEST_CASE("layout json and svg exports") {
  TempDir tmp;
  const auto m = matrix_of({"a", "b"}, {0.0, 1.0, 1.0, 0.0});
  const auto lc = kamada_kawai_layout(m, 42);

  const auto jp = tmp.path / "layout.json";
  save_layout_json(lc, jp);
  const std::string json_text = tsdist::io::read_file(jp);
  CHECK(json_text.find("\"labels\"") != std::string::npos);
  CHECK(json_text.find("\"positions\"") != std::string::npos);
  CHECK(json_text.find("\"stress\"") != std::string::npos);

  const auto sp1 = tmp.path / "l1.svg";
  const auto sp2 = tmp.path / "l2.svg";
  export_layout(lc, m, sp1);
  export_layout(lc, m, sp2);
  const std::string svg1 = tsdist::io::read_file(sp1);
  CHECK(svg1 == tsdist::io::read_file(sp2));  // deterministic bytes
  CHECK(svg1.find("<circle") != std::string::npos);
  CHECK(svg1.find(">a</text>") != std::string::npos);

  // color map applies one shared color to both nodes
  const auto cm = tmp.path / "colors.csv";
  std::ofstream(cm) << "a,rgb(200,40,40)\nb,rgb(200,40,40)\n";
  const auto colors = load_color_map(cm);
  const auto sp3 = tmp.path / "l3.svg";
  export_layout(lc, m, sp3, &colors);
  const std::string svg3 = tsdist::io::read_file(sp3);
  std::size_t occurrences = 0, pos = 0;
  while ((pos = svg3.find("rgb(200,40,40)", pos)) != std::string::npos) {
    ++occurrences;
    pos += 1;
  }
  CHECK(occurrences == 2);
}

TEST_CASE("label mismatch between layout and matrix is rejected") {
  TempDir tmp;
  const auto m = matrix_of({"a", "b"}, {0.0, 1.0, 1.0, 0.0});
  const auto lc = kamada_kawai_layout(m, 42);
  const auto other = matrix_of({"a", "z"}, {0.0, 1.0, 1.0, 0.0});
  try {
    export_layout(lc, other, tmp.path / "x.svg");
    FAIL("expected LabelMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == errc::label_mismatch);
  }
}
