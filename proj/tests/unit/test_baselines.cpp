#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "test_helpers.hpp"
#include "tsdist/baselines.hpp"
#include "tsdist/error.hpp"
#include "tsdist/rng.hpp"

using tsdist::Error;
using tsdist::errc;
using namespace tsdist::baselines;
using test_helpers::random_samples;

namespace {

// exhaustive DTW oracle: enumerate every monotone warping path from (0,0)
// to (n-1, m-1) with steps (+1,0), (0,+1), (+1,+1) and take the cheapest
double dtw_brute(const std::vector<double>& x, const std::vector<double>& y, std::size_t i,
                 std::size_t j) {
  const double cost = std::abs(x[i] - y[j]);
  if (i == 0 && j == 0) return cost;
  double best = std::numeric_limits<double>::infinity();
  if (i > 0 && j > 0) best = std::min(best, dtw_brute(x, y, i - 1, j - 1));
  if (j > 0) best = std::min(best, dtw_brute(x, y, i, j - 1));
  if (i > 0) best = std::min(best, dtw_brute(x, y, i - 1, j));
  return cost + best;
}

double dtw_brute(const std::vector<double>& x, const std::vector<double>& y) {
  return dtw_brute(x, y, x.size() - 1, y.size() - 1);
}

// naive double-loop linkage oracle
LinkageResult linkage_naive(const tsdist::ingest::SampleMatrix& a,
                            const tsdist::ingest::SampleMatrix& b) {
  LinkageResult r;
  r.min = std::numeric_limits<double>::infinity();
  r.max = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < a.cols(); ++c) {
        const double d = a.row(i)[c] - b.row(j)[c];
        s += d * d;
      }
      const double dist = std::sqrt(s);
      r.min = std::min(r.min, dist);
      r.max = std::max(r.max, dist);
      sum += dist;
    }
  r.avg = sum / (static_cast<double>(a.rows()) * static_cast<double>(b.rows()));
  return r;
}

tsdist::gaussian::MvnParams mvn_with_mean(std::vector<double> mean) {
  tsdist::gaussian::MvnParams p;
  p.dataset_name = "m";
  p.cov = tsdist::linalg::Matrix(mean.size(), mean.size());
  p.mean = std::move(mean);
  p.sample_count = 10;
  return p;
}

tsdist::ingest::SampleMatrix rows_matrix(std::vector<std::vector<double>> rows,
                                         const std::string& name = "m") {
  const std::size_t n = rows.size(), l = rows[0].size();
  std::vector<double> data;
  for (const auto& r : rows) data.insert(data.end(), r.begin(), r.end());
  tsdist::ingest::SamplingConfig cfg;
  cfg.window_length = static_cast<uint32_t>(l);
  cfg.sample_count = static_cast<uint32_t>(n);
  return tsdist::ingest::SampleMatrix::from_data(name, n, l, std::move(data), cfg);
}

}  // namespace

TEST_CASE("euclidean mean distance") {
  CHECK(euclidean_mean_distance(mvn_with_mean({0.3, 0.7}), mvn_with_mean({0.3, 0.7})) == 0.0);
  CHECK(euclidean_mean_distance(mvn_with_mean({0.0, 0.0}), mvn_with_mean({3.0, 4.0})) ==
        doctest::Approx(5.0).epsilon(1e-15));
  CHECK_THROWS_AS(euclidean_mean_distance(mvn_with_mean({0.0}), mvn_with_mean({0.0, 0.0})),
                  Error);
}

TEST_CASE("euclidean mean equals wasserstein under identical covariances") {
  tsdist::rng::Engine eng(3);
  auto a = tsdist::gaussian::fit_mvn(random_samples("a", 60, 5, eng));
  auto b = a;
  b.dataset_name = "b";
  for (auto& m : b.mean) m = std::min(1.0, m + 0.1);
  CHECK(std::abs(euclidean_mean_distance(a, b) - tsdist::gaussian::wasserstein_distance(a, b)) <=
        1e-7);
}

TEST_CASE("dtw hand examples") {
  CHECK(dtw_distance(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3}) == 0.0);
  CHECK(dtw_distance(std::vector<double>{0, 0}, std::vector<double>{1, 1}) == 2.0);
  CHECK(dtw_distance(std::vector<double>{1, 2, 3}, std::vector<double>{2, 3}) == 1.0);
}

TEST_CASE("dtw equals the exhaustive path oracle on short sequences") {
  tsdist::rng::Engine eng(44);
  for (int rep = 0; rep < 60; ++rep) {
    const std::size_t nx = 1 + tsdist::rng::bounded(eng, 8);
    const std::size_t ny = 1 + tsdist::rng::bounded(eng, 8);
    std::vector<double> x(nx), y(ny);
    const bool integers = rep % 2 == 0;
    for (auto& v : x)
      v = integers ? static_cast<double>(tsdist::rng::bounded(eng, 10)) : tsdist::rng::u01(eng);
    for (auto& v : y)
      v = integers ? static_cast<double>(tsdist::rng::bounded(eng, 10)) : tsdist::rng::u01(eng);
    const double got = dtw_distance(x, y);
    const double want = dtw_brute(x, y);
    if (integers)
      CHECK(got == want);
    else
      CHECK(std::abs(got - want) <= 1e-12);
  }
}

TEST_CASE("dtw properties") {
  tsdist::rng::Engine eng(45);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 1 + tsdist::rng::bounded(eng, 12);
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = tsdist::rng::u01(eng);
    for (auto& v : y) v = tsdist::rng::u01(eng);

    CHECK(dtw_distance(x, y) == dtw_distance(y, x));  // exact symmetry
    CHECK(dtw_distance(x, x) == 0.0);

    double l1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) l1 += std::abs(x[i] - y[i]);
    CHECK(dtw_distance(x, y) <= l1 + 1e-15);  // diagonal path is always available
  }
}

TEST_CASE("dtw rejects empty input") {
  try {
    dtw_distance(std::vector<double>{}, std::vector<double>{1.0});
    FAIL("expected EmptyInput");
  } catch (const Error& e) {
    CHECK(e.code() == errc::empty_input);
  }
}

TEST_CASE("dtw_mean_distance delegates to dtw over means") {
  const auto a = mvn_with_mean({0.0, 0.0});
  const auto b = mvn_with_mean({1.0, 1.0});
  CHECK(dtw_mean_distance(a, b) == 2.0);
  CHECK(dtw_mean_distance(a, a) == 0.0);
}

TEST_CASE("singleton vs singleton collapses min, avg and max") {
  const auto a = rows_matrix({{0.1, 0.9}});
  const auto b = rows_matrix({{0.5, 0.2}});
  const auto r = linkage_all(a, b);
  CHECK(r.min == r.max);
  CHECK(r.min == r.avg);
}

TEST_CASE("linkage hand-computed two-pair case") {
  // one window against two: both pair distances computed by hand
  const double eps = 0.00087890625;  // exactly representable
  tsdist::ingest::SamplingConfig cfg;
  cfg.window_length = 2;
  cfg.sample_count = 1;
  const auto a = tsdist::ingest::SampleMatrix::from_data("a", 1, 2, {0.0, eps}, cfg);
  const auto b = rows_matrix({{0.3, 0.4}, {0.6, 0.8}});

  const double d1 = std::sqrt(0.3 * 0.3 + (0.4 - eps) * (0.4 - eps));
  const double d2 = std::sqrt(0.6 * 0.6 + (0.8 - eps) * (0.8 - eps));
  const auto r = linkage_all(a, b);
  CHECK(r.min == d1);
  CHECK(r.max == d2);
  CHECK(r.avg == doctest::Approx(0.5 * (d1 + d2)).epsilon(1e-14));
  CHECK(r.min <= r.avg);
  CHECK(r.avg <= r.max);
}

TEST_CASE("self-linkage has zero min") {
  tsdist::rng::Engine eng(77);
  const auto a = random_samples("a", 40, 6, eng);
  const auto r = linkage_all(a, a);
  CHECK(r.min == 0.0);
  CHECK(r.avg > 0.0);
  CHECK(r.max >= r.avg);
}

TEST_CASE("linkage matches the naive double loop on seeded inputs") {
  tsdist::rng::Engine eng(31337);
  for (int rep = 0; rep < 8; ++rep) {
    const std::size_t na = 1 + tsdist::rng::bounded(eng, 200);
    const std::size_t nb = 1 + tsdist::rng::bounded(eng, 200);
    const auto a = random_samples("a", na, 5, eng);
    const auto b = random_samples("b", nb, 5, eng);
    const auto want = linkage_naive(a, b);
    const auto got = linkage_all(a, b, 3);
    CHECK(got.min == want.min);  // exact
    CHECK(got.max == want.max);  // exact
    CHECK(std::abs(got.avg - want.avg) <= 1e-9 * std::max(1.0, std::abs(want.avg)));
    CHECK(got.min <= got.avg);
    CHECK(got.avg <= got.max);
  }
}

TEST_CASE("linkage results are bit-identical across thread counts") {
  tsdist::rng::Engine eng(2718);
  const auto a = random_samples("a", 300, 6, eng);
  const auto b = random_samples("b", 257, 6, eng);
  const auto base = linkage_all(a, b, 1);
  for (int threads : {2, 3, 4, 7}) {
    const auto r = linkage_all(a, b, threads);
    CHECK(r.min == base.min);
    CHECK(r.avg == base.avg);  // bitwise, thanks to fixed blocks + ordered reduction
    CHECK(r.max == base.max);
  }
}

TEST_CASE("linkage dimension and emptiness checks") {
  tsdist::rng::Engine eng(1);
  const auto a = random_samples("a", 4, 5, eng);
  const auto b = random_samples("b", 4, 6, eng);
  try {
    linkage_all(a, b);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == errc::dimension_mismatch);
  }
}

TEST_CASE("linkage subsampling caps the examined rows") {
  tsdist::rng::Engine eng(10);
  const auto a = random_samples("a", 128, 4, eng);
  const auto b = random_samples("b", 128, 4, eng);
  const auto full = linkage_all(a, b);
  const auto capped = linkage_all(a, b, 0, 32);
  CHECK(capped.min >= full.min);  // a subset can only shrink the candidate pool
  CHECK(capped.max <= full.max);
}
