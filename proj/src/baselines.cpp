#include "tsdist/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "tsdist/error.hpp"
#include "tsdist/parallel.hpp"

namespace tsdist::baselines {

namespace {

void require_same_dim(const gaussian::MvnParams& a, const gaussian::MvnParams& b) {
  if (a.dim() != b.dim())
    fail(errc::dimension_mismatch, "mean lengths differ: " + std::to_string(a.dim()) + " vs " +
                                       std::to_string(b.dim()));
}

// Neumaier-compensated accumulator; keeps ~1e8-term sums accurate and makes
// the final value depend only on the order terms are fed in.
struct CompensatedSum {
  double sum = 0.0;
  double compensation = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      compensation += (sum - t) + v;
    else
      compensation += (v - t) + sum;
    sum = t;
  }

  double value() const { return sum + compensation; }
};

constexpr std::size_t kLinkageBlockRows = 64;

}  // namespace

double euclidean_mean_distance(const gaussian::MvnParams& a, const gaussian::MvnParams& b) {
  require_same_dim(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.mean.size(); ++i) {
    const double d = a.mean[i] - b.mean[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double dtw_distance(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) fail(errc::empty_input, "DTW inputs must be non-empty");
  const std::size_t nx = x.size();
  const std::size_t ny = y.size();
  constexpr double inf = std::numeric_limits<double>::infinity();

  // two-row dynamic program over the (i, j) alignment lattice
  std::vector<double> prev(ny + 1, inf), cur(ny + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= nx; ++i) {
    cur[0] = inf;
    for (std::size_t j = 1; j <= ny; ++j) {
      const double cost = std::abs(x[i - 1] - y[j - 1]);
      cur[j] = cost + std::min({prev[j - 1], cur[j - 1], prev[j]});
    }
    std::swap(prev, cur);
  }
  return prev[ny];
}

double dtw_mean_distance(const gaussian::MvnParams& a, const gaussian::MvnParams& b) {
  require_same_dim(a, b);
  return dtw_distance(a.mean, b.mean);
}

LinkageKind linkage_kind_from_name(const std::string& name) {
  if (name == "min") return LinkageKind::min;
  if (name == "avg") return LinkageKind::avg;
  if (name == "max") return LinkageKind::max;
  fail(errc::invalid_argument, "unknown linkage kind '" + name + "' (expected min|avg|max)");
}

LinkageResult linkage_all(const ingest::SampleMatrix& a, const ingest::SampleMatrix& b,
                          int threads, std::size_t subsample_rows) {
  if (a.cols() != b.cols())
    fail(errc::dimension_mismatch, "window lengths differ: " + std::to_string(a.cols()) + " vs " +
                                       std::to_string(b.cols()));
  std::size_t rows_a = a.rows();
  std::size_t rows_b = b.rows();
  if (subsample_rows > 0) {
    rows_a = std::min(rows_a, subsample_rows);
    rows_b = std::min(rows_b, subsample_rows);
  }
  if (rows_a == 0 || rows_b == 0) fail(errc::empty_matrix, "linkage over an empty sample matrix");
  const std::size_t l = a.cols();

  struct BlockResult {
    double min = std::numeric_limits<double>::infinity();
    double max = 0.0;
    CompensatedSum sum;
  };
  const std::size_t n_blocks = (rows_a + kLinkageBlockRows - 1) / kLinkageBlockRows;
  std::vector<BlockResult> blocks(n_blocks);

  parallel_tasks(n_blocks, threads, [&](std::size_t blk) {
    const std::size_t begin = blk * kLinkageBlockRows;
    const std::size_t end = std::min(begin + kLinkageBlockRows, rows_a);
    BlockResult res;
    for (std::size_t i = begin; i < end; ++i) {
      const double* xa = a.row(i);
      for (std::size_t j = 0; j < rows_b; ++j) {
        const double* xb = b.row(j);
        double s = 0.0;
        for (std::size_t c = 0; c < l; ++c) {
          const double d = xa[c] - xb[c];
          s += d * d;
        }
        const double dist = std::sqrt(s);
        res.min = std::min(res.min, dist);
        res.max = std::max(res.max, dist);
        res.sum.add(dist);
      }
    }
    blocks[blk] = res;
  });

  // combine in block order: identical result for every thread count
  LinkageResult out;
  out.min = std::numeric_limits<double>::infinity();
  out.max = 0.0;
  CompensatedSum total;
  for (const BlockResult& res : blocks) {
    out.min = std::min(out.min, res.min);
    out.max = std::max(out.max, res.max);
    total.add(res.sum.value());
  }
  out.avg = total.value() / (static_cast<double>(rows_a) * static_cast<double>(rows_b));
  return out;
}

double linkage_distance(const ingest::SampleMatrix& a, const ingest::SampleMatrix& b,
                        LinkageKind kind, int threads, std::size_t subsample_rows) {
  const LinkageResult r = linkage_all(a, b, threads, subsample_rows);
  switch (kind) {
    case LinkageKind::min: return r.min;
    case LinkageKind::avg: return r.avg;
    case LinkageKind::max: return r.max;
  }
  fail(errc::invalid_argument, "unreachable linkage kind");
}

}  // namespace tsdist::baselines
