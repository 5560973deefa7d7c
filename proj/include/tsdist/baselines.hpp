#pragma once

#include <span>
#include <string>

#include "tsdist/mvn.hpp"
#include "tsdist/sampling.hpp"

namespace tsdist::baselines {

// L2 distance between the two fitted mean vectors.
double euclidean_mean_distance(const gaussian::MvnParams& a, const gaussian::MvnParams& b);

// Full-alignment dynamic time warping with |x_i - y_j| step cost,
// D(0,0) = 0 and +inf borders. Supports unequal lengths.
double dtw_distance(std::span<const double> x, std::span<const double> y);

// DTW applied to the two fitted mean vectors.
double dtw_mean_distance(const gaussian::MvnParams& a, const gaussian::MvnParams& b);

enum class LinkageKind { min, avg, max };

LinkageKind linkage_kind_from_name(const std::string& name);  // "min" | "avg" | "max"

struct LinkageResult {
  double min = 0.0;
  double avg = 0.0;
  double max = 0.0;
};

// Exact min / mean / max over all |a| * |b| pairwise Euclidean row
// distances. Rows of `a` are processed in fixed-size blocks whose partial
// results (compensated sums for avg) are combined in block order, so the
// result is bit-identical for every thread count. `subsample_rows` (0 = off)
// caps both matrices to their first K rows for approximate exploratory runs;
// since rows are i.i.d. window draws, a prefix is itself a uniform subsample.
LinkageResult linkage_all(const ingest::SampleMatrix& a, const ingest::SampleMatrix& b,
                          int threads = 0, std::size_t subsample_rows = 0);

double linkage_distance(const ingest::SampleMatrix& a, const ingest::SampleMatrix& b,
                        LinkageKind kind, int threads = 0, std::size_t subsample_rows = 0);

}  // namespace tsdist::baselines
