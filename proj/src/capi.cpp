// extern "C" shim over the C++ core: opaque handles own the core objects,
// exceptions become status codes, messages land in a thread-local buffer.

#include "tsdist.h"

#include <memory>
#include <new>
#include <string>
#include <vector>

#include "tsdist/baselines.hpp"
#include "tsdist/correlation.hpp"
#include "tsdist/dataset.hpp"
#include "tsdist/distance_matrix.hpp"
#include "tsdist/error.hpp"
#include "tsdist/layout.hpp"
#include "tsdist/mvn.hpp"
#include "tsdist/sampling.hpp"

namespace {

thread_local std::string g_last_error;

tsdist_status to_status(tsdist::errc code) {
  using tsdist::errc;
  switch (code) {
    case errc::io:
      return TSDIST_ERR_IO;
    case errc::parse:
      return TSDIST_ERR_PARSE;
    case errc::not_square:
    case errc::asymmetry_too_large:
    case errc::no_convergence:
    case errc::not_psd:
    case errc::shape_mismatch:
      return TSDIST_ERR_NUMERIC;
    default:
      return TSDIST_ERR_INVALID;
  }
}

template <typename Fn>
tsdist_status guarded(Fn&& fn) {
  try {
    fn();
    return TSDIST_OK;
  } catch (const tsdist::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return TSDIST_ERR_NOMEM;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TSDIST_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return TSDIST_ERR_INTERNAL;
  }
}

tsdist_status invalid(const char* message) {
  g_last_error = message;
  return TSDIST_ERR_INVALID;
}

}  // namespace

// handle definitions
struct tsdist_dataset {
  std::string name;                            // used while assembling
  std::vector<tsdist::ingest::Series> pending; // series added before finalize
  std::unique_ptr<tsdist::ingest::TimeSeriesDataset> ds;  // set once usable

  // building through add_series defers validation until first use
  tsdist::ingest::TimeSeriesDataset& materialize() {
    if (!ds) {
      ds = std::make_unique<tsdist::ingest::TimeSeriesDataset>(name, std::move(pending));
      pending.clear();
    }
    return *ds;
  }
};

struct tsdist_samples {
  tsdist::ingest::SampleMatrix m;
};

struct tsdist_mvn {
  tsdist::gaussian::MvnParams p;
};

struct tsdist_dmatrix {
  tsdist::analysis::DistanceMatrix m;
  std::string metric_tag;  // stable storage for tsdist_dmatrix_metric
};

struct tsdist_layout {
  tsdist::layout::LayoutCoordinates lc;
};

struct tsdist_correlation {
  tsdist::analysis::CorrelationReport r;
};

extern "C" {

int tsdist_status_is_user_error(tsdist_status status) {
  switch (status) {
    case TSDIST_ERR_IO:
    case TSDIST_ERR_PARSE:
    case TSDIST_ERR_INVALID:
      return 1;
    default:
      return 0;
  }
}

const char* tsdist_version(void) { return "0.1.0"; }

const char* tsdist_last_error(void) { return g_last_error.c_str(); }

/* ---- datasets ---------------------------------------------------------- */

tsdist_status tsdist_dataset_load(const char* path, const char* format, tsdist_dataset** out) {
  if (!path || !out) return invalid("path and out must be non-null");
  return guarded([&] {
    using tsdist::ingest::FileFormat;
    const std::string fmt = format ? format : "auto";
    FileFormat f;
    if (fmt == "jsonl")
      f = FileFormat::jsonl;
    else if (fmt == "csv-long")
      f = FileFormat::csv_long;
    else if (fmt == "auto")
      f = tsdist::ingest::format_from_extension(path);
    else
      tsdist::fail(tsdist::errc::invalid_argument,
                   "unknown format '" + fmt + "' (expected jsonl, csv-long or auto)");
    auto handle = std::make_unique<tsdist_dataset>();
    handle->ds = std::make_unique<tsdist::ingest::TimeSeriesDataset>(
        tsdist::ingest::load_dataset(path, f));
    *out = handle.release();
  });
}

tsdist_status tsdist_dataset_create(const char* name, tsdist_dataset** out) {
  if (!name || !out) return invalid("name and out must be non-null");
  auto handle = new (std::nothrow) tsdist_dataset;
  if (!handle) return TSDIST_ERR_NOMEM;
  handle->name = name;
  *out = handle;
  return TSDIST_OK;
}

tsdist_status tsdist_dataset_add_series(tsdist_dataset* ds, const char* id, const double* values,
                                        size_t count) {
  if (!ds || !id || !values) return invalid("dataset, id and values must be non-null");
  if (ds->ds) return invalid("cannot add series after the dataset has been used or loaded");
  return guarded([&] {
    ds->pending.push_back(
        tsdist::ingest::Series{id, std::vector<double>(values, values + count)});
  });
}

tsdist_status tsdist_dataset_normalize(tsdist_dataset* ds) {
  if (!ds) return invalid("dataset must be non-null");
  return guarded([&] {
    auto& raw = ds->materialize();
    *ds->ds = tsdist::ingest::minmax_normalize(raw);
  });
}

tsdist_status tsdist_dataset_name(const tsdist_dataset* ds, const char** out) {
  if (!ds || !out) return invalid("dataset and out must be non-null");
  *out = ds->ds ? ds->ds->name().c_str() : ds->name.c_str();
  return TSDIST_OK;
}

tsdist_status tsdist_dataset_series_count(const tsdist_dataset* ds, size_t* out) {
  if (!ds || !out) return invalid("dataset and out must be non-null");
  return guarded([&] {
    *out = const_cast<tsdist_dataset*>(ds)->materialize().series().size();
  });
}

void tsdist_dataset_free(tsdist_dataset* ds) { delete ds; }

/* ---- window sampling ---------------------------------------------------- */

void tsdist_sampling_config_init(tsdist_sampling_config* cfg) {
  if (!cfg) return;
  cfg->window_length = 48;
  cfg->sample_count = 20000;
  cfg->seed = 42;
  cfg->max_resample_attempts = 1000;
}

tsdist_status tsdist_dataset_sample(const tsdist_dataset* ds, const tsdist_sampling_config* cfg,
                                    tsdist_samples** out) {
  if (!ds || !out) return invalid("dataset and out must be non-null");
  return guarded([&] {
    tsdist::ingest::SamplingConfig config;
    if (cfg) {
      config.window_length = cfg->window_length;
      config.sample_count = cfg->sample_count;
      config.seed = cfg->seed;
      config.max_resample_attempts = cfg->max_resample_attempts;
    }
    auto& dataset = const_cast<tsdist_dataset*>(ds)->materialize();
    auto handle = std::make_unique<tsdist_samples>(
        tsdist_samples{tsdist::ingest::sample_windows(dataset, config)});
    *out = handle.release();
  });
}

tsdist_status tsdist_samples_shape(const tsdist_samples* s, size_t* rows, size_t* cols) {
  if (!s || !rows || !cols) return invalid("samples, rows and cols must be non-null");
  *rows = s->m.rows();
  *cols = s->m.cols();
  return TSDIST_OK;
}

tsdist_status tsdist_samples_data(const tsdist_samples* s, const double** out) {
  if (!s || !out) return invalid("samples and out must be non-null");
  *out = s->m.data().data();
  return TSDIST_OK;
}

void tsdist_samples_free(tsdist_samples* s) { delete s; }

/* ---- fitted Gaussian sketches ------------------------------------------ */

tsdist_status tsdist_mvn_fit(const tsdist_samples* s, tsdist_mvn** out) {
  if (!s || !out) return invalid("samples and out must be non-null");
  return guarded([&] {
    auto handle = std::make_unique<tsdist_mvn>(tsdist_mvn{tsdist::gaussian::fit_mvn(s->m)});
    *out = handle.release();
  });
}

tsdist_status tsdist_mvn_save(const tsdist_mvn* m, const char* path) {
  if (!m || !path) return invalid("mvn and path must be non-null");
  return guarded([&] { tsdist::gaussian::save_sketch(m->p, path); });
}

tsdist_status tsdist_mvn_load(const char* path, tsdist_mvn** out) {
  if (!path || !out) return invalid("path and out must be non-null");
  return guarded([&] {
    auto handle = std::make_unique<tsdist_mvn>(tsdist_mvn{tsdist::gaussian::load_sketch(path)});
    *out = handle.release();
  });
}

tsdist_status tsdist_mvn_dim(const tsdist_mvn* m, size_t* out) {
  if (!m || !out) return invalid("mvn and out must be non-null");
  *out = m->p.dim();
  return TSDIST_OK;
}

tsdist_status tsdist_mvn_name(const tsdist_mvn* m, const char** out) {
  if (!m || !out) return invalid("mvn and out must be non-null");
  *out = m->p.dataset_name.c_str();
  return TSDIST_OK;
}

void tsdist_mvn_free(tsdist_mvn* m) { delete m; }

/* ---- distances ---------------------------------------------------------- */

tsdist_status tsdist_wasserstein(const tsdist_mvn* a, const tsdist_mvn* b, double* out) {
  if (!a || !b || !out) return invalid("arguments must be non-null");
  return guarded([&] { *out = tsdist::gaussian::wasserstein_distance(a->p, b->p); });
}

tsdist_status tsdist_euclidean_mean(const tsdist_mvn* a, const tsdist_mvn* b, double* out) {
  if (!a || !b || !out) return invalid("arguments must be non-null");
  return guarded([&] { *out = tsdist::baselines::euclidean_mean_distance(a->p, b->p); });
}

tsdist_status tsdist_dtw_mean(const tsdist_mvn* a, const tsdist_mvn* b, double* out) {
  if (!a || !b || !out) return invalid("arguments must be non-null");
  return guarded([&] { *out = tsdist::baselines::dtw_mean_distance(a->p, b->p); });
}

tsdist_status tsdist_dtw(const double* x, size_t nx, const double* y, size_t ny, double* out) {
  if (!x || !y || !out) return invalid("arguments must be non-null");
  return guarded([&] {
    *out = tsdist::baselines::dtw_distance({x, nx}, {y, ny});
  });
}

tsdist_status tsdist_linkage(const tsdist_samples* a, const tsdist_samples* b, const char* kind,
                             int threads, size_t subsample_rows, double* out) {
  if (!a || !b || !kind || !out) return invalid("arguments must be non-null");
  return guarded([&] {
    *out = tsdist::baselines::linkage_distance(
        a->m, b->m, tsdist::baselines::linkage_kind_from_name(kind), threads, subsample_rows);
  });
}

/* ---- pairwise distance matrices ----------------------------------------- */

namespace {

tsdist_dmatrix* wrap_matrix(tsdist::analysis::DistanceMatrix&& m) {
  auto handle = std::make_unique<tsdist_dmatrix>();
  handle->metric_tag = tsdist::analysis::metric_name(m.metric);
  handle->m = std::move(m);
  return handle.release();
}

}  // namespace

tsdist_status tsdist_dmatrix_from_mvns(const tsdist_mvn* const* mvns, size_t count,
                                       const char* metric, int threads, tsdist_dmatrix** out) {
  if (!mvns || !metric || !out) return invalid("arguments must be non-null");
  return guarded([&] {
    std::vector<tsdist::gaussian::MvnParams> params;
    params.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      if (!mvns[i]) tsdist::fail(tsdist::errc::invalid_argument, "null mvn handle in list");
      params.push_back(mvns[i]->p);
    }
    *out = wrap_matrix(tsdist::analysis::pairwise_from_mvns(
        params, tsdist::analysis::metric_from_name(metric), threads));
  });
}

tsdist_status tsdist_dmatrix_from_samples(const tsdist_samples* const* samples, size_t count,
                                          const char* metric, int threads,
                                          size_t linkage_subsample, tsdist_dmatrix** out) {
  if (!samples || !metric || !out) return invalid("arguments must be non-null");
  return guarded([&] {
    std::vector<tsdist::ingest::SampleMatrix> mats;
    mats.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      if (!samples[i]) tsdist::fail(tsdist::errc::invalid_argument, "null samples handle in list");
      mats.push_back(samples[i]->m);
    }
    *out = wrap_matrix(tsdist::analysis::pairwise_matrix(
        mats, tsdist::analysis::metric_from_name(metric), threads, linkage_subsample));
  });
}

tsdist_status tsdist_dmatrix_load(const char* path, tsdist_dmatrix** out) {
  if (!path || !out) return invalid("path and out must be non-null");
  return guarded([&] { *out = wrap_matrix(tsdist::analysis::load_matrix(path)); });
}

tsdist_status tsdist_dmatrix_save(const tsdist_dmatrix* m, const char* path,
                                  const char* format) {
  if (!m || !path || !format) return invalid("arguments must be non-null");
  return guarded([&] {
    const std::string fmt = format;
    if (fmt == "csv")
      tsdist::analysis::save_matrix_csv(m->m, path);
    else if (fmt == "json")
      tsdist::analysis::save_matrix_json(m->m, path);
    else
      tsdist::fail(tsdist::errc::invalid_argument,
                   "unknown matrix format '" + fmt + "' (expected csv or json)");
  });
}

tsdist_status tsdist_dmatrix_save_heatmap(const tsdist_dmatrix* m, const char* path) {
  if (!m || !path) return invalid("matrix and path must be non-null");
  return guarded([&] { tsdist::analysis::export_heatmap(m->m, path); });
}

tsdist_status tsdist_dmatrix_size(const tsdist_dmatrix* m, size_t* out) {
  if (!m || !out) return invalid("matrix and out must be non-null");
  *out = m->m.size();
  return TSDIST_OK;
}

tsdist_status tsdist_dmatrix_label(const tsdist_dmatrix* m, size_t i, const char** out) {
  if (!m || !out) return invalid("matrix and out must be non-null");
  if (i >= m->m.size()) return invalid("label index out of range");
  *out = m->m.labels[i].c_str();
  return TSDIST_OK;
}

tsdist_status tsdist_dmatrix_metric(const tsdist_dmatrix* m, const char** out) {
  if (!m || !out) return invalid("matrix and out must be non-null");
  *out = m->metric_tag.c_str();
  return TSDIST_OK;
}

tsdist_status tsdist_dmatrix_value(const tsdist_dmatrix* m, size_t i, size_t j, double* out) {
  if (!m || !out) return invalid("matrix and out must be non-null");
  if (i >= m->m.size() || j >= m->m.size()) return invalid("matrix index out of range");
  *out = m->m.at(i, j);
  return TSDIST_OK;
}

void tsdist_dmatrix_free(tsdist_dmatrix* m) { delete m; }

/* ---- force-directed layout ---------------------------------------------- */

tsdist_status tsdist_layout_compute(const tsdist_dmatrix* m, uint64_t seed,
                                    tsdist_layout** out) {
  if (!m || !out) return invalid("matrix and out must be non-null");
  return guarded([&] {
    auto handle = std::make_unique<tsdist_layout>(
        tsdist_layout{tsdist::layout::kamada_kawai_layout(m->m, seed)});
    *out = handle.release();
  });
}

tsdist_status tsdist_layout_save(const tsdist_layout* l, const char* path) {
  if (!l || !path) return invalid("layout and path must be non-null");
  return guarded([&] { tsdist::layout::save_layout_json(l->lc, path); });
}

tsdist_status tsdist_layout_save_svg(const tsdist_layout* l, const tsdist_dmatrix* m,
                                     const char* color_map_path, const char* path) {
  if (!l || !m || !path) return invalid("layout, matrix and path must be non-null");
  return guarded([&] {
    if (color_map_path) {
      auto colors = tsdist::layout::load_color_map(color_map_path);
      tsdist::layout::export_layout(l->lc, m->m, path, &colors);
    } else {
      tsdist::layout::export_layout(l->lc, m->m, path, nullptr);
    }
  });
}

tsdist_status tsdist_layout_stress(const tsdist_layout* l, double* out) {
  if (!l || !out) return invalid("layout and out must be non-null");
  *out = l->lc.final_stress;
  return TSDIST_OK;
}

tsdist_status tsdist_layout_position(const tsdist_layout* l, size_t i, double* x, double* y) {
  if (!l || !x || !y) return invalid("layout, x and y must be non-null");
  if (i >= l->lc.positions.size()) return invalid("layout index out of range");
  *x = l->lc.positions[i][0];
  *y = l->lc.positions[i][1];
  return TSDIST_OK;
}

void tsdist_layout_free(tsdist_layout* l) { delete l; }

/* ---- correlation --------------------------------------------------------- */

tsdist_status tsdist_correlate(const tsdist_dmatrix* m, const char* source_label,
                               const char* const* labels, const double* losses, size_t count,
                               tsdist_correlation** out) {
  if (!m || !source_label || !labels || !losses || !out)
    return invalid("arguments must be non-null");
  return guarded([&] {
    std::vector<std::string> names;
    names.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      if (!labels[i]) tsdist::fail(tsdist::errc::invalid_argument, "null label in loss table");
      names.emplace_back(labels[i]);
    }
    auto handle = std::make_unique<tsdist_correlation>(
        tsdist_correlation{tsdist::analysis::correlate_against_losses(
            m->m, source_label, names, {losses, count})});
    *out = handle.release();
  });
}

tsdist_status tsdist_correlation_stats(const tsdist_correlation* c, double* pearson_r,
                                       double* spearman_r, double* slope, double* intercept,
                                       size_t* n_used) {
  if (!c) return invalid("correlation must be non-null");
  if (pearson_r) *pearson_r = c->r.pearson_r;
  if (spearman_r) *spearman_r = c->r.spearman_r;
  if (slope) *slope = c->r.slope;
  if (intercept) *intercept = c->r.intercept;
  if (n_used) *n_used = c->r.n;
  return TSDIST_OK;
}

tsdist_status tsdist_correlation_missing_count(const tsdist_correlation* c, size_t* out) {
  if (!c || !out) return invalid("correlation and out must be non-null");
  *out = c->r.missing_labels.size();
  return TSDIST_OK;
}

tsdist_status tsdist_correlation_missing_label(const tsdist_correlation* c, size_t i,
                                               const char** out) {
  if (!c || !out) return invalid("correlation and out must be non-null");
  if (i >= c->r.missing_labels.size()) return invalid("missing-label index out of range");
  *out = c->r.missing_labels[i].c_str();
  return TSDIST_OK;
}

tsdist_status tsdist_correlation_save(const tsdist_correlation* c, const char* path) {
  if (!c || !path) return invalid("correlation and path must be non-null");
  return guarded([&] { tsdist::analysis::save_correlation_json(c->r, path); });
}

tsdist_status tsdist_correlation_save_svg(const tsdist_correlation* c, const char* path) {
  if (!c || !path) return invalid("correlation and path must be non-null");
  return guarded([&] { tsdist::analysis::export_scatter(c->r, path); });
}

void tsdist_correlation_free(tsdist_correlation* c) { delete c; }

}  // extern "C"
