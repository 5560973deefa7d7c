#include "tsdist/mvn.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "tsdist/error.hpp"
#include "tsdist/io_util.hpp"

namespace tsdist::gaussian {

namespace {

// Lexicographic order over (mean, cov) so the two-argument distance can pick
// a canonical evaluation order.
bool params_less(const MvnParams& a, const MvnParams& b) {
  if (a.mean != b.mean) return a.mean < b.mean;
  const auto da = a.cov.data();
  const auto db = b.cov.data();
  return std::lexicographical_compare(da.begin(), da.end(), db.begin(), db.end());
}

void require_same_dim(const MvnParams& a, const MvnParams& b) {
  if (a.dim() != b.dim() || a.cov.rows() != b.cov.rows())
    fail(errc::dimension_mismatch, "MVN dimensions differ: " + std::to_string(a.dim()) + " ('" +
                                       a.dataset_name + "') vs " + std::to_string(b.dim()) +
                                       " ('" + b.dataset_name + "')");
}

double squared_mean_gap(const MvnParams& a, const MvnParams& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.mean.size(); ++i) {
    const double d = a.mean[i] - b.mean[i];
    s += d * d;
  }
  return s;
}

// tr sqrt from eigenvalues of a symmetric PSD matrix, with the same clamp
// policy as psd_sqrt.
double trace_sqrt_from_eigenvalues(const std::vector<double>& lambda) {
  const double lambda_max = std::max(lambda.front(), 0.0);
  const double clamp_floor = -1e-8 * lambda_max;
  double acc = 0.0;
  for (double l : lambda) {
    if (l < clamp_floor)
      fail(errc::not_psd, "cross-covariance eigenvalue " + std::to_string(l) + " below " +
                              std::to_string(clamp_floor));
    if (l > 0.0) acc += std::sqrt(l);
  }
  return acc;
}

double wasserstein_core(const linalg::Matrix& sqrt_cov_a, double trace_a, const MvnParams& a,
                        const MvnParams& b) {
  // the trace term runs through S_a cov_b S_a, which stays symmetric PSD;
  // only the upper triangle of the second product is computed and mirrored
  const std::size_t n = sqrt_cov_a.rows();
  linalg::Matrix t = linalg::matmul(b.cov, sqrt_cov_a);
  linalg::Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* srow = sqrt_cov_a.row(i);
    double* wrow = w.row(i);
    for (std::size_t k = 0; k < n; ++k) {
      const double f = srow[k];
      if (f == 0.0) continue;
      const double* trow = t.row(k);
      for (std::size_t j = i; j < n; ++j) wrow[j] += f * trow[j];
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) w(j, i) = w(i, j);

  const double cross =
      trace_sqrt_from_eigenvalues(linalg::detail::eigenvalues_of_symmetric(std::move(w)));
  const double d2 = squared_mean_gap(a, b) + trace_a + linalg::trace(b.cov) - 2.0 * cross;
  return std::sqrt(std::max(d2, 0.0));
}

}  // namespace

MvnParams fit_mvn(const ingest::SampleMatrix& samples) {
  const std::size_t n = samples.rows();
  const std::size_t l = samples.cols();
  if (n < 2)
    fail(errc::too_few_samples,
         "need at least 2 samples to fit, got " + std::to_string(n));

  std::vector<double> mean(l, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* x = samples.row(r);
    for (std::size_t j = 0; j < l; ++j) mean[j] += x[j];
  }
  for (std::size_t j = 0; j < l; ++j) mean[j] /= static_cast<double>(n);

  // accumulate the upper triangle of (X - mu)^T (X - mu), then mirror
  linalg::Matrix cov(l, l);
  std::vector<double> centered(l);
  for (std::size_t r = 0; r < n; ++r) {
    const double* x = samples.row(r);
    for (std::size_t j = 0; j < l; ++j) centered[j] = x[j] - mean[j];
    for (std::size_t j = 0; j < l; ++j) {
      const double cj = centered[j];
      double* row = cov.row(j);
      for (std::size_t k = j; k < l; ++k) row[k] += cj * centered[k];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < l; ++j)
    for (std::size_t k = j; k < l; ++k) {
      const double v = cov(j, k) * inv_n;
      cov(j, k) = v;
      cov(k, j) = v;
    }

  return MvnParams{samples.dataset_name(), std::move(mean), std::move(cov), n};
}

bool same_params(const MvnParams& a, const MvnParams& b) {
  return a.mean == b.mean && std::equal(a.cov.data().begin(), a.cov.data().end(),
                                        b.cov.data().begin(), b.cov.data().end());
}

double wasserstein_distance(const MvnParams& a, const MvnParams& b) {
  require_same_dim(a, b);
  if (same_params(a, b)) return 0.0;  // identity of the metric, exactly
  const MvnParams& first = params_less(b, a) ? b : a;
  const MvnParams& second = params_less(b, a) ? a : b;
  linalg::Matrix sqrt_a = linalg::psd_sqrt(first.cov);
  return wasserstein_core(sqrt_a, linalg::trace(first.cov), first, second);
}

WassersteinPrep prepare_wasserstein(const MvnParams& params) {
  return WassersteinPrep{&params, linalg::psd_sqrt(params.cov), linalg::trace(params.cov)};
}

double wasserstein_prepared(const WassersteinPrep& a, const MvnParams& b) {
  require_same_dim(*a.params, b);
  if (same_params(*a.params, b)) return 0.0;
  return wasserstein_core(a.sqrt_cov, a.cov_trace, *a.params, b);
}

std::string sketch_to_json(const MvnParams& params) {
  nlohmann::json doc;
  doc["name"] = params.dataset_name;
  doc["mean"] = params.mean;
  doc["cov"] = std::vector<double>(params.cov.data().begin(), params.cov.data().end());
  doc["sample_count"] = params.sample_count;
  return doc.dump(2) + "\n";
}

MvnParams sketch_from_json(const std::string& text, const std::string& origin) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(errc::parse, std::string(e.what()) + " in " + origin);
  }
  if (!doc.is_object() || !doc.contains("name") || !doc.contains("mean") ||
      !doc.contains("cov") || !doc.contains("sample_count"))
    fail(errc::parse, "sketch must carry name/mean/cov/sample_count: " + origin);

  MvnParams p;
  p.dataset_name = doc["name"].get<std::string>();
  p.mean = doc["mean"].get<std::vector<double>>();
  auto cov_entries = doc["cov"].get<std::vector<double>>();
  p.sample_count = doc["sample_count"].get<uint64_t>();

  const std::size_t l = p.mean.size();
  if (l == 0) fail(errc::parse, "empty mean vector in " + origin);
  if (cov_entries.size() != l * l)
    fail(errc::parse, "cov length " + std::to_string(cov_entries.size()) +
                          " does not match mean length " + std::to_string(l) + " in " + origin);
  p.cov = linalg::Matrix::from_data(l, l, std::move(cov_entries));

  for (double m : p.mean) {
    if (!std::isfinite(m)) fail(errc::non_finite_value, "non-finite mean entry in " + origin);
    if (m < -1e-9 || m > 1.0 + 1e-9)
      fail(errc::invalid_argument, "mean entry " + std::to_string(m) +
                                       " outside [0, 1] in " + origin);
  }
  for (std::size_t i = 0; i < l; ++i) {
    if (p.cov(i, i) < 0.0)
      fail(errc::invalid_argument, "negative covariance diagonal in " + origin);
    for (std::size_t j = i + 1; j < l; ++j)
      if (std::abs(p.cov(i, j) - p.cov(j, i)) > 1e-10)
        fail(errc::invalid_argument, "covariance asymmetry above 1e-10 in " + origin);
  }
  if (p.sample_count < 2)
    fail(errc::invalid_argument, "sample_count must be at least 2 in " + origin);
  return p;
}

void save_sketch(const MvnParams& params, const std::filesystem::path& path) {
  io::atomic_write(path, sketch_to_json(params));
}

MvnParams load_sketch(const std::filesystem::path& path) {
  return sketch_from_json(io::read_file(path), path.string());
}

}  // namespace tsdist::gaussian
