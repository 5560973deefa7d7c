// tsdist command line: fit / matrix / layout / correlate, wired through the
// C API in tsdist.h. Every command writes its outputs plus a manifest.json
// capturing tool version, configuration and input/output content hashes;
// rerunning with the same inputs and flags reproduces the outputs byte for
// byte regardless of --threads.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "tsdist.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUser = 2;

struct CliError {
  int exit_code;
  std::string message;
};

[[noreturn]] void die_user(const std::string& message) { throw CliError{kExitUser, message}; }

[[noreturn]] void die_status(tsdist_status status, const std::string& context) {
  const int code = tsdist_status_is_user_error(status) ? kExitUser : kExitInternal;
  throw CliError{code, context + ": " + tsdist_last_error()};
}

void check(tsdist_status status, const std::string& context) {
  if (status != TSDIST_OK) die_status(status, context);
}

// RAII wrappers over the C handles
template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  explicit Handle(T* p) : ptr(p) {}
  Handle(Handle&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
  Handle& operator=(Handle&& o) noexcept {
    if (this != &o) {
      reset();
      ptr = o.ptr;
      o.ptr = nullptr;
    }
    return *this;
  }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { reset(); }
  void reset() {
    if (ptr) Free(ptr);
    ptr = nullptr;
  }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using DatasetHandle = Handle<tsdist_dataset, tsdist_dataset_free>;
using SamplesHandle = Handle<tsdist_samples, tsdist_samples_free>;
using MvnHandle = Handle<tsdist_mvn, tsdist_mvn_free>;
using MatrixHandle = Handle<tsdist_dmatrix, tsdist_dmatrix_free>;
using LayoutHandle = Handle<tsdist_layout, tsdist_layout_free>;
using CorrelationHandle = Handle<tsdist_correlation, tsdist_correlation_free>;

uint64_t fnv1a64_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) die_user("cannot open " + path.string() + " for hashing");
  uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (in.eof()) break;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) die_user("cannot write " + tmp.string());
    out << content;
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) die_user("cannot move " + tmp.string() + " into place");
}

// manifest: configuration and content hashes; deliberately excludes
// --threads, since results are thread-count invariant
void write_manifest(const fs::path& out_dir, const std::string& command, const json& config,
                    const std::vector<fs::path>& inputs, const std::vector<fs::path>& outputs) {
  json doc;
  doc["tool"] = "tsdist";
  doc["version"] = tsdist_version();
  doc["command"] = command;
  doc["config"] = config;
  json in_list = json::array();
  for (const auto& p : inputs)
    in_list.push_back({{"path", p.string()}, {"fnv1a64", hex64(fnv1a64_file(p))}});
  doc["inputs"] = std::move(in_list);
  json out_list = json::array();
  for (const auto& p : outputs)
    out_list.push_back({{"path", p.filename().string()}, {"fnv1a64", hex64(fnv1a64_file(p))}});
  doc["outputs"] = std::move(out_list);
  write_file_atomic(out_dir / "manifest.json", doc.dump(2) + "\n");
}

void ensure_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) die_user("cannot create output directory " + dir.string());
}

enum class InputKind { sketch, raw };

InputKind classify_input(const fs::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".json") return InputKind::sketch;
  if (ext == ".jsonl" || ext == ".csv") return InputKind::raw;
  die_user("cannot classify input '" + path.string() +
           "' (expected .json sketch, .jsonl or .csv raw data)");
}

struct SamplingFlags {
  uint32_t window_length = 48;
  uint32_t samples = 20000;
  uint64_t seed = 42;
  std::string format = "auto";

  tsdist_sampling_config config() const {
    tsdist_sampling_config cfg;
    tsdist_sampling_config_init(&cfg);
    cfg.window_length = window_length;
    cfg.sample_count = samples;
    cfg.seed = seed;
    return cfg;
  }

  json to_json() const {
    return {{"window_length", window_length},
            {"samples", samples},
            {"seed", seed},
            {"format", format}};
  }
};

void add_sampling_flags(CLI::App* cmd, SamplingFlags& flags) {
  cmd->add_option("--window-length", flags.window_length, "window length L")
      ->capture_default_str();
  cmd->add_option("--samples", flags.samples, "windows drawn per dataset N")
      ->capture_default_str();
  cmd->add_option("--seed", flags.seed, "sampling seed")->capture_default_str();
  cmd->add_option("--format", flags.format, "raw input format: auto|jsonl|csv-long")
      ->check(CLI::IsMember({"auto", "jsonl", "csv-long"}))
      ->capture_default_str();
}

DatasetHandle load_normalized(const fs::path& input, const std::string& format) {
  DatasetHandle ds;
  check(tsdist_dataset_load(input.string().c_str(), format.c_str(), ds.out()),
        "loading " + input.string());
  check(tsdist_dataset_normalize(ds.get()), "normalizing " + input.string());
  return ds;
}

SamplesHandle sample_dataset(const tsdist_dataset* ds, const tsdist_sampling_config& cfg,
                             const std::string& what) {
  SamplesHandle s;
  check(tsdist_dataset_sample(ds, &cfg, s.out()), "sampling " + what);
  return s;
}

/* ---- fit ----------------------------------------------------------------- */

int cmd_fit(const std::vector<fs::path>& inputs, const fs::path& out_dir,
            const SamplingFlags& flags) {
  ensure_out_dir(out_dir);
  const tsdist_sampling_config cfg = flags.config();

  std::vector<fs::path> outputs;
  std::vector<std::string> seen_names;
  for (const auto& input : inputs) {
    DatasetHandle ds = load_normalized(input, flags.format);
    const char* name = nullptr;
    check(tsdist_dataset_name(ds.get(), &name), "reading dataset name");
    if (std::find(seen_names.begin(), seen_names.end(), name) != seen_names.end())
      die_user("duplicate dataset name '" + std::string(name) + "' across inputs");
    seen_names.push_back(name);

    SamplesHandle s = sample_dataset(ds.get(), cfg, input.string());
    MvnHandle mvn;
    check(tsdist_mvn_fit(s.get(), mvn.out()), "fitting " + input.string());

    const fs::path sketch_path = out_dir / (std::string(name) + ".json");
    check(tsdist_mvn_save(mvn.get(), sketch_path.string().c_str()),
          "writing " + sketch_path.string());
    outputs.push_back(sketch_path);
    std::cerr << "fit: " << name << " -> " << sketch_path.string() << "\n";
  }
  write_manifest(out_dir, "fit", flags.to_json(), inputs, outputs);
  return kExitOk;
}

/* ---- matrix --------------------------------------------------------------- */

int cmd_matrix(const std::vector<fs::path>& inputs, const fs::path& out_dir,
               const std::string& metric, int threads, std::size_t subsample_linkage,
               const SamplingFlags& flags) {
  ensure_out_dir(out_dir);
  const bool linkage = metric.rfind("link-", 0) == 0;
  const tsdist_sampling_config cfg = flags.config();

  const auto t0 = std::chrono::steady_clock::now();
  MatrixHandle matrix;

  if (linkage) {
    if (subsample_linkage > 0)
      std::cerr << "matrix: approximate run, linkage restricted to the first "
                << subsample_linkage << " windows per dataset\n";
    std::vector<SamplesHandle> samples;
    for (const auto& input : inputs) {
      if (classify_input(input) == InputKind::sketch)
        die_user("MetricNeedsRawData: metric '" + metric + "' needs raw datasets, but '" +
                 input.string() + "' is a fitted sketch");
      DatasetHandle ds = load_normalized(input, flags.format);
      samples.push_back(sample_dataset(ds.get(), cfg, input.string()));
    }
    std::vector<const tsdist_samples*> ptrs;
    for (const auto& s : samples) ptrs.push_back(s.get());
    check(tsdist_dmatrix_from_samples(ptrs.data(), ptrs.size(), metric.c_str(), threads,
                                      subsample_linkage, matrix.out()),
          "building the distance matrix");
  } else {
    std::vector<MvnHandle> mvns;
    for (const auto& input : inputs) {
      MvnHandle mvn;
      if (classify_input(input) == InputKind::sketch) {
        check(tsdist_mvn_load(input.string().c_str(), mvn.out()), "loading " + input.string());
      } else {
        DatasetHandle ds = load_normalized(input, flags.format);
        SamplesHandle s = sample_dataset(ds.get(), cfg, input.string());
        check(tsdist_mvn_fit(s.get(), mvn.out()), "fitting " + input.string());
      }
      mvns.push_back(std::move(mvn));
    }
    std::vector<const tsdist_mvn*> ptrs;
    for (const auto& m : mvns) ptrs.push_back(m.get());
    check(tsdist_dmatrix_from_mvns(ptrs.data(), ptrs.size(), metric.c_str(), threads,
                                   matrix.out()),
          "building the distance matrix");
  }

  const fs::path csv_path = out_dir / "distances.csv";
  const fs::path json_path = out_dir / "distances.json";
  const fs::path heatmap_path = out_dir / "heatmap.svg";
  check(tsdist_dmatrix_save(matrix.get(), csv_path.string().c_str(), "csv"),
        "writing " + csv_path.string());
  check(tsdist_dmatrix_save(matrix.get(), json_path.string().c_str(), "json"),
        "writing " + json_path.string());
  check(tsdist_dmatrix_save_heatmap(matrix.get(), heatmap_path.string().c_str()),
        "writing " + heatmap_path.string());

  size_t m = 0;
  check(tsdist_dmatrix_size(matrix.get(), &m), "reading matrix size");
  const auto wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const size_t pairs = m * (m - 1) / 2 + (linkage ? m : 0);
  std::fprintf(stderr, "matrix: %zu datasets, %zu pairs, metric=%s, wall=%.3fs\n", m, pairs,
               metric.c_str(), wall);

  json config = flags.to_json();
  config["metric"] = metric;
  config["subsample_linkage"] = subsample_linkage;
  write_manifest(out_dir, "matrix", config, inputs, {csv_path, json_path, heatmap_path});
  return kExitOk;
}

/* ---- layout --------------------------------------------------------------- */

int cmd_layout(const fs::path& matrix_file, const fs::path& out_dir, uint64_t seed,
               const std::string& color_map) {
  ensure_out_dir(out_dir);
  MatrixHandle matrix;
  check(tsdist_dmatrix_load(matrix_file.string().c_str(), matrix.out()),
        "loading " + matrix_file.string());

  LayoutHandle layout;
  check(tsdist_layout_compute(matrix.get(), seed, layout.out()), "computing the layout");

  const fs::path json_path = out_dir / "layout.json";
  const fs::path svg_path = out_dir / "layout.svg";
  check(tsdist_layout_save(layout.get(), json_path.string().c_str()),
        "writing " + json_path.string());
  check(tsdist_layout_save_svg(layout.get(), matrix.get(),
                               color_map.empty() ? nullptr : color_map.c_str(),
                               svg_path.string().c_str()),
        "writing " + svg_path.string());

  double stress = 0.0;
  check(tsdist_layout_stress(layout.get(), &stress), "reading stress");
  std::fprintf(stderr, "layout: final stress %.6g\n", stress);

  json config = {{"seed", seed}, {"color_map", color_map.empty() ? json(nullptr) : json(color_map)}};
  std::vector<fs::path> inputs{matrix_file};
  if (!color_map.empty()) inputs.push_back(color_map);
  write_manifest(out_dir, "layout", config, inputs, {json_path, svg_path});
  return kExitOk;
}

/* ---- correlate ------------------------------------------------------------ */

// losses CSV: "label,loss" rows, optional header
void parse_losses_csv(const fs::path& path, std::vector<std::string>& labels,
                      std::vector<double>& losses) {
  std::ifstream in(path);
  if (!in) die_user("cannot open losses file " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos)
      die_user("expected 'label,loss' at " + path.string() + ":" + std::to_string(line_no));
    const std::string label = line.substr(0, comma);
    const std::string value = line.substr(comma + 1);
    if (line_no == 1 && label == "label") continue;  // header
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("trailing");
      labels.push_back(label);
      losses.push_back(v);
    } catch (const std::exception&) {
      die_user("bad loss value at " + path.string() + ":" + std::to_string(line_no));
    }
  }
  if (labels.empty()) die_user("losses file " + path.string() + " has no rows");
}

int cmd_correlate(const fs::path& matrix_file, const std::string& source,
                  const fs::path& losses_file, const fs::path& out_dir) {
  ensure_out_dir(out_dir);
  MatrixHandle matrix;
  check(tsdist_dmatrix_load(matrix_file.string().c_str(), matrix.out()),
        "loading " + matrix_file.string());

  std::vector<std::string> labels;
  std::vector<double> losses;
  parse_losses_csv(losses_file, labels, losses);
  std::vector<const char*> label_ptrs;
  for (const auto& l : labels) label_ptrs.push_back(l.c_str());

  CorrelationHandle corr;
  check(tsdist_correlate(matrix.get(), source.c_str(), label_ptrs.data(), losses.data(),
                         losses.size(), corr.out()),
        "correlating");

  size_t missing = 0;
  check(tsdist_correlation_missing_count(corr.get(), &missing), "reading missing labels");
  for (size_t i = 0; i < missing; ++i) {
    const char* label = nullptr;
    check(tsdist_correlation_missing_label(corr.get(), i, &label), "reading missing label");
    std::cerr << "warning: no loss value for dataset '" << label << "'; skipped\n";
  }

  const fs::path json_path = out_dir / "correlation.json";
  const fs::path svg_path = out_dir / "scatter.svg";
  check(tsdist_correlation_save(corr.get(), json_path.string().c_str()),
        "writing " + json_path.string());
  check(tsdist_correlation_save_svg(corr.get(), svg_path.string().c_str()),
        "writing " + svg_path.string());

  double pearson = 0.0, spearman = 0.0, slope = 0.0, intercept = 0.0;
  size_t used = 0;
  check(tsdist_correlation_stats(corr.get(), &pearson, &spearman, &slope, &intercept, &used),
        "reading statistics");
  std::fprintf(stderr, "correlate: n=%zu pearson_r=%.6g spearman_r=%.6g fit=%.6gx+%.6g\n", used,
               pearson, spearman, slope, intercept);

  write_manifest(out_dir, "correlate", {{"source", source}, {"losses", losses_file.string()}},
                 {matrix_file, losses_file}, {json_path, svg_path});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tsdist: distribution-based distances between time-series datasets"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tsdist_version()));

  int threads = 0;

  // fit
  auto* fit = app.add_subcommand("fit", "fit Gaussian sketches for raw datasets");
  std::vector<std::string> fit_inputs;
  std::string fit_out;
  SamplingFlags fit_flags;
  fit->add_option("inputs", fit_inputs, "raw dataset files (.jsonl / .csv)")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("--out-dir", fit_out, "output directory")->required();
  add_sampling_flags(fit, fit_flags);

  // matrix
  auto* matrix = app.add_subcommand("matrix", "pairwise distance matrix + heatmap");
  std::vector<std::string> matrix_inputs;
  std::string matrix_out;
  std::string metric = "wasserstein";
  std::size_t subsample_linkage = 0;
  SamplingFlags matrix_flags;
  matrix->add_option("inputs", matrix_inputs, "sketches (.json) or raw datasets (.jsonl/.csv)")
      ->required()
      ->check(CLI::ExistingFile);
  matrix->add_option("--out-dir", matrix_out, "output directory")->required();
  matrix
      ->add_option("--metric", metric,
                   "wasserstein|euclidean|dtw|link-min|link-avg|link-max")
      ->check(CLI::IsMember(
          {"wasserstein", "euclidean", "dtw", "link-min", "link-avg", "link-max"}))
      ->capture_default_str();
  matrix->add_option("--threads", threads, "worker threads (0 = all cores)")
      ->envname("TSDIST_THREADS")
      ->capture_default_str();
  matrix
      ->add_option("--subsample-linkage", subsample_linkage,
                   "approximate linkage using only the first K windows per dataset (0 = exact)")
      ->capture_default_str();
  add_sampling_flags(matrix, matrix_flags);

  // layout
  auto* layout = app.add_subcommand("layout", "force-directed 2-D layout of a distance matrix");
  std::string layout_matrix, layout_out, color_map;
  uint64_t layout_seed = 42;
  layout->add_option("matrix", layout_matrix, "distance matrix file (.csv or .json)")
      ->required()
      ->check(CLI::ExistingFile);
  layout->add_option("--out-dir", layout_out, "output directory")->required();
  layout->add_option("--seed", layout_seed, "layout seed")->capture_default_str();
  layout->add_option("--color-map", color_map, "CSV of label,css_color rows")
      ->check(CLI::ExistingFile);

  // correlate
  auto* correlate = app.add_subcommand("correlate", "correlate one matrix row against losses");
  std::string corr_matrix, corr_source, corr_losses, corr_out;
  correlate->add_option("matrix", corr_matrix, "distance matrix file (.csv or .json)")
      ->required()
      ->check(CLI::ExistingFile);
  correlate->add_option("--source", corr_source, "source dataset label")->required();
  correlate->add_option("--losses", corr_losses, "CSV of label,loss rows")
      ->required()
      ->check(CLI::ExistingFile);
  correlate->add_option("--out-dir", corr_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUser;
  }

  try {
    auto to_paths = [](const std::vector<std::string>& v) {
      return std::vector<fs::path>(v.begin(), v.end());
    };
    if (fit->parsed()) return cmd_fit(to_paths(fit_inputs), fit_out, fit_flags);
    if (matrix->parsed())
      return cmd_matrix(to_paths(matrix_inputs), matrix_out, metric, threads, subsample_linkage,
                        matrix_flags);
    if (layout->parsed()) return cmd_layout(layout_matrix, layout_out, layout_seed, color_map);
    if (correlate->parsed()) return cmd_correlate(corr_matrix, corr_source, corr_losses, corr_out);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUser;
}
