// integration tests that spawn the CLI binary (path injected by the build)
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

#ifndef TSDIST_CLI_PATH
#error "TSDIST_CLI_PATH must be defined by the build"
#endif

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr interleaved
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(TSDIST_CLI_PATH) + " " + args + " 2>&1";
  RunResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (fgets(buf, sizeof(buf), pipe)) res.output += buf;
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("tsdist_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// deterministic jsonl dataset files
void write_dataset(const fs::path& p, unsigned seed, double lift = 0.0) {
  std::ofstream out(p);
  uint64_t state = seed * 2654435761u + 7;
  for (int s = 0; s < 3; ++s) {
    out << "{\"id\":\"s" << s << "\",\"values\":[";
    double x = 0.4;
    for (int i = 0; i < 260; ++i) {
      state = state * 6364136223846793005ULL + 1442695040888963407ULL;
      const double u = static_cast<double>(state >> 11) * 0x1.0p-53;
      x = 0.88 * x + 0.12 * u;
      if (i) out << ",";
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.9g", x + lift);
      out << buf;
    }
    out << "]}\n";
  }
}

const std::string kSamplingFlags = " --window-length 10 --samples 200 --seed 42";

void write_equal_cov_sketch(const fs::path& p, const std::string& name, double mean_shift) {
  // 3-dim sketch; shared covariance, shifted mean
  std::ofstream out(p);
  out << "{\"name\":\"" << name << "\",\"mean\":[" << 0.2 + mean_shift << ","
      << 0.3 + mean_shift << "," << 0.4 + mean_shift
      << "],\"cov\":[0.04,0.01,0.0,0.01,0.05,0.02,0.0,0.02,0.06],\"sample_count\":100}";
}

}  // namespace

TEST_CASE("fit writes sketches and a manifest; reruns are byte-identical") {
  TempDir tmp;
  write_dataset(tmp.path / "a.jsonl", 1);
  write_dataset(tmp.path / "b.jsonl", 2, 0.1);

  const std::string inputs =
      (tmp.path / "a.jsonl").string() + " " + (tmp.path / "b.jsonl").string();
  const auto r1 = run_cli("fit " + inputs + " --out-dir " + (tmp.path / "out1").string() +
                          kSamplingFlags);
  REQUIRE_MESSAGE(r1.exit_code == 0, r1.output);
  CHECK(fs::exists(tmp.path / "out1/a.json"));
  CHECK(fs::exists(tmp.path / "out1/b.json"));
  CHECK(fs::exists(tmp.path / "out1/manifest.json"));

  const auto r2 = run_cli("fit " + inputs + " --out-dir " + (tmp.path / "out2").string() +
                          kSamplingFlags);
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(tmp.path / "out1/a.json") == slurp(tmp.path / "out2/a.json"));
  CHECK(slurp(tmp.path / "out1/b.json") == slurp(tmp.path / "out2/b.json"));
  CHECK(slurp(tmp.path / "out1/manifest.json") == slurp(tmp.path / "out2/manifest.json"));

  const std::string manifest = slurp(tmp.path / "out1/manifest.json");
  CHECK(manifest.find("\"command\": \"fit\"") != std::string::npos);
  CHECK(manifest.find("\"fnv1a64\"") != std::string::npos);
  CHECK(manifest.find("\"seed\": 42") != std::string::npos);
}

TEST_CASE("corrupt input exits 2 and the message names file and line") {
  TempDir tmp;
  {
    std::ofstream out(tmp.path / "bad.jsonl");
    out << "{\"id\":\"ok\",\"values\":[1,2,3]}\n";
    out << "{\"id\":\"broken\",\"values\":[1,2\n";
  }
  const auto r = run_cli("fit " + (tmp.path / "bad.jsonl").string() + " --out-dir " +
                         (tmp.path / "out").string() + kSamplingFlags);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("bad.jsonl:2") != std::string::npos);
}

TEST_CASE("matrix from sketches: zero-diagonal CSV, heatmap, manifest") {
  TempDir tmp;
  for (int i = 0; i < 3; ++i) {
    write_dataset(tmp.path / ("d" + std::to_string(i) + ".jsonl"), 10 + i, 0.05 * i);
  }
  const std::string raw = (tmp.path / "d0.jsonl").string() + " " +
                          (tmp.path / "d1.jsonl").string() + " " +
                          (tmp.path / "d2.jsonl").string();
  REQUIRE(run_cli("fit " + raw + " --out-dir " + (tmp.path / "sk").string() + kSamplingFlags)
              .exit_code == 0);

  const std::string sketches = (tmp.path / "sk/d0.json").string() + " " +
                               (tmp.path / "sk/d1.json").string() + " " +
                               (tmp.path / "sk/d2.json").string();
  const auto r = run_cli("matrix " + sketches + " --metric wasserstein --out-dir " +
                         (tmp.path / "mat").string());
  REQUIRE_MESSAGE(r.exit_code == 0, r.output);
  CHECK(r.output.find("3 pairs") != std::string::npos);  // wall time + pair count logged

  const std::string csv = slurp(tmp.path / "mat/distances.csv");
  CHECK(csv.rfind("label,d0,d1,d2", 0) == 0);
  CHECK(csv.find("\nd0,0,") != std::string::npos);  // zero diagonal
  CHECK(fs::exists(tmp.path / "mat/heatmap.svg"));
  CHECK(fs::exists(tmp.path / "mat/distances.json"));
  CHECK(fs::exists(tmp.path / "mat/manifest.json"));
}

TEST_CASE("linkage metric with sketches is refused with exit 2") {
  TempDir tmp;
  write_equal_cov_sketch(tmp.path / "a.json", "a", 0.0);
  write_equal_cov_sketch(tmp.path / "b.json", "b", 0.1);
  const auto r = run_cli("matrix " + (tmp.path / "a.json").string() + " " +
                         (tmp.path / "b.json").string() + " --metric link-avg --out-dir " +
                         (tmp.path / "out").string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("MetricNeedsRawData") != std::string::npos);
}

TEST_CASE("euclidean and wasserstein matrices agree for equal covariances") {
  TempDir tmp;
  write_equal_cov_sketch(tmp.path / "a.json", "a", 0.0);
  write_equal_cov_sketch(tmp.path / "b.json", "b", 0.15);
  write_equal_cov_sketch(tmp.path / "c.json", "c", 0.3);
  const std::string sketches = (tmp.path / "a.json").string() + " " +
                               (tmp.path / "b.json").string() + " " +
                               (tmp.path / "c.json").string();
  REQUIRE(run_cli("matrix " + sketches + " --metric wasserstein --out-dir " +
                  (tmp.path / "w").string())
              .exit_code == 0);
  REQUIRE(run_cli("matrix " + sketches + " --metric euclidean --out-dir " +
                  (tmp.path / "e").string())
              .exit_code == 0);

  // parse both CSVs and compare entrywise
  auto parse = [](const std::string& text) {
    std::vector<double> vals;
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      std::istringstream row(line);
      std::string field;
      std::getline(row, field, ',');  // label
      while (std::getline(row, field, ',')) vals.push_back(std::stod(field));
    }
    return vals;
  };
  const auto w = parse(slurp(tmp.path / "w/distances.csv"));
  const auto e = parse(slurp(tmp.path / "e/distances.csv"));
  REQUIRE(w.size() == 9);
  REQUIRE(e.size() == 9);
  for (std::size_t i = 0; i < 9; ++i) CHECK(std::abs(w[i] - e[i]) <= 1e-6);
}

TEST_CASE("layout command: valid matrix in, positions out; asymmetric matrix refused") {
  TempDir tmp;
  {
    std::ofstream out(tmp.path / "m.csv");
    out << "label,a,b,c\na,0,1,2\nb,1,0,2.5\nc,2,2.5,0\n";
  }
  const auto r = run_cli("layout " + (tmp.path / "m.csv").string() + " --out-dir " +
                         (tmp.path / "lay").string() + " --seed 42");
  REQUIRE_MESSAGE(r.exit_code == 0, r.output);
  const std::string layout_json = slurp(tmp.path / "lay/layout.json");
  CHECK(layout_json.find("\"labels\"") != std::string::npos);
  CHECK(layout_json.find("\"a\"") != std::string::npos);
  CHECK(layout_json.find("\"stress\"") != std::string::npos);
  CHECK(fs::exists(tmp.path / "lay/layout.svg"));

  {
    std::ofstream out(tmp.path / "bad.csv");
    out << "label,a,b\na,0,1\nb,2,0\n";
  }
  const auto rb = run_cli("layout " + (tmp.path / "bad.csv").string() + " --out-dir " +
                          (tmp.path / "lay2").string());
  CHECK(rb.exit_code == 2);
  CHECK(rb.output.find("symmetric") != std::string::npos);
}

TEST_CASE("layout with a color map colors the nodes") {
  TempDir tmp;
  {
    std::ofstream out(tmp.path / "m.csv");
    out << "label,a,b\na,0,1\nb,1,0\n";
  }
  {
    std::ofstream out(tmp.path / "colors.csv");
    out << "a,rgb(9,99,9)\nb,rgb(9,99,9)\n";
  }
  const auto r = run_cli("layout " + (tmp.path / "m.csv").string() + " --out-dir " +
                         (tmp.path / "lay").string() + " --color-map " +
                         (tmp.path / "colors.csv").string());
  REQUIRE_MESSAGE(r.exit_code == 0, r.output);
  const std::string svg = slurp(tmp.path / "lay/layout.svg");
  std::size_t occurrences = 0, pos = 0;
  while ((pos = svg.find("rgb(9,99,9)", pos)) != std::string::npos) {
    ++occurrences;
    ++pos;
  }
  CHECK(occurrences == 2);
}

TEST_CASE("correlate: exact linear losses give r = 1; warnings and errors") {
  TempDir tmp;
  {
    std::ofstream out(tmp.path / "m.csv");
    out << "label,src,a,b,c\nsrc,0,1,2,3\na,1,0,9,9\nb,2,9,0,9\nc,3,9,9,0\n";
  }
  {
    std::ofstream out(tmp.path / "losses.csv");
    out << "label,loss\nsrc,0.5\na,2.5\nb,4.5\nc,6.5\n";  // loss = 2 d + 0.5
  }
  const auto r = run_cli("correlate " + (tmp.path / "m.csv").string() + " --source src" +
                         " --losses " + (tmp.path / "losses.csv").string() + " --out-dir " +
                         (tmp.path / "corr").string());
  REQUIRE_MESSAGE(r.exit_code == 0, r.output);
  const std::string corr = slurp(tmp.path / "corr/correlation.json");
  CHECK(corr.find("\"pearson_r\": 1.0") != std::string::npos);
  CHECK(corr.find("\"slope\": 2.0") != std::string::npos);
  CHECK(corr.find("\"intercept\": 0.5") != std::string::npos);
  CHECK(fs::exists(tmp.path / "corr/scatter.svg"));

  // a label missing from the losses file produces a warning, not a failure
  {
    std::ofstream out(tmp.path / "partial.csv");
    out << "src,0.5\na,2.5\nb,4.5\n";
  }
  const auto rp = run_cli("correlate " + (tmp.path / "m.csv").string() + " --source src" +
                          " --losses " + (tmp.path / "partial.csv").string() + " --out-dir " +
                          (tmp.path / "corr2").string());
  REQUIRE(rp.exit_code == 0);
  CHECK(rp.output.find("warning") != std::string::npos);
  CHECK(rp.output.find("'c'") != std::string::npos);

  const auto ru = run_cli("correlate " + (tmp.path / "m.csv").string() +
                          " --source nonexistent --losses " +
                          (tmp.path / "losses.csv").string() + " --out-dir " +
                          (tmp.path / "corr3").string());
  CHECK(ru.exit_code == 2);
  CHECK(ru.output.find("UnknownSourceLabel") != std::string::npos);
}

TEST_CASE("outputs are byte-identical across thread counts") {
  TempDir tmp;
  for (int i = 0; i < 3; ++i)
    write_dataset(tmp.path / ("d" + std::to_string(i) + ".jsonl"), 30 + i, 0.04 * i);
  const std::string raw = (tmp.path / "d0.jsonl").string() + " " +
                          (tmp.path / "d1.jsonl").string() + " " +
                          (tmp.path / "d2.jsonl").string();

  for (const std::string threads : {"1", "3"}) {
    const fs::path dir = tmp.path / ("t" + threads);
    REQUIRE(run_cli("matrix " + raw + " --metric link-avg --threads " + threads +
                    " --out-dir " + dir.string() + kSamplingFlags)
                .exit_code == 0);
  }
  CHECK(slurp(tmp.path / "t1/distances.csv") == slurp(tmp.path / "t3/distances.csv"));
  CHECK(slurp(tmp.path / "t1/distances.json") == slurp(tmp.path / "t3/distances.json"));
  CHECK(slurp(tmp.path / "t1/heatmap.svg") == slurp(tmp.path / "t3/heatmap.svg"));
  CHECK(slurp(tmp.path / "t1/manifest.json") == slurp(tmp.path / "t3/manifest.json"));
}
