#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "homog/config.hpp"
#include "homog/field_io.hpp"
#include "homog/runner.hpp"

using namespace homog;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(bool(in));
  return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("homog_run_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig constant_correctors_config(const fs::path& out) {
  ExperimentConfig cfg = parse_config_string(R"(
kind = correctors
samples = 3
seed = 7

[ensemble]
kind = constant
lambda = 1

[grid]
d = 2
n = 8 8
h = 0.125
)");
  cfg.out_dir = out.string();
  return cfg;
}

}  // namespace

TEST_CASE("runner: identity medium gives the identity effective tensor") {
  const fs::path dir = fresh_dir("const");
  ExperimentConfig cfg = constant_correctors_config(dir);
  cfg.dump_fields = true;
  const ReportManifest m = run_experiment(cfg);

  CHECK(m.kind == "correctors");
  CHECK(m.config_hash == cfg.hash());
  CHECK(m.n_samples == 3);
  CHECK(m.n_failed == 0);
  CHECK(!m.failed());
  REQUIRE(m.columns.size() == 6);  // 4 tensor entries + phi_rms + sigma residual
  REQUIRE(m.records.size() == 3);
  for (const SampleRecord& r : m.records) {
    REQUIRE(r.ok);
    CHECK(r.values[0] == doctest::Approx(1.0).epsilon(1e-10));  // abar_00
    CHECK(std::abs(r.values[1]) < 1e-10);                       // abar_01
    CHECK(std::abs(r.values[2]) < 1e-10);
    CHECK(r.values[3] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(r.values[4]) < 1e-10);  // phi_rms
  }

  // aggregates recompute from the records
  REQUIRE(m.aggregates.size() == m.columns.size());
  for (std::size_t col = 0; col < m.columns.size(); ++col) {
    double mean = 0.0;
    for (const SampleRecord& r : m.records) mean += r.values[col];
    mean /= 3.0;
    double ss = 0.0;
    for (const SampleRecord& r : m.records)
      ss += (r.values[col] - mean) * (r.values[col] - mean);
    const double se = std::sqrt(ss / (2.0 * 3.0));
    CHECK(m.aggregates[col].column == m.columns[col]);
    CHECK(m.aggregates[col].count == 3);
    CHECK(m.aggregates[col].mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(m.aggregates[col].se == doctest::Approx(se).epsilon(1e-12));
  }

  // the dumped fields load back
  CHECK(fs::exists(dir / "samples.csv"));
  CHECK(fs::exists(dir / "aggregate.csv"));
  CHECK(fs::exists(dir / "manifest.txt"));
  bool saw_field = false;
  for (const std::string& rel : m.outputs) {
    if (rel.rfind("fields/", 0) != 0) continue;
    saw_field = true;
    const LoadedField lf = load_field((dir / rel).string());
    CHECK(lf.kind == DomainKind::Torus);
    CHECK(lf.field.grid.cells() == 64);
  }
  CHECK(saw_field);

  const std::string rendered = render_report(dir.string());
  CHECK(rendered.find("correctors") != std::string::npos);
  CHECK(rendered.find("abar_00") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("runner: identical config and seed reproduce byte-identical CSVs") {
  const fs::path d1 = fresh_dir("rep1");
  const fs::path d2 = fresh_dir("rep2");
  const fs::path d3 = fresh_dir("rep3");

  ExperimentConfig cfg = parse_config_string(R"(
kind = spectral-gap
samples = 4
seed = 11

[ensemble]
kind = checkerboard
lambda = 0.25

[grid]
d = 2
n = 8 8
h = 0.125
)");

  cfg.out_dir = d1.string();
  cfg.threads = 1;
  run_experiment(cfg);

  cfg.out_dir = d2.string();
  run_experiment(cfg);  // repeat, same threads

  cfg.out_dir = d3.string();
  cfg.threads = 3;  // different worker count must not change the bytes
  run_experiment(cfg);

  const std::string s1 = slurp(d1 / "samples.csv");
  CHECK(s1 == slurp(d2 / "samples.csv"));
  CHECK(s1 == slurp(d3 / "samples.csv"));
  const std::string a1 = slurp(d1 / "aggregate.csv");
  CHECK(a1 == slurp(d2 / "aggregate.csv"));
  CHECK(a1 == slurp(d3 / "aggregate.csv"));

  // a different seed must change the numbers
  const fs::path d4 = fresh_dir("rep4");
  cfg.out_dir = d4.string();
  apply_override(cfg, "seed", "12");
  run_experiment(cfg);
  CHECK(s1 != slurp(d4 / "samples.csv"));

  fs::remove_all(d1);
  fs::remove_all(d2);
  fs::remove_all(d3);
  fs::remove_all(d4);
}

TEST_CASE("runner: per-sample failures are recorded and gate the manifest") {
  const fs::path dir = fresh_dir("fail");
  // radii reach far beyond the unit box, so the cone profile throws per sample
  ExperimentConfig cfg = parse_config_string(R"(
kind = cone
samples = 3
seed = 5

[ensemble]
kind = constant
lambda = 1

[grid]
d = 2
n = 8 8
h = 0.125
domain = corner-box

[sweep]
radii = 0.5 4.0
rho = 0.25
)");
  cfg.out_dir = dir.string();
  const ReportManifest m = run_experiment(cfg);

  CHECK(m.n_failed == 3);
  CHECK(m.failed());
  for (const SampleRecord& r : m.records) {
    CHECK(!r.ok);
    CHECK(!r.error.empty());
  }
  for (const AggregateRow& row : m.aggregates) CHECK(row.count == 0);

  const std::string csv = slurp(dir / "samples.csv");
  CHECK(csv.find("error:") != std::string::npos);
  const std::string man = slurp(dir / "manifest.txt");
  CHECK(man.find("failed = 3") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("runner: failure threshold tolerates a minority of bad samples") {
  ReportManifest m;
  m.n_samples = 20;
  m.n_failed = 2;
  CHECK(!m.failed());  // 10% is still acceptable
  m.n_failed = 3;
  CHECK(m.failed());
}

TEST_CASE("runner: unvalidated configs are rejected up front") {
  ExperimentConfig cfg;  // kind unset
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}
