#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "homog/config.hpp"

namespace homog {

inline constexpr const char* kVersionTag = "homog-workbench 0.1.0";

struct SampleRecord {
  std::uint64_t sample = 0;
  bool ok = false;
  std::string error;           // failure message when !ok
  std::vector<double> values;  // aligned with ReportManifest::columns when ok
};

struct AggregateRow {
  std::string column;
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean over successful samples
  std::size_t count = 0;
};

struct ReportManifest {
  std::string kind;
  std::uint64_t config_hash = 0;
  std::string version_tag = kVersionTag;
  std::size_t n_samples = 0;
  std::size_t n_failed = 0;
  std::vector<std::string> columns;
  std::vector<SampleRecord> records;     // ordered by sample index
  std::vector<AggregateRow> aggregates;  // one row per column
  std::vector<std::string> outputs;      // files written, relative to out_dir
  double wall_ms = 0.0;

  // The run as a whole fails when more than 10% of samples failed.
  bool failed() const { return n_failed * 10 > n_samples; }
};

// Executes the configured experiment. Samples run concurrently on
// cfg.threads workers; the reduction is one ordered pass over the sample
// records, so the CSV tables written to cfg.out_dir (samples.csv,
// aggregate.csv) are a pure function of (config, seed) regardless of thread
// count. Wall-clock timing appears only in manifest.txt.
ReportManifest run_experiment(const ExperimentConfig& cfg);

// Renders the manifest header and aggregate table of a completed run
// directory as text.
std::string render_report(const std::string& out_dir);

}  // namespace homog
