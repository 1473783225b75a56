#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "homog/ensemble.hpp"
#include "homog/grid.hpp"

namespace homog {

// Malformed or invalid experiment configuration; the CLI maps this to its
// dedicated exit code.
class ConfigError : public Error {
  using Error::Error;
};

enum class ExperimentKind : std::uint8_t {
  Unset,
  Correctors,
  BoundaryLayer,
  Excess,
  MeanValue,
  Hardy,
  Meyers,
  Cone,
  TwoScale,
  SpectralGap,
};
const char* experiment_kind_name(ExperimentKind k);
ExperimentKind experiment_kind_from_name(const std::string& s);

// One experiment: an ensemble, a grid, parameter sweeps and execution
// controls. Parsed from a line-oriented key = value format with [ensemble],
// [grid] and [sweep] sections; '#' starts a comment, keys may not repeat.
//
// The canonical() rendering (and therefore hash()) covers exactly the
// numerical identity of the experiment: kind, samples, seed, ensemble, grid
// and sweep values. Execution controls (threads, out, dump-fields) are
// deliberately excluded: they must never change any computed number.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Unset;
  int samples = 1;
  std::uint64_t seed = 0;
  int threads = 1;
  bool dump_fields = false;
  std::string out_dir = "out";

  EnsembleSpec ensemble;  // d and master_seed mirror the grid d and `seed`

  int d = 2;
  std::array<int, 3> n{1, 1, 1};
  double h = 0.0;
  DomainKind domain = DomainKind::Torus;

  // sweep values; which ones a kind requires is checked by validate()
  std::vector<double> eps;
  std::vector<double> T;
  std::vector<double> radii;
  double p = 0.0;
  double alpha0 = -1.0;
  double alpha1 = -1.0;
  double kappa = 0.0;
  double rho = 0.0;
  double R = 0.0;

  Grid grid() const;
  void validate() const;          // throws ConfigError
  std::string canonical() const;  // fixed-order rendering, reparseable
  std::uint64_t hash() const;     // FNV-1a 64 of canonical()
};

ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Applies one top-level override (the CLI flags): key in {kind, samples,
// seed, threads, out, dump-fields}.
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

}  // namespace homog
