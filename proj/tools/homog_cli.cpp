// Command-line front end for the homogenization workbench. Talks to the
// library exclusively through its C interface.
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "homog.h"

namespace {

int exit_for(homog_status st) {
  switch (st) {
    case HOMOG_OK: return 0;
    case HOMOG_ERR_CONFIG: return 2;
    case HOMOG_ERR_SAMPLES: return 3;
    default: return 1;
  }
}

int fail(homog_status st) {
  std::fprintf(stderr, "error: %s\n", homog_last_error());
  return exit_for(st);
}

// Options shared by every data-producing subcommand; empty string = keep the
// configured value.
struct Opts {
  std::string config;
  std::string seed;
  std::string samples;
  std::string threads;
  std::string out;
  bool dump_fields = false;
};

// RAII for the config handle so early returns cannot leak it.
struct ConfigHandle {
  homog_config* c = nullptr;
  ~ConfigHandle() { homog_config_free(c); }
};

homog_status load_config(const Opts& o, const char* kind, ConfigHandle& h) {
  homog_status st = homog_config_parse_file(o.config.c_str(), &h.c);
  if (st != HOMOG_OK) return st;
  struct {
    const char* key;
    const std::string& value;
  } overrides[] = {
      {"kind", kind ? std::string(kind) : std::string()},
      {"seed", o.seed},
      {"samples", o.samples},
      {"threads", o.threads},
      {"out", o.out},
  };
  for (const auto& ov : overrides) {
    if (ov.value.empty()) continue;
    st = homog_config_override(h.c, ov.key, ov.value.c_str());
    if (st != HOMOG_OK) return st;
  }
  if (o.dump_fields) {
    st = homog_config_override(h.c, "dump-fields", "true");
    if (st != HOMOG_OK) return st;
  }
  return homog_config_validate(h.c);
}

int run_experiment_cmd(const std::string& kind, const Opts& o) {
  ConfigHandle cfg;
  homog_status st = load_config(o, kind.c_str(), cfg);
  if (st != HOMOG_OK) return fail(st);

  homog_report* rep = nullptr;
  st = homog_run(cfg.c, &rep);
  if (!rep) return fail(st);

  std::printf("run %s: %" PRIu64 " samples, %" PRIu64 " failed, hash %016" PRIx64 "\n",
              kind.c_str(), homog_report_samples(rep), homog_report_failures(rep),
              homog_report_hash(rep));
  char* text = nullptr;
  if (homog_report_render(homog_report_out_dir(rep), &text) == HOMOG_OK) {
    std::fputs(text, stdout);
    homog_string_free(text);
  }
  if (st != HOMOG_OK) std::fprintf(stderr, "error: %s\n", homog_last_error());
  homog_report_free(rep);
  return exit_for(st);
}

int run_sample_field(const Opts& o, const std::vector<int>& entry) {
  ConfigHandle cfg;
  // no kind override or validation: drawing coefficient samples only needs
  // the ensemble and grid sections
  homog_status st = homog_config_parse_file(o.config.c_str(), &cfg.c);
  if (st != HOMOG_OK) return fail(st);
  const struct {
    const char* key;
    const std::string& value;
  } overrides[] = {{"seed", o.seed}, {"samples", o.samples}, {"out", o.out}};
  for (const auto& ov : overrides) {
    if (ov.value.empty()) continue;
    st = homog_config_override(cfg.c, ov.key, ov.value.c_str());
    if (st != HOMOG_OK) return fail(st);
  }

  const std::string dir = homog_config_out_dir(cfg.c);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::fprintf(stderr, "error: cannot create '%s': %s\n", dir.c_str(),
                 ec.message().c_str());
    return 1;
  }
  const uint64_t count = homog_config_samples(cfg.c);
  for (uint64_t s = 0; s < count; ++s) {
    homog_field* f = nullptr;
    st = homog_sample_coefficient(cfg.c, s, entry[0], entry[1], &f);
    if (st != HOMOG_OK) return fail(st);
    const std::string path = dir + "/a" + std::to_string(entry[0]) +
                             std::to_string(entry[1]) + "_sample_" +
                             std::to_string(s) + ".hgf1";
    st = homog_field_dump(f, path.c_str());
    homog_field_free(f);
    if (st != HOMOG_OK) return fail(st);
    std::printf("wrote %s\n", path.c_str());
  }
  return 0;
}

int run_report(const std::string& dir) {
  char* text = nullptr;
  const homog_status st = homog_report_render(dir.c_str(), &text);
  if (st != HOMOG_OK) return fail(st);
  std::fputs(text, stdout);
  homog_string_free(text);
  return 0;
}

void add_common(CLI::App* sub, Opts& o, bool with_threads) {
  sub->add_option("-c,--config", o.config, "configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--seed", o.seed, "override the master seed");
  sub->add_option("--samples", o.samples, "override the sample count");
  sub->add_option("--out", o.out, "override the output directory");
  if (with_threads) {
    sub->add_option("--threads", o.threads, "worker threads");
    sub->add_flag("--dump-fields", o.dump_fields, "write solution fields");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("stochastic homogenization workbench (") +
               homog_version() + ")"};
  app.require_subcommand(1);

  static const char* kExperiments[] = {
      "correctors", "boundary-layer", "excess",    "mean-value", "hardy",
      "meyers",     "cone",           "two-scale", "spectral-gap"};
  static const char* kBlurbs[] = {
      "periodic correctors and the effective tensor",
      "Dirichlet boundary-layer decay",
      "excess decay of harmonic samples",
      "mean-value property of the energy density",
      "halved-ball trace inequality",
      "weighted integrability of gradients",
      "corner-singularity exponents",
      "two-scale expansion error",
      "variance bounds for the sampled medium"};

  Opts opts;
  std::vector<CLI::App*> subs;
  for (std::size_t k = 0; k < std::size(kExperiments); ++k) {
    CLI::App* sub = app.add_subcommand(kExperiments[k], kBlurbs[k]);
    add_common(sub, opts, true);
    subs.push_back(sub);
  }

  CLI::App* sample = app.add_subcommand("sample-field", "draw coefficient fields");
  std::vector<int> entry{0, 0};
  add_common(sample, opts, false);
  sample->add_option("--entry", entry, "matrix entry (i j)")->expected(2);

  CLI::App* report = app.add_subcommand("report", "summarize a finished run");
  std::string report_dir = "out";
  report->add_option("dir", report_dir, "run directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  for (std::size_t k = 0; k < subs.size(); ++k)
    if (app.got_subcommand(subs[k])) return run_experiment_cmd(kExperiments[k], opts);
  if (app.got_subcommand(sample)) return run_sample_field(opts, entry);
  if (app.got_subcommand(report)) return run_report(report_dir);
  return 2;
}
