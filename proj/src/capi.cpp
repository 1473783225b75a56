#include "homog.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "homog/config.hpp"
#include "homog/ensemble.hpp"
#include "homog/field_io.hpp"
#include "homog/runner.hpp"

struct homog_config {
  homog::ExperimentConfig cfg;
};

struct homog_report {
  homog::ReportManifest m;
  std::string out_dir;
};

struct homog_field {
  homog::LoadedField lf;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

// Runs the body, translating exceptions into status codes. `io_errors`
// marks calls whose domain failures are file problems rather than bad input.
template <typename F>
homog_status guarded(bool io_errors, F&& body) {
  try {
    return body();
  } catch (const homog::ConfigError& e) {
    set_error(e.what());
    return HOMOG_ERR_CONFIG;
  } catch (const homog::Error& e) {
    set_error(e.what());
    return io_errors ? HOMOG_ERR_IO : HOMOG_ERR_INVALID;
  } catch (const std::exception& e) {
    set_error(e.what());
    return HOMOG_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown failure");
    return HOMOG_ERR_INTERNAL;
  }
}

homog_status invalid(const char* msg) {
  set_error(msg);
  return HOMOG_ERR_INVALID;
}

homog_status copy_out(const std::string& text, char** out) {
  char* buf = static_cast<char*>(std::malloc(text.size() + 1));
  if (!buf) {
    set_error("out of memory");
    return HOMOG_ERR_INTERNAL;
  }
  std::memcpy(buf, text.c_str(), text.size() + 1);
  *out = buf;
  return HOMOG_OK;
}

}  // namespace

extern "C" {

const char* homog_version(void) { return homog::kVersionTag; }

const char* homog_last_error(void) { return g_last_error.c_str(); }

void homog_string_free(char* s) { std::free(s); }

/* ---- configuration ------------------------------------------------------ */

homog_status homog_config_parse_string(const char* text, homog_config** out) {
  if (!text || !out) return invalid("null argument");
  return guarded(false, [&] {
    *out = new homog_config{homog::parse_config_string(text)};
    return HOMOG_OK;
  });
}

homog_status homog_config_parse_file(const char* path, homog_config** out) {
  if (!path || !out) return invalid("null argument");
  return guarded(false, [&] {
    *out = new homog_config{homog::parse_config_file(path)};
    return HOMOG_OK;
  });
}

homog_status homog_config_override(homog_config* cfg, const char* key,
                                   const char* value) {
  if (!cfg || !key || !value) return invalid("null argument");
  return guarded(false, [&] {
    homog::apply_override(cfg->cfg, key, value);
    return HOMOG_OK;
  });
}

homog_status homog_config_validate(const homog_config* cfg) {
  if (!cfg) return invalid("null argument");
  return guarded(false, [&] {
    cfg->cfg.validate();
    return HOMOG_OK;
  });
}

uint64_t homog_config_hash(const homog_config* cfg) {
  return cfg ? cfg->cfg.hash() : 0;
}

homog_status homog_config_canonical(const homog_config* cfg, char** out) {
  if (!cfg || !out) return invalid("null argument");
  return guarded(false, [&] { return copy_out(cfg->cfg.canonical(), out); });
}

uint64_t homog_config_samples(const homog_config* cfg) {
  return cfg ? cfg->cfg.samples : 0;
}

const char* homog_config_out_dir(const homog_config* cfg) {
  return cfg ? cfg->cfg.out_dir.c_str() : nullptr;
}

void homog_config_free(homog_config* cfg) { delete cfg; }

/* ---- runs ---------------------------------------------------------------- */

homog_status homog_run(const homog_config* cfg, homog_report** out) {
  if (!cfg || !out) return invalid("null argument");
  return guarded(false, [&] {
    auto* rep = new homog_report{homog::run_experiment(cfg->cfg), cfg->cfg.out_dir};
    *out = rep;
    if (rep->m.failed()) {
      set_error("more than 10% of samples failed; see samples.csv");
      return HOMOG_ERR_SAMPLES;
    }
    return HOMOG_OK;
  });
}

uint64_t homog_report_samples(const homog_report* rep) {
  return rep ? rep->m.n_samples : 0;
}

uint64_t homog_report_failures(const homog_report* rep) {
  return rep ? rep->m.n_failed : 0;
}

uint64_t homog_report_hash(const homog_report* rep) {
  return rep ? rep->m.config_hash : 0;
}

size_t homog_report_columns(const homog_report* rep) {
  return rep ? rep->m.columns.size() : 0;
}

const char* homog_report_column_name(const homog_report* rep, size_t index) {
  if (!rep || index >= rep->m.columns.size()) return nullptr;
  return rep->m.columns[index].c_str();
}

homog_status homog_report_aggregate(const homog_report* rep, size_t index,
                                    double* mean, double* se, uint64_t* count) {
  if (!rep) return invalid("null argument");
  if (index >= rep->m.aggregates.size()) return invalid("column index out of range");
  const homog::AggregateRow& row = rep->m.aggregates[index];
  if (mean) *mean = row.mean;
  if (se) *se = row.se;
  if (count) *count = row.count;
  return HOMOG_OK;
}

homog_status homog_report_value(const homog_report* rep, uint64_t sample,
                                size_t column, double* value) {
  if (!rep || !value) return invalid("null argument");
  if (sample >= rep->m.records.size()) return invalid("sample index out of range");
  if (column >= rep->m.columns.size()) return invalid("column index out of range");
  const homog::SampleRecord& rec = rep->m.records[sample];
  if (!rec.ok) {
    set_error("sample failed: " + rec.error);
    return HOMOG_ERR_INVALID;
  }
  *value = rec.values[column];
  return HOMOG_OK;
}

const char* homog_report_out_dir(const homog_report* rep) {
  return rep ? rep->out_dir.c_str() : nullptr;
}

void homog_report_free(homog_report* rep) { delete rep; }

homog_status homog_report_render(const char* out_dir, char** out) {
  if (!out_dir || !out) return invalid("null argument");
  return guarded(true, [&] { return copy_out(homog::render_report(out_dir), out); });
}

/* ---- fields -------------------------------------------------------------- */

homog_status homog_field_load(const char* path, homog_field** out) {
  if (!path || !out) return invalid("null argument");
  return guarded(true, [&] {
    *out = new homog_field{homog::load_field(path)};
    return HOMOG_OK;
  });
}

homog_status homog_field_dump(const homog_field* f, const char* path) {
  if (!f || !path) return invalid("null argument");
  return guarded(true, [&] {
    homog::dump_field(f->lf.field, f->lf.kind, path);
    return HOMOG_OK;
  });
}

homog_status homog_field_info(const homog_field* f, int* d, int n[3], double* h,
                              int* domain_kind) {
  if (!f) return invalid("null argument");
  const homog::Grid& g = f->lf.field.grid;
  if (d) *d = g.d;
  if (n)
    for (int k = 0; k < 3; ++k) n[k] = g.n[k];
  if (h) *h = g.h;
  if (domain_kind) *domain_kind = static_cast<int>(f->lf.kind);
  return HOMOG_OK;
}

const double* homog_field_data(const homog_field* f, size_t* count) {
  if (!f) return nullptr;
  if (count) *count = f->lf.field.v.size();
  return f->lf.field.v.data();
}

homog_status homog_sample_coefficient(const homog_config* cfg, uint64_t sample,
                                      int i, int j, homog_field** out) {
  if (!cfg || !out) return invalid("null argument");
  return guarded(false, [&] {
    const homog::ExperimentConfig& c = cfg->cfg;
    if (i < 0 || i >= c.d || j < 0 || j >= c.d) {
      set_error("coefficient entry indices must lie in [0, d)");
      return HOMOG_ERR_INVALID;
    }
    const homog::Grid g = c.grid();
    homog::EnsembleSpec es = c.ensemble;
    es.d = c.d;
    es.master_seed = c.seed;
    const homog::CoefficientField a = homog::sample_field(es, g, sample);
    homog::ScalarField f(g);
    for (std::size_t cell = 0; cell < g.cells(); ++cell) f[cell] = a.at(cell, i, j);
    *out = new homog_field{homog::LoadedField{std::move(f), c.domain}};
    return HOMOG_OK;
  });
}

void homog_field_free(homog_field* f) { delete f; }

}  // extern "C"
