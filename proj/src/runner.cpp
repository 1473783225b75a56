#include "homog/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "homog/boundary_layer.hpp"
#include "homog/cone.hpp"
#include "homog/correctors.hpp"
#include "homog/elliptic.hpp"
#include "homog/ensemble.hpp"
#include "homog/field_io.hpp"
#include "homog/meyers.hpp"
#include "homog/regularity.hpp"
#include "homog/rng.hpp"

namespace homog {

namespace {

namespace fs = std::filesystem;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  return s;
}

// Collects optional field dumps for one sample; writes happen in the worker
// (distinct paths per sample, so concurrent writes never collide).
struct FieldDumper {
  const ExperimentConfig* cfg = nullptr;
  std::uint64_t sample = 0;
  std::vector<std::string> written;  // paths relative to out_dir

  void operator()(const std::string& name, const ScalarField& f, DomainKind kind) {
    if (!cfg->dump_fields) return;
    const std::string rel =
        "fields/sample_" + std::to_string(sample) + "_" + name + ".hgf1";
    dump_field(f, kind, (fs::path(cfg->out_dir) / rel).string());
    written.push_back(rel);
  }
};

struct Pipeline {
  std::vector<std::string> columns;
  std::function<std::vector<double>(std::uint64_t, FieldDumper&)> sample_fn;
};

EnsembleSpec spec_of(const ExperimentConfig& cfg) {
  EnsembleSpec es = cfg.ensemble;
  es.d = cfg.d;
  es.master_seed = cfg.seed;
  return es;
}

SolveOptions solver_opts() {
  SolveOptions opts;
  opts.tol = 1e-10;
  return opts;
}

std::array<double, 3> domain_center(const Grid& g) {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int k = 0; k < g.d; ++k) x[k] = g.origin[k] + 0.5 * g.extent(k);
  return x;
}

// Dirichlet data of an analytic function on every bounded face.
template <typename F>
BoundaryData data_from(const Grid& g, DomainKind kind, F&& fn) {
  BoundaryData bd;
  for (int axis = 0; axis < g.d; ++axis) {
    if (axis_periodic(kind, axis)) continue;
    for (int side = 0; side < 2; ++side) {
      auto& slot = bd.face[axis][side];
      slot.assign(BoundaryData::slot_cells(g, axis), 0.0);
      std::array<int, 3> ext{1, 1, 1};
      for (int k = 0; k < g.d; ++k) ext[k] = (k == axis) ? 1 : g.n[k];
      std::array<int, 3> c{0, 0, 0};
      for (c[0] = 0; c[0] < ext[0]; ++c[0])
        for (c[1] = 0; c[1] < ext[1]; ++c[1])
          for (c[2] = 0; c[2] < ext[2]; ++c[2]) {
            std::array<double, 3> xf = g.center(c);
            xf[axis] = g.origin[axis] + (side == 1 ? g.extent(axis) : 0.0);
            slot[BoundaryData::slot_index(g, axis, c)] = fn(xf);
          }
    }
  }
  return bd;
}

// Smooth seeded boundary data: a random affine part plus one low mode.
BoundaryData seeded_boundary_data(const Grid& g, DomainKind kind, std::uint64_t seed,
                                  std::uint64_t sample) {
  std::array<double, 4> c{};
  for (std::size_t k = 0; k < c.size(); ++k)
    c[k] = 2.0 * rng::uniform01(seed, sample, k, 7001) - 1.0;
  return data_from(g, kind, [c](const std::array<double, 3>& x) {
    return c[0] * x[0] + c[1] * x[1] + c[2] * x[2] +
           0.3 * c[3] * std::sin(std::numbers::pi * x[0]) *
               std::cos(std::numbers::pi * x[1]);
  });
}

// Random face field over every face (boundary included).
VecField seeded_face_field(const Grid& g, DomainKind kind, std::uint64_t seed,
                           std::uint64_t sample, std::uint64_t stream) {
  VecField w(g, kind);
  for (int axis = 0; axis < g.d; ++axis)
    for (std::size_t t = 0; t < w.comp[axis].size(); ++t)
      w.comp[axis][t] =
          2.0 * rng::uniform01(seed, sample, t, stream + std::uint64_t(axis)) - 1.0;
  return w;
}

ScalarField coefficient_entry(const CoefficientField& a, int i, int j) {
  ScalarField f(a.grid);
  for (std::size_t c = 0; c < a.grid.cells(); ++c) f[c] = a.at(c, i, j);
  return f;
}

std::vector<ScalarField> micro_correctors(const EnsembleSpec& es, const Grid& macro,
                                          double eps, std::uint64_t sample,
                                          const SolveOptions& opts) {
  const Grid micro = micro_grid(macro, eps);
  const CoefficientField a_micro = sample_field(es, micro, sample);
  std::vector<ScalarField> phi;
  phi.reserve(static_cast<std::size_t>(macro.d));
  for (int i = 0; i < macro.d; ++i) phi.push_back(solve_corrector(a_micro, i, opts));
  return phi;
}

double broadcast_T(const ExperimentConfig& cfg, std::size_t j) {
  return cfg.T.size() == 1 ? cfg.T[0] : cfg.T[j];
}

Pipeline make_correctors(const ExperimentConfig& cfg) {
  Pipeline p;
  for (int i = 0; i < cfg.d; ++i)
    for (int j = 0; j < cfg.d; ++j)
      p.columns.push_back("abar_" + std::to_string(i) + std::to_string(j) + " [1]");
  p.columns.push_back("phi_rms [len]");
  p.columns.push_back("sigma_residual_max [1]");
  p.sample_fn = [cfg](std::uint64_t s, FieldDumper& dump) {
    const Grid g = cfg.grid();
    const CoefficientField a = sample_field(spec_of(cfg), g, s);
    const CorrectorSet cs = solve_corrector_set(a, solver_opts());
    std::vector<double> v;
    for (int i = 0; i < cfg.d; ++i)
      for (int j = 0; j < cfg.d; ++j) v.push_back(cs.abar[i][j]);
    double ms = 0.0;
    for (int i = 0; i < cfg.d; ++i) {
      double m = 0.0;
      for (double x : cs.phi[static_cast<std::size_t>(i)].v) m += x * x;
      ms += m / static_cast<double>(g.cells());
    }
    v.push_back(std::sqrt(ms / cfg.d));
    double res = 0.0;
    for (int i = 0; i < cfg.d; ++i) res = std::max(res, flux_divergence_residual(cs, i));
    v.push_back(res);
    dump("a00", coefficient_entry(a, 0, 0), DomainKind::Torus);
    dump("phi0", cs.phi[0], DomainKind::Torus);
    return v;
  };
  return p;
}

Pipeline make_boundary_layer(const ExperimentConfig& cfg) {
  Pipeline p;
  for (double e : cfg.eps) {
    const std::string tag = "[eps=" + fmt_g(e) + "]";
    p.columns.push_back("decay_exponent" + tag + " [1]");
    p.columns.push_back("decay_C" + tag + " [1]");
    p.columns.push_back("ray_energy" + tag + " [len]");
    p.columns.push_back("truncated" + tag + " [bool]");
  }
  p.sample_fn = [cfg](std::uint64_t s, FieldDumper& dump) {
    const Grid g = cfg.grid();
    const EnsembleSpec es = spec_of(cfg);
    const SolveOptions opts = solver_opts();
    std::vector<double> v;
    for (std::size_t j = 0; j < cfg.eps.size(); ++j) {
      const double eps = cfg.eps[j];
      const CoefficientField a_eps = sample_field_scaled(es, g, eps, s);
      const std::vector<ScalarField> phi = micro_correctors(es, g, eps, s, opts);
      const BoundaryLayerSet bl =
          solve_boundary_layer(a_eps, phi, g, cfg.domain, broadcast_T(cfg, j), eps, opts);
      const DecayProfile prof = pointwise_decay_profile(bl);
      std::array<double, 3> x0 = domain_center(g);
      x0[0] = g.origin[0];  // midpoint of the lower Dirichlet face
      v.push_back(prof.fit.exponent);
      v.push_back(prof.fit.constant);
      v.push_back(ray_energy(bl, x0));
      v.push_back(bl.truncated ? 1.0 : 0.0);
      if (j == 0) dump("theta0", bl.theta[0], cfg.domain);
    }
    return v;
  };
  return p;
}

Pipeline make_excess(const ExperimentConfig& cfg) {
  Pipeline p;
  for (double r : cfg.radii) p.columns.push_back("excess[r=" + fmt_g(r) + "] [1]");
  p.columns.push_back("fit_exponent [1]");
  p.columns.push_back("fit_valid [bool]");
  p.columns.push_back("fit_r_lo [len]");
  p.sample_fn = [cfg](std::uint64_t s, FieldDumper& dump) {
    const Grid g = cfg.grid();
    const EnsembleSpec es = spec_of(cfg);
    const SolveOptions opts = solver_opts();
    const double eps = cfg.eps[0];
    const CoefficientField a_eps = sample_field_scaled(es, g, eps, s);
    const std::vector<ScalarField> phi = micro_correctors(es, g, eps, s, opts);
    const BoundaryLayerSet bl =
        solve_boundary_layer(a_eps, phi, g, cfg.domain, broadcast_T(cfg, 0), eps, opts);
    const CorrectedFrame frame = make_frame(g, cfg.domain, phi, &bl, eps);

    const BoundaryData bd = seeded_boundary_data(g, cfg.domain, cfg.seed, s);
    const ScalarField u = harmonic_sample(a_eps, cfg.domain, bd, opts);
    const VecField grad_u = gradient(u, BcTable(g, cfg.domain, 0.0, &bd));
    const ExcessReport rep =
        excess_decay_report(grad_u, frame, domain_center(g), cfg.radii, 8.0);

    std::vector<double> v;
    for (const ExcessEntry& e : rep.entries) v.push_back(e.value);
    v.push_back(rep.fit.exponent);
    v.push_back(rep.fit.valid ? 1.0 : 0.0);
    v.push_back(rep.fit_r_lo);
    dump("u", u, cfg.domain);
    return v;
  };
  return p;
}

Pipeline make_mean_value(const ExperimentConfig& cfg) {
  Pipeline p;
  p.columns = {"best_ratio [1]", "r_star [len]", "r_star_found [bool]"};
  p.sample_fn = [cfg](std::uint64_t s, FieldDumper& dump) {
    const Grid g = cfg.grid();
    const double eps = cfg.eps.empty() ? 1.0 : cfg.eps[0];
    const CoefficientField a = sample_field_scaled(spec_of(cfg), g, eps, s);
    const BoundaryData bd = seeded_boundary_data(g, cfg.domain, cfg.seed, s);
    const ScalarField u = harmonic_sample(a, cfg.domain, bd, solver_opts());
    const ScalarField energy =
        grad_energy_cells(gradient(u, BcTable(g, cfg.domain, 0.0, &bd)));
    const MeanValueReport rep =
        mean_value_report(energy, cfg.domain, domain_center(g), cfg.radii, 8.0);
    const double best =
        *std::min_element(rep.max_ratio.begin(), rep.max_ratio.end());
    dump("grad_energy", energy, cfg.domain);
    return std::vector<double>{best, rep.r_star, rep.r_star_found ? 1.0 : 0.0};
  };
  return p;
}

Pipeline make_hardy(const ExperimentConfig& cfg) {
  Pipeline p;
  p.columns = {"lhs [1]", "rhs [1]", "ratio [1]", "cells [1]"};
  p.sample_fn = [cfg](std::uint64_t s, FieldDumper& dump) {
    const Grid g = cfg.grid();
    const CoefficientField a = sample_field(spec_of(cfg), g, s);
    const VecField data = seeded_face_field(g, cfg.domain, cfg.seed, s, 7101);
    const ScalarField f(g);
    const HardyReport rep =
        hardy_check(a, data, f, domain_center(g), cfg.rho, cfg.kappa, solver_opts());
    dump("u", rep.u, cfg.domain);
    return std::vector<double>{rep.lhs, rep.rhs, rep.ratio,
                               static_cast<double>(rep.cells)};
  };
  return p;
}

Pipeline make_meyers(const ExperimentConfig& cfg) {
  Pipeline p;
  p.columns = {"lhs [1]", "rhs [1]", "ratio [1]", "params_valid [bool]"};
  p.sample_fn = [cfg](std::uint64_t s, FieldDumper& dump) {
    const Grid g = cfg.grid();
    const CoefficientField a = sample_field(spec_of(cfg), g, s);
    const VecField data = seeded_face_field(g, cfg.domain, cfg.seed, s, 7201);
    const MeyersReport rep =
        weighted_meyers_check(a, cfg.domain, data, cfg.p, cfg.alpha0, cfg.alpha1, cfg.R,
                              domain_center(g), solver_opts());
    dump("v", rep.v, cfg.domain);
    return std::vector<double>{rep.lhs, rep.rhs, rep.ratio, rep.params_valid ? 1.0 : 0.0};
  };
  return p;
}

Pipeline make_cone(const ExperimentConfig& cfg) {
  Pipeline p;
  p.columns = {"profile_exponent [1]", "profile_residual [1]", "edge_max_ratio [1]"};

  const Grid g = cfg.grid();
  double min_extent = g.extent(0);
  for (int k = 1; k < g.d; ++k) min_extent = std::min(min_extent, g.extent(k));
  std::vector<std::array<double, 3>> probes;
  for (int i = 0; i < 16; ++i) {
    const double t = 3.0 * g.h + (0.9 * min_extent - 3.0 * g.h) * i / 15.0;
    std::array<double, 3> x = g.origin;
    for (int k = 0; k < g.d; ++k) x[k] += t / std::sqrt(double(g.d));
    probes.push_back(x);
  }

  // The pointwise envelope rate comes from one constant-coefficient solve on
  // the same geometry: half the fitted gradient-energy decay exponent. It is
  // computed on first use and shared across workers; a failure there surfaces
  // as a per-sample error on every record.
  struct Envelope {
    std::once_flag once;
    double delta = 0.0;
  };
  auto env = std::make_shared<Envelope>();

  p.sample_fn = [cfg, probes, env](std::uint64_t s, FieldDumper& dump) {
    const Grid g = cfg.grid();
    const BoundaryData bd = data_from(g, cfg.domain, [&g](const std::array<double, 3>& x) {
      double v = 1.0;
      for (int k = 0; k < g.d; ++k) v *= x[k] - g.origin[k];
      return v;
    });
    const BcTable bc(g, cfg.domain, 0.0, &bd);
    const std::vector<double> zero_rhs(g.cells(), 0.0);

    std::call_once(env->once, [&] {
      CoefficientField id(g);
      for (std::size_t c = 0; c < g.cells(); ++c) id.set_scalar(c, 1.0);
      id.lambda = 1.0;
      const EllipticOperator op_id(id, bc, 0.0);
      const ScalarField u_id = solve(op_id, zero_rhs, solver_opts());
      const DecayProfile prof_id =
          cone_excess_profile(gradient(u_id, bc), g.origin, cfg.radii);
      env->delta = 0.5 * prof_id.fit.exponent;
    });

    const double eps = cfg.eps.empty() ? 1.0 : cfg.eps[0];
    const CoefficientField a = sample_field_scaled(spec_of(cfg), g, eps, s);
    const EllipticOperator op(a, bc, 0.0);
    const ScalarField u = solve(op, zero_rhs, solver_opts());
    const VecField gu = gradient(u, bc);
    const DecayProfile prof = cone_excess_profile(gu, g.origin, cfg.radii);
    const EdgeDecayReport rep =
        edge_gradient_decay_check(gu, g.origin, probes, cfg.rho, env->delta);
    dump("u", u, cfg.domain);
    return std::vector<double>{prof.fit.exponent, prof.fit.residual, rep.max_ratio};
  };
  return p;
}

Pipeline make_two_scale(const ExperimentConfig& cfg) {
  Pipeline p;
  for (double e : cfg.eps) {
    const std::string tag = "[eps=" + fmt_g(e) + "]";
    p.columns.push_back("h1_plain" + tag + " [1]");
    p.columns.push_back("h1_corrected" + tag + " [1]");
  }
  p.sample_fn = [cfg](std::uint64_t s, FieldDumper& dump) {
    const Grid g = cfg.grid();
    const EnsembleSpec es = spec_of(cfg);
    const SolveOptions opts = solver_opts();
    const std::vector<double> ones(g.cells(), 1.0);
    const BcTable bc0(g, cfg.domain, 0.0);
    std::vector<double> v;
    for (std::size_t j = 0; j < cfg.eps.size(); ++j) {
      const double eps = cfg.eps[j];
      const CoefficientField a_eps = sample_field_scaled(es, g, eps, s);
      const Grid micro = micro_grid(g, eps);
      const CoefficientField a_micro = sample_field(es, micro, s);
      const CorrectorSet cs = solve_corrector_set(a_micro, opts);
      const BoundaryLayerSet bl = solve_boundary_layer(a_eps, cs.phi, g, cfg.domain,
                                                       broadcast_T(cfg, j), eps, opts);
      const EllipticOperator op_eps(a_eps, bc0, 0.0);
      const ScalarField ueps = solve(op_eps, ones, opts);
      CoefficientField abar(g);
      for (std::size_t c = 0; c < g.cells(); ++c)
        for (int i = 0; i < g.d; ++i)
          for (int k = 0; k < g.d; ++k) abar.at(c, i, k) = cs.abar[i][k];
      abar.refresh_lambda();
      const EllipticOperator op_bar(abar, bc0, 0.0);
      const ScalarField ubar = solve(op_bar, ones, opts);
      const TwoScaleReport rep = two_scale_error(ueps, ubar, cs, bl, eps);
      v.push_back(rep.h1_plain);
      v.push_back(rep.h1_corrected);
      if (j == 0) {
        dump("ueps", ueps, cfg.domain);
        dump("ubar", ubar, cfg.domain);
      }
    }
    return v;
  };
  return p;
}

Pipeline make_spectral_gap(const ExperimentConfig& cfg) {
  Pipeline p;
  p.columns = {"variance [1]", "sensitivity [1]", "ratio [1]", "clipped [bool]"};
  p.sample_fn = [cfg](std::uint64_t s, FieldDumper&) {
    EnsembleSpec es = spec_of(cfg);
    es.master_seed = cfg.seed ^ (0x9E3779B97F4A7C15ull * (s + 1));
    const SpectralGapReport rep =
        spectral_gap_probe(es, GapFunctional::AverageA11Ball, 128);
    return std::vector<double>{rep.variance, rep.rhs, rep.ratio, rep.clipped ? 1.0 : 0.0};
  };
  return p;
}

Pipeline make_pipeline(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::Correctors: return make_correctors(cfg);
    case ExperimentKind::BoundaryLayer: return make_boundary_layer(cfg);
    case ExperimentKind::Excess: return make_excess(cfg);
    case ExperimentKind::MeanValue: return make_mean_value(cfg);
    case ExperimentKind::Hardy: return make_hardy(cfg);
    case ExperimentKind::Meyers: return make_meyers(cfg);
    case ExperimentKind::Cone: return make_cone(cfg);
    case ExperimentKind::TwoScale: return make_two_scale(cfg);
    case ExperimentKind::SpectralGap: return make_spectral_gap(cfg);
    case ExperimentKind::Unset: break;
  }
  throw ConfigError("config: experiment kind is not set");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("short write to '" + path.string() + "'");
}

}  // namespace

ReportManifest run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  fs::create_directories(cfg.out_dir);
  if (cfg.dump_fields) fs::create_directories(fs::path(cfg.out_dir) / "fields");

  const Pipeline pipe = make_pipeline(cfg);

  ReportManifest m;
  m.kind = experiment_kind_name(cfg.kind);
  m.config_hash = cfg.hash();
  m.n_samples = static_cast<std::size_t>(cfg.samples);
  m.columns = pipe.columns;
  m.records.resize(m.n_samples);

  std::atomic<std::uint64_t> next{0};
  std::mutex out_mutex;
  auto worker = [&]() {
    for (std::uint64_t s = next.fetch_add(1); s < m.n_samples; s = next.fetch_add(1)) {
      SampleRecord rec;
      rec.sample = s;
      FieldDumper dumper{&cfg, s, {}};
      try {
        rec.values = pipe.sample_fn(s, dumper);
        rec.ok = rec.values.size() == pipe.columns.size();
        if (!rec.ok) rec.error = "pipeline produced a malformed record";
      } catch (const std::exception& e) {
        rec.error = e.what();
      }
      {
        std::lock_guard<std::mutex> lock(out_mutex);
        m.records[s] = std::move(rec);
        m.outputs.insert(m.outputs.end(), dumper.written.begin(), dumper.written.end());
      }
    }
  };

  const int nt = std::min<int>(cfg.threads, static_cast<int>(m.n_samples));
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (const SampleRecord& r : m.records)
    if (!r.ok) ++m.n_failed;

  // ordered reduction: mean and standard error per column over ok samples
  for (std::size_t col = 0; col < m.columns.size(); ++col) {
    AggregateRow row;
    row.column = m.columns[col];
    double sum = 0.0;
    for (const SampleRecord& r : m.records)
      if (r.ok) {
        sum += r.values[col];
        ++row.count;
      }
    if (row.count > 0) row.mean = sum / static_cast<double>(row.count);
    if (row.count > 1) {
      double ss = 0.0;
      for (const SampleRecord& r : m.records)
        if (r.ok) ss += (r.values[col] - row.mean) * (r.values[col] - row.mean);
      row.se = std::sqrt(ss / (static_cast<double>(row.count - 1) *
                               static_cast<double>(row.count)));
    }
    m.aggregates.push_back(row);
  }

  // samples.csv: one row per sample in index order
  std::string csv = "sample,status";
  for (const std::string& c : m.columns) csv += "," + sanitize(c);
  csv += '\n';
  for (const SampleRecord& r : m.records) {
    csv += std::to_string(r.sample);
    csv += r.ok ? ",ok" : ",error: " + sanitize(r.error);
    for (std::size_t col = 0; col < m.columns.size(); ++col)
      csv += r.ok ? "," + fmt17(r.values[col]) : ",";
    csv += '\n';
  }
  write_text(fs::path(cfg.out_dir) / "samples.csv", csv);

  std::string agg = "column,mean,se,count\n";
  for (const AggregateRow& row : m.aggregates) {
    agg += sanitize(row.column) + "," + fmt17(row.mean) + "," + fmt17(row.se) + "," +
           std::to_string(row.count) + '\n';
  }
  write_text(fs::path(cfg.out_dir) / "aggregate.csv", agg);

  m.outputs.push_back("samples.csv");
  m.outputs.push_back("aggregate.csv");
  std::sort(m.outputs.begin(), m.outputs.end());

  m.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                  .count();

  char hashbuf[24];
  std::snprintf(hashbuf, sizeof hashbuf, "%016llx",
                static_cast<unsigned long long>(m.config_hash));
  std::string man;
  man += "kind = " + m.kind + '\n';
  man += std::string("config-hash = ") + hashbuf + '\n';
  man += "version = " + m.version_tag + '\n';
  man += "samples = " + std::to_string(m.n_samples) + '\n';
  man += "failed = " + std::to_string(m.n_failed) + '\n';
  man += "wall-ms = " + fmt_g(m.wall_ms) + '\n';
  for (const SampleRecord& r : m.records)
    man += "record " + std::to_string(r.sample) + " = " +
           (r.ok ? "ok" : "error: " + sanitize(r.error)) + '\n';
  for (const std::string& o : m.outputs) man += "output = " + o + '\n';
  write_text(fs::path(cfg.out_dir) / "manifest.txt", man);

  return m;
}

std::string render_report(const std::string& out_dir) {
  const fs::path dir(out_dir);
  std::ifstream man(dir / "manifest.txt");
  if (!man) throw Error("no manifest.txt under '" + out_dir + "'");
  std::string text, line;
  while (std::getline(man, line)) {
    if (line.rfind("record ", 0) == 0 || line.rfind("output ", 0) == 0) continue;
    text += line + '\n';
  }
  std::ifstream agg(dir / "aggregate.csv");
  if (!agg) throw Error("no aggregate.csv under '" + out_dir + "'");
  text += '\n';
  bool header = true;
  while (std::getline(agg, line)) {
    std::istringstream row(line);
    std::string col, mean, se, count;
    std::getline(row, col, ',');
    std::getline(row, mean, ',');
    std::getline(row, se, ',');
    std::getline(row, count, ',');
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-36s %-24s %-24s %s\n", col.c_str(), mean.c_str(),
                  se.c_str(), count.c_str());
    text += buf;
    if (header) header = false;
  }
  return text;
}

}  // namespace homog
