#include "homog/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "homog/linalg.hpp"

namespace homog {

namespace {

bool same_grid(const Grid& a, const Grid& b) {
  if (a.d != b.d || a.h != b.h) return false;
  for (int k = 0; k < 3; ++k)
    if (a.n[k] != b.n[k] || a.origin[k] != b.origin[k]) return false;
  return true;
}

double cell_volume(const Grid& g) { return std::pow(g.h, g.d); }

std::array<int, 3> cell_of(const Grid& g, const std::array<double, 3>& x) {
  std::array<int, 3> c{0, 0, 0};
  for (int k = 0; k < g.d; ++k) {
    int i = static_cast<int>(std::floor((x[k] - g.origin[k]) / g.h));
    c[k] = std::clamp(i, 0, g.n[k] - 1);
  }
  return c;
}

}  // namespace

CorrectedFrame make_frame(const Grid& g, DomainKind kind,
                          const std::vector<ScalarField>& phi_micro,
                          const BoundaryLayerSet* bl, double eps) {
  if (!phi_micro.empty() && static_cast<int>(phi_micro.size()) != g.d)
    throw Error("make_frame: one micro field per direction (or none)");
  if (bl != nullptr && !same_grid(bl->grid, g))
    throw Error("make_frame: layer grid mismatch");
  if (eps <= 0.0) throw Error("make_frame: eps must be positive");

  CorrectedFrame fr;
  fr.grid = g;
  fr.kind = kind;
  fr.d = g.d;
  fr.eps = eps;

  const bool with_phi = !phi_micro.empty();
  for (int i = 0; i < g.d; ++i) {
    ScalarField e(g);
    for (std::size_t idx = 0; idx < g.cells(); ++idx) {
      const std::array<double, 3> x = g.center(g.coords(idx));
      double v = x[i];
      if (with_phi) {
        std::array<double, 3> y{0.0, 0.0, 0.0};
        for (int k = 0; k < g.d; ++k) y[k] = x[k] / eps;
        v += eps * torus_interp(phi_micro[i], y);
      }
      if (bl != nullptr) v -= eps * bl->theta[i][idx];
      e[idx] = v;
    }
    // Dirichlet trace: affine coordinate plus the phi/theta parts; when the
    // layer set is present its trace equals the phi trace, so they cancel.
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
              double v = xf[i];
              const std::size_t slot_idx = BoundaryData::slot_index(g, axis, c);
              if (with_phi && bl == nullptr) {
                std::array<double, 3> y{0.0, 0.0, 0.0};
                for (int k = 0; k < g.d; ++k) y[k] = xf[k] / eps;
                v += eps * torus_interp(phi_micro[i], y);
              } else if (with_phi && bl != nullptr) {
                // eps*phi(x/eps) - eps*trace cancel exactly; nothing to add
              } else if (!with_phi && bl != nullptr) {
                v -= eps * bl->trace[i].face[axis][side][slot_idx];
              }
              slot[slot_idx] = v;
            }
      }
    }
    fr.data.push_back(std::move(bd));
    fr.element.push_back(std::move(e));
  }
  // slab + layer: far face flux-free, matching the layer solve
  const double massive = (bl != nullptr && kind == DomainKind::Slab) ? 1.0 : 0.0;
  for (int i = 0; i < g.d; ++i) {
    const BcTable bc(g, kind, massive, &fr.data[static_cast<std::size_t>(i)]);
    fr.grad.push_back(gradient(fr.element[static_cast<std::size_t>(i)], bc));
  }
  fr.cell_grad.resize(static_cast<std::size_t>(g.d));
  for (int i = 0; i < g.d; ++i) {
    auto& v = fr.cell_grad[static_cast<std::size_t>(i)];
    v.resize(g.cells());
    for (std::size_t idx = 0; idx < g.cells(); ++idx)
      v[idx] = vector_at_cell(fr.grad[static_cast<std::size_t>(i)],
                              g.coords(idx));
  }
  return fr;
}

ScalarField harmonic_sample(const CoefficientField& a, DomainKind kind,
                            const BoundaryData& outer_bc,
                            const SolveOptions& opts, SolveStats* stats) {
  if (kind == DomainKind::Torus)
    throw Error("harmonic_sample: a bounded domain is required");
  const BcTable bc(a.grid, kind, 0.0, &outer_bc);
  const EllipticOperator op(a, bc, 0.0);
  const std::vector<double> zero(a.grid.cells(), 0.0);
  return solve(op, zero, opts, stats);
}

ExcessEntry excess(const VecField& grad_u, const CorrectedFrame& frame,
                   const std::array<double, 3>& x0, double r) {
  const Grid& g = frame.grid;
  if (!same_grid(grad_u.grid, g)) throw Error("excess: grid mismatch");
  if (r <= 0.0) throw Error("excess: radius must be positive");
  const int d = g.d;
  const double r2 = r * r;

  std::vector<std::size_t> cells;
  for (std::size_t idx = 0; idx < g.cells(); ++idx) {
    const std::array<double, 3> x = g.center(g.coords(idx));
    if (wrapped_dist2(g, frame.kind, x, x0) <= r2) cells.push_back(idx);
  }
  if (cells.empty()) throw Error("excess: empty ball/domain intersection");

  std::vector<std::array<double, 3>> du(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k)
    du[k] = vector_at_cell(grad_u, g.coords(cells[k]));

  ExcessEntry out;
  out.r = r;
  out.cells = cells.size();

  double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  double b[3] = {0, 0, 0};
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const std::size_t idx = cells[k];
    for (int i = 0; i < d; ++i) {
      const auto& vi = frame.cell_grad[static_cast<std::size_t>(i)][idx];
      for (int j = i; j < d; ++j) {
        const auto& vj = frame.cell_grad[static_cast<std::size_t>(j)][idx];
        double dot = 0.0;
        for (int ax = 0; ax < d; ++ax) dot += vi[ax] * vj[ax];
        m[i][j] += dot;
      }
      double dotu = 0.0;
      for (int ax = 0; ax < d; ++ax) dotu += vi[ax] * du[k][ax];
      b[i] += dotu;
    }
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j) m[i][j] = m[j][i];

  out.cond = sym_cond(d, m);
  double a_opt[3] = {0, 0, 0};
  bool ok = std::isfinite(out.cond) && out.cond <= 1e8;
  if (ok) {
    double mcopy[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mcopy[i][j] = m[i][j];
    double bcopy[3] = {b[0], b[1], b[2]};
    ok = solve_small(d, mcopy, bcopy, a_opt);
  }
  const std::vector<std::vector<std::array<double, 3>>>* basis =
      &frame.cell_grad;
  std::vector<std::vector<std::array<double, 3>>> affine;
  if (!ok) {
    // degenerate frame: fall back to the affine basis, where the normal
    // matrix is the identity times the cell count
    out.affine_fallback = true;
    for (int i = 0; i < d; ++i) a_opt[i] = 0.0;
    for (std::size_t k = 0; k < cells.size(); ++k)
      for (int i = 0; i < d; ++i) a_opt[i] += du[k][i];
    for (int i = 0; i < d; ++i) a_opt[i] /= static_cast<double>(cells.size());
    affine.assign(static_cast<std::size_t>(d), {});
    for (int i = 0; i < d; ++i) {
      affine[static_cast<std::size_t>(i)].assign(g.cells(), {0.0, 0.0, 0.0});
      for (std::size_t idx = 0; idx < g.cells(); ++idx)
        affine[static_cast<std::size_t>(i)][idx][i] = 1.0;
    }
    basis = &affine;
  }

  double acc = 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const std::size_t idx = cells[k];
    for (int ax = 0; ax < d; ++ax) {
      double res = du[k][ax];
      for (int i = 0; i < d; ++i)
        res -= a_opt[i] * (*basis)[static_cast<std::size_t>(i)][idx][ax];
      acc += res * res;
    }
  }
  out.value = acc / static_cast<double>(cells.size());
  for (int i = 0; i < d; ++i) out.slope[i] = a_opt[i];
  return out;
}

ExcessReport excess_decay_report(const VecField& grad_u,
                                 const CorrectedFrame& frame,
                                 const std::array<double, 3>& x0,
                                 const std::vector<double>& radii, double c0) {
  if (radii.empty()) throw Error("excess_decay_report: radii required");
  ExcessReport rep;
  rep.x0 = x0;
  for (double r : radii) rep.entries.push_back(excess(grad_u, frame, x0, r));

  const MeanValueReport mv = mean_value_report(
      grad_energy_cells(grad_u), frame.kind, x0, radii, c0);
  rep.fit_r_lo = mv.r_star_found ? mv.r_star : radii.front();

  std::vector<double> xs, ys;
  for (const auto& e : rep.entries) {
    xs.push_back(e.r);
    ys.push_back(e.value);
  }
  rep.fit = fit_power_law(xs, ys, rep.fit_r_lo, radii.back());
  return rep;
}

MeanValueReport mean_value_report(const ScalarField& grad_energy,
                                  DomainKind kind,
                                  const std::array<double, 3>& x0,
                                  const std::vector<double>& radii, double c0) {
  if (radii.empty()) throw Error("mean_value_report: radii required");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (radii[i] <= radii[i - 1])
      throw Error("mean_value_report: radii must be strictly increasing");
  if (c0 <= 0.0) throw Error("mean_value_report: threshold must be positive");

  MeanValueReport rep;
  rep.x0 = x0;
  rep.c0 = c0;
  rep.radii = radii;
  for (double r : radii)
    rep.averages.push_back(ball_average(grad_energy, kind, x0, r));

  rep.max_ratio.resize(radii.size(), 0.0);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    double worst = 0.0;
    for (std::size_t j = i; j < radii.size(); ++j) {
      const double num = rep.averages[i], den = rep.averages[j];
      double ratio;
      if (den > 0.0)
        ratio = num / den;
      else
        ratio = (num == 0.0) ? 0.0 : std::numeric_limits<double>::infinity();
      worst = std::max(worst, ratio);
    }
    rep.max_ratio[i] = worst;
  }
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (rep.max_ratio[i] <= c0) {
      rep.r_star = radii[i];
      rep.r_star_found = true;
      break;
    }
  }
  return rep;
}

HardyReport hardy_check(const CoefficientField& a, const VecField& g,
                        const ScalarField& f, const std::array<double, 3>& x0,
                        double r, double kappa, const SolveOptions& opts) {
  if (!(kappa > 0.0) || kappa > 1.0)
    throw Error("hardy_check: kappa must lie in (0, 1]");
  if (r <= 0.0) throw Error("hardy_check: radius must be positive");
  const Grid& gr = a.grid;
  if (!same_grid(f.grid, gr) || !same_grid(g.grid, gr))
    throw Error("hardy_check: data grid mismatch");

  // half-ball mask: |x - x0| < r and first coordinate above the hyperplane
  const double r2 = r * r;
  std::vector<std::size_t> mask;
  std::vector<std::ptrdiff_t> inv(gr.cells(), -1);
  for (std::size_t idx = 0; idx < gr.cells(); ++idx) {
    const std::array<double, 3> x = gr.center(gr.coords(idx));
    double d2 = 0.0;
    for (int k = 0; k < gr.d; ++k) d2 += (x[k] - x0[k]) * (x[k] - x0[k]);
    if (d2 < r2 && x[0] > x0[0]) {
      inv[idx] = static_cast<std::ptrdiff_t>(mask.size());
      mask.push_back(idx);
    }
  }
  if (mask.empty()) throw Error("hardy_check: empty half-ball");
  // the ball must stay inside the host grid so the mask boundary is the
  // half-ball boundary, not the host's
  for (int k = 0; k < gr.d; ++k) {
    const double lo = x0[k] - r, hi = x0[k] + r;
    if (k > 0 && lo < gr.origin[k] - 1e-12)
      throw Error("hardy_check: ball leaves the host grid");
    if (hi > gr.origin[k] + gr.extent(k) + 1e-12)
      throw Error("hardy_check: ball leaves the host grid");
  }

  // restricted SPD system: zero-extension Dirichlet on the dropped cells
  const BcTable bc(gr, DomainKind::Box, 0.0);
  const EllipticOperator op(a, bc, 0.0);
  const ScalarField div_g = divergence_cells(g);
  std::vector<double> rhs(mask.size());
  for (std::size_t k = 0; k < mask.size(); ++k)
    rhs[k] = div_g[mask[k]] + f[mask[k]];

  std::vector<double> full(gr.cells(), 0.0), out_full;
  auto apply_masked = [&](const std::vector<double>& v,
                          std::vector<double>& out) {
    std::fill(full.begin(), full.end(), 0.0);
    for (std::size_t k = 0; k < mask.size(); ++k) full[mask[k]] = v[k];
    op.apply(full, out_full, false);
    out.resize(mask.size());
    for (std::size_t k = 0; k < mask.size(); ++k) out[k] = out_full[mask[k]];
  };
  const std::vector<double> diag_full = op.diagonal();
  std::vector<double> diag(mask.size());
  for (std::size_t k = 0; k < mask.size(); ++k) diag[k] = diag_full[mask[k]];

  std::vector<double> x;
  HardyReport rep;
  rep.kappa = kappa;
  rep.r = r;
  rep.cells = mask.size();
  rep.stats = cg_solve(apply_masked, diag, rhs, x, opts, false);
  if (!rep.stats.converged)
    throw Error("hardy_check: conjugate gradients stalled");

  rep.u = ScalarField(gr);
  for (std::size_t k = 0; k < mask.size(); ++k) rep.u[mask[k]] = x[k];

  const ScalarField eu = grad_energy_cells(gradient(rep.u, bc));
  const ScalarField eg = grad_energy_cells(g);
  const double vol = cell_volume(gr);
  for (std::size_t k = 0; k < mask.size(); ++k) {
    const std::size_t idx = mask[k];
    const std::array<double, 3> xx = gr.center(gr.coords(idx));
    double d2 = 0.0;
    for (int kk = 0; kk < gr.d; ++kk)
      d2 += (xx[kk] - x0[kk]) * (xx[kk] - x0[kk]);
    const double w = std::pow(1.0 - std::sqrt(d2) / r, kappa);
    rep.lhs += w * eu[idx] * vol;
    rep.rhs += w * (eg[idx] + r * r * f[idx] * f[idx]) * vol;
  }
  rep.ratio = (rep.lhs == 0.0 && rep.rhs == 0.0) ? 0.0 : rep.lhs / rep.rhs;
  return rep;
}

PointwiseReport pointwise_bound_check(const VecField& grad_u, DomainKind kind,
                                      const std::array<double, 3>& x0,
                                      double r) {
  if (r <= 0.0) throw Error("pointwise_bound_check: radius must be positive");
  const Grid& g = grad_u.grid;
  const std::array<int, 3> c = cell_of(g, x0);
  const std::array<double, 3> v = vector_at_cell(grad_u, c);
  PointwiseReport rep;
  for (int k = 0; k < g.d; ++k) rep.grad_at += v[k] * v[k];
  rep.grad_at = std::sqrt(rep.grad_at);
  rep.rms = std::sqrt(ball_average(grad_energy_cells(grad_u), kind, x0, r));
  rep.ratio = (rep.grad_at == 0.0 && rep.rms == 0.0) ? 0.0
                                                     : rep.grad_at / rep.rms;
  return rep;
}

GreenKernelReport green_kernel_bound_check(const CoefficientField& a,
                                           DomainKind kind, const VecField& g,
                                           const ScalarField& f,
                                           const std::array<double, 3>& x0,
                                           const SolveOptions& opts) {
  if (kind == DomainKind::Torus)
    throw Error("green_kernel_bound_check: a bounded domain is required");
  const Grid& gr = a.grid;
  if (!same_grid(f.grid, gr) || !same_grid(g.grid, gr))
    throw Error("green_kernel_bound_check: data grid mismatch");

  const BcTable bc(gr, kind, 0.0);
  const EllipticOperator op(a, bc, 0.0);
  const ScalarField div_g = divergence_cells(g);
  std::vector<double> rhs(gr.cells());
  for (std::size_t idx = 0; idx < gr.cells(); ++idx)
    rhs[idx] = div_g[idx] + f[idx];

  GreenKernelReport rep;
  rep.u = solve(op, rhs, opts, &rep.stats);

  const VecField gu = gradient(rep.u, bc);
  const std::array<int, 3> c0 = cell_of(gr, x0);
  const std::size_t idx0 = gr.index(c0);
  const std::array<double, 3> v = vector_at_cell(gu, c0);
  for (int k = 0; k < gr.d; ++k) rep.grad_at += v[k] * v[k];
  rep.grad_at = std::sqrt(rep.grad_at);

  const ScalarField gmag2 = grad_energy_cells(g);
  const double vol = cell_volume(gr);

  // integrand  (|g| + |f| dist(x, boundary)) / |x - x0|^d  per cell
  auto integrand = [&](std::size_t idx) {
    const std::array<double, 3> x = gr.center(gr.coords(idx));
    double d2 = 0.0;
    for (int k = 0; k < gr.d; ++k) d2 += (x[k] - x0[k]) * (x[k] - x0[k]);
    const double dist = dist_to_boundary(gr, kind, x);
    const double num = std::sqrt(gmag2[idx]) + std::fabs(f[idx]) * dist;
    return num / std::pow(d2, 0.5 * gr.d);
  };
  bool support_near = false;
  double bound = 0.0;
  for (std::size_t idx = 0; idx < gr.cells(); ++idx) {
    const bool in_support = gmag2[idx] > 0.0 || f[idx] != 0.0;
    if (in_support) {
      const std::array<int, 3> cc = gr.coords(idx);
      bool adjacent = true;
      for (int k = 0; k < gr.d; ++k)
        adjacent = adjacent && std::abs(cc[k] - c0[k]) <= 1;
      support_near = support_near || adjacent;
    }
    if (idx == idx0) continue;
    bound += integrand(idx) * vol;
  }
  // self cell: substitute the nearest in-domain neighbor's integrand
  std::size_t best = idx0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < gr.d; ++k) {
    for (int s = -1; s <= 1; s += 2) {
      std::array<int, 3> cc = c0;
      cc[k] += s;
      if (cc[k] < 0 || cc[k] >= gr.n[k]) continue;
      const std::array<double, 3> x = gr.center(cc);
      double d2 = 0.0;
      for (int kk = 0; kk < gr.d; ++kk)
        d2 += (x[kk] - x0[kk]) * (x[kk] - x0[kk]);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = gr.index(cc);
      }
    }
  }
  if (best != idx0) bound += integrand(best) * vol;

  rep.bound = bound;
  rep.near_support = support_near;
  rep.ratio =
      (rep.grad_at == 0.0 && rep.bound == 0.0) ? 0.0 : rep.grad_at / rep.bound;
  return rep;
}

}  // namespace homog
