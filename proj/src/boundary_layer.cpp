#include "homog/boundary_layer.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace homog {

namespace {

bool same_grid(const Grid& a, const Grid& b) {
  if (a.d != b.d || a.h != b.h) return false;
  for (int k = 0; k < 3; ++k)
    if (a.n[k] != b.n[k] || a.origin[k] != b.origin[k]) return false;
  return true;
}

double cell_volume(const Grid& g) { return std::pow(g.h, g.d); }

int wrap_index(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

}  // namespace

double torus_interp(const ScalarField& f, const std::array<double, 3>& x) {
  const Grid& g = f.grid;
  std::array<int, 3> i0{0, 0, 0};
  std::array<double, 3> w{0.0, 0.0, 0.0};
  for (int k = 0; k < g.d; ++k) {
    const double t = (x[k] - g.origin[k]) / g.h - 0.5;
    const double fl = std::floor(t);
    i0[k] = static_cast<int>(fl);
    w[k] = t - fl;
  }
  double acc = 0.0;
  const int corners = 1 << g.d;
  for (int m = 0; m < corners; ++m) {
    std::array<int, 3> c{0, 0, 0};
    double wt = 1.0;
    for (int k = 0; k < g.d; ++k) {
      const int bit = (m >> k) & 1;
      c[k] = wrap_index(i0[k] + bit, g.n[k]);
      wt *= bit ? w[k] : 1.0 - w[k];
    }
    acc += wt * f[g.index(c)];
  }
  return acc;
}

Grid micro_grid(const Grid& macro, double eps) {
  if (!(eps > 0.0)) throw Error("micro grid: eps must be positive");
  std::array<double, 3> o{0.0, 0.0, 0.0};
  for (int k = 0; k < macro.d; ++k) o[k] = macro.origin[k] / eps;
  return Grid(macro.d, macro.n, macro.h / eps, o);
}

BoundaryData micro_trace(const ScalarField& phi_micro, const Grid& macro,
                         DomainKind kind, double eps) {
  if (eps <= 0.0) throw Error("micro_trace: eps must be positive");
  if (phi_micro.grid.d != macro.d)
    throw Error("micro_trace: dimension mismatch");
  BoundaryData bd;
  for (int axis = 0; axis < macro.d; ++axis) {
    if (axis_periodic(kind, axis)) continue;
    for (int side = 0; side < 2; ++side) {
      auto& slot = bd.face[axis][side];
      slot.assign(BoundaryData::slot_cells(macro, axis), 0.0);
      std::array<int, 3> ext{1, 1, 1};
      for (int k = 0; k < macro.d; ++k) ext[k] = (k == axis) ? 1 : macro.n[k];
      std::array<int, 3> c{0, 0, 0};
      for (c[0] = 0; c[0] < ext[0]; ++c[0])
        for (c[1] = 0; c[1] < ext[1]; ++c[1])
          for (c[2] = 0; c[2] < ext[2]; ++c[2]) {
            std::array<double, 3> xf = macro.center(c);
            xf[axis] =
                macro.origin[axis] + (side == 1 ? macro.extent(axis) : 0.0);
            std::array<double, 3> y{0.0, 0.0, 0.0};
            for (int k = 0; k < macro.d; ++k) y[k] = xf[k] / eps;
            slot[BoundaryData::slot_index(macro, axis, c)] =
                torus_interp(phi_micro, y);
          }
    }
  }
  return bd;
}

ScalarField BoundaryLayerSet::energy_density() const {
  ScalarField e(grid);
  for (int i = 0; i < d; ++i) {
    const BcTable bc(grid, kind, 1.0 / T, &trace[i]);
    const ScalarField ei = grad_energy_cells(gradient(theta[i], bc));
    for (std::size_t idx = 0; idx < grid.cells(); ++idx)
      e[idx] += eps * eps * ei[idx];
  }
  return e;
}

BoundaryLayerSet solve_boundary_layer(const CoefficientField& a_eps,
                                      const std::vector<ScalarField>& phi_micro,
                                      const Grid& macro, DomainKind kind,
                                      double T, double eps,
                                      const SolveOptions& opts,
                                      double trunc_tol) {
  if (kind != DomainKind::Slab && kind != DomainKind::Box)
    throw Error("solve_boundary_layer: domain must be a slab or a box");
  if (!same_grid(a_eps.grid, macro))
    throw Error("solve_boundary_layer: coefficient grid mismatch");
  if (static_cast<int>(phi_micro.size()) != macro.d)
    throw Error("solve_boundary_layer: one micro field per direction required");
  if (T <= 0.0) throw Error("solve_boundary_layer: T must be positive");
  if (eps <= 0.0) throw Error("solve_boundary_layer: eps must be positive");
  if (!(trunc_tol > 0.0 && trunc_tol < 1.0))
    throw Error("solve_boundary_layer: trunc_tol must lie in (0,1)");

  BoundaryLayerSet bl;
  bl.grid = macro;
  bl.kind = kind;
  bl.d = macro.d;
  bl.T = T;
  bl.eps = eps;
  bl.tol = opts.tol;
  bl.truncated = macro.extent(0) < std::sqrt(T) * std::log(1.0 / trunc_tol);

  bl.trace.reserve(macro.d);
  for (int i = 0; i < macro.d; ++i)
    bl.trace.push_back(micro_trace(phi_micro[i], macro, kind, eps));

  const std::vector<double> zero_rhs(macro.cells(), 0.0);
  for (int i = 0; i < macro.d; ++i) {
    const BcTable bc(macro, kind, 1.0 / T, &bl.trace[i]);
    const EllipticOperator op(a_eps, bc, 1.0 / T);
    SolveStats st;
    bl.theta.push_back(solve(op, zero_rhs, opts, &st));
    bl.stats.push_back(st);
  }
  return bl;
}

PowerFit fit_scaling_power(const std::vector<double>& r,
                           const std::vector<double>& v, double eps,
                           double r_lo, double r_hi) {
  if (eps <= 0.0) throw Error("fit_scaling_power: eps must be positive");
  std::vector<double> s(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) s[i] = 1.0 + r[i] / eps;
  return fit_power_law(s, v, 1.0 + r_lo / eps, 1.0 + r_hi / eps);
}

DecayProfile averaged_decay_profile(
    const BoundaryLayerSet& bl,
    const std::vector<std::array<double, 3>>& boundary_points,
    const std::vector<double>& radii) {
  if (boundary_points.empty())
    throw Error("averaged_decay_profile: at least one boundary point required");
  if (radii.empty())
    throw Error("averaged_decay_profile: at least one radius required");
  const ScalarField e = bl.energy_density();
  DecayProfile p;
  p.radii = radii;
  p.values.reserve(radii.size());
  for (double r : radii) {
    double acc = 0.0;
    for (const auto& x0 : boundary_points)
      acc += ball_average(e, bl.kind, x0, r);
    p.values.push_back(acc / static_cast<double>(boundary_points.size()));
  }
  p.fit = fit_scaling_power(p.radii, p.values, bl.eps, 2.0 * bl.eps,
                            bl.grid.extent(0) / 4.0);
  return p;
}

DecayProfile pointwise_decay_profile(const BoundaryLayerSet& bl) {
  const Grid& g = bl.grid;
  const ScalarField e = bl.energy_density();
  const double depth = g.extent(0);
  const int nbins = static_cast<int>(std::ceil(depth / bl.eps)) + 1;
  std::vector<double> best(static_cast<std::size_t>(nbins), -1.0);
  std::array<int, 3> c{0, 0, 0};
  for (c[0] = 0; c[0] < g.n[0]; ++c[0])
    for (c[1] = 0; c[1] < g.n[1]; ++c[1])
      for (c[2] = 0; c[2] < g.n[2]; ++c[2]) {
        const double dist = dist_to_boundary(g, bl.kind, g.center(c));
        int k = static_cast<int>(std::floor(dist / bl.eps));
        k = std::clamp(k, 0, nbins - 1);
        const double mag = std::sqrt(e[g.index(c)]);
        best[static_cast<std::size_t>(k)] =
            std::max(best[static_cast<std::size_t>(k)], mag);
      }
  DecayProfile p;
  for (int k = 0; k < nbins; ++k) {
    if (best[static_cast<std::size_t>(k)] < 0.0) continue;  // empty bin
    p.radii.push_back((k + 0.5) * bl.eps);
    p.values.push_back(best[static_cast<std::size_t>(k)]);
  }
  p.fit = fit_scaling_power(p.radii, p.values, bl.eps, 2.0 * bl.eps,
                            depth / 4.0);
  return p;
}

double ray_energy(const BoundaryLayerSet& bl, const std::array<double, 3>& x0) {
  if (bl.kind != DomainKind::Slab)
    throw Error("ray_energy: slab domain required");
  const Grid& g = bl.grid;
  const ScalarField e = bl.energy_density();
  std::array<int, 3> c{0, 0, 0};
  for (int k = 1; k < g.d; ++k) {
    const double t = (x0[k] - g.origin[k]) / g.h;
    c[k] = wrap_index(static_cast<int>(std::floor(t)), g.n[k]);
  }
  const int n0 = g.n[0];
  double sum = 0.0;
  for (int j = 0; j < n0; ++j) {
    c[0] = j;
    const double v = e[g.index(c)];
    sum += (j == 0 || j == n0 - 1) ? 0.5 * v : v;
  }
  return sum * g.h;
}

ExpWeightReport exp_weighted_energy_check(const EllipticOperator& op,
                                          const ScalarField& u,
                                          const ScalarField& g,
                                          const VecField& F, double T,
                                          double L, double gamma) {
  if (gamma <= 0.0)
    throw Error("exp_weighted_energy_check: gamma must be positive");
  if (T <= 0.0) throw Error("exp_weighted_energy_check: T must be positive");
  if (L < std::sqrt(T))
    throw Error("exp_weighted_energy_check: L must be at least sqrt(T)");
  const Grid& gr = op.grid();
  if (!same_grid(u.grid, gr) || !same_grid(g.grid, gr))
    throw Error("exp_weighted_energy_check: field grid mismatch");

  const ScalarField eu = grad_energy_cells(gradient(u, op.bc()));
  const ScalarField eg = grad_energy_cells(gradient(g, op.bc()));
  const ScalarField eF = grad_energy_cells(F);

  std::array<double, 3> x0{0.0, 0.0, 0.0};
  x0[0] = gr.origin[0];
  for (int k = 1; k < gr.d; ++k) x0[k] = gr.origin[k] + 0.5 * gr.extent(k);

  const DomainKind kind = op.bc().kind;
  const double vol = cell_volume(gr);
  ExpWeightReport rep;
  rep.gamma = gamma;
  rep.L = L;
  rep.T = T;
  std::array<int, 3> c{0, 0, 0};
  for (c[0] = 0; c[0] < gr.n[0]; ++c[0])
    for (c[1] = 0; c[1] < gr.n[1]; ++c[1])
      for (c[2] = 0; c[2] < gr.n[2]; ++c[2]) {
        const std::size_t idx = gr.index(c);
        const double dist =
            std::sqrt(wrapped_dist2(gr, kind, gr.center(c), x0));
        const double w = std::exp(-gamma * dist / L);
        rep.lhs += w * (eu[idx] + u[idx] * u[idx] / T) * vol;
        rep.rhs += w * (eg[idx] + g[idx] * g[idx] / T + eF[idx]) * vol;
      }
  rep.ratio = (rep.lhs == 0.0 && rep.rhs == 0.0) ? 0.0 : rep.lhs / rep.rhs;
  return rep;
}

namespace {

// Cell gradient from interior faces only; boundary cells on bounded axes use
// their single interior neighbor face.
std::vector<std::array<double, 3>> interior_cell_gradient(const ScalarField& u,
                                                          DomainKind kind) {
  const Grid& g = u.grid;
  std::vector<std::array<double, 3>> out(g.cells(), {0.0, 0.0, 0.0});
  std::array<int, 3> c{0, 0, 0};
  for (c[0] = 0; c[0] < g.n[0]; ++c[0])
    for (c[1] = 0; c[1] < g.n[1]; ++c[1])
      for (c[2] = 0; c[2] < g.n[2]; ++c[2]) {
        const std::size_t idx = g.index(c);
        for (int axis = 0; axis < g.d; ++axis) {
          const bool per = axis_periodic(kind, axis);
          double acc = 0.0;
          int cnt = 0;
          if (per || c[axis] + 1 < g.n[axis]) {
            std::array<int, 3> up = c;
            up[axis] = wrap_index(c[axis] + 1, g.n[axis]);
            acc += (u[g.index(up)] - u[idx]) / g.h;
            ++cnt;
          }
          if (per || c[axis] > 0) {
            std::array<int, 3> dn = c;
            dn[axis] = wrap_index(c[axis] - 1, g.n[axis]);
            acc += (u[idx] - u[g.index(dn)]) / g.h;
            ++cnt;
          }
          out[idx][axis] = cnt > 0 ? acc / cnt : 0.0;
        }
      }
  return out;
}

// H1 seminorm from interior faces only (all faces on periodic axes).
double interior_h1(const ScalarField& w, DomainKind kind) {
  const Grid& g = w.grid;
  const double vol = cell_volume(g);
  double sum = 0.0;
  std::array<int, 3> c{0, 0, 0};
  for (c[0] = 0; c[0] < g.n[0]; ++c[0])
    for (c[1] = 0; c[1] < g.n[1]; ++c[1])
      for (c[2] = 0; c[2] < g.n[2]; ++c[2]) {
        const std::size_t idx = g.index(c);
        for (int axis = 0; axis < g.d; ++axis) {
          const bool per = axis_periodic(kind, axis);
          if (!per && c[axis] + 1 >= g.n[axis]) continue;  // no upper face
          std::array<int, 3> up = c;
          up[axis] = wrap_index(c[axis] + 1, g.n[axis]);
          const double dw = (w[g.index(up)] - w[idx]) / g.h;
          sum += dw * dw * vol;
        }
      }
  return std::sqrt(sum);
}

}  // namespace

TwoScaleReport two_scale_error(const ScalarField& ueps, const ScalarField& ubar,
                               const CorrectorSet& correctors,
                               const BoundaryLayerSet& bl, double eps) {
  const Grid& g = ueps.grid;
  if (!same_grid(ubar.grid, g) || !same_grid(bl.grid, g))
    throw Error("two_scale_error: field grid mismatch");
  if (correctors.d != g.d)
    throw Error("two_scale_error: corrector dimension mismatch");
  if (eps <= 0.0) throw Error("two_scale_error: eps must be positive");

  const auto dbar = interior_cell_gradient(ubar, bl.kind);
  ScalarField w_plain(g), w_corr(g);
  std::array<int, 3> c{0, 0, 0};
  for (c[0] = 0; c[0] < g.n[0]; ++c[0])
    for (c[1] = 0; c[1] < g.n[1]; ++c[1])
      for (c[2] = 0; c[2] < g.n[2]; ++c[2]) {
        const std::size_t idx = g.index(c);
        const std::array<double, 3> x = g.center(c);
        std::array<double, 3> y{0.0, 0.0, 0.0};
        for (int k = 0; k < g.d; ++k) y[k] = x[k] / eps;
        double plain = ueps[idx] - ubar[idx];
        double corr_extra = 0.0;
        for (int i = 0; i < g.d; ++i) {
          const double phieps = eps * torus_interp(correctors.phi[i], y);
          plain -= phieps * dbar[idx][i];
          corr_extra += eps * bl.theta[i][idx] * dbar[idx][i];
        }
        w_plain[idx] = plain;
        w_corr[idx] = plain + corr_extra;
      }

  TwoScaleReport rep;
  rep.eps = eps;
  rep.h1_plain = interior_h1(w_plain, bl.kind);
  rep.h1_corrected = interior_h1(w_corr, bl.kind);
  return rep;
}

}  // namespace homog
