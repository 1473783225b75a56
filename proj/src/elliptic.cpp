#include "homog/elliptic.hpp"

#include <cmath>

namespace homog {

void SolveOptions::validate() const {
  if (!(tol > 0.0) || tol > 1e-2)
    throw Error("solver tolerance must lie in (0, 1e-2]");
  if (max_iter < 0) throw Error("max_iter must be nonnegative");
}

namespace {

double harmonic_mean(double a, double b) { return 2.0 * a * b / (a + b); }

int wrap(int i, int n) { return (i % n + n) % n; }

double vec_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / double(v.size());
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

EllipticOperator::EllipticOperator(const CoefficientField& a, const BcTable& bc,
                                   double massive)
    : a_(&a), bc_(bc), massive_(massive), face_coef_(a.grid, bc.kind) {
  if (massive_ < 0.0) throw Error("massive coefficient must be nonnegative");
  const Grid& g = a.grid;
  const std::size_t nc = g.cells();
  for (std::size_t c = 0; c < nc; ++c) {
    for (int k = 0; k < g.d; ++k) {
      if (!(a.at(c, k, k) > 0.0))
        throw Error("coefficient field has a nonpositive diagonal entry");
      for (int j = k + 1; j < g.d; ++j)
        if (a.at(c, k, j) != 0.0 || a.at(c, j, k) != 0.0) has_offdiag_ = true;
    }
  }
  for (int axis = 0; axis < g.d; ++axis) {
    const bool periodic = axis_periodic(bc_.kind, axis);
    const int nf = face_coef_.faces(axis);
    std::array<int, 3> ext{1, 1, 1};
    for (int k = 0; k < g.d; ++k) ext[k] = (k == axis) ? nf : g.n[k];
    std::array<int, 3> f{0, 0, 0};
    for (f[0] = 0; f[0] < ext[0]; ++f[0])
      for (f[1] = 0; f[1] < ext[1]; ++f[1])
        for (f[2] = 0; f[2] < ext[2]; ++f[2]) {
          std::array<int, 3> hi = f, lo = f;
          double c;
          if (periodic) {
            lo[axis] = wrap(f[axis] - 1, g.n[axis]);
            c = harmonic_mean(a.at(g.index(lo), axis, axis),
                              a.at(g.index(hi), axis, axis));
          } else if (f[axis] == 0) {
            c = a.at(g.index(hi), axis, axis);
          } else if (f[axis] == g.n[axis]) {
            lo[axis] = g.n[axis] - 1;
            c = a.at(g.index(lo), axis, axis);
          } else {
            lo[axis] = f[axis] - 1;
            c = harmonic_mean(a.at(g.index(lo), axis, axis),
                              a.at(g.index(hi), axis, axis));
          }
          face_coef_.at(axis, f) = c;
        }
  }
}

void EllipticOperator::apply(const std::vector<double>& u, std::vector<double>& out,
                             bool with_bc_data) const {
  const Grid& g = a_->grid;
  const std::size_t nc = g.cells();
  if (u.size() != nc) throw Error("apply: field size mismatch");

  ScalarField uf(g);
  uf.v = u;
  BcTable bc_use = bc_;
  if (!with_bc_data) bc_use.data = nullptr;
  VecField grad = gradient(uf, bc_use);

  VecField flux = grad;
  for (int axis = 0; axis < g.d; ++axis)
    for (std::size_t i = 0; i < flux.comp[axis].size(); ++i)
      flux.comp[axis][i] *= face_coef_.comp[axis][i];
  ScalarField div = divergence_cells(flux);

  out.assign(nc, 0.0);
  for (std::size_t i = 0; i < nc; ++i) out[i] = -div[i] + massive_ * u[i];

  if (!has_offdiag_) return;

  // mixed terms: symmetric cell form sum_c a_ij Du_i(c) Dv_j(c) with Du the
  // averaged adjacent face gradients; scatter its v-derivative.
  const double inv_h = 1.0 / g.h;
  for (std::size_t idx = 0; idx < nc; ++idx) {
    std::array<int, 3> c = g.coords(idx);
    std::array<double, 3> du = vector_at_cell(grad, c);
    for (int j = 0; j < g.d; ++j) {
      double wj = 0.0;
      for (int i = 0; i < g.d; ++i)
        if (i != j) wj += a_->at(idx, i, j) * du[i];
      if (wj == 0.0) continue;
      const double w = 0.5 * wj;
      const bool periodic = axis_periodic(bc_.kind, j);
      // lower face of the cell along axis j
      if (periodic || c[j] > 0) {
        std::array<int, 3> lo = c;
        lo[j] = periodic ? wrap(c[j] - 1, g.n[j]) : c[j] - 1;
        out[idx] += w * inv_h;
        out[g.index(lo)] -= w * inv_h;
      } else if (bc_.at(j, 0) == BcKind::Dirichlet) {
        out[idx] += 2.0 * w * inv_h;
      }
      // upper face
      if (periodic || c[j] + 1 < g.n[j]) {
        std::array<int, 3> hi = c;
        hi[j] = periodic ? wrap(c[j] + 1, g.n[j]) : c[j] + 1;
        out[g.index(hi)] += w * inv_h;
        out[idx] -= w * inv_h;
      } else if (bc_.at(j, 1) == BcKind::Dirichlet) {
        out[idx] -= 2.0 * w * inv_h;
      }
    }
  }
}

std::vector<double> EllipticOperator::diagonal() const {
  const Grid& g = a_->grid;
  const std::size_t nc = g.cells();
  const double inv_h2 = 1.0 / (g.h * g.h);
  std::vector<double> d(nc, massive_);
  for (std::size_t idx = 0; idx < nc; ++idx) {
    std::array<int, 3> c = g.coords(idx);
    for (int axis = 0; axis < g.d; ++axis) {
      const bool periodic = axis_periodic(bc_.kind, axis);
      std::array<int, 3> lo = c, hi = c;
      hi[axis] = periodic ? wrap(c[axis] + 1, g.n[axis]) : c[axis] + 1;
      const double clo = face_coef_.at(axis, lo);
      const double chi = face_coef_.at(axis, hi);
      if (periodic) {
        d[idx] += (clo + chi) * inv_h2;
        continue;
      }
      if (c[axis] == 0)
        d[idx] += (bc_.at(axis, 0) == BcKind::Dirichlet ? 2.0 * clo : 0.0) * inv_h2;
      else
        d[idx] += clo * inv_h2;
      if (c[axis] == g.n[axis] - 1)
        d[idx] += (bc_.at(axis, 1) == BcKind::Dirichlet ? 2.0 * chi : 0.0) * inv_h2;
      else
        d[idx] += chi * inv_h2;
    }
  }
  return d;
}

bool EllipticOperator::singular() const {
  return bc_.kind == DomainKind::Torus && massive_ == 0.0;
}

SolveStats cg_solve(const ApplyFn& apply, const std::vector<double>& diag,
                    const std::vector<double>& rhs, std::vector<double>& x,
                    const SolveOptions& opts, bool project_mean_zero) {
  opts.validate();
  const std::size_t n = rhs.size();
  if (diag.size() != n) throw Error("cg_solve: diagonal size mismatch");
  x.assign(n, 0.0);
  SolveStats st;

  const double bnorm = std::sqrt(dot(rhs, rhs));
  if (bnorm == 0.0) {
    st.converged = true;
    return st;
  }
  const int max_iter = opts.max_iter > 0
                           ? opts.max_iter
                           : 500 + int(60.0 * std::sqrt(double(n)));

  std::vector<double> r = rhs, z(n), p(n), ap(n);
  if (project_mean_zero) {
    double m = vec_mean(r);
    for (double& v : r) v -= m;
  }
  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  p = z;
  double rz = dot(r, z);
  double res = std::sqrt(dot(r, r));

  for (int it = 1; it <= max_iter && res > opts.tol * bnorm; ++it) {
    apply(p, ap);
    const double pap = dot(p, ap);
    if (!(pap > 0.0)) throw Error("cg_solve: operator is not positive definite");
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < n; ++i) x[i] += alpha * p[i];
    for (std::size_t i = 0; i < n; ++i) r[i] -= alpha * ap[i];
    if (project_mean_zero) {
      double m = vec_mean(r);
      for (double& v : r) v -= m;
    }
    res = std::sqrt(dot(r, r));
    st.iterations = it;
    if (res <= opts.tol * bnorm) break;
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rz = rz_new;
  }
  st.rel_residual = res / bnorm;
  st.converged = res <= opts.tol * bnorm;
  if (project_mean_zero) {
    double m = vec_mean(x);
    for (double& v : x) v -= m;
  }
  return st;
}

ScalarField solve(const EllipticOperator& op, const std::vector<double>& rhs,
                  const SolveOptions& opts, SolveStats* stats) {
  opts.validate();
  const Grid& g = op.grid();
  const std::size_t nc = g.cells();
  if (rhs.size() != nc) throw Error("solve: rhs size mismatch");

  std::vector<double> b = rhs;
  if (op.bc().data != nullptr) {
    std::vector<double> zero(nc, 0.0), lift;
    op.apply(zero, lift, true);
    for (std::size_t i = 0; i < nc; ++i) b[i] -= lift[i];
  }

  const bool sing = op.singular();
  if (sing) {
    double m = vec_mean(b);
    double scale = 0.0;
    for (double v : b) scale = std::fmax(scale, std::fabs(v));
    if (std::fabs(m) > 1e-10 * std::fmax(scale, 1e-300))
      throw Error("solve: singular operator needs a mean-zero right-hand side");
    for (double& v : b) v -= m;
  }

  std::vector<double> diag = op.diagonal();
  std::vector<double> x;
  SolveStats st = cg_solve(
      [&op](const std::vector<double>& u, std::vector<double>& out) {
        op.apply(u, out, false);
      },
      diag, b, x, opts, sing);
  if (!st.converged)
    throw Error("solve: conjugate gradients stalled at relative residual " +
                std::to_string(st.rel_residual));
  if (stats != nullptr) *stats = st;

  ScalarField u(g);
  u.v = std::move(x);
  return u;
}

VecField coefficient_flux(const EllipticOperator& op, const ScalarField& u,
                          int dir) {
  const Grid& g = op.grid();
  const CoefficientField& a = op.coefficients();
  VecField grad = gradient(u, op.bc());
  VecField flux(g, op.bc().kind);

  // cell gradients only needed for mixed couplings
  std::vector<std::array<double, 3>> du;
  if (op.has_offdiagonal()) {
    du.resize(g.cells());
    for (std::size_t idx = 0; idx < g.cells(); ++idx)
      du[idx] = vector_at_cell(grad, g.coords(idx));
  }

  for (int axis = 0; axis < g.d; ++axis) {
    const bool periodic = axis_periodic(flux.kind, axis);
    const int nf = flux.faces(axis);
    std::array<int, 3> ext{1, 1, 1};
    for (int k = 0; k < g.d; ++k) ext[k] = (k == axis) ? nf : g.n[k];
    std::array<int, 3> f{0, 0, 0};
    for (f[0] = 0; f[0] < ext[0]; ++f[0])
      for (f[1] = 0; f[1] < ext[1]; ++f[1])
        for (f[2] = 0; f[2] < ext[2]; ++f[2]) {
          const double p_axis = grad.at(axis, f) + (axis == dir ? 1.0 : 0.0);
          double val = op.face_coefficients().at(axis, f) * p_axis;
          if (op.has_offdiagonal()) {
            // adjacent cells of this face (single cell on boundary faces)
            std::array<int, 3> hi = f, lo = f;
            bool have_lo = true, have_hi = true;
            if (periodic) {
              lo[axis] = wrap(f[axis] - 1, g.n[axis]);
            } else if (f[axis] == 0) {
              have_lo = false;
            } else if (f[axis] == g.n[axis]) {
              lo[axis] = g.n[axis] - 1;
              have_hi = false;
              hi = lo;
            } else {
              lo[axis] = f[axis] - 1;
            }
            if (!have_lo) lo = hi;
            const std::size_t il = g.index(lo), ih = g.index(hi);
            const double wl = have_lo && have_hi ? 0.5 : 1.0;
            for (int j = 0; j < g.d; ++j) {
              if (j == axis) continue;
              double aij, pj;
              if (have_lo && have_hi) {
                aij = wl * (a.at(il, axis, j) + a.at(ih, axis, j));
                pj = wl * (du[il][j] + du[ih][j]);
              } else {
                const std::size_t ic = have_lo ? il : ih;
                aij = a.at(ic, axis, j);
                pj = du[ic][j];
              }
              val += aij * (pj + (j == dir ? 1.0 : 0.0));
            }
          }
          flux.at(axis, f) = val;
        }
  }
  return flux;
}

}  // namespace homog
