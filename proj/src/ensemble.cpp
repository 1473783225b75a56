#include "homog/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "homog/elliptic.hpp"
#include "homog/linalg.hpp"
#include "homog/rng.hpp"

namespace homog {

const char* ensemble_kind_name(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::Constant: return "constant";
    case EnsembleKind::Checkerboard: return "checkerboard";
    case EnsembleKind::Laminate: return "laminate";
    case EnsembleKind::PeriodicSmooth: return "periodic-smooth";
    case EnsembleKind::GaussianClipped: return "gaussian-clipped";
  }
  return "?";
}

EnsembleKind ensemble_kind_from_name(const std::string& s) {
  if (s == "constant") return EnsembleKind::Constant;
  if (s == "checkerboard") return EnsembleKind::Checkerboard;
  if (s == "laminate") return EnsembleKind::Laminate;
  if (s == "periodic-smooth") return EnsembleKind::PeriodicSmooth;
  if (s == "gaussian-clipped") return EnsembleKind::GaussianClipped;
  throw Error("unknown ensemble kind '" + s + "'");
}

void EnsembleSpec::validate() const {
  if (d != 2 && d != 3) throw Error("ensemble dimension must be 2 or 3");
  if (!(lambda > 0.0) || lambda > 1.0)
    throw Error("ellipticity ratio must lie in (0, 1]");
  if (!(correlation_length > 0.0))
    throw Error("correlation length must be positive");
  if (kind == EnsembleKind::GaussianClipped && correlation_length != 1.0)
    throw Error("gaussian-clipped fixes the correlation length to 1");
  if (!(holder_alpha > 0.0) || holder_alpha > 1.0)
    throw Error("holder exponent must lie in (0, 1]");
}

bool CoefficientField::isotropic_diagonal() const {
  const std::size_t nc = grid.cells();
  for (std::size_t c = 0; c < nc; ++c) {
    const double v = at(c, 0, 0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (at(c, i, j) != (i == j ? v : 0.0)) return false;
  }
  return true;
}

std::array<double, 2> CoefficientField::eigenvalue_range() const {
  double lo = INFINITY, hi = -INFINITY;
  const std::size_t nc = grid.cells();
  for (std::size_t c = 0; c < nc; ++c) {
    if (d == 2) {
      auto ev = sym_eig2(at(c, 0, 0), 0.5 * (at(c, 0, 1) + at(c, 1, 0)), at(c, 1, 1));
      lo = std::fmin(lo, ev[0]);
      hi = std::fmax(hi, ev[1]);
    } else {
      std::array<std::array<double, 3>, 3> m;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = 0.5 * (at(c, i, j) + at(c, j, i));
      auto ev = sym_eig3(m);
      lo = std::fmin(lo, ev[0]);
      hi = std::fmax(hi, ev[2]);
    }
  }
  return {lo, hi};
}

CoefficientField transpose_coefficients(const CoefficientField& a) {
  CoefficientField t(a.grid);
  t.lambda = a.lambda;
  const std::size_t nc = a.grid.cells();
  for (std::size_t c = 0; c < nc; ++c)
    for (int i = 0; i < a.d; ++i)
      for (int j = 0; j < a.d; ++j) t.at(c, i, j) = a.at(c, j, i);
  return t;
}

namespace {

constexpr std::uint64_t kCoordMask = 0x1FFFFF;  // 21 bits per axis

std::uint64_t pack_lattice(const std::array<long long, 3>& z) {
  return (std::uint64_t(z[0]) & kCoordMask) |
         ((std::uint64_t(z[1]) & kCoordMask) << 21) |
         ((std::uint64_t(z[2]) & kCoordMask) << 42);
}

// periodic lattice extent of an axis; throws unless the domain holds an
// integer number of correlation cells
long long periodic_cells(const Grid& g, int axis, double corr) {
  const double m = g.extent(axis) / corr;
  const long long mi = llround(m);
  if (mi < 1 || std::fabs(m - double(mi)) > 1e-9 * std::fmax(1.0, m))
    throw Error("periodic extent must be an integer number of correlation cells");
  return mi;
}

long long wrap_ll(long long i, long long m) { return ((i % m) + m) % m; }

// lattice coordinates of the correlation cell containing x, wrapped on
// periodic axes so torus fields are genuinely periodic
std::array<long long, 3> lattice_of(const Grid& g, DomainKind kind, double corr,
                                    const std::array<double, 3>& x) {
  std::array<long long, 3> z{0, 0, 0};
  for (int k = 0; k < g.d; ++k) {
    long long i = (long long)std::floor(x[k] / corr);
    if (axis_periodic(kind, k)) i = wrap_ll(i, periodic_cells(g, k, corr));
    z[k] = i;
  }
  return z;
}

double smootherstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * t * (t * (t * 6.0 - 15.0) + 10.0);
}

// C^2 bump (1-r^2)^3 on |x| <= 1, scaled to unit mass
double bump_kernel(int d, double r2) {
  if (r2 >= 1.0) return 0.0;
  const double w = 1.0 - r2;
  const double c = d == 2 ? 4.0 / std::numbers::pi : 315.0 / (64.0 * std::numbers::pi);
  return c * w * w * w;
}

double checker_value(const EnsembleSpec& spec, std::uint64_t sample,
                     std::uint64_t cell_key) {
  const double u = rng::uniform01(spec.master_seed, sample, cell_key, 0);
  return u < 0.5 ? spec.lambda : 1.0;
}

double gaussian_field_value(const EnsembleSpec& spec, const Grid& g, DomainKind kind,
                            std::uint64_t sample, const std::array<double, 3>& x) {
  // white noise on the unit lattice pushed through the bump kernel
  std::array<long long, 3> z0{0, 0, 0};
  std::array<long long, 3> m{0, 0, 0};
  for (int k = 0; k < g.d; ++k) {
    z0[k] = (long long)std::floor(x[k]);
    m[k] = axis_periodic(kind, k) ? periodic_cells(g, k, 1.0) : 0;
  }
  double gsum = 0.0;
  std::array<long long, 3> s{0, 0, 0};
  const int lo2 = g.d == 3 ? -1 : 0, hi2 = g.d == 3 ? 1 : 0;
  for (s[0] = -1; s[0] <= 1; ++s[0])
    for (s[1] = -1; s[1] <= 1; ++s[1])
      for (s[2] = lo2; s[2] <= hi2; ++s[2]) {
        std::array<long long, 3> zr{z0[0] + s[0], z0[1] + s[1], z0[2] + s[2]};
        double r2 = 0.0;
        for (int k = 0; k < g.d; ++k) {
          const double dx = x[k] - (double(zr[k]) + 0.5);
          r2 += dx * dx;
        }
        const double w = bump_kernel(g.d, r2);
        if (w == 0.0) continue;
        std::array<long long, 3> zk = zr;
        for (int k = 0; k < g.d; ++k)
          if (m[k] > 0) zk[k] = wrap_ll(zr[k], m[k]);
        gsum += w * rng::normal(spec.master_seed, sample, pack_lattice(zk), 0);
      }
  return gsum;
}

double clip_map(double lambda, double gvalue) {
  return lambda + (1.0 - lambda) * smootherstep((gvalue + 2.0) * 0.25);
}

}  // namespace

CoefficientField sample_field(const EnsembleSpec& spec, const Grid& grid,
                              std::uint64_t sample_index) {
  spec.validate();
  if (spec.d != grid.d) throw Error("ensemble/grid dimension mismatch");
  // the domain kind only matters through axis periodicity; fields are keyed
  // by absolute lattice coordinates, so all bounded kinds agree
  const DomainKind kind = DomainKind::Torus;
  CoefficientField field(grid);
  const double corr = spec.correlation_length;
  const std::size_t nc = grid.cells();

  switch (spec.kind) {
    case EnsembleKind::Constant:
      for (std::size_t c = 0; c < nc; ++c) field.set_scalar(c, 1.0);
      break;
    case EnsembleKind::Checkerboard:
      for (std::size_t c = 0; c < nc; ++c) {
        auto z = lattice_of(grid, kind, corr, grid.center(grid.coords(c)));
        field.set_scalar(c, checker_value(spec, sample_index, pack_lattice(z)));
      }
      break;
    case EnsembleKind::Laminate: {
      if (axis_periodic(kind, 0)) {
        const long long m0 = periodic_cells(grid, 0, corr);
        if (m0 % 2 != 0)
          throw Error("laminate torus extent must cover full lamination periods");
      }
      for (std::size_t c = 0; c < nc; ++c) {
        const double x0 = grid.center(grid.coords(c))[0];
        const long long i = (long long)std::floor(x0 / corr);
        field.set_scalar(c, wrap_ll(i, 2) == 0 ? spec.lambda : 1.0);
      }
      break;
    }
    case EnsembleKind::PeriodicSmooth: {
      const double w = 2.0 * std::numbers::pi / corr;
      for (std::size_t c = 0; c < nc; ++c) {
        auto x = grid.center(grid.coords(c));
        double s = 1.0;
        for (int k = 0; k < grid.d; ++k) s *= 0.5 * (1.0 + std::cos(w * x[k]));
        field.set_scalar(c, spec.lambda + (1.0 - spec.lambda) * s);
      }
      break;
    }
    case EnsembleKind::GaussianClipped:
      for (std::size_t c = 0; c < nc; ++c) {
        const double gv = gaussian_field_value(spec, grid, kind, sample_index,
                                               grid.center(grid.coords(c)));
        field.set_scalar(c, clip_map(spec.lambda, gv));
      }
      break;
  }
  field.refresh_lambda();
  return field;
}

CoefficientField sample_field_scaled(const EnsembleSpec& spec, const Grid& grid,
                                     double eps, std::uint64_t sample_index) {
  if (!(eps > 0.0)) throw Error("scale parameter must be positive");
  std::array<double, 3> origin{0.0, 0.0, 0.0};
  for (int k = 0; k < grid.d; ++k) origin[k] = grid.origin[k] / eps;
  Grid micro(grid.d, grid.n, grid.h / eps, origin);
  CoefficientField f = sample_field(spec, micro, sample_index);
  f.grid = grid;
  return f;
}

namespace {

double holder_sup(const Grid& g, DomainKind kind, const std::array<double, 3>& x,
                  double alpha,
                  const std::function<double(std::size_t, std::size_t)>& pair_diff) {
  std::vector<std::size_t> in_ball;
  std::vector<std::array<double, 3>> pos;
  const std::size_t nc = g.cells();
  for (std::size_t c = 0; c < nc; ++c) {
    auto y = g.center(g.coords(c));
    if (wrapped_dist2(g, kind, x, y) <= 1.0) {
      in_ball.push_back(c);
      pos.push_back(y);
    }
  }
  if (in_ball.size() < 2)
    throw Error("holder_constant_field: fewer than two grid points in the unit ball");
  double best = 0.0;
  for (std::size_t i = 0; i < in_ball.size(); ++i)
    for (std::size_t j = i + 1; j < in_ball.size(); ++j) {
      const double d2 = wrapped_dist2(g, kind, pos[i], pos[j]);
      if (d2 == 0.0) continue;
      const double q = pair_diff(in_ball[i], in_ball[j]) /
                       std::pow(d2, 0.5 * alpha);
      best = std::fmax(best, q);
    }
  return best;
}

}  // namespace

double holder_constant_field(const ScalarField& f, DomainKind kind,
                             const std::array<double, 3>& x, double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0) throw Error("holder exponent must lie in (0, 1]");
  return holder_sup(f.grid, kind, x, alpha, [&f](std::size_t i, std::size_t j) {
    return std::fabs(f[i] - f[j]);
  });
}

double holder_constant_field(const CoefficientField& a, DomainKind kind,
                             const std::array<double, 3>& x, double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0) throw Error("holder exponent must lie in (0, 1]");
  return holder_sup(a.grid, kind, x, alpha, [&a](std::size_t i, std::size_t j) {
    double m = 0.0;
    for (int r = 0; r < a.d; ++r)
      for (int c = 0; c < a.d; ++c)
        m = std::fmax(m, std::fabs(a.at(i, r, c) - a.at(j, r, c)));
    return m;
  });
}

GapFunctional gap_functional_from_name(const std::string& s) {
  if (s == "ball-average") return GapFunctional::AverageA11Ball;
  if (s == "dirichlet-energy") return GapFunctional::DirichletEnergy;
  throw Error("unknown spectral-gap functional '" + s + "'");
}

namespace {

// ball-average functional: mean of a_11 over the unit ball at the torus center
double functional_ball_average(const CoefficientField& a) {
  const Grid& g = a.grid;
  std::array<double, 3> c{0.0, 0.0, 0.0};
  for (int k = 0; k < g.d; ++k) c[k] = g.origin[k] + 0.5 * g.extent(k);
  double sum = 0.0;
  std::size_t count = 0;
  const std::size_t nc = g.cells();
  for (std::size_t i = 0; i < nc; ++i) {
    if (wrapped_dist2(g, DomainKind::Torus, g.center(g.coords(i)), c) <= 1.0) {
      sum += a.at(i, 0, 0);
      ++count;
    }
  }
  if (count == 0) throw Error("spectral gap functional: empty ball");
  return sum / double(count);
}

// energy functional: abar_11 of the corrector solve on the probe torus
double functional_dirichlet_energy(const CoefficientField& a) {
  BcTable bc(a.grid, DomainKind::Torus, 0.0);
  EllipticOperator op(a, bc, 0.0);
  ScalarField zero(a.grid);
  // corrector equation -div(a grad phi) = div(a e_1)
  ScalarField rhs_field = divergence_cells(coefficient_flux(op, zero, 0));
  std::vector<double> rhs(rhs_field.v);
  SolveOptions opts;
  opts.tol = 1e-9;
  ScalarField phi = solve(op, rhs, opts);
  VecField q = coefficient_flux(op, phi, 0);
  double sum = 0.0;
  std::size_t cnt = 0;
  std::array<int, 3> ext{1, 1, 1};
  for (int k = 0; k < a.grid.d; ++k) ext[k] = k == 0 ? q.faces(0) : a.grid.n[k];
  std::array<int, 3> f{0, 0, 0};
  for (f[0] = 0; f[0] < ext[0]; ++f[0])
    for (f[1] = 0; f[1] < ext[1]; ++f[1])
      for (f[2] = 0; f[2] < ext[2]; ++f[2]) {
        sum += q.at(0, f);
        ++cnt;
      }
  return sum / double(cnt);
}

double eval_functional(GapFunctional fn, const CoefficientField& a) {
  return fn == GapFunctional::AverageA11Ball ? functional_ball_average(a)
                                             : functional_dirichlet_energy(a);
}

}  // namespace

SpectralGapReport spectral_gap_probe(const EnsembleSpec& spec, GapFunctional functional,
                                     int n_samples, double h_pert) {
  spec.validate();
  if (n_samples < 100) throw Error("spectral gap probe needs at least 100 samples");
  if (!(h_pert > 0.0)) throw Error("perturbation step must be positive");

  // fixed probe torus: 4 correlation lengths per axis
  const double corr = spec.correlation_length;
  const int per_cell = functional == GapFunctional::AverageA11Ball ? 8 : 4;
  std::array<int, 3> n{4 * per_cell, 4 * per_cell, spec.d == 3 ? 4 * per_cell : 1};
  Grid g(spec.d, n, corr / per_cell);
  const long long mcells = 4;

  // lattice sites whose unit ball can reach the functional: all of them on
  // this small torus
  std::vector<std::array<long long, 3>> sites;
  {
    std::array<long long, 3> z{0, 0, 0};
    const long long z2 = spec.d == 3 ? mcells : 1;
    for (z[0] = 0; z[0] < mcells; ++z[0])
      for (z[1] = 0; z[1] < mcells; ++z[1])
        for (z[2] = 0; z[2] < z2; ++z[2]) sites.push_back(z);
  }
  // per-cell membership masks for each site's unit ball
  std::vector<std::vector<std::size_t>> ball_cells(sites.size());
  for (std::size_t s = 0; s < sites.size(); ++s) {
    std::array<double, 3> zc{0.0, 0.0, 0.0};
    for (int k = 0; k < g.d; ++k) zc[k] = (double(sites[s][k]) + 0.5) * corr;
    for (std::size_t c = 0; c < g.cells(); ++c)
      if (wrapped_dist2(g, DomainKind::Torus, g.center(g.coords(c)), zc) <=
          corr * corr)
        ball_cells[s].push_back(c);
  }

  SpectralGapReport rep;
  rep.n_samples = n_samples;
  std::vector<double> xi(n_samples), sens(n_samples);
  bool clipped = false;

  for (int s = 0; s < n_samples; ++s) {
    CoefficientField a = sample_field(spec, g, std::uint64_t(s));
    xi[s] = eval_functional(functional, a);
    double total = 0.0;
    for (std::size_t site = 0; site < sites.size(); ++site) {
      CoefficientField up = a, dn = a;
      double realized = 0.0;
      for (std::size_t c : ball_cells[site]) {
        const double v = a.at(c, 0, 0);
        const double vu = std::fmin(v + h_pert, 1.0);
        const double vd = std::fmax(v - h_pert, spec.lambda);
        if (vu != v + h_pert || vd != v - h_pert) clipped = true;
        for (int k = 0; k < g.d; ++k) {
          up.at(c, k, k) += vu - v;
          dn.at(c, k, k) += vd - v;
        }
        realized = std::fmax(realized, vu - vd);
      }
      if (realized == 0.0) continue;
      const double d =
          (eval_functional(functional, up) - eval_functional(functional, dn)) /
          realized;
      total += d * d;
    }
    sens[s] = total;
  }

  auto mean_of = [](const std::vector<double>& v, int lo, int hi) {
    double s = 0.0;
    for (int i = lo; i < hi; ++i) s += v[i];
    return s / double(hi - lo);
  };
  const double xi_mean = mean_of(xi, 0, n_samples);
  double var = 0.0;
  for (double v : xi) var += (v - xi_mean) * (v - xi_mean);
  var /= double(n_samples - 1);
  const double rhs = mean_of(sens, 0, n_samples);

  // batch standard errors (16 batches)
  const int nb = 16;
  std::vector<double> bvar, brhs;
  for (int b = 0; b < nb; ++b) {
    const int lo = b * n_samples / nb, hi = (b + 1) * n_samples / nb;
    if (hi - lo < 2) continue;
    const double bm = mean_of(xi, lo, hi);
    double bv = 0.0;
    for (int i = lo; i < hi; ++i) bv += (xi[i] - bm) * (xi[i] - bm);
    bvar.push_back(bv / double(hi - lo - 1));
    brhs.push_back(mean_of(sens, lo, hi));
  }
  auto se_of = [](const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = 0.0;
    for (double x : v) m += x;
    m /= double(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / double(v.size() - 1) / double(v.size()));
  };

  rep.variance = var;
  rep.rhs = rhs;
  rep.ratio = rhs == 0.0 ? 0.0 : var / rhs;
  rep.variance_se = se_of(bvar);
  rep.rhs_se = se_of(brhs);
  rep.clipped = clipped;
  return rep;
}

}  // namespace homog
