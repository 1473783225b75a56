#include "homog/meyers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "homog/rng.hpp"

namespace homog {

namespace {

bool same_grid(const Grid& a, const Grid& b) {
  if (a.d != b.d || a.h != b.h) return false;
  for (int k = 0; k < 3; ++k)
    if (a.n[k] != b.n[k] || a.origin[k] != b.origin[k]) return false;
  return true;
}

double cell_volume(const Grid& g) { return std::pow(g.h, g.d); }

// largest wrapped separation realizable along each axis
double domain_diameter(const Grid& g, DomainKind kind) {
  double s = 0.0;
  for (int k = 0; k < g.d; ++k) {
    const double len =
        axis_periodic(kind, k) ? 0.5 * g.extent(k) : g.extent(k);
    s += len * len;
  }
  return std::sqrt(s);
}

double shell_energy_sum(const DyadicDecomposition& dec,
                        const ScalarField& density, std::vector<double>& out) {
  const double vol = cell_volume(dec.grid);
  out.assign(static_cast<std::size_t>(dec.levels), 0.0);
  double total = 0.0;
  for (std::size_t c = 0; c < dec.grid.cells(); ++c) {
    const double e = density[c] * vol;
    out[static_cast<std::size_t>(dec.annulus[c])] += e;
    total += e;
  }
  return total;
}

DualityProfile duality_common(const CoefficientField& a,
                              const DyadicDecomposition& dec, int k,
                              const std::vector<double>& rhs, bool density,
                              double data_norm2, const SolveOptions& opts) {
  const Grid& g = dec.grid;
  const CoefficientField a_star = transpose_coefficients(a);
  const BcTable bc(g, dec.kind, 0.0);
  const EllipticOperator op(a_star, bc, 0.0);

  DualityProfile prof;
  prof.k = k;
  prof.data_norm2 = data_norm2;
  const ScalarField v = solve(op, rhs, opts, &prof.stats);
  const ScalarField ev = grad_energy_cells(gradient(v, bc));
  shell_energy_sum(dec, ev, prof.energy);

  const double area0 =
      static_cast<double>(dec.counts[0]) * cell_volume(g);
  prof.normalized.assign(prof.energy.size(), 0.0);
  for (int j = 0; j < dec.levels; ++j) {
    const int gap = std::abs(k - j);
    double env = std::ldexp(1.0, -gap * g.d);
    if (density) {
      const double lift = static_cast<double>(std::max(k - j, 0) + 1);
      env *= lift * lift * std::pow(area0, 2.0 / g.d) *
             std::ldexp(1.0, 2 * std::max(k, j));
    }
    const double num = prof.energy[static_cast<std::size_t>(j)];
    const double den = env * data_norm2;
    prof.normalized[static_cast<std::size_t>(j)] =
        (num == 0.0) ? 0.0 : num / den;
  }
  return prof;
}

void check_source_annulus(const DyadicDecomposition& dec, int k) {
  if (k < 0 || k >= dec.levels)
    throw Error("annulus_duality_profile: source shell out of range");
}

struct WeightedNorms {
  double lhs = 0.0;
  double rhs = 0.0;
};

MeyersReport meyers_common(const CoefficientField& a, DomainKind kind,
                           const std::vector<double>& rhs_vec,
                           const ScalarField* f_density,
                           const ScalarField& data_energy, double p,
                           double alpha0, double alpha1, double R,
                           const std::array<double, 3>& x0,
                           const SolveOptions& opts) {
  const Grid& g = a.grid;
  if (kind == DomainKind::Torus)
    throw Error("weighted_meyers_check: a bounded domain is required");
  if (p < 1.0 || p > 1.1)
    throw Error("weighted_meyers_check: p must lie in [1, 1.1]");
  if (R <= 0.0) throw Error("weighted_meyers_check: R must be positive");
  if (alpha0 < 0.0 || alpha1 < alpha0)
    throw Error("weighted_meyers_check: weights need 0 <= alpha0 <= alpha1");

  MeyersReport rep;
  rep.p = p;
  rep.alpha0 = alpha0;
  rep.alpha1 = alpha1;
  rep.R = R;
  const double cap = g.d * (2.0 * p - 1.0);
  rep.params_valid = alpha0 < alpha1 && alpha1 < cap &&
                     (f_density == nullptr || alpha0 < alpha1 - 2.0 * p);

  const CoefficientField a_star = transpose_coefficients(a);
  const BcTable bc(g, kind, 0.0);
  const EllipticOperator op(a_star, bc, 0.0);
  rep.v = solve(op, rhs_vec, opts, &rep.stats);

  const ScalarField ev = grad_energy_cells(gradient(rep.v, bc));
  const double vol = cell_volume(g);
  double lhs_sum = 0.0, rhs_sum = 0.0;
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const std::array<double, 3> x = g.center(g.coords(c));
    const double s = std::sqrt(wrapped_dist2(g, kind, x, x0)) / R + 1.0;
    lhs_sum += std::pow(ev[c], p) * std::pow(s, alpha0) * vol;
    const double dval =
        (f_density != nullptr) ? (*f_density)[c] * (*f_density)[c]
                               : data_energy[c];
    rhs_sum += std::pow(dval, p) * std::pow(s, alpha1) * vol;
  }
  rep.lhs = std::pow(lhs_sum, 1.0 / (2.0 * p));
  rep.rhs = std::pow(rhs_sum, 1.0 / (2.0 * p));
  if (f_density != nullptr) rep.rhs *= R;
  rep.ratio =
      (rep.lhs == 0.0 && rep.rhs == 0.0) ? 0.0 : rep.lhs / rep.rhs;
  return rep;
}

}  // namespace

void WeightSpec::validate() const {
  if (alpha < 0.0) throw Error("WeightSpec: alpha must be nonnegative");
  if (!(R > 0.0)) throw Error("WeightSpec: R must be positive");
}

double weight_eval(const WeightSpec& spec, const std::array<double, 3>& x) {
  spec.validate();
  double d2 = 0.0;
  for (int k = 0; k < 3; ++k)
    d2 += (x[k] - spec.x0[k]) * (x[k] - spec.x0[k]);
  return std::pow(std::sqrt(d2) / spec.R + 1.0, spec.alpha);
}

DyadicDecomposition dyadic_decompose(const Grid& g, DomainKind kind,
                                     const std::array<double, 3>& x0,
                                     double R) {
  if (R < 2.0 * g.h)
    throw Error("dyadic_decompose: base radius below two cells");
  const double diam = domain_diameter(g, kind);
  if (R > diam)
    throw Error("dyadic_decompose: base radius exceeds the domain diameter");

  DyadicDecomposition dec;
  dec.grid = g;
  dec.kind = kind;
  dec.x0 = x0;

  int ktilde = 0;
  while (diam / (3.0 * std::ldexp(1.0, ktilde)) > R) ++ktilde;
  dec.rbar = diam / (3.0 * std::ldexp(1.0, ktilde));

  double dmax = 0.0;
  std::vector<double> dist(g.cells(), 0.0);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    const std::array<double, 3> x = g.center(g.coords(c));
    dist[c] = std::sqrt(wrapped_dist2(g, kind, x, x0));
    dmax = std::max(dmax, dist[c]);
  }
  int J = 1;
  while (std::ldexp(dec.rbar, J + 1) < dmax) ++J;
  dec.levels = J + 1;

  dec.annulus.resize(g.cells());
  dec.counts.assign(static_cast<std::size_t>(dec.levels), 0);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    int j = 0;
    if (dist[c] > 2.0 * dec.rbar) {
      j = 1;
      while (j < J && dist[c] > std::ldexp(dec.rbar, j + 1)) ++j;
    }
    dec.annulus[c] = j;
    ++dec.counts[static_cast<std::size_t>(j)];
  }
  return dec;
}

VecField random_annulus_data(const DyadicDecomposition& dec, int k,
                             std::uint64_t seed) {
  check_source_annulus(dec, k);
  const Grid& g = dec.grid;
  VecField data(g, dec.kind);
  for (int axis = 0; axis < g.d; ++axis) {
    std::array<int, 3> ext{1, 1, 1};
    for (int kk = 0; kk < g.d; ++kk)
      ext[kk] = (kk == axis) ? data.faces(axis) : g.n[kk];
    std::array<int, 3> fc{0, 0, 0};
    for (fc[0] = 0; fc[0] < ext[0]; ++fc[0])
      for (fc[1] = 0; fc[1] < ext[1]; ++fc[1])
        for (fc[2] = 0; fc[2] < ext[2]; ++fc[2]) {
          const bool periodic = axis_periodic(dec.kind, axis);
          if (!periodic && (fc[axis] == 0 || fc[axis] == g.n[axis])) continue;
          std::array<int, 3> lo = fc, hi = fc;
          lo[axis] = periodic ? (fc[axis] + g.n[axis] - 1) % g.n[axis]
                              : fc[axis] - 1;
          if (!periodic) hi[axis] = fc[axis];
          if (dec.annulus[g.index(lo)] != k || dec.annulus[g.index(hi)] != k)
            continue;
          data.at(axis, fc) =
              2.0 * rng::uniform01(seed, static_cast<std::uint64_t>(axis),
                                   data.findex(axis, fc), 0) -
              1.0;
        }
  }
  const ScalarField e = grad_energy_cells(data);
  double norm2 = 0.0;
  for (std::size_t c = 0; c < g.cells(); ++c)
    norm2 += e[c] * cell_volume(g);
  if (norm2 == 0.0)
    throw Error("random_annulus_data: shell carries no interior faces");
  const double s = 1.0 / std::sqrt(norm2);
  for (int axis = 0; axis < g.d; ++axis)
    for (double& v : data.comp[axis]) v *= s;
  return data;
}

ScalarField random_annulus_density(const DyadicDecomposition& dec, int k,
                                   std::uint64_t seed) {
  check_source_annulus(dec, k);
  const Grid& g = dec.grid;
  ScalarField f(g);
  double norm2 = 0.0;
  for (std::size_t c = 0; c < g.cells(); ++c) {
    if (dec.annulus[c] != k) continue;
    f[c] = 2.0 * rng::uniform01(seed, 0, c, 1) - 1.0;
    norm2 += f[c] * f[c] * cell_volume(g);
  }
  if (norm2 == 0.0)
    throw Error("random_annulus_density: empty shell");
  const double s = 1.0 / std::sqrt(norm2);
  for (double& v : f.v) v *= s;
  return f;
}

DualityProfile annulus_duality_profile(const CoefficientField& a,
                                       const DyadicDecomposition& dec, int k,
                                       const VecField& g,
                                       const SolveOptions& opts) {
  check_source_annulus(dec, k);
  if (!same_grid(a.grid, dec.grid) || !same_grid(g.grid, dec.grid))
    throw Error("annulus_duality_profile: grid mismatch");
  const ScalarField eg = grad_energy_cells(g);
  double norm2 = 0.0;
  for (std::size_t c = 0; c < dec.grid.cells(); ++c) {
    if (eg[c] != 0.0 && dec.annulus[c] != k)
      throw Error("annulus_duality_profile: data leaves the source shell");
    norm2 += eg[c] * cell_volume(dec.grid);
  }
  const ScalarField rhs = divergence_cells(g);
  return duality_common(a, dec, k, rhs.v, false, norm2, opts);
}

DualityProfile annulus_duality_profile(const CoefficientField& a,
                                       const DyadicDecomposition& dec, int k,
                                       const ScalarField& f,
                                       const SolveOptions& opts) {
  check_source_annulus(dec, k);
  if (!same_grid(a.grid, dec.grid) || !same_grid(f.grid, dec.grid))
    throw Error("annulus_duality_profile: grid mismatch");
  double norm2 = 0.0;
  for (std::size_t c = 0; c < dec.grid.cells(); ++c) {
    if (f[c] != 0.0 && dec.annulus[c] != k)
      throw Error("annulus_duality_profile: data leaves the source shell");
    norm2 += f[c] * f[c] * cell_volume(dec.grid);
  }
  return duality_common(a, dec, k, f.v, true, norm2, opts);
}

MeyersReport weighted_meyers_check(const CoefficientField& a, DomainKind kind,
                                   const VecField& g, double p, double alpha0,
                                   double alpha1, double R,
                                   const std::array<double, 3>& x0,
                                   const SolveOptions& opts) {
  if (!same_grid(g.grid, a.grid))
    throw Error("weighted_meyers_check: grid mismatch");
  const ScalarField eg = grad_energy_cells(g);
  const ScalarField rhs = divergence_cells(g);
  return meyers_common(a, kind, rhs.v, nullptr, eg, p, alpha0, alpha1, R, x0,
                       opts);
}

MeyersReport weighted_meyers_check(const CoefficientField& a, DomainKind kind,
                                   const ScalarField& f, double p,
                                   double alpha0, double alpha1, double R,
                                   const std::array<double, 3>& x0,
                                   const SolveOptions& opts) {
  if (!same_grid(f.grid, a.grid))
    throw Error("weighted_meyers_check: grid mismatch");
  const ScalarField unused(a.grid);
  return meyers_common(a, kind, f.v, &f, unused, p, alpha0, alpha1, R, x0,
                       opts);
}

}  // namespace homog
