#include "homog/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace homog {

namespace {

constexpr double kPi = std::numbers::pi;

double radial_dist(const std::array<double, 3>& x, const std::array<double, 3>& v, int d) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) s += (x[k] - v[k]) * (x[k] - v[k]);
  return std::sqrt(s);
}

}  // namespace

void ConeSpec::validate() const {
  if (d != 2 && d != 3) throw std::invalid_argument("cone dimension must be 2 or 3");
  switch (geometry) {
    case ConeGeometry::Sector:
      if (d != 2) throw std::invalid_argument("a planar sector requires d = 2");
      if (!(angle > 0.0) || !(angle < 2.0 * kPi))
        throw std::invalid_argument("sector opening must lie in (0, 2 pi)");
      break;
    case ConeGeometry::Cap:
      if (d != 3) throw std::invalid_argument("a spherical cap requires d = 3");
      if (!(angle > 0.0) || !(angle < kPi))
        throw std::invalid_argument("cap polar angle must lie in (0, pi)");
      break;
    case ConeGeometry::CornerBox:
      break;
  }
}

double ConeSpec::opening() const {
  validate();
  if (d != 2) throw std::invalid_argument("planar opening is defined for d = 2 only");
  return geometry == ConeGeometry::CornerBox ? 0.5 * kPi : angle;
}

double ConeSpec::first_eigenvalue() const {
  validate();
  switch (geometry) {
    case ConeGeometry::Sector: {
      const double w = kPi / angle;
      return w * w;
    }
    case ConeGeometry::Cap:
      if (std::abs(angle - 0.5 * kPi) > 1e-12)
        throw std::invalid_argument("only the half-sphere cap has a tabulated eigenvalue");
      return 2.0;  // lowest mode of the half-sphere is a coordinate function
    case ConeGeometry::CornerBox:
      return d == 2 ? 4.0 : 12.0;  // quadrant: sin(2 theta); octant: x y z / |x|^3
  }
  throw std::logic_error("unreachable cone geometry");
}

bool ConeSpec::strictly_contained() const {
  validate();
  switch (geometry) {
    case ConeGeometry::Sector:
      return angle < kPi;
    case ConeGeometry::Cap:
      return angle < 0.5 * kPi;
    case ConeGeometry::CornerBox:
      return true;
  }
  throw std::logic_error("unreachable cone geometry");
}

std::vector<double> sector_eigenvalues(double omega, int count) {
  if (!(omega > 0.0) || !(omega < 2.0 * kPi))
    throw std::invalid_argument("sector opening must lie in (0, 2 pi)");
  if (count < 1) throw std::invalid_argument("eigenvalue count must be positive");
  std::vector<double> lam(static_cast<std::size_t>(count));
  for (int k = 1; k <= count; ++k) {
    const double w = static_cast<double>(k) * kPi / omega;
    lam[static_cast<std::size_t>(k - 1)] = w * w;
  }
  return lam;
}

SpectralData homogeneity_exponents(const std::vector<double>& lambdas, int d) {
  if (d != 2 && d != 3) throw std::invalid_argument("cone dimension must be 2 or 3");
  if (lambdas.empty()) throw std::invalid_argument("eigenvalue list is empty");
  SpectralData out;
  out.lambda = lambdas;
  out.b.resize(lambdas.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double lam = lambdas[i];
    if (!(lam > 0.0)) throw std::invalid_argument("cross-sectional eigenvalues must be positive");
    if (i > 0 && !(lam > prev))
      throw std::invalid_argument("cross-sectional eigenvalues must be strictly increasing");
    prev = lam;
    const double half = 0.5 * static_cast<double>(d - 2);
    out.b[i] = -half + std::sqrt(lam + half * half);
  }
  return out;
}

double box_interp(const ScalarField& f, const std::array<double, 3>& x) {
  const Grid& g = f.grid;
  int i0[3] = {0, 0, 0};
  double w[3] = {0.0, 0.0, 0.0};
  for (int k = 0; k < g.d; ++k) {
    if (g.n[k] == 1) continue;
    const double t = (x[k] - g.origin[k]) / g.h - 0.5;
    double fl = std::floor(t);
    int i = static_cast<int>(fl);
    double frac = t - fl;
    if (i < 0) {
      i = 0;
      frac = 0.0;
    } else if (i >= g.n[k] - 1) {
      i = g.n[k] - 2;
      frac = 1.0;
    }
    i0[k] = i;
    w[k] = frac;
  }
  double acc = 0.0;
  const int corners = 1 << g.d;
  for (int m = 0; m < corners; ++m) {
    std::array<int, 3> c{0, 0, 0};
    double weight = 1.0;
    for (int k = 0; k < g.d; ++k) {
      const int up = (m >> k) & 1;
      if (g.n[k] == 1) {
        if (up) {
          weight = 0.0;
          break;
        }
        continue;
      }
      c[k] = i0[k] + up;
      weight *= up ? w[k] : 1.0 - w[k];
    }
    if (weight != 0.0) acc += weight * f.v[f.grid.index(c)];
  }
  return acc;
}

double series_eval(const std::vector<double>& coeff, const ConeSpec& spec, double rho,
                   const std::array<double, 3>& x) {
  spec.validate();
  if (spec.d != 2) throw std::invalid_argument("series evaluation supports d = 2 only");
  if (!(rho > 0.0)) throw std::invalid_argument("reference radius must be positive");
  const double omega = spec.opening();
  const double dx = x[0] - spec.vertex[0];
  const double dy = x[1] - spec.vertex[1];
  const double r = std::hypot(dx, dy);
  if (r == 0.0) return 0.0;  // every mode vanishes at the vertex
  double theta = std::atan2(dy, dx);
  if (theta < 0.0) theta += 2.0 * kPi;  // openings may exceed pi
  const double tol = 1e-9;
  if (theta > omega + tol) {
    if (theta >= 2.0 * kPi - tol)
      theta = 0.0;  // rounding just below the lower edge
    else
      throw std::domain_error("evaluation point lies outside the cone");
  }
  const double th = std::clamp(theta, 0.0, omega);
  double acc = 0.0;
  for (std::size_t k = 1; k <= coeff.size(); ++k) {
    const double bk = static_cast<double>(k) * kPi / omega;
    acc += coeff[k - 1] * std::pow(r / rho, bk) * std::numbers::sqrt2 *
           std::sin(static_cast<double>(k) * kPi * th / omega);
  }
  return acc;
}

std::vector<double> extract_mode_coefficients(const ScalarField& u, const ConeSpec& spec,
                                              double rho, int count, int arc_samples) {
  spec.validate();
  if (spec.d != 2) throw std::invalid_argument("mode extraction supports d = 2 only");
  if (!(rho > 0.0)) throw std::invalid_argument("reference radius must be positive");
  if (count < 1) throw std::invalid_argument("mode count must be positive");
  if (arc_samples < 2 * count + 1)
    throw std::invalid_argument("arc quadrature is too coarse for the requested modes");
  const Grid& g = u.grid;
  const double omega = spec.opening();
  std::vector<double> a(static_cast<std::size_t>(count), 0.0);
  for (int m = 0; m < arc_samples; ++m) {
    const double theta = (static_cast<double>(m) + 0.5) * omega / arc_samples;
    std::array<double, 3> x{spec.vertex[0] + rho * std::cos(theta),
                            spec.vertex[1] + rho * std::sin(theta), g.center({0, 0, 0})[2]};
    for (int k = 0; k < 2; ++k) {
      if (x[k] < g.origin[k] - 1e-12 || x[k] > g.origin[k] + g.extent(k) + 1e-12)
        throw std::invalid_argument("extraction arc leaves the grid box");
    }
    const double val = box_interp(u, x);
    for (int k = 1; k <= count; ++k) {
      a[static_cast<std::size_t>(k - 1)] +=
          val * std::numbers::sqrt2 * std::sin(static_cast<double>(k) * kPi * theta / omega);
    }
  }
  for (double& ak : a) ak /= static_cast<double>(arc_samples);
  return a;
}

DecayProfile cone_excess_profile(const VecField& grad_u, const std::array<double, 3>& vertex,
                                 const std::vector<double>& radii) {
  if (radii.empty()) throw std::invalid_argument("radius list is empty");
  const Grid& g = grad_u.grid;
  double min_extent = std::numeric_limits<double>::infinity();
  for (int k = 0; k < g.d; ++k) min_extent = std::min(min_extent, g.extent(k));
  double prev = 0.0;
  for (double r : radii) {
    if (!(r > prev)) throw std::invalid_argument("radii must be positive and strictly increasing");
    prev = r;
  }
  if (radii.back() > min_extent + 1e-12)
    throw std::invalid_argument("profile radius exceeds the box extent");
  const ScalarField energy = grad_energy_cells(grad_u);
  std::vector<double> values(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i)
    values[i] = ball_average(energy, grad_u.kind, vertex, radii[i]);
  DecayProfile p = make_profile(radii, values);
  p.fit = fit_power_law(p.radii, p.values, p.radii.front(), p.radii.back());
  return p;
}

EdgeDecayReport edge_gradient_decay_check(const VecField& grad_u,
                                          const std::array<double, 3>& vertex,
                                          const std::vector<std::array<double, 3>>& probes,
                                          double rho, double delta) {
  if (probes.empty()) throw std::invalid_argument("probe list is empty");
  if (!(rho > 0.0)) throw std::invalid_argument("envelope radius must be positive");
  if (!(delta >= 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("decay rate must be finite and nonnegative");
  const Grid& g = grad_u.grid;
  const ScalarField energy = grad_energy_cells(grad_u);
  EdgeDecayReport rep;
  rep.rho = rho;
  rep.delta = delta;
  rep.entries.reserve(probes.size());
  for (const auto& x0 : probes) {
    std::array<int, 3> c{0, 0, 0};
    for (int k = 0; k < g.d; ++k) {
      const int i = static_cast<int>(std::floor((x0[k] - g.origin[k]) / g.h));
      if (i < 0 || i >= g.n[k]) throw std::invalid_argument("probe point lies outside the grid");
      c[k] = i;
    }
    EdgeDecayEntry e;
    e.x0 = x0;
    e.dist = radial_dist(x0, vertex, g.d);
    const auto v = vector_at_cell(grad_u, c);
    e.grad_at = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    e.rms = std::sqrt(ball_average(energy, grad_u.kind, x0, rho));
    e.on_edge = e.dist < g.h;
    const double envelope = std::pow(e.dist / rho, delta) * e.rms;
    if (e.grad_at == 0.0)
      e.ratio = 0.0;
    else if (envelope == 0.0)
      e.ratio = std::numeric_limits<double>::infinity();
    else
      e.ratio = e.grad_at / envelope;
    if (!e.on_edge) rep.max_ratio = std::max(rep.max_ratio, e.ratio);
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace homog
