#include "homog/grid.hpp"

#include <cmath>

namespace homog {

const char* domain_kind_name(DomainKind k) {
  switch (k) {
    case DomainKind::Torus: return "torus";
    case DomainKind::Slab: return "slab";
    case DomainKind::Box: return "box";
    case DomainKind::CornerBox: return "corner-box";
  }
  return "?";
}

DomainKind domain_kind_from_name(const std::string& s) {
  if (s == "torus") return DomainKind::Torus;
  if (s == "slab") return DomainKind::Slab;
  if (s == "box") return DomainKind::Box;
  if (s == "corner-box" || s == "corner") return DomainKind::CornerBox;
  throw Error("unknown domain kind '" + s + "'");
}

bool axis_periodic(DomainKind k, int axis) {
  switch (k) {
    case DomainKind::Torus: return true;
    case DomainKind::Slab: return axis != 0;
    default: return false;
  }
}

Grid::Grid(int d_, std::array<int, 3> n_, double h_, std::array<double, 3> origin_)
    : d(d_), n(n_), h(h_), origin(origin_) {
  if (d != 2 && d != 3) throw Error("grid dimension must be 2 or 3");
  if (h <= 0.0) throw Error("grid spacing must be positive");
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) {
    if (n[k] < 1) throw Error("grid extents must be positive");
    total *= std::size_t(n[k]);
  }
  if (d == 2) n[2] = 1;
  if (total > kCellCap) throw Error("grid exceeds the unknown cap 2^24");
}

double ScalarField::mean() const {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / double(v.size());
}

VecField::VecField(const Grid& g, DomainKind k) : grid(g), kind(k) {
  for (int axis = 0; axis < grid.d; ++axis) {
    std::size_t total = 1;
    for (int j = 0; j < grid.d; ++j)
      total *= std::size_t(j == axis ? faces(axis) : grid.n[j]);
    comp[axis].assign(total, 0.0);
  }
}

double VecField::face_volume(int axis, int f_axis_coord) const {
  double vol = 1.0;
  for (int k = 0; k < grid.d; ++k) vol *= grid.h;
  if (!axis_periodic(kind, axis) &&
      (f_axis_coord == 0 || f_axis_coord == grid.n[axis]))
    vol *= 0.5;
  return vol;
}

std::size_t BoundaryData::slot_cells(const Grid& g, int axis) {
  std::size_t total = 1;
  for (int k = 0; k < g.d; ++k)
    if (k != axis) total *= std::size_t(g.n[k]);
  return total;
}

std::size_t BoundaryData::slot_index(const Grid& g, int axis, const std::array<int, 3>& c) {
  std::size_t idx = 0;
  for (int k = 0; k < g.d; ++k) {
    if (k == axis) continue;
    idx = idx * std::size_t(g.n[k]) + std::size_t(c[k]);
  }
  return idx;
}

void BoundaryData::set_constant(const Grid& g, int axis, int side, double value) {
  face[axis][side].assign(slot_cells(g, axis), value);
}

BcTable::BcTable(const Grid& g, DomainKind k, double massive, const BoundaryData* d)
    : kind(k), data(d) {
  (void)g;
  for (int axis = 0; axis < 3; ++axis)
    for (int side = 0; side < 2; ++side) {
      if (axis_periodic(k, axis)) {
        bc[axis][side] = BcKind::Periodic;
      } else if (k == DomainKind::Slab && axis == 0 && side == 1 && massive > 0.0) {
        bc[axis][side] = BcKind::Neumann;
      } else {
        bc[axis][side] = BcKind::Dirichlet;
      }
    }
}

VecField gradient(const ScalarField& u, const BcTable& bc) {
  const Grid& g = u.grid;
  VecField w(g, bc.kind);
  const double inv_h = 1.0 / g.h;
  for (int axis = 0; axis < g.d; ++axis) {
    const bool periodic = axis_periodic(bc.kind, axis);
    const int nf = w.faces(axis);
    std::array<int, 3> f{0, 0, 0};
    // iterate all face coordinates of this axis
    std::array<int, 3> ext{1, 1, 1};
    for (int k = 0; k < g.d; ++k) ext[k] = (k == axis) ? nf : g.n[k];
    for (f[0] = 0; f[0] < ext[0]; ++f[0])
      for (f[1] = 0; f[1] < ext[1]; ++f[1])
        for (f[2] = 0; f[2] < ext[2]; ++f[2]) {
          std::array<int, 3> hi = f, lo = f;
          double val;
          if (periodic) {
            lo[axis] = (f[axis] + g.n[axis] - 1) % g.n[axis];
            val = (u[g.index(hi)] - u[g.index(lo)]) * inv_h;
          } else if (f[axis] == 0) {
            if (bc.at(axis, 0) == BcKind::Neumann) {
              val = 0.0;
            } else {
              val = (u[g.index(hi)] - bc.value(g, axis, 0, f)) * 2.0 * inv_h;
            }
          } else if (f[axis] == g.n[axis]) {
            lo[axis] = g.n[axis] - 1;
            if (bc.at(axis, 1) == BcKind::Neumann) {
              val = 0.0;
            } else {
              val = (bc.value(g, axis, 1, f) - u[g.index(lo)]) * 2.0 * inv_h;
            }
          } else {
            lo[axis] = f[axis] - 1;
            val = (u[g.index(hi)] - u[g.index(lo)]) * inv_h;
          }
          w.at(axis, f) = val;
        }
  }
  return w;
}

VecField gradient(const ScalarField& u, DomainKind kind) {
  BcTable bc(u.grid, kind, 0.0, nullptr);
  return gradient(u, bc);
}

ScalarField divergence_cells(const VecField& f) {
  const Grid& g = f.grid;
  ScalarField out(g);
  const double inv_h = 1.0 / g.h;
  const std::size_t nc = g.cells();
  for (std::size_t idx = 0; idx < nc; ++idx) {
    std::array<int, 3> c = g.coords(idx);
    double s = 0.0;
    for (int axis = 0; axis < g.d; ++axis) {
      std::array<int, 3> lo = c, hi = c;
      if (axis_periodic(f.kind, axis)) {
        hi[axis] = (c[axis] + 1) % g.n[axis];
      } else {
        hi[axis] = c[axis] + 1;
      }
      s += (f.at(axis, hi) - f.at(axis, lo)) * inv_h;
    }
    out[idx] = s;
  }
  return out;
}

ScalarField grad_energy_cells(const VecField& w) {
  const Grid& g = w.grid;
  ScalarField out(g);
  const std::size_t nc = g.cells();
  for (std::size_t idx = 0; idx < nc; ++idx) {
    std::array<int, 3> c = g.coords(idx);
    double s = 0.0;
    for (int axis = 0; axis < g.d; ++axis) {
      std::array<int, 3> lo = c, hi = c;
      if (axis_periodic(w.kind, axis)) {
        hi[axis] = (c[axis] + 1) % g.n[axis];
      } else {
        hi[axis] = c[axis] + 1;
      }
      double a = w.at(axis, lo), b = w.at(axis, hi);
      s += 0.5 * (a * a + b * b);
    }
    out[idx] = s;
  }
  return out;
}

std::array<double, 3> vector_at_cell(const VecField& w, const std::array<int, 3>& c) {
  const Grid& g = w.grid;
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (int axis = 0; axis < g.d; ++axis) {
    std::array<int, 3> lo = c, hi = c;
    if (axis_periodic(w.kind, axis)) {
      hi[axis] = (c[axis] + 1) % g.n[axis];
    } else {
      hi[axis] = c[axis] + 1;
    }
    out[axis] = 0.5 * (w.at(axis, lo) + w.at(axis, hi));
  }
  return out;
}

double wrapped_dist2(const Grid& g, DomainKind kind, const std::array<double, 3>& x,
                     const std::array<double, 3>& y) {
  double s = 0.0;
  for (int k = 0; k < g.d; ++k) {
    double dk = std::fabs(x[k] - y[k]);
    if (axis_periodic(kind, k)) {
      double L = g.extent(k);
      dk = std::fmin(dk, L - dk);
    }
    s += dk * dk;
  }
  return s;
}

double ball_average(const ScalarField& f, DomainKind kind,
                    const std::array<double, 3>& center, double r) {
  const Grid& g = f.grid;
  double sum = 0.0;
  std::size_t count = 0;
  const double r2 = r * r;
  const std::size_t nc = g.cells();
  for (std::size_t idx = 0; idx < nc; ++idx) {
    std::array<double, 3> x = g.center(g.coords(idx));
    if (wrapped_dist2(g, kind, x, center) <= r2) {
      sum += f[idx];
      ++count;
    }
  }
  if (count == 0) throw Error("ball_average: empty ball/domain intersection");
  return sum / double(count);
}

std::size_t ball_cell_count(const Grid& g, DomainKind kind,
                            const std::array<double, 3>& center, double r) {
  std::size_t count = 0;
  const double r2 = r * r;
  const std::size_t nc = g.cells();
  for (std::size_t idx = 0; idx < nc; ++idx) {
    std::array<double, 3> x = g.center(g.coords(idx));
    if (wrapped_dist2(g, kind, x, center) <= r2) ++count;
  }
  return count;
}

double dist_to_boundary(const Grid& g, DomainKind kind, const std::array<double, 3>& x) {
  double dist = INFINITY;
  for (int axis = 0; axis < g.d; ++axis) {
    if (axis_periodic(kind, axis)) continue;
    double lo = g.origin[axis], hi = g.origin[axis] + g.extent(axis);
    dist = std::fmin(dist, x[axis] - lo);
    if (!(kind == DomainKind::Slab && axis == 0)) dist = std::fmin(dist, hi - x[axis]);
  }
  return dist;
}

}  // namespace homog
