#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace homog {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DomainKind : std::uint8_t {
  Torus = 0,     // fully periodic
  Slab = 1,      // Dirichlet at x0 = 0, periodic tangentially, far side per massive
  Box = 2,       // Dirichlet on all faces
  CornerBox = 3  // Box whose corner at the origin carries the edge set
};

const char* domain_kind_name(DomainKind k);
DomainKind domain_kind_from_name(const std::string& s);
bool axis_periodic(DomainKind k, int axis);

// Uniform cell-centered grid, d in {2,3}. Cell centers sit at
// origin + (i + 1/2) h per axis; the linear index runs fastest over the
// last axis. Axis 0 is the Slab normal and one of the CornerBox edge axes.
struct Grid {
  int d = 2;
  std::array<int, 3> n{1, 1, 1};
  double h = 1.0;
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  static constexpr std::size_t kCellCap = std::size_t(1) << 24;

  Grid() = default;
  Grid(int d_, std::array<int, 3> n_, double h_,
       std::array<double, 3> origin_ = {0.0, 0.0, 0.0});

  std::size_t cells() const {
    std::size_t c = 1;
    for (int k = 0; k < d; ++k) c *= std::size_t(n[k]);
    return c;
  }
  std::size_t index(const std::array<int, 3>& c) const {
    std::size_t idx = std::size_t(c[0]);
    for (int k = 1; k < d; ++k) idx = idx * std::size_t(n[k]) + std::size_t(c[k]);
    return idx;
  }
  std::array<int, 3> coords(std::size_t idx) const {
    std::array<int, 3> c{0, 0, 0};
    for (int k = d - 1; k >= 0; --k) {
      c[k] = int(idx % std::size_t(n[k]));
      idx /= std::size_t(n[k]);
    }
    return c;
  }
  std::array<double, 3> center(const std::array<int, 3>& c) const {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int k = 0; k < d; ++k) x[k] = origin[k] + (c[k] + 0.5) * h;
    return x;
  }
  double extent(int axis) const { return n[axis] * h; }
  bool same_shape(const Grid& o) const {
    return d == o.d && n == o.n && h == o.h;
  }
};

struct ScalarField {
  Grid grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const Grid& g) : grid(g), v(g.cells(), 0.0) {}
  double& operator[](std::size_t i) { return v[i]; }
  double operator[](std::size_t i) const { return v[i]; }
  std::size_t size() const { return v.size(); }
  double mean() const;
};

// Face-centered vector field: component k lives on the faces normal to
// axis k. Face f along axis k separates cells f-1 and f; a periodic axis
// stores n faces (f = 0 is the wrap face between cells n-1 and 0), a
// bounded axis n+1 faces (f = 0 and f = n on the boundary).
struct VecField {
  Grid grid;
  DomainKind kind = DomainKind::Torus;
  std::array<std::vector<double>, 3> comp;

  VecField() = default;
  VecField(const Grid& g, DomainKind k);

  int faces(int axis) const {
    return axis_periodic(kind, axis) ? grid.n[axis] : grid.n[axis] + 1;
  }
  std::size_t findex(int axis, const std::array<int, 3>& f) const {
    std::size_t idx = std::size_t(f[0]);
    for (int k = 1; k < grid.d; ++k) {
      int ext = (k == axis) ? faces(axis) : grid.n[k];
      idx = idx * std::size_t(ext) + std::size_t(f[k]);
    }
    return idx;
  }
  double& at(int axis, const std::array<int, 3>& f) { return comp[axis][findex(axis, f)]; }
  double at(int axis, const std::array<int, 3>& f) const { return comp[axis][findex(axis, f)]; }
  // Integration weight of a face: h^d, halved on Dirichlet boundary faces
  // so that face-weighted energies reproduce the operator's quadratic form.
  double face_volume(int axis, int f_axis_coord) const;
};

// Dirichlet data per (axis, side); side 0 is the lower face. Arrays are
// indexed over the grid with the given axis dropped, last axis fastest.
struct BoundaryData {
  std::array<std::array<std::vector<double>, 2>, 3> face;

  bool has(int axis, int side) const { return !face[axis][side].empty(); }
  static std::size_t slot_cells(const Grid& g, int axis);
  static std::size_t slot_index(const Grid& g, int axis, const std::array<int, 3>& c);
  void set_constant(const Grid& g, int axis, int side, double value);
};

enum class BcKind : std::uint8_t { Periodic, Dirichlet, Neumann };

// Boundary semantics shared by assembly, gradient and solve so the three
// cannot disagree: Slab's far face is Neumann exactly when the operator is
// massive, every other bounded face is Dirichlet (data or zero).
struct BcTable {
  DomainKind kind = DomainKind::Torus;
  std::array<std::array<BcKind, 2>, 3> bc{};
  const BoundaryData* data = nullptr;

  BcTable() = default;
  BcTable(const Grid& g, DomainKind k, double massive, const BoundaryData* d = nullptr);
  BcKind at(int axis, int side) const { return bc[axis][side]; }
  double value(const Grid& g, int axis, int side, const std::array<int, 3>& c) const {
    if (data == nullptr || !data->face[axis][side].size()) return 0.0;
    return data->face[axis][side][BoundaryData::slot_index(g, axis, c)];
  }
};

// Face differences of a cell field; boundary faces use the half-cell
// one-sided difference against Dirichlet data (zero flux on Neumann faces).
// Exact on affine fields away from boundary faces.
VecField gradient(const ScalarField& u, const BcTable& bc);
VecField gradient(const ScalarField& u, DomainKind kind);  // zero-data table, massive=0

// Cell divergence (F_upper - F_lower)/h summed over axes.
ScalarField divergence_cells(const VecField& f);

// Per-cell |w|^2 where each squared component is the mean of the squares of
// the two adjacent face values (energy-consistent with face quadrature).
ScalarField grad_energy_cells(const VecField& w);

// Vector value at a cell center: average of the 2d adjacent face values.
std::array<double, 3> vector_at_cell(const VecField& w, const std::array<int, 3>& c);

// Distance honoring periodic wrapping of the domain.
double wrapped_dist2(const Grid& g, DomainKind kind, const std::array<double, 3>& x,
                     const std::array<double, 3>& y);

// Mean of f over cells whose centers lie in B_r(center) within the domain.
// Throws when the intersection is empty.
double ball_average(const ScalarField& f, DomainKind kind,
                    const std::array<double, 3>& center, double r);
std::size_t ball_cell_count(const Grid& g, DomainKind kind,
                            const std::array<double, 3>& center, double r);

// Distance from a point to the bounded part of the domain boundary
// (infinite directions on a torus/slab tangent contribute nothing).
double dist_to_boundary(const Grid& g, DomainKind kind, const std::array<double, 3>& x);

}  // namespace homog
