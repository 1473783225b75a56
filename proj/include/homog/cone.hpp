#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "homog/grid.hpp"
#include "homog/profile.hpp"

namespace homog {

enum class ConeGeometry : std::uint8_t { Sector, Cap, CornerBox };

// Conical domain anchored at `vertex`: a planar sector of opening `angle`
// (d = 2), a spherical cap of polar angle `angle` (d = 3), or the corner of a
// coordinate-aligned box (a quadrant for d = 2, an octant for d = 3).
struct ConeSpec {
  int d = 2;
  ConeGeometry geometry = ConeGeometry::CornerBox;
  double angle = 0.0;  // sector opening / cap polar angle; unused for CornerBox
  std::array<double, 3> vertex{0.0, 0.0, 0.0};

  void validate() const;

  // Effective planar opening; defined for d = 2 (CornerBox maps to pi/2).
  double opening() const;

  // Lowest Dirichlet eigenvalue of the cross section: (pi/omega)^2 for a
  // planar sector, 2 for the half-sphere cap, 12 for the octant corner.
  double first_eigenvalue() const;

  // True when the closure of the cone minus its vertex fits inside an open
  // half-space; equivalent to the lowest homogeneity exponent exceeding one.
  bool strictly_contained() const;
};

// Dirichlet eigenvalues (k pi / omega)^2, k = 1..count, of the arc problem on
// a planar sector of opening omega in (0, 2 pi). Strictly increasing.
std::vector<double> sector_eigenvalues(double omega, int count);

// Cross-sectional eigenvalues with their homogeneity exponents: for each
// lambda the positive root b of b (b + d - 2) = lambda, i.e.
// b = (2 - d)/2 + sqrt(lambda + (d - 2)^2 / 4).
struct SpectralData {
  std::vector<double> lambda;  // strictly increasing, all positive
  std::vector<double> b;       // matching exponents, all positive
};
SpectralData homogeneity_exponents(const std::vector<double>& lambdas, int d);

// Multilinear interpolation between cell centers on a bounded box; clamps to
// the boundary cell value outside the hull of centers (no periodic wrap).
double box_interp(const ScalarField& f, const std::array<double, 3>& x);

// Separated-variables sum over planar modes,
//   u(x) = sum_k coeff[k-1] * (r/rho)^{b_k} * sqrt(2) sin(k pi theta / omega),
// with r, theta polar coordinates around the cone vertex and b_k = k pi /
// omega. The angular factors average to one in square over the arc, so
// coeff[k-1] equals the arc average of u(rho *) against that factor. Throws
// when x lies outside the closed cone.
double series_eval(const std::vector<double>& coeff, const ConeSpec& spec, double rho,
                   const std::array<double, 3>& x);

// Mode coefficients of a sampled field: midpoint quadrature of the arc
// average a_k = avg_{theta in (0, omega)} u(rho e(theta)) sqrt(2)
// sin(k pi theta / omega) using arc_samples points interpolated from the
// grid. The arc must stay inside the grid box.
std::vector<double> extract_mode_coefficients(const ScalarField& u, const ConeSpec& spec,
                                              double rho, int count, int arc_samples = 512);

// Ball averages of the gradient energy centered at the cone vertex, with a
// log-log power fit over the full radius range. Radii must be positive,
// strictly increasing, and must not exceed the box extent.
DecayProfile cone_excess_profile(const VecField& grad_u, const std::array<double, 3>& vertex,
                                 const std::vector<double>& radii);

// One probe of the pointwise gradient bound near a corner: the measured
// |grad u(x0)| against the envelope (dist/rho)^delta times the rms gradient
// over the ball B_rho(x0) intersected with the domain.
struct EdgeDecayEntry {
  std::array<double, 3> x0{0.0, 0.0, 0.0};
  double dist = 0.0;     // Euclidean distance from the probe to the vertex
  double grad_at = 0.0;  // |grad u| at the probe's cell
  double rms = 0.0;      // sqrt of the gradient-energy ball average
  double ratio = 0.0;    // grad_at / ((dist/rho)^delta * rms)
  bool on_edge = false;  // probe within one cell spacing of the vertex
};

struct EdgeDecayReport {
  double rho = 0.0;
  double delta = 0.0;
  std::vector<EdgeDecayEntry> entries;
  double max_ratio = 0.0;  // over entries not flagged on_edge
};

// Evaluates the corner gradient envelope at each probe point. delta is the
// pointwise decay rate, typically half the gradient-energy decay exponent
// fitted by cone_excess_profile on a constant-coefficient reference. Probes
// sitting on the vertex cell are flagged rather than rejected.
EdgeDecayReport edge_gradient_decay_check(const VecField& grad_u,
                                          const std::array<double, 3>& vertex,
                                          const std::vector<std::array<double, 3>>& probes,
                                          double rho, double delta);

}  // namespace homog
