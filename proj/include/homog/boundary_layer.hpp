#pragma once

#include <array>
#include <vector>

#include "homog/correctors.hpp"
#include "homog/elliptic.hpp"
#include "homog/ensemble.hpp"
#include "homog/grid.hpp"
#include "homog/profile.hpp"

namespace homog {

// Periodic multilinear interpolation of a torus cell field at a physical
// point; coordinates outside the torus wrap around.
double torus_interp(const ScalarField& f, const std::array<double, 3>& x);

// Micro-coordinate image of a macro grid: same cell counts, spacing h/eps
// and origin scaled by 1/eps, so cell c covers the macro cell c viewed in
// the microstructure coordinates x/eps.
Grid micro_grid(const Grid& macro, double eps);

// Dirichlet trace of the eps-rescaled micro field: phi(x/eps) evaluated at
// the centers of every bounded face of `macro`.
BoundaryData micro_trace(const ScalarField& phi_micro, const Grid& macro,
                         DomainKind kind, double eps);

// Massive boundary-layer correctors: for each direction i,
//   -div(a grad theta_i) + theta_i / T = 0   in the slab (or box) domain,
//   theta_i = phi_i(x/eps)                   on the bounded Dirichlet faces.
// On a slab the far face is flux-free; tangential axes are periodic.
struct BoundaryLayerSet {
  Grid grid;
  DomainKind kind = DomainKind::Slab;
  int d = 0;
  double T = 0.0;    // massive-term scale; operator carries +u/T
  double eps = 1.0;  // microstructure scale of the trace data
  double tol = 0.0;  // solver tolerance used
  // Set when the slab depth cannot absorb the massive decay: depth <
  // sqrt(T) * log(1/trunc_tol). Results are still returned.
  bool truncated = false;
  std::vector<ScalarField> theta;
  std::vector<BoundaryData> trace;
  std::vector<SolveStats> stats;

  // Per-cell layer-energy density  sum_i eps^2 |grad theta_i|^2.
  ScalarField energy_density() const;
};

BoundaryLayerSet solve_boundary_layer(const CoefficientField& a_eps,
                                      const std::vector<ScalarField>& phi_micro,
                                      const Grid& macro, DomainKind kind,
                                      double T, double eps,
                                      const SolveOptions& opts = {},
                                      double trunc_tol = 1e-3);

// Power fit of value ~ C * (1 + r/eps)^p restricted to radii in
// [r_lo, r_hi]; entries with nonpositive value are skipped. The returned
// fit (exponent, constant, window) lives in the scaling variable 1 + r/eps.
PowerFit fit_scaling_power(const std::vector<double>& r,
                           const std::vector<double>& v, double eps,
                           double r_lo, double r_hi);

// Ball averages of the layer-energy density around boundary points,
// averaged over the supplied points: value(r) = mean_x0 avg_{B_r(x0)} e.
// The attached fit is in the scaling variable 1 + r/eps over the window
// r in [2 eps, depth/4].
DecayProfile averaged_decay_profile(const BoundaryLayerSet& bl,
                                    const std::vector<std::array<double, 3>>& boundary_points,
                                    const std::vector<double>& radii);

// Max pointwise magnitude  sqrt(sum_i eps^2 |grad theta_i|^2)  binned by
// distance to the Dirichlet boundary in eps-wide bins; radii hold bin
// centers and the fit is in the scaling variable as above.
DecayProfile pointwise_decay_profile(const BoundaryLayerSet& bl);

// Composite-trapezoid integral of the layer-energy density along the inward
// normal ray from the boundary point x0 (cell-center nodes).
double ray_energy(const BoundaryLayerSet& bl, const std::array<double, 3>& x0);

// Exponentially localized energy comparison for solutions of
//   -div(a grad u) + u/T = div F,  u = g on the Dirichlet trace:
//   lhs = sum_c w_c (|grad u|^2 + u^2/T) h^d
//   rhs = sum_c w_c (|grad g|^2 + g^2/T + |F|^2) h^d
// with weight w(x) = exp(-gamma |x - x0| / L) centered at the midpoint of
// the lower Dirichlet face. Gradients of u and g are taken against the
// operator's own Dirichlet data (the two fields share the trace).
struct ExpWeightReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs; 0 when both vanish
  double gamma = 0.0;
  double L = 0.0;
  double T = 0.0;
};

ExpWeightReport exp_weighted_energy_check(const EllipticOperator& op,
                                          const ScalarField& u,
                                          const ScalarField& g,
                                          const VecField& F, double T,
                                          double L, double gamma);

// H1-seminorm errors of the two-scale expansions
//   plain:     ubar + eps phi_i(x/eps) d_i ubar
//   corrected: ubar + (eps phi_i(x/eps) - eps theta_i) d_i ubar
// against ueps, measured over interior faces only (both errors use the same
// norm, so the boundary-layer comparison is like for like).
struct TwoScaleReport {
  double h1_plain = 0.0;
  double h1_corrected = 0.0;
  double eps = 0.0;
};

TwoScaleReport two_scale_error(const ScalarField& ueps, const ScalarField& ubar,
                               const CorrectorSet& correctors,
                               const BoundaryLayerSet& bl, double eps);

}  // namespace homog
