#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "homog/boundary_layer.hpp"
#include "homog/elliptic.hpp"
#include "homog/ensemble.hpp"
#include "homog/grid.hpp"
#include "homog/profile.hpp"

namespace homog {

// Gradient frame of the corrected affine elements
//   x_i + eps phi_i(x/eps) - eps theta_i(x),
// the comparison family for excess measurements. Passing bl = nullptr drops
// the theta part; passing empty phi_micro drops the corrector part (affine
// frame). On Dirichlet faces the element traces are evaluated analytically
// (for the full frame the phi and theta traces cancel, leaving the affine
// values). On a slab with a layer set the far face is treated as flux-free,
// matching the layer solve.
struct CorrectedFrame {
  Grid grid;
  DomainKind kind = DomainKind::Box;
  int d = 0;
  double eps = 1.0;
  std::vector<ScalarField> element;
  std::vector<BoundaryData> data;
  std::vector<VecField> grad;
  // face-averaged gradient vectors per element and cell
  std::vector<std::vector<std::array<double, 3>>> cell_grad;
};

CorrectedFrame make_frame(const Grid& g, DomainKind kind,
                          const std::vector<ScalarField>& phi_micro,
                          const BoundaryLayerSet* bl, double eps);

// Solves -div(a grad u) = 0 with the given Dirichlet data (zero where the
// data has no entry for a bounded face).
ScalarField harmonic_sample(const CoefficientField& a, DomainKind kind,
                            const BoundaryData& outer_bc,
                            const SolveOptions& opts = {},
                            SolveStats* stats = nullptr);

// Least-squares excess at one radius:
//   value = min_A avg_{B_r(x0) & O} |grad u - sum_i A_i V_i|^2
// over the frame's cell gradients V_i, solved by the exact d x d normal
// equations. A normal matrix with condition number above 1e8 switches to
// the affine frame {e_i} and sets affine_fallback.
struct ExcessEntry {
  double r = 0.0;
  double value = 0.0;
  std::array<double, 3> slope{0.0, 0.0, 0.0};
  double cond = 0.0;
  bool affine_fallback = false;
  std::size_t cells = 0;
};

ExcessEntry excess(const VecField& grad_u, const CorrectedFrame& frame,
                   const std::array<double, 3>& x0, double r);

// Excess per radius with a log-log power fit of value against r. The fit
// window is [r_star, max radius] where r_star is the mean-value radius of
// |grad u|^2 at threshold c0 (all radii when no r_star exists).
struct ExcessReport {
  std::array<double, 3> x0{};
  std::vector<ExcessEntry> entries;
  PowerFit fit;
  double fit_r_lo = 0.0;
};

ExcessReport excess_decay_report(const VecField& grad_u,
                                 const CorrectedFrame& frame,
                                 const std::array<double, 3>& x0,
                                 const std::vector<double>& radii,
                                 double c0 = 8.0);

// Ball averages of a gradient-energy density with the ratio table
//   max_ratio(r) = max over measured R >= r of avg(r)/avg(R)
// and r_star = smallest measured r with max_ratio(r) <= c0.
struct MeanValueReport {
  std::array<double, 3> x0{};
  double c0 = 8.0;
  std::vector<double> radii;
  std::vector<double> averages;
  std::vector<double> max_ratio;
  double r_star = 0.0;
  bool r_star_found = false;
};

MeanValueReport mean_value_report(const ScalarField& grad_energy,
                                  DomainKind kind,
                                  const std::array<double, 3>& x0,
                                  const std::vector<double>& radii,
                                  double c0 = 8.0);

// Weighted energy bound on the half-ball B+_r(x0) (cells with |x - x0| < r
// and first coordinate above x0): solves -div(a grad u) = div g + f with
// zero Dirichlet data on the whole discrete boundary of the half-ball, then
// compares the weighted energies with weight (1 - |x - x0|/r)^kappa:
//   lhs = sum w^kappa |grad u|^2,   rhs = sum w^kappa (|g|^2 + r^2 f^2).
struct HardyReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // 0 when both vanish
  double kappa = 0.25;
  double r = 0.0;
  std::size_t cells = 0;  // half-ball size
  ScalarField u;          // solution extended by zero to the host grid
  SolveStats stats;
};

HardyReport hardy_check(const CoefficientField& a, const VecField& g,
                        const ScalarField& f, const std::array<double, 3>& x0,
                        double r, double kappa, const SolveOptions& opts = {});

// Pointwise gradient against the root ball average:
//   ratio = |grad u(x0)| / sqrt(avg_{B_r(x0) & O} |grad u|^2),
// the gradient at x0 interpolated from the 2d faces of the containing cell.
struct PointwiseReport {
  double grad_at = 0.0;
  double rms = 0.0;
  double ratio = 0.0;  // 0 when both vanish
};

PointwiseReport pointwise_bound_check(const VecField& grad_u, DomainKind kind,
                                      const std::array<double, 3>& x0,
                                      double r);

// Kernel bound for -div(a grad u) = div g + f with zero Dirichlet data:
//   ratio = |grad u(x0)| / sum_c (|g|_c + |f_c| dist(x_c, boundary))
//                                 / |x_c - x0|^d * h^d,
// the singular self-cell replaced by its nearest neighbor's integrand.
// near_support flags x0 within one cell of the support of (g, f), where the
// continuum bound degenerates.
struct GreenKernelReport {
  double grad_at = 0.0;
  double bound = 0.0;
  double ratio = 0.0;  // 0 when both vanish
  bool near_support = false;
  ScalarField u;
  SolveStats stats;
};

GreenKernelReport green_kernel_bound_check(const CoefficientField& a,
                                           DomainKind kind, const VecField& g,
                                           const ScalarField& f,
                                           const std::array<double, 3>& x0,
                                           const SolveOptions& opts = {});

}  // namespace homog
