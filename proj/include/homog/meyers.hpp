#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "homog/elliptic.hpp"
#include "homog/ensemble.hpp"
#include "homog/grid.hpp"

namespace homog {

// Radial comparison weight (|x - x0|/R + 1)^alpha: equal to 1 at x0,
// nondecreasing in |x - x0| and in alpha.
struct WeightSpec {
  double alpha = 0.0;
  double R = 1.0;
  std::array<double, 3> x0{0.0, 0.0, 0.0};
  void validate() const;  // alpha >= 0 and R > 0
};

double weight_eval(const WeightSpec& spec, const std::array<double, 3>& x);

// Dyadic shells around x0: shell 0 is the ball of radius 2*rbar, shell j
// (0 < j < J) collects 2^j rbar < |x - x0| <= 2^{j+1} rbar, and the last
// shell J absorbs everything farther out. rbar = diam / (3 * 2^ktilde)
// with the smallest ktilde making rbar <= R, so R/rbar stays in [1, 2]
// whenever R <= diam/3. Distances wrap on periodic axes.
struct DyadicDecomposition {
  Grid grid;
  DomainKind kind = DomainKind::Box;
  std::array<double, 3> x0{0.0, 0.0, 0.0};
  double rbar = 0.0;
  int levels = 0;  // shells 0..J with J = levels - 1
  std::vector<int> annulus;         // shell index per cell
  std::vector<std::size_t> counts;  // cells per shell

  int J() const { return levels - 1; }
};

// Throws when R < 2h (shells would be subgrid) or R exceeds the domain
// diameter. Deterministic: identical inputs give identical decompositions.
DyadicDecomposition dyadic_decompose(const Grid& g, DomainKind kind,
                                     const std::array<double, 3>& x0,
                                     double R);

// Random data supported in shell k with unit L2 norm: face values (both
// adjacent cells inside the shell) or cell densities, iid uniform on
// [-1, 1] before normalization. Throws when the shell carries no data slot.
VecField random_annulus_data(const DyadicDecomposition& dec, int k,
                             std::uint64_t seed);
ScalarField random_annulus_density(const DyadicDecomposition& dec, int k,
                                   std::uint64_t seed);

// Per-shell gradient energies of the dual solve
//   -div(a^T grad v) = div g   (resp. = f),   v = 0 on bounded faces,
// for data supported in shell k, each normalized by the predicted decay
// envelope: 2^{-|k-j|d} for gradient data, and
// ((k-j)_+ + 1)^2 |A_0|^{2/d} 2^{-|k-j|d + 2 max(k,j)} for densities,
// both times the data's squared L2 norm.
struct DualityProfile {
  int k = 0;
  double data_norm2 = 0.0;
  std::vector<double> energy;      // integral of |grad v|^2 over shell j
  std::vector<double> normalized;  // energy / (envelope * data_norm2)
  SolveStats stats;
};

DualityProfile annulus_duality_profile(const CoefficientField& a,
                                       const DyadicDecomposition& dec, int k,
                                       const VecField& g,
                                       const SolveOptions& opts = {});
DualityProfile annulus_duality_profile(const CoefficientField& a,
                                       const DyadicDecomposition& dec, int k,
                                       const ScalarField& f,
                                       const SolveOptions& opts = {});

// Weighted integrability check for the dual problem above. With weights
// w_alpha = (|x - x0|/R + 1)^alpha,
//   lhs = (sum |grad v|^{2p} w_alpha0 h^d)^{1/(2p)},
//   rhs = (sum |g|^{2p} w_alpha1 h^d)^{1/(2p)}          (gradient data),
//   rhs = R (sum |f|^{2p} w_alpha1 h^d)^{1/(2p)}        (density data),
// and ratio = lhs / rhs (0 when both vanish). params_valid records whether
// the strict exponent window holds: 0 <= alpha0 < alpha1 < d(2p - 1), for
// density data additionally alpha0 < alpha1 - 2p. The relaxed setting
// p = 1, alpha0 = alpha1 = 0 still runs (plain energy bound) with the flag
// down. Structurally invalid inputs (p outside [1, 1.1], R <= 0, negative
// or decreasing alphas) throw instead.
struct MeyersReport {
  double p = 1.0;
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double R = 1.0;
  bool params_valid = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // 0 when both vanish
  ScalarField v;
  SolveStats stats;
};

MeyersReport weighted_meyers_check(const CoefficientField& a, DomainKind kind,
                                   const VecField& g, double p, double alpha0,
                                   double alpha1, double R,
                                   const std::array<double, 3>& x0,
                                   const SolveOptions& opts = {});
MeyersReport weighted_meyers_check(const CoefficientField& a, DomainKind kind,
                                   const ScalarField& f, double p,
                                   double alpha0, double alpha1, double R,
                                   const std::array<double, 3>& x0,
                                   const SolveOptions& opts = {});

}  // namespace homog
