#pragma once

#include <array>
#include <vector>

#include "homog/elliptic.hpp"
#include "homog/profile.hpp"

namespace homog {

using Mat3 = std::array<std::array<double, 3>, 3>;

// Periodized correctors on a torus: phi_i with mean zero, fluxes
// q_i = a(e_i + grad phi_i) - abar e_i on faces, and the flux correctors
// sigma_{ijk}, stored as the independent components j < k (pair order
// (0,1), (0,2), (1,2)); sigma_{ikj} = -sigma_{ijk} by construction.
struct CorrectorSet {
  Grid grid;
  int d = 2;
  std::vector<ScalarField> phi;    // d entries
  std::vector<VecField> q;         // d entries, mean-zero per component
  std::vector<ScalarField> sigma;  // d * pairs(d) entries, mean-zero
  Mat3 abar{};
  double tol = 0.0;  // solver tolerance all solves were run at

  static int pairs(int d) { return d * (d - 1) / 2; }
  static int pair_id(int j, int k);  // requires j < k
  const ScalarField& sigma_field(int i, int pair) const {
    return sigma[std::size_t(i * pairs(d) + pair)];
  }
  // signed value of sigma_{ijk} at a cell (0 when j == k)
  double sigma_at(int i, int j, int k, std::size_t cell) const;
};

// -div(a(e_i + grad phi)) = 0 on the torus, mean-zero solution.
ScalarField solve_corrector(const CoefficientField& a, int dir,
                            const SolveOptions& opts, SolveStats* stats = nullptr);

// abar e_i = torus average of a(e_i + grad phi_i), column by column.
Mat3 effective_coefficient(const CoefficientField& a,
                           const std::vector<ScalarField>& phi);

// Face flux q_i = a(e_i + grad phi_i) - abar e_i (mean-zero per component).
VecField corrector_flux(const CoefficientField& a, const ScalarField& phi_i,
                        const Mat3& abar, int i);

// Poisson solves -lap sigma_{ijk} = d_j (q_i)_k - d_k (q_i)_j with
// backward-difference right-hand sides; the forward-difference divergence
// then satisfies div sigma_i = q_i up to solver tolerance. Returns the
// pairs(d) independent components for row i.
std::vector<ScalarField> solve_flux_corrector(const CoefficientField& a,
                                              const ScalarField& phi_i,
                                              const Mat3& abar, int i,
                                              const SolveOptions& opts,
                                              SolveStats* stats = nullptr);

// All correctors, fluxes, sigma components and abar for one sampled field.
CorrectorSet solve_corrector_set(const CoefficientField& a, const SolveOptions& opts);

// max over components/faces of |forward-difference divergence of sigma_i - q_i|
double flux_divergence_residual(const CorrectorSet& cs, int i);

// sqrt of ball averages of |phi|^2 + |sigma|^2 around the torus center.
DecayProfile corrector_growth_profile(const CorrectorSet& cs,
                                      const std::vector<double>& radii);

// Largest discrete Hoelder quotient of |grad phi_i| over the unit ball at x.
double corrector_holder_constant(const CorrectorSet& cs, int i,
                                 const std::array<double, 3>& x, double alpha);

}  // namespace homog
