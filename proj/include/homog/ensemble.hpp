#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "homog/grid.hpp"

namespace homog {

enum class EnsembleKind : std::uint8_t {
  Constant,        // a = Id everywhere
  Checkerboard,    // iid per unit cell, value in {lambda, 1}, times Id
  Laminate,        // deterministic, alternates lambda/1 along x0 per block
  PeriodicSmooth,  // deterministic trigonometric profile with range [lambda, 1]
  GaussianClipped  // clipped smooth-kernel convolution of white noise
};

const char* ensemble_kind_name(EnsembleKind k);
EnsembleKind ensemble_kind_from_name(const std::string& s);

// Scalar microstructures with eigenvalues pinned to [lambda, 1]. The
// constant kind is the identity matrix regardless of lambda.
struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::Constant;
  int d = 2;
  double lambda = 0.25;             // ellipticity lower bound, in (0, 1]
  double correlation_length = 1.0;  // unit cell / half-period; fixed 1 for gaussian-clipped
  double holder_alpha = 1.0;
  std::uint64_t master_seed = 0;

  void validate() const;
};

// Per-cell symmetric d x d matrices, row-major d*d doubles per cell.
struct CoefficientField {
  Grid grid;
  int d = 2;
  std::vector<double> m;
  double lambda = 1.0;  // realized lower eigenvalue bound across cells

  CoefficientField() = default;
  explicit CoefficientField(const Grid& g)
      : grid(g), d(g.d), m(g.cells() * std::size_t(g.d * g.d), 0.0) {}

  double at(std::size_t cell, int i, int j) const {
    return m[cell * std::size_t(d * d) + std::size_t(i * d + j)];
  }
  double& at(std::size_t cell, int i, int j) {
    return m[cell * std::size_t(d * d) + std::size_t(i * d + j)];
  }
  bool isotropic_diagonal() const;  // true when every cell is scalar * Id
  void set_scalar(std::size_t cell, double value) {
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) at(cell, i, j) = (i == j) ? value : 0.0;
  }
  // min/max eigenvalue scan over all cells
  std::array<double, 2> eigenvalue_range() const;
  void refresh_lambda() { lambda = eigenvalue_range()[0]; }
};

CoefficientField transpose_coefficients(const CoefficientField& a);

// Deterministic sample of the ensemble on a grid; a pure function of
// (spec, grid shape, sample_index).
CoefficientField sample_field(const EnsembleSpec& spec, const Grid& grid,
                              std::uint64_t sample_index);

// Sample a(x/eps): the microstructure keeps correlation length 1 while the
// grid is reinterpreted at spacing grid.h (so h/eps in micro units).
CoefficientField sample_field_scaled(const EnsembleSpec& spec, const Grid& grid,
                                     double eps, std::uint64_t sample_index);

// Largest discrete Hoelder quotient max |f(y)-f(z)| / |y-z|^alpha over
// distinct grid points y,z in B_1(x). Matrix fields use the max-entry
// difference. Throws when fewer than two points fall in the ball.
double holder_constant_field(const ScalarField& f, DomainKind kind,
                             const std::array<double, 3>& x, double alpha);
double holder_constant_field(const CoefficientField& a, DomainKind kind,
                             const std::array<double, 3>& x, double alpha);

struct SpectralGapReport {
  double variance = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;       // variance / rhs, 0 when both vanish
  double variance_se = 0.0; // batch standard errors
  double rhs_se = 0.0;
  bool clipped = false;     // a perturbation left [lo, hi] and was clipped
  int n_samples = 0;
};

enum class GapFunctional : std::uint8_t {
  AverageA11Ball,  // mean of a_11 over B_1(torus center)
  DirichletEnergy  // corrector energy abar_11 of a small fixed torus solve
};
GapFunctional gap_functional_from_name(const std::string& s);

// Monte Carlo check of the spectral-gap inequality: variance of the
// functional vs the integrated squared local finite-difference sensitivity
// (perturbations supported in unit balls, step h_pert).
SpectralGapReport spectral_gap_probe(const EnsembleSpec& spec, GapFunctional functional,
                                     int n_samples, double h_pert = 1e-4);

}  // namespace homog
