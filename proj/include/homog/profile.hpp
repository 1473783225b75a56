#pragma once

#include <cstddef>
#include <vector>

#include "homog/grid.hpp"

namespace homog {

struct PowerFit {
  double exponent = 0.0;
  double constant = 0.0;  // prefactor C in C * x^exponent
  double x_lo = 0.0, x_hi = 0.0;
  double residual = 0.0;  // rms residual of log(value) over the fit window
  bool valid = false;     // false when fewer than two positive points fall in range
};

// radii -> averaged values with a log-log least-squares power fit attached
struct DecayProfile {
  std::vector<double> radii;
  std::vector<double> values;
  PowerFit fit;
};

// Least squares of log(y) against log(x) over x in [x_lo, x_hi]; points with
// y <= 0 are skipped. x must be strictly increasing.
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                       double x_lo, double x_hi);

DecayProfile make_profile(std::vector<double> radii, std::vector<double> values);

struct QuantileReport {
  std::size_t n = 0;
  double min = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q90 = 0.0, max = 0.0;
  static QuantileReport of(std::vector<double> values);
};

}  // namespace homog
