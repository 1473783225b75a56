#include "homog/profile.hpp"

#include <algorithm>
#include <cmath>

namespace homog {

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y,
                       double x_lo, double x_hi) {
  if (x.size() != y.size()) throw Error("fit_power_law: length mismatch");
  PowerFit fit;
  fit.x_lo = x_lo;
  fit.x_hi = x_hi;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i > 0 && !(x[i] > x[i - 1]))
      throw Error("fit_power_law: abscissae must be strictly increasing");
    if (x[i] < x_lo || x[i] > x_hi || !(y[i] > 0.0) || !(x[i] > 0.0)) continue;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  if (lx.size() < 2) return fit;
  const double n = double(lx.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) return fit;
  fit.exponent = (n * sxy - sx * sy) / det;
  fit.constant = std::exp((sy - fit.exponent * sx) / n);
  double rss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (std::log(fit.constant) + fit.exponent * lx[i]);
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / n);
  fit.valid = true;
  return fit;
}

DecayProfile make_profile(std::vector<double> radii, std::vector<double> values) {
  if (radii.size() != values.size()) throw Error("profile: length mismatch");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1]))
      throw Error("profile: radii must be strictly increasing");
  DecayProfile p;
  p.radii = std::move(radii);
  p.values = std::move(values);
  return p;
}

QuantileReport QuantileReport::of(std::vector<double> values) {
  QuantileReport q;
  q.n = values.size();
  if (values.empty()) return q;
  std::sort(values.begin(), values.end());
  auto at = [&values](double p) {
    const double pos = p * double(values.size() - 1);
    const std::size_t lo = std::size_t(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double w = pos - double(lo);
    return values[lo] * (1.0 - w) + values[hi] * w;
  };
  q.min = values.front();
  q.q25 = at(0.25);
  q.q50 = at(0.50);
  q.q75 = at(0.75);
  q.q90 = at(0.90);
  q.max = values.back();
  return q;
}

}  // namespace homog
