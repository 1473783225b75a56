#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace homog {

// Closed-form / Jacobi eigenvalues for the tiny symmetric matrices (d <= 3)
// that show up in coefficient cells and excess normal equations.

inline std::array<double, 2> sym_eig2(double a00, double a01, double a11) {
  double tr = a00 + a11;
  double det = a00 * a11 - a01 * a01;
  double disc = std::sqrt(std::fmax(0.0, tr * tr / 4.0 - det));
  return {tr / 2.0 - disc, tr / 2.0 + disc};
}

// Cyclic Jacobi on a 3x3 symmetric matrix, returns eigenvalues ascending.
inline std::array<double, 3> sym_eig3(std::array<std::array<double, 3>, 3> m) {
  for (int sweep = 0; sweep < 32; ++sweep) {
    double off = std::fabs(m[0][1]) + std::fabs(m[0][2]) + std::fabs(m[1][2]);
    if (off < 1e-15 * (1.0 + std::fabs(m[0][0]) + std::fabs(m[1][1]) + std::fabs(m[2][2])))
      break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (m[p][q] == 0.0) continue;
        double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        std::array<std::array<double, 3>, 3> r = m;
        for (int k = 0; k < 3; ++k) {
          r[p][k] = c * m[p][k] - s * m[q][k];
          r[q][k] = s * m[p][k] + c * m[q][k];
        }
        m = r;
        for (int k = 0; k < 3; ++k) {
          r[k][p] = c * m[k][p] - s * m[k][q];
          r[k][q] = s * m[k][p] + c * m[k][q];
        }
        m = r;
      }
  }
  std::array<double, 3> ev{m[0][0], m[1][1], m[2][2]};
  if (ev[0] > ev[1]) std::swap(ev[0], ev[1]);
  if (ev[1] > ev[2]) std::swap(ev[1], ev[2]);
  if (ev[0] > ev[1]) std::swap(ev[0], ev[1]);
  return ev;
}

// Solve M x = b for symmetric positive definite M of size n <= 3 in place.
// Returns false when a pivot collapses (singular system).
inline bool solve_small(int n, double m[3][3], double b[3], double x[3]) {
  int idx[3] = {0, 1, 2};
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int r = k + 1; r < n; ++r)
      if (std::fabs(m[idx[r]][k]) > std::fabs(m[idx[piv]][k])) piv = r;
    std::swap(idx[k], idx[piv]);
    double akk = m[idx[k]][k];
    if (akk == 0.0) return false;
    for (int r = k + 1; r < n; ++r) {
      double f = m[idx[r]][k] / akk;
      for (int c = k; c < n; ++c) m[idx[r]][c] -= f * m[idx[k]][c];
      b[idx[r]] -= f * b[idx[k]];
    }
  }
  for (int k = n - 1; k >= 0; --k) {
    double s = b[idx[k]];
    for (int c = k + 1; c < n; ++c) s -= m[idx[k]][c] * x[c];
    if (m[idx[k]][k] == 0.0) return false;
    x[k] = s / m[idx[k]][k];
  }
  return true;
}

// Condition number (ratio of extreme |eigenvalues|) of a small symmetric matrix.
inline double sym_cond(int n, const double m[3][3]) {
  if (n == 2) {
    auto ev = sym_eig2(m[0][0], m[0][1], m[1][1]);
    double lo = std::fmin(std::fabs(ev[0]), std::fabs(ev[1]));
    double hi = std::fmax(std::fabs(ev[0]), std::fabs(ev[1]));
    return lo == 0.0 ? INFINITY : hi / lo;
  }
  std::array<std::array<double, 3>, 3> a{{{m[0][0], m[0][1], m[0][2]},
                                          {m[1][0], m[1][1], m[1][2]},
                                          {m[2][0], m[2][1], m[2][2]}}};
  auto ev = sym_eig3(a);
  double lo = std::fmin(std::fabs(ev[0]), std::fabs(ev[2]));
  double hi = std::fmax(std::fabs(ev[0]), std::fabs(ev[2]));
  return lo == 0.0 ? INFINITY : hi / lo;
}

}  // namespace homog
