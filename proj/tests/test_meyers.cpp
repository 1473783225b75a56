#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "homog/ensemble.hpp"
#include "homog/meyers.hpp"
#include "homog/rng.hpp"

using namespace homog;

namespace {

CoefficientField identity_field(const Grid& g) {
  CoefficientField a(g);
  for (std::size_t c = 0; c < g.cells(); ++c) a.set_scalar(c, 1.0);
  a.lambda = 1.0;
  return a;
}

VecField random_faces(const Grid& g, DomainKind kind, std::uint64_t seed) {
  VecField data(g, kind);
  for (int axis = 0; axis < g.d; ++axis)
    for (std::size_t t = 0; t < data.comp[axis].size(); ++t)
      data.comp[axis][t] =
          2.0 * rng::uniform01(seed, 0, t, static_cast<std::uint64_t>(axis)) -
          1.0;
  return data;
}

double face_inner(const VecField& a, const VecField& b) {
  double s = 0.0;
  for (int axis = 0; axis < a.grid.d; ++axis) {
    const int nfaces = a.faces(axis);
    std::array<int, 3> ext{1, 1, 1};
    for (int k = 0; k < a.grid.d; ++k)
      ext[k] = (k == axis) ? nfaces : a.grid.n[k];
    std::array<int, 3> fc{0, 0, 0};
    for (fc[0] = 0; fc[0] < ext[0]; ++fc[0])
      for (fc[1] = 0; fc[1] < ext[1]; ++fc[1])
        for (fc[2] = 0; fc[2] < ext[2]; ++fc[2])
          s += a.at(axis, fc) * b.at(axis, fc) *
               a.face_volume(axis, fc[axis]);
  }
  return s;
}

}  // namespace

TEST_CASE("weight evaluation hits the closed-form anchors and is monotone") {
  WeightSpec w;
  w.alpha = 2.0;
  w.R = 0.5;
  w.x0 = {0.25, 0.75, 0.0};

  CHECK(weight_eval(w, w.x0) == 1.0);
  CHECK(weight_eval(w, {0.75, 0.75, 0.0}) == doctest::Approx(4.0).epsilon(1e-15));

  WeightSpec flat = w;
  flat.alpha = 0.0;
  for (double t : {0.0, 0.3, 0.9})
    CHECK(weight_eval(flat, {t, t, 0.0}) == 1.0);

  // monotone in distance and in the exponent
  double prev = 0.0;
  for (double r : {0.0, 0.1, 0.3, 0.6, 1.2}) {
    const double val = weight_eval(w, {0.25 + r, 0.75, 0.0});
    CHECK(val >= prev);
    prev = val;
  }
  WeightSpec lo = w, hi = w;
  lo.alpha = 0.5;
  hi.alpha = 3.0;
  const std::array<double, 3> x{0.6, 0.2, 0.0};
  CHECK(weight_eval(lo, x) <= weight_eval(w, x));
  CHECK(weight_eval(w, x) <= weight_eval(hi, x));

  WeightSpec bad = w;
  bad.alpha = -1.0;
  CHECK_THROWS_AS(weight_eval(bad, x), Error);
  bad = w;
  bad.R = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("dyadic shells partition the box and follow the dyadic growth law") {
  Grid g(2, {64, 64, 1}, 1.0 / 64.0);
  const std::array<double, 3> x0{0.5, 0.5, 0.0};
  DyadicDecomposition dec = dyadic_decompose(g, DomainKind::Box, x0, 1.0 / 16.0);

  const double diam = std::sqrt(2.0);
  CHECK(dec.rbar == doctest::Approx(diam / 24.0).epsilon(1e-14));
  const double rr = (1.0 / 16.0) / dec.rbar;
  CHECK(rr >= 1.0);
  CHECK(rr <= 2.0);
  CHECK(dec.levels == 4);
  CHECK(std::fabs(dec.J() - std::log2(diam / dec.rbar)) <= 2.0);

  // frozen shell census for this geometry
  REQUIRE(dec.counts.size() == 4);
  CHECK(dec.counts[0] == 180);
  CHECK(dec.counts[1] == 536);
  CHECK(dec.counts[2] == 2136);
  CHECK(dec.counts[3] == 1244);

  std::size_t total = 0;
  for (std::size_t c : dec.counts) total += c;
  CHECK(total == g.cells());
  for (std::size_t c = 0; c < g.cells(); ++c) {
    CHECK(dec.annulus[c] >= 0);
    CHECK(dec.annulus[c] <= dec.J());
  }

  // interior shells track the 2^{jd} volume law within a factor of 4
  for (int j = 1; j < dec.J(); ++j) {
    const double ratio =
        static_cast<double>(dec.counts[static_cast<std::size_t>(j)]) /
        (static_cast<double>(dec.counts[0]) * std::ldexp(1.0, j * g.d));
    CHECK(ratio >= 0.25);
    CHECK(ratio <= 4.0);
  }

  // deterministic re-decomposition
  DyadicDecomposition again =
      dyadic_decompose(g, DomainKind::Box, x0, 1.0 / 16.0);
  CHECK(again.annulus == dec.annulus);
  CHECK(again.counts == dec.counts);
  CHECK(again.rbar == dec.rbar);

  CHECK_THROWS_AS(dyadic_decompose(g, DomainKind::Box, x0, 1.0 / 64.0), Error);
  CHECK_THROWS_AS(dyadic_decompose(g, DomainKind::Box, x0, 2.0), Error);

  SUBCASE("slab shells wrap tangentially and still partition") {
    DyadicDecomposition sd =
        dyadic_decompose(g, DomainKind::Slab, x0, 1.0 / 16.0);
    std::size_t t = 0;
    for (std::size_t c : sd.counts) t += c;
    CHECK(t == g.cells());
    CHECK(sd.levels >= 2);
    DyadicDecomposition sd2 =
        dyadic_decompose(g, DomainKind::Slab, x0, 1.0 / 16.0);
    CHECK(sd2.annulus == sd.annulus);
  }
}

TEST_CASE("duality profile handles zero data and rejects misplaced support") {
  Grid g(2, {64, 64, 1}, 1.0 / 64.0);
  const std::array<double, 3> x0{0.5, 0.5, 0.0};
  DyadicDecomposition dec = dyadic_decompose(g, DomainKind::Box, x0, 1.0 / 16.0);
  CoefficientField a = identity_field(g);

  VecField zg(g, DomainKind::Box);
  DualityProfile pz = annulus_duality_profile(a, dec, 1, zg);
  for (double e : pz.energy) CHECK(e == 0.0);
  for (double n : pz.normalized) CHECK(n == 0.0);

  ScalarField zf(g);
  DualityProfile pzf = annulus_duality_profile(a, dec, 2, zf);
  for (double n : pzf.normalized) CHECK(n == 0.0);

  // face data generated for shell 2 is rejected as shell-0 input
  VecField wrong = random_annulus_data(dec, 2, 5);
  CHECK_THROWS_AS(annulus_duality_profile(a, dec, 0, wrong), Error);
  ScalarField fwrong = random_annulus_density(dec, 2, 5);
  CHECK_THROWS_AS(annulus_duality_profile(a, dec, 0, fwrong), Error);
  CHECK_THROWS_AS(annulus_duality_profile(a, dec, -1, zg), Error);
  CHECK_THROWS_AS(annulus_duality_profile(a, dec, dec.levels, zg), Error);

  // generated data is unit-normalized and supported where requested
  VecField data = random_annulus_data(dec, 1, 9);
  const ScalarField e = grad_energy_cells(data);
  double norm2 = 0.0;
  for (std::size_t c = 0; c < g.cells(); ++c) {
    norm2 += e[c] * g.h * g.h;
    if (dec.annulus[c] != 1) CHECK(e[c] == 0.0);
  }
  CHECK(norm2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("duality decay matches the frozen envelope across a random suite") {
  Grid g(2, {128, 128, 1}, 1.0 / 128.0);
  const std::array<double, 3> x0{0.5, 0.5, 0.0};
  DyadicDecomposition dec = dyadic_decompose(g, DomainKind::Box, x0, 1.0 / 32.0);
  REQUIRE(dec.levels == 5);
  CoefficientField a = identity_field(g);
  SolveOptions opts;
  opts.tol = 1e-10;

  // measured over this exact deterministic suite: same-shell normalized
  // energies sit in [0.44, 0.56]; three shells away they drop below 7e-3
  for (int k : {0, 3}) {
    const int far = (k == 0) ? 3 : 0;
    for (int seed = 0; seed < 10; ++seed) {
      VecField data = random_annulus_data(dec, k, 100 + seed);
      DualityProfile prof = annulus_duality_profile(a, dec, k, data, opts);
      CHECK(prof.normalized[static_cast<std::size_t>(k)] >= 0.2);
      CHECK(prof.normalized[static_cast<std::size_t>(k)] <= 1.0);
      CHECK(prof.normalized[static_cast<std::size_t>(far)] <= 0.05);
      for (double n : prof.normalized) CHECK(n <= 1.0);
    }
  }
  // density data: the second-order envelope dominates by a wide margin
  for (int k : {0, 3}) {
    for (int seed = 0; seed < 10; ++seed) {
      ScalarField f = random_annulus_density(dec, k, 200 + seed);
      DualityProfile prof = annulus_duality_profile(a, dec, k, f, opts);
      for (double n : prof.normalized) {
        CHECK(std::isfinite(n));
        CHECK(n <= 0.05);
      }
    }
  }
}

TEST_CASE("weighted check obeys the exact energy identity at the relaxed endpoint") {
  Grid g(2, {48, 48, 1}, 1.0 / 48.0);
  const std::array<double, 3> x0{0.5, 0.5, 0.0};
  SolveOptions opts;
  opts.tol = 1e-12;

  VecField data = random_faces(g, DomainKind::Box, 11);

  MeyersReport rep = weighted_meyers_check(identity_field(g), DomainKind::Box,
                                           data, 1.0, 0.0, 0.0, 0.25, x0, opts);
  CHECK_FALSE(rep.params_valid);
  CHECK(rep.ratio <= 1.0 + 1e-6);
  CHECK(rep.ratio > 0.0);

  EnsembleSpec s;
  s.kind = EnsembleKind::Checkerboard;
  s.lambda = 0.25;
  s.master_seed = 3;
  CoefficientField a = sample_field(s, g, 0);
  MeyersReport rc = weighted_meyers_check(a, DomainKind::Box, data, 1.0, 0.0,
                                          0.0, 0.25, x0, opts);
  CHECK(rc.ratio <= 1.0 / a.lambda + 1e-6);

  VecField zero(g, DomainKind::Box);
  MeyersReport rz = weighted_meyers_check(identity_field(g), DomainKind::Box,
                                          zero, 1.0, 0.0, 0.0, 0.25, x0, opts);
  CHECK(rz.lhs == 0.0);
  CHECK(rz.ratio == 0.0);
}

TEST_CASE("weighted check validates parameters and flags the strict window") {
  Grid g(2, {16, 16, 1}, 1.0 / 16.0);
  CoefficientField a = identity_field(g);
  VecField data(g, DomainKind::Box);
  ScalarField f(g);
  const std::array<double, 3> x0{0.5, 0.5, 0.0};

  CHECK_THROWS_AS(weighted_meyers_check(a, DomainKind::Box, data, 0.99, 0.0,
                                        0.5, 0.25, x0),
                  Error);
  CHECK_THROWS_AS(weighted_meyers_check(a, DomainKind::Box, data, 1.11, 0.0,
                                        0.5, 0.25, x0),
                  Error);
  CHECK_THROWS_AS(weighted_meyers_check(a, DomainKind::Box, data, 1.0, -0.1,
                                        0.5, 0.25, x0),
                  Error);
  CHECK_THROWS_AS(weighted_meyers_check(a, DomainKind::Box, data, 1.0, 0.7,
                                        0.5, 0.25, x0),
                  Error);
  CHECK_THROWS_AS(weighted_meyers_check(a, DomainKind::Box, data, 1.0, 0.0,
                                        0.5, 0.0, x0),
                  Error);
  CHECK_THROWS_AS(weighted_meyers_check(a, DomainKind::Torus, data, 1.0, 0.0,
                                        0.5, 0.25, x0),
                  Error);

  // gradient data: 0 <= alpha0 < alpha1 < d(2p - 1)
  CHECK(weighted_meyers_check(a, DomainKind::Box, data, 1.0, 0.5, 1.0, 0.25, x0)
            .params_valid);
  CHECK_FALSE(weighted_meyers_check(a, DomainKind::Box, data, 1.0, 0.5, 2.5,
                                    0.25, x0)
                  .params_valid);
  // density data additionally needs alpha0 < alpha1 - 2p
  CHECK(weighted_meyers_check(a, DomainKind::Box, f, 1.1, 0.05, 2.3, 0.25, x0)
            .params_valid);
  CHECK_FALSE(weighted_meyers_check(a, DomainKind::Box, f, 1.0, 0.0, 1.0, 0.25,
                                    x0)
                  .params_valid);
}

TEST_CASE("weighted check ratio is invariant under data scaling") {
  Grid g(2, {32, 32, 1}, 1.0 / 32.0);
  const std::array<double, 3> x0{0.5, 0.5, 0.0};
  EnsembleSpec s;
  s.kind = EnsembleKind::Checkerboard;
  s.lambda = 0.25;
  s.master_seed = 19;
  CoefficientField a = sample_field(s, g, 0);
  SolveOptions opts;
  opts.tol = 1e-11;

  VecField data = random_faces(g, DomainKind::Box, 13);
  MeyersReport r1 = weighted_meyers_check(a, DomainKind::Box, data, 1.05, 0.5,
                                          1.0, 1.0 / 8.0, x0, opts);
  VecField scaled = data;
  for (int axis = 0; axis < 2; ++axis)
    for (double& v : scaled.comp[axis]) v *= 2.0;
  MeyersReport r2 = weighted_meyers_check(a, DomainKind::Box, scaled, 1.05,
                                          0.5, 1.0, 1.0 / 8.0, x0, opts);
  CHECK(r2.lhs == doctest::Approx(2.0 * r1.lhs).epsilon(1e-13));
  CHECK(r2.ratio == doctest::Approx(r1.ratio).epsilon(1e-12));

  ScalarField f(g);
  for (std::size_t c = 0; c < g.cells(); ++c)
    f[c] = 2.0 * rng::uniform01(17, 0, c, 0) - 1.0;
  MeyersReport f1 = weighted_meyers_check(a, DomainKind::Box, f, 1.1, 0.05,
                                          2.3, 1.0 / 8.0, x0, opts);
  ScalarField fs = f;
  for (double& v : fs.v) v *= 0.5;
  MeyersReport f2 = weighted_meyers_check(a, DomainKind::Box, fs, 1.1, 0.05,
                                          2.3, 1.0 / 8.0, x0, opts);
  CHECK(f2.ratio == doctest::Approx(f1.ratio).epsilon(1e-12));
}

TEST_CASE("transposition round-trips and symmetric fields solve identically") {
  Grid g(2, {24, 24, 1}, 1.0 / 24.0);
  const std::array<double, 3> x0{0.5, 0.5, 0.0};

  // asymmetric cell matrices: transposing twice restores every entry
  CoefficientField asym(g);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    asym.at(c, 0, 0) = 1.0 + 0.1 * static_cast<double>(c % 7);
    asym.at(c, 1, 1) = 0.5;
    asym.at(c, 0, 1) = 0.05 * static_cast<double>(c % 3);
    asym.at(c, 1, 0) = -0.02 * static_cast<double>(c % 5);
  }
  CoefficientField twice = transpose_coefficients(transpose_coefficients(asym));
  CHECK(twice.m == asym.m);
  CoefficientField once = transpose_coefficients(asym);
  CHECK(once.at(3, 0, 1) == asym.at(3, 1, 0));
  CHECK(once.at(3, 1, 0) == asym.at(3, 0, 1));

  // symmetric anisotropic field: a^T == a entrywise, so the dual solve is
  // bit-for-bit the primal one
  EnsembleSpec s;
  s.kind = EnsembleKind::Checkerboard;
  s.lambda = 0.5;
  s.master_seed = 23;
  CoefficientField sym = sample_field(s, g, 0);
  for (std::size_t c = 0; c < g.cells(); ++c) {
    sym.at(c, 0, 1) = 0.1;
    sym.at(c, 1, 0) = 0.1;
  }
  sym.refresh_lambda();
  CHECK(sym.lambda > 0.0);
  CHECK(transpose_coefficients(sym).m == sym.m);

  VecField data = random_faces(g, DomainKind::Box, 29);
  SolveOptions opts;
  opts.tol = 1e-11;
  MeyersReport r1 = weighted_meyers_check(sym, DomainKind::Box, data, 1.0, 0.5,
                                          1.0, 0.25, x0, opts);
  MeyersReport r2 =
      weighted_meyers_check(transpose_coefficients(sym), DomainKind::Box, data,
                            1.0, 0.5, 1.0, 0.25, x0, opts);
  CHECK(r1.v.v == r2.v.v);
  CHECK(r1.ratio == r2.ratio);

  // discrete duality: <grad v_g, rho> == <grad w_rho, g> for symmetric a
  VecField rho = random_faces(g, DomainKind::Box, 41);
  const BcTable bc(g, DomainKind::Box, 0.0);
  const EllipticOperator op(sym, bc, 0.0);
  const ScalarField vg = solve(op, divergence_cells(data).v, opts);
  const ScalarField wr = solve(op, divergence_cells(rho).v, opts);
  const double lhs = face_inner(gradient(vg, bc), rho);
  const double rhs = face_inner(gradient(wr, bc), data);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
}

TEST_CASE("weighted checkerboard suite stays below the frozen constant") {
  Grid g(2, {64, 64, 1}, 1.0 / 64.0);
  const std::array<double, 3> x0{0.5, 0.5, 0.0};
  EnsembleSpec s;
  s.kind = EnsembleKind::Checkerboard;
  s.lambda = 0.25;
  s.master_seed = 7;
  SolveOptions opts;
  opts.tol = 1e-10;

  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    CoefficientField a = sample_field(s, g, i);
    VecField data(g, DomainKind::Box);
    for (int axis = 0; axis < 2; ++axis)
      for (std::size_t t = 0; t < data.comp[axis].size(); ++t)
        data.comp[axis][t] =
            2.0 * rng::uniform01(31, i, t, static_cast<std::uint64_t>(axis)) -
            1.0;
    MeyersReport rep = weighted_meyers_check(a, DomainKind::Box, data, 1.05,
                                             0.5, 1.0, 1.0 / 16.0, x0, opts);
    CHECK(rep.params_valid);
    CHECK(std::isfinite(rep.ratio));
    worst = std::max(worst, rep.ratio);
  }
  // recorded empirical constant for this deterministic suite
  CHECK(worst == doctest::Approx(1.77009).epsilon(1e-3));

  double worstf = 0.0;
  for (int i = 0; i < 20; ++i) {
    CoefficientField a = sample_field(s, g, i);
    ScalarField f(g);
    for (std::size_t c = 0; c < g.cells(); ++c)
      f[c] = 2.0 * rng::uniform01(37, i, c, 0) - 1.0;
    MeyersReport rep = weighted_meyers_check(a, DomainKind::Box, f, 1.1, 0.05,
                                             2.3, 1.0 / 16.0, x0, opts);
    CHECK(rep.params_valid);
    worstf = std::max(worstf, rep.ratio);
  }
  CHECK(worstf == doctest::Approx(0.111759).epsilon(1e-3));
}
