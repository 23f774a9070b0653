#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "unidec/decomp.hpp"
#include "unidec/grid.hpp"

using namespace unidec;

TEST_CASE("eta0 midpoint, support, symmetry") {
  CHECK(eta0(0.0) == 1.0);
  CHECK(eta0(0.5) == 0.5);
  CHECK(eta0(-0.5) == 0.5);
  CHECK(eta0(1.0) == 0.0);
  CHECK(eta0(-1.0) == 0.0);
  CHECK(eta0(1.7) == 0.0);
  for (double s : {0.15, 0.55, 0.71, 0.93}) {
    CHECK(eta0(s) == eta0(-s));
    CHECK(eta0(s) > 0.0);
    CHECK(eta0(s) < 1.0);
  }
}

TEST_CASE("adjacent shifts sum to one") {
  // At most two shifts overlap and they share the denominator, so the sum is
  // exact up to the rounding of the two divisions.
  const double h = std::ldexp(1.0, -3);
  for (int j = -40; j <= 40; ++j) {
    const double s = j * h;
    double sum = 0;
    for (int k = -6; k <= 6; ++k) sum += eta0(s - k);
    CHECK(std::abs(sum - 1.0) < 1e-14);
  }
}

TEST_CASE("family partition of unity on the covered band") {
  GridPtr g = make_grid(2, 64, 2, 1.0, 2);
  DecompFamily fam = build_family(g, 6);
  PartitionReport rep = partition_residual(fam);
  CHECK(rep.residual < 1e-10);
  // Corners of the own cube sit at eta0(1/2)^n.
  CHECK(rep.cube_min > 0.2);
  CHECK(rep.cube_min <= 1.0);
}

TEST_CASE("build_family rejects an out-of-band radius") {
  GridPtr g = make_grid(2, 32, 2, 1.0, 2);  // nyquist 4
  CHECK_THROWS_AS(build_family(g, 4), std::invalid_argument);
  CHECK_NOTHROW(build_family(g, 2));
}

TEST_CASE("apply_box truncates to the unit cube around k") {
  GridPtr g = make_grid(2, 128, 3, 1.0, 2);
  DecompFamily fam = build_family(g, 4);
  SpaceTimeField f = random_band_limited(g, SupportSpec::ball(3.5), 21);
  const std::array<int, 3> k{2, -1, 0};
  SpaceTimeField box = apply_box(fam, k, f);
  for (std::size_t i = 0; i < box.v.size(); ++i) {
    if (box.v[i] == cplx(0)) continue;
    double xi[2];
    g->freq_at(i, xi);
    CHECK(std::abs(xi[0] - 2.0) < 1.0);
    CHECK(std::abs(xi[1] + 1.0) < 1.0);
  }
}

TEST_CASE("boxes reassemble the field on the covered band") {
  GridPtr g = make_grid(2, 64, 2, 1.0, 2);
  DecompFamily fam = build_family(g, 5);
  SpaceTimeField f = random_band_limited(g, SupportSpec::ball(4.0), 33);
  SpaceTimeField sum = make_field(g, FieldKind::Spatial);
  sum.freq_mask = f.freq_mask;
  for (int k1 = -5; k1 <= 5; ++k1)
    for (int k2 = -5; k2 <= 5; ++k2) {
      SpaceTimeField box = apply_box(fam, {k1, k2, 0}, f);
      for (std::size_t i = 0; i < sum.v.size(); ++i) sum.v[i] += box.v[i];
    }
  double d = 0;
  for (std::size_t i = 0; i < sum.v.size(); ++i) d = std::max(d, std::abs(sum.v[i] - f.v[i]));
  CHECK(d < 1e-12);
}

TEST_CASE("box_multiply_slice agrees with apply_box") {
  GridPtr g = make_grid(2, 32, 2, 1.0, 2);
  DecompFamily fam = build_family(g, 2);
  SpaceTimeField f = random_band_limited(g, SupportSpec::ball(2.0), 5);
  const std::array<int, 3> k{1, -2, 0};
  SpaceTimeField box = apply_box(fam, k, f);
  std::vector<cplx> dst(f.slice(), cplx(0));
  box_multiply_slice(fam, k, f.data(), dst.data());
  for (std::size_t i = 0; i < dst.size(); ++i) CHECK(dst[i] == box.v[i]);

  // The visitor walks the closed index rectangle, so the cube boundary
  // carries weight exactly zero.
  double weight_sum = 0;
  for_box_support(fam, k, [&](std::size_t i, double w) {
    CHECK(w >= 0.0);
    CHECK(w <= 1.0);
    CHECK(std::abs(dst[i] - w * f.v[i]) == 0.0);
    weight_sum += w;
  });
  CHECK(weight_sum > 0);
}

TEST_CASE("angular symbols split the identity") {
  GridPtr g = make_grid(2, 32, 2, 1.0, 2);
  SpaceTimeField f = random_band_limited(g, SupportSpec::ball(3.0), 12);
  SpaceTimeField p1 = apply_angular(f, Angular::P1);
  SpaceTimeField p2 = apply_angular(f, Angular::P2);
  double d = 0;
  for (std::size_t i = 0; i < f.v.size(); ++i)
    d = std::max(d, std::abs(p1.v[i] + p2.v[i] - f.v[i]));
  CHECK(d < 1e-12);

  CHECK(angular_symbol(Angular::P1, 0.0, 0.0) == 1.0);
  CHECK(angular_symbol(Angular::P1, 0.0, 1.0) == 0.0);
  CHECK(angular_symbol(Angular::P1, 1.0, 1.0) == 1.0);   // ratio 1/2
  CHECK(angular_symbol(Angular::P1, 1.0, 4.0) == 0.0);   // ratio 2
  CHECK(angular_symbol(Angular::P2, 1.0, 4.0) == 1.0);
}

TEST_CASE("lp_norm matches l2_norm at p = 2") {
  GridPtr g = make_grid(2, 32, 2, 1.0, 4);
  SpaceTimeField f = random_band_limited_spacetime(g, SupportSpec::ball(2.0), 3);
  fourier_inverse(f);
  CHECK(lp_norm(f, 2.0) == doctest::Approx(l2_norm(f)).epsilon(1e-12));
}

TEST_CASE("bernstein ratio of the identity symbol is one") {
  GridPtr g = make_grid(1, 64, 2, 1.0, 2);
  SpaceTimeField f = random_band_limited(g, SupportSpec::ball(3.0), 8);
  fourier_inverse(f);
  BernsteinResult res = bernstein_apply([](const double*) { return 1.0; }, f, 4.0);
  CHECK(res.ratio == doctest::Approx(1.0).epsilon(1e-12));
  double d = 0;
  for (std::size_t i = 0; i < f.v.size(); ++i) d = std::max(d, std::abs(res.field.v[i] - f.v[i]));
  CHECK(d < 1e-12);
}
