#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "unidec/decomp.hpp"
#include "unidec/grid.hpp"
#include "unidec/norms.hpp"
#include "unidec/propagator.hpp"

using namespace unidec;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double reduce(std::vector<double> vals, double p, double w) {
  if (std::isinf(p)) {
    double m = 0;
    for (double v : vals) m = std::max(m, v);
    return m;
  }
  double acc = 0;
  for (double v : vals) acc += std::pow(v, p) * w;
  return std::pow(acc, 1.0 / p);
}

// Straight-line reimplementation of the three reduction orders on a tiny
// grid, kept independent of the library loops.
double oracle_norm(const SpaceTimeField& f, const MixedNormSpec& spec) {
  const Grid& g = *f.g;
  const int N = g.N, nt = f.nt();
  const double dx = g.dx(), dt = f.kind == FieldKind::SpaceTime ? g.dt() : 1.0;
  auto at = [&](int m, int i, int j) { return std::abs(f.v[(std::size_t)m * N * N + (std::size_t)i * N + j]); };

  if (spec.kind == MixedNormSpec::Kind::Joint) {
    std::vector<double> all;
    for (int m = 0; m < nt; ++m)
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) all.push_back(at(m, i, j));
    return reduce(all, spec.p1, dt * dx * dx);
  }
  if (spec.kind == MixedNormSpec::Kind::TimeOuter) {
    std::vector<double> per_t;
    for (int m = 0; m < nt; ++m) {
      std::vector<double> sp;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) sp.push_back(at(m, i, j));
      per_t.push_back(reduce(sp, spec.p2, dx * dx));
    }
    return reduce(per_t, spec.p1, dt);
  }
  // axis-outer: time innermost, other spatial axis middle
  std::vector<double> outer;
  for (int c = 0; c < N; ++c) {
    std::vector<double> mid;
    for (int o = 0; o < N; ++o) {
      std::vector<double> tt;
      for (int m = 0; m < nt; ++m) tt.push_back(spec.axis == 0 ? at(m, c, o) : at(m, o, c));
      mid.push_back(reduce(tt, spec.p3, dt));
    }
    outer.push_back(reduce(mid, spec.p2, dx));
  }
  return reduce(outer, spec.p1, dx);
}

SpaceTimeField physical_sample(GridPtr g, std::uint64_t seed) {
  SpaceTimeField f = random_band_limited_spacetime(g, SupportSpec::ball(1.5), seed);
  fourier_inverse(f);
  return f;
}

}  // namespace

TEST_CASE("mixed_norm agrees with the naive reductions") {
  GridPtr g = make_grid(2, 4, 2, 1.0, 2);
  SpaceTimeField f = physical_sample(g, 77);
  const MixedNormSpec specs[] = {
      MixedNormSpec::joint(2),
      MixedNormSpec::joint(3.5),
      MixedNormSpec::time_outer(4, 2),
      MixedNormSpec::time_outer(kInf, 2),
      MixedNormSpec::aniso(0, kInf, 2),
      MixedNormSpec::aniso(1, 1, 2),
      MixedNormSpec::aniso3(0, 4, kInf, kInf),
      MixedNormSpec::aniso3(1, 6, kInf, 2),
      MixedNormSpec::aniso3(0, 2, 2, 2),
  };
  for (const MixedNormSpec& s : specs) {
    CHECK(mixed_norm(f, s) == doctest::Approx(oracle_norm(f, s)).epsilon(1e-12));
  }
  // all-2 exponents collapse to the weighted l2 norm
  CHECK(mixed_norm(f, MixedNormSpec::aniso3(0, 2, 2, 2)) ==
        doctest::Approx(l2_norm(f)).epsilon(1e-12));
}

TEST_CASE("mixed_norm requires the physical representation") {
  GridPtr g = make_grid(2, 4, 2, 1.0, 2);
  SpaceTimeField f = random_band_limited_spacetime(g, SupportSpec::ball(1.0), 3);
  CHECK_THROWS_AS(mixed_norm(f, MixedNormSpec::joint(2)), std::invalid_argument);
}

TEST_CASE("homogeneity and triangle inequality") {
  GridPtr g = make_grid(2, 8, 2, 1.0, 4);
  SpaceTimeField f = physical_sample(g, 5);
  SpaceTimeField h = physical_sample(g, 6);
  SpaceTimeField sum = f;
  for (std::size_t i = 0; i < sum.v.size(); ++i) sum.v[i] += h.v[i];
  SpaceTimeField scaled = f;
  for (cplx& z : scaled.v) z *= cplx(-2.5, 1.0);
  const double c = std::abs(cplx(-2.5, 1.0));
  for (const MixedNormSpec& s :
       {MixedNormSpec::joint(3), MixedNormSpec::time_outer(4, 2), MixedNormSpec::aniso(0, kInf, 2),
        MixedNormSpec::aniso3(1, 4, kInf, 2)}) {
    const double nf = mixed_norm(f, s), nh = mixed_norm(h, s);
    CHECK(mixed_norm(scaled, s) == doctest::Approx(c * nf).epsilon(1e-12));
    CHECK(mixed_norm(sum, s) <= nf + nh + 1e-12);
  }
}

TEST_CASE("bracket weights") {
  CHECK(bracket({3, 4, 0}, 2) == 6.0);
  CHECK(bracket({0, 0, 0}, 2) == 1.0);
  CHECK(bracket_axis(-7) == 8.0);
  CHECK(bracket_axis(0) == 1.0);
}

TEST_CASE("modulation norm bounds and the sup embedding") {
  GridPtr g = make_grid(2, 64, 2, 1.0, 2);
  DecompFamily fam = build_family(g, 6);
  SpaceTimeField f = random_band_limited(g, SupportSpec::ball(5.0), 19);
  const double mod0 = modulation_norm(f, 0.0, fam);
  CHECK(mod0 >= l2_norm(f) - 1e-12);
  CHECK(mod0 <= std::pow(4.0, 2) * l2_norm(f));

  const double sharp = modulation_norm_sharp(f, 0.5, fam);
  const double smooth = modulation_norm(f, 0.5, fam);
  CHECK(sharp / smooth > 0.25);
  CHECK(sharp / smooth < 4.0);

  SpaceTimeField phys = f;
  fourier_inverse(phys);
  double sup = 0;
  for (const cplx& z : phys.v) sup = std::max(sup, std::abs(z));
  CHECK(sup <= 0.5 * mod0);
}

TEST_CASE("besov shells are exact on single modes") {
  GridPtr g = make_grid(2, 32, 2, 1.0, 2);
  SpaceTimeField f = make_field(g, FieldKind::Spatial);
  f.freq_mask = f.full_mask();
  // |xi| = 3 lands in the shell (2, 4], weight 2^{2s}
  const int b0 = 12;  // bin of xi_0 = 3 at dxi = 1/4
  f.v[(std::size_t)b0 * 32 + 0] = cplx(2.0, -1.0);
  const double s = 0.75;
  CHECK(besov_norm(f, s) == doctest::Approx(std::pow(2.0, 2 * s) * l2_norm(f)).epsilon(1e-12));
  // and in the core block for a low mode
  SpaceTimeField low = make_field(g, FieldKind::Spatial);
  low.freq_mask = low.full_mask();
  low.v[2] = cplx(1.0, 1.0);  // xi = (0, 1/2)
  CHECK(besov_norm(low, s) == doctest::Approx(l2_norm(low)).epsilon(1e-12));
}

TEST_CASE("box_sum_norm matches the naive family loop") {
  GridPtr g = make_grid(2, 32, 2, 1.0, 4);
  const int K = 2;
  DecompFamily fam = build_family(g, K);
  SpaceTimeField u = random_band_limited_spacetime(g, SupportSpec::ball(1.5), 23);
  fourier_inverse(u);

  BoxTermSpec term;
  term.s = 0.5;
  term.weight = BoxTermSpec::Weight::K;
  term.inner = {MixedNormSpec::time_outer(kInf, 2)};
  const double got = box_sum_norm(u, fam, term, Exec::Serial);

  SpaceTimeField uhat = u;
  fourier_forward(uhat);
  double expect = 0;
  for (int k1 = -K; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2) {
      SpaceTimeField box = apply_box(fam, {k1, k2, 0}, uhat);
      fourier_inverse(box);
      expect += std::pow(bracket({k1, k2, 0}, 2), 0.5) *
                mixed_norm(box, MixedNormSpec::time_outer(kInf, 2));
    }
  CHECK(got == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("box_sum_norm options: axis weight, restriction, inner max") {
  GridPtr g = make_grid(2, 64, 2, 1.0, 4);
  const int K = 6;
  DecompFamily fam = build_family(g, K);
  SpaceTimeField u = random_band_limited_spacetime(g, SupportSpec::ball(5.5), 29);
  fourier_inverse(u);

  BoxTermSpec term;
  term.s = 1.0;
  term.weight = BoxTermSpec::Weight::Ki;
  term.weight_axis = 1;
  term.restrict_ki = true;
  term.inner = {MixedNormSpec::aniso(1, kInf, 2), MixedNormSpec::joint(2)};
  const double got = box_sum_norm(u, fam, term, Exec::Serial);

  SpaceTimeField uhat = u;
  fourier_forward(uhat);
  double expect = 0;
  for (int k1 = -K; k1 <= K; ++k1)
    for (int k2 = -K; k2 <= K; ++k2) {
      if (std::abs(k2) <= 4) continue;
      SpaceTimeField box = apply_box(fam, {k1, k2, 0}, uhat);
      fourier_inverse(box);
      const double inner = std::max(mixed_norm(box, MixedNormSpec::aniso(1, kInf, 2)),
                                    mixed_norm(box, MixedNormSpec::joint(2)));
      expect += bracket_axis(k2) * inner;
    }
  CHECK(got == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("working norm is the sum of its components") {
  GridPtr g = make_grid(2, 32, 2, 1.0, 4);
  DecompFamily fam = build_family(g, 2);
  SpaceTimeField u0 = random_band_limited(g, SupportSpec::ball(1.5), 31);
  SpaceTimeField u = evolve_trajectory(u0);
  fourier_inverse(u);

  WorkingNormSpec spec = WorkingNormSpec::X1(2, 3.0);
  WorkingNormResult res = working_norm(u, fam, spec, Exec::Serial);
  CHECK(res.components.size() == spec.components.size());
  double total = 0;
  for (double c : res.components) total += c;
  CHECK(res.total == doctest::Approx(total).epsilon(1e-12));
  for (std::size_t c = 0; c < spec.components.size(); ++c) {
    CHECK(res.components[c] ==
          doctest::Approx(box_sum_norm(u, fam, spec.components[c], Exec::Serial)).epsilon(1e-10));
  }
  // X and Y variants stay finite and ordered: X adds derivative terms on X1
  WorkingNormResult rx = working_norm(u, fam, WorkingNormSpec::X(2, 3.0), Exec::Serial);
  CHECK(rx.total >= res.total - 1e-12);
  CHECK(std::isfinite(working_norm(u, fam, WorkingNormSpec::Y1(2), Exec::Serial).total));
}
