#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>
#include <stdexcept>

#include "doctest.h"
#include "unidec/grid.hpp"
#include "unidec/propagator.hpp"

using namespace unidec;

namespace {

double max_diff(const SpaceTimeField& a, const SpaceTimeField& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
  return m;
}

// Single spatial mode xi with forcing profile e^{i omega t}; the interaction
// integral has the closed form below with p = sum_a eps_a xi_a^2.
cplx exact_duhamel(double t, double p, double omega) {
  const cplx i(0, 1);
  return std::exp(i * t * p) * (std::exp(i * t * (omega - p)) - 1.0) / (i * (omega - p));
}

SpaceTimeField forced_mode(GridPtr g, int bin, double omega) {
  SpaceTimeField f = make_field(g, FieldKind::SpaceTime);
  f.freq_mask = f.full_mask();
  for (int m = 0; m < g->Nt; ++m)
    f.v[(std::size_t)m * g->N + bin] = std::exp(cplx(0, omega * g->t(m)));
  return f;
}

double duhamel_max_error(int Nt) {
  GridPtr g = make_grid(1, 16, 2, 1.0, Nt);
  const int bin = 3;
  const double xi = g->freq(bin), p = xi * xi, omega = 1.3;
  SpaceTimeField f = forced_mode(g, bin, omega);
  SpaceTimeField a = duhamel(f, Exec::Serial);
  double worst = 0;
  for (int m = 0; m < Nt; ++m)
    worst = std::max(worst, std::abs(a.v[(std::size_t)m * 16 + bin] -
                                     exact_duhamel(g->t(m), p, omega)));
  return worst;
}

}  // namespace

TEST_CASE("free evolution: identity at t = 0, unitary, group law") {
  GridPtr g = make_grid(2, 16, 2, 1.0, 4, {1, -1, 1});
  SpaceTimeField u = random_band_limited(g, SupportSpec::ball(1.5), 11);
  CHECK(max_diff(free_evolve(u, 0.0), u) < 1e-15);
  SpaceTimeField ut = free_evolve(u, 0.7);
  CHECK(l2_norm(ut) == doctest::Approx(l2_norm(u)).epsilon(1e-12));
  CHECK(max_diff(free_evolve(ut, -0.4), free_evolve(u, 0.3)) < 1e-12);
}

TEST_CASE("single-mode phase") {
  GridPtr g = make_grid(2, 16, 2, 1.0, 4, {1, -1, 1});
  SpaceTimeField u = make_field(g, FieldKind::Spatial);
  u.freq_mask = u.full_mask();
  const int b0 = 3, b1 = 14;  // xi = (0.75, -0.5)
  u.v[(std::size_t)b0 * 16 + b1] = cplx(1.0, -2.0);
  const double xi0 = g->freq(b0), xi1 = g->freq(b1);
  const double p = xi0 * xi0 - xi1 * xi1;
  const double t = 0.9;
  SpaceTimeField ut = free_evolve(u, t);
  CHECK(std::abs(ut.v[(std::size_t)b0 * 16 + b1] -
                 std::exp(cplx(0, t * p)) * cplx(1.0, -2.0)) < 1e-14);
}

TEST_CASE("evolve_trajectory matches free_evolve slice by slice") {
  GridPtr g = make_grid(2, 16, 2, 1.0, 6);
  SpaceTimeField u0 = random_band_limited(g, SupportSpec::ball(1.5), 21);
  SpaceTimeField traj = evolve_trajectory(u0, Exec::Serial);
  CHECK(traj.kind == FieldKind::SpaceTime);
  for (int m = 0; m < g->Nt; ++m) {
    SpaceTimeField slice = free_evolve(u0, g->t(m));
    for (std::size_t i = 0; i < slice.v.size(); ++i)
      CHECK(std::abs(traj.v[(std::size_t)m * slice.v.size() + i] - slice.v[i]) < 1e-12);
  }
}

TEST_CASE("duhamel vanishes at t = 0 and is linear") {
  GridPtr g = make_grid(1, 16, 2, 1.0, 8);
  SpaceTimeField f = random_band_limited_spacetime(g, SupportSpec::ball(1.5), 4);
  SpaceTimeField h = random_band_limited_spacetime(g, SupportSpec::ball(1.5), 5);
  SpaceTimeField af = duhamel(f, Exec::Serial), ah = duhamel(h, Exec::Serial);
  for (std::size_t i = 0; i < f.slice(); ++i)
    CHECK(std::abs(af.v[(std::size_t)g->t0() * f.slice() + i]) == 0.0);
  SpaceTimeField mix = f;
  const cplx al(0.3, -1.2), be(2.0, 0.5);
  for (std::size_t i = 0; i < mix.v.size(); ++i) mix.v[i] = al * f.v[i] + be * h.v[i];
  SpaceTimeField amix = duhamel(mix, Exec::Serial);
  double worst = 0;
  for (std::size_t i = 0; i < mix.v.size(); ++i)
    worst = std::max(worst, std::abs(amix.v[i] - al * af.v[i] - be * ah.v[i]));
  CHECK(worst < 1e-12);
}

TEST_CASE("duhamel single-mode closed form, second-order in dt") {
  const double e32 = duhamel_max_error(32);
  const double e64 = duhamel_max_error(64);
  const double e128 = duhamel_max_error(128);
  CHECK(e32 < 1e-2);
  CHECK(e32 / e64 == doctest::Approx(4.0).epsilon(0.25));
  CHECK(e64 / e128 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("duhamel needs the t = 0 node") {
  GridPtr g = make_grid(1, 16, 2, 1.0, 9);
  SpaceTimeField f = random_band_limited_spacetime(g, SupportSpec::ball(1.5), 4);
  CHECK_THROWS_AS(duhamel(f, Exec::Serial), std::invalid_argument);
}

TEST_CASE("duhamel_from_left vanishes at the left edge") {
  GridPtr g = make_grid(1, 16, 2, 1.0, 8);
  SpaceTimeField f = random_band_limited_spacetime(g, SupportSpec::ball(1.5), 6);
  SpaceTimeField a = duhamel_from_left(f, Exec::Serial);
  for (std::size_t i = 0; i < f.slice(); ++i) CHECK(std::abs(a.v[i]) == 0.0);
  // and agrees with duhamel up to the free evolution of the t interval
  // [-T, 0] contribution: both solve the same inhomogeneous equation, so the
  // difference is a free trajectory. Check the defect is S(t)-propagated.
  SpaceTimeField d0 = duhamel(f, Exec::Serial);
  SpaceTimeField diff0 = make_field(g, FieldKind::Spatial);
  diff0.freq_mask = diff0.full_mask();
  for (std::size_t i = 0; i < f.slice(); ++i)
    diff0.v[i] = a.v[(std::size_t)g->t0() * f.slice() + i] -
                 d0.v[(std::size_t)g->t0() * f.slice() + i];
  double worst = 0;
  for (int m = 0; m < g->Nt; ++m) {
    SpaceTimeField prop = free_evolve(diff0, g->t(m));
    for (std::size_t i = 0; i < f.slice(); ++i)
      worst = std::max(worst, std::abs((a.v[(std::size_t)m * f.slice() + i] -
                                        d0.v[(std::size_t)m * f.slice() + i]) -
                                       prop.v[i]));
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("wholeline_duhamel matches the hand-built Riemann sum") {
  GridPtr g = make_grid(1, 16, 2, 1.0, 8);
  const int bin = 5;
  const double xi = g->freq(bin), p = xi * xi, omega = 0.8;
  SpaceTimeField f = forced_mode(g, bin, omega);
  SpaceTimeField w = wholeline_duhamel(f, Exec::Serial);
  const cplx i(0, 1);
  cplx big = 0;
  for (int m = 0; m < g->Nt; ++m)
    big += std::exp(-i * g->t(m) * p) * std::exp(i * omega * g->t(m)) * g->dt();
  for (int m = 0; m < g->Nt; ++m) {
    cplx expect = std::exp(i * g->t(m) * p) * big;
    CHECK(std::abs(w.v[(std::size_t)m * 16 + bin] - expect) < 1e-13);
  }
}

TEST_CASE("partial Riesz symbols on single modes") {
  GridPtr g = make_grid(2, 16, 2, 1.0, 2);
  SpaceTimeField u = make_field(g, FieldKind::Spatial);
  u.freq_mask = u.full_mask();
  const int b0 = 3, b1 = 2;  // xi = (0.75, 0.5)
  u.v[(std::size_t)b0 * 16 + b1] = cplx(2.0, 1.0);
  SpaceTimeField r = partial_riesz(u, 0, 0.5);
  CHECK(std::abs(r.v[(std::size_t)b0 * 16 + b1] - std::sqrt(0.75) * cplx(2.0, 1.0)) < 1e-14);
  SpaceTimeField d = partial_derivative(u, 1);
  CHECK(std::abs(d.v[(std::size_t)b0 * 16 + b1] - cplx(0, 0.5) * cplx(2.0, 1.0)) < 1e-14);
}

TEST_CASE("zero-plane handling") {
  GridPtr g = make_grid(2, 16, 2, 1.0, 2);
  SpaceTimeField u = make_field(g, FieldKind::Spatial);
  u.freq_mask = u.full_mask();
  u.v[2] = cplx(1.0, 0.0);  // xi = (0, 0.5): on the xi_0 = 0 plane
  CHECK_THROWS_AS(partial_riesz(u, 0, -0.5), std::domain_error);
  CHECK_THROWS_AS(partial_antiderivative(u, 0), std::domain_error);
  SpaceTimeField z = partial_riesz(u, 0, -0.5, ZeroPlane::Zero);
  CHECK(z.zero_plane_applied);
  CHECK(std::abs(z.v[2]) == 0.0);
  // off the plane in xi_1 the same field is fine
  SpaceTimeField a = partial_antiderivative(u, 1);
  SpaceTimeField back = partial_derivative(a, 1);
  CHECK(max_diff(back, u) < 1e-14);
}
