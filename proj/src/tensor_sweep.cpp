#include "unidec/tensor_sweep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "unidec/decomp.hpp"
#include "unidec/norms.hpp"
#include "unidec/parallel.hpp"
#include "unidec/propagator.hpp"
#include "unidec/rng.hpp"

namespace unidec {
namespace {

constexpr double kPi = 3.14159265358979323846;

int next_pow2(int v) {
  int p = 1;
  while (p < v) p *= 2;
  return p;
}

// Pair of matched 1-D grids (same r, T, Nt, defocusing-free eps = +1) with
// their families; the probed box lives on axis 1, the transverse unit box on
// axis 2.
struct TensorLab {
  GridPtr g1, g2;
  DecompFamily f1, f2;
};

TensorLab make_lab(int k1, const TensorGridSpec& gs) {
  TensorLab lab;
  lab.g1 = make_grid(1, gs.N1, gs.r, gs.T, gs.Nt);
  lab.g2 = make_grid(1, gs.N2, gs.r, gs.T, gs.Nt);
  lab.f1 = build_family(lab.g1, k1 + 1);
  lab.f2 = build_family(lab.g2, 1);
  return lab;
}

struct TensorDatum {
  SpaceTimeField a, b;  // boxed 1-D spectra
  double rhs = 0;       // ||a||_2 ||b||_2
};

// Random coherent datum: a handful of Gaussian-weighted translates of the
// window bump. Independent phases on every node would spread the sample over
// the whole torus, whose length grows with k1, and the packet sweep that the
// maximal norm tracks would wash out of the ensemble.
TensorDatum random_tensor_datum(const TensorLab& lab, int k1,
                                std::uint64_t seed) {
  Rng rng(seed);
  auto fill = [&rng](GridPtr g, const DecompFamily& fam, int center) {
    std::array<cplx, 4> c;
    for (cplx& z : c) z = rng.gaussian_complex();
    auto f = make_field(g, FieldKind::Spatial);
    f.freq_mask = f.full_mask();
    for (int bin = 0; bin < g->N; ++bin) {
      long long off = g->sindex(bin) - static_cast<long long>(center) * fam.half;
      double w = fam.eta_node(off);
      if (w <= 0) continue;
      double u = static_cast<double>(off) / fam.half;  // offset within the box
      cplx z{0.0, 0.0};
      for (std::size_t j = 0; j < c.size(); ++j)
        z += c[j] * std::polar(1.0, -1.5 * static_cast<double>(j) * u);
      f.v[static_cast<std::size_t>(bin)] = w * z;
    }
    return f;
  };
  TensorDatum d;
  auto a0 = fill(lab.g1, lab.f1, k1);
  auto b0 = fill(lab.g2, lab.f2, 0);
  d.a = apply_box(lab.f1, {k1, 0, 0}, a0);
  d.b = apply_box(lab.f2, {0, 0, 0}, b0);
  d.rhs = l2_norm(d.a) * l2_norm(d.b);
  return d;
}

// Spectrum eta_{k1} x eta_0 (boxing squares the windows). The mass moves as
// a coherent packet along x1 = -2 eps_1 k1 t; every probe time -x1/(2 k1)
// with |x1| <= L/2 lies within |t| <= pi, inside the fixed window T = 4.
TensorDatum witness_datum(const TensorLab& lab, int k1) {
  TensorDatum d;
  auto fill = [](GridPtr g, const DecompFamily& fam, int center) {
    auto f = make_field(g, FieldKind::Spatial);
    f.freq_mask = f.full_mask();
    for (int bin = 0; bin < g->N; ++bin) {
      long long off = g->sindex(bin) - static_cast<long long>(center) * fam.half;
      double w = fam.eta_node(off);
      if (w > 0) f.v[static_cast<std::size_t>(bin)] = w;
    }
    return f;
  };
  auto a0 = fill(lab.g1, lab.f1, k1);
  auto b0 = fill(lab.g2, lab.f2, 0);
  d.a = apply_box(lab.f1, {k1, 0, 0}, a0);
  d.b = apply_box(lab.f2, {0, 0, 0}, b0);
  d.rhs = l2_norm(d.a) * l2_norm(d.b);
  return d;
}

// ( sum_{x1} [ max_m |S1(t_m) a (x1)| h(t_m) ]^q dx1 )^{1/q} with
// h(t) = max_{x2} |S2(t) b (x2)|, streamed slice by slice with a running
// maximum per x1 node. Never holds more than two spatial slices.
double stream_max_norm(const SpaceTimeField& a, const SpaceTimeField& b,
                       double q, Exec exec) {
  const Grid& g1 = *a.g;
  const Grid& g2 = *b.g;
  if (!a.frequency() || !b.frequency() || a.kind != FieldKind::Spatial ||
      b.kind != FieldKind::Spatial || g1.n != 1 || g2.n != 1)
    throw std::invalid_argument("stream_max_norm wants 1-D spatial spectra");
  if (g1.Nt != g2.Nt || g1.T != g2.T)
    throw std::invalid_argument("tensor factors must share the time grid");
  const int N1 = g1.N, N2 = g2.N, Nt = g1.Nt;
  const double s1 = g1.dxi / std::sqrt(2.0 * kPi);
  const double s2 = g2.dxi / std::sqrt(2.0 * kPi);

  // support-node lists: the evolved phase is applied on these only
  std::vector<int> sup1, sup2;
  for (int j = 0; j < N1; ++j)
    if (a.v[static_cast<std::size_t>(j)] != cplx{0.0, 0.0}) sup1.push_back(j);
  for (int j = 0; j < N2; ++j)
    if (b.v[static_cast<std::size_t>(j)] != cplx{0.0, 0.0}) sup2.push_back(j);

  int P = exec == Exec::Parallel ? max_threads() : 1;
  P = std::max(1, std::min(P, Nt));
  std::vector<std::vector<double>> accs(
      static_cast<std::size_t>(P), std::vector<double>(N1, 0.0));

  parallel_for(P, exec, [&](std::int64_t p) {
    std::vector<cplx> buf1(N1), buf2(N2),
        scratch(static_cast<std::size_t>(std::max(N1, N2)));
    std::vector<double>& acc = accs[static_cast<std::size_t>(p)];
    const int m0 = static_cast<int>(Nt * p / P);
    const int m1 = static_cast<int>(Nt * (p + 1) / P);
    for (int m = m0; m < m1; ++m) {
      const double t = g1.t(m);
      std::fill(buf1.begin(), buf1.end(), cplx{0.0, 0.0});
      for (int j : sup1) {
        double xi = g1.freq(j);
        buf1[static_cast<std::size_t>(j)] =
            a.v[static_cast<std::size_t>(j)] *
            std::polar(1.0, t * g1.eps[0] * xi * xi);
      }
      g1.fft->line(buf1.data(), 1, true, s1, scratch.data());
      std::fill(buf2.begin(), buf2.end(), cplx{0.0, 0.0});
      for (int j : sup2) {
        double xi = g2.freq(j);
        buf2[static_cast<std::size_t>(j)] =
            b.v[static_cast<std::size_t>(j)] *
            std::polar(1.0, t * g2.eps[0] * xi * xi);
      }
      g2.fft->line(buf2.data(), 1, true, s2, scratch.data());
      double h = 0;
      for (const cplx& c : buf2) h = std::max(h, std::abs(c));
      for (int j = 0; j < N1; ++j) {
        double v = std::abs(buf1[static_cast<std::size_t>(j)]) * h;
        if (v > acc[static_cast<std::size_t>(j)]) acc[static_cast<std::size_t>(j)] = v;
      }
    }
  });

  std::vector<double>& acc = accs[0];
  for (int p = 1; p < P; ++p)
    for (int j = 0; j < N1; ++j)
      acc[static_cast<std::size_t>(j)] =
          std::max(acc[static_cast<std::size_t>(j)],
                   accs[static_cast<std::size_t>(p)][static_cast<std::size_t>(j)]);

  if (!std::isfinite(q)) return *std::max_element(acc.begin(), acc.end());
  double s = 0;
  for (double v : acc) s += std::pow(v, q);
  return std::pow(s * g1.dx(), 1.0 / q);
}

}  // namespace

TensorGridSpec tensor_grid_for(int k1) {
  if (k1 < 2) throw std::invalid_argument("tensor sweep wants k1 >= 2");
  int r = 2;
  while ((1 << r) < 2 * k1) ++r;
  const int half = 1 << r;
  TensorGridSpec s;
  s.r = r;
  s.N1 = next_pow2(2 * (k1 + 2) * half);
  s.N2 = next_pow2(4 * half);
  s.T = 4;
  // dt <= 1/(4 k1): the phase across the unit box drifts by at most half a
  // radian between consecutive slices, so the grid maximum tracks sup_t.
  s.Nt = next_pow2(static_cast<int>(std::lround(8 * s.T * k1)));
  return s;
}

MaxSweepPoint max_tensor_point(int k1, double q, int nsamples,
                               std::uint64_t seed) {
  if (nsamples < 1) throw std::invalid_argument("need at least one sample");
  const TensorGridSpec gs = tensor_grid_for(k1);
  const TensorLab lab = make_lab(k1, gs);
  MaxSweepPoint pt;
  pt.k1 = k1;
  pt.q = q;
  pt.nsamples = nsamples;
  for (int s = 0; s < nsamples; ++s) {
    TensorDatum d =
        random_tensor_datum(lab, k1, seed + 1099511628211ull * static_cast<std::uint64_t>(s));
    double lhs = stream_max_norm(d.a, d.b, q, Exec::Parallel) / d.rhs;
    pt.lhs_mean += lhs;
    pt.lhs_max = std::max(pt.lhs_max, lhs);
  }
  pt.lhs_mean /= nsamples;
  return pt;
}

std::vector<MaxSweepPoint> max_tensor_run(const std::vector<int>& k1s, double q,
                                          int nsamples, std::uint64_t seed) {
  std::vector<MaxSweepPoint> out;
  out.reserve(k1s.size());
  for (int k1 : k1s) out.push_back(max_tensor_point(k1, q, nsamples, seed));
  return out;
}

double max_tensor_custom(int k1, double q, const TensorGridSpec& gs,
                         std::uint64_t seed) {
  const TensorLab lab = make_lab(k1, gs);
  TensorDatum d = random_tensor_datum(lab, k1, seed);
  return stream_max_norm(d.a, d.b, q, Exec::Parallel) / d.rhs;
}

double max_generic_2d(int k1, double q, const TensorGridSpec& gs,
                      std::uint64_t seed) {
  if (gs.N1 != gs.N2)
    throw std::invalid_argument("the 2-D cross-check needs N1 == N2");
  const TensorLab lab = make_lab(k1, gs);
  TensorDatum d = random_tensor_datum(lab, k1, seed);

  GridPtr g = make_grid(2, gs.N1, gs.r, gs.T, gs.Nt);
  auto u0 = make_field(g, FieldKind::Spatial);
  u0.freq_mask = u0.full_mask();
  const std::size_t N = static_cast<std::size_t>(gs.N1);
  for (std::size_t i = 0; i < N; ++i) {
    const cplx ai = d.a.v[i];
    if (ai == cplx{0.0, 0.0}) continue;
    for (std::size_t j = 0; j < N; ++j) u0.v[i * N + j] = ai * d.b.v[j];
  }
  const double rhs = l2_norm(u0);
  auto traj = evolve_trajectory(u0, Exec::Serial);
  fourier_inverse(traj, Exec::Serial);
  const double inf = std::numeric_limits<double>::infinity();
  return mixed_norm(traj, MixedNormSpec::aniso3(0, q, inf, inf)) / rhs;
}

double sharpness_witness(int k1, double q) {
  if (!(q > 0) || !std::isfinite(q))
    throw std::invalid_argument("sharpness witness wants finite positive q");
  const TensorGridSpec gs = tensor_grid_for(k1);
  const TensorLab lab = make_lab(k1, gs);
  TensorDatum d = witness_datum(lab, k1);
  double lhs = stream_max_norm(d.a, d.b, q, Exec::Parallel);
  return std::pow(lhs, q);
}

}  // namespace unidec
