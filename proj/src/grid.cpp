#include "unidec/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "unidec/rng.hpp"

namespace unidec {

static bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

GridPtr make_grid(int n, int N, int r, double T, int Nt,
                  std::array<int, 3> eps) {
  if (n < 1 || n > 3) throw std::invalid_argument("spatial dimension must be 1..3");
  if (!power_of_two(N)) throw std::invalid_argument("N must be a power of two");
  if (r < 2) throw std::invalid_argument("frequency spacing exponent r must be >= 2");
  if (!(T > 0)) throw std::invalid_argument("time half-width must be positive");
  if (Nt < 2) throw std::invalid_argument("need at least two time samples");
  for (int a = 0; a < n; ++a)
    if (eps[a] != 1 && eps[a] != -1)
      throw std::invalid_argument("phase signature entries must be +1 or -1");
  auto g = std::make_shared<Grid>();
  g->n = n;
  g->N = N;
  g->r = r;
  g->T = T;
  g->Nt = Nt;
  g->eps = eps;
  g->dxi = std::ldexp(1.0, -r);
  g->L = 2.0 * 3.14159265358979323846 / g->dxi;
  g->fft = std::make_shared<Fft>(N);
  return g;
}

SpaceTimeField make_field(GridPtr g, FieldKind kind) {
  SpaceTimeField f;
  f.g = std::move(g);
  f.kind = kind;
  f.v.assign(f.total(), cplx{0.0, 0.0});
  return f;
}

// One spatial axis, all lines (time slices included).
static void transform_axis(SpaceTimeField& f, int axis, bool forward,
                           Exec exec) {
  const Grid& g = *f.g;
  const int N = g.N;
  const std::size_t stride = g.stride(axis);
  const std::size_t block = stride * N;
  const std::size_t total = f.total();
  const std::size_t lines = total / N;
  const double scale = forward ? g.dx() / std::sqrt(2.0 * 3.14159265358979323846)
                               : g.dxi / std::sqrt(2.0 * 3.14159265358979323846);
  const Fft& fft = *g.fft;
  cplx* base = f.v.data();
  parallel_for(static_cast<std::int64_t>(lines), exec, [&](std::int64_t lid) {
    thread_local std::vector<cplx> scratch;
    if (scratch.size() < static_cast<std::size_t>(N)) scratch.resize(N);
    std::size_t chunk = static_cast<std::size_t>(lid) / stride;
    std::size_t off = static_cast<std::size_t>(lid) % stride;
    fft.line(base + chunk * block + off, stride, !forward, scale,
             scratch.data());
  });
}

static void transform_axes(SpaceTimeField& f, const std::vector<int>& axes,
                           bool forward, Exec exec) {
  for (int a : axes) {
    if (a < 0 || a >= f.g->n) throw std::invalid_argument("axis out of range");
    unsigned bit = 1u << a;
    if (forward && (f.freq_mask & bit))
      throw std::invalid_argument("axis already in frequency representation");
    if (!forward && !(f.freq_mask & bit))
      throw std::invalid_argument("axis already in physical representation");
    transform_axis(f, a, forward, exec);
    f.freq_mask ^= bit;
  }
}

void fourier_forward_axes(SpaceTimeField& f, const std::vector<int>& axes,
                          Exec exec) {
  transform_axes(f, axes, true, exec);
}

void fourier_inverse_axes(SpaceTimeField& f, const std::vector<int>& axes,
                          Exec exec) {
  transform_axes(f, axes, false, exec);
}

static std::vector<int> all_axes(const Grid& g) {
  std::vector<int> a(g.n);
  for (int i = 0; i < g.n; ++i) a[i] = i;
  return a;
}

void fourier_forward(SpaceTimeField& f, Exec exec) {
  if (!f.physical())
    throw std::invalid_argument("forward transform expects a physical field");
  transform_axes(f, all_axes(*f.g), true, exec);
}

void fourier_inverse(SpaceTimeField& f, Exec exec) {
  if (!f.frequency())
    throw std::invalid_argument("inverse transform expects a frequency field");
  transform_axes(f, all_axes(*f.g), false, exec);
}

double l2_weight(const SpaceTimeField& f) {
  const Grid& g = *f.g;
  double w = 1.0;
  for (int a = 0; a < g.n; ++a) w *= (f.freq_mask & (1u << a)) ? g.dxi : g.dx();
  if (f.kind == FieldKind::SpaceTime) w *= g.dt();
  return w;
}

double l2_norm(const SpaceTimeField& f) {
  double s = 0;
  for (const cplx& z : f.v) s += std::norm(z);
  return std::sqrt(s * l2_weight(f));
}

static void fill_band_limited(SpaceTimeField& f, const SupportSpec& spec,
                              std::uint64_t seed) {
  const Grid& g = *f.g;
  Rng rng(seed);
  const std::size_t nx = f.slice();
  double xi[3];
  for (int m = 0; m < f.nt(); ++m) {
    cplx* s = f.data(m);
    for (std::size_t i = 0; i < nx; ++i) {
      g.freq_at(i, xi);
      if (spec.contains(xi, g.n)) s[i] = rng.gaussian_complex();
    }
  }
  double nrm = l2_norm(f);
  if (nrm == 0.0) throw std::invalid_argument("support contains no grid nodes");
  for (cplx& z : f.v) z /= nrm;
}

SpaceTimeField random_band_limited(GridPtr g, const SupportSpec& s,
                                   std::uint64_t seed) {
  SpaceTimeField f = make_field(std::move(g), FieldKind::Spatial);
  f.freq_mask = f.full_mask();
  fill_band_limited(f, s, seed);
  return f;
}

SpaceTimeField random_band_limited_spacetime(GridPtr g, const SupportSpec& s,
                                             std::uint64_t seed) {
  SpaceTimeField f = make_field(std::move(g), FieldKind::SpaceTime);
  f.freq_mask = f.full_mask();
  fill_band_limited(f, s, seed);
  return f;
}

SpaceTimeField regrid_spectrum(const SpaceTimeField& fhat, GridPtr dst) {
  const Grid& a = *fhat.g;
  const Grid& b = *dst;
  if (!fhat.frequency())
    throw std::invalid_argument("regrid_spectrum expects a frequency field");
  if (a.n != b.n || a.r != b.r || a.Nt != b.Nt || a.T != b.T || a.eps != b.eps)
    throw std::invalid_argument("regrid_spectrum grids must share n, r, Nt, T, eps");
  SpaceTimeField out = make_field(dst, fhat.kind);
  out.freq_mask = out.full_mask();
  out.zero_plane_applied = fhat.zero_plane_applied;
  const int n = a.n;
  const int hs = std::min(a.N, b.N) / 2;  // common signed bins are [-hs, hs)
  std::vector<int> sidx(n, -hs);
  const std::size_t nxb = static_cast<std::size_t>(b.nx());
  for (;;) {
    std::size_t fa = 0, fb = 0;
    for (int c = 0; c < n; ++c) {
      int bin_a = sidx[c] >= 0 ? sidx[c] : sidx[c] + a.N;
      int bin_b = sidx[c] >= 0 ? sidx[c] : sidx[c] + b.N;
      fa += static_cast<std::size_t>(bin_a) * a.stride(c);
      fb += static_cast<std::size_t>(bin_b) * b.stride(c);
    }
    for (int m = 0; m < fhat.nt(); ++m)
      out.v[static_cast<std::size_t>(m) * nxb + fb] = fhat.data(m)[fa];
    int c = n - 1;
    while (c >= 0 && ++sidx[c] >= hs) sidx[c--] = -hs;
    if (c < 0) break;
  }
  return out;
}

}  // namespace unidec
