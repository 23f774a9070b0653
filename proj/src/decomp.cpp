#include "unidec/decomp.hpp"

#include <cmath>
#include <stdexcept>

namespace unidec {

static double bexp(double x) { return x > 0 ? std::exp(-1.0 / x) : 0.0; }

double smooth_step(double u) {
  double a = bexp(u), b = bexp(1.0 - u);
  return a == 0.0 ? 0.0 : a / (a + b);
}

double bump_rho(double s) { return smooth_step(2.0 - 2.0 * std::abs(s)); }

double eta0(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  double num = bump_rho(s);
  // neighbours within support distance 1
  double den = num + bump_rho(s - 1.0) + bump_rho(s + 1.0);
  return num / den;
}

DecompFamily build_family(GridPtr g, int K) {
  if (K < 0) throw std::invalid_argument("family needs K >= 0");
  double margin = std::ceil(std::sqrt(static_cast<double>(g->n)));
  if (K + margin > g->nyquist())
    throw std::invalid_argument("family range exceeds the frequency band");
  DecompFamily fam;
  fam.K = K;
  fam.half = 1 << g->r;
  fam.table.resize(2 * fam.half + 1);
  for (int j = -fam.half; j <= fam.half; ++j)
    fam.table[j + fam.half] = eta0(j * g->dxi);
  fam.g = std::move(g);
  return fam;
}

// Iterate the support nodes of box k: per axis the signed node offsets within
// distance < 1 of k_a, intersected with the grid band.
namespace {
struct SupportRange {
  int lo[3], hi[3];  // signed node indices per axis, inclusive
  int n;
};

SupportRange support_range(const DecompFamily& fam,
                           const std::array<int, 3>& k) {
  const Grid& g = *fam.g;
  SupportRange r{};
  r.n = g.n;
  for (int a = 0; a < g.n; ++a) {
    long long c = static_cast<long long>(k[a]) * (1LL << g.r);
    long long lo = c - fam.half, hi = c + fam.half;
    if (lo < -g.N / 2) lo = -g.N / 2;
    if (hi > g.N / 2 - 1) hi = g.N / 2 - 1;
    r.lo[a] = static_cast<int>(lo);
    r.hi[a] = static_cast<int>(hi);
  }
  return r;
}

template <class F>
void for_support(const DecompFamily& fam, const std::array<int, 3>& k, F&& f) {
  const Grid& g = *fam.g;
  SupportRange r = support_range(fam, k);
  int idx[3] = {0, 0, 0};
  std::size_t nloops = 1;
  for (int a = 0; a < g.n; ++a) {
    if (r.lo[a] > r.hi[a]) return;
    nloops *= static_cast<std::size_t>(r.hi[a] - r.lo[a] + 1);
    idx[a] = r.lo[a];
  }
  for (std::size_t c = 0; c < nloops; ++c) {
    std::size_t flat = 0;
    double w = 1.0;
    for (int a = 0; a < g.n; ++a) {
      int bin = idx[a] < 0 ? idx[a] + g.N : idx[a];
      flat += static_cast<std::size_t>(bin) * g.stride(a);
      w *= fam.eta_node(idx[a] - static_cast<long long>(k[a]) * (1LL << g.r));
    }
    f(flat, w);
    for (int a = g.n - 1; a >= 0; --a) {
      if (++idx[a] <= r.hi[a]) break;
      idx[a] = r.lo[a];
    }
  }
}
}  // namespace

void for_box_support(const DecompFamily& fam, const std::array<int, 3>& k,
                     const std::function<void(std::size_t, double)>& fn) {
  for_support(fam, k, fn);
}

void box_multiply_slice(const DecompFamily& fam, const std::array<int, 3>& k,
                        const cplx* src, cplx* dst) {
  for_support(fam, k, [&](std::size_t flat, double w) {
    cplx z = src[flat] * w;
    if (std::abs(z.real()) < 1e-300 && std::abs(z.imag()) < 1e-300) z = 0.0;
    dst[flat] = z;
  });
}

SpaceTimeField apply_box(const DecompFamily& fam, const std::array<int, 3>& k,
                         const SpaceTimeField& fhat) {
  if (!fhat.frequency())
    throw std::invalid_argument("apply_box expects a frequency-side field");
  SpaceTimeField out = make_field(fhat.g, fhat.kind);
  out.freq_mask = fhat.freq_mask;
  out.zero_plane_applied = fhat.zero_plane_applied;
  for (int m = 0; m < fhat.nt(); ++m)
    box_multiply_slice(fam, k, fhat.data(m), out.data(m));
  return out;
}

PartitionReport partition_residual(const DecompFamily& fam) {
  const Grid& g = *fam.g;
  const std::size_t nx = static_cast<std::size_t>(g.nx());
  std::vector<double> acc(nx, 0.0);
  std::array<int, 3> k{0, 0, 0};
  int idx[3];
  for (int a = 0; a < g.n; ++a) idx[a] = -fam.K;
  while (true) {
    for (int a = 0; a < g.n; ++a) k[a] = idx[a];
    for_support(fam, k, [&](std::size_t flat, double w) { acc[flat] += w; });
    int a = g.n - 1;
    for (; a >= 0; --a) {
      if (++idx[a] <= fam.K) break;
      idx[a] = -fam.K;
    }
    if (a < 0) break;
  }
  PartitionReport rep;
  double xi[3];
  for (std::size_t i = 0; i < nx; ++i) {
    g.freq_at(i, xi);
    bool interior = true;
    for (int a = 0; a < g.n; ++a)
      if (std::abs(xi[a]) > fam.K - 1.0) interior = false;
    if (interior) {
      double res = std::abs(acc[i] - 1.0);
      if (res > rep.residual) rep.residual = res;
    }
  }
  // measured lower bound of sigma_k over its own cube, by translation
  // invariance identical for every k; sample k = 0.
  std::array<int, 3> k0{0, 0, 0};
  rep.cube_min = 1.0;
  for (std::size_t i = 0; i < nx; ++i) {
    g.freq_at(i, xi);
    bool in_cube = true;
    for (int a = 0; a < g.n; ++a)
      if (!(xi[a] >= -0.5 && xi[a] < 0.5)) in_cube = false;
    if (in_cube) rep.cube_min = std::min(rep.cube_min, fam.sigma(k0, i));
  }
  return rep;
}

double angular_symbol(Angular which, double xi1, double xi2) {
  double p1;
  if (xi1 == 0.0)
    p1 = xi2 == 0.0 ? 1.0 : 0.0;
  else {
    double u = std::abs(xi2 / (2.0 * xi1));
    // psi(u) = 1 on [0,1], 0 on [2, inf)
    p1 = smooth_step(2.0 - u);
  }
  return which == Angular::P1 ? p1 : 1.0 - p1;
}

SpaceTimeField apply_angular(const SpaceTimeField& fhat, Angular which) {
  if (fhat.g->n < 2)
    throw std::invalid_argument("angular projectors need n >= 2");
  SpaceTimeField out = fhat;
  multiply_symbol(out, [which](const double* xi) {
    return cplx{angular_symbol(which, xi[0], xi[1]), 0.0};
  });
  return out;
}

void multiply_symbol(SpaceTimeField& fhat,
                     const std::function<cplx(const double*)>& sym,
                     Exec exec) {
  if (!fhat.frequency())
    throw std::invalid_argument("multiplier expects a frequency-side field");
  const Grid& g = *fhat.g;
  const std::size_t nx = fhat.slice();
  std::vector<cplx> symv(nx);
  parallel_for(static_cast<std::int64_t>(nx), exec, [&](std::int64_t i) {
    double xi[3];
    g.freq_at(static_cast<std::size_t>(i), xi);
    symv[static_cast<std::size_t>(i)] = sym(xi);
  });
  for (int m = 0; m < fhat.nt(); ++m) {
    cplx* s = fhat.data(m);
    for (std::size_t i = 0; i < nx; ++i) s[i] *= symv[i];
  }
}

double lp_norm(const SpaceTimeField& f, double p) {
  if (!f.physical())
    throw std::invalid_argument("lp_norm expects a physical field");
  const Grid& g = *f.g;
  double w = 1.0;
  for (int a = 0; a < g.n; ++a) w *= g.dx();
  if (f.kind == FieldKind::SpaceTime) w *= g.dt();
  if (std::isinf(p)) {
    double m = 0;
    for (const cplx& z : f.v) m = std::max(m, std::abs(z));
    return m;
  }
  double s = 0;
  for (const cplx& z : f.v) s += std::pow(std::abs(z), p);
  return std::pow(s * w, 1.0 / p);
}

BernsteinResult bernstein_apply(const std::function<double(const double*)>& phi,
                                const SpaceTimeField& f, double r) {
  if (!f.physical())
    throw std::invalid_argument("bernstein_apply expects a physical field");
  SpaceTimeField out = f;
  std::vector<int> axes;
  for (int a = 0; a < f.g->n; ++a) axes.push_back(a);
  fourier_forward_axes(out, axes);
  multiply_symbol(out, [&phi](const double* xi) { return cplx{phi(xi), 0.0}; });
  fourier_inverse_axes(out, axes);
  BernsteinResult res{std::move(out), 0.0};
  double den = lp_norm(f, r);
  if (den > 0) res.ratio = lp_norm(res.field, r) / den;
  return res;
}

}  // namespace unidec
