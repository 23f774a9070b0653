#pragma once
#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "unidec/fft.hpp"
#include "unidec/parallel.hpp"

namespace unidec {

struct Grid;
using GridPtr = std::shared_ptr<const Grid>;

// Discrete torus [0, L)^n with L = 2*pi/dxi, frequency nodes xi = dxi * m for
// signed m in [-N/2, N/2), and time nodes t_m = -T + 2T m/Nt on [-T, T).
// Even Nt places t = 0 exactly at m = Nt/2.
struct Grid {
  int n = 1;
  int N = 0;
  int r = 0;
  double T = 0;
  int Nt = 0;
  std::array<int, 3> eps{1, 1, 1};
  double dxi = 0;
  double L = 0;
  std::shared_ptr<const Fft> fft;

  double dx() const { return L / N; }
  double dt() const { return 2.0 * T / Nt; }
  double t(int m) const { return -T + dt() * m; }
  bool has_t0() const { return Nt % 2 == 0; }
  int t0() const { return Nt / 2; }
  double nyquist() const { return dxi * N / 2.0; }

  long long nx() const {
    long long p = 1;
    for (int a = 0; a < n; ++a) p *= N;
    return p;
  }
  // Element stride of spatial axis a in a row-major [t][x1]..[xn] layout.
  std::size_t stride(int a) const {
    std::size_t s = 1;
    for (int b = a + 1; b < n; ++b) s *= N;
    return s;
  }
  int sindex(int bin) const { return bin < N / 2 ? bin : bin - N; }
  double freq(int bin) const { return dxi * sindex(bin); }
  double x(int j) const { return dx() * j; }
  int bin_at(std::size_t flat, int a) const {
    return static_cast<int>((flat / stride(a)) % N);
  }
  void freq_at(std::size_t flat, double* xi) const {
    for (int a = 0; a < n; ++a) xi[a] = freq(bin_at(flat, a));
  }
  // e^{i t sum_a eps_a xi_a^2} evaluated at the node.
  double phase_sq(std::size_t flat) const {
    double s = 0;
    for (int a = 0; a < n; ++a) {
      double q = freq(bin_at(flat, a));
      s += eps[a] * q * q;
    }
    return s;
  }
};

GridPtr make_grid(int n, int N, int r, double T, int Nt,
                  std::array<int, 3> eps = {1, 1, 1});

enum class FieldKind { Spatial, SpaceTime };

struct SpaceTimeField {
  GridPtr g;
  FieldKind kind = FieldKind::Spatial;
  unsigned freq_mask = 0;           // bit a: spatial axis a in frequency rep
  bool zero_plane_applied = false;  // a degenerate inverse symbol was zeroed
  std::vector<cplx> v;

  int nt() const { return kind == FieldKind::SpaceTime ? g->Nt : 1; }
  std::size_t slice() const { return static_cast<std::size_t>(g->nx()); }
  std::size_t total() const { return slice() * nt(); }
  unsigned full_mask() const { return (1u << g->n) - 1u; }
  bool physical() const { return freq_mask == 0; }
  bool frequency() const { return freq_mask == full_mask(); }
  cplx* data(int m = 0) { return v.data() + slice() * m; }
  const cplx* data(int m = 0) const { return v.data() + slice() * m; }
};

SpaceTimeField make_field(GridPtr g, FieldKind kind);

// Unitary transforms with Riemann weights: forward multiplies by
// (L/N)/sqrt(2 pi) per axis, inverse by dxi/sqrt(2 pi) per axis, so the
// weighted l2 norm is representation-invariant and Plancherel is exact.
void fourier_forward(SpaceTimeField& f, Exec exec = Exec::Parallel);
void fourier_inverse(SpaceTimeField& f, Exec exec = Exec::Parallel);
void fourier_forward_axes(SpaceTimeField& f, const std::vector<int>& axes,
                          Exec exec = Exec::Parallel);
void fourier_inverse_axes(SpaceTimeField& f, const std::vector<int>& axes,
                          Exec exec = Exec::Parallel);

/// Weighted l2 norm: dx per physical axis, dxi per frequency axis, dt for
// space-time fields.
double l2_norm(const SpaceTimeField& f);
double l2_weight(const SpaceTimeField& f);  // product of the axis weights

struct SupportSpec {
  enum class Kind { Cube, Ball } kind = Kind::Ball;
  std::array<double, 3> center{0, 0, 0};
  double radius = 0;

  static SupportSpec cube(std::array<double, 3> k) {
    return {Kind::Cube, k, 1.0};
  }
  static SupportSpec ball(double K) { return {Kind::Ball, {0, 0, 0}, K}; }
  bool contains(const double* xi, int n) const {
    for (int a = 0; a < n; ++a) {
      double c = kind == Kind::Cube ? center[a] : 0.0;
      if (std::abs(xi[a] - c) > radius) return false;
    }
    return true;
  }
};

// Gaussian coefficients on the supported frequency nodes, unit weighted l2
// norm, frequency representation. Deterministic in (grid, support, seed).
SpaceTimeField random_band_limited(GridPtr g, const SupportSpec& s,
                                   std::uint64_t seed);
SpaceTimeField random_band_limited_spacetime(GridPtr g, const SupportSpec& s,
                                             std::uint64_t seed);

// Move a full-frequency field onto another grid sharing n, r, Nt, T, eps and
// kind by copying the common signed frequency bins. Handles both padding
// (dst.N > src.N, new bins zero) and truncation (content beyond the target
// band is dropped).
SpaceTimeField regrid_spectrum(const SpaceTimeField& fhat, GridPtr dst);

}  // namespace unidec
