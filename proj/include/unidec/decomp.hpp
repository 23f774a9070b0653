#pragma once
#include <array>
#include <functional>

#include "unidec/grid.hpp"

namespace unidec {

// C-infinity step: 0 for u <= 0, 1 for u >= 1.
double smooth_step(double u);
// 1-D plateau mollifier: exactly 1 on |s| <= 1/2, smooth decay, exactly 0 for
// |s| >= 1.
double bump_rho(double s);
// Normalized window eta_0(s) = rho(s)/sum_j rho(s-j); the shifted copies
// eta_k(s) = eta_0(s-k) form an exact partition of unity on the line.
double eta0(double s);

// Tensor decomposition family sigma_k(xi) = prod_a eta_0(xi_a - k_a) over
// integer indices |k|_inf <= K. Integer shifts are exact multiples of the
// node spacing, so the family is translation-exact on the grid.
struct DecompFamily {
  GridPtr g;
  int K = 0;
  int half = 0;                // support half-width in nodes (= 2^r)
  std::vector<double> table;   // eta_0 at signed node offsets [-half, half]

  double eta_node(long long j) const {
    if (j < -half || j > half) return 0.0;
    return table[static_cast<std::size_t>(j + half)];
  }
  // sigma_k at a flat spatial index.
  double sigma(const std::array<int, 3>& k, std::size_t flat) const {
    const Grid& gr = *g;
    double s = 1.0;
    for (int a = 0; a < gr.n; ++a) {
      long long j = gr.sindex(gr.bin_at(flat, a)) -
                    static_cast<long long>(k[a]) * (1LL << gr.r);
      s *= eta_node(j);
      if (s == 0.0) return 0.0;
    }
    return s;
  }
  bool covered(const double* xi) const {
    for (int a = 0; a < g->n; ++a)
      if (std::abs(xi[a]) >= K + 1.0) return false;
    return true;
  }
};

// Requires K + ceil(sqrt(n)) <= nyquist so every box in use fits the band.
DecompFamily build_family(GridPtr g, int K);

// box_k f: frequency-side multiplication by sigma_k. Input and output are in
// frequency representation; coefficients below 1e-300 are clamped to exact
// zero so support statements are exact.
SpaceTimeField apply_box(const DecompFamily& fam, const std::array<int, 3>& k,
                         const SpaceTimeField& fhat);

// In-place per-slice variant over the support nodes only; dst must be zeroed.
void box_multiply_slice(const DecompFamily& fam, const std::array<int, 3>& k,
                        const cplx* src, cplx* dst);

// Visit (flat spatial index, sigma_k weight) over the in-band support nodes
// of box k.
void for_box_support(const DecompFamily& fam, const std::array<int, 3>& k,
                     const std::function<void(std::size_t, double)>& fn);

// max over nodes |xi|_inf <= K-1 of |sum_k sigma_k - 1|, plus the measured
// lower bound of sigma_k on its own cube (reported, not pinned).
struct PartitionReport {
  double residual = 0;
  double cube_min = 0;  // min over k of min over Q_k nodes of sigma_k
};
PartitionReport partition_residual(const DecompFamily& fam);

// Angular pair on the first two axes: psi1(xi) = psi(xi_2 / (2 xi_1)) with
// psi = 1 on [0,1], 0 on [2,inf); psi2 = 1 - psi1. Conventions on the
// singular line: psi1 = 0 when xi_1 = 0, xi_2 != 0, and psi1 = 1 at xi = 0.
enum class Angular { P1, P2 };
double angular_symbol(Angular which, double xi1, double xi2);
SpaceTimeField apply_angular(const SpaceTimeField& fhat, Angular which);

// Generic real-symbol multiplier with the measured L^r ratio
// ||F^-1 phi F f||_r / ||f||_r (spatial L^r, r = inf allowed).
struct BernsteinResult {
  SpaceTimeField field;  // physical representation
  double ratio = 0;
};
BernsteinResult bernstein_apply(const std::function<double(const double*)>& phi,
                                const SpaceTimeField& f, double r);

// Spatial L^r norm of a physical field (slice-wise Riemann weights; for
// space-time input the time axis is reduced with the same exponent).
double lp_norm(const SpaceTimeField& f, double p);

// Apply a complex frequency symbol in place (field must be in frequency rep).
void multiply_symbol(SpaceTimeField& fhat,
                     const std::function<cplx(const double*)>& sym,
                     Exec exec = Exec::Parallel);

}  // namespace unidec
