#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "unidec/decomp.hpp"
#include "unidec/grid.hpp"
#include "unidec/norms.hpp"

namespace unidec {

// Polynomial nonlinearity F(u, conj u, grad u, grad conj u) as a finite sum
// of monomials. Variable slots: 0 = u, 1 = conj u, 2+a = d_{x_a} u,
// n+2+a = d_{x_a} conj u (a = 0..n-1).
struct Monomial {
  std::array<int, 8> beta{};
  cplx coeff{1.0, 0.0};

  int degree() const {
    int d = 0;
    for (int b : beta) d += b;
    return d;
  }
};

struct NonlinearitySpec {
  int n = 2;
  double m = 3;  // minimal-degree parameter: every |beta| >= m + 1
  std::vector<Monomial> monomials;

  // sum_i lambda_i d_{x_i}(u^{kappa_i+1}) written out via the chain rule as
  // lambda_i (kappa_i + 1) u^{kappa_i} d_{x_i} u; m = min kappa_i.
  static NonlinearitySpec dnls1(int n, const std::vector<int>& kappa,
                                const std::vector<cplx>& lambda);
  int max_degree() const;
  void validate() const;
};

struct SolverConfig {
  NonlinearitySpec nl;
  double delta = 1e-3;
  WorkingNormSpec norm = WorkingNormSpec::X1(2, 3);
  int max_iter = 12;
  double tol = 1e-6;
  int padding = 2;  // lower bound; raised per degree to ceil((deg+1)/2)
};

struct IterateStats {
  int iter = 0;
  double unorm = 0;  // working norm of the iterate before the update
  double dnorm = 0;  // working norm of the correction
  double ratio = 0;  // dnorm / previous dnorm, 0 on the first iterate
};

struct SolutionDiagnostics {
  std::vector<IterateStats> iterates;
  bool converged = false;
  bool contracting = true;
  double final_residual = 0;
  int iterations = 0;
  std::vector<std::string> warnings;  // smallness-regime guards, not errors
};

struct PicardResult {
  SpaceTimeField u;  // space-time trajectory, frequency representation
  SolutionDiagnostics diag;
};

enum class DuhamelAnchor { Zero, Left };

// Pointwise evaluation of the polynomial, dealiased by spectral zero-padding
// before products and truncation after. Physical field in, physical out;
// spatial and space-time inputs both work (slices are independent).
SpaceTimeField eval_nonlinearity(const SpaceTimeField& u,
                                 const NonlinearitySpec& spec, int padding,
                                 Exec exec = Exec::Parallel);

// Picard iteration for u = S(t) u0 - i A F(u). Corrections are computed as
// telescoped differences F(u^m) - F(u^{m-1}) (one factor per product is the
// small difference field), so their norms stay accurate far below the
// magnitude of the iterates. Divergence is reported in the diagnostics;
// NaN is a hard error carrying the iterate index.
PicardResult picard_solve(const SpaceTimeField& u0hat, const SolverConfig& cfg,
                          const DecompFamily& fam,
                          DuhamelAnchor anchor = DuhamelAnchor::Zero,
                          Exec exec = Exec::Parallel);

// Fixed-point defect ||u - S(t)u0 + i A F(u)|| in the configured working
// norm, evaluated directly (no telescoping).
double residual(const SpaceTimeField& u, const SpaceTimeField& u0hat,
                const SolverConfig& cfg, const DecompFamily& fam,
                DuhamelAnchor anchor = DuhamelAnchor::Zero,
                Exec exec = Exec::Parallel);

// u_pm = S(-t_e) u(t_e) at the last (direction +1) or first (direction -1)
// grid time. Requires a converged solution.
SpaceTimeField scattering_state(const PicardResult& sol, int direction);

// Modulation-norm difference of the states extracted at the window edge and
// at half the window (the Cauchy tail surrogate).
double scattering_cauchy(const PicardResult& sol, int direction, double s,
                         const DecompFamily& fam);

struct ScatteringResult {
  SpaceTimeField u_plus;  // spatial field, frequency representation
  SolutionDiagnostics diag;
};

// v = S(t) u_minus - i int_{-T}^t S(t - tau) F(v) dtau by Picard, then
// u_plus = S(-t_e) v(t_e) at the last grid time.
ScatteringResult scattering_operator(const SpaceTimeField& uminus_hat,
                                     const SolverConfig& cfg,
                                     const DecompFamily& fam,
                                     Exec exec = Exec::Parallel);

// Datum regularity matching the working norm: X1 -> 1/2, X -> 3/2,
// Y1 -> 3/2, Y -> 5/2.
double datum_regularity(const WorkingNormSpec& norm);

// Random band-limited field rescaled so modulation_norm(., s, fam) == delta.
SpaceTimeField small_datum(GridPtr g, const SupportSpec& sup, double s,
                           double delta, const DecompFamily& fam,
                           std::uint64_t seed);

}  // namespace unidec
