#pragma once
#include "unidec/grid.hpp"

namespace unidec {

// All propagator entry points act on frequency-side fields and return
// frequency-side fields. The free group S(t) is the multiplier
// e^{i t sum_a eps_a xi_a^2}; the non-elliptic signatures live in grid.eps.

// S(t) u0 for one time (spatial field in, spatial field out).
SpaceTimeField free_evolve(const SpaceTimeField& u0hat, double t);

// Trajectory {S(t_m) u0} on the grid's time nodes (spatial in, space-time out).
SpaceTimeField evolve_trajectory(const SpaceTimeField& u0hat,
                                 Exec exec = Exec::Parallel);

// Duhamel A f(t) = int_0^t S(t - tau) f(tau) dtau via the exponentially
// weighted trapezoid recursion, exact for forcing constant in the interaction
// picture. Requires the t = 0 node (even Nt); A f(0) = 0 identically.
SpaceTimeField duhamel(const SpaceTimeField& fhat, Exec exec = Exec::Parallel);

// Same recursion started at the left edge: int_{-T}^t S(t - tau) f(tau) dtau.
SpaceTimeField duhamel_from_left(const SpaceTimeField& fhat,
                                 Exec exec = Exec::Parallel);

// Whole-line interaction integral int S(t - tau) f(tau) dtau = S(t) G with
// G = sum_m S(-t_m) f(t_m) dt.
SpaceTimeField wholeline_duhamel(const SpaceTimeField& fhat,
                                 Exec exec = Exec::Parallel);

enum class ZeroPlane { Error, Zero };

// Partial Riesz multiplier |xi_i|^sigma. For sigma < 0 the symbol is singular
// on the plane xi_i = 0: with ZeroPlane::Error any frequency mass there is a
// domain error; with ZeroPlane::Zero the symbol is set to 0 on the plane and
// the output field is flagged.
SpaceTimeField partial_riesz(const SpaceTimeField& fhat, int axis, double sigma,
                             ZeroPlane zp = ZeroPlane::Error);

// Partial antiderivative (i xi_i)^-1, same zero-plane convention.
SpaceTimeField partial_antiderivative(const SpaceTimeField& fhat, int axis,
                                      ZeroPlane zp = ZeroPlane::Error);

// Partial derivative (i xi_i).
SpaceTimeField partial_derivative(const SpaceTimeField& fhat, int axis);

}  // namespace unidec
