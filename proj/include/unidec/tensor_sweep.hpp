#pragma once
#include <cstdint>
#include <utility>
#include <vector>

#include "unidec/grid.hpp"

namespace unidec {

// Large-k1 maximal-function sweep. A 2-D datum of tensor form a(x1) b(x2)
// keeps the tensor structure under the free flow and under box_(k1,0), so
// the norm L^q_{x1} L^inf_{x2} L^inf_t is evaluated exactly from two 1-D
// grids: F(x1) = sup_t |f1(t, x1)| h(t) with h(t) = sup_{x2} |f2(t, x2)|.
// Slices are streamed with a running maximum, so the trajectory is never
// materialized and k1 = 64 stays desk-sized.

struct TensorGridSpec {
  int r = 0;    // frequency spacing exponent, dxi = 2^-r
  int N1 = 0;   // nodes on the k1 axis
  int N2 = 0;   // nodes on the transverse axis
  int Nt = 0;   // time samples
  double T = 4;
};

// Scaling rules: dxi = 1/(2 k1), dt = 1/(4 k1) exactly (phase drift across
// the box stays below half a radian per step), bands hold the probed box
// with a factor-2 margin.
TensorGridSpec tensor_grid_for(int k1);

struct MaxSweepPoint {
  int k1 = 0;
  double q = 4;
  double lhs_mean = 0;   // mean over samples of lhs / ||datum||_2
  double lhs_max = 0;    // max over samples
  int nsamples = 0;
};

MaxSweepPoint max_tensor_point(int k1, double q, int nsamples,
                               std::uint64_t seed);
std::vector<MaxSweepPoint> max_tensor_run(const std::vector<int>& k1s,
                                          double q, int nsamples,
                                          std::uint64_t seed);

// Same evaluation on explicit grids (validation path; the generic 2-D route
// below must agree to rounding when run with N1 = N2 = N).
double max_tensor_custom(int k1, double q, const TensorGridSpec& gs,
                         std::uint64_t seed);
double max_generic_2d(int k1, double q, const TensorGridSpec& gs,
                      std::uint64_t seed);

// Deterministic lower-bound witness: the datum with spectrum eta_(k1) x
// eta_0 concentrates along x1 = -2 eps_1 k1 t, and the q-th power of its
// maximal norm grows linearly in k1. Returns that q-th power.
double sharpness_witness(int k1, double q);

}  // namespace unidec
