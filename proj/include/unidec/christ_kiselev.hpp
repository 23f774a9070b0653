#pragma once
#include <cmath>
#include <functional>
#include <vector>

#include "unidec/grid.hpp"
#include "unidec/norms.hpp"

namespace unidec {

// Whitney machinery for the triangle {(x, y) in [0,1]^2 : x < y} and the
// level-function change of variables behind the restriction-operator
// splitting identity.

struct DyadicInterval {
  int j = 1;        // level >= 1
  long long a = 0;  // offset in [0, 2^j)

  double lo() const { return std::ldexp(static_cast<double>(a), -j); }
  double hi() const { return std::ldexp(static_cast<double>(a + 1), -j); }
  double len() const { return std::ldexp(1.0, -j); }
};

struct WhitneyPair {
  DyadicInterval I;  // horizontal
  DyadicInterval J;  // vertical, I x J inside x < y
};

// Levels 1..j_max by bisection: level j contributes the 2^{j-1} adjacent
// pairs I = [2m, 2m+1) 2^-j, J = [2m+1, 2m+2) 2^-j. Every point x < y of
// the open triangle is covered at exactly one level (the first level whose
// dyadic cells separate x from y), so the squares tile the triangle up to
// the diagonal strip of width 2^-j_max.
std::vector<WhitneyPair> whitney_decompose(int j_max);

struct WhitneyReport {
  int j_max = 0;
  std::vector<long long> level_counts;
  double area_sum = 0;   // exact dyadic sum of |I| |J|
  double uncovered = 0;  // 1/2 - area_sum
  double max_dist_error = 0;  // max | center dist - |I| |
  bool sides_equal = true;
  bool inside_triangle = true;
  bool disjoint = true;
  int max_i_per_j = 0;
};

// Exhaustive property check; pairwise disjointness is O(P^2), so the input
// must come from depth <= 14.
WhitneyReport whitney_properties(const std::vector<WhitneyPair>& pairs);

struct CkExponents {
  double q1 = 2, q2 = 2, q3 = 2;
  int axis = 0;  // outer spatial axis
};

// F(t) = || (int_{-inf}^t |f|^{q3} ds)^{1/q3} ||^{q1} over L^{q1}_{x_i}
// L^{q2}_{other x}, normalized to end at 1. F has Nt+1 entries: F[m] is the
// mass strictly before slice m, so F[0] = 0 and F[Nt] = 1 exactly. phi has
// one strictly increasing value in [0, 1) per slice (jitter 1e-12 per index
// breaks ties between empty slices), used for the Whitney preimages.
struct LevelFunction {
  std::vector<double> F;
  std::vector<double> phi;
};

LevelFunction level_function(const SpaceTimeField& f, const CkExponents& e);

// min(q2/(q1 q3), 1/q1, 1/q2, 1/q3)
double lemma_a2_exponent(double q1, double q2, double q3);

// || f restricted to F-cells inside [lo, hi) || / (||f|| |I|^exponent).
// A slice belongs to the preimage when its whole increment [F[m], F[m+1])
// sits inside the interval; with equal exponents the bound collapses to an
// exact level-set identity. Empty preimage gives 0.
double lemma_a2_ratio(const SpaceTimeField& f, const LevelFunction& lf,
                      double lo, double hi, const CkExponents& e);

// Time-direction integral kernel on the grid: (T f)(t_m) =
// sum_{m'} K[m][m'] f(t_{m'}) dt.
struct KernelOp {
  GridPtr g;
  std::vector<cplx> K;  // Nt x Nt row-major, K[m * Nt + m']
};

KernelOp make_kernel(GridPtr g, const std::function<cplx(double, double)>& k);

// Whole-line operator T.
SpaceTimeField kernel_apply(const KernelOp& op, const SpaceTimeField& f);
// Restricted operator over t' in [0, t] (inclusive); zero where t < 0.
// Needs the t = 0 node.
SpaceTimeField kernel_apply_restricted(const KernelOp& op,
                                       const SpaceTimeField& f);

struct RestrictionResult {
  SpaceTimeField whitney;  // sum over I ~ J of chi_J(t) T(chi_I f)
  SpaceTimeField strict;   // sum over phi(t') < phi(t), the depth limit
  double defect = 0;       // mixed norm of the difference
};

// The splitting identity at finite depth: pairs (t', t) whose phi values
// separate at level <= j_max are reconstructed exactly; the defect is the
// near-diagonal remainder and decays geometrically in j_max.
RestrictionResult restriction_via_whitney(const KernelOp& op,
                                          const SpaceTimeField& f,
                                          const CkExponents& e, int j_max,
                                          const MixedNormSpec& target);

// Hypothesis of the restriction proposition, variant (1):
// min p_i > max(q_1, q_2, q_3, q_1 q_3 / q_2).
bool prop_a1_admissible(double p1, double p2, double p3, double q1, double q2,
                        double q3);

// Slack of the elementary power inequalities (nonnegative when they hold):
// r^a - s^a <= (a/b)(r^b - s^b)(r^{a-b} + s^{a-b}) for a >= b > 0, and
// r^a - s^a <= (r^b - s^b)^{a/b} for 0 < a <= b, both on 0 <= s <= r.
double b1_slack(double r, double s, double a, double b);
double b2_slack(double r, double s, double a, double b);

}  // namespace unidec
