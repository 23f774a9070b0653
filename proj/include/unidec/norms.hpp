#pragma once
#include <array>
#include <string>
#include <vector>

#include "unidec/decomp.hpp"
#include "unidec/grid.hpp"

namespace unidec {

// Anisotropic space-time norms with Riemann weights (dx per spatial axis, dt
// in time, uniform on the window). Exponent inf means sup. Nesting for Aniso
// is L^{p1}_{x_i} L^{p2}_{other x} L^{p3}_t with p3 defaulting to p2, which
// reproduces the joint L^{p2}_{(x_j), t} inner norm when the exponents agree.
struct MixedNormSpec {
  enum class Kind { Aniso, TimeOuter, Joint } kind = Kind::Joint;
  int axis = 0;
  double p1 = 2, p2 = 2, p3 = 2;

  static MixedNormSpec aniso(int axis, double p1, double p2) {
    return {Kind::Aniso, axis, p1, p2, p2};
  }
  static MixedNormSpec aniso3(int axis, double q1, double q2, double q3) {
    return {Kind::Aniso, axis, q1, q2, q3};
  }
  static MixedNormSpec time_outer(double gamma, double r) {
    return {Kind::TimeOuter, 0, gamma, r, gamma};
  }
  static MixedNormSpec joint(double p) { return {Kind::Joint, 0, p, p, p}; }
};

double mixed_norm(const SpaceTimeField& f, const MixedNormSpec& spec);

// <k> = 1 + |k| (Euclidean), <k_i> = 1 + |k_i|.
double bracket(const std::array<int, 3>& k, int n);
double bracket_axis(int ki);

// Modulation norm sum_k <k>^s ||box_k f||_2 over the family range (spatial
// fields; evaluated frequency-side, Plancherel-exact). Throws if more than
// 1e-8 of the field energy lies outside the family coverage.
double modulation_norm(const SpaceTimeField& f, double s,
                       const DecompFamily& fam);
// Sharp-cube oracle sum_k <k>^s ||F f||_{L2(Q_k)} over the same range.
double modulation_norm_sharp(const SpaceTimeField& f, double s,
                             const DecompFamily& fam);
// Besov norm with sharp dyadic shells: ||F f||_{L2(|xi|<=1)} +
// sum_{j>=1} 2^{js} ||F f||_{L2(2^{j-1}<|xi|<=2^j)} (Euclidean shells).
double besov_norm(const SpaceTimeField& f, double s);

// One weighted box-sum component: sum over the family (optionally restricted
// to |k_i| > 4) of weight(k) * max over `inner` of the mixed norm, applied to
// box_k u, optionally summed over the derivative variants
// d^alpha_{x_l}, alpha in {0,1}, l = 1..n.
struct BoxTermSpec {
  double s = 0;
  enum class Weight { K, Ki } weight = Weight::K;
  int weight_axis = 0;
  bool restrict_ki = false;
  bool with_derivatives = false;
  std::vector<MixedNormSpec> inner;
};

double box_sum_norm(const SpaceTimeField& u, const DecompFamily& fam,
                    const BoxTermSpec& term, Exec exec = Exec::Parallel);

// Working norms as component lists; `m` is the nonlinearity degree parameter.
struct WorkingNormSpec {
  std::string name;
  double m = 3;
  std::vector<BoxTermSpec> components;

  static WorkingNormSpec X1(int n, double kappa);
  static WorkingNormSpec X(int n, double m);
  static WorkingNormSpec Y1(int n);
  static WorkingNormSpec Y(int n);
};

struct WorkingNormResult {
  double total = 0;
  std::vector<double> components;
};

WorkingNormResult working_norm(const SpaceTimeField& u, const DecompFamily& fam,
                               const WorkingNormSpec& spec,
                               Exec exec = Exec::Parallel);

}  // namespace unidec
