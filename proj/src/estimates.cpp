#include "unidec/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "unidec/propagator.hpp"
#include "unidec/rng.hpp"

namespace unidec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double conj_exp(double p) {
  if (std::isinf(p)) return 1.0;
  if (p == 1.0) return kInf;
  return p / (p - 1.0);
}

// Admissibility threshold: 2/gamma(r) = n(1/2 - 1/r).
double gamma_floor(double r, int n) {
  double d = n * (0.5 - 1.0 / r);
  if (d <= 0) return kInf;
  return 2.0 / d;
}

SpaceTimeField to_phys(const SpaceTimeField& fhat) {
  SpaceTimeField c = fhat;
  fourier_inverse(c, Exec::Serial);
  return c;
}

double phys_norm(const SpaceTimeField& fhat, const MixedNormSpec& spec) {
  SpaceTimeField c = to_phys(fhat);
  return mixed_norm(c, spec);
}

double phys_norm_max(const SpaceTimeField& fhat,
                     const std::vector<MixedNormSpec>& specs) {
  SpaceTimeField c = to_phys(fhat);
  double v = 0;
  for (const auto& s : specs) v = std::max(v, mixed_norm(c, s));
  return v;
}

bool has_content(const SpaceTimeField& f) {
  for (const cplx& z : f.v)
    if (z != cplx{0.0, 0.0}) return true;
  return false;
}

template <class Fn>
void for_family(const DecompFamily& fam, Fn&& fn) {
  const int n = fam.g->n, K = fam.K;
  int idx[3] = {0, 0, 0};
  for (int a = 0; a < n; ++a) idx[a] = -K;
  while (true) {
    std::array<int, 3> k{0, 0, 0};
    for (int a = 0; a < n; ++a) k[a] = idx[a];
    fn(k);
    int a = n - 1;
    for (; a >= 0; --a) {
      if (++idx[a] <= K) break;
      idx[a] = -K;
    }
    if (a < 0) break;
  }
}

BoxTermSpec sum_term(double s, int axis, bool restrict_ki,
                     std::vector<MixedNormSpec> inner) {
  BoxTermSpec t;
  t.s = s;
  t.weight = BoxTermSpec::Weight::Ki;
  t.weight_axis = axis;
  t.restrict_ki = restrict_ki;
  t.inner = std::move(inner);
  return t;
}

struct Pipeline {
  bool forcing = false;  // space-time datum (random_forcing) vs spatial
  bool global = false;   // ball-supported datum, no box localization
  int min_abs_k0 = 0;    // probed boxes must stay off the xi_1 = 0 plane
  std::function<double(const SpaceTimeField&)> lhs;
  std::function<double(const SpaceTimeField&)> rhs;
  std::function<double(const std::array<int, 3>&)> weight;
};

Pipeline build_pipeline(EstimateId id, const EstimateParams& p,
                        const DecompFamily& fam) {
  const int n = fam.g->n;
  const int i = p.axis;
  require(i >= 0 && i < n, "distinguished axis out of range");
  const double q = p.q, ga = p.gamma, rr = p.r;
  const double gap = conj_exp(ga), rrp = conj_exp(rr);
  using MS = MixedNormSpec;
  Pipeline pl;
  pl.weight = [](const std::array<int, 3>&) { return 1.0; };

  auto duh_deriv = [i](const SpaceTimeField& f) {
    SpaceTimeField A = duhamel(f, Exec::Serial);
    return partial_derivative(A, i);
  };

  switch (id) {
    case EstimateId::GSE1:
      pl.global = true;
      pl.forcing = true;
      pl.lhs = [duh_deriv, i](const SpaceTimeField& f) {
        return phys_norm(duh_deriv(f), MS::aniso(i, kInf, 2));
      };
      pl.rhs = [i](const SpaceTimeField& f) {
        return phys_norm(f, MS::aniso(i, 1, 2));
      };
      break;

    case EstimateId::GSE2:
      pl.global = true;
      pl.lhs = [i](const SpaceTimeField& u0) {
        SpaceTimeField d = partial_riesz(u0, i, 0.5);
        SpaceTimeField traj = evolve_trajectory(d, Exec::Serial);
        return phys_norm(traj, MS::aniso(i, kInf, 2));
      };
      pl.rhs = [](const SpaceTimeField& u0) { return l2_norm(u0); };
      break;

    case EstimateId::GSE3:
      pl.global = true;
      pl.forcing = true;
      pl.lhs = [duh_deriv](const SpaceTimeField& f) {
        return phys_norm(duh_deriv(f), MS::time_outer(kInf, 2));
      };
      pl.rhs = [i](const SpaceTimeField& f) {
        return phys_norm(partial_riesz(f, i, 0.5), MS::aniso(i, 1, 2));
      };
      break;

    case EstimateId::STRI: {
      pl.global = true;
      require(p.variant >= 1 && p.variant <= 4, "STRI has variants 1..4");
      if (p.variant <= 2) {
        require(rr >= 2 && !std::isinf(rr),
                "STRI needs 2 <= r < inf");
        require(ga >= std::max(gamma_floor(rr, n), 2.0),
                "STRI needs gamma >= max(gamma(r), 2)");
      } else {
        require(p.p_joint >= 2.0 + 4.0 / n && !std::isinf(p.p_joint),
                "STRI joint variants need 2 + 4/n <= p < inf");
      }
      const double pj = p.p_joint, pjp = conj_exp(p.p_joint);
      switch (p.variant) {
        case 1:
          pl.lhs = [&fam, ga, rr](const SpaceTimeField& u0) {
            SpaceTimeField traj = evolve_trajectory(u0, Exec::Serial);
            BoxTermSpec t;
            t.inner = {MS::time_outer(ga, rr)};
            return box_sum_norm(traj, fam, t, Exec::Serial);
          };
          pl.rhs = [&fam](const SpaceTimeField& u0) {
            return modulation_norm(u0, 0.0, fam);
          };
          break;
        case 2:
          pl.forcing = true;
          pl.lhs = [&fam, ga, rr](const SpaceTimeField& f) {
            SpaceTimeField A = duhamel(f, Exec::Serial);
            BoxTermSpec t;
            t.inner = {MS::time_outer(ga, rr), MS::time_outer(kInf, 2)};
            return box_sum_norm(A, fam, t, Exec::Serial);
          };
          pl.rhs = [&fam, gap, rrp](const SpaceTimeField& f) {
            BoxTermSpec t;
            t.inner = {MS::time_outer(gap, rrp)};
            return box_sum_norm(f, fam, t, Exec::Serial);
          };
          break;
        case 3:
          pl.lhs = [&fam, pj](const SpaceTimeField& u0) {
            SpaceTimeField traj = evolve_trajectory(u0, Exec::Serial);
            BoxTermSpec t;
            t.inner = {MS::joint(pj)};
            return box_sum_norm(traj, fam, t, Exec::Serial);
          };
          pl.rhs = [&fam](const SpaceTimeField& u0) {
            return modulation_norm(u0, 0.0, fam);
          };
          break;
        case 4:
          pl.forcing = true;
          pl.lhs = [&fam, pj](const SpaceTimeField& f) {
            SpaceTimeField A = duhamel(f, Exec::Serial);
            BoxTermSpec t;
            t.inner = {MS::joint(pj), MS::time_outer(kInf, 2)};
            return box_sum_norm(A, fam, t, Exec::Serial);
          };
          pl.rhs = [&fam, pjp](const SpaceTimeField& f) {
            BoxTermSpec t;
            t.inner = {MS::joint(pjp)};
            return box_sum_norm(f, fam, t, Exec::Serial);
          };
          break;
      }
      break;
    }

    case EstimateId::MAX:
      require(q >= 2 && q > 4.0 / n, "MAX needs q >= 2 and q > 4/n");
      pl.lhs = [i, q](const SpaceTimeField& u0) {
        SpaceTimeField traj = evolve_trajectory(u0, Exec::Serial);
        return phys_norm(traj, MS::aniso3(i, q, kInf, kInf));
      };
      pl.rhs = [](const SpaceTimeField& u0) { return l2_norm(u0); };
      pl.weight = [i, q](const std::array<int, 3>& k) {
        return std::pow(bracket_axis(k[i]), 1.0 / q);
      };
      break;

    case EstimateId::MAXD:
      require(q >= 2 && q > 4.0 / n, "MAXD needs q >= 2 and q > 4/n");
      pl.forcing = true;
      pl.lhs = [](const SpaceTimeField& f) {
        SpaceTimeField W = wholeline_duhamel(f, Exec::Serial);
        return phys_norm(W, MS::time_outer(kInf, 2));
      };
      pl.rhs = [i, q](const SpaceTimeField& f) {
        return phys_norm(f, MS::aniso3(i, conj_exp(q), 1, 1));
      };
      pl.weight = [i, q](const std::array<int, 3>& k) {
        return std::pow(bracket_axis(k[i]), 1.0 / q);
      };
      break;

    case EstimateId::SM1:
      require(p.variant == 1 || p.variant == 2, "SM1 has variants 1..2");
      pl.forcing = true;
      if (p.variant == 1) {
        pl.lhs = [duh_deriv, i](const SpaceTimeField& f) {
          return phys_norm(duh_deriv(f), MS::aniso(i, kInf, 2));
        };
      } else {
        pl.lhs = [duh_deriv](const SpaceTimeField& f) {
          return phys_norm(duh_deriv(f), MS::time_outer(kInf, 2));
        };
        pl.weight = [i](const std::array<int, 3>& k) {
          return std::sqrt(bracket_axis(k[i]));
        };
      }
      pl.rhs = [i](const SpaceTimeField& f) {
        return phys_norm(f, MS::aniso(i, 1, 2));
      };
      break;

    case EstimateId::SMMAX:
      require(q > 2 && q > 4.0 / n, "SMMAX needs q > 2 and q > 4/n");
      pl.forcing = true;
      pl.lhs = [duh_deriv, i, q](const SpaceTimeField& f) {
        return phys_norm(duh_deriv(f), MS::aniso3(i, q, kInf, kInf));
      };
      pl.rhs = [i](const SpaceTimeField& f) {
        return phys_norm(f, MS::aniso(i, 1, 2));
      };
      pl.weight = [i, q](const std::array<int, 3>& k) {
        return std::pow(bracket_axis(k[i]), 0.5 + 1.0 / q);
      };
      break;

    case EstimateId::STSM: {
      require(p.variant >= 1 && p.variant <= 7, "STSM has variants 1..7");
      if (p.variant <= 6) {
        require(rr >= 2 && !std::isinf(rr), "STSM needs 2 <= r < inf");
        require(ga > std::max(gamma_floor(rr, n), 2.0),
                "STSM needs gamma > max(gamma(r), 2)");
      }
      if (p.variant == 5 || p.variant == 6)
        require(q >= 2 && !std::isinf(q) && q > 4.0 / n,
                "STSM maximal variants need 2 <= q < inf, q > 4/n");
      if (p.variant == 7)
        require(p.p_joint >= 4.0 / n && !std::isinf(p.p_joint),
                "STSM joint variant needs 4/n <= p < inf");
      const double pj2 = 2.0 + p.p_joint;
      switch (p.variant) {
        case 1:
          pl.lhs = [ga, rr](const SpaceTimeField& u0) {
            SpaceTimeField traj = evolve_trajectory(u0, Exec::Serial);
            return phys_norm(traj, MS::time_outer(ga, rr));
          };
          pl.rhs = [](const SpaceTimeField& u0) { return l2_norm(u0); };
          break;
        case 2:
          pl.forcing = true;
          pl.lhs = [ga, rr](const SpaceTimeField& f) {
            SpaceTimeField A = duhamel(f, Exec::Serial);
            return phys_norm_max(
                A, {MS::time_outer(kInf, 2), MS::time_outer(ga, rr)});
          };
          pl.rhs = [gap, rrp](const SpaceTimeField& f) {
            return phys_norm(f, MS::time_outer(gap, rrp));
          };
          break;
        case 3:
          pl.forcing = true;
          pl.lhs = [duh_deriv, ga, rr](const SpaceTimeField& f) {
            return phys_norm(duh_deriv(f), MS::time_outer(ga, rr));
          };
          pl.rhs = [i](const SpaceTimeField& f) {
            return phys_norm(f, MS::aniso(i, 1, 2));
          };
          pl.weight = [i](const std::array<int, 3>& k) {
            return std::sqrt(bracket_axis(k[i]));
          };
          break;
        case 4:
          pl.forcing = true;
          pl.lhs = [duh_deriv, i](const SpaceTimeField& f) {
            return phys_norm(duh_deriv(f), MS::aniso(i, kInf, 2));
          };
          pl.rhs = [gap, rrp](const SpaceTimeField& f) {
            return phys_norm(f, MS::time_outer(gap, rrp));
          };
          pl.weight = [i](const std::array<int, 3>& k) {
            return std::sqrt(bracket_axis(k[i]));
          };
          break;
        case 5:
          pl.forcing = true;
          pl.lhs = [i, q](const SpaceTimeField& f) {
            SpaceTimeField A = duhamel(f, Exec::Serial);
            return phys_norm(A, MS::aniso3(i, q, kInf, kInf));
          };
          pl.rhs = [gap, rrp](const SpaceTimeField& f) {
            return phys_norm(f, MS::time_outer(gap, rrp));
          };
          pl.weight = [i, q](const std::array<int, 3>& k) {
            return std::pow(bracket_axis(k[i]), 1.0 / q);
          };
          break;
        case 6:
          pl.forcing = true;
          pl.lhs = [duh_deriv, i, q](const SpaceTimeField& f) {
            return phys_norm(duh_deriv(f), MS::aniso3(i, q, kInf, kInf));
          };
          pl.rhs = [gap, rrp](const SpaceTimeField& f) {
            return phys_norm(f, MS::time_outer(gap, rrp));
          };
          pl.weight = [i, q](const std::array<int, 3>& k) {
            return std::pow(bracket_axis(k[i]), 1.0 + 1.0 / q);
          };
          break;
        case 7:
          pl.forcing = true;
          pl.lhs = [pj2](const SpaceTimeField& f) {
            SpaceTimeField A = duhamel(f, Exec::Serial);
            return phys_norm_max(A,
                                 {MS::time_outer(kInf, 2), MS::joint(pj2)});
          };
          pl.rhs = [pj2](const SpaceTimeField& f) {
            return phys_norm(f, MS::joint(conj_exp(pj2)));
          };
          break;
      }
      break;
    }

    case EstimateId::INT1: {
      require(n >= 2, "INT1 needs n >= 2");
      require(i >= 1, "INT1 distinguishes axes i = 2..n");
      require(p.variant >= 1 && p.variant <= 4, "INT1 has variants 1..4");
      if (p.variant >= 2) {
        require(rr >= 2 && !std::isinf(rr), "INT1 needs 2 <= r < inf");
        require(ga >= gamma_floor(rr, n) && ga > 2,
                "INT1 needs gamma >= gamma(r), gamma > 2");
      }
      if (p.variant >= 3)
        require(q >= 2 && q > 4.0 / n && (p.variant == 4 || q > 2),
                "INT1 variant 3 needs q > 2, q > 4/n");
      pl.forcing = true;
      if (p.variant <= 2) pl.min_abs_k0 = 1;
      switch (p.variant) {
        case 1:
          pl.lhs = [duh_deriv](const SpaceTimeField& f) {
            return phys_norm(duh_deriv(f), MS::aniso(0, kInf, 2));
          };
          pl.rhs = [i](const SpaceTimeField& f) {
            SpaceTimeField d = partial_derivative(f, i);
            SpaceTimeField a = partial_antiderivative(d, 0);
            return phys_norm(a, MS::aniso(0, 1, 2));
          };
          break;
        case 2:
          pl.lhs = [duh_deriv](const SpaceTimeField& f) {
            return phys_norm(duh_deriv(f), MS::aniso(0, kInf, 2));
          };
          pl.rhs = [i, gap, rrp](const SpaceTimeField& f) {
            SpaceTimeField d = partial_derivative(f, i);
            SpaceTimeField a = partial_riesz(d, 0, -0.5);
            return phys_norm(a, MS::time_outer(gap, rrp));
          };
          break;
        case 3:
          pl.lhs = [duh_deriv, q](const SpaceTimeField& f) {
            return phys_norm(duh_deriv(f), MS::aniso3(0, q, kInf, kInf));
          };
          pl.rhs = [i](const SpaceTimeField& f) {
            return phys_norm(f, MS::aniso(i, 1, 2));
          };
          pl.weight = [i, q](const std::array<int, 3>& k) {
            return std::sqrt(bracket_axis(k[i])) *
                   std::pow(bracket_axis(k[0]), 1.0 / q);
          };
          break;
        case 4:
          pl.lhs = [duh_deriv, q](const SpaceTimeField& f) {
            return phys_norm(duh_deriv(f), MS::aniso3(0, q, kInf, kInf));
          };
          pl.rhs = [gap, rrp](const SpaceTimeField& f) {
            return phys_norm(f, MS::time_outer(gap, rrp));
          };
          pl.weight = [i, q](const std::array<int, 3>& k) {
            return bracket_axis(k[i]) *
                   std::pow(bracket_axis(k[0]), 1.0 / q);
          };
          break;
      }
      break;
    }

    case EstimateId::INT2: {
      require(n >= 2, "INT2 needs n >= 2");
      require(p.variant == 1 || p.variant == 2, "INT2 has variants 1..2");
      require(fam.K > 5, "INT2 sums need boxes with |k_1| > 4 in the family");
      const double sg = p.sigma;
      require(sg >= (p.variant == 1 ? 0.0 : 1.0),
              "INT2 weight exponent below the cited range");
      const Angular which = p.variant == 1 ? Angular::P1 : Angular::P2;
      const int rhs_axis = p.variant == 1 ? 0 : 1;
      pl.global = true;
      pl.forcing = true;
      pl.lhs = [&fam, sg, which](const SpaceTimeField& f) {
        SpaceTimeField A = duhamel(f, Exec::Serial);
        SpaceTimeField DA = partial_derivative(A, 1);
        double acc = 0;
        for_family(fam, [&](const std::array<int, 3>& k) {
          if (std::abs(k[0]) <= 4) return;
          SpaceTimeField boxed = apply_box(fam, k, DA);
          if (!has_content(boxed)) return;
          SpaceTimeField ang = apply_angular(boxed, which);
          acc += std::pow(bracket_axis(k[0]), sg) *
                 phys_norm(ang, MS::aniso(0, kInf, 2));
        });
        return acc;
      };
      pl.rhs = [&fam, sg, rhs_axis](const SpaceTimeField& f) {
        return box_sum_norm(
            f, fam, sum_term(sg, rhs_axis, true, {MS::aniso(0, 1, 2)}),
            Exec::Serial);
      };
      break;
    }

    case EstimateId::KMAX1:
      require(q >= 2 && q > 4.0 / n, "KMAX1 needs q >= 2 and q > 4/n");
      require(rr >= 2 && !std::isinf(rr), "KMAX1 needs 2 <= r < inf");
      require(ga >= gamma_floor(rr, n) && ga > 2,
              "KMAX1 needs gamma >= gamma(r), gamma > 2");
      pl.forcing = true;
      pl.lhs = [duh_deriv, q](const SpaceTimeField& f) {
        return phys_norm(duh_deriv(f), MS::aniso3(0, q, kInf, kInf));
      };
      pl.rhs = [gap, rrp](const SpaceTimeField& f) {
        return phys_norm(f, MS::time_outer(gap, rrp));
      };
      pl.weight = [q, n](const std::array<int, 3>& k) {
        int km = 0;
        for (int a = 0; a < n; ++a) km = std::max(km, std::abs(k[a]));
        return std::pow(bracket_axis(km), 1.0 + 1.0 / q);
      };
      break;

    case EstimateId::KMAX2: {
      require(q > 2 && q > 4.0 / n && !std::isinf(q),
              "KMAX2 needs 2 < q < inf, q > 4/n");
      require(p.sigma >= 0, "KMAX2 needs sigma >= 0");
      const int al = p.alpha_axis;
      require(al >= 0 && al < n, "KMAX2 restriction axis out of range");
      require(fam.K > 5, "KMAX2 sums need boxes with |k_a| > 4 in the family");
      const double sg = p.sigma;
      pl.global = true;
      pl.forcing = true;
      pl.lhs = [&fam, sg, q, i, al, n](const SpaceTimeField& f) {
        SpaceTimeField A = duhamel(f, Exec::Serial);
        SpaceTimeField DA = partial_derivative(A, i);
        double acc = 0;
        for_family(fam, [&](const std::array<int, 3>& k) {
          int km = 0;
          for (int a = 0; a < n; ++a) km = std::max(km, std::abs(k[a]));
          if (!(std::abs(k[al]) == km && km > 4)) return;
          SpaceTimeField boxed = apply_box(fam, k, DA);
          if (!has_content(boxed)) return;
          acc += std::pow(bracket(k, n), sg) *
                 phys_norm(boxed, MS::aniso3(0, q, kInf, kInf));
        });
        return acc;
      };
      pl.rhs = [&fam, sg, q, al](const SpaceTimeField& f) {
        return box_sum_norm(
            f, fam,
            sum_term(sg + 0.5 + 1.0 / q, al, true, {MS::aniso(al, 1, 2)}),
            Exec::Serial);
      };
      break;
    }

    case EstimateId::CONJ43:
      require(n >= 2, "CONJ43 needs n >= 2");
      require(p.variant == 1 || p.variant == 2, "CONJ43 has variants 1..2");
      pl.forcing = true;
      pl.min_abs_k0 = 1;
      pl.lhs = [v = p.variant](const SpaceTimeField& f) {
        SpaceTimeField A = v == 1 ? wholeline_duhamel(f, Exec::Serial)
                                  : duhamel(f, Exec::Serial);
        return phys_norm(partial_derivative(A, 1), MS::aniso(0, kInf, 2));
      };
      pl.rhs = [](const SpaceTimeField& f) {
        SpaceTimeField d = partial_riesz(f, 1, 0.5);
        SpaceTimeField a = partial_riesz(d, 0, -0.5);
        return phys_norm(a, MS::aniso(1, 1, 2));
      };
      break;

    default:
      require(false, "estimate id has no ratio pipeline");
  }
  return pl;
}

}  // namespace

const char* estimate_name(EstimateId id) {
  switch (id) {
    case EstimateId::GSE1: return "GSE1";
    case EstimateId::GSE2: return "GSE2";
    case EstimateId::GSE3: return "GSE3";
    case EstimateId::STRI: return "STRI";
    case EstimateId::MAX: return "MAX";
    case EstimateId::MAXD: return "MAXD";
    case EstimateId::SM1: return "SM1";
    case EstimateId::SMMAX: return "SMMAX";
    case EstimateId::STSM: return "STSM";
    case EstimateId::INT1: return "INT1";
    case EstimateId::INT2: return "INT2";
    case EstimateId::KMAX1: return "KMAX1";
    case EstimateId::KMAX2: return "KMAX2";
    case EstimateId::ORTH: return "ORTH";
    case EstimateId::CONJ43: return "CONJ43";
  }
  return "?";
}

EstimateId parse_estimate_id(const std::string& name) {
  static const EstimateId all[] = {
      EstimateId::GSE1,  EstimateId::GSE2,  EstimateId::GSE3,
      EstimateId::STRI,  EstimateId::MAX,   EstimateId::MAXD,
      EstimateId::SM1,   EstimateId::SMMAX, EstimateId::STSM,
      EstimateId::INT1,  EstimateId::INT2,  EstimateId::KMAX1,
      EstimateId::KMAX2, EstimateId::ORTH,  EstimateId::CONJ43};
  for (EstimateId id : all)
    if (name == estimate_name(id)) return id;
  throw std::invalid_argument("unknown estimate id: " + name);
}

SpaceTimeField random_forcing(GridPtr g, const SupportSpec& s, int rank,
                              std::uint64_t seed) {
  require(rank > 0, "forcing rank must be positive");
  SpaceTimeField f = make_field(g, FieldKind::SpaceTime);
  f.freq_mask = f.full_mask();
  const std::size_t nx = f.slice();
  for (int rho = 0; rho < rank; ++rho) {
    SpaceTimeField grho =
        random_band_limited(g, s, seed + 1000003ull * (rho + 1));
    Rng prof(seed * 2654435761ull + 97ull * rho + 13ull);
    double amp[4], om[4], th[4];
    for (int j = 0; j < 4; ++j) {
      amp[j] = 0.5 * prof.gaussian();
      om[j] = 2.0 * prof.uniform();
      th[j] = 6.283185307179586476925287 * prof.uniform();
    }
    for (int m = 0; m < g->Nt; ++m) {
      double t = g->t(m), phi = 0;
      for (int j = 0; j < 4; ++j) phi += amp[j] * std::cos(om[j] * t + th[j]);
      cplx* dst = f.data(m);
      const cplx* src = grho.data();
      for (std::size_t idx = 0; idx < nx; ++idx) dst[idx] += phi * src[idx];
    }
  }
  return f;
}

EstimateReport run_estimate(EstimateId id, const EstimateParams& p,
                            const DecompFamily& fam, int nsamples,
                            std::uint64_t seed, Exec exec) {
  require(nsamples > 0, "need at least one sample");

  if (id == EstimateId::ORTH) {
    OrthReport orep = run_orth(fam, 2, nsamples, seed, exec);
    EstimateReport rep;
    rep.id = id;
    rep.params = p;
    rep.samples.reserve(orep.rows.size());
    for (const OrthTuple& t : orep.rows) {
      SampleRatio row;
      row.k = t.k;
      row.lhs = t.out_norm;
      row.rhs = 1.0;
      row.ratio = t.expected_zero ? t.out_norm : 0.0;
      rep.samples.push_back(row);
    }
    double sum = 0;
    for (const auto& r : rep.samples) {
      rep.max_ratio = std::max(rep.max_ratio, r.ratio);
      sum += r.ratio;
    }
    rep.mean_ratio = rep.samples.empty() ? 0 : sum / rep.samples.size();
    return rep;
  }

  Pipeline pipe = build_pipeline(id, p, fam);
  const Grid& g = *fam.g;

  std::vector<std::array<int, 3>> ks;
  if (pipe.global) {
    ks.push_back({0, 0, 0});
  } else {
    require(!p.ks.empty(), "box-level estimate needs probed boxes in ks");
    for (const auto& k : p.ks) {
      for (int a = 0; a < g.n; ++a)
        require(std::abs(k[a]) <= fam.K, "probed box outside the family");
      require(std::abs(k[0]) >= pipe.min_abs_k0,
              "probed box touches the singular xi_1 = 0 plane");
    }
    ks = p.ks;
  }

  const std::int64_t tasks =
      static_cast<std::int64_t>(ks.size()) * nsamples;
  std::vector<SampleRatio> rows(static_cast<std::size_t>(tasks));
  parallel_for(tasks, exec, [&](std::int64_t ti) {
    const std::array<int, 3>& k = ks[static_cast<std::size_t>(ti / nsamples)];
    std::uint64_t s = seed + 7919ull * static_cast<std::uint64_t>(ti) + 1;
    SupportSpec sup =
        pipe.global
            ? SupportSpec::ball(fam.K - 1)
            : SupportSpec::cube({static_cast<double>(k[0]),
                                 static_cast<double>(k[1]),
                                 static_cast<double>(k[2])});
    SpaceTimeField datum = pipe.forcing ? random_forcing(fam.g, sup, 3, s)
                                        : random_band_limited(fam.g, sup, s);
    if (!pipe.global) datum = apply_box(fam, k, datum);
    SampleRatio row;
    row.k = k;
    row.seed = s;
    row.lhs = pipe.lhs(datum);
    row.rhs = pipe.rhs(datum);
    row.weight = pipe.weight(k);
    row.ratio = row.rhs > 0 ? row.lhs / (row.weight * row.rhs) : 0.0;
    rows[static_cast<std::size_t>(ti)] = row;
  });

  EstimateReport rep;
  rep.id = id;
  rep.params = p;
  double sum = 0;
  for (const SampleRatio& row : rows) {
    if (!(row.rhs > 0)) {
      ++rep.excluded;
      continue;
    }
    rep.samples.push_back(row);
    rep.max_ratio = std::max(rep.max_ratio, row.ratio);
    sum += row.ratio;
  }
  rep.mean_ratio = rep.samples.empty() ? 0 : sum / rep.samples.size();
  return rep;
}

FitResult fit_scaling(const std::vector<double>& u,
                      const std::vector<double>& v) {
  require(u.size() == v.size(), "fit needs matching value lists");
  require(u.size() >= 4, "fit needs at least 4 points");
  const std::size_t m = u.size();
  std::vector<double> x(m), y(m);
  for (std::size_t j = 0; j < m; ++j) {
    require(u[j] > 0 && v[j] > 0, "fit needs positive data");
    if (j > 0) require(u[j] > u[j - 1], "fit abscissae must increase");
    x[j] = std::log(u[j]);
    y[j] = std::log(v[j]);
  }
  double xb = 0, yb = 0;
  for (std::size_t j = 0; j < m; ++j) {
    xb += x[j];
    yb += y[j];
  }
  xb /= m;
  yb /= m;
  double sxx = 0, sxy = 0;
  for (std::size_t j = 0; j < m; ++j) {
    sxx += (x[j] - xb) * (x[j] - xb);
    sxy += (x[j] - xb) * (y[j] - yb);
  }
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = yb - fit.slope * xb;
  double rss = 0;
  for (std::size_t j = 0; j < m; ++j) {
    double r = y[j] - fit.slope * x[j] - fit.intercept;
    rss += r * r;
  }
  fit.std_err = std::sqrt(rss / static_cast<double>(m - 2) / sxx);
  return fit;
}

StabilityResult stability_run(EstimateId id, const EstimateParams& p,
                              const DecompFamily& fam, int nsamples,
                              std::uint64_t seed, Exec exec) {
  StabilityResult out;
  out.base = run_estimate(id, p, fam, nsamples, seed, exec);
  const Grid& g = *fam.g;
  GridPtr g2 = make_grid(g.n, 2 * g.N, g.r, 2 * g.T, 2 * g.Nt, g.eps);
  DecompFamily fam2 = build_family(g2, fam.K);
  out.refined = run_estimate(id, p, fam2, nsamples, seed, exec);
  out.factor =
      out.base.max_ratio > 0 ? out.refined.max_ratio / out.base.max_ratio : 0;
  return out;
}

namespace {

// Dense spectrum patch over an axis-aligned index box; coordinates are
// signed frequency bins.
struct Patch {
  int n = 1;
  std::array<int, 3> lo{{0, 0, 0}};
  std::array<int, 3> dim{{1, 1, 1}};
  std::vector<cplx> v;

  void init(int nn, const std::array<int, 3>& l, const std::array<int, 3>& h) {
    n = nn;
    lo = l;
    std::size_t total = 1;
    for (int a = 0; a < 3; ++a) {
      dim[a] = a < n ? h[a] - l[a] + 1 : 1;
      total *= static_cast<std::size_t>(dim[a]);
    }
    v.assign(total, cplx{0.0, 0.0});
  }
  std::size_t flat(const std::array<int, 3>& s) const {
    std::size_t f = 0;
    for (int a = 0; a < n; ++a)
      f = f * dim[a] + static_cast<std::size_t>(s[a] - lo[a]);
    return f;
  }
  std::array<int, 3> coord(std::size_t f) const {
    std::array<int, 3> s{{0, 0, 0}};
    for (int a = n - 1; a >= 0; --a) {
      s[a] = lo[a] + static_cast<int>(f % dim[a]);
      f /= dim[a];
    }
    return s;
  }
};

Patch convolve(const Patch& A, const Patch& B, double prefac) {
  Patch C;
  std::array<int, 3> lo{{0, 0, 0}}, hi{{0, 0, 0}};
  for (int a = 0; a < A.n; ++a) {
    lo[a] = A.lo[a] + B.lo[a];
    hi[a] = (A.lo[a] + A.dim[a] - 1) + (B.lo[a] + B.dim[a] - 1);
  }
  C.init(A.n, lo, hi);
  for (std::size_t ia = 0; ia < A.v.size(); ++ia) {
    if (A.v[ia] == cplx{0.0, 0.0}) continue;
    std::array<int, 3> sa = A.coord(ia);
    for (std::size_t ib = 0; ib < B.v.size(); ++ib) {
      if (B.v[ib] == cplx{0.0, 0.0}) continue;
      std::array<int, 3> sb = B.coord(ib);
      std::array<int, 3> sc{{0, 0, 0}};
      for (int a = 0; a < A.n; ++a) sc[a] = sa[a] + sb[a];
      C.v[C.flat(sc)] += prefac * A.v[ia] * B.v[ib];
    }
  }
  return C;
}

}  // namespace

OrthReport run_orth(const DecompFamily& fam, int kappa, int tuples,
                    std::uint64_t seed, Exec exec) {
  require(kappa >= 1, "product needs at least two factors");
  require(tuples > 0, "need at least one tuple");
  const Grid& g = *fam.g;
  const int n = g.n;
  const int half = fam.half;
  const int frange = 3;
  require(fam.K >= frange, "family too small for the factor boxes");
  const double thr = (kappa + 2) * (1.0 - std::ldexp(1.0, -g.r));
  const int drange = static_cast<int>(thr) + 3;
  const double prefac =
      std::pow(g.dxi / std::sqrt(2.0 * 3.14159265358979323846), n);
  double l2w = 1.0;
  for (int a = 0; a < n; ++a) l2w *= g.dxi;

  std::vector<OrthTuple> rows(static_cast<std::size_t>(tuples));
  parallel_for(tuples, exec, [&](std::int64_t ti) {
    Rng rng(seed + 6364136223846793005ull * static_cast<std::uint64_t>(ti) +
            1442695040888963407ull);
    auto draw_int = [&rng](int lo, int hi) {
      double u = rng.uniform();  // (0, 1]
      int span = hi - lo + 1;
      int j = static_cast<int>(u * span - 1e-12);
      return lo + std::min(span - 1, std::max(0, j));
    };
    OrthTuple tup;
    std::array<int, 3> sum{{0, 0, 0}};
    Patch prod;
    for (int f = 0; f <= kappa; ++f) {
      std::array<int, 3> kf{{0, 0, 0}};
      for (int a = 0; a < n; ++a) kf[a] = draw_int(-frange, frange);
      int sign = rng.uniform() <= 0.5 ? 1 : -1;
      tup.factors.push_back(kf);
      tup.signs.push_back(sign);
      for (int a = 0; a < n; ++a) sum[a] += sign * kf[a];
      // box-localized factor spectrum (sigma weight already applied)
      std::array<int, 3> lo{{0, 0, 0}}, hi{{0, 0, 0}};
      for (int a = 0; a < n; ++a) {
        lo[a] = kf[a] * half - (half - 1);
        hi[a] = kf[a] * half + (half - 1);
      }
      Patch pf;
      pf.init(n, lo, hi);
      for (std::size_t idx = 0; idx < pf.v.size(); ++idx) {
        std::array<int, 3> s = pf.coord(idx);
        double w = 1.0;
        for (int a = 0; a < n; ++a)
          w *= fam.eta_node(s[a] - static_cast<long long>(kf[a]) * half);
        cplx c = rng.gaussian_complex();
        if (w > 0) pf.v[idx] = w * c;
      }
      if (sign < 0) {
        Patch m;
        std::array<int, 3> mlo{{0, 0, 0}}, mhi{{0, 0, 0}};
        for (int a = 0; a < n; ++a) {
          mlo[a] = -hi[a];
          mhi[a] = -lo[a];
        }
        m.init(n, mlo, mhi);
        for (std::size_t idx = 0; idx < pf.v.size(); ++idx) {
          std::array<int, 3> s = pf.coord(idx);
          std::array<int, 3> ms{{0, 0, 0}};
          for (int a = 0; a < n; ++a) ms[a] = -s[a];
          m.v[m.flat(ms)] = std::conj(pf.v[idx]);
        }
        pf = std::move(m);
      }
      prod = f == 0 ? std::move(pf) : convolve(prod, pf, prefac);
    }
    for (int a = 0; a < n; ++a) {
      int d = draw_int(-drange, drange);
      tup.k[a] = std::clamp(sum[a] + d, -fam.K, fam.K);
    }
    int dist = 0;
    for (int a = 0; a < n; ++a)
      dist = std::max(dist, std::abs(tup.k[a] - sum[a]));
    tup.dist = dist;
    // exact integer form of dist > (kappa+2)(1 - 2^-r)
    tup.expected_zero =
        static_cast<long long>(dist) * half >
        static_cast<long long>(kappa + 2) * (half - 1);
    double e = 0;
    for (std::size_t idx = 0; idx < prod.v.size(); ++idx) {
      if (prod.v[idx] == cplx{0.0, 0.0}) continue;
      std::array<int, 3> s = prod.coord(idx);
      double w = 1.0;
      for (int a = 0; a < n; ++a)
        w *= fam.eta_node(s[a] - static_cast<long long>(tup.k[a]) * half);
      if (w == 0.0) continue;
      e += std::norm(prod.v[idx] * w);
    }
    tup.out_norm = std::sqrt(e * l2w);
    rows[static_cast<std::size_t>(ti)] = std::move(tup);
  });

  OrthReport rep;
  rep.kappa = kappa;
  rep.threshold = thr;
  rep.tuples = tuples;
  for (OrthTuple& t : rows) {
    if (t.expected_zero) {
      ++rep.zero_side;
      rep.max_zero_norm = std::max(rep.max_zero_norm, t.out_norm);
      if (t.out_norm != 0.0) {
        ++rep.failures;
        if (rep.failed.size() < 32) rep.failed.push_back(t);
      }
    } else if (t.out_norm > 0) {
      ++rep.nonzero_inside;
    }
  }
  rep.rows = std::move(rows);
  return rep;
}

}  // namespace unidec
