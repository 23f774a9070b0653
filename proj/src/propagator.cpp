#include "unidec/propagator.hpp"

#include <cmath>
#include <stdexcept>

namespace unidec {

static void require_freq(const SpaceTimeField& f, const char* who) {
  if (!f.frequency())
    throw std::invalid_argument(std::string(who) + " expects a frequency-side field");
}

// e^{i t p} with p = sum eps_a xi_a^2 per node.
static std::vector<cplx> phase_table(const Grid& g, double t) {
  const std::size_t nx = static_cast<std::size_t>(g.nx());
  std::vector<cplx> e(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    double p = g.phase_sq(i) * t;
    e[i] = {std::cos(p), std::sin(p)};
  }
  return e;
}

SpaceTimeField free_evolve(const SpaceTimeField& u0hat, double t) {
  require_freq(u0hat, "free_evolve");
  if (u0hat.kind != FieldKind::Spatial)
    throw std::invalid_argument("free_evolve expects a spatial field");
  SpaceTimeField out = u0hat;
  auto e = phase_table(*out.g, t);
  for (std::size_t i = 0; i < e.size(); ++i) out.v[i] *= e[i];
  return out;
}

SpaceTimeField evolve_trajectory(const SpaceTimeField& u0hat, Exec exec) {
  require_freq(u0hat, "evolve_trajectory");
  if (u0hat.kind != FieldKind::Spatial)
    throw std::invalid_argument("evolve_trajectory expects a spatial field");
  const Grid& g = *u0hat.g;
  SpaceTimeField out = make_field(u0hat.g, FieldKind::SpaceTime);
  out.freq_mask = u0hat.freq_mask;
  const std::size_t nx = out.slice();
  std::vector<double> p(nx);
  for (std::size_t i = 0; i < nx; ++i) p[i] = g.phase_sq(i);
  parallel_for(g.Nt, exec, [&](std::int64_t m) {
    const double t = g.t(static_cast<int>(m));
    cplx* s = out.data(static_cast<int>(m));
    const cplx* u = u0hat.v.data();
    for (std::size_t i = 0; i < nx; ++i) {
      double ph = p[i] * t;
      s[i] = u[i] * cplx{std::cos(ph), std::sin(ph)};
    }
  });
  return out;
}

// Recursion A(t_{m+1}) = E A(t_m) + dt/2 (E f(t_m) + f(t_{m+1})) with
// E = e^{i dt p}; running backwards uses the same formula with dt -> -dt.
static SpaceTimeField duhamel_core(const SpaceTimeField& fhat, int m0,
                                   Exec exec) {
  require_freq(fhat, "duhamel");
  if (fhat.kind != FieldKind::SpaceTime)
    throw std::invalid_argument("duhamel expects a space-time forcing");
  const Grid& g = *fhat.g;
  SpaceTimeField out = make_field(fhat.g, FieldKind::SpaceTime);
  out.freq_mask = fhat.freq_mask;
  out.zero_plane_applied = fhat.zero_plane_applied;
  const std::size_t nx = out.slice();
  const double dt = g.dt();
  // Per-node sequential recursion in t; nodes are independent.
  parallel_for(static_cast<std::int64_t>(nx), exec, [&](std::int64_t ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    const double p = g.phase_sq(i);
    const cplx E{std::cos(dt * p), std::sin(dt * p)};
    cplx a{0.0, 0.0};
    out.v[out.slice() * m0 + i] = 0.0;
    for (int m = m0; m + 1 < g.Nt; ++m) {
      a = E * a + 0.5 * dt * (E * fhat.v[nx * m + i] + fhat.v[nx * (m + 1) + i]);
      out.v[nx * (m + 1) + i] = a;
    }
    a = 0.0;
    const cplx Ec = std::conj(E);
    for (int m = m0; m >= 1; --m) {
      a = Ec * a - 0.5 * dt * (Ec * fhat.v[nx * m + i] + fhat.v[nx * (m - 1) + i]);
      out.v[nx * (m - 1) + i] = a;
    }
  });
  return out;
}

SpaceTimeField duhamel(const SpaceTimeField& fhat, Exec exec) {
  if (!fhat.g->has_t0())
    throw std::invalid_argument("time grid does not contain t = 0");
  return duhamel_core(fhat, fhat.g->t0(), exec);
}

SpaceTimeField duhamel_from_left(const SpaceTimeField& fhat, Exec exec) {
  return duhamel_core(fhat, 0, exec);
}

SpaceTimeField wholeline_duhamel(const SpaceTimeField& fhat, Exec exec) {
  require_freq(fhat, "wholeline_duhamel");
  if (fhat.kind != FieldKind::SpaceTime)
    throw std::invalid_argument("wholeline_duhamel expects a space-time forcing");
  const Grid& g = *fhat.g;
  const std::size_t nx = fhat.slice();
  SpaceTimeField out = make_field(fhat.g, FieldKind::SpaceTime);
  out.freq_mask = fhat.freq_mask;
  parallel_for(static_cast<std::int64_t>(nx), exec, [&](std::int64_t ii) {
    const std::size_t i = static_cast<std::size_t>(ii);
    const double p = g.phase_sq(i);
    cplx acc{0.0, 0.0};
    for (int m = 0; m < g.Nt; ++m) {
      double ph = -g.t(m) * p;
      acc += fhat.v[nx * m + i] * cplx{std::cos(ph), std::sin(ph)};
    }
    acc *= g.dt();
    for (int m = 0; m < g.Nt; ++m) {
      double ph = g.t(m) * p;
      out.v[nx * m + i] = acc * cplx{std::cos(ph), std::sin(ph)};
    }
  });
  return out;
}

// Shared symbol application for the axis multipliers: sym(xi_i) with optional
// zero-plane handling for singular symbols.
static SpaceTimeField axis_multiplier(const SpaceTimeField& fhat, int axis,
                                      bool singular, ZeroPlane zp,
                                      cplx (*sym)(double, double), double par) {
  require_freq(fhat, "axis multiplier");
  const Grid& g = *fhat.g;
  if (axis < 0 || axis >= g.n) throw std::invalid_argument("axis out of range");
  SpaceTimeField out = fhat;
  const std::size_t nx = out.slice();
  if (singular) {
    bool mass = false;
    for (int m = 0; m < out.nt() && !mass; ++m) {
      const cplx* s = out.data(m);
      for (std::size_t i = 0; i < nx; ++i)
        if (g.freq(g.bin_at(i, axis)) == 0.0 && s[i] != cplx{0.0, 0.0}) {
          mass = true;
          break;
        }
    }
    if (mass) {
      if (zp == ZeroPlane::Error)
        throw std::domain_error(
            "singular axis symbol applied to a field with mass on xi_i = 0");
      out.zero_plane_applied = true;
    }
  }
  std::vector<cplx> symv(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    double q = g.freq(g.bin_at(i, axis));
    symv[i] = (singular && q == 0.0) ? cplx{0.0, 0.0} : sym(q, par);
  }
  for (int m = 0; m < out.nt(); ++m) {
    cplx* s = out.data(m);
    for (std::size_t i = 0; i < nx; ++i) s[i] *= symv[i];
  }
  return out;
}

SpaceTimeField partial_riesz(const SpaceTimeField& fhat, int axis, double sigma,
                             ZeroPlane zp) {
  bool singular = sigma < 0.0;
  return axis_multiplier(
      fhat, axis, singular, zp,
      [](double q, double s) -> cplx {
        return {std::pow(std::abs(q), s), 0.0};
      },
      sigma);
}

SpaceTimeField partial_antiderivative(const SpaceTimeField& fhat, int axis,
                                      ZeroPlane zp) {
  return axis_multiplier(
      fhat, axis, true, zp,
      [](double q, double) -> cplx {
        return cplx{0.0, -1.0} / q;  // 1/(i q)
      },
      0.0);
}

SpaceTimeField partial_derivative(const SpaceTimeField& fhat, int axis) {
  return axis_multiplier(
      fhat, axis, false, ZeroPlane::Error,
      [](double q, double) -> cplx { return {0.0, q}; }, 0.0);
}

}  // namespace unidec
