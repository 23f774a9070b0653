#include "unidec/norms.hpp"

#include <cmath>

#include "unidec/propagator.hpp"
#include <limits>
#include <stdexcept>

namespace unidec {

namespace {
struct Reducer {
  double p;
  bool inf;
  double acc = 0;
  explicit Reducer(double p_) : p(p_), inf(std::isinf(p_)) {}
  void add(double v, double w) {
    if (inf)
      acc = std::max(acc, v);
    else if (p == 2.0)
      acc += v * v * w;
    else if (p == 1.0)
      acc += v * w;
    else
      acc += std::pow(v, p) * w;
  }
  void add_pow(double vp, double w) {  // v already raised to p
    if (inf)
      acc = std::max(acc, vp);
    else
      acc += vp * w;
  }
  double done() const { return inf ? acc : std::pow(acc, 1.0 / p); }
};
}  // namespace

double mixed_norm(const SpaceTimeField& f, const MixedNormSpec& spec) {
  if (!f.physical())
    throw std::invalid_argument("mixed_norm expects a physical-side field");
  const Grid& g = *f.g;
  const std::size_t nx = f.slice();
  const int nt = f.nt();
  const double dtw = f.kind == FieldKind::SpaceTime ? g.dt() : 1.0;
  const double dx = g.dx();

  if (spec.kind == MixedNormSpec::Kind::Joint) {
    Reducer r(spec.p1);
    double w = dtw;
    for (int a = 0; a < g.n; ++a) w *= dx;
    for (const cplx& z : f.v) r.add(std::abs(z), w);
    return r.done();
  }

  if (spec.kind == MixedNormSpec::Kind::TimeOuter) {
    Reducer rt(spec.p1);
    double wx = 1.0;
    for (int a = 0; a < g.n; ++a) wx *= dx;
    for (int m = 0; m < nt; ++m) {
      Reducer rx(spec.p2);
      const cplx* s = f.data(m);
      for (std::size_t i = 0; i < nx; ++i) rx.add(std::abs(s[i]), wx);
      rt.add(rx.done(), dtw);
    }
    return rt.done();
  }

  // Aniso: inner time with p3, mid other-space with p2, outer axis with p1.
  const int axis = spec.axis;
  if (axis < 0 || axis >= g.n) throw std::invalid_argument("axis out of range");
  std::vector<double> J(nx, 0.0);
  const bool inf3 = std::isinf(spec.p3);
  for (int m = 0; m < nt; ++m) {
    const cplx* s = f.data(m);
    if (inf3)
      for (std::size_t i = 0; i < nx; ++i)
        J[i] = std::max(J[i], std::abs(s[i]));
    else if (spec.p3 == 2.0)
      for (std::size_t i = 0; i < nx; ++i) J[i] += std::norm(s[i]) * dtw;
    else
      for (std::size_t i = 0; i < nx; ++i)
        J[i] += std::pow(std::abs(s[i]), spec.p3) * dtw;
  }
  if (!inf3)
    for (double& v : J) v = std::pow(v, 1.0 / spec.p3);

  const int N = g.N;
  double wmid = 1.0;
  for (int a = 0; a < g.n; ++a)
    if (a != axis) wmid *= dx;
  std::vector<Reducer> per_c(static_cast<std::size_t>(N), Reducer(spec.p2));
  for (std::size_t i = 0; i < nx; ++i)
    per_c[static_cast<std::size_t>(g.bin_at(i, axis))].add(J[i], wmid);
  Reducer outer(spec.p1);
  for (int c = 0; c < N; ++c) outer.add(per_c[c].done(), dx);
  return outer.done();
}

double bracket(const std::array<int, 3>& k, int n) {
  double s = 0;
  for (int a = 0; a < n; ++a) s += static_cast<double>(k[a]) * k[a];
  return 1.0 + std::sqrt(s);
}

double bracket_axis(int ki) { return 1.0 + std::abs(static_cast<double>(ki)); }

static SpaceTimeField to_frequency_copy(const SpaceTimeField& f) {
  SpaceTimeField c = f;
  if (c.physical())
    fourier_forward(c);
  else if (!c.frequency())
    throw std::invalid_argument("field is in a mixed representation");
  return c;
}

static void check_coverage(const SpaceTimeField& fhat, const DecompFamily& fam) {
  const Grid& g = *fhat.g;
  double inside = 0, total = 0, xi[3];
  for (int m = 0; m < fhat.nt(); ++m) {
    const cplx* s = fhat.data(m);
    for (std::size_t i = 0; i < fhat.slice(); ++i) {
      double e = std::norm(s[i]);
      total += e;
      g.freq_at(i, xi);
      if (fam.covered(xi)) inside += e;
    }
  }
  if (total > 0 && (total - inside) > 1e-8 * total)
    throw std::domain_error("field energy outside the decomposition coverage");
}

template <class PerBox>
static double family_sum(const DecompFamily& fam, double s, PerBox&& f) {
  const int K = fam.K;
  const int n = fam.g->n;
  std::array<int, 3> k{0, 0, 0};
  int idx[3] = {0, 0, 0};
  for (int a = 0; a < n; ++a) idx[a] = -K;
  double acc = 0;
  while (true) {
    for (int a = 0; a < n; ++a) k[a] = idx[a];
    acc += std::pow(bracket(k, n), s) * f(k);
    int a = n - 1;
    for (; a >= 0; --a) {
      if (++idx[a] <= K) break;
      idx[a] = -K;
    }
    if (a < 0) break;
  }
  return acc;
}

double modulation_norm(const SpaceTimeField& f, double s,
                       const DecompFamily& fam) {
  if (f.kind != FieldKind::Spatial)
    throw std::invalid_argument("modulation_norm expects a spatial field");
  SpaceTimeField fhat = to_frequency_copy(f);
  check_coverage(fhat, fam);
  const double w = l2_weight(fhat);
  return family_sum(fam, s, [&](const std::array<int, 3>& k) {
    double e = 0;
    for_box_support(fam, k, [&](std::size_t flat, double sig) {
      e += std::norm(fhat.v[flat] * sig);
    });
    return std::sqrt(e * w);
  });
}

double modulation_norm_sharp(const SpaceTimeField& f, double s,
                             const DecompFamily& fam) {
  if (f.kind != FieldKind::Spatial)
    throw std::invalid_argument("modulation_norm_sharp expects a spatial field");
  SpaceTimeField fhat = to_frequency_copy(f);
  check_coverage(fhat, fam);
  const Grid& g = *fhat.g;
  const double w = l2_weight(fhat);
  // energy of F f over the half-open unit cube centred at k
  return family_sum(fam, s, [&](const std::array<int, 3>& k) {
    double e = 0;
    for_box_support(fam, k, [&](std::size_t flat, double) {
      for (int a = 0; a < g.n; ++a) {
        double d = g.freq(g.bin_at(flat, a)) - k[a];
        if (!(d >= -0.5 && d < 0.5)) return;
      }
      e += std::norm(fhat.v[flat]);
    });
    return std::sqrt(e * w);
  });
}

double besov_norm(const SpaceTimeField& f, double s) {
  if (f.kind != FieldKind::Spatial)
    throw std::invalid_argument("besov_norm expects a spatial field");
  SpaceTimeField fhat = to_frequency_copy(f);
  const Grid& g = *fhat.g;
  const double w = l2_weight(fhat);
  int maxj = 1;
  double top = g.nyquist() * std::sqrt(static_cast<double>(g.n));
  while ((1 << maxj) < top) ++maxj;
  std::vector<double> shell(maxj + 1, 0.0);
  double xi[3];
  for (std::size_t i = 0; i < fhat.slice(); ++i) {
    g.freq_at(i, xi);
    double r = 0;
    for (int a = 0; a < g.n; ++a) r += xi[a] * xi[a];
    r = std::sqrt(r);
    int j = 0;
    if (r > 1.0) {
      j = 1;
      while (std::ldexp(1.0, j) < r) ++j;
    }
    shell[j] += std::norm(fhat.v[i]);
  }
  double acc = std::sqrt(shell[0] * w);
  for (int j = 1; j <= maxj; ++j)
    acc += std::pow(2.0, s * j) * std::sqrt(shell[j] * w);
  return acc;
}

// Shared per-box evaluation over the family of one or more components.
static std::vector<double> box_engine(const SpaceTimeField& fhat,
                                      const DecompFamily& fam,
                                      const std::vector<BoxTermSpec>& terms,
                                      Exec exec) {
  const Grid& g = *fhat.g;
  const int n = g.n, K = fam.K;
  bool need_deriv = false;
  for (const auto& t : terms) need_deriv |= t.with_derivatives;

  // family enumeration
  std::vector<std::array<int, 3>> ks;
  {
    int idx[3] = {0, 0, 0};
    for (int a = 0; a < n; ++a) idx[a] = -K;
    while (true) {
      std::array<int, 3> k{0, 0, 0};
      for (int a = 0; a < n; ++a) k[a] = idx[a];
      ks.push_back(k);
      int a = n - 1;
      for (; a >= 0; --a) {
        if (++idx[a] <= K) break;
        idx[a] = -K;
      }
      if (a < 0) break;
    }
  }

  std::vector<std::vector<double>> per_k(ks.size(),
                                         std::vector<double>(terms.size(), 0.0));
  parallel_for(static_cast<std::int64_t>(ks.size()), exec, [&](std::int64_t ki) {
    const std::array<int, 3>& k = ks[static_cast<std::size_t>(ki)];
    bool wanted = false;
    for (const auto& t : terms)
      if (!(t.restrict_ki && std::abs(k[t.weight_axis]) <= 4)) {
        wanted = true;
        break;
      }
    if (!wanted) return;
    SpaceTimeField boxed = apply_box(fam, k, fhat);
    bool any = false;
    for (const cplx& z : boxed.v)
      if (z != cplx{0.0, 0.0}) {
        any = true;
        break;
      }
    if (!any) return;
    SpaceTimeField phys0 = boxed;
    fourier_inverse_axes(phys0, [&] {
      std::vector<int> ax(n);
      for (int a = 0; a < n; ++a) ax[a] = a;
      return ax;
    }(), Exec::Serial);
    std::vector<SpaceTimeField> phys1;
    if (need_deriv) {
      for (int l = 0; l < n; ++l) {
        SpaceTimeField d = partial_derivative(boxed, l);
        std::vector<int> ax(n);
        for (int a = 0; a < n; ++a) ax[a] = a;
        fourier_inverse_axes(d, ax, Exec::Serial);
        phys1.push_back(std::move(d));
      }
    }
    auto inner_val = [&](const BoxTermSpec& term,
                         const SpaceTimeField& fld) -> double {
      double v = 0;
      for (const auto& mn : term.inner) v = std::max(v, mixed_norm(fld, mn));
      return v;
    };
    for (std::size_t c = 0; c < terms.size(); ++c) {
      const BoxTermSpec& term = terms[c];
      if (term.restrict_ki && std::abs(k[term.weight_axis]) <= 4) continue;
      double w = term.weight == BoxTermSpec::Weight::K
                     ? std::pow(bracket(k, n), term.s)
                     : std::pow(bracket_axis(k[term.weight_axis]), term.s);
      double val;
      if (!term.with_derivatives)
        val = inner_val(term, phys0);
      else {
        val = n * inner_val(term, phys0);
        for (int l = 0; l < n; ++l) val += inner_val(term, phys1[l]);
      }
      per_k[static_cast<std::size_t>(ki)][c] = w * val;
    }
  });
  std::vector<double> totals(terms.size(), 0.0);
  for (const auto& row : per_k)
    for (std::size_t c = 0; c < terms.size(); ++c) totals[c] += row[c];
  return totals;
}

double box_sum_norm(const SpaceTimeField& u, const DecompFamily& fam,
                    const BoxTermSpec& term, Exec exec) {
  SpaceTimeField fhat = to_frequency_copy(u);
  return box_engine(fhat, fam, {term}, exec)[0];
}

static const double kInf = std::numeric_limits<double>::infinity();

WorkingNormSpec WorkingNormSpec::X1(int n, double kappa) {
  WorkingNormSpec s;
  s.name = "X1";
  s.m = kappa;
  for (int i = 0; i < n; ++i) {
    BoxTermSpec t;
    t.s = 1.0;
    t.weight = BoxTermSpec::Weight::Ki;
    t.weight_axis = i;
    t.restrict_ki = true;
    t.inner = {MixedNormSpec::aniso(i, kInf, 2)};
    s.components.push_back(t);
  }
  for (int i = 0; i < n; ++i) {
    BoxTermSpec t;
    t.s = 0.5 - 1.0 / kappa;
    t.weight = BoxTermSpec::Weight::K;
    t.inner = {MixedNormSpec::aniso(i, kappa, kInf)};
    s.components.push_back(t);
  }
  BoxTermSpec t;
  t.s = 0.5;
  t.inner = {MixedNormSpec::time_outer(kInf, 2),
             MixedNormSpec::joint(2.0 + kappa)};
  s.components.push_back(t);
  return s;
}

WorkingNormSpec WorkingNormSpec::X(int n, double m) {
  WorkingNormSpec s = X1(n, m);
  s.name = "X";
  for (auto& t : s.components) t.with_derivatives = true;
  return s;
}

WorkingNormSpec WorkingNormSpec::Y1(int n) {
  WorkingNormSpec s;
  s.name = "Y1";
  s.m = 2;
  for (int i = 0; i < n; ++i) {
    BoxTermSpec t;
    t.s = 2.0;
    t.weight = BoxTermSpec::Weight::Ki;
    t.weight_axis = i;
    t.restrict_ki = true;
    t.inner = {MixedNormSpec::aniso(i, kInf, 2)};
    s.components.push_back(t);
  }
  for (int i = 0; i < n; ++i) {
    BoxTermSpec t;
    t.s = 0.0;
    t.inner = {MixedNormSpec::aniso(i, 2, kInf)};
    s.components.push_back(t);
  }
  BoxTermSpec t;
  t.s = 1.5;
  t.inner = {MixedNormSpec::time_outer(kInf, 2), MixedNormSpec::time_outer(3, 6)};
  s.components.push_back(t);
  return s;
}

WorkingNormSpec WorkingNormSpec::Y(int n) {
  WorkingNormSpec s = Y1(n);
  s.name = "Y";
  for (auto& t : s.components) t.with_derivatives = true;
  return s;
}

WorkingNormResult working_norm(const SpaceTimeField& u, const DecompFamily& fam,
                               const WorkingNormSpec& spec, Exec exec) {
  if (u.kind != FieldKind::SpaceTime)
    throw std::invalid_argument("working norms act on space-time fields");
  SpaceTimeField fhat = to_frequency_copy(u);
  WorkingNormResult res;
  res.components = box_engine(fhat, fam, spec.components, exec);
  for (double c : res.components) res.total += c;
  return res;
}

}  // namespace unidec
