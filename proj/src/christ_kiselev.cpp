#include "unidec/christ_kiselev.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>

namespace unidec {
namespace {

constexpr double kJitter = 1e-12;

void check_exponents(const CkExponents& e, int n) {
  if (e.axis < 0 || e.axis >= n) throw std::invalid_argument("axis out of range");
  for (double q : {e.q1, e.q2, e.q3}) {
    if (!std::isfinite(q) || q <= 0) throw std::invalid_argument("exponents must be finite and positive");
  }
}

void check_spacetime(const SpaceTimeField& f, const GridPtr& g) {
  if (f.kind != FieldKind::SpaceTime) throw std::invalid_argument("space-time field required");
  if (f.g.get() != g.get()) throw std::invalid_argument("field grid does not match operator grid");
}

}  // namespace

std::vector<WhitneyPair> whitney_decompose(int j_max) {
  if (j_max < 1 || j_max > 20) throw std::invalid_argument("depth must be in 1..20");
  std::vector<WhitneyPair> pairs;
  pairs.reserve((1ull << j_max) - 1);
  for (int j = 1; j <= j_max; ++j) {
    long long half = 1ll << (j - 1);
    for (long long m = 0; m < half; ++m) {
      pairs.push_back({DyadicInterval{j, 2 * m}, DyadicInterval{j, 2 * m + 1}});
    }
  }
  return pairs;
}

WhitneyReport whitney_properties(const std::vector<WhitneyPair>& pairs) {
  WhitneyReport rep;
  if (pairs.empty()) return rep;
  for (const WhitneyPair& p : pairs) {
    rep.j_max = std::max({rep.j_max, p.I.j, p.J.j});
    if (p.I.j < 1 || p.J.j < 1) throw std::invalid_argument("interval level must be >= 1");
    if (p.I.a < 0 || p.I.a >= (1ll << p.I.j) || p.J.a < 0 || p.J.a >= (1ll << p.J.j))
      throw std::invalid_argument("interval offset out of range");
  }
  if (rep.j_max > 14) throw std::invalid_argument("property check supports depth <= 14");

  rep.level_counts.assign(rep.j_max + 1, 0);
  for (const WhitneyPair& p : pairs) {
    rep.level_counts[p.I.j] += 1;
    rep.area_sum += p.I.len() * p.J.len();
    if (p.I.j != p.J.j) rep.sides_equal = false;
    double center_dist = 0.5 * (p.J.lo() + p.J.hi()) - 0.5 * (p.I.lo() + p.I.hi());
    rep.max_dist_error = std::max(rep.max_dist_error, std::abs(center_dist - p.I.len()));
    if (!(p.I.hi() <= p.J.lo())) rep.inside_triangle = false;
  }
  rep.uncovered = 0.5 - rep.area_sum;

  // Integer corners at the finest level make the overlap test exact.
  struct Box {
    long long x0, x1, y0, y1;
  };
  std::vector<Box> boxes;
  boxes.reserve(pairs.size());
  for (const WhitneyPair& p : pairs) {
    long long si = 1ll << (rep.j_max - p.I.j);
    long long sj = 1ll << (rep.j_max - p.J.j);
    boxes.push_back({p.I.a * si, (p.I.a + 1) * si, p.J.a * sj, (p.J.a + 1) * sj});
  }
  for (std::size_t u = 0; u < boxes.size() && rep.disjoint; ++u) {
    for (std::size_t v = u + 1; v < boxes.size(); ++v) {
      const Box& a = boxes[u];
      const Box& b = boxes[v];
      if (a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1) {
        rep.disjoint = false;
        break;
      }
    }
  }

  std::map<std::pair<int, long long>, int> per_j;
  for (const WhitneyPair& p : pairs) rep.max_i_per_j = std::max(rep.max_i_per_j, ++per_j[{p.J.j, p.J.a}]);
  return rep;
}

LevelFunction level_function(const SpaceTimeField& f, const CkExponents& e) {
  const Grid& g = *f.g;
  check_exponents(e, g.n);
  if (f.kind != FieldKind::SpaceTime || !f.physical())
    throw std::invalid_argument("level_function needs a physical space-time field");

  const int Nt = g.Nt;
  const std::size_t nx = f.slice();
  const double dt = g.dt();
  const double dx = g.dx();
  const double w_other = std::pow(dx, g.n - 1);
  const int nbins = g.N;

  LevelFunction lf;
  lf.F.assign(Nt + 1, 0.0);
  lf.phi.assign(Nt, 0.0);

  std::vector<double> cum(nx, 0.0);
  std::vector<double> inner(nbins, 0.0);
  for (int m = 0; m < Nt; ++m) {
    const cplx* s = f.data(m);
    for (std::size_t i = 0; i < nx; ++i) cum[i] += std::pow(std::abs(s[i]), e.q3) * dt;
    std::fill(inner.begin(), inner.end(), 0.0);
    for (std::size_t i = 0; i < nx; ++i)
      inner[g.bin_at(static_cast<long long>(i), e.axis)] += std::pow(cum[i], e.q2 / e.q3) * w_other;
    double outer = 0;
    for (int b = 0; b < nbins; ++b) outer += std::pow(inner[b], e.q1 / e.q2) * dx;
    lf.F[m + 1] = outer;
  }
  const double total = lf.F[Nt];
  if (!(total > 0) || !std::isfinite(total)) throw std::invalid_argument("level_function needs a nonzero field");
  for (double& v : lf.F) v /= total;
  const double denom = 1.0 + Nt * kJitter;
  for (int m = 0; m < Nt; ++m) lf.phi[m] = (lf.F[m] + m * kJitter) / denom;
  return lf;
}

double lemma_a2_exponent(double q1, double q2, double q3) {
  return std::min({q2 / (q1 * q3), 1.0 / q1, 1.0 / q2, 1.0 / q3});
}

double lemma_a2_ratio(const SpaceTimeField& f, const LevelFunction& lf, double lo, double hi,
                      const CkExponents& e) {
  const Grid& g = *f.g;
  check_exponents(e, g.n);
  if (f.kind != FieldKind::SpaceTime || !f.physical())
    throw std::invalid_argument("lemma_a2_ratio needs a physical space-time field");
  if (lf.F.size() != static_cast<std::size_t>(g.Nt) + 1) throw std::invalid_argument("level function size mismatch");
  if (!(lo >= 0 && lo < hi && hi <= 1)) throw std::invalid_argument("interval must satisfy 0 <= lo < hi <= 1");

  MixedNormSpec spec = MixedNormSpec::aniso3(e.axis, e.q1, e.q2, e.q3);
  const double full = mixed_norm(f, spec);
  if (!(full > 0)) throw std::invalid_argument("lemma_a2_ratio needs a nonzero field");

  SpaceTimeField masked = f;
  bool any = false;
  for (int m = 0; m < g.Nt; ++m) {
    const bool in = lf.F[m] >= lo && lf.F[m + 1] <= hi;
    any = any || in;
    if (!in) std::fill(masked.data(m), masked.data(m) + masked.slice(), cplx(0));
  }
  if (!any) return 0;
  return mixed_norm(masked, spec) / (full * std::pow(hi - lo, lemma_a2_exponent(e.q1, e.q2, e.q3)));
}

KernelOp make_kernel(GridPtr g, const std::function<cplx(double, double)>& k) {
  if (!g) throw std::invalid_argument("null grid");
  KernelOp op;
  op.g = g;
  op.K.resize(static_cast<std::size_t>(g->Nt) * g->Nt);
  for (int m = 0; m < g->Nt; ++m)
    for (int mp = 0; mp < g->Nt; ++mp) op.K[static_cast<std::size_t>(m) * g->Nt + mp] = k(g->t(m), g->t(mp));
  return op;
}

namespace {

// out[m] += w * K[m][m'] f[m'] over the given column set, rows in `rows`.
void accumulate(const KernelOp& op, const SpaceTimeField& f, SpaceTimeField& out,
                const std::vector<int>& rows, const std::vector<int>& cols, double w) {
  const std::size_t nx = f.slice();
  const int Nt = op.g->Nt;
  for (int m : rows) {
    cplx* dst = out.data(m);
    for (int mp : cols) {
      const cplx kw = op.K[static_cast<std::size_t>(m) * Nt + mp] * w;
      if (kw == cplx(0)) continue;
      const cplx* src = f.data(mp);
      for (std::size_t i = 0; i < nx; ++i) dst[i] += kw * src[i];
    }
  }
}

}  // namespace

SpaceTimeField kernel_apply(const KernelOp& op, const SpaceTimeField& f) {
  check_spacetime(f, op.g);
  SpaceTimeField out = make_field(op.g, FieldKind::SpaceTime);
  out.freq_mask = f.freq_mask;
  out.zero_plane_applied = f.zero_plane_applied;
  std::vector<int> all(op.g->Nt);
  for (int m = 0; m < op.g->Nt; ++m) all[m] = m;
  accumulate(op, f, out, all, all, op.g->dt());
  return out;
}

SpaceTimeField kernel_apply_restricted(const KernelOp& op, const SpaceTimeField& f) {
  check_spacetime(f, op.g);
  if (!op.g->has_t0()) throw std::invalid_argument("restricted kernel needs the t = 0 node");
  SpaceTimeField out = make_field(op.g, FieldKind::SpaceTime);
  out.freq_mask = f.freq_mask;
  out.zero_plane_applied = f.zero_plane_applied;
  const int t0 = op.g->t0();
  std::vector<int> cols;
  for (int m = t0; m < op.g->Nt; ++m) {
    cols.push_back(m);  // columns t' in [0, t], grown one node per row
    accumulate(op, f, out, {m}, cols, op.g->dt());
  }
  return out;
}

RestrictionResult restriction_via_whitney(const KernelOp& op, const SpaceTimeField& f,
                                          const CkExponents& e, int j_max,
                                          const MixedNormSpec& target) {
  check_spacetime(f, op.g);
  if (!f.physical()) throw std::invalid_argument("restriction_via_whitney needs a physical field");
  if (j_max < 1 || j_max > 40) throw std::invalid_argument("depth must be in 1..40");

  const LevelFunction lf = level_function(f, e);
  const int Nt = op.g->Nt;
  const double dt = op.g->dt();

  RestrictionResult res{make_field(op.g, FieldKind::SpaceTime), make_field(op.g, FieldKind::SpaceTime), 0.0};

  // chi_J(t) T(chi_I f) summed over the pairs, one level at a time. A slice
  // belongs to the cell holding its phi value; the pair (2c, 2c+1) is in the
  // decomposition exactly when both cells are populated.
  for (int j = 1; j <= j_max; ++j) {
    const double scale = std::ldexp(1.0, j);
    std::map<long long, std::vector<int>> cells;
    for (int m = 0; m < Nt; ++m) cells[static_cast<long long>(lf.phi[m] * scale)].push_back(m);
    for (const auto& [c, rows] : cells) {
      if (c % 2 == 0) continue;
      auto it = cells.find(c - 1);
      if (it == cells.end()) continue;
      accumulate(op, f, res.whitney, rows, it->second, dt);
    }
  }

  // phi is strictly increasing, so strict phi-order is strict time order.
  std::vector<int> cols;
  for (int m = 0; m < Nt; ++m) {
    if (!cols.empty()) accumulate(op, f, res.strict, {m}, cols, dt);
    cols.push_back(m);
  }

  SpaceTimeField diff = res.whitney;
  for (std::size_t i = 0; i < diff.v.size(); ++i) diff.v[i] -= res.strict.v[i];
  res.defect = mixed_norm(diff, target);
  return res;
}

bool prop_a1_admissible(double p1, double p2, double p3, double q1, double q2, double q3) {
  return std::min({p1, p2, p3}) > std::max({q1, q2, q3, q1 * q3 / q2});
}

double b1_slack(double r, double s, double a, double b) {
  if (!(r >= s && s >= 0) || !(a >= b && b > 0)) throw std::invalid_argument("b1 needs r >= s >= 0, a >= b > 0");
  const double lhs = std::pow(r, a) - std::pow(s, a);
  const double rhs = (a / b) * (std::pow(r, b) - std::pow(s, b)) * (std::pow(r, a - b) + std::pow(s, a - b));
  return rhs - lhs;
}

double b2_slack(double r, double s, double a, double b) {
  if (!(r >= s && s >= 0) || !(b >= a && a > 0)) throw std::invalid_argument("b2 needs r >= s >= 0, b >= a > 0");
  const double lhs = std::pow(r, a) - std::pow(s, a);
  const double rhs = std::pow(std::pow(r, b) - std::pow(s, b), a / b);
  return rhs - lhs;
}

}  // namespace unidec
