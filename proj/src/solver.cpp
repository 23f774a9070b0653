#include "unidec/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "unidec/parallel.hpp"
#include "unidec/propagator.hpp"

namespace unidec {
namespace {

constexpr double kPi = 3.14159265358979323846;

int next_pow2(int v) {
  int p = 1;
  while (p < v) p *= 2;
  return p;
}

std::size_t int_pow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

struct FactorRef {
  int buf = 0;  // 0: u-buffer, 1+a: d_{x_a} u buffer
  bool conj = false;
};

FactorRef ref_of(int slot, int n) {
  if (slot == 0) return {0, false};
  if (slot == 1) return {0, true};
  if (slot < 2 + n) return {1 + (slot - 2), false};
  return {1 + (slot - 2 - n), true};
}

struct MonomialPlan {
  cplx coeff;
  std::vector<FactorRef> factors;  // flattened with multiplicity
};

// All-axes FFT of one spatial slice of size N^n (row-major, innermost axis
// last), unitary Riemann scaling applied per axis.
void fft_slice(cplx* s, int n, int N, const Fft& fft, bool inv,
               double axis_scale, cplx* scratch) {
  const std::size_t total = int_pow(static_cast<std::size_t>(N), n);
  for (int a = 0; a < n; ++a) {
    std::size_t stride = 1;
    for (int b = a + 1; b < n; ++b) stride *= static_cast<std::size_t>(N);
    const std::size_t block = stride * static_cast<std::size_t>(N);
    const std::size_t lines = total / static_cast<std::size_t>(N);
    for (std::size_t lid = 0; lid < lines; ++lid) {
      const std::size_t chunk = lid / stride;
      const std::size_t off = lid % stride;
      fft.line(s + chunk * block + off, stride, inv, axis_scale, scratch);
    }
  }
}

// Evaluates F(A), or the telescoped difference F(A) - F(A - D), slice by
// slice on a zero-padded grid (same dxi, so the padded samples are the same
// trigonometric polynomial on a finer mesh and products are alias-free).
class PolyEvaluator {
 public:
  PolyEvaluator(GridPtr g, const NonlinearitySpec& spec, int padding)
      : g_(std::move(g)), n_(g_->n) {
    spec.validate();
    if (spec.n != n_)
      throw std::invalid_argument("nonlinearity dimension mismatch");
    if (padding < 1)
      throw std::invalid_argument("padding factor must be >= 1");
    const int deg = std::max(spec.max_degree(), 1);
    const int p = std::max(padding, (deg + 2) / 2);
    N2_ = next_pow2(p * g_->N);
    fft2_ = N2_ == g_->N ? g_->fft : std::make_shared<const Fft>(N2_);
    need_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (const auto& mon : spec.monomials) {
      MonomialPlan pl;
      pl.coeff = mon.coeff;
      for (int slot = 0; slot < 2 * n_ + 2; ++slot)
        for (int c = 0; c < mon.beta[static_cast<std::size_t>(slot)]; ++c) {
          FactorRef fr = ref_of(slot, n_);
          need_[static_cast<std::size_t>(fr.buf)] = 1;
          pl.factors.push_back(fr);
        }
      plans_.push_back(std::move(pl));
    }
  }

  int padded_size() const { return N2_; }

  SpaceTimeField operator()(const SpaceTimeField& A, const SpaceTimeField* D,
                            Exec exec) const {
    if (A.g.get() != g_.get())
      throw std::invalid_argument("field grid does not match the evaluator");
    if (!A.frequency())
      throw std::invalid_argument("evaluator wants frequency-side input");
    if (D && (D->g.get() != g_.get() || !D->frequency() || D->kind != A.kind))
      throw std::invalid_argument("difference field mismatch");

    SpaceTimeField out = make_field(g_, A.kind);
    out.freq_mask = out.full_mask();
    const std::size_t base_sz = A.slice();
    const std::size_t pad_sz = int_pow(static_cast<std::size_t>(N2_), n_);
    const int nbuf = n_ + 1;
    const double fwd_scale = (g_->L / N2_) / std::sqrt(2.0 * kPi);
    const double inv_scale = g_->dxi / std::sqrt(2.0 * kPi);

    // base-node signed bins and their padded flat positions
    std::vector<std::size_t> pad_at(base_sz);
    std::vector<double> xi_at(base_sz * static_cast<std::size_t>(n_));
    for (std::size_t i = 0; i < base_sz; ++i) {
      std::size_t f2 = 0;
      for (int a = 0; a < n_; ++a) {
        const int s = g_->sindex(g_->bin_at(i, a));
        const int b2 = s >= 0 ? s : s + N2_;
        f2 = f2 * static_cast<std::size_t>(N2_) + static_cast<std::size_t>(b2);
        xi_at[i * static_cast<std::size_t>(n_) + static_cast<std::size_t>(a)] =
            g_->dxi * s;
      }
      pad_at[i] = f2;
    }

    parallel_for(A.nt(), exec, [&](std::int64_t m) {
      thread_local std::vector<std::vector<cplx>> PA, PD, PB;
      thread_local std::vector<cplx> acc, scratch;
      PA.resize(static_cast<std::size_t>(nbuf));
      PD.resize(static_cast<std::size_t>(nbuf));
      PB.resize(static_cast<std::size_t>(nbuf));
      acc.assign(pad_sz, cplx{0.0, 0.0});
      if (scratch.size() < static_cast<std::size_t>(N2_))
        scratch.resize(static_cast<std::size_t>(N2_));

      auto load = [&](const cplx* src, int b, std::vector<cplx>& dst) {
        dst.assign(pad_sz, cplx{0.0, 0.0});
        for (std::size_t i = 0; i < base_sz; ++i) {
          cplx v = src[i];
          if (v == cplx{0.0, 0.0}) continue;
          if (b > 0)
            v *= cplx(0.0, xi_at[i * static_cast<std::size_t>(n_) +
                                 static_cast<std::size_t>(b - 1)]);
          dst[pad_at[i]] = v;
        }
        fft_slice(dst.data(), n_, N2_, *fft2_, true, inv_scale,
                  scratch.data());
      };

      const cplx* as = A.data(static_cast<int>(m));
      const cplx* ds = D ? D->data(static_cast<int>(m)) : nullptr;
      for (int b = 0; b < nbuf; ++b) {
        if (!need_[static_cast<std::size_t>(b)]) continue;
        load(as, b, PA[static_cast<std::size_t>(b)]);
        if (D) {
          load(ds, b, PD[static_cast<std::size_t>(b)]);
          auto& pb = PB[static_cast<std::size_t>(b)];
          pb.resize(pad_sz);
          const auto& pa = PA[static_cast<std::size_t>(b)];
          const auto& pd = PD[static_cast<std::size_t>(b)];
          for (std::size_t i = 0; i < pad_sz; ++i) pb[i] = pa[i] - pd[i];
        }
      }

      auto at = [&](const std::vector<std::vector<cplx>>& B,
                    const FactorRef& fr, std::size_t i) {
        const cplx v = B[static_cast<std::size_t>(fr.buf)][i];
        return fr.conj ? std::conj(v) : v;
      };
      for (const auto& pl : plans_) {
        const auto& fs = pl.factors;
        const std::size_t d = fs.size();
        if (!D) {
          for (std::size_t i = 0; i < pad_sz; ++i) {
            cplx t = pl.coeff;
            for (std::size_t l = 0; l < d; ++l) t *= at(PA, fs[l], i);
            acc[i] += t;
          }
        } else {
          for (std::size_t i = 0; i < pad_sz; ++i) {
            cplx s{0.0, 0.0};
            for (std::size_t j = 0; j < d; ++j) {
              cplx t = at(PD, fs[j], i);
              for (std::size_t l = 0; l < j; ++l) t *= at(PA, fs[l], i);
              for (std::size_t l = j + 1; l < d; ++l) t *= at(PB, fs[l], i);
              s += t;
            }
            acc[i] += pl.coeff * s;
          }
        }
      }

      fft_slice(acc.data(), n_, N2_, *fft2_, false, fwd_scale, scratch.data());
      cplx* os = out.data(static_cast<int>(m));
      for (std::size_t i = 0; i < base_sz; ++i) os[i] = acc[pad_at[i]];
    });
    return out;
  }

 private:
  GridPtr g_;
  int n_ = 0;
  int N2_ = 0;
  std::shared_ptr<const Fft> fft2_;
  std::vector<MonomialPlan> plans_;
  std::vector<char> need_;
};

void regime_warnings(const SolverConfig& cfg, int n,
                     std::vector<std::string>& out) {
  const std::string& nm = cfg.norm.name;
  const double m = cfg.nl.m;
  auto warn = [&](const std::string& s) { out.push_back(s); };
  if (nm == "X1") {
    if (n < 2 || !(m > 2) || !(m > 4.0 / n))
      warn("X1 regime wants n >= 2 and kappa > max(2, 4/n); running outside it");
  } else if (nm == "X") {
    if (n < 2 || !(m > 2) || !(m > 4.0 / n))
      warn("X regime wants n >= 2 and 2 < m with m > 4/n; running outside it");
  } else if (nm == "Y1" || nm == "Y") {
    if (n < 3 || m != 2)
      warn(nm + " regime wants n >= 3 and minimal degree exponent 2; running outside it");
  } else {
    warn("unrecognized working norm name: " + nm);
  }
}

SpaceTimeField spatial_slice(const SpaceTimeField& u, int m) {
  SpaceTimeField s = make_field(u.g, FieldKind::Spatial);
  s.freq_mask = s.full_mask();
  const cplx* src = u.data(m);
  std::copy(src, src + u.slice(), s.v.begin());
  return s;
}

}  // namespace

NonlinearitySpec NonlinearitySpec::dnls1(int n, const std::vector<int>& kappa,
                                         const std::vector<cplx>& lambda) {
  if (n < 1 || n > 3)
    throw std::invalid_argument("spatial dimension must be 1..3");
  if (kappa.size() != static_cast<std::size_t>(n) ||
      lambda.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("need one (kappa, lambda) pair per axis");
  NonlinearitySpec s;
  s.n = n;
  int kmin = kappa[0];
  for (int i = 0; i < n; ++i) {
    if (kappa[static_cast<std::size_t>(i)] < 1)
      throw std::invalid_argument("kappa entries must be positive integers");
    kmin = std::min(kmin, kappa[static_cast<std::size_t>(i)]);
    if (lambda[static_cast<std::size_t>(i)] == cplx{0.0, 0.0}) continue;
    Monomial mo;
    mo.beta[0] = kappa[static_cast<std::size_t>(i)];
    mo.beta[static_cast<std::size_t>(2 + i)] = 1;
    mo.coeff = lambda[static_cast<std::size_t>(i)] *
               static_cast<double>(kappa[static_cast<std::size_t>(i)] + 1);
    s.monomials.push_back(mo);
  }
  s.m = kmin;
  return s;
}

int NonlinearitySpec::max_degree() const {
  int d = 0;
  for (const auto& mo : monomials) d = std::max(d, mo.degree());
  return d;
}

void NonlinearitySpec::validate() const {
  if (n < 1 || n > 3)
    throw std::invalid_argument("spatial dimension must be 1..3");
  for (const auto& mo : monomials) {
    if (!std::isfinite(mo.coeff.real()) || !std::isfinite(mo.coeff.imag()))
      throw std::invalid_argument("monomial coefficient must be finite");
    for (std::size_t s = 0; s < mo.beta.size(); ++s) {
      if (mo.beta[s] < 0)
        throw std::invalid_argument("monomial exponents must be nonnegative");
      if (s >= static_cast<std::size_t>(2 * n + 2) && mo.beta[s] != 0)
        throw std::invalid_argument("monomial uses a variable slot beyond 2n+2");
    }
    if (mo.degree() + 1e-9 < m + 1)
      throw std::invalid_argument("monomial degree below the minimal degree m+1");
  }
}

SpaceTimeField eval_nonlinearity(const SpaceTimeField& u,
                                 const NonlinearitySpec& spec, int padding,
                                 Exec exec) {
  if (!u.physical())
    throw std::invalid_argument("eval_nonlinearity expects a physical field");
  SpaceTimeField uh = u;
  fourier_forward(uh, exec);
  PolyEvaluator ev(u.g, spec, padding);
  SpaceTimeField fh = ev(uh, nullptr, exec);
  fourier_inverse(fh, exec);
  return fh;
}

PicardResult picard_solve(const SpaceTimeField& u0hat, const SolverConfig& cfg,
                          const DecompFamily& fam, DuhamelAnchor anchor,
                          Exec exec) {
  if (u0hat.kind != FieldKind::Spatial || !u0hat.frequency())
    throw std::invalid_argument(
        "picard_solve wants a spatial frequency-side datum");
  if (cfg.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(cfg.tol > 0)) throw std::invalid_argument("tol must be positive");
  GridPtr g = u0hat.g;
  if (anchor == DuhamelAnchor::Zero && !g->has_t0())
    throw std::invalid_argument("zero-anchored solve needs the t = 0 node");

  PicardResult out;
  SolutionDiagnostics& diag = out.diag;
  regime_warnings(cfg, g->n, diag.warnings);

  PolyEvaluator F(g, cfg.nl, cfg.padding);
  auto xnorm = [&](const SpaceTimeField& f) {
    return working_norm(f, fam, cfg.norm, exec).total;
  };
  auto step = [&](const SpaceTimeField& A, const SpaceTimeField* D) {
    SpaceTimeField fh = F(A, D, exec);
    SpaceTimeField d = anchor == DuhamelAnchor::Zero
                           ? duhamel(fh, exec)
                           : duhamel_from_left(fh, exec);
    for (auto& c : d.v) c *= cplx(0.0, -1.0);
    return d;
  };

  out.u = evolve_trajectory(u0hat, exec);
  SpaceTimeField prev_d;
  double prev_dn = 0;
  int bad = 0;
  for (int m = 0; m < cfg.max_iter; ++m) {
    SpaceTimeField d = step(out.u, m == 0 ? nullptr : &prev_d);
    const double dn = xnorm(d);
    const double un = xnorm(out.u);
    if (!std::isfinite(dn) || !std::isfinite(un))
      throw std::runtime_error("picard_solve: non-finite norm at iterate " +
                               std::to_string(m));
    IterateStats st;
    st.iter = m;
    st.unorm = un;
    st.dnorm = dn;
    st.ratio = m > 0 && prev_dn > 0 ? dn / prev_dn : 0.0;
    diag.iterates.push_back(st);
    bad = m > 0 && st.ratio >= 1.0 ? bad + 1 : 0;
    for (std::size_t i = 0; i < out.u.v.size(); ++i) out.u.v[i] += d.v[i];
    prev_d = std::move(d);
    prev_dn = dn;
    if (dn <= cfg.tol) break;
    if (bad >= 3) {
      diag.contracting = false;
      break;
    }
  }
  diag.iterations = static_cast<int>(diag.iterates.size());
  SpaceTimeField dfin = step(out.u, &prev_d);
  diag.final_residual = xnorm(dfin);
  diag.converged = diag.final_residual <= cfg.tol;
  return out;
}

double residual(const SpaceTimeField& u, const SpaceTimeField& u0hat,
                const SolverConfig& cfg, const DecompFamily& fam,
                DuhamelAnchor anchor, Exec exec) {
  if (u.kind != FieldKind::SpaceTime || !u.frequency())
    throw std::invalid_argument("residual wants a frequency-side trajectory");
  if (u.g.get() != u0hat.g.get())
    throw std::invalid_argument("iterate and datum live on different grids");
  PolyEvaluator F(u.g, cfg.nl, cfg.padding);
  SpaceTimeField traj = evolve_trajectory(u0hat, exec);
  SpaceTimeField fh = F(u, nullptr, exec);
  SpaceTimeField a = anchor == DuhamelAnchor::Zero ? duhamel(fh, exec)
                                                   : duhamel_from_left(fh, exec);
  for (std::size_t i = 0; i < traj.v.size(); ++i)
    traj.v[i] += cplx(0.0, -1.0) * a.v[i] - u.v[i];
  return working_norm(traj, fam, cfg.norm, exec).total;
}

SpaceTimeField scattering_state(const PicardResult& sol, int direction) {
  if (direction != 1 && direction != -1)
    throw std::invalid_argument("direction must be +1 or -1");
  if (!sol.diag.converged)
    throw std::invalid_argument("scattering_state wants a converged solution");
  const Grid& g = *sol.u.g;
  const int m = direction > 0 ? g.Nt - 1 : 0;
  return free_evolve(spatial_slice(sol.u, m), -g.t(m));
}

double scattering_cauchy(const PicardResult& sol, int direction, double s,
                         const DecompFamily& fam) {
  if (direction != 1 && direction != -1)
    throw std::invalid_argument("direction must be +1 or -1");
  if (!sol.diag.converged)
    throw std::invalid_argument("scattering_cauchy wants a converged solution");
  const Grid& g = *sol.u.g;
  const int m_edge = direction > 0 ? g.Nt - 1 : 0;
  const int m_half = direction > 0 ? g.Nt / 2 + g.Nt / 4 : g.Nt / 4;
  SpaceTimeField a = free_evolve(spatial_slice(sol.u, m_edge), -g.t(m_edge));
  SpaceTimeField b = free_evolve(spatial_slice(sol.u, m_half), -g.t(m_half));
  for (std::size_t i = 0; i < a.v.size(); ++i) a.v[i] -= b.v[i];
  return modulation_norm(a, s, fam);
}

ScatteringResult scattering_operator(const SpaceTimeField& uminus_hat,
                                     const SolverConfig& cfg,
                                     const DecompFamily& fam, Exec exec) {
  PicardResult r =
      picard_solve(uminus_hat, cfg, fam, DuhamelAnchor::Left, exec);
  const Grid& g = *r.u.g;
  const int m = g.Nt - 1;
  ScatteringResult s;
  s.u_plus = free_evolve(spatial_slice(r.u, m), -g.t(m));
  s.diag = std::move(r.diag);
  return s;
}

double datum_regularity(const WorkingNormSpec& norm) {
  if (norm.name == "X1") return 0.5;
  if (norm.name == "X") return 1.5;
  if (norm.name == "Y1") return 1.5;
  if (norm.name == "Y") return 2.5;
  throw std::invalid_argument("unknown working norm name: " + norm.name);
}

SpaceTimeField small_datum(GridPtr g, const SupportSpec& sup, double s,
                           double delta, const DecompFamily& fam,
                           std::uint64_t seed) {
  if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
  SpaceTimeField f = random_band_limited(std::move(g), sup, seed);
  const double nm = modulation_norm(f, s, fam);
  if (!(nm > 0)) throw std::runtime_error("datum has zero modulation norm");
  const double c = delta / nm;
  for (auto& v : f.v) v *= c;
  return f;
}

}  // namespace unidec
