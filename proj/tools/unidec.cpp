// Batch front-end: estimate verification, sharpness sweeps, small-data
// solves, scattering, norm dumps, Whitney reports. Outputs are deterministic
// for a fixed config + seed; every report embeds the resolved config and the
// library version. UNIDEC_THREADS caps the worker count.
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "unidec/christ_kiselev.hpp"
#include "unidec/decomp.hpp"
#include "unidec/estimates.hpp"
#include "unidec/grid.hpp"
#include "unidec/io.hpp"
#include "unidec/norms.hpp"
#include "unidec/propagator.hpp"
#include "unidec/solver.hpp"
#include "unidec/tensor_sweep.hpp"

using json = nlohmann::json;
using namespace unidec;

namespace {

struct Ctx {
  std::map<std::string, std::string> file_cfg;  // config file values
  std::map<std::string, std::string> resolved;  // everything actually used
  std::string out = ".";
};

std::map<std::string, std::string> load_config(const std::string& path) {
  std::map<std::string, std::string> cfg;
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) cfg[key] = val;
  }
  return cfg;
}

std::string lookup(const Ctx& ctx, const std::string& key, const std::string& fallback) {
  auto it = ctx.file_cfg.find(key);
  return it == ctx.file_cfg.end() ? fallback : it->second;
}

void put(Ctx& ctx, const std::string& key, const std::string& v) { ctx.resolved[key] = v; }
void put(Ctx& ctx, const std::string& key, double v) { ctx.resolved[key] = format_double(v); }
void put(Ctx& ctx, const std::string& key, int v) { ctx.resolved[key] = std::to_string(v); }
void put(Ctx& ctx, const std::string& key, std::uint64_t v) { ctx.resolved[key] = std::to_string(v); }

std::string out_path(const Ctx& ctx, const std::string& name) {
  std::filesystem::create_directories(ctx.out);
  return (std::filesystem::path(ctx.out) / name).string();
}

json base_report(const Ctx& ctx) {
  json j;
  j["version"] = kVersion;
  json cfg = json::object();
  for (const auto& [k, v] : ctx.resolved) cfg[k] = v;
  j["config"] = cfg;
  return j;
}

std::string csv_preamble(const Ctx& ctx) {
  std::string s = "# unidec ";
  s += kVersion;
  s += '\n';
  for (const auto& [k, v] : ctx.resolved) s += "# " + k + " = " + v + "\n";
  return s;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoi(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty integer list: " + s);
  return out;
}

std::vector<double> parse_reals(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty list: " + s);
  return out;
}

std::vector<std::array<int, 3>> parse_boxes(const std::vector<std::string>& specs) {
  std::vector<std::array<int, 3>> ks;
  for (const std::string& s : specs) {
    std::stringstream ss(s);
    std::string group;
    while (std::getline(ss, group, ';')) {
      std::vector<int> c = parse_ints(group);
      if (c.size() > 3) throw std::invalid_argument("box has more than 3 components: " + group);
      std::array<int, 3> k{0, 0, 0};
      for (std::size_t a = 0; a < c.size(); ++a) k[a] = c[a];
      ks.push_back(k);
    }
  }
  return ks;
}

std::string box_str(const std::array<int, 3>& k, int n) {
  std::string s;
  for (int a = 0; a < n; ++a) {
    if (a) s += ';';
    s += std::to_string(k[a]);
  }
  return s;
}

struct GridFlags {
  int n = 2, N = 64, r = 2, Nt = 32, K = 6;
  double T = 2;
};

void add_grid_flags(CLI::App& app, GridFlags& gf, const Ctx& ctx) {
  gf.n = std::stoi(lookup(ctx, "grid.n", std::to_string(gf.n)));
  gf.N = std::stoi(lookup(ctx, "grid.N", std::to_string(gf.N)));
  gf.r = std::stoi(lookup(ctx, "grid.r", std::to_string(gf.r)));
  gf.Nt = std::stoi(lookup(ctx, "grid.Nt", std::to_string(gf.Nt)));
  gf.K = std::stoi(lookup(ctx, "family.K", std::to_string(gf.K)));
  gf.T = std::stod(lookup(ctx, "grid.T", format_double(gf.T)));
  app.add_option("--n", gf.n, "space dimension");
  app.add_option("--N", gf.N, "spatial nodes per axis (power of 2)");
  app.add_option("--r", gf.r, "frequency spacing exponent");
  app.add_option("--Nt", gf.Nt, "time samples");
  app.add_option("--T", gf.T, "half window length");
  app.add_option("--K", gf.K, "family radius");
}

void record_grid(Ctx& ctx, const GridFlags& gf) {
  put(ctx, "grid.n", gf.n);
  put(ctx, "grid.N", gf.N);
  put(ctx, "grid.r", gf.r);
  put(ctx, "grid.Nt", gf.Nt);
  put(ctx, "grid.T", gf.T);
  put(ctx, "family.K", gf.K);
}

void write_json_file(const Ctx& ctx, const std::string& name, const json& j) {
  write_text(out_path(ctx, name), j.dump(2) + "\n");
}

// ---------------------------------------------------------------- verify --

int cmd_verify(Ctx& ctx, int argc, char** argv) {
  CLI::App app{"run one estimate of the catalog"};
  std::string spec_id;
  app.add_option("spec-id", spec_id, "estimate id (GSE1..CONJ43)")->required();
  EstimateParams p;
  p.q = std::stod(lookup(ctx, "estimate.q", "4"));
  p.gamma = std::stod(lookup(ctx, "estimate.gamma", "6"));
  p.r = std::stod(lookup(ctx, "estimate.sr", "4"));
  p.axis = std::stoi(lookup(ctx, "estimate.axis", "0"));
  p.variant = std::stoi(lookup(ctx, "estimate.variant", "1"));
  p.sigma = std::stod(lookup(ctx, "estimate.sigma", "1"));
  p.alpha_axis = std::stoi(lookup(ctx, "estimate.alpha_axis", "0"));
  p.p_joint = std::stod(lookup(ctx, "estimate.p", "4"));
  app.add_option("--q", p.q, "maximal exponent q");
  app.add_option("--gamma", p.gamma, "Strichartz time exponent");
  app.add_option("--sr", p.r, "Strichartz space exponent");
  app.add_option("--axis", p.axis, "distinguished axis (0-based)");
  app.add_option("--variant", p.variant, "statement variant");
  app.add_option("--sigma", p.sigma, "sum-mode weight exponent");
  app.add_option("--alpha-axis", p.alpha_axis, "sum restriction axis");
  app.add_option("--p", p.p_joint, "joint-norm exponent");
  std::vector<std::string> kflags;
  app.add_option("--k", kflags, "probed boxes, e.g. --k 4,0 --k 8,0");
  std::string k1_list = lookup(ctx, "estimate.k1", "");
  app.add_option("--k1", k1_list, "tensor sweep k1 values (MAX only)");
  int samples = std::stoi(lookup(ctx, "estimate.samples", "8"));
  app.add_option("--samples", samples, "draws per box");
  bool stability = lookup(ctx, "estimate.stability", "0") != "0";
  app.add_flag("--stability", stability, "rerun on the doubled grid");
  int tuples = std::stoi(lookup(ctx, "orth.tuples", "2000"));
  app.add_option("--tuples", tuples, "orthogonality tuples");
  int orth_kappa = std::stoi(lookup(ctx, "orth.kappa", "2"));
  app.add_option("--kappa", orth_kappa, "orthogonality factor count - 1");
  GridFlags gf;
  add_grid_flags(app, gf, ctx);
  std::uint64_t seed = std::stoull(lookup(ctx, "seed", "1"));
  app.add_option("--seed", seed, "base seed");
  app.add_option("--out", ctx.out, "output directory");
  std::string config_path;
  app.add_option("--config", config_path, "key-value config file");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  EstimateId id = parse_estimate_id(spec_id);
  put(ctx, "command", std::string("verify ") + estimate_name(id));
  put(ctx, "seed", seed);
  put(ctx, "estimate.samples", samples);

  if (id == EstimateId::MAX && !k1_list.empty()) {
    std::vector<int> k1s = parse_ints(k1_list);
    put(ctx, "estimate.k1", k1_list);
    put(ctx, "estimate.q", p.q);
    std::vector<MaxSweepPoint> pts = max_tensor_run(k1s, p.q, samples, seed);
    std::vector<double> xs, ys;
    std::string csv = csv_preamble(ctx) + "spec-id,params,sample-seed,ratio\n";
    json jpts = json::array();
    for (const MaxSweepPoint& pt : pts) {
      xs.push_back(pt.k1);
      ys.push_back(pt.lhs_mean);
      const double w = std::pow(1.0 + std::abs(pt.k1), 1.0 / p.q);
      csv += csv_row({"MAX", "k1=" + std::to_string(pt.k1) + ";q=" + format_double(p.q),
                      std::to_string(seed), format_double(pt.lhs_mean / w)});
      jpts.push_back({{"k1", pt.k1},
                      {"lhs_mean", pt.lhs_mean},
                      {"lhs_max", pt.lhs_max},
                      {"ratio", pt.lhs_mean / w}});
    }
    write_text(out_path(ctx, "estimates.csv"), csv);
    FitResult fit = fit_scaling(xs, ys);
    json j = base_report(ctx);
    j["spec"] = "MAX";
    j["mode"] = "tensor-sweep";
    j["slope"] = fit.slope;
    j["std_err"] = fit.std_err;
    j["intercept"] = fit.intercept;
    j["points"] = jpts;
    write_json_file(ctx, "fits.json", j);
    return 0;
  }

  record_grid(ctx, gf);
  GridPtr g = make_grid(gf.n, gf.N, gf.r, gf.T, gf.Nt);
  DecompFamily fam = build_family(g, gf.K);

  if (id == EstimateId::ORTH) {
    put(ctx, "orth.tuples", tuples);
    put(ctx, "orth.kappa", orth_kappa);
    OrthReport rep = run_orth(fam, orth_kappa, tuples, seed);
    json j = base_report(ctx);
    j["spec"] = "ORTH";
    j["kappa"] = rep.kappa;
    j["threshold"] = rep.threshold;
    j["tuples"] = rep.tuples;
    j["zero_side"] = rep.zero_side;
    j["failures"] = rep.failures;
    j["max_zero_norm"] = rep.max_zero_norm;
    j["nonzero_inside"] = rep.nonzero_inside;
    write_json_file(ctx, "orth.json", j);
    return rep.failures == 0 ? 0 : 3;
  }

  if (!kflags.empty()) {
    p.ks = parse_boxes(kflags);
  } else {
    p.ks = {{0, 0, 0}, {2, 0, 0}, {4, 0, 0}};
    for (auto& k : p.ks) k[0] = std::min(k[0], gf.K);
  }
  std::string params = "axis=" + std::to_string(p.axis) + ";q=" + format_double(p.q) +
                       ";gamma=" + format_double(p.gamma) + ";sr=" + format_double(p.r) +
                       ";variant=" + std::to_string(p.variant) + ";sigma=" + format_double(p.sigma) +
                       ";alpha_axis=" + std::to_string(p.alpha_axis) + ";p=" + format_double(p.p_joint);
  put(ctx, "estimate.params", params);

  EstimateReport rep = run_estimate(id, p, fam, samples, seed);
  std::string csv = csv_preamble(ctx) + "spec-id,params,sample-seed,ratio\n";
  for (const SampleRatio& s : rep.samples) {
    csv += csv_row({estimate_name(id), "k=" + box_str(s.k, gf.n) + ";" + params,
                    std::to_string(s.seed), format_double(s.ratio)});
  }
  write_text(out_path(ctx, "estimates.csv"), csv);

  json j = base_report(ctx);
  j["spec"] = estimate_name(id);
  j["max_ratio"] = rep.max_ratio;
  j["mean_ratio"] = rep.mean_ratio;
  j["excluded"] = rep.excluded;
  j["samples"] = static_cast<int>(rep.samples.size());
  if (stability) {
    StabilityResult st = stability_run(id, p, fam, samples, seed);
    j["stability_factor"] = st.factor;
    j["refined_max_ratio"] = st.refined.max_ratio;
  }
  write_json_file(ctx, "fits.json", j);
  if (!std::isfinite(rep.max_ratio)) return 3;
  return 0;
}

// ------------------------------------------------------------- sharpness --

int cmd_sharpness(Ctx& ctx, int argc, char** argv) {
  CLI::App app{"deterministic lower-bound witness sweep"};
  std::string k1_list = lookup(ctx, "sharpness.k1", "8,16,32,64");
  double q = std::stod(lookup(ctx, "sharpness.q", "4"));
  app.add_option("--k1", k1_list, "k1 values");
  app.add_option("--q", q, "maximal exponent q");
  app.add_option("--out", ctx.out, "output directory");
  std::string config_path;
  app.add_option("--config", config_path, "key-value config file");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  put(ctx, "command", "sharpness");
  put(ctx, "sharpness.k1", k1_list);
  put(ctx, "sharpness.q", q);

  std::vector<int> k1s = parse_ints(k1_list);
  std::vector<double> xs, ys;
  std::string csv = csv_preamble(ctx) + "k1,witness_pow_q\n";
  for (int k1 : k1s) {
    const double v = sharpness_witness(k1, q);
    xs.push_back(k1);
    ys.push_back(v);
    csv += csv_row({std::to_string(k1), format_double(v)});
  }
  write_text(out_path(ctx, "sharpness.csv"), csv);
  FitResult fit = fit_scaling(xs, ys);
  json j = base_report(ctx);
  j["spec"] = "MAX-sharpness";
  j["slope"] = fit.slope;
  j["std_err"] = fit.std_err;
  j["intercept"] = fit.intercept;
  json jv = json::array();
  for (std::size_t i = 0; i < xs.size(); ++i) jv.push_back({{"k1", k1s[i]}, {"witness_pow_q", ys[i]}});
  j["points"] = jv;
  write_json_file(ctx, "fits.json", j);
  return 0;
}

// ----------------------------------------------------------------- solve --

struct SolveFlags {
  std::string preset = "dnls1-n2-k3";
  int n = 2, maxiter = 12, padding = 2;
  std::string kappa = "3,3", lambda = "1,1", norm = "X1";
  double delta = 1e-3, tol = 1e-10;
  GridFlags gf;
  std::uint64_t seed = 1;
  bool snapshot = true;
};

std::map<std::string, std::string> preset_values(const std::string& preset) {
  if (preset == "dnls1-n2-k3")
    return {{"solver.n", "2"},   {"solver.kappa", "3,3"}, {"solver.lambda", "1,1"},
            {"solver.norm", "X1"}, {"grid.N", "64"},        {"grid.r", "2"},
            {"grid.T", "2"},       {"grid.Nt", "32"},       {"family.K", "4"}};
  if (preset == "dnls1-n2-k4")
    return {{"solver.n", "2"},   {"solver.kappa", "4,4"}, {"solver.lambda", "1,1"},
            {"solver.norm", "X1"}, {"grid.N", "64"},        {"grid.r", "2"},
            {"grid.T", "2"},       {"grid.Nt", "32"},       {"family.K", "4"}};
  if (preset == "dnls1-n1-k5")
    return {{"solver.n", "1"},   {"solver.kappa", "5"},   {"solver.lambda", "1"},
            {"solver.norm", "X1"}, {"grid.N", "256"},       {"grid.r", "2"},
            {"grid.T", "2"},       {"grid.Nt", "32"},       {"family.K", "8"}};
  throw std::invalid_argument("unknown preset " + preset);
}

void add_solver_flags(CLI::App& app, SolveFlags& sf, Ctx& ctx, int argc, char** argv) {
  // The preset fills defaults; config-file values override the preset and
  // explicit flags override everything, so the preset is resolved up front.
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--preset" && i + 1 < argc) sf.preset = argv[i + 1];
  }
  sf.preset = lookup(ctx, "solver.preset", sf.preset);
  auto pv = preset_values(sf.preset);
  for (const auto& [k, v] : pv) {
    if (!ctx.file_cfg.count(k)) ctx.file_cfg[k] = v;
  }
  sf.n = std::stoi(lookup(ctx, "solver.n", "2"));
  sf.kappa = lookup(ctx, "solver.kappa", "3,3");
  sf.lambda = lookup(ctx, "solver.lambda", "1,1");
  sf.norm = lookup(ctx, "solver.norm", "X1");
  sf.delta = std::stod(lookup(ctx, "solver.delta", "1e-3"));
  sf.tol = std::stod(lookup(ctx, "solver.tol", "1e-10"));
  sf.maxiter = std::stoi(lookup(ctx, "solver.maxiter", "12"));
  sf.padding = std::stoi(lookup(ctx, "solver.padding", "2"));
  sf.seed = std::stoull(lookup(ctx, "seed", "1"));
  app.add_option("--preset", sf.preset, "named problem preset");
  app.add_option("--dim", sf.n, "space dimension");
  app.add_option("--kappa", sf.kappa, "per-axis powers, e.g. 3,3");
  app.add_option("--lambda", sf.lambda, "per-axis real coefficients");
  app.add_option("--norm", sf.norm, "working norm: X1, X, Y1, Y");
  app.add_option("--delta", sf.delta, "datum smallness");
  app.add_option("--tol", sf.tol, "correction-norm stop");
  app.add_option("--maxiter", sf.maxiter, "Picard iteration cap");
  app.add_option("--padding", sf.padding, "dealiasing factor lower bound");
  app.add_option("--seed", sf.seed, "datum seed");
  app.add_flag("--snapshot,!--no-snapshot", sf.snapshot, "write solution.udf");
  add_grid_flags(app, sf.gf, ctx);
  app.add_option("--out", ctx.out, "output directory");
}

struct SolveSetup {
  GridPtr g;
  DecompFamily fam;
  SolverConfig cfg;
  SpaceTimeField datum;
};

SolveSetup build_solve(Ctx& ctx, const SolveFlags& sf) {
  std::vector<int> kappa = parse_ints(sf.kappa);
  std::vector<double> lam = parse_reals(sf.lambda);
  std::vector<cplx> lambda(lam.begin(), lam.end());
  SolverConfig cfg;
  cfg.nl = NonlinearitySpec::dnls1(sf.n, kappa, lambda);
  if (sf.norm == "X1")
    cfg.norm = WorkingNormSpec::X1(sf.n, cfg.nl.m);
  else if (sf.norm == "X")
    cfg.norm = WorkingNormSpec::X(sf.n, cfg.nl.m);
  else if (sf.norm == "Y1")
    cfg.norm = WorkingNormSpec::Y1(sf.n);
  else if (sf.norm == "Y")
    cfg.norm = WorkingNormSpec::Y(sf.n);
  else
    throw std::invalid_argument("unknown norm " + sf.norm);
  cfg.delta = sf.delta;
  cfg.tol = sf.tol;
  cfg.max_iter = sf.maxiter;
  cfg.padding = sf.padding;

  put(ctx, "solver.preset", sf.preset);
  put(ctx, "solver.n", sf.n);
  put(ctx, "solver.kappa", sf.kappa);
  put(ctx, "solver.lambda", sf.lambda);
  put(ctx, "solver.norm", sf.norm);
  put(ctx, "solver.delta", sf.delta);
  put(ctx, "solver.tol", sf.tol);
  put(ctx, "solver.maxiter", sf.maxiter);
  put(ctx, "solver.padding", sf.padding);
  put(ctx, "seed", sf.seed);
  record_grid(ctx, sf.gf);

  GridPtr g = make_grid(sf.n, sf.gf.N, sf.gf.r, sf.gf.T, sf.gf.Nt);
  DecompFamily fam = build_family(g, sf.gf.K);
  const double s = datum_regularity(cfg.norm);
  SpaceTimeField datum = small_datum(g, SupportSpec::ball(sf.gf.K - 1.0), s, sf.delta, fam, sf.seed);
  return {g, std::move(fam), std::move(cfg), std::move(datum)};
}

json diag_json(const SolutionDiagnostics& d) {
  json it = json::array();
  for (const IterateStats& s : d.iterates)
    it.push_back({{"iter", s.iter}, {"unorm", s.unorm}, {"dnorm", s.dnorm}, {"ratio", s.ratio}});
  return {{"iterates", it},        {"converged", d.converged},
          {"contracting", d.contracting}, {"final_residual", d.final_residual},
          {"iterations", d.iterations},   {"warnings", d.warnings}};
}

int cmd_solve(Ctx& ctx, int argc, char** argv) {
  CLI::App app{"small-data Picard solve"};
  SolveFlags sf;
  std::string config_path;
  app.add_option("--config", config_path, "key-value config file");
  add_solver_flags(app, sf, ctx, argc, argv);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  put(ctx, "command", "solve");
  SolveSetup su = build_solve(ctx, sf);
  PicardResult sol = picard_solve(su.datum, su.cfg, su.fam);
  const double res = residual(sol.u, su.datum, su.cfg, su.fam);

  json j = base_report(ctx);
  j["diagnostics"] = diag_json(sol.diag);
  j["residual_direct"] = res;
  j["datum_norm"] = modulation_norm(su.datum, datum_regularity(su.cfg.norm), su.fam);
  write_json_file(ctx, "solve.json", j);
  if (sf.snapshot) save_field(sol.u, out_path(ctx, "solution.udf"));
  return sol.diag.converged && sol.diag.contracting ? 0 : 3;
}

// --------------------------------------------------------------- scatter --

int cmd_scatter(Ctx& ctx, int argc, char** argv) {
  CLI::App app{"solve and extract the scattering states"};
  SolveFlags sf;
  std::string config_path;
  app.add_option("--config", config_path, "key-value config file");
  add_solver_flags(app, sf, ctx, argc, argv);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  put(ctx, "command", "scatter");
  SolveSetup su = build_solve(ctx, sf);
  PicardResult sol = picard_solve(su.datum, su.cfg, su.fam);
  json j = base_report(ctx);
  j["diagnostics"] = diag_json(sol.diag);
  if (!sol.diag.converged) {
    write_json_file(ctx, "scatter.json", j);
    return 3;
  }
  const double s = datum_regularity(su.cfg.norm);
  SpaceTimeField up = scattering_state(sol, +1);
  SpaceTimeField um = scattering_state(sol, -1);
  j["s"] = s;
  j["u_plus_norm"] = modulation_norm(up, s, su.fam);
  j["u_minus_norm"] = modulation_norm(um, s, su.fam);
  j["datum_norm"] = modulation_norm(su.datum, s, su.fam);
  j["cauchy_plus"] = scattering_cauchy(sol, +1, s, su.fam);
  j["cauchy_minus"] = scattering_cauchy(sol, -1, s, su.fam);
  write_json_file(ctx, "scatter.json", j);
  if (sf.snapshot) {
    save_field(up, out_path(ctx, "u_plus.udf"));
    save_field(um, out_path(ctx, "u_minus.udf"));
  }
  return 0;
}

// ----------------------------------------------------------------- norms --

int cmd_norms(Ctx& ctx, int argc, char** argv) {
  CLI::App app{"per-box norm dump of a field snapshot"};
  std::string snapshot;
  app.add_option("snapshot", snapshot, "UDF1 field file")->required();
  int K = std::stoi(lookup(ctx, "family.K", "4"));
  double s = std::stod(lookup(ctx, "norms.s", "0.5"));
  double kappa = std::stod(lookup(ctx, "norms.kappa", "3"));
  app.add_option("--K", K, "family radius");
  app.add_option("--s", s, "modulation regularity");
  app.add_option("--kappa", kappa, "working-norm degree parameter");
  app.add_option("--out", ctx.out, "output directory");
  std::string config_path;
  app.add_option("--config", config_path, "key-value config file");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  put(ctx, "command", "norms " + snapshot);
  put(ctx, "family.K", K);
  put(ctx, "norms.s", s);
  put(ctx, "norms.kappa", kappa);

  SpaceTimeField f = load_field(snapshot);
  const Grid& g = *f.g;
  put(ctx, "grid.n", g.n);
  put(ctx, "grid.N", g.N);
  put(ctx, "grid.r", g.r);
  put(ctx, "grid.Nt", g.Nt);
  put(ctx, "grid.T", g.T);
  DecompFamily fam = build_family(f.g, K);

  SpaceTimeField fhat = f;
  if (fhat.physical()) {
    fourier_forward(fhat);
  } else if (!fhat.frequency()) {
    throw std::invalid_argument("snapshot has a mixed representation");
  }

  std::string csv = csv_preamble(ctx) + "k,norm-name,value\n";
  std::array<int, 3> k{0, 0, 0};
  std::vector<std::array<int, 3>> boxes;
  std::function<void(int)> enumerate = [&](int a) {
    if (a == g.n) {
      boxes.push_back(k);
      return;
    }
    for (int v = -K; v <= K; ++v) {
      k[a] = v;
      enumerate(a + 1);
    }
  };
  enumerate(0);
  for (const auto& kk : boxes) {
    SpaceTimeField box = apply_box(fam, kk, fhat);
    double value;
    std::string name;
    if (f.kind == FieldKind::Spatial) {
      value = l2_norm(box);
      name = "box_l2";
    } else {
      fourier_inverse(box);
      value = mixed_norm(box, MixedNormSpec::time_outer(std::numeric_limits<double>::infinity(), 2));
      name = "box_linf_l2";
    }
    csv += csv_row({box_str(kk, g.n), name, format_double(value)});
  }
  if (f.kind == FieldKind::Spatial) {
    csv += csv_row({"total", "l2", format_double(l2_norm(fhat))});
    csv += csv_row({"total", "modulation", format_double(modulation_norm(fhat, s, fam))});
    csv += csv_row({"total", "besov", format_double(besov_norm(fhat, s))});
  } else {
    WorkingNormSpec wn = WorkingNormSpec::X1(g.n, kappa);
    WorkingNormResult wr = working_norm(fhat, fam, wn);
    csv += csv_row({"total", "X1", format_double(wr.total)});
    for (std::size_t c = 0; c < wr.components.size(); ++c)
      csv += csv_row({"total", "X1_" + std::to_string(c), format_double(wr.components[c])});
  }
  write_text(out_path(ctx, "norms.csv"), csv);
  return 0;
}

// --------------------------------------------------------------- whitney --

int cmd_whitney(Ctx& ctx, int argc, char** argv) {
  CLI::App app{"Whitney pairs, exact properties, restriction defect decay"};
  int depth = std::stoi(lookup(ctx, "whitney.depth", "10"));
  bool defect = lookup(ctx, "whitney.defect", "0") != "0";
  std::uint64_t seed = std::stoull(lookup(ctx, "seed", "1"));
  app.add_option("--depth", depth, "maximal level (1..20; properties need <= 14)");
  app.add_flag("--defect", defect, "also run the restriction defect decay");
  app.add_option("--seed", seed, "forcing seed for the defect run");
  app.add_option("--out", ctx.out, "output directory");
  std::string config_path;
  app.add_option("--config", config_path, "key-value config file");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  put(ctx, "command", "whitney");
  put(ctx, "whitney.depth", depth);
  put(ctx, "seed", seed);

  std::vector<WhitneyPair> pairs = whitney_decompose(depth);
  std::string csv = csv_preamble(ctx) + "level,i_offset,j_offset\n";
  for (const WhitneyPair& p : pairs)
    csv += csv_row({std::to_string(p.I.j), std::to_string(p.I.a), std::to_string(p.J.a)});
  write_text(out_path(ctx, "whitney_pairs.csv"), csv);

  json j = base_report(ctx);
  j["pairs"] = static_cast<int>(pairs.size());
  if (depth <= 14) {
    WhitneyReport rep = whitney_properties(pairs);
    json counts = json::array();
    for (int lvl = 1; lvl <= rep.j_max; ++lvl) counts.push_back(rep.level_counts[lvl]);
    j["level_counts"] = counts;
    j["area_sum"] = rep.area_sum;
    j["uncovered"] = rep.uncovered;
    j["max_dist_error"] = rep.max_dist_error;
    j["sides_equal"] = rep.sides_equal;
    j["inside_triangle"] = rep.inside_triangle;
    j["disjoint"] = rep.disjoint;
    j["max_i_per_j"] = rep.max_i_per_j;
  } else {
    j["properties"] = "skipped (depth > 14)";
  }

  if (defect) {
    GridPtr g = make_grid(2, 16, 2, 2.0, 64);
    SpaceTimeField f = random_forcing(g, SupportSpec::ball(1.5), 3, seed);
    KernelOp op = make_kernel(g, [](double t, double tp) {
      const double d = t - tp;
      return cplx(std::exp(-d * d), 0.3 * std::exp(-0.5 * d * d));
    });
    CkExponents e{4, 2, 2, 0};
    std::string dcsv = csv_preamble(ctx) + "depth,defect\n";
    json decay = json::array();
    for (int d = 1; d <= depth && d <= 14; ++d) {
      RestrictionResult rr = restriction_via_whitney(op, f, e, d, MixedNormSpec::joint(2));
      dcsv += csv_row({std::to_string(d), format_double(rr.defect)});
      decay.push_back({{"depth", d}, {"defect", rr.defect}});
    }
    write_text(out_path(ctx, "defect_decay.csv"), dcsv);
    j["defect_decay"] = decay;
  }
  write_json_file(ctx, "whitney.json", j);
  return 0;
}

// ---------------------------------------------------------------- report --

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
  } else if (j.is_array()) {
    int i = 0;
    for (const auto& v : j) flatten(v, prefix + "[" + std::to_string(i++) + "]", rows);
  } else if (j.is_number_float()) {
    rows.emplace_back(prefix, format_double(j.get<double>()));
  } else if (j.is_string()) {
    rows.emplace_back(prefix, j.get<std::string>());
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

int cmd_report(Ctx& ctx, int argc, char** argv) {
  CLI::App app{"flatten JSON reports into one plot-friendly CSV"};
  std::vector<std::string> files;
  app.add_option("files", files, "JSON report files")->required();
  app.add_option("--out", ctx.out, "output directory");
  std::string config_path;
  app.add_option("--config", config_path, "key-value config file");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  put(ctx, "command", "report");
  std::string csv = csv_preamble(ctx) + "file,key,value\n";
  for (const std::string& path : files) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    json j = json::parse(in);
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(j, "", rows);
    const std::string base = std::filesystem::path(path).filename().string();
    for (const auto& [k, v] : rows) csv += csv_row({base, k, v});
  }
  write_text(out_path(ctx, "report.csv"), csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string usage =
      "usage: unidec <verify|sharpness|solve|scatter|norms|whitney|report> [options]\n"
      "       unidec <subcommand> --help for details\n";
  if (argc < 2) {
    std::fprintf(stderr, "%s", usage.c_str());
    return 64;
  }
  const std::string cmd = argv[1];
  Ctx ctx;
  try {
    for (int i = 2; i + 1 < argc; ++i) {
      if (std::string(argv[i]) == "--config") ctx.file_cfg = load_config(argv[i + 1]);
    }
    ctx.out = lookup(ctx, "out", ".");
    const int sub_argc = argc - 1;
    char** sub_argv = argv + 1;
    if (cmd == "verify") return cmd_verify(ctx, sub_argc, sub_argv);
    if (cmd == "sharpness") return cmd_sharpness(ctx, sub_argc, sub_argv);
    if (cmd == "solve") return cmd_solve(ctx, sub_argc, sub_argv);
    if (cmd == "scatter") return cmd_scatter(ctx, sub_argc, sub_argv);
    if (cmd == "norms") return cmd_norms(ctx, sub_argc, sub_argv);
    if (cmd == "whitney") return cmd_whitney(ctx, sub_argc, sub_argv);
    if (cmd == "report") return cmd_report(ctx, sub_argc, sub_argv);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  }
  std::fprintf(stderr, "unknown subcommand '%s'\n%s", cmd.c_str(), usage.c_str());
  return 64;
}
