// Serial vs OpenMP timings for the heavy kernels. On a single-core host the
// parallel columns sit near 1x; the point of the target is catching
// regressions in either path and measuring the split on wider machines.
#include <chrono>
#include <cstdio>
#include <string>

#include "unidec/decomp.hpp"
#include "unidec/estimates.hpp"
#include "unidec/grid.hpp"
#include "unidec/norms.hpp"
#include "unidec/parallel.hpp"
#include "unidec/propagator.hpp"
#include "unidec/solver.hpp"

using namespace unidec;

namespace {

template <class F>
double time_ms(F&& body, int reps) {
  using clock = std::chrono::steady_clock;
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto a = clock::now();
    body();
    const auto b = clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(b - a).count());
  }
  return best;
}

void row(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-24s %10.2f %10.2f %8.2fx\n", name, serial_ms, parallel_ms,
              parallel_ms > 0 ? serial_ms / parallel_ms : 0.0);
}

}  // namespace

int main(int argc, char** argv) {
  int N = 64, Nt = 32, reps = 3;
  for (int i = 1; i + 1 < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--N") N = std::stoi(argv[i + 1]);
    if (a == "--Nt") Nt = std::stoi(argv[i + 1]);
    if (a == "--reps") reps = std::stoi(argv[i + 1]);
  }
  GridPtr g = make_grid(2, N, 2, 2.0, Nt);
  DecompFamily fam = build_family(g, 4);
  std::printf("grid n=2 N=%d Nt=%d, threads=%d, best of %d\n\n", N, Nt, max_threads(), reps);
  std::printf("%-24s %10s %10s %9s\n", "kernel", "serial/ms", "openmp/ms", "speedup");

  SpaceTimeField u0 = random_band_limited(g, SupportSpec::ball(3.0), 7);
  row("evolve_trajectory",
      time_ms([&] { evolve_trajectory(u0, Exec::Serial); }, reps),
      time_ms([&] { evolve_trajectory(u0, Exec::Parallel); }, reps));

  SpaceTimeField traj = evolve_trajectory(u0, Exec::Parallel);
  SpaceTimeField phys = traj;
  fourier_inverse(phys);
  NonlinearitySpec nl = NonlinearitySpec::dnls1(2, {3, 3}, {cplx(1), cplx(1)});
  row("eval_nonlinearity",
      time_ms([&] { eval_nonlinearity(phys, nl, 2, Exec::Serial); }, reps),
      time_ms([&] { eval_nonlinearity(phys, nl, 2, Exec::Parallel); }, reps));

  WorkingNormSpec x1 = WorkingNormSpec::X1(2, 3);
  row("working_norm X1",
      time_ms([&] { working_norm(traj, fam, x1, Exec::Serial); }, reps),
      time_ms([&] { working_norm(traj, fam, x1, Exec::Parallel); }, reps));

  EstimateParams p;
  p.ks = {{2, 0, 0}};
  row("run_estimate SM1",
      time_ms([&] { run_estimate(EstimateId::SM1, p, fam, 2, 1, Exec::Serial); }, reps),
      time_ms([&] { run_estimate(EstimateId::SM1, p, fam, 2, 1, Exec::Parallel); }, reps));

  return 0;
}
