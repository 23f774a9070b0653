#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "unidec/decomp.hpp"
#include "unidec/grid.hpp"
#include "unidec/norms.hpp"

namespace unidec {

// Catalog of the linear estimates under test. Box-level entries act on a
// single box_k piece of the datum; sum-mode entries (STRI, INT2, KMAX2)
// compare weighted sums over the whole family; the GSE entries act globally
// on band-limited data. ORTH is the product-box support statement and is
// evaluated by run_orth (run_estimate delegates to it). CONJ43 is an
// exploratory endpoint variant and carries no acceptance weight.
enum class EstimateId {
  GSE1,
  GSE2,
  GSE3,
  STRI,
  MAX,
  MAXD,
  SM1,
  SMMAX,
  STSM,
  INT1,
  INT2,
  KMAX1,
  KMAX2,
  ORTH,
  CONJ43,
};

const char* estimate_name(EstimateId id);
EstimateId parse_estimate_id(const std::string& name);

struct EstimateParams {
  int axis = 0;        // distinguished axis i (0-based)
  double q = 4;        // Lebesgue exponent of the maximal-type bounds
  double gamma = 6;    // Strichartz time exponent
  double r = 4;        // Strichartz space exponent
  int variant = 1;     // display index inside multi-part statements
  double sigma = 1;    // weight exponent of the sum-mode entries
  int alpha_axis = 0;  // restriction axis of KMAX2
  double p_joint = 4;  // p parameter of the joint-norm variants
  std::vector<std::array<int, 3>> ks;  // probed boxes (box-level entries)
};

struct SampleRatio {
  std::array<int, 3> k{{0, 0, 0}};
  std::uint64_t seed = 0;
  double lhs = 0;
  double rhs = 0;     // right norm without the bracket weight
  double weight = 1;  // bracket power the estimate allows
  double ratio = 0;   // lhs / (weight * rhs)
};

struct EstimateReport {
  EstimateId id{};
  EstimateParams params;
  std::vector<SampleRatio> samples;
  double max_ratio = 0;
  double mean_ratio = 0;
  int excluded = 0;  // samples dropped for a vanishing right side
};

// Runs nsamples independent draws per probed box (or per global sample) and
// reports the normalized ratios. A bounded max_ratio means the inequality is
// verified at this scale. Parameter combinations outside the cited validity
// range throw invalid_argument.
EstimateReport run_estimate(EstimateId id, const EstimateParams& p,
                            const DecompFamily& fam, int nsamples,
                            std::uint64_t seed, Exec exec = Exec::Parallel);

// Band-limited space-time forcing of fixed finite rank: sum of rank spatial
// Gaussian fields tensorized with smooth quasi-periodic time profiles. The
// draw is invariant under the (N, Nt, T) -> (2N, 2Nt, 2T) refinement, which
// keeps both the frequency spacing and the time step fixed.
SpaceTimeField random_forcing(GridPtr g, const SupportSpec& s, int rank,
                              std::uint64_t seed);

// Least-squares fit of log(v) against log(u).
struct FitResult {
  double slope = 0;
  double std_err = 0;
  double intercept = 0;
};
FitResult fit_scaling(const std::vector<double>& u,
                      const std::vector<double>& v);

// Same estimate and seeds on the base family and on the refined grid
// (N, Nt, T doubled, same r and K); factor compares the max ratios.
struct StabilityResult {
  EstimateReport base;
  EstimateReport refined;
  double factor = 0;
};
StabilityResult stability_run(EstimateId id, const EstimateParams& p,
                              const DecompFamily& fam, int nsamples,
                              std::uint64_t seed, Exec exec = Exec::Parallel);

// Product-box orthogonality. Each tuple draws kappa + 1 box-localized
// factors (randomly conjugated), forms the product spectrum by exact sparse
// convolution, and tests the box at k = signed sum + offset. The output must
// vanish identically whenever some axis has |k_a - sum_a| strictly beyond
// (kappa + 2)(1 - 2^-r); tuples inside the reach are recorded for reference.
struct OrthTuple {
  std::array<int, 3> k{{0, 0, 0}};
  std::vector<std::array<int, 3>> factors;
  std::vector<int> signs;  // +1 plain factor, -1 conjugated
  int dist = 0;            // max_a |k_a - sum_a|
  bool expected_zero = false;
  double out_norm = 0;
};

struct OrthReport {
  int kappa = 0;
  double threshold = 0;  // (kappa + 2)(1 - 2^-r)
  int tuples = 0;
  int zero_side = 0;      // tuples with dist beyond the threshold
  int failures = 0;       // zero-side tuples with a nonzero output
  double max_zero_norm = 0;
  int nonzero_inside = 0;  // inside-reach tuples that came out nonzero
  std::vector<OrthTuple> rows;
  std::vector<OrthTuple> failed;
};

OrthReport run_orth(const DecompFamily& fam, int kappa, int tuples,
                    std::uint64_t seed, Exec exec = Exec::Parallel);

}  // namespace unidec
