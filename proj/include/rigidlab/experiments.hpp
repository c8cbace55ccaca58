#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rigidlab/alpha.hpp"
#include "rigidlab/extension.hpp"
#include "rigidlab/logic.hpp"
#include "rigidlab/sampler.hpp"

namespace rigidlab {

class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentOptions {
  unsigned threads = 1;
  // Largest admissible n^qdepth per evaluation.
  double max_work = 1e10;
};

// Replaces the plain sampler, e.g. to plant structure in every trial.
using GraphSource = std::function<Graph(const SampleConfig&)>;

// Wilson score interval for hits/trials.
std::pair<double, double> wilson_interval(std::size_t hits, std::size_t trials, double z = 1.96);

struct ProbPoint {
  std::size_t n = 0;
  std::size_t hits = 0;
  std::size_t trials = 0;
  // Set for curves known in closed form; no sampling error.
  std::optional<double> exact_log_p;

  double rate() const { return trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0; }
  // One-sided 95% bound for zero-hit points (rule of three).
  double upper95_zero() const { return trials ? 3.0 / static_cast<double>(trials) : 1.0; }
};

struct ProbCurve {
  std::vector<ProbPoint> points;
  AlphaParam alpha;
  std::string formula_text;
  std::uint64_t master_seed = 0;
};

ProbCurve estimate_prob(const Formula& psi, const AlphaParam& a, const std::vector<std::size_t>& ns,
                        std::size_t trials, std::uint64_t seed,
                        const ExperimentOptions& opt = {});

enum class DecayModel { polynomial, stretched_exponential, degenerate };
std::string to_string(DecayModel m);

struct ModelFit {
  bool valid = false;
  double log_c = 0.0;
  double exponent = 0.0;
  // Weighted squared residual in log p.
  double chi2 = 0.0;
};

struct DecayFit {
  DecayModel model = DecayModel::degenerate;
  double c = 0.0;
  double beta = 0.0;
  double eps = 0.0;
  double residual_polynomial = 0.0;
  double residual_stretched = 0.0;
  ModelFit polynomial;
  ModelFit stretched;
  std::size_t used_points = 0;
  std::size_t censored_points = 0;
};

struct DecayPoint {
  double n = 0.0;
  double log_p = 0.0;
  // Standard error of log_p.
  double sigma = 0.0;
};

// The stretched-exponential law must beat the polynomial one by this much
// weighted chi-square before it is selected.
inline constexpr double kStretchedMargin = 4.0;
// Relative standard error given to points with an exact log p.
inline constexpr double kExactSigma = 1e-9;

// Polynomial: log p = log c - beta log n. Stretched: log(-log p) = log c +
// eps log n. Each is fitted by weighted least squares in its own linearising
// coordinates and scored by weighted residuals in log p.
DecayFit fit_decay(const ProbCurve& curve);
DecayFit fit_decay_points(std::span<const DecayPoint> points, std::size_t censored = 0);

struct ConcPoint {
  std::size_t n = 0;
  std::size_t embeddings = 0;
  std::size_t below = 0;
  std::size_t above = 0;
  std::size_t missing = 0;  // samples where H0 did not embed
  double lower = 0.0;
  double upper = 0.0;
  double fraction = 0.0;
};

struct ConcReport {
  std::string pair;
  ExtType ext_type;
  double eps = 0.0;
  std::size_t trials = 0;
  std::size_t embeddings_per_trial = 0;
  bool empty = false;
  std::vector<ConcPoint> points;
};

// For each n: `trials` graphs, `embeddings_per_trial` random embeddings f
// of H0 each; counts N(f) outside (n^(v - alpha e - eps), n^(v - alpha e + eps)).
ConcReport concentration_report(const PairSpec& pair, const AlphaParam& a,
                                const std::vector<std::size_t>& ns, std::size_t trials,
                                std::size_t embeddings_per_trial, double eps, std::uint64_t seed,
                                const ExperimentOptions& opt = {});

struct RigidRate {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t hits = 0;
  double rate = 0.0;
  // Expected number of extension images: falling(n', v) p^e / |Aut|.
  double first_moment_bound = 0.0;
  // Binomial standard deviation at min(bound, 1).
  double sigma = 0.0;
};

// Fraction of trials in which the rigid template extends f = identity on H0.
RigidRate rigid_hit_rate(const PairSpec& pair, const AlphaParam& a, std::size_t n,
                         std::size_t trials, std::uint64_t seed,
                         const ExperimentOptions& opt = {}, const GraphSource& source = {});

struct KernelTrial {
  std::size_t n = 0;
  std::size_t trial = 0;
  KernelResult result;
  RigidChain chain;
};

std::vector<KernelTrial> kernel_trials(const AlphaParam& a, std::size_t ell_star, std::size_t n,
                                       std::size_t trials, std::uint64_t seed,
                                       const ExperimentOptions& opt = {},
                                       std::size_t round_cap = 0,
                                       const GraphSource& source = {});

struct CensusPoint {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::map<std::size_t, std::size_t> histogram;
  double threshold = 0.0;
  std::size_t e1_count = 0;
  double e1_frequency = 0.0;
  std::size_t truncated = 0;
  double mean_chain_length = 0.0;
  std::size_t max_chain_length = 0;
  // Generic-extension failures among small-kernel samples (E2 proxy).
  std::size_t e2_checked = 0;
  std::size_t e2_failures = 0;
};

struct KernelCensus {
  std::size_t ell_star = 0;
  double eps = 0.0;
  std::vector<CensusPoint> points;
};

KernelCensus kernel_census(const AlphaParam& a, std::size_t ell_star,
                           const std::vector<std::size_t>& ns, std::size_t trials, double eps,
                           std::uint64_t seed, const ExperimentOptions& opt = {},
                           std::size_t e2_budget = 0, const GraphSource& source = {});

struct E1Bound {
  std::uint64_t steps = 0;  // floor(n^eps / ell)
  double log_seq_count = 0.0;
  double log_simplified = 0.0;
  double log_expected = 0.0;
};

// Natural logs of the sequence-count product, of n^(eps n^eps) and of
// n^((eps - zeta) n^eps). The i = 0 factor (ell * 0)^ell is taken as 1.
E1Bound e1_bound(double n, double eps, std::size_t ell_star, double zeta);

struct AgreementGroup {
  std::string code;
  std::size_t kernel_size = 0;
  std::size_t trials = 0;
  std::size_t true_count = 0;
  bool constant() const { return true_count == 0 || true_count == trials; }
};

struct AgreementReport {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::size_t excluded = 0;
  std::vector<AgreementGroup> groups;
  // Trials whose group is unanimous on the majority value, over included trials.
  double agreement = 1.0;
  std::size_t empty_kernel_trials = 0;
  std::size_t empty_kernel_true = 0;
};

// Groups trials by the isomorphism type of the structure induced on Q u
// kernel and checks whether psi's truth value is a function of it.
AgreementReport agreement_experiment(const Formula& psi, const AlphaParam& a,
                                     std::size_t ell_star, std::size_t n, std::size_t trials,
                                     std::uint64_t seed, const ExperimentOptions& opt = {},
                                     const GraphSource& source = {});

}  // namespace rigidlab
