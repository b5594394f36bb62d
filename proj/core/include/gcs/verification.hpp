#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gcs/network.hpp"
#include "gcs/recovery.hpp"
#include "gcs/sampling.hpp"
#include "gcs/unitary.hpp"

namespace gcs {

// Empirical restricted-isometry deviation sup | (1/sqrt(m)) |SDFx| - 1 | over
// the unit sphere of a prior set.
struct DeviationReport {
  double sup_deviation = 0.0;  // exact when `exact`, else a sampled lower bound
  bool exact = false;
  double probe_max = 0.0;      // cross-check from random probes (lower bound)
  std::int64_t probes = 0;
  double threshold = 1.0 / 3.0;
  bool pass() const { return sup_deviation <= threshold; }
};

// Exact deviation on a subspace via the k x k Gram matrix of the sampled,
// preconditioned, transformed basis: max(|sqrt(l_max) - 1|, |sqrt(l_min) - 1|).
// Probes only cross-check the Gram value from below.
DeviationReport rip_deviation_subspace(const SamplingPlan& plan,
                                       const Preconditioner& precond,
                                       const UnitaryOperator& op,
                                       const Eigen::MatrixXd& basis,
                                       std::int64_t probes = 0,
                                       std::uint64_t probe_seed = 0);

// Deviation over the expansion of range(G) - range(G): exact on
// piece-enumerable nets (Gram per pair span, maximized over pairs).
DeviationReport rip_deviation_cone_exact(const SamplingPlan& plan,
                                         const Preconditioner& precond,
                                         const UnitaryOperator& op,
                                         const std::vector<ActivationPiece>& pieces);

// Monte-Carlo lower bound: normalized differences of sampled range points.
DeviationReport rip_deviation_cone(const SamplingPlan& plan, const Preconditioner& precond,
                                   const UnitaryOperator& op, const GenerativeNetwork& net,
                                   std::int64_t probes, std::uint64_t seed);

// Checks the two ingredients the concentration argument needs from the
// random vectors v = P_U F* D s: isotropy of E[v v*] and the almost-sure
// norm bound |v| <= mu_U(F, p).
struct IsotropyReport {
  std::int64_t samples = 0;
  double operator_distance = 0.0;  // |mean(v v*) - I|
  double tolerance = 0.0;          // 5 sqrt(k / samples) mu^2
  double mu_bound = 0.0;           // mu_U(F, p)
  double max_vnorm = 0.0;
  bool norm_bound_ok = false;      // every draw satisfied |v| <= mu + 1e-9
  bool pass() const { return norm_bound_ok && operator_distance <= tolerance; }
};
IsotropyReport isotropy_check(const ProbabilityVector& p, const UnitaryOperator& op,
                              const Eigen::MatrixXd& basis, std::int64_t samples,
                              std::uint64_t seed);

// 95% Wilson score interval for a binomial proportion.
double wilson_lower(std::int64_t successes, std::int64_t trials);
double wilson_upper(std::int64_t successes, std::int64_t trials);

struct Theorem1Options {
  double rip_threshold = 1.0 / 3.0;
  std::int64_t heuristic_batch = 200;   // coherence surrogate for large nets
  std::int64_t cone_probes = 20000;     // Monte-Carlo deviation probes
  Eigen::Index m_override = 0;          // 0: use the sample-complexity bound
  RecoveryConfig recovery;              // used for the conditional bound check
  bool check_recovery = true;
};

// End to end: coherence -> p* -> m -> repeated plans; counts RIP passes and,
// on passing realizations, verifies the recovery error bound on in-range
// noiseless instances.
struct Theorem1Report {
  Eigen::Index m = 0;
  double alpha_norm_sq = 0.0;
  std::int64_t trials = 0;
  std::int64_t rip_passes = 0;
  double rip_rate_lower = 0.0;   // Wilson lower bound
  double rip_rate_upper = 0.0;
  std::int64_t bound_checked = 0;
  std::int64_t bound_passes = 0;
  bool exact_deviation = false;
  std::vector<double> deviations;  // per trial
  bool rip_ok = false;     // pass rate consistent with >= 1 - eps
  bool bounds_ok = false;  // every checked instance satisfied the bound
  bool pass() const { return rip_ok && bounds_ok; }
};
Theorem1Report theorem1_end_to_end(const GenerativeNetwork& net, const UnitaryOperator& op,
                                   double C, double eps, std::int64_t trials,
                                   std::uint64_t seed, const Theorem1Options& options = {});

// Smallest constant C (bisection over [lo, hi]) whose sample-complexity bound
// yields an RIP pass rate of at least `target` over the given trials.
struct CalibrationResult {
  double C = 0.0;
  Eigen::Index m = 0;
  double pass_rate = 0.0;
};
CalibrationResult calibrate_sampling_constant(const GenerativeNetwork& net,
                                              const UnitaryOperator& op, double eps,
                                              std::int64_t trials, std::uint64_t seed,
                                              double target = 0.95, double lo = 1e-3,
                                              double hi = 64.0);

// Approximate projection of x0 onto range(G) by multi-restart minimization of
// |G(z) - x0|; returns (x_proj, x_perp). An upper-bound surrogate for the
// projection onto the full prior cone.
std::pair<Eigen::VectorXd, Eigen::VectorXd> projection_onto_range(
    const GenerativeNetwork& net, const Eigen::VectorXd& x0, const RecoveryConfig& config);

}  // namespace gcs
