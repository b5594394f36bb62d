#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "gcs/coherence.hpp"
#include "gcs/rng.hpp"

namespace gcs {

// A point of the simplex: entries nonnegative, summing to 1 within 1e-12.
struct ProbabilityVector {
  Eigen::VectorXd p;
};

ProbabilityVector make_probabilities(Eigen::VectorXd p);
ProbabilityVector uniform_probabilities(Eigen::Index n);

// The coherence-adapted distribution p*_j = alpha_j^2 / |alpha|_2^2.
ProbabilityVector optimal_probabilities(const CoherenceVector& alpha);

// mu = max_j alpha_j / sqrt(p_j), with 0/0 = 0 and positive/0 = +infinity.
double mu(const CoherenceVector& alpha, const ProbabilityVector& p);

// Monte-Carlo check that no simplex point beats p*: draws Dirichlet(1)
// vectors and compares mu against mu(p*).
struct OptimalityReport {
  std::int64_t trials = 0;
  std::int64_t violations = 0;
  double mu_star = 0.0;
  double worst_gap = 0.0;  // max of mu(p*) - mu(p) over trials; <= tolerance when pass
  double tolerance = 1e-12;
  bool pass() const { return violations == 0; }
};
OptimalityReport verify_p_star_optimality(const CoherenceVector& alpha,
                                          std::int64_t trials, std::uint64_t seed);

// m i.i.d. categorical rows drawn with replacement. Row i of the implied
// sampling matrix S is e_{indices[i]}.
struct SamplingPlan {
  std::vector<Eigen::Index> indices;
  ProbabilityVector p;
  std::uint64_t seed = 0;
};

// Inverse-CDF rule on a prefix-sum table: the first index whose cumulative
// probability reaches u, skipping zero-probability flats. Pure, so plans are
// bit-stable across platforms.
Eigen::Index categorical_index(const Eigen::VectorXd& cumulative,
                               const Eigen::VectorXd& p, double u);
Eigen::Index draw_categorical(const Eigen::VectorXd& cumulative,
                              const Eigen::VectorXd& p, RngStream& rng);
SamplingPlan draw_plan(const ProbabilityVector& p, Eigen::Index m, std::uint64_t seed);

// Block variant ("per-channel" sampling): partitions [n] into `blocks` equal
// contiguous blocks and draws m/blocks rows per block from the renormalized
// restriction of p. Outside the sampling theory; plumbing for grid signals.
SamplingPlan draw_plan_blocks(const ProbabilityVector& p, Eigen::Index m,
                              Eigen::Index blocks, std::uint64_t seed);

// Diagonal preconditioner entries 1/sqrt(p_i): d_full over all rows (0 where
// p_i = 0, guarded) and its subsampled counterpart d_sub = S d_full.
struct Preconditioner {
  Eigen::VectorXd d_full;
  Eigen::VectorXd d_sub;
};
Preconditioner build_preconditioner(const SamplingPlan& plan);

// Ceiling of C * coherence_sq * (k d log(n/k) + log(2/eps)), natural logs.
// Pass |alpha|_2^2 for the adapted scheme or mu^2 for a general p.
Eigen::Index sample_complexity(double coherence_sq, Eigen::Index k, Eigen::Index d,
                               Eigen::Index n, double eps, double C);

void save_probabilities_csv(const ProbabilityVector& p, const std::string& path);
ProbabilityVector load_probabilities_csv(const std::string& path);
void save_plan(const SamplingPlan& plan, const std::string& path);

}  // namespace gcs
