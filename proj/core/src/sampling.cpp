#include "gcs/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gcs/common.hpp"
#include "gcs/io.hpp"

namespace gcs {

ProbabilityVector make_probabilities(Eigen::VectorXd p) {
  require(p.size() >= 1, "probability vector must be nonempty");
  require((p.array() >= 0.0).all(), "probabilities must be nonnegative");
  const double sum = p.sum();
  require(std::abs(sum - 1.0) <= 1e-12,
          "probabilities must sum to 1 (got " + format_double(sum) + ")");
  return ProbabilityVector{std::move(p)};
}

ProbabilityVector uniform_probabilities(Eigen::Index n) {
  require(n >= 1, "need n >= 1");
  return ProbabilityVector{Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n))};
}

ProbabilityVector optimal_probabilities(const CoherenceVector& alpha) {
  const double norm_sq = alpha.alpha.squaredNorm();
  require(norm_sq > 0.0, "coherence vector is identically zero");
  Eigen::VectorXd p = alpha.alpha.array().square() / norm_sq;
  // The analytic expression already sums to 1 up to rounding; renormalize the
  // last ulps so the simplex invariant holds exactly under validation.
  p /= p.sum();
  return ProbabilityVector{std::move(p)};
}

double mu(const CoherenceVector& alpha, const ProbabilityVector& p) {
  require(alpha.alpha.size() == p.p.size(), "alpha and p length mismatch");
  double worst = 0.0;
  for (Eigen::Index j = 0; j < p.p.size(); ++j) {
    const double a = alpha.alpha[j];
    if (a == 0.0) continue;  // 0/0 counts as 0
    if (p.p[j] == 0.0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, a / std::sqrt(p.p[j]));
  }
  return worst;
}

OptimalityReport verify_p_star_optimality(const CoherenceVector& alpha,
                                          std::int64_t trials, std::uint64_t seed) {
  require(trials >= 1, "need at least one trial");
  OptimalityReport report;
  report.trials = trials;
  const ProbabilityVector star = optimal_probabilities(alpha);
  report.mu_star = mu(alpha, star);
  report.worst_gap = -std::numeric_limits<double>::infinity();

  RngStream rng(seed);
  const Eigen::Index n = alpha.alpha.size();
  Eigen::VectorXd draw(n);
  for (std::int64_t t = 0; t < trials; ++t) {
    for (Eigen::Index j = 0; j < n; ++j) draw[j] = rng.exponential();
    draw /= draw.sum();  // Dirichlet(1): normalized i.i.d. exponentials
    const double value = mu(alpha, ProbabilityVector{draw});
    report.worst_gap = std::max(report.worst_gap, report.mu_star - value);
    if (value < report.mu_star - report.tolerance) ++report.violations;
  }
  return report;
}

Eigen::Index categorical_index(const Eigen::VectorXd& cumulative,
                               const Eigen::VectorXd& p, double u) {
  const double* begin = cumulative.data();
  const double* end = begin + cumulative.size();
  Eigen::Index j = std::lower_bound(begin, end, u) - begin;  // first cum >= u
  if (j >= cumulative.size()) j = cumulative.size() - 1;     // sum rounded below u
  // A flat segment can only be selected when u lands exactly on its boundary;
  // skip to the index that actually carries the mass.
  while (j < p.size() && p[j] == 0.0) ++j;
  while (j > 0 && (j >= p.size() || p[j] == 0.0)) --j;
  return j;
}

Eigen::Index draw_categorical(const Eigen::VectorXd& cumulative,
                              const Eigen::VectorXd& p, RngStream& rng) {
  return categorical_index(cumulative, p, rng.uniform());
}

SamplingPlan draw_plan(const ProbabilityVector& p, Eigen::Index m, std::uint64_t seed) {
  require(m >= 1, "need m >= 1 measurements");
  Eigen::VectorXd cumulative(p.p.size());
  double run = 0.0;
  for (Eigen::Index j = 0; j < p.p.size(); ++j) {
    run += p.p[j];
    cumulative[j] = run;
  }
  SamplingPlan plan;
  plan.p = p;
  plan.seed = seed;
  plan.indices.resize(static_cast<std::size_t>(m));
  RngStream rng(seed);
  for (auto& index : plan.indices) index = draw_categorical(cumulative, p.p, rng);
  return plan;
}

SamplingPlan draw_plan_blocks(const ProbabilityVector& p, Eigen::Index m,
                              Eigen::Index blocks, std::uint64_t seed) {
  require(blocks >= 1, "need at least one block");
  if (blocks == 1) return draw_plan(p, m, seed);
  const Eigen::Index n = p.p.size();
  require(n % blocks == 0, "block count must divide n");
  require(m % blocks == 0, "block count must divide m");
  const Eigen::Index width = n / blocks;
  const Eigen::Index per_block = m / blocks;

  SamplingPlan plan;
  plan.p = p;
  plan.seed = seed;
  plan.indices.reserve(static_cast<std::size_t>(m));
  RngStream root(seed);
  for (Eigen::Index b = 0; b < blocks; ++b) {
    Eigen::VectorXd local = p.p.segment(b * width, width);
    const double mass = local.sum();
    require(mass > 0.0, "block " + std::to_string(b + 1) + " has zero probability mass");
    local /= mass;
    SamplingPlan sub = draw_plan(ProbabilityVector{local}, per_block, root.split(b).next_u64());
    for (Eigen::Index idx : sub.indices) plan.indices.push_back(b * width + idx);
  }
  return plan;
}

Preconditioner build_preconditioner(const SamplingPlan& plan) {
  const Eigen::Index n = plan.p.p.size();
  Preconditioner pre;
  pre.d_full.resize(n);
  for (Eigen::Index j = 0; j < n; ++j)
    pre.d_full[j] = plan.p.p[j] > 0.0 ? 1.0 / std::sqrt(plan.p.p[j]) : 0.0;
  pre.d_sub.resize(static_cast<Eigen::Index>(plan.indices.size()));
  for (std::size_t i = 0; i < plan.indices.size(); ++i) {
    const Eigen::Index j = plan.indices[i];
    require(j >= 0 && j < n, "plan index out of range");
    require(plan.p.p[j] > 0.0,
            "plan references a zero-probability row (corrupted plan)");
    pre.d_sub[static_cast<Eigen::Index>(i)] = pre.d_full[j];
  }
  return pre;
}

Eigen::Index sample_complexity(double coherence_sq, Eigen::Index k, Eigen::Index d,
                               Eigen::Index n, double eps, double C) {
  require(coherence_sq > 0.0, "coherence factor must be positive");
  require(k >= 1 && d >= 1, "need k >= 1 and d >= 1");
  require(k < n, "need k < n");
  require(eps > 0.0 && eps < 1.0, "need 0 < eps < 1");
  require(C > 0.0, "need C > 0");
  const double kd = static_cast<double>(k) * static_cast<double>(d);
  const double bound =
      C * coherence_sq *
      (kd * std::log(static_cast<double>(n) / static_cast<double>(k)) +
       std::log(2.0 / eps));
  return static_cast<Eigen::Index>(std::ceil(bound));
}

void save_probabilities_csv(const ProbabilityVector& p, const std::string& path) {
  save_indexed_csv(p.p, "p", path);
}

ProbabilityVector load_probabilities_csv(const std::string& path) {
  return make_probabilities(load_indexed_csv(path));
}

void save_plan(const SamplingPlan& plan, const std::string& path) {
  save_plan_csv(plan.indices, path);
}

}  // namespace gcs
