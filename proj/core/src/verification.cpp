#include "gcs/verification.hpp"

#include <cmath>

#include "gcs/coherence.hpp"
#include "gcs/common.hpp"
#include "gcs/parallel.hpp"

namespace gcs {
namespace {

using cd = std::complex<double>;

// (1/sqrt(m)) d_sub .* (F basis) at the sampled rows.
Eigen::MatrixXcd sampled_frame(const SamplingPlan& plan, const Preconditioner& precond,
                               const UnitaryOperator& op, const Eigen::MatrixXd& basis) {
  const auto m = static_cast<Eigen::Index>(plan.indices.size());
  Eigen::MatrixXcd transformed(op.size(), basis.cols());
  for (Eigen::Index c = 0; c < basis.cols(); ++c)
    transformed.col(c) = op.apply(Eigen::VectorXd(basis.col(c)));
  Eigen::MatrixXcd frame(m, basis.cols());
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (Eigen::Index i = 0; i < m; ++i)
    frame.row(i) = scale * precond.d_sub[i] *
                   transformed.row(plan.indices[static_cast<std::size_t>(i)]);
  return frame;
}

// Deviation of the real quadratic form u -> |frame * u| on the unit sphere.
// Real signals only excite the real part of the Gram matrix.
double gram_deviation(const Eigen::MatrixXcd& frame) {
  const Eigen::MatrixXd gram = (frame.adjoint() * frame).real();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const double lo = std::max(eig.eigenvalues().minCoeff(), 0.0);
  const double hi = eig.eigenvalues().maxCoeff();
  return std::max(std::abs(std::sqrt(hi) - 1.0), std::abs(std::sqrt(lo) - 1.0));
}

double plan_deviation_of_unit(const SamplingPlan& plan, const Preconditioner& precond,
                              const UnitaryOperator& op, const Eigen::VectorXd& unit) {
  const auto m = static_cast<Eigen::Index>(plan.indices.size());
  const Eigen::VectorXcd fx = op.apply(unit);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double d = precond.d_sub[i];
    acc += d * d * std::norm(fx[plan.indices[static_cast<std::size_t>(i)]]);
  }
  return std::abs(std::sqrt(acc / static_cast<double>(m)) - 1.0);
}

}  // namespace

DeviationReport rip_deviation_subspace(const SamplingPlan& plan,
                                       const Preconditioner& precond,
                                       const UnitaryOperator& op,
                                       const Eigen::MatrixXd& basis, std::int64_t probes,
                                       std::uint64_t probe_seed) {
  require(basis.rows() == op.size(), "basis rows must match the transform size");
  const Eigen::MatrixXd gram = basis.transpose() * basis;
  require((gram - Eigen::MatrixXd::Identity(basis.cols(), basis.cols()))
                  .cwiseAbs()
                  .maxCoeff() <= 1e-10,
          "basis is not orthonormal");

  DeviationReport report;
  report.exact = true;
  report.sup_deviation = gram_deviation(sampled_frame(plan, precond, op, basis));
  report.probes = probes;

  if (probes > 0) {
    RngStream rng(probe_seed);
    Eigen::VectorXd u(basis.cols());
    for (std::int64_t t = 0; t < probes; ++t) {
      for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = rng.gaussian();
      const double norm = u.norm();
      if (norm == 0.0) continue;
      const Eigen::VectorXd x = basis * (u / norm);
      report.probe_max =
          std::max(report.probe_max, plan_deviation_of_unit(plan, precond, op, x));
    }
  }
  return report;
}

DeviationReport rip_deviation_cone_exact(const SamplingPlan& plan,
                                         const Preconditioner& precond,
                                         const UnitaryOperator& op,
                                         const std::vector<ActivationPiece>& pieces) {
  require(!pieces.empty(), "piece list is empty");
  const auto count = static_cast<Eigen::Index>(pieces.size());
  std::vector<Eigen::MatrixXd> spans;
  spans.reserve(pieces.size());
  for (const auto& piece : pieces) spans.push_back(column_space_basis(piece.effective_map));

  const Eigen::Index pairs = count * (count + 1) / 2;
  std::vector<double> per_pair(static_cast<std::size_t>(pairs), 0.0);
  parallel_for(static_cast<std::size_t>(pairs), [&](std::size_t flat) {
    auto idx = static_cast<Eigen::Index>(flat);
    Eigen::Index i = 0;
    while (idx >= count - i) {
      idx -= count - i;
      ++i;
    }
    const Eigen::Index j = i + idx;
    Eigen::MatrixXd joint(op.size(), spans[i].cols() + spans[j].cols());
    joint.leftCols(spans[i].cols()) = spans[i];
    joint.rightCols(spans[j].cols()) = spans[j];
    const Eigen::MatrixXd basis = column_space_basis(joint);
    if (basis.cols() == 0) return;
    per_pair[flat] = gram_deviation(sampled_frame(plan, precond, op, basis));
  });

  DeviationReport report;
  report.exact = true;
  for (double dev : per_pair) report.sup_deviation = std::max(report.sup_deviation, dev);
  return report;
}

DeviationReport rip_deviation_cone(const SamplingPlan& plan, const Preconditioner& precond,
                                   const UnitaryOperator& op, const GenerativeNetwork& net,
                                   std::int64_t probes, std::uint64_t seed) {
  require(probes >= 1, "need at least one probe");
  require(net.output_dim() == op.size(), "network output must match the transform size");

  const std::size_t workers = std::max<std::size_t>(1, std::min(thread_cap(),
                                                    static_cast<std::size_t>(probes)));
  std::vector<double> partial(workers, 0.0);
  const RngStream root(seed);
  parallel_for(workers, [&](std::size_t w) {
    double local = 0.0;
    Eigen::VectorXd z1(net.latent_dim()), z2(net.latent_dim());
    for (std::size_t t = w; t < static_cast<std::size_t>(probes); t += workers) {
      RngStream rng = root.split(t);
      for (Eigen::Index i = 0; i < z1.size(); ++i) z1[i] = rng.gaussian();
      for (Eigen::Index i = 0; i < z2.size(); ++i) z2[i] = rng.gaussian();
      const Eigen::VectorXd diff = net.forward(z1) - net.forward(z2);
      const double norm = diff.norm();
      if (norm == 0.0) continue;
      local = std::max(local, plan_deviation_of_unit(plan, precond, op, diff / norm));
    }
    partial[w] = local;
  });

  DeviationReport report;
  report.exact = false;
  report.probes = probes;
  for (double v : partial) report.sup_deviation = std::max(report.sup_deviation, v);
  report.probe_max = report.sup_deviation;
  return report;
}

IsotropyReport isotropy_check(const ProbabilityVector& p, const UnitaryOperator& op,
                              const Eigen::MatrixXd& basis, std::int64_t samples,
                              std::uint64_t seed) {
  require(samples >= 1, "need at least one sample");
  const CoherenceVector alpha = coherence_exact_subspace(op, basis);
  for (Eigen::Index j = 0; j < p.p.size(); ++j)
    require(p.p[j] > 0.0 || alpha.alpha[j] <= 1e-14,
            "p must be positive wherever the subspace coherence is");

  const Eigen::Index k = basis.cols();
  IsotropyReport report;
  report.samples = samples;
  report.mu_bound = mu(alpha, p);
  report.tolerance = 5.0 * std::sqrt(static_cast<double>(k) /
                                     static_cast<double>(samples)) *
                     report.mu_bound * report.mu_bound;

  // v = (1/sqrt(p_J)) P_U f_J, read off rows of F * basis.
  Eigen::MatrixXcd transformed(op.size(), k);
  for (Eigen::Index c = 0; c < k; ++c)
    transformed.col(c) = op.apply(Eigen::VectorXd(basis.col(c)));

  Eigen::VectorXd cumulative(p.p.size());
  double run = 0.0;
  for (Eigen::Index j = 0; j < p.p.size(); ++j) {
    run += p.p[j];
    cumulative[j] = run;
  }

  RngStream rng(seed);
  Eigen::MatrixXcd mean = Eigen::MatrixXcd::Zero(k, k);
  report.norm_bound_ok = true;
  for (std::int64_t t = 0; t < samples; ++t) {
    const Eigen::Index j = draw_categorical(cumulative, p.p, rng);
    const Eigen::VectorXcd v =
        transformed.row(j).conjugate().transpose() / std::sqrt(p.p[j]);
    if (v.norm() > report.mu_bound + 1e-9) report.norm_bound_ok = false;
    report.max_vnorm = std::max(report.max_vnorm, v.norm());
    mean.noalias() += v * v.adjoint();
  }
  mean /= static_cast<double>(samples);

  const Eigen::MatrixXcd delta = mean - Eigen::MatrixXcd::Identity(k, k);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(delta);
  report.operator_distance = eig.eigenvalues().cwiseAbs().maxCoeff();
  return report;
}

double wilson_lower(std::int64_t successes, std::int64_t trials) {
  require(trials >= 1 && successes >= 0 && successes <= trials, "bad binomial counts");
  const double z = 1.959963984540054;  // 97.5% normal quantile
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double center = phat + z * z / (2.0 * n);
  const double spread = z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n));
  return (center - spread) / denom;
}

double wilson_upper(std::int64_t successes, std::int64_t trials) {
  require(trials >= 1 && successes >= 0 && successes <= trials, "bad binomial counts");
  const double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double center = phat + z * z / (2.0 * n);
  const double spread = z * std::sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n));
  return (center + spread) / denom;
}

Theorem1Report theorem1_end_to_end(const GenerativeNetwork& net, const UnitaryOperator& op,
                                   double C, double eps, std::int64_t trials,
                                   std::uint64_t seed, const Theorem1Options& options) {
  require(trials >= 1, "need at least one trial");
  require(eps > 0.0 && eps < 1.0, "need 0 < eps < 1");

  // Exact coherence when the net is piece-enumerable at desk scale, otherwise
  // the sampled surrogate.
  std::vector<ActivationPiece> pieces;
  const bool enumerable = net.hidden_unit_count() <= 16;
  CoherenceVector alpha;
  if (enumerable) {
    pieces = enumerate_pieces(net);
    alpha = coherence_exact_pieces(op, pieces);
  } else {
    alpha = coherence_heuristic(net, op, options.heuristic_batch, seed ^ 0x5eedULL);
  }

  Theorem1Report report;
  report.alpha_norm_sq = alpha.alpha.squaredNorm();
  report.trials = trials;
  report.exact_deviation = enumerable;
  report.m = options.m_override > 0
                 ? options.m_override
                 : sample_complexity(report.alpha_norm_sq, net.latent_dim(), net.depth(),
                                     net.output_dim(), eps, C);

  const ProbabilityVector p_star = optimal_probabilities(alpha);
  const RngStream root(seed);

  report.deviations.resize(static_cast<std::size_t>(trials));
  std::vector<std::uint8_t> rip_pass(static_cast<std::size_t>(trials), 0);
  std::vector<std::int8_t> bound_state(static_cast<std::size_t>(trials), -1);

  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    const RngStream trial_rng = root.split(t);
    const SamplingPlan plan = draw_plan(p_star, report.m, trial_rng.split(0).next_u64());
    const Preconditioner precond = build_preconditioner(plan);
    const DeviationReport dev =
        enumerable ? rip_deviation_cone_exact(plan, precond, op, pieces)
                   : rip_deviation_cone(plan, precond, op, net, options.cone_probes,
                                        trial_rng.split(1).next_u64());
    report.deviations[t] = dev.sup_deviation;
    if (dev.sup_deviation > options.rip_threshold) return;
    rip_pass[t] = 1;
    if (!options.check_recovery) return;

    // Conditional recovery-error bound on an in-range noiseless instance:
    // x_perp = 0 and eta = 0 leave only the 1.5 * eps_hat term.
    RngStream sig = trial_rng.split(2);
    Eigen::VectorXd z_star(net.latent_dim());
    for (Eigen::Index i = 0; i < z_star.size(); ++i) z_star[i] = sig.gaussian();
    const Eigen::VectorXd x0 = net.forward(z_star);
    const MeasurementSet meas = measure(x0, plan, op);
    RecoveryConfig rc = options.recovery;
    rc.preconditioned = true;
    rc.seed = trial_rng.split(3).next_u64();
    const RecoveryResult rec = recover(net, meas, op, &precond, rc);
    const double rhs = 1.5 * rec.eps_hat;
    bound_state[t] = (rec.x_hat - x0).norm() <= rhs ? 1 : 0;
  });

  for (std::size_t t = 0; t < static_cast<std::size_t>(trials); ++t) {
    report.rip_passes += rip_pass[t];
    if (bound_state[t] >= 0) {
      ++report.bound_checked;
      report.bound_passes += bound_state[t];
    }
  }
  report.rip_rate_lower = wilson_lower(report.rip_passes, trials);
  report.rip_rate_upper = wilson_upper(report.rip_passes, trials);
  // The RIP is promised with probability >= 1 - eps; accept unless the Wilson
  // interval excludes that rate.
  report.rip_ok = report.rip_rate_upper >= 1.0 - eps;
  report.bounds_ok = report.bound_checked == report.bound_passes;
  return report;
}

CalibrationResult calibrate_sampling_constant(const GenerativeNetwork& net,
                                              const UnitaryOperator& op, double eps,
                                              std::int64_t trials, std::uint64_t seed,
                                              double target, double lo, double hi) {
  require(lo > 0.0 && hi > lo, "need 0 < lo < hi");
  Theorem1Options options;
  options.check_recovery = false;

  auto rate_at = [&](double C) {
    const Theorem1Report r = theorem1_end_to_end(net, op, C, eps, trials, seed, options);
    return static_cast<double>(r.rip_passes) / static_cast<double>(r.trials);
  };

  require(rate_at(hi) >= target, "upper bracket fails the target pass rate");
  double lo_c = lo, hi_c = hi;
  for (int iter = 0; iter < 24 && hi_c / lo_c > 1.05; ++iter) {
    const double mid = std::sqrt(lo_c * hi_c);
    (rate_at(mid) >= target ? hi_c : lo_c) = mid;
  }

  CalibrationResult result;
  result.C = hi_c;
  Theorem1Report final_report =
      theorem1_end_to_end(net, op, hi_c, eps, trials, seed, options);
  result.m = final_report.m;
  result.pass_rate =
      static_cast<double>(final_report.rip_passes) / static_cast<double>(final_report.trials);
  return result;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> projection_onto_range(
    const GenerativeNetwork& net, const Eigen::VectorXd& x0, const RecoveryConfig& config) {
  require(x0.size() == net.output_dim(), "x0 length must match the network output");

  // Minimize |G(z) - x0| as a recovery problem against the identity transform
  // with every row sampled once: the objective is |G(z) - x0| / sqrt(n).
  const Eigen::Index n = net.output_dim();
  SamplingPlan plan;
  plan.p = uniform_probabilities(n);
  plan.indices.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) plan.indices[static_cast<std::size_t>(i)] = i;
  const UnitaryOperator op = UnitaryOperator::identity(n);
  const MeasurementSet meas = measure(x0, plan, op);
  RecoveryConfig rc = config;
  rc.preconditioned = false;
  const RecoveryResult rec = recover(net, meas, op, nullptr, rc);
  return {rec.x_hat, x0 - rec.x_hat};
}

}  // namespace gcs
