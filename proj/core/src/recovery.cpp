#include "gcs/recovery.hpp"

#include <cmath>

#include "gcs/common.hpp"
#include "gcs/parallel.hpp"

namespace gcs {
namespace {

using cd = std::complex<double>;

Eigen::VectorXd weights_for(const MeasurementSet& meas, const Preconditioner* precond,
                            bool preconditioned) {
  const auto m = static_cast<Eigen::Index>(meas.plan.indices.size());
  if (!preconditioned) return Eigen::VectorXd::Ones(m);
  require(precond != nullptr, "preconditioned objective needs a preconditioner");
  require(precond->d_sub.size() == m, "preconditioner does not match the plan");
  return precond->d_sub;
}

// The least-squares problem in folded form: residual(z) = a * hidden(z) - c.
// Folding the final linear layer into the sampled rows makes one iteration
// cost O(m * k_{d-1}) instead of O(m * n).
struct FoldedProblem {
  Eigen::MatrixXcd a;
  Eigen::VectorXcd c;
  const GenerativeNetwork* net = nullptr;

  double value_squared(const Eigen::VectorXd& z) const {
    return (a * net->hidden(z).cast<cd>() - c).squaredNorm();
  }

  double value_squared_and_gradient(const Eigen::VectorXd& z, Eigen::VectorXd& grad) const {
    const Eigen::VectorXcd r = a * net->hidden(z).cast<cd>() - c;
    const Eigen::VectorXd pull = 2.0 * (a.adjoint() * r).real();
    grad = net->hidden_vjp(z, pull);
    return r.squaredNorm();
  }
};

FoldedProblem fold_problem(const GenerativeNetwork& net, const MeasurementSet& meas,
                           const UnitaryOperator& op, const Eigen::VectorXd& weights) {
  const auto m = static_cast<Eigen::Index>(meas.plan.indices.size());
  require(meas.b.size() == m, "measurement vector does not match the plan");
  require(net.output_dim() == op.size(), "network output must match the transform size");
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  Eigen::MatrixXcd rows = op.sampled_rows(meas.plan.indices);
  for (Eigen::Index i = 0; i < m; ++i) rows.row(i) *= scale * weights[i];
  FoldedProblem problem;
  problem.net = &net;
  problem.a = rows * net.weight(net.depth() - 1).cast<cd>();
  problem.c = (meas.b.array() * weights.cast<cd>().array()).matrix();
  return problem;
}

// One Adam(W) run from the given initialization; returns the final iterate.
Eigen::VectorXd adam_minimize(const FoldedProblem& problem, Eigen::VectorXd z,
                              const RecoveryConfig& config) {
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(z.size());
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(z.size());
  Eigen::VectorXd grad(z.size());
  for (std::int64_t t = 1; t <= config.iterations; ++t) {
    const double value = problem.value_squared_and_gradient(z, grad);
    if (config.stop_tol > 0.0 && value < config.stop_tol) break;
    m1 = config.beta1 * m1 + (1.0 - config.beta1) * grad;
    m2 = config.beta2 * m2 + (1.0 - config.beta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));
    const Eigen::VectorXd step =
        (m1 / c1).cwiseQuotient(((m2 / c2).cwiseSqrt().array() + config.adam_eps).matrix());
    if (config.weight_decay > 0.0) z -= config.lr * config.weight_decay * z;
    z -= config.lr * step;
  }
  return z;
}

}  // namespace

MeasurementSet measure(const Eigen::VectorXd& x0, const SamplingPlan& plan,
                       const UnitaryOperator& op, const Eigen::VectorXcd& eta) {
  require(x0.size() == op.size(), "signal length does not match the transform size");
  const auto m = static_cast<Eigen::Index>(plan.indices.size());
  require(eta.size() == m, "noise length does not match the plan");
  const Eigen::VectorXcd fx = op.apply(x0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  MeasurementSet meas;
  meas.plan = plan;
  meas.noise = eta;
  meas.b.resize(m);
  for (Eigen::Index i = 0; i < m; ++i)
    meas.b[i] = scale * fx[plan.indices[static_cast<std::size_t>(i)]] + eta[i];
  return meas;
}

MeasurementSet measure(const Eigen::VectorXd& x0, const SamplingPlan& plan,
                       const UnitaryOperator& op) {
  return measure(x0, plan, op,
                 Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(plan.indices.size())));
}

Eigen::VectorXcd complex_gaussian_noise(Eigen::Index m, double level, RngStream rng) {
  require(level >= 0.0, "noise level must be nonnegative");
  Eigen::VectorXcd eta(m);
  const double component = level / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double re = rng.gaussian();
    const double im = rng.gaussian();
    eta[i] = cd(component * re, component * im);
  }
  return eta;
}

double objective_value(const Eigen::VectorXd& z, const GenerativeNetwork& net,
                       const MeasurementSet& meas, const UnitaryOperator& op,
                       const Preconditioner* precond, bool preconditioned) {
  const Eigen::VectorXd w = weights_for(meas, precond, preconditioned);
  const auto m = static_cast<Eigen::Index>(meas.plan.indices.size());
  require(meas.b.size() == m, "measurement vector does not match the plan");
  const Eigen::VectorXcd fx = op.apply(net.forward(z));
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const cd r = w[i] * (scale * fx[meas.plan.indices[static_cast<std::size_t>(i)]] -
                         meas.b[i]);
    acc += std::norm(r);
  }
  return std::sqrt(acc);
}

Eigen::VectorXd objective_gradient(const Eigen::VectorXd& z, const GenerativeNetwork& net,
                                   const MeasurementSet& meas, const UnitaryOperator& op,
                                   const Preconditioner* precond, bool preconditioned) {
  const Eigen::VectorXd w = weights_for(meas, precond, preconditioned);
  const FoldedProblem problem = fold_problem(net, meas, op, w);
  Eigen::VectorXd grad(z.size());
  problem.value_squared_and_gradient(z, grad);
  return grad;
}

RecoveryResult recover(const GenerativeNetwork& net, const MeasurementSet& meas,
                       const UnitaryOperator& op, const Preconditioner* precond,
                       const RecoveryConfig& config) {
  require(config.restarts >= 1, "need at least one restart");
  require(config.iterations >= 1, "need at least one iteration");
  require(config.lr > 0.0, "learning rate must be positive");
  require(config.beta1 >= 0.0 && config.beta1 < 1.0 && config.beta2 >= 0.0 &&
              config.beta2 < 1.0,
          "Adam betas must lie in [0, 1)");

  const Eigen::VectorXd w = weights_for(meas, precond, config.preconditioned);
  const FoldedProblem problem = fold_problem(net, meas, op, w);
  const RngStream root(config.seed);

  std::vector<Eigen::VectorXd> candidates(static_cast<std::size_t>(config.restarts));
  std::vector<double> finals(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t r) {
    RngStream init = root.split(r);
    Eigen::VectorXd z0(net.latent_dim());
    for (Eigen::Index i = 0; i < z0.size(); ++i) z0[i] = init.gaussian();
    candidates[r] = adam_minimize(problem, std::move(z0), config);
    finals[r] = std::sqrt(problem.value_squared(candidates[r]));
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < candidates.size(); ++r)
    if (finals[r] < finals[best]) best = r;  // ties keep the lowest index

  RecoveryResult result;
  result.z_hat = candidates[best];
  result.x_hat = net.forward(result.z_hat);
  result.restart_objectives = finals;
  result.objective = finals[best];
  result.eps_hat = finals[best];
  result.best_restart = static_cast<int>(best);
  return result;
}

double rre(const Eigen::VectorXd& x0, const Eigen::VectorXd& x_hat) {
  require(x0.size() == x_hat.size(), "rre: length mismatch");
  const double denom = x0.norm();
  require(denom > 0.0, "rre undefined for x0 = 0");
  return (x0 - x_hat).norm() / denom;
}

double error_bound_rhs(const Eigen::VectorXd& x_perp, const SamplingPlan& plan,
                       const Preconditioner& precond, const UnitaryOperator& op,
                       const Eigen::VectorXcd& eta, double eps_hat) {
  require(x_perp.size() == op.size(), "x_perp length does not match the transform");
  const auto m = static_cast<Eigen::Index>(plan.indices.size());
  require(eta.size() == m, "noise length does not match the plan");
  require(precond.d_sub.size() == m, "preconditioner does not match the plan");

  const Eigen::VectorXcd fx = op.apply(x_perp);
  double sdf_sq = 0.0;
  double noise_sq = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double d = precond.d_sub[i];
    sdf_sq += d * d * std::norm(fx[plan.indices[static_cast<std::size_t>(i)]]);
    noise_sq += d * d * std::norm(eta[i]);
  }
  return x_perp.norm() +
         3.0 / std::sqrt(static_cast<double>(m)) * std::sqrt(sdf_sq) +
         3.0 * std::sqrt(noise_sq) + 1.5 * eps_hat;
}

}  // namespace gcs
