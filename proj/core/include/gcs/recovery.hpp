#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gcs/network.hpp"
#include "gcs/sampling.hpp"
#include "gcs/unitary.hpp"

namespace gcs {

// b = (1/sqrt(m)) S F x0 + eta, with the noise kept for diagnostics.
struct MeasurementSet {
  Eigen::VectorXcd b;
  SamplingPlan plan;
  Eigen::VectorXcd noise;
};

MeasurementSet measure(const Eigen::VectorXd& x0, const SamplingPlan& plan,
                       const UnitaryOperator& op, const Eigen::VectorXcd& eta);
MeasurementSet measure(const Eigen::VectorXd& x0, const SamplingPlan& plan,
                       const UnitaryOperator& op);

// Measurement-domain noise with i.i.d. complex Gaussian entries of RMS `level`.
Eigen::VectorXcd complex_gaussian_noise(Eigen::Index m, double level, RngStream rng);

struct RecoveryConfig {
  int restarts = 4;
  std::int64_t iterations = 20000;
  double lr = 0.003;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double weight_decay = 0.0;  // AdamW decoupled decay; 0 makes it plain Adam
  double adam_eps = 1e-8;
  bool preconditioned = false;
  // Early stop when the squared objective drops below this; 0 disables.
  double stop_tol = 0.0;
  std::uint64_t seed = 0;
};

struct RecoveryResult {
  Eigen::VectorXd z_hat;
  Eigen::VectorXd x_hat;
  std::vector<double> restart_objectives;  // final unsquared objective per restart
  double objective = 0.0;                  // unsquared, at z_hat
  double eps_hat = 0.0;                    // == objective; a certified suboptimality bound
  int best_restart = -1;
};

// Unsquared data-fit objective at z. Preconditioned mode weighs the residual
// by d_sub (pass the plan's preconditioner); otherwise precond may be null.
double objective_value(const Eigen::VectorXd& z, const GenerativeNetwork& net,
                       const MeasurementSet& meas, const UnitaryOperator& op,
                       const Preconditioner* precond, bool preconditioned);

// Gradient of the squared objective with respect to z (complex residuals are
// handled by their real/imaginary parts; sigma'(0) = 0 at ReLU kinks).
Eigen::VectorXd objective_gradient(const Eigen::VectorXd& z, const GenerativeNetwork& net,
                                   const MeasurementSet& meas, const UnitaryOperator& op,
                                   const Preconditioner* precond, bool preconditioned);

// Multi-restart Adam(W) over the latent space from Gaussian initializations;
// returns the restart with the lowest final objective (ties broken by restart
// index). Deterministic given config.seed.
RecoveryResult recover(const GenerativeNetwork& net, const MeasurementSet& meas,
                       const UnitaryOperator& op, const Preconditioner* precond,
                       const RecoveryConfig& config);

// Relative recovery error |x0 - x_hat| / |x0|; throws when x0 = 0.
double rre(const Eigen::VectorXd& x0, const Eigen::VectorXd& x_hat);

// Success threshold used by the phase-transition experiments.
inline constexpr double kSuccessRreThreshold = 3e-3;

// |x_perp| + (3/sqrt(m)) |S D F x_perp| + 3 |D~ eta| + 1.5 eps_hat.
double error_bound_rhs(const Eigen::VectorXd& x_perp, const SamplingPlan& plan,
                       const Preconditioner& precond, const UnitaryOperator& op,
                       const Eigen::VectorXcd& eta, double eps_hat);

}  // namespace gcs
