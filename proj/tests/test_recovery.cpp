#include <Eigen/Dense>
#include <cmath>
#include <complex>

#include "doctest.h"
#include "gcs/coherence.hpp"
#include "gcs/network.hpp"
#include "gcs/recovery.hpp"
#include "gcs/rng.hpp"
#include "gcs/sampling.hpp"
#include "gcs/unitary.hpp"

using gcs::GenerativeNetwork;
using gcs::MeasurementSet;
using gcs::Preconditioner;
using gcs::RecoveryConfig;
using gcs::RngStream;
using gcs::SamplingPlan;
using gcs::UnitaryOperator;
using cd = std::complex<double>;

namespace {

Eigen::VectorXd random_real(Eigen::Index n, RngStream& rng) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.gaussian();
  return x;
}

SamplingPlan full_sampling_plan(Eigen::Index n) {
  SamplingPlan plan;
  plan.p = gcs::uniform_probabilities(n);
  plan.indices.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) plan.indices[static_cast<std::size_t>(i)] = i;
  return plan;
}

// Dense oracle: the full matrix (1/sqrt(m)) S F assembled explicitly.
Eigen::MatrixXcd dense_sf(const SamplingPlan& plan, const UnitaryOperator& op) {
  const auto m = static_cast<Eigen::Index>(plan.indices.size());
  const Eigen::Index n = op.size();
  Eigen::MatrixXcd f(n, n);
  for (Eigen::Index j = 0; j < n; ++j) f.row(j) = op.row(j).adjoint();
  Eigen::MatrixXcd sf(m, n);
  for (Eigen::Index i = 0; i < m; ++i)
    sf.row(i) = f.row(plan.indices[static_cast<std::size_t>(i)]);
  return sf / std::sqrt(static_cast<double>(m));
}

Eigen::VectorXd kink_free_latent(const GenerativeNetwork& net, RngStream& rng,
                                 double margin) {
  for (;;) {
    Eigen::VectorXd z = random_real(net.latent_dim(), rng);
    Eigen::VectorXd h = z;
    bool ok = true;
    for (Eigen::Index i = 0; i + 1 < net.depth() && ok; ++i) {
      const Eigen::VectorXd a = net.weight(i) * h;
      if (a.cwiseAbs().minCoeff() < margin) ok = false;
      h = a.cwiseMax(0.0);
    }
    if (ok) return z;
  }
}

}  // namespace

TEST_CASE("measuring the zero signal gives zero") {
  const auto op = UnitaryOperator::dft1d(8);
  const auto plan = gcs::draw_plan(gcs::uniform_probabilities(8), 6, 1);
  const auto meas = gcs::measure(Eigen::VectorXd::Zero(8), plan, op);
  CHECK(meas.b.norm() == 0.0);
}

TEST_CASE("full sampling scales norms by 1/sqrt(n)") {
  const Eigen::Index n = 16;
  const auto op = UnitaryOperator::dft1d(n);
  const auto plan = full_sampling_plan(n);
  RngStream rng(2);
  const Eigen::VectorXd x0 = random_real(n, rng);
  const auto meas = gcs::measure(x0, plan, op);
  CHECK(std::abs(meas.b.norm() - x0.norm() / std::sqrt(static_cast<double>(n))) < 1e-12);
}

TEST_CASE("measure matches the dense S F oracle entrywise") {
  const Eigen::Index n = 12;
  const auto op = UnitaryOperator::dft1d(n);
  const auto plan = gcs::draw_plan(gcs::uniform_probabilities(n), 7, 3);
  RngStream rng(4);
  const Eigen::VectorXd x0 = random_real(n, rng);
  Eigen::VectorXcd eta(7);
  for (Eigen::Index i = 0; i < 7; ++i) eta[i] = cd(rng.gaussian(), rng.gaussian());
  const auto meas = gcs::measure(x0, plan, op, eta);
  const Eigen::VectorXcd oracle = dense_sf(plan, op) * x0.cast<cd>() + eta;
  CHECK((meas.b - oracle).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("measure validates dimensions") {
  const auto op = UnitaryOperator::dft1d(8);
  const auto plan = gcs::draw_plan(gcs::uniform_probabilities(8), 4, 1);
  const Eigen::VectorXd bad = Eigen::VectorXd::Zero(7);
  CHECK_THROWS_AS(gcs::measure(bad, plan, op), std::invalid_argument);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(8);
  const Eigen::VectorXcd bad_eta = Eigen::VectorXcd::Zero(5);
  CHECK_THROWS_AS(gcs::measure(x0, plan, op, bad_eta), std::invalid_argument);
}

TEST_CASE("objective vanishes at an exact preimage") {
  const auto net = gcs::random_gaussian_init({4, 16, 64}, 5);
  const auto op = UnitaryOperator::dft1d(64);
  const auto plan = gcs::draw_plan(gcs::uniform_probabilities(64), 32, 7);
  RngStream rng(6);
  const Eigen::VectorXd z_star = random_real(4, rng);
  const auto meas = gcs::measure(net.forward(z_star), plan, op);
  CHECK(gcs::objective_value(z_star, net, meas, op, nullptr, false) < 1e-14);
  CHECK(gcs::objective_gradient(z_star, net, meas, op, nullptr, false).norm() < 1e-13);
}

TEST_CASE("uniform preconditioning rescales the objective by sqrt(n)") {
  const Eigen::Index n = 32;
  const auto net = gcs::random_gaussian_init({4, 8, n}, 9);
  const auto op = UnitaryOperator::dft1d(n);
  const auto plan = gcs::draw_plan(gcs::uniform_probabilities(n), 10, 2);
  const auto pre = gcs::build_preconditioner(plan);
  RngStream rng(8);
  const Eigen::VectorXd x0 = random_real(n, rng);
  const auto meas = gcs::measure(x0, plan, op);
  const Eigen::VectorXd z = random_real(4, rng);
  const double plain = gcs::objective_value(z, net, meas, op, nullptr, false);
  const double weighted = gcs::objective_value(z, net, meas, op, &pre, true);
  CHECK(weighted == doctest::Approx(std::sqrt(static_cast<double>(n)) * plain)
                        .epsilon(1e-12));
}

TEST_CASE("objective matches the dense matrix oracle") {
  const Eigen::Index n = 16;
  const auto net = gcs::random_gaussian_init({3, 6, n}, 11);
  const auto op = UnitaryOperator::dft1d(n);
  RngStream rng(12);
  const auto alpha = gcs::coherence_heuristic(net, op, 64, 13);
  const auto p = gcs::optimal_probabilities(alpha);
  const auto plan = gcs::draw_plan(p, 9, 14);
  const auto pre = gcs::build_preconditioner(plan);
  const Eigen::VectorXd x0 = random_real(n, rng);
  Eigen::VectorXcd eta(9);
  for (Eigen::Index i = 0; i < 9; ++i) eta[i] = 0.1 * cd(rng.gaussian(), rng.gaussian());
  const auto meas = gcs::measure(x0, plan, op, eta);
  const Eigen::VectorXd z = random_real(3, rng);

  const Eigen::MatrixXcd sf = dense_sf(plan, op);
  const Eigen::VectorXcd residual = sf * net.forward(z).cast<cd>() - meas.b;
  const Eigen::VectorXcd weighted = pre.d_sub.cast<cd>().asDiagonal() * residual;
  CHECK(gcs::objective_value(z, net, meas, op, nullptr, false) ==
        doctest::Approx(residual.norm()).epsilon(1e-10));
  CHECK(gcs::objective_value(z, net, meas, op, &pre, true) ==
        doctest::Approx(weighted.norm()).epsilon(1e-10));
}

TEST_CASE("gradient of a linear net under full identity sampling is closed form") {
  const Eigen::Index n = 10;
  const auto net = gcs::random_gaussian_init({3, n}, 15);
  const auto op = UnitaryOperator::identity(n);
  const auto plan = full_sampling_plan(n);
  RngStream rng(16);
  const Eigen::VectorXd x0 = random_real(n, rng);
  const auto meas = gcs::measure(x0, plan, op);
  const Eigen::VectorXd z = random_real(3, rng);
  const Eigen::VectorXd grad = gcs::objective_gradient(z, net, meas, op, nullptr, false);
  const Eigen::MatrixXd& w = net.weight(0);
  // Residual (1/sqrt(n))(Wz - x0) gives gradient (2/n) W^T (Wz - x0).
  const Eigen::VectorXd expect =
      2.0 / static_cast<double>(n) * w.transpose() * (w * z - x0);
  CHECK((grad - expect).norm() < 1e-10 * std::max(1.0, expect.norm()));
}

TEST_CASE("gradient matches finite differences on kink-free instances") {
  const auto net = gcs::random_gaussian_init({4, 12, 64}, 17);
  const auto op = UnitaryOperator::dft1d(64);
  RngStream rng(18);
  const double step = 1e-6;
  for (int trial = 0; trial < 10; ++trial) {
    const auto plan = gcs::draw_plan(gcs::uniform_probabilities(64), 24,
                                     static_cast<std::uint64_t>(trial));
    const Eigen::VectorXd x0 = random_real(64, rng);
    const auto meas = gcs::measure(x0, plan, op);
    const Eigen::VectorXd z = kink_free_latent(net, rng, 1e-3);
    const Eigen::VectorXd grad = gcs::objective_gradient(z, net, meas, op, nullptr, false);
    Eigen::VectorXd fd(4);
    for (Eigen::Index i = 0; i < 4; ++i) {
      Eigen::VectorXd zp = z, zm = z;
      zp[i] += step;
      zm[i] -= step;
      const double fp = std::pow(gcs::objective_value(zp, net, meas, op, nullptr, false), 2);
      const double fm = std::pow(gcs::objective_value(zm, net, meas, op, nullptr, false), 2);
      fd[i] = (fp - fm) / (2.0 * step);
    }
    CHECK((grad - fd).norm() < 1e-5 * std::max(1.0, fd.norm()));
  }
}

TEST_CASE("recovery finds in-range signals under full sampling") {
  const auto net = gcs::random_gaussian_init({4, 16, 64}, 21);
  const auto op = UnitaryOperator::dft1d(64);
  const auto plan = full_sampling_plan(64);

  RecoveryConfig config;
  config.restarts = 4;
  config.iterations = 4000;

  int hits = 0;
  const int runs = 50;
  for (int run = 0; run < runs; ++run) {
    RngStream rng(1000 + run);
    Eigen::VectorXd z_star(4);
    for (Eigen::Index i = 0; i < 4; ++i) z_star[i] = rng.gaussian();
    const Eigen::VectorXd x0 = net.forward(z_star);
    const auto meas = gcs::measure(x0, plan, op);
    config.seed = static_cast<std::uint64_t>(run);
    const auto result = gcs::recover(net, meas, op, nullptr, config);
    if (gcs::rre(x0, result.x_hat) < 1e-3) ++hits;
  }
  CHECK(hits >= 45);  // >= 90% of 50 seeded runs
}

TEST_CASE("recovering the zero signal returns (near) zero") {
  const auto net = gcs::random_gaussian_init({4, 8, 32}, 23);
  const auto op = UnitaryOperator::dft1d(32);
  const auto plan = full_sampling_plan(32);
  const auto meas = gcs::measure(Eigen::VectorXd::Zero(32), plan, op);
  RecoveryConfig config;
  config.restarts = 2;
  config.iterations = 4000;
  config.seed = 5;
  const auto result = gcs::recover(net, meas, op, nullptr, config);
  CHECK(result.x_hat.norm() <= 1e-6);
}

TEST_CASE("recovery is deterministic given the seed") {
  const auto net = gcs::random_gaussian_init({3, 8, 16}, 25);
  const auto op = UnitaryOperator::dft1d(16);
  const auto plan = gcs::draw_plan(gcs::uniform_probabilities(16), 12, 3);
  RngStream rng(26);
  const auto meas = gcs::measure(net.forward(random_real(3, rng)), plan, op);
  RecoveryConfig config;
  config.restarts = 2;
  config.iterations = 300;
  config.seed = 7;
  const auto a = gcs::recover(net, meas, op, nullptr, config);
  const auto b = gcs::recover(net, meas, op, nullptr, config);
  CHECK((a.z_hat - b.z_hat).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.objective == b.objective);
}

TEST_CASE("reported objective re-evaluates at z_hat") {
  const auto net = gcs::random_gaussian_init({3, 8, 16}, 27);
  const auto op = UnitaryOperator::dft1d(16);
  const auto plan = gcs::draw_plan(gcs::uniform_probabilities(16), 10, 4);
  const auto pre = gcs::build_preconditioner(plan);
  RngStream rng(28);
  const auto meas = gcs::measure(net.forward(random_real(3, rng)), plan, op);
  RecoveryConfig config;
  config.restarts = 2;
  config.iterations = 500;
  config.preconditioned = true;
  config.seed = 9;
  const auto result = gcs::recover(net, meas, op, &pre, config);
  const double again = gcs::objective_value(result.z_hat, net, meas, op, &pre, true);
  CHECK(std::abs(result.objective - again) < 1e-10);
  CHECK(result.eps_hat == result.objective);
}

TEST_CASE("more restarts never worsen the best objective") {
  const auto net = gcs::random_gaussian_init({3, 8, 16}, 29);
  const auto op = UnitaryOperator::dft1d(16);
  const auto plan = gcs::draw_plan(gcs::uniform_probabilities(16), 8, 5);
  RngStream rng(30);
  const auto meas = gcs::measure(net.forward(random_real(3, rng)), plan, op);
  RecoveryConfig config;
  config.iterations = 400;
  config.seed = 11;
  config.restarts = 2;
  const auto few = gcs::recover(net, meas, op, nullptr, config);
  config.restarts = 5;
  const auto many = gcs::recover(net, meas, op, nullptr, config);
  // Same seed prefix: the first two initializations coincide.
  CHECK(many.objective <= few.objective + 1e-15);
}

TEST_CASE("rre hand values and the zero-signal error") {
  Eigen::VectorXd x0(2), xhat(2);
  x0 << 3, 4;
  xhat << 0, 4;
  CHECK(gcs::rre(x0, x0) == 0.0);
  CHECK(gcs::rre(x0, Eigen::VectorXd::Zero(2)) == doctest::Approx(1.0));
  CHECK(gcs::rre(x0, xhat) == doctest::Approx(0.6));
  CHECK_THROWS_AS(gcs::rre(Eigen::VectorXd::Zero(2), xhat), std::invalid_argument);
}

TEST_CASE("error bound terms, hand-checked and against the dense oracle") {
  const Eigen::Index n = 16;
  const auto op = UnitaryOperator::dft1d(n);
  RngStream rng(31);
  const auto alpha = gcs::coherence_heuristic(gcs::random_gaussian_init({3, 6, n}, 32),
                                              op, 64, 33);
  const auto p = gcs::optimal_probabilities(alpha);
  const auto plan = gcs::draw_plan(p, 11, 34);
  const auto pre = gcs::build_preconditioner(plan);
  const auto m = static_cast<Eigen::Index>(plan.indices.size());

  // In-range noiseless: only the suboptimality term remains.
  CHECK(gcs::error_bound_rhs(Eigen::VectorXd::Zero(n), plan, pre, op,
                             Eigen::VectorXcd::Zero(m), 0.02) ==
        doctest::Approx(0.03).epsilon(1e-12));

  // Pure noise: three times the preconditioned noise norm.
  Eigen::VectorXcd eta(m);
  for (Eigen::Index i = 0; i < m; ++i) eta[i] = cd(rng.gaussian(), rng.gaussian());
  const Eigen::VectorXcd weighted_eta = pre.d_sub.cast<cd>().asDiagonal() * eta;
  CHECK(gcs::error_bound_rhs(Eigen::VectorXd::Zero(n), plan, pre, op, eta, 0.0) ==
        doctest::Approx(3.0 * weighted_eta.norm()).epsilon(1e-12));

  // Full four-term expression against explicit matrices.
  const Eigen::VectorXd x_perp = random_real(n, rng);
  const Eigen::MatrixXcd sdf =
      pre.d_sub.cast<cd>().asDiagonal() * (std::sqrt(static_cast<double>(m)) *
                                           dense_sf(plan, op));
  const double expect = x_perp.norm() +
                        3.0 / std::sqrt(static_cast<double>(m)) *
                            (sdf * x_perp.cast<cd>()).norm() +
                        3.0 * weighted_eta.norm() + 1.5 * 0.4;
  CHECK(gcs::error_bound_rhs(x_perp, plan, pre, op, eta, 0.4) ==
        doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("noise helper is deterministic with the requested power") {
  const auto a = gcs::complex_gaussian_noise(2000, 0.5, RngStream(40));
  const auto b = gcs::complex_gaussian_noise(2000, 0.5, RngStream(40));
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.squaredNorm() / 2000.0 == doctest::Approx(0.25).epsilon(0.1));
  CHECK(gcs::complex_gaussian_noise(4, 0.0, RngStream(1)).norm() == 0.0);
}
