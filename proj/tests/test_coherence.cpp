#include <Eigen/Dense>
#include <cmath>
#include <cstdio>

#include "doctest.h"
#include "gcs/coherence.hpp"
#include "gcs/network.hpp"
#include "gcs/rng.hpp"
#include "gcs/unitary.hpp"

using gcs::CoherenceVector;
using gcs::GenerativeNetwork;
using gcs::RngStream;
using gcs::UnitaryOperator;

namespace {

Eigen::MatrixXd random_orthonormal_basis(Eigen::Index n, Eigen::Index k, RngStream rng) {
  Eigen::MatrixXd g(n, k);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < k; ++c) g(r, c) = rng.gaussian();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return Eigen::MatrixXd(qr.householderQ() * Eigen::MatrixXd::Identity(n, k));
}

// Brute-force sampled coherence: max_j |(F v)_j| over normalized differences
// of range points. Straight-line code, independent of the library pair sweep.
Eigen::VectorXd brute_force_coherence(const GenerativeNetwork& net,
                                      const UnitaryOperator& op, int samples,
                                      std::uint64_t seed) {
  RngStream rng(seed);
  Eigen::VectorXd best = Eigen::VectorXd::Zero(op.size());
  Eigen::VectorXd z1(net.latent_dim()), z2(net.latent_dim());
  for (int t = 0; t < samples; ++t) {
    for (Eigen::Index i = 0; i < z1.size(); ++i) z1[i] = rng.gaussian();
    for (Eigen::Index i = 0; i < z2.size(); ++i) z2[i] = rng.gaussian();
    const Eigen::VectorXd diff = net.forward(z1) - net.forward(z2);
    const double norm = diff.norm();
    if (norm == 0.0) continue;
    best = best.cwiseMax(op.apply(Eigen::VectorXd(diff / norm)).cwiseAbs());
  }
  return best;
}

}  // namespace

TEST_CASE("subspace coherence of a canonical direction under identity") {
  const auto op = UnitaryOperator::identity(5);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(5, 1);
  basis(0, 0) = 1.0;
  const auto cv = gcs::coherence_exact_subspace(op, basis);
  CHECK(cv.alpha[0] == doctest::Approx(1.0));
  CHECK(cv.alpha.tail(4).norm() == doctest::Approx(0.0));
}

TEST_CASE("full basis gives unit coherence everywhere") {
  for (const auto& op : {UnitaryOperator::dft1d(8), UnitaryOperator::hadamard(8)}) {
    const Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(8, 8);
    const auto cv = gcs::coherence_exact_subspace(op, basis);
    for (Eigen::Index j = 0; j < 8; ++j) CHECK(cv.alpha[j] == doctest::Approx(1.0));
  }
}

TEST_CASE("one-dimensional priors have unit coherence norm") {
  const auto op = UnitaryOperator::dft1d(8);
  RngStream rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd basis(8, 1);
    for (Eigen::Index i = 0; i < 8; ++i) basis(i, 0) = rng.gaussian();
    basis.col(0).normalize();
    const auto cv = gcs::coherence_exact_subspace(op, basis);
    CHECK(std::abs(cv.alpha.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("non-orthonormal bases are rejected") {
  const auto op = UnitaryOperator::dft1d(8);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(8, 2);
  basis(0, 1) = 0.5;  // columns no longer orthogonal
  CHECK_THROWS_AS(gcs::coherence_exact_subspace(op, basis), std::invalid_argument);
}

TEST_CASE("subspace coherence is monotone under inclusion") {
  const auto op = UnitaryOperator::dft1d(16);
  const Eigen::MatrixXd big = random_orthonormal_basis(16, 5, RngStream(8));
  const Eigen::MatrixXd small = big.leftCols(2);
  const auto a_small = gcs::coherence_exact_subspace(op, small);
  const auto a_big = gcs::coherence_exact_subspace(op, big);
  for (Eigen::Index j = 0; j < 16; ++j) CHECK(a_small.alpha[j] <= a_big.alpha[j] + 1e-12);
}

TEST_CASE("coherence values stay in [0, 1]") {
  const auto net = gcs::random_gaussian_init({2, 3, 4}, 99);
  for (const auto& op : {UnitaryOperator::dft1d(4), UnitaryOperator::hadamard(4)}) {
    const auto exact = gcs::coherence_exact_pieces(op, gcs::enumerate_pieces(net));
    const auto heur = gcs::coherence_heuristic(net, op, 200, 5);
    for (Eigen::Index j = 0; j < 4; ++j) {
      CHECK(exact.alpha[j] >= 0.0);
      CHECK(exact.alpha[j] <= 1.0 + 1e-12);
      CHECK(heur.alpha[j] >= 0.0);
      CHECK(heur.alpha[j] <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("single-piece linear net reduces to the subspace method") {
  const auto net = gcs::random_gaussian_init({2, 6}, 12);
  const auto op = UnitaryOperator::dft1d(6);
  const auto pieces = gcs::enumerate_pieces(net);
  const auto from_pieces = gcs::coherence_exact_pieces(op, pieces);
  const Eigen::MatrixXd basis = gcs::column_space_basis(net.weight(0));
  const auto from_subspace = gcs::coherence_exact_subspace(op, basis);
  CHECK((from_pieces.alpha - from_subspace.alpha).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("exact pieces coherence norm is at least one") {
  // range(G) - range(G) contains the line through G(z) for any z.
  const auto net = gcs::random_gaussian_init({2, 3, 4}, 99);
  for (const auto& op : {UnitaryOperator::dft1d(4), UnitaryOperator::hadamard(4)}) {
    const auto exact = gcs::coherence_exact_pieces(op, gcs::enumerate_pieces(net));
    CHECK(exact.alpha.norm() >= 1.0 - 1e-12);
  }
}

TEST_CASE("heuristic is a componentwise lower bound for exact pieces") {
  const auto net = gcs::random_gaussian_init({2, 3, 4}, 99);
  for (const auto& op : {UnitaryOperator::dft1d(4), UnitaryOperator::hadamard(4)}) {
    const auto exact = gcs::coherence_exact_pieces(op, gcs::enumerate_pieces(net));
    const auto heur = gcs::coherence_heuristic(net, op, 500, 7);
    for (Eigen::Index j = 0; j < 4; ++j) CHECK(heur.alpha[j] <= exact.alpha[j] + 1e-9);
  }
}

TEST_CASE("exact pieces matches the brute-force sup on a real transform") {
  // With a real unitary matrix the sup over real unit vectors equals the
  // projection norm, so dense sampling must approach the exact value. (With a
  // complex DFT the sampled sup stalls below it wherever the projected real
  // and imaginary parts of a row are non-parallel.)
  const auto net = gcs::random_gaussian_init({2, 3, 4}, 99);
  const auto op = UnitaryOperator::hadamard(4);
  const auto exact = gcs::coherence_exact_pieces(op, gcs::enumerate_pieces(net));
  const Eigen::VectorXd brute = brute_force_coherence(net, op, 1000000, 5);
  for (Eigen::Index j = 0; j < 4; ++j) {
    CHECK(brute[j] <= exact.alpha[j] + 1e-9);
    if (exact.alpha[j] > 0.1) CHECK(brute[j] >= 0.95 * exact.alpha[j]);
  }
}

TEST_CASE("heuristic with batch 2 is the single-pair value") {
  const auto net = gcs::random_gaussian_init({2, 3, 4}, 42);
  const auto op = UnitaryOperator::dft1d(4);
  const std::uint64_t seed = 31;
  const auto heur = gcs::coherence_heuristic(net, op, 2, seed);

  RngStream rng(seed);  // replay the documented draw order
  Eigen::VectorXd z1(2), z2(2);
  for (Eigen::Index i = 0; i < 2; ++i) z1[i] = rng.gaussian();
  for (Eigen::Index i = 0; i < 2; ++i) z2[i] = rng.gaussian();
  const Eigen::VectorXd diff = net.forward(z1) - net.forward(z2);
  const Eigen::VectorXd expect =
      op.apply(Eigen::VectorXd(diff / diff.norm())).cwiseAbs();
  CHECK((heur.alpha - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("heuristic on a one-dimensional range recovers the line coherence") {
  // Final map with collinear columns: every difference is a multiple of u.
  Eigen::VectorXd u(6);
  u << 1, 2, -1, 0.5, 3, -2;
  u.normalize();
  Eigen::MatrixXd w(6, 2);
  w.col(0) = u;
  w.col(1) = 2.0 * u;
  const GenerativeNetwork net({2, 6}, {w});
  const auto op = UnitaryOperator::dft1d(6);
  const auto heur = gcs::coherence_heuristic(net, op, 100, 3);
  const Eigen::VectorXd expect = op.apply(u).cwiseAbs();
  CHECK((heur.alpha - expect).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("heuristic is monotone in the batch for a shared seed") {
  const auto net = gcs::random_gaussian_init({2, 3, 4}, 42);
  const auto op = UnitaryOperator::dft1d(4);
  const auto small = gcs::coherence_heuristic(net, op, 50, 11);
  const auto large = gcs::coherence_heuristic(net, op, 120, 11);
  for (Eigen::Index j = 0; j < 4; ++j) CHECK(small.alpha[j] <= large.alpha[j] + 1e-15);
}

TEST_CASE("heuristic is deterministic and rejects tiny batches") {
  const auto net = gcs::random_gaussian_init({2, 3, 4}, 42);
  const auto op = UnitaryOperator::dft1d(4);
  const auto a = gcs::coherence_heuristic(net, op, 64, 5);
  const auto b = gcs::coherence_heuristic(net, op, 64, 5);
  CHECK((a.alpha - b.alpha).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(gcs::coherence_heuristic(net, op, 1, 5), std::invalid_argument);
}

TEST_CASE("identical images are skipped rather than normalized") {
  // Zero first layer collapses the range to {0}: every difference vanishes.
  std::vector<Eigen::MatrixXd> weights{Eigen::MatrixXd::Zero(3, 2),
                                       Eigen::MatrixXd::Random(4, 3)};
  const GenerativeNetwork net({2, 3, 4}, std::move(weights));
  const auto op = UnitaryOperator::dft1d(4);
  const auto heur = gcs::coherence_heuristic(net, op, 16, 5);
  CHECK(heur.alpha.norm() == 0.0);
}

TEST_CASE("expansion containment check passes on enumerated pieces") {
  const auto linear = gcs::random_gaussian_init({2, 5}, 8);
  const auto linear_report = gcs::piecewise_expansion_properties_check(
      linear, gcs::enumerate_pieces(linear), 1000, 3);
  CHECK(linear_report.pass());

  const auto net = gcs::random_gaussian_init({2, 3, 4}, 99);
  const auto report = gcs::piecewise_expansion_properties_check(
      net, gcs::enumerate_pieces(net), 10000, 3);
  CHECK(report.unassigned == 0);
  CHECK(report.span_violations == 0);
  CHECK(report.max_residual <= 1e-8);
}

TEST_CASE("expansion check flags points that match no piece") {
  const auto net = gcs::random_gaussian_init({2, 3, 4}, 99);
  auto pieces = gcs::enumerate_pieces(net);
  pieces.pop_back();  // drop one region; its samples have nowhere to go
  const auto report = gcs::piecewise_expansion_properties_check(net, pieces, 2000, 3);
  CHECK(report.unassigned > 0);
  CHECK_FALSE(report.pass());
}

TEST_CASE("coherence CSV round-trips") {
  const auto net = gcs::random_gaussian_init({2, 3, 4}, 42);
  const auto op = UnitaryOperator::dft1d(4);
  const auto cv = gcs::coherence_heuristic(net, op, 32, 5);
  gcs::save_coherence_csv(cv, "test_alpha.csv");
  const auto loaded = gcs::load_coherence_csv("test_alpha.csv");
  CHECK((loaded.alpha - cv.alpha).cwiseAbs().maxCoeff() == 0.0);
  std::remove("test_alpha.csv");
}

TEST_CASE("empty piece lists are rejected") {
  const auto op = UnitaryOperator::dft1d(4);
  CHECK_THROWS_AS(gcs::coherence_exact_pieces(op, {}), std::invalid_argument);
}
