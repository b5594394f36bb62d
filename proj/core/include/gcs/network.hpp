#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace gcs {

// Feedforward ReLU network G(z) = W_d sigma(... sigma(W_1 z)) mapping a
// latent code in R^k to a signal in R^n. The activation acts between layers
// only; the final layer is linear. Immutable after construction.
class GenerativeNetwork {
 public:
  // widths = (k_0, ..., k_d); weights[i] has shape k_{i+1} x k_i.
  GenerativeNetwork(std::vector<Eigen::Index> widths,
                    std::vector<Eigen::MatrixXd> weights);

  Eigen::Index latent_dim() const { return widths_.front(); }
  Eigen::Index output_dim() const { return widths_.back(); }
  Eigen::Index depth() const { return static_cast<Eigen::Index>(weights_.size()); }
  const std::vector<Eigen::Index>& widths() const { return widths_; }
  const Eigen::MatrixXd& weight(Eigen::Index layer) const { return weights_.at(layer); }
  Eigen::Index hidden_unit_count() const;

  Eigen::VectorXd forward(const Eigen::VectorXd& z) const;

  // Output of the hidden stack sigma(W_{d-1} ... sigma(W_1 z)); the identity
  // when d == 1. forward(z) == weight(d-1) * hidden(z).
  Eigen::VectorXd hidden(const Eigen::VectorXd& z) const;

  // J^T cotangent for the Jacobian J of forward at z, with the subgradient
  // convention sigma'(0) = 0.
  Eigen::VectorXd latent_gradient(const Eigen::VectorXd& z,
                                  const Eigen::VectorXd& cotangent) const;

  // Pullback through the hidden stack only: J_hidden^T cotangent.
  Eigen::VectorXd hidden_vjp(const Eigen::VectorXd& z,
                             const Eigen::VectorXd& cotangent) const;

 private:
  std::vector<Eigen::Index> widths_;
  std::vector<Eigen::MatrixXd> weights_;
};

// I.i.d. Gaussian weights with per-layer variance 1/k_{i-1}. Deterministic:
// the same seed yields bitwise-identical networks.
GenerativeNetwork random_gaussian_init(const std::vector<Eigen::Index>& widths,
                                       std::uint64_t seed);

// One linear region of the network. Within the region (a polyhedral cone in
// latent space) the network acts as z -> effective_map * z.
struct ActivationPiece {
  std::vector<std::uint8_t> pattern;  // one bit per hidden unit, layer-major
  Eigen::MatrixXd effective_map;      // n x k
  Eigen::VectorXd witness;            // unit-norm latent interior to the cone
};

// The sign pattern of the hidden pre-activations at z (strictly positive
// means active, matching sigma'(0) = 0).
std::vector<std::uint8_t> activation_pattern(const GenerativeNetwork& net,
                                             const Eigen::VectorXd& z);

// Every nonempty activation pattern, emptiness certified by a linear cone
// feasibility check (strict inequalities relaxed by an interior margin).
// Results are sorted by pattern bits. Throws if the net has more than 24
// hidden units or more than `budget` candidate patterns (budget <= 0 means
// the 2^24 default cap); the error suggests sample_pieces() instead.
std::vector<ActivationPiece> enumerate_pieces(const GenerativeNetwork& net,
                                              std::int64_t budget = 0);

// Sampling mode: patterns discovered by `probes` random latent draws. Each
// returned piece carries the first probe that hit it as witness. A subset of
// the exhaustive enumeration, sorted the same way.
std::vector<ActivationPiece> sample_pieces(const GenerativeNetwork& net,
                                           std::int64_t probes,
                                           std::uint64_t seed);

// log of the piece-count bound k(d-1)log(2e kbar / k) with kbar the geometric
// mean of the hidden widths; 0 for d == 1. Natural logarithm.
double piece_count_bound(const std::vector<Eigen::Index>& widths);

}  // namespace gcs
