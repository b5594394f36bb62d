#include "gcs/network.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gcs/common.hpp"
#include "gcs/rng.hpp"

namespace gcs {

GenerativeNetwork::GenerativeNetwork(std::vector<Eigen::Index> widths,
                                     std::vector<Eigen::MatrixXd> weights)
    : widths_(std::move(widths)), weights_(std::move(weights)) {
  require(widths_.size() >= 2, "network needs widths (k_0, ..., k_d) with d >= 1");
  require(widths_.front() >= 2, "latent dimension k must be at least 2");
  for (Eigen::Index w : widths_) require(w >= 1, "all layer widths must be positive");
  require(weights_.size() + 1 == widths_.size(),
          "expected one weight matrix per layer");
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    require(weights_[i].rows() == widths_[i + 1] && weights_[i].cols() == widths_[i],
            "weight " + std::to_string(i + 1) + " must be " +
                std::to_string(widths_[i + 1]) + " x " + std::to_string(widths_[i]));
  }
}

Eigen::Index GenerativeNetwork::hidden_unit_count() const {
  Eigen::Index total = 0;
  for (std::size_t i = 1; i + 1 < widths_.size(); ++i) total += widths_[i];
  return total;
}

Eigen::VectorXd GenerativeNetwork::forward(const Eigen::VectorXd& z) const {
  require(z.size() == latent_dim(), "latent vector has wrong dimension");
  Eigen::VectorXd h = z;
  for (Eigen::Index i = 0; i < depth(); ++i) {
    h = weights_[i] * h;
    if (i + 1 < depth()) h = h.cwiseMax(0.0);
  }
  return h;
}

Eigen::VectorXd GenerativeNetwork::hidden(const Eigen::VectorXd& z) const {
  require(z.size() == latent_dim(), "latent vector has wrong dimension");
  Eigen::VectorXd h = z;
  for (Eigen::Index i = 0; i + 1 < depth(); ++i) h = (weights_[i] * h).cwiseMax(0.0);
  return h;
}

Eigen::VectorXd GenerativeNetwork::latent_gradient(const Eigen::VectorXd& z,
                                                   const Eigen::VectorXd& cotangent) const {
  require(cotangent.size() == output_dim(), "cotangent has wrong dimension");
  return hidden_vjp(z, weights_.back().transpose() * cotangent);
}

Eigen::VectorXd GenerativeNetwork::hidden_vjp(const Eigen::VectorXd& z,
                                              const Eigen::VectorXd& cotangent) const {
  require(z.size() == latent_dim(), "latent vector has wrong dimension");
  require(cotangent.size() == widths_[widths_.size() - 2],
          "cotangent has wrong dimension for the hidden stack");
  const Eigen::Index hidden_layers = depth() - 1;
  std::vector<Eigen::VectorXd> pre(hidden_layers);
  Eigen::VectorXd h = z;
  for (Eigen::Index i = 0; i < hidden_layers; ++i) {
    pre[i] = weights_[i] * h;
    h = pre[i].cwiseMax(0.0);
  }
  Eigen::VectorXd g = cotangent;
  for (Eigen::Index i = hidden_layers - 1; i >= 0; --i) {
    g = (pre[i].array() > 0.0).select(g, 0.0);
    g = weights_[i].transpose() * g;
  }
  return g;
}

GenerativeNetwork random_gaussian_init(const std::vector<Eigen::Index>& widths,
                                       std::uint64_t seed) {
  require(widths.size() >= 2, "network needs widths (k_0, ..., k_d) with d >= 1");
  RngStream root(seed);
  std::vector<Eigen::MatrixXd> weights;
  weights.reserve(widths.size() - 1);
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    require(widths[i] >= 1 && widths[i + 1] >= 1, "all layer widths must be positive");
    RngStream layer = root.split(i);
    const double scale = 1.0 / std::sqrt(static_cast<double>(widths[i]));
    Eigen::MatrixXd w(widths[i + 1], widths[i]);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = scale * layer.gaussian();
    weights.push_back(std::move(w));
  }
  return GenerativeNetwork(widths, std::move(weights));
}

double piece_count_bound(const std::vector<Eigen::Index>& widths) {
  require(widths.size() >= 2, "need widths (k_0, ..., k_d)");
  const auto d = static_cast<Eigen::Index>(widths.size()) - 1;
  if (d == 1) return 0.0;
  const double k = static_cast<double>(widths.front());
  double log_kbar = 0.0;
  for (Eigen::Index i = 1; i < d; ++i) log_kbar += std::log(static_cast<double>(widths[i]));
  log_kbar /= static_cast<double>(d - 1);
  const double kbar = std::exp(log_kbar);
  return k * static_cast<double>(d - 1) * std::log(2.0 * std::numbers::e * kbar / k);
}

std::vector<std::uint8_t> activation_pattern(const GenerativeNetwork& net,
                                             const Eigen::VectorXd& z) {
  std::vector<std::uint8_t> bits;
  bits.reserve(net.hidden_unit_count());
  Eigen::VectorXd h = z;
  for (Eigen::Index i = 0; i + 1 < net.depth(); ++i) {
    const Eigen::VectorXd a = net.weight(i) * h;
    for (Eigen::Index u = 0; u < a.size(); ++u) bits.push_back(a[u] > 0.0 ? 1 : 0);
    h = a.cwiseMax(0.0);
  }
  return bits;
}

}  // namespace gcs
