#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gcs/common.hpp"
#include "gcs/network.hpp"
#include "gcs/rng.hpp"

namespace gcs {
namespace {

constexpr double kInteriorMargin = 1e-9;
constexpr int kMaxExhaustiveHiddenUnits = 24;

// Minimum-norm point of conv{points} by Wolfe's algorithm. The points here
// are unit rows, so norms are O(1). By Gordan's theorem the system
// <q_j, z> > 0 for all j is feasible iff the minimum norm is positive, and
// the min-norm point v itself is then a witness: <q_j, v> >= |v|^2 for all j.
Eigen::VectorXd min_norm_point(const std::vector<Eigen::VectorXd>& points) {
  const auto m = static_cast<Eigen::Index>(points.size());
  const Eigen::Index dim = points.front().size();

  Eigen::Index start = 0;
  for (Eigen::Index j = 1; j < m; ++j)
    if (points[j].squaredNorm() < points[start].squaredNorm()) start = j;

  std::vector<Eigen::Index> corral{start};
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd x = points[start];

  const double tol = 1e-13;
  const int max_iter = 64 + 16 * static_cast<int>(m);
  for (int iter = 0; iter < max_iter; ++iter) {
    // Linear minimization step.
    Eigen::Index best = 0;
    double best_dot = x.dot(points[0]);
    for (Eigen::Index j = 1; j < m; ++j) {
      const double d = x.dot(points[j]);
      if (d < best_dot) {
        best_dot = d;
        best = j;
      }
    }
    if (best_dot > x.squaredNorm() - tol) return x;  // optimal
    if (std::find(corral.begin(), corral.end(), best) != corral.end()) return x;

    corral.push_back(best);
    weights.conservativeResize(weights.size() + 1);
    weights[weights.size() - 1] = 0.0;

    // Minor cycle: move to the affine min-norm point of the corral, shrinking
    // the corral while any affine coefficient is nonpositive.
    for (;;) {
      const auto s = static_cast<Eigen::Index>(corral.size());
      Eigen::MatrixXd q(dim, s);
      for (Eigen::Index c = 0; c < s; ++c) q.col(c) = points[corral[c]];
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + 1, s + 1);
      kkt.topLeftCorner(s, s) = q.transpose() * q;
      kkt.topRightCorner(s, 1).setOnes();
      kkt.bottomLeftCorner(1, s).setOnes();
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s + 1);
      rhs[s] = 1.0;
      const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
      const Eigen::VectorXd v = sol.head(s);

      if ((v.array() > 1e-12).all()) {
        weights = v;
        x = q * v;
        break;
      }

      // Step as far towards v as nonnegativity of the weights allows.
      double theta = 1.0;
      for (Eigen::Index c = 0; c < s; ++c) {
        if (v[c] <= 1e-12 && weights[c] > v[c])
          theta = std::min(theta, weights[c] / (weights[c] - v[c]));
      }
      weights = (1.0 - theta) * weights + theta * v;
      std::vector<Eigen::Index> kept;
      std::vector<double> kept_w;
      for (Eigen::Index c = 0; c < s; ++c) {
        if (weights[c] > 1e-12) {
          kept.push_back(corral[c]);
          kept_w.push_back(weights[c]);
        }
      }
      if (kept.empty()) {  // numerically collapsed; report current point
        kept.push_back(corral[0]);
        kept_w.push_back(1.0);
      }
      corral = std::move(kept);
      weights = Eigen::Map<Eigen::VectorXd>(kept_w.data(),
                                            static_cast<Eigen::Index>(kept_w.size()));
      weights /= weights.sum();
      Eigen::MatrixXd qk(dim, static_cast<Eigen::Index>(corral.size()));
      for (Eigen::Index c = 0; c < qk.cols(); ++c) qk.col(c) = points[corral[c]];
      x = qk * weights;
    }
  }
  return x;
}

struct Feasibility {
  bool feasible = false;
  Eigen::VectorXd witness;
};

// Strict feasibility of <q_j, z> > 0 over unit rows q_j, with interior
// margin: regions thinner than kInteriorMargin count as empty.
Feasibility strict_cone_feasible(const std::vector<Eigen::VectorXd>& rows,
                                 Eigen::Index dim) {
  Feasibility out;
  if (rows.empty()) {
    out.feasible = true;
    out.witness = Eigen::VectorXd::Unit(dim, 0);
    return out;
  }
  const Eigen::VectorXd v = min_norm_point(rows);
  const double norm = v.norm();
  if (norm < kInteriorMargin) return out;
  out.witness = v / norm;
  for (const auto& q : rows)
    if (q.dot(out.witness) <= 0.0) return out;  // solver failed to certify
  out.feasible = true;
  return out;
}

struct EnumerationState {
  const GenerativeNetwork* net = nullptr;
  std::vector<Eigen::VectorXd> rows;     // accumulated signed unit constraint rows
  std::vector<std::uint8_t> pattern;
  std::vector<ActivationPiece> out;
};

void verify_piece(const GenerativeNetwork& net, const ActivationPiece& piece) {
  const Eigen::VectorXd lhs = net.forward(piece.witness);
  const Eigen::VectorXd rhs = piece.effective_map * piece.witness;
  const double err = (lhs - rhs).norm();
  if (err > 1e-10 * std::max(1.0, rhs.norm()))
    throw std::logic_error("activation piece failed witness verification");
}

// Depth-first over layers; `masked` maps the latent space to the current
// layer's input under the pattern chosen so far.
void enumerate_layer(EnumerationState& st, Eigen::Index layer,
                     const Eigen::MatrixXd& masked) {
  const GenerativeNetwork& net = *st.net;
  if (layer + 1 == net.depth()) {
    const Feasibility feas = strict_cone_feasible(st.rows, net.latent_dim());
    if (!feas.feasible) return;
    ActivationPiece piece;
    piece.pattern = st.pattern;
    piece.effective_map = net.weight(layer) * masked;
    piece.witness = feas.witness;
    verify_piece(net, piece);
    st.out.push_back(std::move(piece));
    return;
  }

  const Eigen::MatrixXd pre = net.weight(layer) * masked;  // k_{layer+1} x k
  const Eigen::Index units = pre.rows();
  const auto mask_count = static_cast<std::uint64_t>(1) << units;

  for (std::uint64_t mask = 0; mask < mask_count; ++mask) {
    const std::size_t row_base = st.rows.size();
    const std::size_t pat_base = st.pattern.size();
    bool viable = true;
    for (Eigen::Index u = 0; u < units && viable; ++u) {
      const bool active = (mask >> u) & 1u;
      const Eigen::VectorXd row = pre.row(u).transpose();
      const double norm = row.norm();
      if (norm == 0.0) {
        // A structurally dead unit is never strictly active.
        if (active) viable = false;
      } else {
        st.rows.push_back((active ? 1.0 : -1.0) / norm * row);
      }
      st.pattern.push_back(active ? 1 : 0);
    }
    if (viable && strict_cone_feasible(st.rows, net.latent_dim()).feasible) {
      Eigen::MatrixXd next = pre;
      for (Eigen::Index u = 0; u < units; ++u)
        if (!((mask >> u) & 1u)) next.row(u).setZero();
      enumerate_layer(st, layer + 1, next);
    }
    st.rows.resize(row_base);
    st.pattern.resize(pat_base);
  }
}

Eigen::MatrixXd effective_map_for_pattern(const GenerativeNetwork& net,
                                          const std::vector<std::uint8_t>& pattern) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(net.latent_dim(), net.latent_dim());
  std::size_t bit = 0;
  for (Eigen::Index i = 0; i + 1 < net.depth(); ++i) {
    Eigen::MatrixXd pre = net.weight(i) * m;
    for (Eigen::Index u = 0; u < pre.rows(); ++u, ++bit)
      if (!pattern[bit]) pre.row(u).setZero();
    m = std::move(pre);
  }
  return net.weight(net.depth() - 1) * m;
}

}  // namespace

std::vector<ActivationPiece> enumerate_pieces(const GenerativeNetwork& net,
                                              std::int64_t budget) {
  if (net.depth() == 1) {
    ActivationPiece piece;
    piece.effective_map = net.weight(0);
    piece.witness = Eigen::VectorXd::Unit(net.latent_dim(), 0);
    verify_piece(net, piece);
    return {std::move(piece)};
  }

  const Eigen::Index hidden = net.hidden_unit_count();
  const std::int64_t cap = budget > 0 ? budget : (std::int64_t{1} << kMaxExhaustiveHiddenUnits);
  const bool over_unit_cap = hidden > kMaxExhaustiveHiddenUnits;
  if (over_unit_cap || (std::int64_t{1} << hidden) > cap) {
    throw std::invalid_argument(
        "exhaustive enumeration budget exceeded (" + std::to_string(hidden) +
        " hidden units => 2^" + std::to_string(hidden) +
        " patterns); use sample_pieces() for sampling mode");
  }

  EnumerationState st;
  st.net = &net;
  enumerate_layer(st, 0, Eigen::MatrixXd::Identity(net.latent_dim(), net.latent_dim()));
  std::sort(st.out.begin(), st.out.end(),
            [](const ActivationPiece& a, const ActivationPiece& b) {
              return a.pattern < b.pattern;
            });
  return std::move(st.out);
}

std::vector<ActivationPiece> sample_pieces(const GenerativeNetwork& net,
                                           std::int64_t probes, std::uint64_t seed) {
  require(probes >= 1, "sample_pieces needs at least one probe");
  if (net.depth() == 1) return enumerate_pieces(net);

  RngStream rng(seed);
  std::map<std::vector<std::uint8_t>, Eigen::VectorXd> seen;
  Eigen::VectorXd z(net.latent_dim());
  for (std::int64_t p = 0; p < probes; ++p) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.gaussian();
    const double norm = z.norm();
    if (norm == 0.0) continue;
    auto pattern = activation_pattern(net, z);
    seen.emplace(std::move(pattern), z / norm);
  }

  std::vector<ActivationPiece> out;
  out.reserve(seen.size());
  for (const auto& [pattern, witness] : seen) {
    ActivationPiece piece;
    piece.pattern = pattern;
    piece.effective_map = effective_map_for_pattern(net, pattern);
    piece.witness = witness;
    verify_piece(net, piece);
    out.push_back(std::move(piece));
  }
  return out;  // std::map iterates in sorted pattern order
}

}  // namespace gcs
