#include "gcs/coherence.hpp"

#include <map>

#include "gcs/common.hpp"
#include "gcs/io.hpp"
#include "gcs/parallel.hpp"
#include "gcs/rng.hpp"

namespace gcs {
namespace {

constexpr double kRankCutoff = 1e-10;

// Row j of F applied to every basis column: entry (j, c) = (F b_c)_j. The
// coherence of row j w.r.t. the spanned subspace is the norm of row j, since
// (F b_c)_j = conj(<f_j, b_c>) for real b_c.
Eigen::MatrixXcd transform_columns(const UnitaryOperator& op, const Eigen::MatrixXd& basis) {
  Eigen::MatrixXcd out(op.size(), basis.cols());
  for (Eigen::Index c = 0; c < basis.cols(); ++c)
    out.col(c) = op.apply(Eigen::VectorXd(basis.col(c)));
  return out;
}

Eigen::VectorXd projection_norms(const UnitaryOperator& op, const Eigen::MatrixXd& basis) {
  return transform_columns(op, basis).rowwise().norm();
}

}  // namespace

Eigen::MatrixXd column_space_basis(const Eigen::MatrixXd& m) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] == 0.0) return Eigen::MatrixXd(m.rows(), 0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv[rank] > kRankCutoff * sv[0]) ++rank;
  return svd.matrixU().leftCols(rank);
}

CoherenceVector coherence_exact_subspace(const UnitaryOperator& op,
                                         const Eigen::MatrixXd& basis) {
  require(basis.rows() == op.size(), "basis rows must match the transform size");
  require(basis.cols() >= 1, "basis must have at least one column");
  const Eigen::MatrixXd gram = basis.transpose() * basis;
  const double err =
      (gram - Eigen::MatrixXd::Identity(basis.cols(), basis.cols())).cwiseAbs().maxCoeff();
  require(err <= 1e-10, "basis is not orthonormal (max deviation " + format_double(err) + ")");

  CoherenceVector cv;
  cv.method = CoherenceMethod::exact_subspace;
  cv.alpha = projection_norms(op, basis);
  return cv;
}

CoherenceVector coherence_exact_pieces(const UnitaryOperator& op,
                                       const std::vector<ActivationPiece>& pieces) {
  require(!pieces.empty(), "piece list is empty");
  const auto count = static_cast<Eigen::Index>(pieces.size());
  require(count <= 4096, "too many pieces for the exact pair sweep; use the heuristic");

  std::vector<Eigen::MatrixXd> spans;
  spans.reserve(pieces.size());
  for (const auto& piece : pieces) {
    require(piece.effective_map.rows() == op.size(),
            "piece output dimension must match the transform size");
    spans.push_back(column_space_basis(piece.effective_map));
  }

  // One alpha candidate per unordered pair (i <= i'); the diagonal covers the
  // single-piece spans.
  const Eigen::Index pairs = count * (count + 1) / 2;
  std::vector<Eigen::VectorXd> per_pair(static_cast<std::size_t>(pairs));
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
    per_pair[flat] = basis.cols() == 0 ? Eigen::VectorXd::Zero(op.size())
                                       : projection_norms(op, basis);
  });

  CoherenceVector cv;
  cv.method = CoherenceMethod::exact_pieces;
  cv.alpha = Eigen::VectorXd::Zero(op.size());
  for (const auto& candidate : per_pair) cv.alpha = cv.alpha.cwiseMax(candidate);
  return cv;
}

CoherenceVector coherence_heuristic(const GenerativeNetwork& net,
                                    const UnitaryOperator& op, std::int64_t batch,
                                    std::uint64_t seed) {
  require(batch >= 2, "heuristic needs a batch of at least 2");
  require(net.output_dim() == op.size(), "network output must match the transform size");
  const Eigen::Index n = op.size();

  // Latents are drawn sequentially so a larger batch extends, rather than
  // reshuffles, a smaller one with the same seed.
  RngStream rng(seed);
  std::vector<Eigen::VectorXd> codes(static_cast<std::size_t>(batch));
  for (auto& z : codes) {
    z.resize(net.latent_dim());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.gaussian();
  }

  // F G(z) per sample; differences are compared in the transform domain,
  // where unitarity keeps norms identical to the signal domain.
  std::vector<Eigen::VectorXcd> images(codes.size());
  parallel_for(codes.size(), [&](std::size_t b) {
    images[b] = op.apply(net.forward(codes[b]));
  });

  const auto total = static_cast<std::size_t>(batch);
  std::vector<Eigen::VectorXd> partial(std::min(thread_cap(), total),
                                       Eigen::VectorXd::Zero(n));
  // Stream pairs (a, b) grouped by a; elementwise max commutes so any
  // partition gives the same result.
  const std::size_t workers = partial.size();
  parallel_for(workers, [&](std::size_t w) {
    Eigen::VectorXd& local = partial[w];
    for (std::size_t a = w; a < total; a += workers) {
      for (std::size_t b = a + 1; b < total; ++b) {
        const Eigen::VectorXcd diff = images[a] - images[b];
        const double norm = diff.norm();
        if (norm == 0.0) continue;  // identical images: normalization undefined
        local = local.cwiseMax(diff.cwiseAbs() / norm);
      }
    }
  });

  CoherenceVector cv;
  cv.method = CoherenceMethod::heuristic;
  cv.batch = batch;
  cv.seed = seed;
  cv.alpha = Eigen::VectorXd::Zero(n);
  for (const auto& local : partial) cv.alpha = cv.alpha.cwiseMax(local);
  return cv;
}

ExpansionCheckReport piecewise_expansion_properties_check(
    const GenerativeNetwork& net, const std::vector<ActivationPiece>& pieces,
    std::int64_t samples, std::uint64_t seed, double tolerance) {
  require(samples >= 1, "need at least one sample");
  require(!pieces.empty(), "piece list is empty");

  std::map<std::vector<std::uint8_t>, Eigen::Index> by_pattern;
  std::vector<Eigen::MatrixXd> spans(pieces.size());
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    by_pattern[pieces[i].pattern] = static_cast<Eigen::Index>(i);
    spans[i] = column_space_basis(pieces[i].effective_map);
  }

  ExpansionCheckReport report;
  report.samples = samples;
  report.tolerance = tolerance;

  // Last sampled range point per piece, for same-piece difference checks.
  std::map<Eigen::Index, Eigen::VectorXd> previous;

  RngStream rng(seed);
  Eigen::VectorXd z(net.latent_dim());
  auto residual_against = [&](const Eigen::MatrixXd& basis, const Eigen::VectorXd& v) {
    if (v.norm() == 0.0) return 0.0;
    const Eigen::VectorXd r = v - basis * (basis.transpose() * v);
    return r.norm() / v.norm();
  };

  for (std::int64_t s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.gaussian();
    const auto pattern = activation_pattern(net, z);
    const auto found = by_pattern.find(pattern);
    if (found == by_pattern.end()) {
      ++report.unassigned;
      continue;
    }
    const Eigen::Index piece = found->second;
    const Eigen::VectorXd x = net.forward(z);
    const double res = residual_against(spans[piece], x);
    report.max_residual = std::max(report.max_residual, res);
    if (res > tolerance) ++report.span_violations;

    const auto prev = previous.find(piece);
    if (prev != previous.end()) {
      const double dres = residual_against(spans[piece], x - prev->second);
      report.max_residual = std::max(report.max_residual, dres);
      if (dres > tolerance) ++report.span_violations;
    }
    previous[piece] = x;
  }
  return report;
}

void save_coherence_csv(const CoherenceVector& cv, const std::string& path) {
  save_indexed_csv(cv.alpha, "alpha", path);
}

CoherenceVector load_coherence_csv(const std::string& path) {
  CoherenceVector cv;
  cv.alpha = load_indexed_csv(path);
  return cv;
}

}  // namespace gcs
