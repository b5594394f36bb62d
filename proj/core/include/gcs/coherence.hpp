#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "gcs/network.hpp"
#include "gcs/unitary.hpp"

namespace gcs {

enum class CoherenceMethod { exact_subspace, exact_pieces, heuristic };

// Local coherences alpha_j in [0, 1]: the alignment of each row of F with the
// prior set. Which prior set depends on the method that produced the vector.
struct CoherenceVector {
  Eigen::VectorXd alpha;
  CoherenceMethod method = CoherenceMethod::heuristic;
  std::int64_t batch = 0;   // heuristic only
  std::uint64_t seed = 0;   // heuristic only
};

// alpha_j = |P_U f_j|_2 for the subspace U spanned by the (real) orthonormal
// basis columns. Throws if the basis is not orthonormal to 1e-10.
CoherenceVector coherence_exact_subspace(const UnitaryOperator& op,
                                         const Eigen::MatrixXd& basis);

// Exact coherence w.r.t. the expansion of range(G) - range(G): the maximum
// over piece pairs (i, i') of the projection of f_j onto
// span(C_i) + span(C_{i'}). Piece spans come from a rank-revealing SVD of the
// effective maps with singular value cutoff 1e-10 * sigma_max.
CoherenceVector coherence_exact_pieces(const UnitaryOperator& op,
                                       const std::vector<ActivationPiece>& pieces);

// The sampled surrogate: draws `batch` Gaussian codes, forms all normalized
// pairwise differences of their images, and maximizes |F v| elementwise over
// pairs. Pairs are streamed, never materialized. A lower bound on the exact
// coherence; deterministic given the seed, and monotone in batch for a fixed
// seed (samples are a prefix sequence).
CoherenceVector coherence_heuristic(const GenerativeNetwork& net,
                                    const UnitaryOperator& op, std::int64_t batch,
                                    std::uint64_t seed);

// Sampled verification that range points lie in their piece's span and that
// same-piece differences stay in that span.
struct ExpansionCheckReport {
  std::int64_t samples = 0;
  std::int64_t unassigned = 0;       // sampled pattern missing from the piece list
  std::int64_t span_violations = 0;  // residual above tolerance
  double max_residual = 0.0;         // relative to the point norm
  double tolerance = 1e-8;
  bool pass() const { return unassigned == 0 && span_violations == 0; }
};
ExpansionCheckReport piecewise_expansion_properties_check(
    const GenerativeNetwork& net, const std::vector<ActivationPiece>& pieces,
    std::int64_t samples, std::uint64_t seed, double tolerance = 1e-8);

// Orthonormal basis of the column space, singular values below
// 1e-10 * sigma_max dropped.
Eigen::MatrixXd column_space_basis(const Eigen::MatrixXd& m);

void save_coherence_csv(const CoherenceVector& cv, const std::string& path);
CoherenceVector load_coherence_csv(const std::string& path);

}  // namespace gcs
