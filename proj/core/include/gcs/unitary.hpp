#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>

#include "gcs/rng.hpp"

namespace gcs {

enum class TransformKind { identity, dft1d, dft2d, hadamard, dense };

// The unitary measurement matrix F with fast application and row extraction.
// Conventions: the 1-D DFT is F_{jl} = n^{-1/2} exp(-2 pi i j l / n); the 2-D
// DFT acts separably on a row-major grid; the Hadamard kind is the
// natural-order Walsh-Hadamard transform scaled by n^{-1/2}. Immutable and
// thread-safe after construction.
class UnitaryOperator {
 public:
  static UnitaryOperator identity(Eigen::Index n);
  static UnitaryOperator dft1d(Eigen::Index n);
  static UnitaryOperator dft2d(Eigen::Index rows, Eigen::Index cols);
  static UnitaryOperator hadamard(Eigen::Index n);  // n must be a power of two
  // Explicit matrix; validated unitary to Frobenius tolerance 1e-10.
  static UnitaryOperator dense(Eigen::MatrixXcd f);
  // Orthogonal matrix from QR of an i.i.d. Gaussian draw, diagonal of R made
  // positive so the result is unique given the stream.
  static UnitaryOperator random_orthogonal(Eigen::Index n, RngStream rng);

  TransformKind kind() const { return kind_; }
  Eigen::Index size() const { return n_; }
  Eigen::Index grid_rows() const { return rows_; }
  Eigen::Index grid_cols() const { return cols_; }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  Eigen::VectorXcd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXcd adjoint_apply(const Eigen::VectorXcd& y) const;

  // f_j with <f_j, x> = (Fx)_j, i.e. the conjugated j-th row as a column.
  // 0-based index.
  Eigen::VectorXcd row(Eigen::Index j) const;

  // Stacked rows of F at the given (possibly repeated) indices: the matrix
  // whose i-th row is f_{indices[i]}^*, so (result * x)_i = (Fx)_{indices[i]}.
  Eigen::MatrixXcd sampled_rows(std::span<const Eigen::Index> indices) const;

  std::string description() const;

 private:
  UnitaryOperator() = default;

  TransformKind kind_ = TransformKind::identity;
  Eigen::Index n_ = 0;
  Eigen::Index rows_ = 0, cols_ = 0;  // dft2d grid
  Eigen::MatrixXcd matrix_;           // dense only
};

}  // namespace gcs
