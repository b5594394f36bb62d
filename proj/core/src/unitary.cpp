#include "gcs/unitary.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <numbers>

#include "gcs/common.hpp"

namespace gcs {
namespace {

using cd = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_pow2(Eigen::Index n) {
  return n > 0 && std::has_single_bit(static_cast<std::uint64_t>(n));
}

// Iterative radix-2 transform, unnormalized; sign = -1 for the forward DFT.
// Twiddles come from std::polar per butterfly so rounding does not accumulate.
void fft_pow2(Eigen::VectorXcd& a, double sign) {
  const Eigen::Index n = a.size();
  for (Eigen::Index i = 1, j = 0; i < n; ++i) {
    Eigen::Index bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (Eigen::Index len = 2; len <= n; len <<= 1) {
    const double ang = sign * kTwoPi / static_cast<double>(len);
    for (Eigen::Index i = 0; i < n; i += len) {
      for (Eigen::Index j = 0; j < len / 2; ++j) {
        const cd w = std::polar(1.0, ang * static_cast<double>(j));
        const cd u = a[i + j];
        const cd v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
}

// O(n^2) fallback for non power-of-two sizes; the phase j*l is reduced mod n
// in integer arithmetic to keep the trig argument small.
Eigen::VectorXcd dft_direct(const Eigen::VectorXcd& x, double sign) {
  const auto n = static_cast<std::uint64_t>(x.size());
  Eigen::VectorXcd y(x.size());
  for (std::uint64_t j = 0; j < n; ++j) {
    cd acc(0.0, 0.0);
    for (std::uint64_t l = 0; l < n; ++l) {
      const auto phase = static_cast<double>((j * l) % n);
      acc += x[static_cast<Eigen::Index>(l)] *
             std::polar(1.0, sign * kTwoPi * phase / static_cast<double>(n));
    }
    y[static_cast<Eigen::Index>(j)] = acc;
  }
  return y;
}

Eigen::VectorXcd dft_unnormalized(Eigen::VectorXcd x, double sign) {
  if (is_pow2(x.size())) {
    fft_pow2(x, sign);
    return x;
  }
  return dft_direct(x, sign);
}

// In-place natural-order Walsh-Hadamard butterflies (self-inverse up to n).
void fwht(Eigen::VectorXcd& a) {
  const Eigen::Index n = a.size();
  for (Eigen::Index len = 1; len < n; len <<= 1) {
    for (Eigen::Index i = 0; i < n; i += len << 1) {
      for (Eigen::Index j = i; j < i + len; ++j) {
        const cd u = a[j];
        const cd v = a[j + len];
        a[j] = u + v;
        a[j + len] = u - v;
      }
    }
  }
}

}  // namespace

UnitaryOperator UnitaryOperator::identity(Eigen::Index n) {
  require(n >= 1, "identity transform needs n >= 1");
  UnitaryOperator op;
  op.kind_ = TransformKind::identity;
  op.n_ = n;
  return op;
}

UnitaryOperator UnitaryOperator::dft1d(Eigen::Index n) {
  require(n >= 1, "dft1d needs n >= 1");
  UnitaryOperator op;
  op.kind_ = TransformKind::dft1d;
  op.n_ = n;
  return op;
}

UnitaryOperator UnitaryOperator::dft2d(Eigen::Index rows, Eigen::Index cols) {
  require(rows >= 1 && cols >= 1, "dft2d needs a positive grid");
  UnitaryOperator op;
  op.kind_ = TransformKind::dft2d;
  op.rows_ = rows;
  op.cols_ = cols;
  op.n_ = rows * cols;
  return op;
}

UnitaryOperator UnitaryOperator::hadamard(Eigen::Index n) {
  require(is_pow2(n), "hadamard transform needs n a power of two");
  UnitaryOperator op;
  op.kind_ = TransformKind::hadamard;
  op.n_ = n;
  return op;
}

UnitaryOperator UnitaryOperator::dense(Eigen::MatrixXcd f) {
  require(f.rows() == f.cols() && f.rows() >= 1, "dense operator must be square");
  const Eigen::MatrixXcd gram = f.adjoint() * f;
  const double err =
      (gram - Eigen::MatrixXcd::Identity(f.rows(), f.cols())).norm();
  require(err <= 1e-10, "dense operator is not unitary (|F*F - I|_F = " +
                            std::to_string(err) + ")");
  UnitaryOperator op;
  op.kind_ = TransformKind::dense;
  op.n_ = f.rows();
  op.matrix_ = std::move(f);
  return op;
}

UnitaryOperator UnitaryOperator::random_orthogonal(Eigen::Index n, RngStream rng) {
  require(n >= 1, "random orthogonal operator needs n >= 1");
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) g(r, c) = rng.gaussian();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < n; ++c)
    if (r(c, c) < 0.0) q.col(c) = -q.col(c);
  return dense(q.cast<cd>());
}

Eigen::VectorXcd UnitaryOperator::apply(const Eigen::VectorXcd& x) const {
  require(x.size() == n_, "apply: vector length does not match n");
  switch (kind_) {
    case TransformKind::identity:
      return x;
    case TransformKind::dft1d:
      return dft_unnormalized(x, -1.0) / std::sqrt(static_cast<double>(n_));
    case TransformKind::dft2d: {
      Eigen::VectorXcd y = x;
      for (Eigen::Index r = 0; r < rows_; ++r)
        y.segment(r * cols_, cols_) = dft_unnormalized(y.segment(r * cols_, cols_), -1.0);
      Eigen::VectorXcd col(rows_);
      for (Eigen::Index c = 0; c < cols_; ++c) {
        for (Eigen::Index r = 0; r < rows_; ++r) col[r] = y[r * cols_ + c];
        col = dft_unnormalized(col, -1.0);
        for (Eigen::Index r = 0; r < rows_; ++r) y[r * cols_ + c] = col[r];
      }
      return y / std::sqrt(static_cast<double>(n_));
    }
    case TransformKind::hadamard: {
      Eigen::VectorXcd y = x;
      fwht(y);
      return y / std::sqrt(static_cast<double>(n_));
    }
    case TransformKind::dense:
      return matrix_ * x;
  }
  throw std::logic_error("unreachable transform kind");
}

Eigen::VectorXcd UnitaryOperator::apply(const Eigen::VectorXd& x) const {
  return apply(Eigen::VectorXcd(x.cast<cd>()));
}

Eigen::VectorXcd UnitaryOperator::adjoint_apply(const Eigen::VectorXcd& y) const {
  require(y.size() == n_, "adjoint_apply: vector length does not match n");
  switch (kind_) {
    case TransformKind::identity:
      return y;
    case TransformKind::dft1d:
      return dft_unnormalized(y, +1.0) / std::sqrt(static_cast<double>(n_));
    case TransformKind::dft2d: {
      Eigen::VectorXcd x = y;
      for (Eigen::Index r = 0; r < rows_; ++r)
        x.segment(r * cols_, cols_) = dft_unnormalized(x.segment(r * cols_, cols_), +1.0);
      Eigen::VectorXcd col(rows_);
      for (Eigen::Index c = 0; c < cols_; ++c) {
        for (Eigen::Index r = 0; r < rows_; ++r) col[r] = x[r * cols_ + c];
        col = dft_unnormalized(col, +1.0);
        for (Eigen::Index r = 0; r < rows_; ++r) x[r * cols_ + c] = col[r];
      }
      return x / std::sqrt(static_cast<double>(n_));
    }
    case TransformKind::hadamard: {
      Eigen::VectorXcd x = y;
      fwht(x);
      return x / std::sqrt(static_cast<double>(n_));
    }
    case TransformKind::dense:
      return matrix_.adjoint() * y;
  }
  throw std::logic_error("unreachable transform kind");
}

Eigen::VectorXcd UnitaryOperator::row(Eigen::Index j) const {
  require(j >= 0 && j < n_, "row index out of range");
  Eigen::VectorXcd f(n_);
  switch (kind_) {
    case TransformKind::identity:
      f.setZero();
      f[j] = cd(1.0, 0.0);
      return f;
    case TransformKind::dft1d: {
      const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
      const auto n = static_cast<std::uint64_t>(n_);
      for (std::uint64_t l = 0; l < n; ++l) {
        const auto phase = static_cast<double>((static_cast<std::uint64_t>(j) * l) % n);
        f[static_cast<Eigen::Index>(l)] =
            scale * std::polar(1.0, kTwoPi * phase / static_cast<double>(n));
      }
      return f;
    }
    case TransformKind::dft2d: {
      const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
      const Eigen::Index u = j / cols_;
      const Eigen::Index v = j % cols_;
      for (Eigen::Index r = 0; r < rows_; ++r) {
        for (Eigen::Index c = 0; c < cols_; ++c) {
          const double phase =
              static_cast<double>(u * r % rows_) / static_cast<double>(rows_) +
              static_cast<double>(v * c % cols_) / static_cast<double>(cols_);
          f[r * cols_ + c] = scale * std::polar(1.0, kTwoPi * phase);
        }
      }
      return f;
    }
    case TransformKind::hadamard: {
      const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
      for (Eigen::Index l = 0; l < n_; ++l) {
        const int parity = std::popcount(static_cast<std::uint64_t>(j) &
                                         static_cast<std::uint64_t>(l)) & 1;
        f[l] = cd(parity ? -scale : scale, 0.0);
      }
      return f;
    }
    case TransformKind::dense:
      return matrix_.row(j).adjoint();
  }
  throw std::logic_error("unreachable transform kind");
}

Eigen::MatrixXcd UnitaryOperator::sampled_rows(std::span<const Eigen::Index> indices) const {
  Eigen::MatrixXcd rows(static_cast<Eigen::Index>(indices.size()), n_);
  for (std::size_t i = 0; i < indices.size(); ++i)
    rows.row(static_cast<Eigen::Index>(i)) = row(indices[i]).adjoint();
  return rows;
}

std::string UnitaryOperator::description() const {
  switch (kind_) {
    case TransformKind::identity:
      return "identity(" + std::to_string(n_) + ")";
    case TransformKind::dft1d:
      return "dft1d(" + std::to_string(n_) + ")";
    case TransformKind::dft2d:
      return "dft2d(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
    case TransformKind::hadamard:
      return "hadamard(" + std::to_string(n_) + ")";
    case TransformKind::dense:
      return "dense(" + std::to_string(n_) + ")";
  }
  return "unknown";
}

}  // namespace gcs
