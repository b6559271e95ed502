#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "zdzt/errors.hpp"

namespace zdzt {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Dense real symmetric d x d matrix. The constructor symmetrizes exactly
/// ((a_ij + a_ji)/2 on both triangles) and rejects empty, non-square, or
/// non-finite input. Use sym_from_rows() for data that additionally has to
/// pass the asymmetry tolerance check.
template <typename Scalar>
class SymmetricMatrix {
 public:
  template <typename Derived>
  explicit SymmetricMatrix(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() < 1 || m.rows() != m.cols()) {
      throw ValidationError("symmetric matrix: input must be square with dim >= 1");
    }
    if (!m.allFinite()) {
      throw ValidationError("symmetric matrix: entries must be finite");
    }
    mat_ = Scalar(0.5) * (m.derived() + m.derived().transpose()).eval();
  }

  Eigen::Index dim() const { return mat_.rows(); }
  const DenseMatrix<Scalar>& matrix() const { return mat_; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return mat_(i, j); }

  Scalar frobenius() const { return mat_.norm(); }
  Scalar max_abs() const { return mat_.cwiseAbs().maxCoeff(); }

  static SymmetricMatrix identity(Eigen::Index d) {
    return SymmetricMatrix(DenseMatrix<Scalar>::Identity(d, d));
  }

 private:
  DenseMatrix<Scalar> mat_;
};

/// Validating constructor: rejects input whose asymmetry exceeds
/// 1e-9 * (1 + max|entry|), then returns the symmetrized matrix.
template <typename Scalar, typename Derived>
SymmetricMatrix<Scalar> sym_from_rows_t(const Eigen::MatrixBase<Derived>& rows) {
  if (rows.rows() < 1 || rows.rows() != rows.cols()) {
    throw ValidationError("sym_from_rows: input must be square with dim >= 1");
  }
  if (!rows.allFinite()) {
    throw ValidationError("sym_from_rows: entries must be finite");
  }
  const Scalar scale = Scalar(1) + rows.cwiseAbs().maxCoeff();
  const Scalar asym = (rows.derived() - rows.derived().transpose()).cwiseAbs().maxCoeff();
  if (asym > Scalar(1e-9) * scale) {
    std::ostringstream msg;
    msg << "sym_from_rows: asymmetry " << asym << " exceeds tolerance "
        << Scalar(1e-9) * scale;
    throw ValidationError(msg.str());
  }
  return SymmetricMatrix<Scalar>(rows);
}

template <typename Derived>
auto sym_from_rows(const Eigen::MatrixBase<Derived>& rows) {
  return sym_from_rows_t<typename Derived::Scalar>(rows);
}

/// tr(BA) = sum_ij a_ij b_ij. Symmetric in its arguments.
template <typename Scalar>
Scalar trace_inner(const SymmetricMatrix<Scalar>& a, const SymmetricMatrix<Scalar>& b) {
  if (a.dim() != b.dim()) {
    throw ValidationError("trace_inner: dimension mismatch");
  }
  return a.matrix().cwiseProduct(b.matrix()).sum();
}

constexpr Eigen::Index svec_length(Eigen::Index d) { return d * (d + 1) / 2; }

/// Coordinates of A in the upper-triangle row-major order
/// (a11, sqrt(2) a12, ..., a22, ...). The sqrt(2) scaling on off-diagonal
/// entries makes the Euclidean dot product of svecs equal to trace_inner.
template <typename Scalar>
DenseVector<Scalar> svec(const SymmetricMatrix<Scalar>& a) {
  const Eigen::Index d = a.dim();
  const Scalar root2 = std::sqrt(Scalar(2));
  DenseVector<Scalar> v(svec_length(d));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    v(k++) = a(i, i);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      v(k++) = root2 * a(i, j);
    }
  }
  return v;
}

template <typename Scalar>
SymmetricMatrix<Scalar> svec_inv(const DenseVector<Scalar>& v) {
  // invert n = d(d+1)/2
  const Eigen::Index n = v.size();
  const Eigen::Index d =
      static_cast<Eigen::Index>((std::sqrt(8.0 * static_cast<double>(n) + 1.0) - 1.0) / 2.0 + 0.5);
  if (d < 1 || svec_length(d) != n) {
    throw ValidationError("svec_inv: length is not a triangular number");
  }
  const Scalar inv_root2 = Scalar(1) / std::sqrt(Scalar(2));
  DenseMatrix<Scalar> m(d, d);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    m(i, i) = v(k++);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      m(i, j) = m(j, i) = inv_root2 * v(k++);
    }
  }
  return SymmetricMatrix<Scalar>(m);
}

}  // namespace zdzt
