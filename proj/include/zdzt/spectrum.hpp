#pragma once

#include <Eigen/Dense>
#include <Eigen/Jacobi>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "zdzt/errors.hpp"
#include "zdzt/symmetric.hpp"

namespace zdzt {

/// Eigendecomposition of a symmetric matrix. Column j of `eigenvectors`
/// pairs with `eigenvalues(j)`; eigenvalues are sorted nonincreasing.
template <typename Scalar>
struct Spectrum {
  DenseVector<Scalar> eigenvalues;
  DenseMatrix<Scalar> eigenvectors;

  Eigen::Index dim() const { return eigenvalues.size(); }
};

namespace detail {

template <typename Scalar>
Scalar max_offdiag(const DenseMatrix<Scalar>& m) {
  const Eigen::Index d = m.rows();
  Scalar off = 0;
  for (Eigen::Index p = 0; p < d; ++p) {
    for (Eigen::Index q = p + 1; q < d; ++q) {
      off = std::max(off, std::abs(m(p, q)));
    }
  }
  return off;
}

}  // namespace detail

/// Cyclic Jacobi eigensolver. Sweeps rotate every off-diagonal entry above
/// 1e-14 * ||A||_F until none remain; deterministic for identical input.
/// Throws ConvergenceError after 100 sweeps (unreachable at desk scale).
template <typename Scalar>
Spectrum<Scalar> eigh(const SymmetricMatrix<Scalar>& a) {
  const Eigen::Index d = a.dim();
  DenseMatrix<Scalar> work = a.matrix();
  DenseMatrix<Scalar> vecs = DenseMatrix<Scalar>::Identity(d, d);
  const Scalar thresh = Scalar(1e-14) * work.norm();
  constexpr int kMaxSweeps = 100;

  bool converged = (detail::max_offdiag(work) <= thresh);
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    for (Eigen::Index p = 0; p < d; ++p) {
      for (Eigen::Index q = p + 1; q < d; ++q) {
        if (std::abs(work(p, q)) <= thresh) continue;
        Eigen::JacobiRotation<Scalar> rot;
        rot.makeJacobi(work, p, q);
        work.applyOnTheLeft(p, q, rot.adjoint());
        work.applyOnTheRight(p, q, rot);
        vecs.applyOnTheRight(p, q, rot);
      }
    }
    converged = (detail::max_offdiag(work) <= thresh);
  }
  if (!converged) {
    throw ConvergenceError("eigh: Jacobi iteration did not converge in 100 sweeps");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return work(i, i) > work(j, j);
  });

  Spectrum<Scalar> spec;
  spec.eigenvalues.resize(d);
  spec.eigenvectors.resize(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    spec.eigenvalues(k) = work(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    spec.eigenvectors.col(k) = vecs.col(order[static_cast<std::size_t>(k)]);
  }
  return spec;
}

/// Positive-definiteness cutoff: lambda_min must exceed this for an input
/// with the given largest eigenvalue.
template <typename Scalar>
Scalar pd_tolerance(Scalar lambda_max) {
  return Scalar(1e-10) * std::max(Scalar(1), lambda_max);
}

/// kappa(A) = lambda_max / lambda_min. Throws NotPositiveDefinite when
/// lambda_min <= pd_tolerance(lambda_max).
template <typename Scalar>
Scalar condition_number(const SymmetricMatrix<Scalar>& a) {
  const Spectrum<Scalar> spec = eigh(a);
  const Scalar lmax = spec.eigenvalues(0);
  const Scalar lmin = spec.eigenvalues(spec.dim() - 1);
  if (!(lmin > pd_tolerance(lmax))) {
    std::ostringstream msg;
    msg << "matrix is not positive definite (lambda_min = " << lmin << ")";
    throw NotPositiveDefinite(msg.str());
  }
  return lmax / lmin;
}

template <typename Scalar>
struct MinTraceResult {
  Scalar value;                   // min over orthogonal Q of tr(B Q A Q^T)
  DenseMatrix<Scalar> minimizer;  // an orthogonal Q attaining the minimum
};

/// Minimum of tr(B Q A Q^T) over orthogonal Q: the classical pairing of
/// B's descending eigenvalues with A's ascending ones. The minimizer pairs
/// the corresponding eigenvectors.
template <typename Scalar>
MinTraceResult<Scalar> min_rotated_trace(const SymmetricMatrix<Scalar>& a,
                                         const SymmetricMatrix<Scalar>& b) {
  if (a.dim() != b.dim()) {
    throw ValidationError("min_rotated_trace: dimension mismatch");
  }
  const Eigen::Index d = a.dim();
  const Spectrum<Scalar> sa = eigh(a);
  const Spectrum<Scalar> sb = eigh(b);

  Scalar value = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    value += sb.eigenvalues(i) * sa.eigenvalues(d - 1 - i);
  }
  // Columns of A's basis reversed into ascending order, then paired with B's.
  DenseMatrix<Scalar> va_asc = sa.eigenvectors.rowwise().reverse();
  MinTraceResult<Scalar> result;
  result.value = value;
  result.minimizer = sb.eigenvectors * va_asc.transpose();
  return result;
}

}  // namespace zdzt
