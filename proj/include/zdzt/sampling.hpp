#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "zdzt/rng.hpp"
#include "zdzt/symmetric.hpp"

namespace zdzt {

/// Symmetrized standard-normal matrix: (N + N^T)/2 with iid N(0,1) entries.
template <typename Scalar = double>
SymmetricMatrix<Scalar> random_symmetric(Eigen::Index d, SplitMix64& rng) {
  DenseMatrix<Scalar> n(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      n(i, j) = static_cast<Scalar>(rng.next_normal());
    }
  }
  return SymmetricMatrix<Scalar>(n);
}

/// Haar-ish random orthogonal matrix: QR of a Gaussian matrix with the R
/// diagonal signs folded into Q.
template <typename Scalar = double>
DenseMatrix<Scalar> random_orthogonal(Eigen::Index d, SplitMix64& rng) {
  DenseMatrix<Scalar> n(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      n(i, j) = static_cast<Scalar>(rng.next_normal());
    }
  }
  Eigen::HouseholderQR<DenseMatrix<Scalar>> qr(n);
  DenseMatrix<Scalar> q = qr.householderQ();
  DenseMatrix<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (r(j, j) < Scalar(0)) q.col(j) = -q.col(j);
  }
  return q;
}

/// Random positive-definite matrix with prescribed condition number:
/// Q diag(spread) Q^T with lambda_max = kappa, lambda_min = 1, interior
/// eigenvalues log-uniform in [1, kappa].
template <typename Scalar = double>
SymmetricMatrix<Scalar> random_spd(Eigen::Index d, Scalar kappa, SplitMix64& rng) {
  DenseVector<Scalar> lam(d);
  lam(0) = kappa;
  if (d > 1) lam(d - 1) = Scalar(1);
  for (Eigen::Index i = 1; i + 1 < d; ++i) {
    lam(i) = std::exp(static_cast<Scalar>(rng.next_double()) * std::log(kappa));
  }
  DenseMatrix<Scalar> q = random_orthogonal<Scalar>(d, rng);
  return SymmetricMatrix<Scalar>(q * lam.asDiagonal() * q.transpose());
}

}  // namespace zdzt
