#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "zdzt/errors.hpp"
#include "zdzt/rng.hpp"
#include "zdzt/symmetric.hpp"

namespace zdzt {

/// Randomized rounding of m*a to a neighboring integer: ceil(m a) with
/// probability m a - floor(m a), else floor(m a). The mean is exactly m*a,
/// the variance is at most 1/4, the support lies in {-m, ..., m}, and the
/// output is constant whenever m*a is an integer.
template <typename Scalar>
int randomized_round(Scalar a, int m, SplitMix64& rng) {
  if (!(std::abs(a) <= Scalar(1))) {
    throw ValidationError("randomized_round: require |a| <= 1");
  }
  if (m < 1) throw ValidationError("randomized_round: require m >= 1");
  const Scalar x = static_cast<Scalar>(m) * a;
  const Scalar lo = std::floor(x);
  const Scalar p = x - lo;
  if (p == Scalar(0)) return static_cast<int>(lo);
  return static_cast<int>(lo) + (static_cast<Scalar>(rng.next_double()) < p ? 1 : 0);
}

/// Var of the rounded integer: p(1-p) with p the fractional part of m*a.
template <typename Scalar>
Scalar rounding_variance(Scalar a, int m) {
  const Scalar x = static_cast<Scalar>(m) * a;
  const Scalar p = x - std::floor(x);
  return p * (Scalar(1) - p);
}

/// Round every entry of an orthonormal-column matrix independently; each
/// column of the result is a grid vector with entries bounded by m, and the
/// entrywise mean of (result / m) is U. Entries are consumed from the rng in
/// row-major order. Throws when the columns are not orthonormal to 1e-10.
template <typename Scalar>
Eigen::MatrixXi randomized_round_matrix(const DenseMatrix<Scalar>& u, int m,
                                        SplitMix64& rng) {
  const Eigen::Index d = u.rows();
  const Eigen::Index k = u.cols();
  if (k < 1 || d < 1) throw ValidationError("randomized_round_matrix: empty input");
  const Scalar ortho_err =
      (u.transpose() * u - DenseMatrix<Scalar>::Identity(k, k)).cwiseAbs().maxCoeff();
  if (ortho_err > Scalar(1e-10)) {
    throw ValidationError("randomized_round_matrix: columns are not orthonormal");
  }
  Eigen::MatrixXi out(d, k);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      // orthonormality puts entries in [-1, 1] up to roundoff
      const Scalar a = std::clamp(u(i, j), Scalar(-1), Scalar(1));
      out(i, j) = randomized_round(a, m, rng);
    }
  }
  return out;
}

/// Monte-Carlo statistics for the rounding construction.
template <typename Scalar>
struct RoundingReport {
  int n_samples = 0;
  Scalar empirical_mean_error = 0;  // max entrywise |mean(X) - U|
  Scalar max_entry_variance = 0;    // max entrywise empirical Var(X_ij)
  Scalar trace_target = 0;          // tr(U^T B U)
  Scalar identity_gap = 0;          // |mean(t1 - t2) - trace_target|
  Scalar identity_se = 0;           // standard error of mean(t1 - t2)
  Scalar first_term_min = 0;        // min sampled tr(X^T B X)
  Scalar second_term_mean = 0;      // mean tr((X-U)^T B (X-U))
  Scalar second_term_se = 0;
};

/// Closed form for E tr((X-U)^T B (X-U)): the centered entries are
/// independent, so only the diagonal of B contributes,
/// sum_ij Var(X_ij) b_ii with Var(X_ij) = p(1-p)/m^2.
template <typename Scalar>
Scalar expected_centered_quadratic(const SymmetricMatrix<Scalar>& b,
                                   const DenseMatrix<Scalar>& u, int m) {
  if (u.rows() != b.dim()) {
    throw ValidationError("expected_centered_quadratic: shape mismatch");
  }
  Scalar acc = 0;
  const Scalar m2 = static_cast<Scalar>(m) * static_cast<Scalar>(m);
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      acc += rounding_variance(std::clamp(u(i, j), Scalar(-1), Scalar(1)), m) / m2 *
             b(i, i);
    }
  }
  return acc;
}

/// Estimate E tr(X^T B X) - E tr((X-U)^T B (X-U)) over n rounding draws of
/// X = M/m and compare with tr(U^T B U); the two agree exactly in
/// expectation. Per-sample RNG streams are keyed by (seed, sample index).
template <typename Scalar>
RoundingReport<Scalar> rounding_expectation_check(const SymmetricMatrix<Scalar>& b,
                                                  const DenseMatrix<Scalar>& u, int m,
                                                  int n, std::uint64_t seed) {
  if (u.rows() != b.dim()) {
    throw ValidationError("rounding_expectation_check: shape mismatch");
  }
  if (n < 1) throw ValidationError("rounding_expectation_check: require n >= 1");

  const Eigen::Index d = u.rows();
  const Eigen::Index k = u.cols();
  const DenseMatrix<Scalar>& bm = b.matrix();

  DenseMatrix<Scalar> sum_x = DenseMatrix<Scalar>::Zero(d, k);
  DenseMatrix<Scalar> sumsq_x = DenseMatrix<Scalar>::Zero(d, k);
  Scalar sum_t1 = 0, sum_t2 = 0, sumsq_t2 = 0, sumsq_diff = 0;
  Scalar min_t1 = std::numeric_limits<Scalar>::infinity();

  for (int sample = 0; sample < n; ++sample) {
    SplitMix64 rng = SplitMix64::keyed(seed, static_cast<std::uint64_t>(sample));
    const Eigen::MatrixXi rounded = randomized_round_matrix(u, m, rng);
    const DenseMatrix<Scalar> x = rounded.cast<Scalar>() / static_cast<Scalar>(m);
    const DenseMatrix<Scalar> centered = x - u;

    const Scalar t1 = (x.transpose() * bm * x).trace();
    const Scalar t2 = (centered.transpose() * bm * centered).trace();
    sum_t1 += t1;
    sum_t2 += t2;
    sumsq_t2 += t2 * t2;
    sumsq_diff += (t1 - t2) * (t1 - t2);
    min_t1 = std::min(min_t1, t1);
    sum_x += x;
    sumsq_x += x.cwiseProduct(x);
  }

  const Scalar nn = static_cast<Scalar>(n);
  RoundingReport<Scalar> report;
  report.n_samples = n;
  report.trace_target = (u.transpose() * bm * u).trace();
  report.empirical_mean_error = (sum_x / nn - u).cwiseAbs().maxCoeff();
  report.max_entry_variance =
      (sumsq_x / nn - (sum_x / nn).cwiseProduct(sum_x / nn)).maxCoeff();
  const Scalar mean_diff = (sum_t1 - sum_t2) / nn;
  report.identity_gap = std::abs(mean_diff - report.trace_target);
  const Scalar var_diff = std::max(Scalar(0), sumsq_diff / nn - mean_diff * mean_diff);
  report.identity_se = std::sqrt(var_diff / nn);
  report.first_term_min = min_t1;
  report.second_term_mean = sum_t2 / nn;
  const Scalar var_t2 =
      std::max(Scalar(0), sumsq_t2 / nn - report.second_term_mean * report.second_term_mean);
  report.second_term_se = std::sqrt(var_t2 / nn);
  return report;
}

}  // namespace zdzt
