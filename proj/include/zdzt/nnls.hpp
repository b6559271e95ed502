#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "zdzt/errors.hpp"
#include "zdzt/symmetric.hpp"

namespace zdzt {

template <typename Scalar>
struct NnlsOptions {
  // Entering candidates are scored by the normalized dual g.r / ||g||; the
  // solve stops once the best score drops to dual_tol * max(1, ||y||).
  Scalar dual_tol = Scalar(1e-12);
  int max_iterations = 0;  // 0: 3 * n_cols + 50
};

template <typename Scalar>
struct NnlsResult {
  std::vector<Eigen::Index> support;  // ascending column indices
  DenseVector<Scalar> weights;        // aligned with support, strictly positive
  Scalar residual_norm = 0;
  int iterations = 0;
  bool converged = false;  // KKT point reached (vs iteration cap)
};

/// Column source over a dense matrix. Any type with the same five members
/// can drive nnls_active_set; the cone-membership solver supplies a lazy
/// source that never materializes its (possibly huge) matrix.
template <typename Scalar>
class MatrixColumns {
 public:
  explicit MatrixColumns(const DenseMatrix<Scalar>& g)
      : g_(g), norms_(g.colwise().norm().transpose()) {}

  Eigen::Index rows() const { return g_.rows(); }
  Eigen::Index cols() const { return g_.cols(); }
  Scalar column_norm(Eigen::Index j) const { return norms_(j); }
  void correlations(const DenseVector<Scalar>& r, DenseVector<Scalar>& w) const {
    w.noalias() = g_.transpose() * r;
  }
  void column(Eigen::Index j, Eigen::Ref<DenseVector<Scalar>> out) const {
    out = g_.col(j);
  }

 private:
  const DenseMatrix<Scalar>& g_;
  DenseVector<Scalar> norms_;
};

/// Lawson-Hanson active-set nonnegative least squares:
/// min ||G x - y||_2 subject to x >= 0.
///
/// The entering column maximizes the normalized dual correlation
/// g.r / ||g||; exact ties keep the lowest column index, which fixes the
/// output deterministically. Inner iterations restore feasibility of the
/// unconstrained solution on the passive set, dropping at least one column
/// per pass. A column whose entry makes no progress is excluded until the
/// iterate next changes.
template <typename Scalar, typename Columns>
NnlsResult<Scalar> nnls_active_set(const Columns& cols, const DenseVector<Scalar>& y,
                                   NnlsOptions<Scalar> opts = {}) {
  const Eigen::Index n = cols.cols();
  if (y.size() != cols.rows()) {
    throw ValidationError("nnls_active_set: rhs length does not match column length");
  }
  const Scalar dual_cut = opts.dual_tol * std::max(Scalar(1), y.norm());
  const int max_iter =
      opts.max_iterations > 0 ? opts.max_iterations : static_cast<int>(3 * n + 50);

  std::vector<Eigen::Index> passive;
  DenseMatrix<Scalar> gp(y.size(), 0);
  DenseVector<Scalar> x(0);
  std::vector<char> in_passive(static_cast<std::size_t>(n), 0);
  std::vector<char> excluded(static_cast<std::size_t>(n), 0);

  DenseVector<Scalar> r = y;
  DenseVector<Scalar> w(n);

  auto rebuild = [&](const std::vector<Eigen::Index>& keep_rows) {
    std::vector<Eigen::Index> next_passive;
    DenseMatrix<Scalar> next_gp(y.size(), static_cast<Eigen::Index>(keep_rows.size()));
    DenseVector<Scalar> next_x(static_cast<Eigen::Index>(keep_rows.size()));
    Eigen::Index k = 0;
    for (Eigen::Index i : keep_rows) {
      next_passive.push_back(passive[static_cast<std::size_t>(i)]);
      next_gp.col(k) = gp.col(i);
      next_x(k) = x(i);
      ++k;
    }
    passive.swap(next_passive);
    gp.swap(next_gp);
    x.swap(next_x);
  };

  NnlsResult<Scalar> result;
  int iter = 0;
  bool converged = false;

  while (iter < max_iter) {
    ++iter;
    cols.correlations(r, w);

    Eigen::Index enter = -1;
    Scalar best = dual_cut;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (in_passive[static_cast<std::size_t>(j)] || excluded[static_cast<std::size_t>(j)]) {
        continue;
      }
      const Scalar norm_j = cols.column_norm(j);
      if (!(norm_j > Scalar(0))) continue;
      const Scalar score = w(j) / norm_j;
      if (score > best) {
        best = score;
        enter = j;
      }
    }
    if (enter < 0) {
      converged = true;
      break;
    }

    passive.push_back(enter);
    in_passive[static_cast<std::size_t>(enter)] = 1;
    gp.conservativeResize(Eigen::NoChange, gp.cols() + 1);
    cols.column(enter, gp.col(gp.cols() - 1));
    x.conservativeResize(x.size() + 1);
    x(x.size() - 1) = 0;

    bool no_progress = false;
    for (;;) {
      const DenseVector<Scalar> s = gp.colPivHouseholderQr().solve(y);
      if ((s.array() > Scalar(0)).all()) {
        x = s;
        break;
      }
      // step x -> x + alpha (s - x) until the first weight reaches zero
      Scalar alpha = Scalar(2);
      Eigen::Index drop = -1;
      for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > Scalar(0)) continue;
        const Scalar denom = x(i) - s(i);
        const Scalar ratio = denom > Scalar(0) ? x(i) / denom : Scalar(0);
        if (ratio < alpha) {
          alpha = ratio;
          drop = i;
        }
      }
      // alpha == 0 can only happen when the entering column itself is
      // rejected by the least-squares solution (its weight is still zero).
      if (alpha == Scalar(0) && passive[static_cast<std::size_t>(drop)] == enter) {
        no_progress = true;
      }
      x += alpha * (s - x);
      x(drop) = 0;
      std::vector<Eigen::Index> keep;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x(i) > Scalar(0)) {
          keep.push_back(i);
        } else {
          in_passive[static_cast<std::size_t>(passive[static_cast<std::size_t>(i)])] = 0;
        }
      }
      rebuild(keep);
      if (passive.empty()) break;
    }

    if (no_progress) {
      excluded[static_cast<std::size_t>(enter)] = 1;  // residual is unchanged
      continue;
    }
    std::fill(excluded.begin(), excluded.end(), 0);
    r = passive.empty() ? y : (y - gp * x).eval();
  }

  // emit support in ascending column order
  std::vector<Eigen::Index> order(passive.size());
  for (std::size_t i = 0; i < passive.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return passive[static_cast<std::size_t>(a)] < passive[static_cast<std::size_t>(b)]; });
  result.support.reserve(passive.size());
  result.weights.resize(static_cast<Eigen::Index>(passive.size()));
  Eigen::Index k = 0;
  for (Eigen::Index i : order) {
    result.support.push_back(passive[static_cast<std::size_t>(i)]);
    result.weights(k++) = x(i);
  }
  result.residual_norm = passive.empty() ? y.norm() : (y - gp * x).norm();
  result.iterations = iter;
  result.converged = converged;
  return result;
}

}  // namespace zdzt
