#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "zdzt/errors.hpp"
#include "zdzt/integer_grid.hpp"
#include "zdzt/nnls.hpp"
#include "zdzt/spectrum.hpp"
#include "zdzt/symmetric.hpp"

namespace zdzt {

/// Weights at or below this are pruned from decompositions.
constexpr double kWeightFloor = 1e-12;

/// Conic combination A ~ sum_i weights[i] * z_i z_i^T with |z entries| <=
/// bound_m. residual_fro records ||sum - A||_F against the target at
/// creation. Atoms are kept in descending lexicographic order.
template <typename Scalar>
struct Decomposition {
  std::vector<IntegerAtom> atoms;
  DenseVector<Scalar> weights;
  int bound_m = 0;
  Scalar residual_fro = 0;

  Eigen::Index size() const { return static_cast<Eigen::Index>(atoms.size()); }
};

template <typename Scalar>
struct VerificationReport {
  Scalar reconstruction_error = 0;
  bool reconstruction_ok = false;
  bool max_entry_bound_ok = false;
  int term_count = 0;
  bool term_count_ok = false;
  bool weights_positive = false;
  bool verdict = false;  // conjunction of the four component checks
};

/// sum_i w_i z_i z_i^T as a symmetric matrix of dimension d.
template <typename Scalar>
SymmetricMatrix<Scalar> reconstruct(const std::vector<IntegerAtom>& atoms,
                                    const DenseVector<Scalar>& weights, Eigen::Index d) {
  DenseMatrix<Scalar> acc = DenseMatrix<Scalar>::Zero(d, d);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const DenseVector<Scalar> z = atoms[i].z.cast<Scalar>();
    acc.noalias() += weights(static_cast<Eigen::Index>(i)) * (z * z.transpose());
  }
  return SymmetricMatrix<Scalar>(acc);
}

template <typename Scalar>
SymmetricMatrix<Scalar> reconstruct(const Decomposition<Scalar>& dec, Eigen::Index d) {
  return reconstruct(dec.atoms, dec.weights, d);
}

namespace detail {

struct LexGreater {
  bool operator()(const Eigen::VectorXi& a, const Eigen::VectorXi& b) const {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a(i) != b(i)) return a(i) > b(i);
    }
    return false;
  }
};

}  // namespace detail

/// Canonical Decomposition from raw atoms/weights: duplicate atoms merge by
/// weight summation, weights at or below the floor are pruned, atoms are
/// sorted in descending lexicographic order, and the Frobenius residual is
/// recorded against the target.
template <typename Scalar>
Decomposition<Scalar> make_decomposition(const std::vector<IntegerAtom>& atoms,
                                         const DenseVector<Scalar>& weights, int bound_m,
                                         const SymmetricMatrix<Scalar>& target) {
  if (static_cast<Eigen::Index>(atoms.size()) != weights.size()) {
    throw ValidationError("make_decomposition: atoms/weights length mismatch");
  }
  const Eigen::Index d = target.dim();
  std::map<Eigen::VectorXi, Scalar, detail::LexGreater> merged;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].dim() != d) {
      throw ValidationError("make_decomposition: atom dimension does not match target");
    }
    merged[atoms[i].z] += weights(static_cast<Eigen::Index>(i));
  }
  Decomposition<Scalar> dec;
  dec.bound_m = bound_m;
  for (const auto& [z, w] : merged) {
    if (w <= Scalar(kWeightFloor)) continue;
    dec.atoms.push_back(IntegerAtom{z, bound_m});
    dec.weights.conservativeResize(dec.weights.size() + 1);
    dec.weights(dec.weights.size() - 1) = w;
  }
  dec.residual_fro =
      (reconstruct(dec, d).matrix() - target.matrix()).norm();
  return dec;
}

/// Lazy NNLS column source over the atom list: column j is atom_svec(z_j).
/// Correlations use g_j . r = z_j^T svec_inv(r) z_j, and the column norm is
/// ||z_j z_j^T||_F = ||z_j||^2, so nothing is materialized.
template <typename Scalar>
class AtomColumns {
 public:
  explicit AtomColumns(const std::vector<IntegerAtom>& atoms) : atoms_(atoms) {
    if (atoms.empty()) throw ValidationError("AtomColumns: empty atom set");
    d_ = atoms.front().dim();
    norms_.resize(static_cast<Eigen::Index>(atoms.size()));
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      norms_(static_cast<Eigen::Index>(j)) =
          static_cast<Scalar>(atoms[j].z.squaredNorm());
    }
  }

  Eigen::Index rows() const { return svec_length(d_); }
  Eigen::Index cols() const { return static_cast<Eigen::Index>(atoms_.size()); }
  Scalar column_norm(Eigen::Index j) const { return norms_(j); }

  void correlations(const DenseVector<Scalar>& r, DenseVector<Scalar>& w) const {
    const SymmetricMatrix<Scalar> rm = svec_inv(r);
    DenseVector<Scalar> zf(d_);
    for (Eigen::Index j = 0; j < cols(); ++j) {
      zf = atoms_[static_cast<std::size_t>(j)].z.cast<Scalar>();
      w(j) = zf.dot(rm.matrix() * zf);
    }
  }

  void column(Eigen::Index j, Eigen::Ref<DenseVector<Scalar>> out) const {
    out = atom_svec<Scalar>(atoms_[static_cast<std::size_t>(j)]);
  }

 private:
  const std::vector<IntegerAtom>& atoms_;
  Eigen::Index d_ = 0;
  DenseVector<Scalar> norms_;
};

/// Smallest positive integer m with m >= 0.5 * sqrt((d-1) kappa(A)); every
/// positive-definite A admits a decomposition with entries bounded by it.
template <typename Scalar>
int guaranteed_m(const SymmetricMatrix<Scalar>& a) {
  const Scalar kappa = condition_number(a);
  const Scalar threshold =
      Scalar(0.5) * std::sqrt(static_cast<Scalar>(a.dim() - 1) * kappa);
  return std::max(1, static_cast<int>(std::ceil(threshold)));
}

namespace detail {

template <typename Scalar>
Decomposition<Scalar> solve_membership(const SymmetricMatrix<Scalar>& a, int m) {
  const int d = static_cast<int>(a.dim());
  const std::vector<IntegerAtom> atoms = enumerate_atoms(d, m);
  const AtomColumns<Scalar> cols(atoms);
  const DenseVector<Scalar> y = svec(a);
  const NnlsResult<Scalar> sol = nnls_active_set(cols, y);

  std::vector<IntegerAtom> picked;
  picked.reserve(sol.support.size());
  for (Eigen::Index j : sol.support) picked.push_back(atoms[static_cast<std::size_t>(j)]);
  return make_decomposition(picked, sol.weights, m, a);
}

}  // namespace detail

/// Exact conic-membership solve: finds nonnegative weights over the atoms of
/// the m-bounded grid with ||sum w_i z_i z_i^T - A||_F <= tol * max(1, ||A||_F),
/// or throws Infeasible carrying the best residual. Requires A positive
/// definite; the result is deterministic for identical input.
template <typename Scalar>
Decomposition<Scalar> factorize(const SymmetricMatrix<Scalar>& a, int m,
                                Scalar tol = Scalar(1e-8)) {
  if (!(tol > Scalar(0))) throw ValidationError("factorize: tol must be positive");
  condition_number(a);  // positive-definiteness gate
  Decomposition<Scalar> dec = detail::solve_membership(a, m);
  const Scalar scale = std::max(Scalar(1), a.frobenius());
  if (dec.residual_fro > tol * scale) {
    std::ostringstream msg;
    msg << "factorize: residual " << dec.residual_fro << " exceeds tolerance "
        << tol * scale << " at m = " << m;
    throw Infeasible(msg.str(), static_cast<double>(dec.residual_fro));
  }
  return dec;
}

/// factorize without the throw: nullopt when m is infeasible at tol.
template <typename Scalar>
std::optional<Decomposition<Scalar>> try_factorize(const SymmetricMatrix<Scalar>& a, int m,
                                                   Scalar tol = Scalar(1e-8)) {
  if (!(tol > Scalar(0))) throw ValidationError("try_factorize: tol must be positive");
  condition_number(a);
  Decomposition<Scalar> dec = detail::solve_membership(a, m);
  const Scalar scale = std::max(Scalar(1), a.frobenius());
  if (dec.residual_fro > tol * scale) return std::nullopt;
  return dec;
}

/// Smallest feasible m, by linear scan from 1 up to guaranteed_m(A).
/// Feasibility is monotone in m, so the scan result is the true minimum.
template <typename Scalar>
int minimal_m(const SymmetricMatrix<Scalar>& a, Scalar tol = Scalar(1e-8)) {
  if (!(tol > Scalar(0))) throw ValidationError("minimal_m: tol must be positive");
  const int cap_m = guaranteed_m(a);
  check_enumeration_cap(static_cast<int>(a.dim()), cap_m);
  const Scalar scale = std::max(Scalar(1), a.frobenius());
  Scalar last_residual = 0;
  for (int m = 1; m <= cap_m; ++m) {
    const Decomposition<Scalar> dec = detail::solve_membership(a, m);
    last_residual = dec.residual_fro;
    if (dec.residual_fro <= tol * scale) return m;
  }
  std::ostringstream msg;
  msg << "minimal_m: no feasible m up to the guaranteed bound " << cap_m;
  throw Infeasible(msg.str(), static_cast<double>(last_residual));
}

/// Shrink the support to at most d(d+1)/2 terms without changing the
/// reconstruction: repeatedly step the weights along a null-space direction
/// of the active svec columns until a weight hits zero.
template <typename Scalar>
Decomposition<Scalar> reduce_caratheodory(const Decomposition<Scalar>& dec,
                                          const SymmetricMatrix<Scalar>& target) {
  const Eigen::Index d = target.dim();
  const Eigen::Index cap = svec_length(d);
  std::vector<IntegerAtom> atoms = dec.atoms;
  std::vector<Scalar> w(dec.weights.data(), dec.weights.data() + dec.weights.size());

  while (static_cast<Eigen::Index>(atoms.size()) > cap) {
    const Eigen::Index r = static_cast<Eigen::Index>(atoms.size());
    DenseMatrix<Scalar> cols(svec_length(d), r);
    for (Eigen::Index j = 0; j < r; ++j) {
      cols.col(j) = atom_svec<Scalar>(atoms[static_cast<std::size_t>(j)]);
    }
    Eigen::FullPivLU<DenseMatrix<Scalar>> lu;
    lu.setThreshold(Scalar(1e-12));
    lu.compute(cols);
    DenseVector<Scalar> nu = lu.kernel().col(0);
    nu /= nu.cwiseAbs().maxCoeff();
    if (nu.maxCoeff() < Scalar(1e-12)) nu = -nu;  // need a usable positive entry

    Scalar step = 0;
    Eigen::Index drop = -1;
    for (Eigen::Index i = 0; i < r; ++i) {
      if (nu(i) <= Scalar(1e-12)) continue;
      const Scalar ratio = w[static_cast<std::size_t>(i)] / nu(i);
      if (drop < 0 || ratio < step) {
        step = ratio;
        drop = i;
      }
    }

    std::vector<IntegerAtom> next_atoms;
    std::vector<Scalar> next_w;
    for (Eigen::Index i = 0; i < r; ++i) {
      const Scalar wi =
          (i == drop) ? Scalar(0) : w[static_cast<std::size_t>(i)] - step * nu(i);
      if (wi > Scalar(kWeightFloor)) {
        next_atoms.push_back(atoms[static_cast<std::size_t>(i)]);
        next_w.push_back(wi);
      }
    }
    atoms.swap(next_atoms);
    w.swap(next_w);
  }

  DenseVector<Scalar> wv =
      Eigen::Map<DenseVector<Scalar>>(w.data(), static_cast<Eigen::Index>(w.size()));
  return make_decomposition(atoms, wv, dec.bound_m, target);
}

/// Certificate check: reconstruction error against tol * max(1, ||A||_F),
/// entry bound, weight positivity, term count <= d(d+1)/2. Failures are
/// reported, never thrown.
template <typename Scalar>
VerificationReport<Scalar> verify(const Decomposition<Scalar>& dec,
                                  const SymmetricMatrix<Scalar>& target,
                                  Scalar tol = Scalar(1e-8)) {
  const Eigen::Index d = target.dim();
  for (const IntegerAtom& atom : dec.atoms) {
    if (atom.dim() != d) throw ValidationError("verify: atom dimension mismatch");
  }
  if (dec.weights.size() != static_cast<Eigen::Index>(dec.atoms.size())) {
    throw ValidationError("verify: atoms/weights length mismatch");
  }
  VerificationReport<Scalar> report;
  report.term_count = static_cast<int>(dec.atoms.size());
  report.term_count_ok = static_cast<Eigen::Index>(dec.atoms.size()) <= svec_length(d);
  report.reconstruction_error =
      (reconstruct(dec.atoms, dec.weights, d).matrix() - target.matrix()).norm();
  report.reconstruction_ok =
      report.reconstruction_error <= tol * std::max(Scalar(1), target.frobenius());
  report.max_entry_bound_ok = true;
  for (const IntegerAtom& atom : dec.atoms) {
    if (atom.z.cwiseAbs().maxCoeff() > dec.bound_m) report.max_entry_bound_ok = false;
  }
  report.weights_positive =
      dec.weights.size() == 0 || (dec.weights.array() > Scalar(0)).all();
  report.verdict = report.reconstruction_ok && report.max_entry_bound_ok &&
                   report.weights_positive && report.term_count_ok;
  return report;
}

/// The 2x2 family [[b^2+1, b], [b, 2]] whose minimal entry bound grows like
/// sqrt(kappa)/2, block-embedded as diag(., I_{d-2}) for d > 2.
template <typename Scalar>
SymmetricMatrix<Scalar> extremal_matrix(Scalar b, Eigen::Index d = 2) {
  if (!(b >= Scalar(1))) throw ValidationError("extremal_matrix: require b >= 1");
  if (d < 2) throw ValidationError("extremal_matrix: require d >= 2");
  DenseMatrix<Scalar> m = DenseMatrix<Scalar>::Identity(d, d);
  m(0, 0) = b * b + Scalar(1);
  m(0, 1) = m(1, 0) = b;
  m(1, 1) = Scalar(2);
  return SymmetricMatrix<Scalar>(m);
}

}  // namespace zdzt
