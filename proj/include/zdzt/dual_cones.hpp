#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "zdzt/errors.hpp"
#include "zdzt/integer_grid.hpp"
#include "zdzt/rng.hpp"
#include "zdzt/sampling.hpp"
#include "zdzt/spectrum.hpp"
#include "zdzt/symmetric.hpp"

namespace zdzt {

/// Verdict for a dual-cone membership query. `margin` is the slack in the
/// defining inequality (negative when violated); for lattice-cone queries a
/// violating grid vector is attached as witness iff membership fails.
struct DualMembershipReport {
  bool member = false;
  int sign_split_s = 0;
  double margin = 0;
  std::optional<IntegerAtom> witness;
};

/// One-sided acceptance slack for dual membership; the cones are closed, so
/// boundary points must classify as members.
template <typename Scalar>
Scalar membership_tolerance(const SymmetricMatrix<Scalar>& b) {
  return Scalar(1e-9) * (Scalar(1) + b.frobenius());
}

/// Largest s such that the s-th descending eigenvalue is >= -tol * scale
/// (scale = 1 + max |eigenvalue|). Eigenvalues within tolerance of zero count
/// as nonnegative; s = d for positive-semidefinite input, s = 0 for
/// negative-definite input.
template <typename Scalar>
int sign_split_index(const Spectrum<Scalar>& spec, Scalar tol) {
  const Eigen::Index d = spec.dim();
  const Scalar scale =
      Scalar(1) + (d > 0 ? spec.eigenvalues.cwiseAbs().maxCoeff() : Scalar(0));
  int s = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (spec.eigenvalues(i) >= -tol * scale) {
      s = static_cast<int>(i) + 1;
    } else {
      break;
    }
  }
  return s;
}

/// Membership in the dual of the bounded-condition-number cone
/// {A positive definite : kappa(A) <= c}: with s the sign-split index of B,
/// B is in the dual iff
///   sum_{i>s} lambda_i(B) >= -(1/c) sum_{i<=s} lambda_i(B).
template <typename Scalar>
DualMembershipReport in_condition_cone_dual(const SymmetricMatrix<Scalar>& b, Scalar c) {
  if (!(c >= Scalar(1))) {
    throw ValidationError("in_condition_cone_dual: require c >= 1");
  }
  const Spectrum<Scalar> spec = eigh(b);
  const Scalar tol = membership_tolerance(b);
  const int s = sign_split_index(spec, Scalar(1e-9));

  Scalar head = 0, tail = 0;
  for (Eigen::Index i = 0; i < spec.dim(); ++i) {
    if (static_cast<int>(i) < s) {
      head += spec.eigenvalues(i);
    } else {
      tail += spec.eigenvalues(i);
    }
  }
  DualMembershipReport report;
  report.sign_split_s = s;
  report.margin = static_cast<double>(tail + head / c);
  report.member = report.margin >= -static_cast<double>(tol);
  return report;
}

/// Membership in the dual of the integer-outer-product cone: B is a member
/// iff z^T B z >= 0 for every grid vector with entries bounded by m. The
/// margin is the grid minimum; on failure the minimizing vector is the
/// witness.
template <typename Scalar>
DualMembershipReport in_lattice_cone_dual(const SymmetricMatrix<Scalar>& b, int m) {
  const Spectrum<Scalar> spec = eigh(b);
  const GridMin<Scalar> gm = grid_min_quadratic(b, m);
  const Scalar tol = membership_tolerance(b);

  DualMembershipReport report;
  report.sign_split_s = sign_split_index(spec, Scalar(1e-9));
  report.margin = static_cast<double>(gm.value);
  report.member = gm.value >= -tol;
  if (!report.member) report.witness = gm.witness;
  return report;
}

struct InclusionScanReport {
  int dim = 0;
  int bound_m = 0;
  double c = 0;  // tested condition bound, 4 m^2 / (d - 1)
  int n_samples = 0;
  int lattice_dual_members = 0;
  std::vector<int> violations;    // sample indices in the lattice dual but not the condition dual
  std::vector<int> split_counts;  // histogram of sign-split s over members, size d+1
  double min_condition_margin = std::numeric_limits<double>::infinity();
};

/// Sample symmetrized standard-normal matrices; every member of the lattice
/// dual cone must also lie in the condition dual with c = 4 m^2 / (d - 1).
/// Violations are reported, not thrown. Per-sample RNG streams are keyed by
/// (seed, sample index), so the scan parallelizes without changing output.
inline InclusionScanReport dual_inclusion_scan(int d, int m, int n_samples,
                                               std::uint64_t seed) {
  if (d < 2) throw ValidationError("dual_inclusion_scan: require d >= 2");
  if (n_samples < 1) throw ValidationError("dual_inclusion_scan: require n_samples >= 1");
  check_enumeration_cap(d, m);

  InclusionScanReport report;
  report.dim = d;
  report.bound_m = m;
  report.c = 4.0 * m * m / (d - 1);
  report.n_samples = n_samples;
  report.split_counts.assign(static_cast<std::size_t>(d) + 1, 0);

  for (int k = 0; k < n_samples; ++k) {
    SplitMix64 rng = SplitMix64::keyed(seed, static_cast<std::uint64_t>(k));
    const SymmetricMatrix<double> b = random_symmetric<double>(d, rng);
    const DualMembershipReport zrep = in_lattice_cone_dual(b, m);
    if (!zrep.member) continue;
    ++report.lattice_dual_members;
    report.split_counts[static_cast<std::size_t>(zrep.sign_split_s)]++;
    const DualMembershipReport krep = in_condition_cone_dual(b, report.c);
    report.min_condition_margin = std::min(report.min_condition_margin, krep.margin);
    if (!krep.member) report.violations.push_back(k);
  }
  return report;
}

/// Rejection-sample a lattice-dual member with the given sign-split index
/// (any split when target_s < 0). Throws SamplingError after max_tries.
inline SymmetricMatrix<double> sample_lattice_dual(int d, int m, int target_s,
                                                   std::uint64_t seed,
                                                   int max_tries = 100000) {
  check_enumeration_cap(d, m);
  constexpr std::uint64_t kRejectionStream = 1ULL << 40;
  for (int t = 0; t < max_tries; ++t) {
    SplitMix64 rng = SplitMix64::keyed(seed, kRejectionStream + static_cast<std::uint64_t>(t));
    SymmetricMatrix<double> b = random_symmetric<double>(d, rng);
    const DualMembershipReport rep = in_lattice_cone_dual(b, m);
    if (!rep.member) continue;
    if (target_s >= 0 && rep.sign_split_s != target_s) continue;
    return b;
  }
  throw SamplingError(
      "sample_lattice_dual: rejection sampling failed; retry with a new seed");
}

}  // namespace zdzt
