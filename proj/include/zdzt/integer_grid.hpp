#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <sstream>
#include <vector>

#include "zdzt/errors.hpp"
#include "zdzt/symmetric.hpp"

namespace zdzt {

/// Canonical representative of the sign class {z, -z}: the first nonzero
/// entry is positive. zz^T is invariant under negation, so one
/// representative per class generates the same cone.
struct IntegerAtom {
  Eigen::VectorXi z;
  int bound = 0;  // entries satisfy |z_i| <= bound

  Eigen::Index dim() const { return z.size(); }
};

inline bool operator==(const IntegerAtom& a, const IntegerAtom& b) {
  return a.z.size() == b.z.size() && a.z == b.z;
}

/// Default cap on grid size (2m+1)^d.
constexpr std::int64_t kEnumerationCap = 20'000'000;

/// (2m+1)^d, saturating just above `cap` to avoid overflow.
inline std::int64_t grid_size(int d, int m, std::int64_t cap = kEnumerationCap) {
  std::int64_t acc = 1;
  const std::int64_t side = 2 * static_cast<std::int64_t>(m) + 1;
  for (int i = 0; i < d; ++i) {
    acc *= side;
    if (acc > cap) return cap + 1;
  }
  return acc;
}

inline void check_enumeration_cap(int d, int m, std::int64_t cap = kEnumerationCap) {
  if (d < 1 || m < 1) {
    throw ValidationError("integer grid: require d >= 1 and m >= 1");
  }
  if (grid_size(d, m, cap) > cap) {
    std::ostringstream msg;
    msg << "integer grid: (2m+1)^d exceeds enumeration cap " << cap
        << " (d = " << d << ", m = " << m << ")";
    throw CapExceeded(msg.str());
  }
}

inline bool is_canonical(const Eigen::VectorXi& z) {
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (z(i) != 0) return z(i) > 0;
  }
  return false;  // zero vector
}

/// Visit every canonical z in ascending lexicographic order (first component
/// most significant). fn receives a const Eigen::VectorXi&.
template <typename Fn>
void for_each_canonical(int d, int m, Fn&& fn) {
  Eigen::VectorXi z = Eigen::VectorXi::Constant(d, -m);
  for (;;) {
    if (is_canonical(z)) fn(static_cast<const Eigen::VectorXi&>(z));
    // odometer increment, last coordinate fastest
    Eigen::Index pos = d - 1;
    while (pos >= 0 && z(pos) == m) {
      z(pos) = -m;
      --pos;
    }
    if (pos < 0) break;
    ++z(pos);
  }
}

/// All canonical atoms of the grid, ((2m+1)^d - 1)/2 of them, in ascending
/// lexicographic order. Throws CapExceeded past the enumeration cap.
inline std::vector<IntegerAtom> enumerate_atoms(int d, int m) {
  check_enumeration_cap(d, m);
  std::vector<IntegerAtom> atoms;
  atoms.reserve(static_cast<std::size_t>((grid_size(d, m) - 1) / 2));
  for_each_canonical(d, m, [&](const Eigen::VectorXi& z) {
    atoms.push_back(IntegerAtom{z, m});
  });
  return atoms;
}

/// svec coordinates of zz^T. Satisfies dot(atom_svec(z), svec(B)) = z^T B z.
template <typename Scalar = double>
DenseVector<Scalar> atom_svec(const IntegerAtom& a) {
  const Eigen::Index d = a.dim();
  const Scalar root2 = std::sqrt(Scalar(2));
  DenseVector<Scalar> v(svec_length(d));
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    const Scalar zi = static_cast<Scalar>(a.z(i));
    v(k++) = zi * zi;
    for (Eigen::Index j = i + 1; j < d; ++j) {
      v(k++) = root2 * zi * static_cast<Scalar>(a.z(j));
    }
  }
  return v;
}

template <typename Scalar>
struct GridMin {
  Scalar value;
  IntegerAtom witness;
};

/// Minimum of z^T B z over the canonical atoms, with the lexicographically
/// first argmin as witness.
template <typename Scalar>
GridMin<Scalar> grid_min_quadratic(const SymmetricMatrix<Scalar>& b, int m) {
  const int d = static_cast<int>(b.dim());
  check_enumeration_cap(d, m);
  const DenseMatrix<Scalar>& mat = b.matrix();
  GridMin<Scalar> best;
  bool first = true;
  DenseVector<Scalar> zf(d);
  for_each_canonical(d, m, [&](const Eigen::VectorXi& z) {
    zf = z.cast<Scalar>();
    const Scalar q = zf.dot(mat * zf);
    if (first || q < best.value) {
      first = false;
      best.value = q;
      best.witness = IntegerAtom{z, m};
    }
  });
  return best;
}

}  // namespace zdzt
