#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "shilov/types.hpp"

namespace shilov {

/// Null space basis of M from its reduced row echelon form. Pivot selection
/// is by largest modulus; entries below tol * max|M| count as zero. The
/// returned vectors have a unit entry at their free column, so a kernel like
/// span{e_1, e_2} comes back as exactly those vectors.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> null_space(
    const Eigen::MatrixBase<Derived>& M, typename Derived::RealScalar rel_tol = 1e-10) {
  using Scalar = typename Derived::Scalar;
  using Real = typename Derived::RealScalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat A = M;
  const Index rows = A.rows(), cols = A.cols();
  const Real scale = rows > 0 && cols > 0 ? A.cwiseAbs().maxCoeff() : Real(0);
  const Real tol = rel_tol * std::max(scale, Real(1e-300));
  std::vector<Index> pivot_cols;
  Index r = 0;
  for (Index c = 0; c < cols && r < rows; ++c) {
    Index p = r;
    A.col(c).segment(r, rows - r).cwiseAbs().maxCoeff(&p);
    p += r;
    if (std::abs(A(p, c)) <= tol) {
      A.col(c).segment(r, rows - r).setZero();
      continue;
    }
    A.row(p).swap(A.row(r));
    A.row(r) /= A(r, c);
    for (Index i = 0; i < rows; ++i)
      if (i != r && A(i, c) != Scalar(0)) A.row(i) -= A(i, c) * A.row(r);
    pivot_cols.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (Index c : pivot_cols) is_pivot[c] = true;
  Mat N(cols, cols - static_cast<Index>(pivot_cols.size()));
  Index k = 0;
  for (Index f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    N.col(k).setZero();
    N(f, k) = Scalar(1);
    for (std::size_t i = 0; i < pivot_cols.size(); ++i) N(pivot_cols[i], k) = -A(static_cast<Index>(i), f);
    ++k;
  }
  return N;
}

/// Numerical rank by singular values: sigma_i > rel_tol * sigma_max.
template <typename Derived>
Index numerical_rank(const Eigen::MatrixBase<Derived>& M,
                     typename Derived::RealScalar rel_tol = 1e-10) {
  if (M.size() == 0) return 0;
  using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::JacobiSVD<Mat> svd(M.eval());
  const auto& s = svd.singularValues();
  if (s(0) == 0) return 0;
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

/// Greedy left-to-right selection of linearly independent columns. A column
/// is kept when its component orthogonal to the kept ones exceeds rel_tol
/// times its own norm (two Gram-Schmidt passes).
template <typename Derived>
std::vector<Index> independent_columns(const Eigen::MatrixBase<Derived>& M,
                                       typename Derived::RealScalar rel_tol = 1e-10) {
  using Scalar = typename Derived::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  std::vector<Index> kept;
  std::vector<Vec> q;
  for (Index j = 0; j < M.cols(); ++j) {
    Vec v = M.col(j);
    const auto n0 = v.norm();
    if (n0 == 0) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : q) v -= u.dot(v) * u;
    const auto n1 = v.norm();
    if (n1 > rel_tol * n0) {
      q.push_back(v / n1);
      kept.push_back(j);
    }
  }
  return kept;
}

namespace detail {

// Givens data [c s; -conj(s) c] with [c s; -conj(s) c] [f; g] = [r; 0].
template <typename Real>
void complex_givens(std::complex<Real> f, std::complex<Real> g, Real& c, std::complex<Real>& s) {
  using std::abs;
  if (g == std::complex<Real>(0)) {
    c = 1;
    s = 0;
  } else if (f == std::complex<Real>(0)) {
    c = 0;
    s = std::conj(g) / abs(g);
  } else {
    const Real r = std::hypot(abs(f), abs(g));
    c = abs(f) / r;
    s = (f / abs(f)) * std::conj(g) / r;
  }
}

// Swaps diagonal entries k and k+1 of the complex Schur form (T, Q).
template <typename Real>
void swap_schur_pair(ComplexMatrix<Real>& T, ComplexMatrix<Real>& Q, Index k) {
  const Index n = T.rows();
  const std::complex<Real> t11 = T(k, k), t22 = T(k + 1, k + 1);
  Real c;
  std::complex<Real> s;
  complex_givens(T(k, k + 1), t22 - t11, c, s);
  // rows k, k+1 (columns right of the pair)
  for (Index j = k + 2; j < n; ++j) {
    const auto x = T(k, j), y = T(k + 1, j);
    T(k, j) = c * x + s * y;
    T(k + 1, j) = c * y - std::conj(s) * x;
  }
  // columns k, k+1 (rows above the pair)
  const std::complex<Real> sc = std::conj(s);
  for (Index i = 0; i < k; ++i) {
    const auto x = T(i, k), y = T(i, k + 1);
    T(i, k) = c * x + sc * y;
    T(i, k + 1) = c * y - std::conj(sc) * x;
  }
  T(k, k) = t22;
  T(k + 1, k + 1) = t11;
  T(k + 1, k) = 0;
  for (Index i = 0; i < n; ++i) {
    const auto x = Q(i, k), y = Q(i, k + 1);
    Q(i, k) = c * x + sc * y;
    Q(i, k + 1) = c * y - std::conj(sc) * x;
  }
}

}  // namespace detail

/// Complex Schur form A = Q T Q^* whose diagonal is grouped by nested
/// single-linkage clusters of the eigenvalues, one clustering per tolerance
/// (tolerances in decreasing order). After reordering, every cluster at every
/// level occupies a contiguous run of diagonal positions; keys[level][p] is
/// the cluster id of position p at that level.
template <typename Real>
struct ClusteredSchur {
  ComplexMatrix<Real> Q;
  ComplexMatrix<Real> T;
  std::vector<std::vector<Index>> keys;

  /// Contiguous runs [begin, end) of equal key at `level` inside [from, to).
  std::vector<std::pair<Index, Index>> runs(std::size_t level, Index from, Index to) const {
    std::vector<std::pair<Index, Index>> out;
    Index b = from;
    for (Index i = from + 1; i <= to; ++i)
      if (i == to || keys[level][i] != keys[level][b]) {
        out.emplace_back(b, i);
        b = i;
      }
    return out;
  }
};

template <typename Real>
ClusteredSchur<Real> clustered_schur(const ComplexMatrix<Real>& A, const std::vector<Real>& tolerances) {
  Eigen::ComplexSchur<ComplexMatrix<Real>> schur(A);
  ClusteredSchur<Real> out;
  out.T = schur.matrixT();
  out.Q = schur.matrixU();
  const Index n = A.rows();

  for (Real tol : tolerances) {
    std::vector<Index> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](Index i) {
      while (parent[i] != i) i = parent[i] = parent[parent[i]];
      return i;
    };
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (std::abs(out.T(i, i) - out.T(j, j)) <= tol) parent[find(j)] = find(i);
    std::vector<Index> key(n), first_seen(n, -1);
    Index next = 0;
    for (Index i = 0; i < n; ++i) {
      const Index root = find(i);
      if (first_seen[root] < 0) first_seen[root] = next++;
      key[i] = first_seen[root];
    }
    out.keys.push_back(std::move(key));
  }

  auto less = [&](Index a, Index b) {
    for (const auto& k : out.keys)
      if (k[a] != k[b]) return k[a] < k[b];
    return false;
  };
  // bubble sort of the diagonal by composite key, one adjacent swap at a time
  for (Index pass = 0; pass < n; ++pass) {
    bool moved = false;
    for (Index k = 0; k + 1 < n; ++k)
      if (less(k + 1, k)) {
        detail::swap_schur_pair(out.T, out.Q, k);
        for (auto& key : out.keys) std::swap(key[k], key[k + 1]);
        moved = true;
      }
    if (!moved) break;
  }
  return out;
}

}  // namespace shilov
