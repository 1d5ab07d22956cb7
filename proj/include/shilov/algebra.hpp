#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "shilov/types.hpp"

namespace shilov {

/// Finite-dimensional commutative unital algebra over C given by structure
/// constants, with the weighted l1 coordinate norm ||a|| = sum_i w_i |a_i|.
///
/// The tensor is stored as one left-multiplication matrix per basis vector:
/// left[i](k, j) is the e_k coordinate of e_i * e_j.
template <typename Real = double>
struct AlgebraSpec {
  using RealScalar = Real;
  using Scalar = std::complex<Real>;
  using Vector = ComplexVector<Real>;
  using Matrix = ComplexMatrix<Real>;
  using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

  std::vector<Matrix> left;
  Vector unit;
  RealVector weights;
  std::string label;

  Index dim() const { return static_cast<Index>(left.size()); }

  Scalar structure(Index i, Index j, Index k) const { return left[i](k, j); }

  Vector basis_vector(Index i) const { return Vector::Unit(dim(), i); }

  template <typename Other>
  AlgebraSpec<Other> cast() const {
    AlgebraSpec<Other> out;
    for (const auto& m : left) out.left.push_back(m.template cast<std::complex<Other>>());
    out.unit = unit.template cast<std::complex<Other>>();
    out.weights = weights.template cast<Other>();
    out.label = label;
    return out;
  }
};

namespace detail {

template <typename Real>
void require_dim(const AlgebraSpec<Real>& E, Index n, const char* what) {
  if (n != E.dim()) {
    std::ostringstream os;
    os << what << ": expected " << E.dim() << " coordinates, got " << n;
    throw DimensionMismatch(os.str());
  }
}

template <typename Real>
Real structure_scale(const AlgebraSpec<Real>& E) {
  Real s = 1;
  for (const auto& m : E.left) s = std::max(s, m.cwiseAbs().maxCoeff());
  return s;
}

}  // namespace detail

/// Matrix of x -> a x in the basis coordinates.
template <typename Real, typename Derived>
ComplexMatrix<Real> left_multiplication(const AlgebraSpec<Real>& E,
                                        const Eigen::MatrixBase<Derived>& a) {
  detail::require_dim(E, a.size(), "left_multiplication");
  ComplexMatrix<Real> L = ComplexMatrix<Real>::Zero(E.dim(), E.dim());
  for (Index i = 0; i < E.dim(); ++i)
    if (a(i) != std::complex<Real>(0)) L += a(i) * E.left[i];
  return L;
}

template <typename Real, typename DerivedA, typename DerivedB>
ComplexVector<Real> multiply(const AlgebraSpec<Real>& E, const Eigen::MatrixBase<DerivedA>& a,
                             const Eigen::MatrixBase<DerivedB>& b) {
  detail::require_dim(E, b.size(), "multiply");
  return left_multiplication(E, a) * b;
}

template <typename Real, typename Derived>
ComplexVector<Real> power(const AlgebraSpec<Real>& E, const Eigen::MatrixBase<Derived>& a,
                          int exponent) {
  ComplexVector<Real> r = E.unit;
  for (int k = 0; k < exponent; ++k) r = multiply(E, r, a);
  return r;
}

template <typename Real, typename Derived>
Real norm(const AlgebraSpec<Real>& E, const Eigen::MatrixBase<Derived>& a) {
  detail::require_dim(E, a.size(), "norm");
  return E.weights.dot(a.cwiseAbs());
}

/// Solves L_a x = 1_E. Throws NotInvertible when L_a is numerically singular
/// (smallest singular value below 1e-10 times the largest).
template <typename Real, typename Derived>
ComplexVector<Real> invert(const AlgebraSpec<Real>& E, const Eigen::MatrixBase<Derived>& a) {
  const ComplexMatrix<Real> L = left_multiplication(E, a);
  Eigen::JacobiSVD<ComplexMatrix<Real>> svd(L, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == Real(0) || s(s.size() - 1) <= Real(1e-10) * s(0))
    throw NotInvertible("element is not invertible in " + E.label);
  return svd.solve(E.unit);
}

/// Exhaustive check of the algebra axioms over basis indices. Failures carry
/// the offending indices and the residual magnitude.
template <typename Real>
ValidationReport validate_algebra(const AlgebraSpec<Real>& E) {
  ValidationReport rep;
  rep.subject = "algebra " + E.label;
  const Index n = E.dim();
  bool shapes = n > 0 && E.unit.size() == n && E.weights.size() == n;
  for (const auto& m : E.left) shapes = shapes && m.rows() == n && m.cols() == n;
  rep.add("shape", shapes, 0.0, shapes ? "" : "inconsistent dimensions");
  if (!shapes) return rep;

  const bool positive = (E.weights.array() > Real(0)).all();
  rep.add("weights_positive", positive, 0.0, positive ? "" : "nonpositive norm weight");

  const double tol = 1e-10 * static_cast<double>(detail::structure_scale(E));

  double worst = 0;
  std::string where;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double r = static_cast<double>((E.left[i].col(j) - E.left[j].col(i)).cwiseAbs().maxCoeff());
      if (r > worst) {
        worst = r;
        where = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
      }
    }
  rep.add("commutativity", worst <= tol, worst, worst <= tol ? "" : "fails at " + where);

  worst = 0;
  where.clear();
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const ComplexVector<Real> eij = E.left[i].col(j);
      const ComplexMatrix<Real> Lij = left_multiplication(E, eij);
      const ComplexMatrix<Real> rhs = E.left[i] * E.left[j];
      // column k: (e_i e_j) e_k versus e_i (e_j e_k)
      const double r = static_cast<double>((Lij - rhs).cwiseAbs().maxCoeff());
      if (r > worst) {
        worst = r;
        Index kk = 0;
        (Lij - rhs).cwiseAbs().colwise().maxCoeff().maxCoeff(&kk);
        where = "(" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(kk) + ")";
      }
    }
  rep.add("associativity", worst <= tol * detail::structure_scale(E), worst,
          worst <= tol * detail::structure_scale(E) ? "" : "fails at " + where);

  const ComplexMatrix<Real> Lu = left_multiplication(E, E.unit);
  const double unit_res =
      static_cast<double>((Lu - ComplexMatrix<Real>::Identity(n, n)).cwiseAbs().maxCoeff());
  rep.add("unit", unit_res <= tol, unit_res, unit_res <= tol ? "" : "u*e_i != e_i");

  worst = 0;
  where.clear();
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const double lhs = static_cast<double>(norm(E, E.left[i].col(j)));
      const double bound = static_cast<double>(E.weights(i) * E.weights(j));
      const double excess = lhs - bound;
      if (excess > 1e-10 * std::max(1.0, bound) && excess > worst) {
        worst = excess;
        where = "(" + std::to_string(i) + "," + std::to_string(j) + "): ||e_i e_j|| = " +
                std::to_string(lhs) + " > " + std::to_string(bound);
      }
    }
  rep.add("submultiplicativity", where.empty(), worst, where);
  return rep;
}

/// Builds an AlgebraSpec from a structure tensor c[i][j][k].
template <typename Real = double>
AlgebraSpec<Real> algebra_from_tensor(
    const std::vector<std::vector<ComplexVector<Real>>>& c, const ComplexVector<Real>& unit,
    const Eigen::Matrix<Real, Eigen::Dynamic, 1>& weights, std::string label) {
  const Index n = static_cast<Index>(c.size());
  AlgebraSpec<Real> E;
  E.label = std::move(label);
  E.unit = unit;
  E.weights = weights;
  for (Index i = 0; i < n; ++i) {
    if (static_cast<Index>(c[i].size()) != n) throw DimensionMismatch("structure tensor is not square");
    ComplexMatrix<Real> L(n, n);
    for (Index j = 0; j < n; ++j) {
      if (c[i][j].size() != n) throw DimensionMismatch("structure tensor fiber has wrong length");
      L.col(j) = c[i][j];
    }
    E.left.push_back(std::move(L));
  }
  return E;
}

// ---------------------------------------------------------------- presets

/// C^n with pointwise product in the idempotent basis.
template <typename Real = double>
AlgebraSpec<Real> pointwise_algebra(int n) {
  if (n < 1) throw InvalidArgument("pointwise_n requires n >= 1");
  AlgebraSpec<Real> E;
  E.label = n == 1 ? "complex" : "pointwise_" + std::to_string(n);
  for (int i = 0; i < n; ++i) {
    ComplexMatrix<Real> L = ComplexMatrix<Real>::Zero(n, n);
    L(i, i) = 1;
    E.left.push_back(L);
  }
  E.unit = ComplexVector<Real>::Ones(n);
  E.weights = Eigen::Matrix<Real, Eigen::Dynamic, 1>::Ones(n);
  return E;
}

template <typename Real = double>
AlgebraSpec<Real> complex_field() {
  return pointwise_algebra<Real>(1);
}

/// C[t]/(t^k), basis 1, t, ..., t^{k-1}.
template <typename Real = double>
AlgebraSpec<Real> truncated_poly_algebra(int k) {
  if (k < 2) throw InvalidArgument("truncated_poly_k requires k >= 2");
  AlgebraSpec<Real> E;
  E.label = "truncated_poly_" + std::to_string(k);
  for (int i = 0; i < k; ++i) {
    ComplexMatrix<Real> L = ComplexMatrix<Real>::Zero(k, k);
    for (int j = 0; i + j < k; ++j) L(i + j, j) = 1;
    E.left.push_back(L);
  }
  E.unit = ComplexVector<Real>::Unit(k, 0);
  E.weights = Eigen::Matrix<Real, Eigen::Dynamic, 1>::Ones(k);
  return E;
}

/// C[eps]/(eps^2).
template <typename Real = double>
AlgebraSpec<Real> dual_numbers() {
  auto E = truncated_poly_algebra<Real>(2);
  E.label = "dual_numbers";
  return E;
}

/// Group algebra of Z_n, basis 1, g, ..., g^{n-1}.
template <typename Real = double>
AlgebraSpec<Real> cyclic_group_algebra(int n) {
  if (n < 1) throw InvalidArgument("cyclic_group_n requires n >= 1");
  AlgebraSpec<Real> E;
  E.label = "cyclic_group_" + std::to_string(n);
  for (int i = 0; i < n; ++i) {
    ComplexMatrix<Real> L = ComplexMatrix<Real>::Zero(n, n);
    for (int j = 0; j < n; ++j) L((i + j) % n, j) = 1;
    E.left.push_back(L);
  }
  E.unit = ComplexVector<Real>::Unit(n, 0);
  E.weights = Eigen::Matrix<Real, Eigen::Dynamic, 1>::Ones(n);
  return E;
}

enum class PresetKind { pointwise, dual_numbers, truncated_poly, cyclic_group };

/// Preset lookup by name: "pointwise_<n>", "complex", "dual_numbers",
/// "truncated_poly_<k>", "cyclic_group_<n>".
template <typename Real = double>
AlgebraSpec<Real> preset_algebra(PresetKind kind, int param = 0) {
  switch (kind) {
    case PresetKind::pointwise: return pointwise_algebra<Real>(param);
    case PresetKind::dual_numbers: return dual_numbers<Real>();
    case PresetKind::truncated_poly: return truncated_poly_algebra<Real>(param);
    case PresetKind::cyclic_group: return cyclic_group_algebra<Real>(param);
  }
  throw InvalidArgument("unknown preset kind");
}

template <typename Real = double>
AlgebraSpec<Real> preset_algebra(const std::string& name) {
  auto suffix = [&](const std::string& prefix) -> int {
    const std::string rest = name.substr(prefix.size());
    if (rest.empty() || !std::all_of(rest.begin(), rest.end(), ::isdigit))
      throw InvalidArgument("invalid preset parameter in '" + name + "'");
    return std::stoi(rest);
  };
  if (name == "complex") return complex_field<Real>();
  if (name == "dual_numbers") return dual_numbers<Real>();
  if (name.rfind("pointwise_", 0) == 0) return pointwise_algebra<Real>(suffix("pointwise_"));
  if (name.rfind("truncated_poly_", 0) == 0) return truncated_poly_algebra<Real>(suffix("truncated_poly_"));
  if (name.rfind("cyclic_group_", 0) == 0) return cyclic_group_algebra<Real>(suffix("cyclic_group_"));
  throw InvalidArgument("unknown algebra preset '" + name + "'");
}

}  // namespace shilov
