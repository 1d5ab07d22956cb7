#pragma once

// Generators shared by the property tests.

#include <random>

#include "shilov/algebra.hpp"

namespace shilov::testing {

inline cplx random_complex(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  return {g(rng), g(rng)};
}

inline VectorXc random_vector(std::mt19937_64& rng, Index n, double scale = 1.0) {
  VectorXc v(n);
  for (Index i = 0; i < n; ++i) v(i) = random_complex(rng, scale);
  return v;
}

/// Weights making ||e_i e_j|| <= w_i w_j hold for a uniform weight s.
template <typename Real>
void reweight_submultiplicative(AlgebraSpec<Real>& E) {
  Real s = 1;
  for (Index i = 0; i < E.dim(); ++i)
    for (Index j = 0; j < E.dim(); ++j) s = std::max(s, E.left[i].col(j).cwiseAbs().sum());
  E.weights = Eigen::Matrix<Real, Eigen::Dynamic, 1>::Constant(E.dim(), s);
}

/// Direct product E1 x E2 with block-diagonal structure.
inline AlgebraSpec<double> direct_product(const AlgebraSpec<double>& A, const AlgebraSpec<double>& B) {
  const Index n = A.dim() + B.dim();
  AlgebraSpec<double> E;
  E.label = A.label + "x" + B.label;
  for (Index i = 0; i < n; ++i) {
    MatrixXc L = MatrixXc::Zero(n, n);
    if (i < A.dim())
      L.topLeftCorner(A.dim(), A.dim()) = A.left[i];
    else
      L.bottomRightCorner(B.dim(), B.dim()) = B.left[i - A.dim()];
    E.left.push_back(L);
  }
  E.unit.resize(n);
  E.unit << A.unit, B.unit;
  E.weights.resize(n);
  E.weights << A.weights, B.weights;
  return E;
}

/// Same algebra in a random basis f_i = sum_k P(k,i) e_k.
inline AlgebraSpec<double> random_basis_change(const AlgebraSpec<double>& E, std::mt19937_64& rng) {
  const Index n = E.dim();
  MatrixXc P = MatrixXc::Identity(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) P(i, j) += random_complex(rng, 0.3);
  const MatrixXc Pinv = P.inverse();
  AlgebraSpec<double> F;
  F.label = E.label + "_rebased";
  for (Index i = 0; i < n; ++i) {
    MatrixXc L = MatrixXc::Zero(n, n);
    for (Index k = 0; k < n; ++k) L += P(k, i) * E.left[k];
    F.left.push_back(Pinv * L * P);
  }
  F.unit = Pinv * E.unit;
  reweight_submultiplicative(F);
  return F;
}

/// A random validated algebra: product of one or two presets in a random basis.
inline AlgebraSpec<double> random_algebra(std::mt19937_64& rng) {
  const char* names[] = {"complex",          "pointwise_2",      "dual_numbers",
                         "truncated_poly_3", "cyclic_group_3",   "truncated_poly_4"};
  std::uniform_int_distribution<int> pick(0, 5), coin(0, 1);
  AlgebraSpec<double> E = preset_algebra<double>(names[pick(rng)]);
  if (coin(rng)) E = direct_product(E, preset_algebra<double>(names[pick(rng)]));
  return random_basis_change(E, rng);
}

}  // namespace shilov::testing
