#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "shilov/algebra.hpp"
#include "shilov/linalg.hpp"

namespace shilov {

/// A linear functional given by its values on the basis, chi(e_i).
template <typename Real = double>
struct Character {
  ComplexVector<Real> values;
  std::string label;

  template <typename Derived>
  std::complex<Real> operator()(const Eigen::MatrixBase<Derived>& a) const {
    return (values.transpose() * a.template cast<std::complex<Real>>())(0, 0);
  }
};

inline constexpr std::uint64_t kDefaultCharacterSeed = 0x5eed'c4a2'0001ULL;
inline constexpr double kCharacterDedupTol = 1e-6;

/// Pass/fail per character invariant: multiplicativity on basis pairs,
/// unitality, and |chi(e_i)| <= w_i (equivalent to |chi(a)| <= ||a|| for
/// the weighted l1 norm).
template <typename Real>
ValidationReport verify_character(const AlgebraSpec<Real>& E, const Character<Real>& chi) {
  ValidationReport rep;
  rep.subject = "character " + chi.label + " on " + E.label;
  if (chi.values.size() != E.dim()) {
    rep.add("shape", false, 0.0, "value vector has wrong length");
    return rep;
  }
  const double scale = static_cast<double>(detail::structure_scale(E));
  double worst = 0;
  std::string where;
  for (Index i = 0; i < E.dim(); ++i)
    for (Index j = i; j < E.dim(); ++j) {
      const auto lhs = chi.values(i) * chi.values(j);
      const auto rhs = E.left[i].col(j).transpose() * chi.values;
      const double r = static_cast<double>(std::abs(lhs - rhs(0, 0)));
      if (r > worst) {
        worst = r;
        where = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
      }
    }
  const bool mult_ok = worst <= 1e-8 * scale;
  rep.add("multiplicative", mult_ok, worst, mult_ok ? "" : "fails at " + where);

  const auto at_unit = (E.unit.transpose() * chi.values)(0, 0);
  const double unit_res = static_cast<double>(std::abs(at_unit - std::complex<Real>(1)));
  rep.add("unital", unit_res <= 1e-8, unit_res, unit_res <= 1e-8 ? "" : "chi(1) != 1");

  double excess = 0;
  where.clear();
  for (Index i = 0; i < E.dim(); ++i) {
    const double e = static_cast<double>(std::abs(chi.values(i)) - E.weights(i));
    if (e > 1e-8 * std::max(1.0, static_cast<double>(E.weights(i))) && e > excess) {
      excess = e;
      where = "basis " + std::to_string(i);
    }
  }
  rep.add("bounded", where.empty(), excess, where.empty() ? "" : "|chi(e_i)| > w_i at " + where);
  return rep;
}

namespace detail {

template <typename Real>
Real snap(Real x) {
  const Real r = std::round(x * Real(1e12)) / Real(1e12);
  return r == Real(0) ? Real(0) : r;
}

template <typename Real>
bool lex_less(const ComplexVector<Real>& a, const ComplexVector<Real>& b) {
  for (Index i = 0; i < a.size(); ++i) {
    if (std::abs(a(i).real() - b(i).real()) > Real(1e-9)) return a(i).real() < b(i).real();
    if (std::abs(a(i).imag() - b(i).imag()) > Real(1e-9)) return a(i).imag() < b(i).imag();
  }
  return false;
}

// One triangularization attempt. Clusters of the diagonal are tried from the
// coarsest tolerance down; a cluster whose averaged diagonal tuple is not a
// character mixes distinct characters and is split at the next level. Returns
// false when even the finest clusters fail (the combination did not separate).
template <typename Real>
bool try_characters(const AlgebraSpec<Real>& E, std::uint64_t seed,
                    std::vector<Character<Real>>& out) {
  const Index n = E.dim();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  ComplexMatrix<Real> L = ComplexMatrix<Real>::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    L += std::complex<Real>(Real(gauss(rng)), Real(gauss(rng))) * E.left[i];

  const Real scale = std::max(Real(1), L.cwiseAbs().maxCoeff());
  std::vector<Real> tolerances;
  for (Real t = Real(1e-1); t >= Real(1e-7); t /= 10) tolerances.push_back(t * scale);
  const auto cs = clustered_schur<Real>(L, tolerances);

  std::vector<ComplexMatrix<Real>> S;
  S.reserve(n);
  for (Index j = 0; j < n; ++j) S.push_back(cs.Q.adjoint() * E.left[j] * cs.Q);

  auto candidate = [&](Index b, Index e) {
    Character<Real> chi;
    chi.values.resize(n);
    for (Index j = 0; j < n; ++j) {
      std::complex<Real> tr = 0;
      for (Index p = b; p < e; ++p) tr += S[j](p, p);
      tr /= Real(e - b);
      chi.values(j) = {snap(tr.real()), snap(tr.imag())};
    }
    return chi;
  };

  out.clear();
  bool ok = true;
  auto descend = [&](auto&& self, std::size_t level, Index b, Index e) -> void {
    for (auto [rb, re] : cs.runs(level, b, e)) {
      auto chi = candidate(rb, re);
      if (verify_character(E, chi).passed()) {
        bool duplicate = false;
        for (const auto& c : out)
          if ((c.values - chi.values).cwiseAbs().maxCoeff() < Real(kCharacterDedupTol)) duplicate = true;
        if (!duplicate) out.push_back(std::move(chi));
      } else if (level + 1 < cs.keys.size()) {
        self(self, level + 1, rb, re);
      } else {
        ok = false;
      }
    }
  };
  descend(descend, 0, 0, n);
  return ok && !out.empty();
}

}  // namespace detail

/// The character space M(E): joint eigenvalue tuples of the commuting
/// left-multiplication matrices, read off the diagonal of one unitary
/// triangularization of a random combination. Sorted in decreasing
/// lexicographic order of (re, im) over the value vectors, so the idempotent
/// basis of C^n yields the identity character matrix.
template <typename Real>
std::vector<Character<Real>> characters(const AlgebraSpec<Real>& E,
                                        std::uint64_t seed = kDefaultCharacterSeed) {
  std::vector<Character<Real>> chars;
  std::uint64_t s = seed;
  bool ok = false;
  for (int attempt = 0; attempt < 6 && !ok; ++attempt, s = s * 6364136223846793005ULL + 1442695040888963407ULL)
    ok = detail::try_characters(E, s, chars);
  if (!ok) throw GenericityFailure("could not separate the characters of " + E.label);
  std::sort(chars.begin(), chars.end(),
            [](const auto& a, const auto& b) { return detail::lex_less(b.values, a.values); });
  for (std::size_t k = 0; k < chars.size(); ++k) chars[k].label = "chi" + std::to_string(k + 1);
  return chars;
}

/// Rows are characters, columns basis vectors: (C a)_k = chi_k(a).
template <typename Real>
ComplexMatrix<Real> character_matrix(const std::vector<Character<Real>>& chars, Index dim) {
  ComplexMatrix<Real> C(static_cast<Index>(chars.size()), dim);
  for (std::size_t k = 0; k < chars.size(); ++k) C.row(static_cast<Index>(k)) = chars[k].values.transpose();
  return C;
}

template <typename Real, typename Derived>
ComplexVector<Real> gelfand_transform(const AlgebraSpec<Real>& E,
                                      const std::vector<Character<Real>>& chars,
                                      const Eigen::MatrixBase<Derived>& a) {
  detail::require_dim(E, a.size(), "gelfand_transform");
  return character_matrix(chars, E.dim()) * a;
}

template <typename Real, typename Derived>
ComplexVector<Real> gelfand_transform(const AlgebraSpec<Real>& E, const Eigen::MatrixBase<Derived>& a) {
  return gelfand_transform(E, characters(E), a);
}

/// Uniform norm of the Gelfand transform over M(E) (the spectral radius).
template <typename Real, typename Derived>
Real gelfand_norm(const AlgebraSpec<Real>& E, const std::vector<Character<Real>>& chars,
                  const Eigen::MatrixBase<Derived>& a) {
  return gelfand_transform(E, chars, a).cwiseAbs().maxCoeff();
}

template <typename Real, typename Derived>
Real gelfand_norm(const AlgebraSpec<Real>& E, const Eigen::MatrixBase<Derived>& a) {
  return gelfand_norm(E, characters(E), a);
}

/// Jacobson radical: basis of the common kernel of all characters.
template <typename Real>
std::vector<ComplexVector<Real>> radical(const AlgebraSpec<Real>& E,
                                         const std::vector<Character<Real>>& chars) {
  const ComplexMatrix<Real> N = null_space(character_matrix(chars, E.dim()), Real(1e-10));
  std::vector<ComplexVector<Real>> basis;
  for (Index j = 0; j < N.cols(); ++j) basis.push_back(N.col(j));
  return basis;
}

template <typename Real>
std::vector<ComplexVector<Real>> radical(const AlgebraSpec<Real>& E) {
  return radical(E, characters(E));
}

template <typename Real>
struct SemisimpleQuotient {
  AlgebraSpec<Real> algebra;         // pointwise algebra on |M(E)| coordinates
  ComplexMatrix<Real> projection;    // a -> a^, surjective unital homomorphism
};

template <typename Real>
SemisimpleQuotient<Real> semisimple_quotient(const AlgebraSpec<Real>& E,
                                             const std::vector<Character<Real>>& chars) {
  SemisimpleQuotient<Real> q;
  q.algebra = pointwise_algebra<Real>(static_cast<int>(chars.size()));
  q.algebra.label = E.label + "/rad";
  q.projection = character_matrix(chars, E.dim());
  return q;
}

template <typename Real>
SemisimpleQuotient<Real> semisimple_quotient(const AlgebraSpec<Real>& E) {
  return semisimple_quotient(E, characters(E));
}

}  // namespace shilov
