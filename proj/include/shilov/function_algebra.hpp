#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shilov/algebra.hpp"
#include "shilov/gelfand.hpp"
#include "shilov/spaces.hpp"

namespace shilov {

using Algebra = AlgebraSpec<double>;

struct NormTag {
  enum class Kind { sup, lipschitz };
  Kind kind = Kind::sup;
  double alpha = 1.0;

  static NormTag sup() { return {}; }
  static NormTag lipschitz(double alpha) { return {Kind::lipschitz, alpha}; }
};

/// Values of an E-valued function on X: row x holds the coordinates of f(x).
using ValueTable = MatrixXc;

/// A finite-dimensional space of E-valued functions on a finite space.
/// The basis is stored flattened: column j is the table of the j-th basis
/// function, row x * dim(E) + k its e_k coordinate at point x.
struct FunctionSystem {
  FiniteSpace space;
  Algebra scalars;
  MatrixXc basis;
  NormTag norm;
  bool closed = false;
  std::string label;

  Index points() const { return space.size(); }
  Index fiber_dim() const { return scalars.dim(); }
  Index dim() const { return basis.cols(); }

  ValueTable table(Index j) const { return unflatten(basis.col(j)); }
  ValueTable combine(const VectorXc& coeffs) const { return unflatten(basis * coeffs); }
  VectorXc flatten(const ValueTable& t) const;
  ValueTable unflatten(const VectorXc& v) const;
};

/// Builds a system from tables, keeping the linearly independent ones in
/// order (relative tolerance 1e-10). Throws InvalidArgument when the span
/// misses the constant 1_E, or a Lipschitz norm is requested without a
/// distance on X.
FunctionSystem make_system(FiniteSpace X, Algebra E, const std::vector<ValueTable>& tables,
                           NormTag norm = NormTag::sup(), bool closed = false,
                           std::string label = {});

ValueTable constant_table(const FiniteSpace& X, const Algebra& E, const VectorXc& value);
ValueTable pointwise_product(const Algebra& E, const ValueTable& f, const ValueTable& g);

VectorXc evaluate(const FunctionSystem& S, const VectorXc& coeffs, Index x);
VectorXc evaluate(const FunctionSystem& S, const VectorXc& coeffs, const std::string& point);

double sup_norm(const Algebra& E, const ValueTable& f);
double lipschitz_seminorm(const FiniteSpace& X, const Algebra& E, const ValueTable& f, double alpha);
double lipschitz_norm(const FiniteSpace& X, const Algebra& E, const ValueTable& f, double alpha);
/// The norm selected by S.norm.
double system_norm(const FunctionSystem& S, const ValueTable& f);

/// Least-squares coefficients of f in the span of S; nullopt when the
/// residual exceeds 1e-8 * max(1, |f|).
std::optional<VectorXc> span_membership(const FunctionSystem& S, const ValueTable& f);

/// Smallest multiplicatively closed span containing S (pairwise products
/// appended in lexicographic order until nothing new appears).
FunctionSystem close_under_products(const FunctionSystem& S);
/// True when every product of two basis functions lies in the span.
bool products_in_span(const FunctionSystem& S);

FunctionSystem make_CXE(const FiniteSpace& X, const Algebra& E);
FunctionSystem make_lip(const FiniteSpace& X, const Algebra& E, double alpha);
/// span{ z^k e_j : 0 <= k <= degree }.
FunctionSystem make_poly(const FiniteSpace& X, const Algebra& E, int degree);
/// make_poly plus (z - c)^(-k) e_j for every pole c and 1 <= k <= degree.
FunctionSystem make_rational(const FiniteSpace& X, const Algebra& E, int degree, const std::vector<cplx>& poles);

/// span{ b e_k } for b in the scalar system B.
FunctionSystem span_BE(const FunctionSystem& B, const Algebra& E);

/// Structure constants of a closed system in its own basis. Weights are
/// uniform and large enough to make the coordinate norm submultiplicative.
Algebra as_algebra(const FunctionSystem& S);

bool separation_check(const FunctionSystem& S);

/// Largest observed |f|_X / |f|_S over the constant 1_E, the basis and
/// `samples` random coefficient vectors: a lower bound for the embedding
/// constant M. Exactly 1 for sup-norm systems.
double embedding_constant(const FunctionSystem& S, std::uint64_t seed = 0x1e5e'd0c0ULL, int samples = 10000);

/// Rows ordered (psi, x) with psi major: row psi * |X| + x holds
/// psi(f_j(x)) for every basis function f_j.
MatrixXc gelfand_matrix(const FunctionSystem& S, const std::vector<Character<double>>& chars);

struct Quadruple {
  std::string label;
  FiniteSpace space;
  Algebra scalars;          // E
  FunctionSystem scalar;    // B over C
  FunctionSystem vector;    // B~ over E
};

/// One ValidationReport check per condition "(1)".."(6)" plus notes.
ValidationReport check_admissible(const Quadruple& Q);

struct PiCharacter {
  Index psi;    // index into characters(E)
  Index point;  // index into X
  Character<double> functional;  // values on the B~ basis
};

std::vector<PiCharacter> build_pi(const Quadruple& Q);
bool check_pi_injective(const Quadruple& Q);
bool check_natural(const Quadruple& Q);

}  // namespace shilov
