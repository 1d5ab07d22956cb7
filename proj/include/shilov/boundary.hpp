#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shilov/function_algebra.hpp"
#include "shilov/minimax_lp.hpp"

namespace shilov {

/// Gelfand values of a finite witness span on a finite candidate set:
/// values(phi, j) = g_j^(phi).
struct WitnessFamily {
  std::vector<std::string> candidates;
  MatrixXc values;
  std::string label;
  /// Source basis index of each column (columns dropped as dependent are absent).
  std::vector<Index> columns;

  Index size() const { return values.rows(); }
};

/// Keeps a linearly independent set of columns (relative tolerance 1e-10).
WitnessFamily make_witness_family(std::vector<std::string> candidates, const MatrixXc& values,
                                  std::string label = {});
/// Candidates M(E) x X in (psi, x) order with psi major, witnesses the basis of S.
WitnessFamily witness_family(const FunctionSystem& S);
/// Candidates M(E), witnesses the basis of E.
WitnessFamily algebra_witnesses(const Algebra& E);

enum class PeakStatus { certified_peak, certified_not_peak, undecided };
std::string to_string(PeakStatus s);

struct CertifyOptions {
  int sides = 32;
  double tol = 1e-4;
  /// Stop refining once the status is decided.
  bool early_stop = true;
};

struct PeakCertificate {
  Index target = 0;
  PeakStatus status = PeakStatus::undecided;
  /// Witness a = sum_j coefficients(j) g_j with a^(target) = 1.
  VectorXc coefficients;
  /// 1 - max off-target modulus of a, evaluated directly.
  double separation = 0;
  /// Polygon program bracket on the minimax optimum.
  double lp_lower = 0;
  double lp_upper = 0;
  /// Bracket after refinement.
  double lower = 0;
  double upper = 0;
};

/// Minimizes max_{phi != target} |a^(phi)| subject to a^(target) = 1 over
/// the witness span. certified_peak when the witness found has off-target
/// moduli below 1 - tol; certified_not_peak when the lower bound reaches
/// 1 - tol * 1e-2. Families are split into blocks by their exact zero
/// pattern first; only the target's block enters the program.
PeakCertificate certify_peak(const WitnessFamily& W, Index target, const CertifyOptions& options = {});

struct ShilovEstimate {
  std::vector<PeakCertificate> certificates;
  std::vector<Index> peaks;
  std::vector<Index> not_peaks;
  std::vector<Index> undecided;
};

ShilovEstimate shilov_estimate(const WitnessFamily& W, const CertifyOptions& options = {});

inline constexpr std::uint64_t kBoundarySeed = 0xb0a2'd5ee'd000'0001ULL;

struct BoundaryCheck {
  bool holds = true;
  /// Violating coefficient vector when !holds.
  VectorXc counterexample;
  double worst_ratio = 1;
  std::uint64_t seed = kBoundarySeed;
  int samples = 0;
};

/// F is a boundary for the witness span: on every basis column and on
/// `samples` random coefficient vectors the maximum modulus over F is at
/// least (1 - 1e-9) times the maximum over all candidates.
BoundaryCheck is_boundary(const WitnessFamily& W, const std::vector<Index>& F,
                          std::uint64_t seed = kBoundarySeed, int samples = 1000);

struct ProductPeaker {
  ValueTable g;
  /// Coefficients of g in the basis of B~.
  VectorXc coefficients;
  bool in_span = false;
  /// g^(psi, y) in (psi, y) order, psi major.
  VectorXc gelfand_values;
  /// max |g^(psi, y) - f(y) psi(v)|.
  double law_residual = 0;
  double max_modulus = 0;
  std::vector<Index> argmax;
};

/// g = v f for v in E with |v^|_max = 1 and f in B with sup |f| = 1.
/// Throws InvalidArgument when either normalization is off by more than 1e-9.
ProductPeaker synthesize_product_peaker(const VectorXc& v, const ValueTable& f, const Quadruple& Q);

/// Indices where |values| is within 1e-9 of its maximum.
std::vector<Index> argmax_set(const VectorXc& values, double tol = 1e-9);

enum class Regime { exact, estimation };
std::string to_string(Regime r);

struct ProductReport {
  std::string theorem;
  std::string quadruple;
  Regime regime = Regime::exact;
  bool preconditions_ok = true;
  std::vector<std::string> notes;
  /// Candidate labels of the product family, (psi, x) order.
  std::vector<std::string> candidates;
  std::vector<Index> set_E;        // indices into M(E)
  std::vector<Index> set_B;        // indices into X
  std::vector<Index> certified;    // indices into candidates
  std::vector<Index> expected;     // pi(set_E x set_B)
  std::vector<Index> missing;      // expected, not certified
  std::vector<Index> extra;        // certified, not expected
  std::vector<Index> undecided;
  /// Certified product set is a boundary, which forces Gamma = S0.
  bool gamma_equals_s0 = false;
  double coverage = 0;  // |certified & expected| / |expected|
  bool passed = false;
};

/// Compares the certified boundary of B~ with pi(Gamma(E) x Gamma(B)).
/// Exact regime: full algebras as witnesses, expects equality. Estimation
/// regime: witnesses are the basis of B and span(B.E); expects containment
/// and reports coverage.
ProductReport verify_product_theorem(const Quadruple& Q, Regime regime, const CertifyOptions& options = {});
/// Same comparison for peak-point sets S0(B~) against S0(E) x S0(B).
ProductReport verify_peak_product(const Quadruple& Q, Regime regime, const CertifyOptions& options = {});

}  // namespace shilov
