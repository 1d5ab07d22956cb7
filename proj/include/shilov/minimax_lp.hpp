#pragma once

#include <limits>

#include "shilov/types.hpp"

namespace shilov {

struct MinimaxOptions {
  /// Sides of the polygon replacing each modulus (>= 8).
  int sides = 32;
  /// Refinement stops once upper - lower <= gap * max(1, upper).
  double gap = 1e-9;
  /// Simplex pivot budget for the refinement phase; 0 picks one from the size.
  int max_refine_pivots = 0;
  /// Refinement also stops as soon as upper < stop_below or lower >= stop_above.
  double stop_below = -std::numeric_limits<double>::infinity();
  double stop_above = std::numeric_limits<double>::infinity();
};

struct MinimaxResult {
  /// Optimum of the polygon linear program and the true maximum modulus at
  /// its solution: polygon_lower <= optimum <= polygon_upper
  /// <= polygon_lower * sec(pi / sides).
  double polygon_lower = 0;
  double polygon_upper = 0;
  VectorXc polygon_z;
  /// Bracket after tangent-cut refinement; upper is attained at z.
  double lower = 0;
  double upper = 0;
  VectorXc z;
  int pivots = 0;
  bool converged = false;
};

/// Minimizes max_k |a_k + b_k z| over z in C^q, where b_k is row k of b.
///
/// The polygon program min t s.t. Re(exp(-i theta_j) (a_k + b_k z)) <= t is
/// solved through its dual by a revised simplex whose columns are priced on
/// demand, inside a box large enough to contain every minimizer. The
/// refinement continues the same simplex with exact tangent cuts
/// theta = arg(a_k + b_k z), so every basis yields a valid lower bound and
/// every multiplier vector z a valid upper bound.
MinimaxResult solve_minimax(const VectorXc& a, const MatrixXc& b, const MinimaxOptions& options = {});

}  // namespace shilov
