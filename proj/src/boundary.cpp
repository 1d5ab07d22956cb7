#include "shilov/boundary.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include <Eigen/QR>

#include "shilov/linalg.hpp"

namespace shilov {

namespace {

// Rows of the witness span grouped so that the span is the direct sum of its
// restrictions to the groups. Two rows share a group when the orthogonal
// projector onto the span couples them. Each group keeps an orthonormal basis
// of its restriction.
struct Block {
  std::vector<Index> rows;
  MatrixXc Q;
  // earlier block with the same projector, whose programs this one reuses
  Index twin = -1;
};

struct PreparedFamily {
  std::vector<Block> blocks;
  std::vector<Index> block_of_row;
  std::vector<Index> local_row;
  // V perm = Q [R 0] for mapping span vectors back to coefficients
  MatrixXc Q;
  MatrixXc R;
  Eigen::VectorXi perm;
};

PreparedFamily prepare(const WitnessFamily& W) {
  const Index n = W.values.rows(), p = W.values.cols();
  PreparedFamily P;
  Eigen::ColPivHouseholderQR<MatrixXc> qr(W.values);
  qr.setThreshold(1e-10);
  const Index rank = p == 0 ? 0 : qr.rank();
  P.Q = qr.householderQ() * MatrixXc::Identity(n, rank);
  P.R = qr.matrixR().topLeftCorner(rank, rank).template triangularView<Eigen::Upper>();
  P.perm = qr.colsPermutation().indices();

  std::vector<Index> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  const MatrixXc proj = P.Q * P.Q.adjoint();
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (std::abs(proj(i, j)) > 1e-11) parent[find(i)] = find(j);

  P.block_of_row.assign(n, -1);
  P.local_row.assign(n, -1);
  std::vector<Index> id_of_root(n, -1);
  for (Index i = 0; i < n; ++i) {
    const Index root = find(i);
    if (id_of_root[root] < 0) {
      id_of_root[root] = static_cast<Index>(P.blocks.size());
      P.blocks.emplace_back();
    }
    Block& b = P.blocks[id_of_root[root]];
    P.block_of_row[i] = id_of_root[root];
    P.local_row[i] = static_cast<Index>(b.rows.size());
    b.rows.push_back(i);
  }
  auto local_projector = [&](const Block& b) {
    MatrixXc out(b.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < b.rows.size(); ++i)
      for (std::size_t j = 0; j < b.rows.size(); ++j) out(i, j) = proj(b.rows[i], b.rows[j]);
    return out;
  };
  for (std::size_t k = 0; k < P.blocks.size(); ++k) {
    Block& b = P.blocks[k];
    const MatrixXc local = local_projector(b);
    for (std::size_t e = 0; e < k && b.twin < 0; ++e) {
      const Block& other = P.blocks[e];
      if (other.twin < 0 && other.rows.size() == b.rows.size() &&
          (local_projector(other) - local).cwiseAbs().maxCoeff() < 1e-12)
        b.twin = static_cast<Index>(e);
    }
    if (b.twin >= 0) continue;
    MatrixXc sub(b.rows.size(), rank);
    for (std::size_t i = 0; i < b.rows.size(); ++i) sub.row(i) = P.Q.row(b.rows[i]);
    Eigen::ColPivHouseholderQR<MatrixXc> bq(sub);
    bq.setThreshold(1e-10);
    const Index br = rank == 0 ? 0 : bq.rank();
    b.Q = bq.householderQ() * MatrixXc::Identity(sub.rows(), br);
  }
  return P;
}

// Nonnegative least squares min |A x - b|, x >= 0 (Lawson and Hanson).
Eigen::VectorXd nonnegative_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const Index m = A.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  std::vector<bool> passive(m, false);
  const double tol = 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff()) * std::max<Index>(1, A.rows());
  auto solve_passive = [&] {
    std::vector<Index> idx;
    for (Index j = 0; j < m; ++j)
      if (passive[j]) idx.push_back(j);
    Eigen::MatrixXd Ap(A.rows(), static_cast<Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(static_cast<Index>(k)) = A.col(idx[k]);
    const Eigen::VectorXd sp = Ap.colPivHouseholderQr().solve(b);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(m);
    for (std::size_t k = 0; k < idx.size(); ++k) s(idx[k]) = sp(static_cast<Index>(k));
    return s;
  };
  for (Index outer = 0; outer < 3 * m; ++outer) {
    const Eigen::VectorXd w = A.transpose() * (b - A * x);
    Index j = -1;
    for (Index k = 0; k < m; ++k)
      if (!passive[k] && w(k) > tol && (j < 0 || w(k) > w(j))) j = k;
    if (j < 0) break;
    passive[j] = true;
    for (Index inner = 0; inner < m; ++inner) {
      const Eigen::VectorXd s = solve_passive();
      double alpha = 1;
      bool feasible = true;
      for (Index k = 0; k < m; ++k)
        if (passive[k] && s(k) <= 0) {
          feasible = false;
          alpha = std::min(alpha, x(k) / (x(k) - s(k)));
        }
      if (feasible) {
        x = s;
        break;
      }
      x += alpha * (s - x);
      for (Index k = 0; k < m; ++k)
        if (passive[k] && x(k) <= tol) {
          passive[k] = false;
          x(k) = 0;
        }
    }
  }
  return x;
}

// Lower bound on max_{i != t} |a_i| over span members with a_t = 1 from a
// nonnegative combination q_t ~ sum mu_i q_i of the block's rows: for such a
// with off-target maximum M < 1, 1 <= |mu|_1 M + |e| |a|_2 and
// |a|_2 <= sqrt(rows).
double measure_lower_bound(const MatrixXc& Qb, Index t) {
  const Index rows = Qb.rows(), k = Qb.cols();
  Eigen::MatrixXd A(2 * k, rows - 1);
  for (Index i = 0, c = 0; i < rows; ++i) {
    if (i == t) continue;
    A.col(c).head(k) = Qb.row(i).transpose().real();
    A.col(c++).tail(k) = Qb.row(i).transpose().imag();
  }
  Eigen::VectorXd b(2 * k);
  b.head(k) = Qb.row(t).transpose().real();
  b.tail(k) = Qb.row(t).transpose().imag();
  const Eigen::VectorXd mu = nonnegative_least_squares(A, b);
  const double mass = mu.sum();
  if (mass <= 0) return 0;
  const double err = (A * mu - b).norm();
  return std::clamp((1 - err * std::sqrt(static_cast<double>(rows))) / mass, 0.0, 1.0);
}

// Optimal witness restricted to one block, as values on the block's rows.
struct BlockSolution {
  VectorXc values;
  bool solved = false;
  bool trivial = false;
  double lp_lower = 1, lp_upper = 1, lower = 1, upper = 1;
};

BlockSolution solve_block(const Block& blk, Index ti, const CertifyOptions& options) {
  BlockSolution sol;
  sol.solved = true;
  const Index rank = blk.Q.cols();
  const VectorXc v = rank == 0 ? VectorXc() : VectorXc(blk.Q.row(ti).adjoint());
  if (rank == 0 || v.squaredNorm() < 1e-28) {
    sol.trivial = true;
    return sol;
  }

  // u = c0 + N z with v^* u = 1
  const VectorXc c0 = v / v.squaredNorm();
  MatrixXc N(rank, rank - 1);
  if (rank > 1) {
    Eigen::HouseholderQR<MatrixXc> h(v);
    N = (h.householderQ() * MatrixXc::Identity(rank, rank)).rightCols(rank - 1);
  }
  const Index off = static_cast<Index>(blk.rows.size()) - 1;
  MatrixXc Qoff(off, rank);
  for (Index i = 0, k = 0; i < static_cast<Index>(blk.rows.size()); ++i)
    if (i != ti) Qoff.row(k++) = blk.Q.row(i);
  const VectorXc a = Qoff * c0;

  if (options.early_stop && off > 0) {
    const double bound = measure_lower_bound(blk.Q, ti);
    if (bound >= 1 - options.tol * 1e-2) {
      sol.values = blk.Q * c0;
      sol.lp_lower = sol.lower = bound;
      sol.lp_upper = sol.upper = a.cwiseAbs().maxCoeff();
      return sol;
    }
  }

  MinimaxOptions mo;
  mo.sides = options.sides;
  if (options.early_stop) {
    mo.stop_below = 1 - options.tol;
    mo.stop_above = 1 - options.tol * 1e-2;
  }
  const MinimaxResult res = solve_minimax(a, Qoff * N, mo);
  sol.values = blk.Q * (c0 + N * res.z);
  sol.lp_lower = res.polygon_lower;
  sol.lp_upper = res.polygon_upper;
  sol.lower = res.lower;
  sol.upper = res.upper;
  return sol;
}

// Solutions per (block, local row), shared between twin blocks.
using SolutionCache = std::vector<std::vector<BlockSolution>>;

PeakCertificate certify_prepared(const WitnessFamily& W, const PreparedFamily& P, Index target,
                                 const CertifyOptions& options, SolutionCache& cache) {
  Index bi = P.block_of_row[target];
  if (P.blocks[bi].twin >= 0) bi = P.blocks[bi].twin;
  const Block& blk = P.blocks[bi];
  const Index ti = P.local_row[target];
  if (cache.empty()) cache.resize(P.blocks.size());
  if (cache[bi].empty()) cache[bi].resize(blk.rows.size());
  if (!cache[bi][ti].solved) cache[bi][ti] = solve_block(blk, ti, options);
  const BlockSolution& sol = cache[bi][ti];

  PeakCertificate c;
  c.target = target;
  if (sol.trivial) {
    c.status = PeakStatus::certified_not_peak;
    c.coefficients = VectorXc::Zero(W.values.cols());
    c.lp_lower = c.lp_upper = c.lower = c.upper = 1;
    return c;
  }

  // block values extended by zero, then back to the caller's columns
  const auto& rows = P.blocks[P.block_of_row[target]].rows;
  VectorXc g = VectorXc::Zero(W.values.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) g(rows[i]) = sol.values(static_cast<Index>(i));
  const VectorXc cr = P.R.triangularView<Eigen::Upper>().solve(P.Q.adjoint() * g);
  VectorXc coeffs = VectorXc::Zero(W.values.cols());
  for (Index j = 0; j < cr.size(); ++j) coeffs(P.perm(j)) = cr(j);
  VectorXc vals = W.values * coeffs;
  coeffs /= vals(target);
  vals = W.values * coeffs;
  double off_max = 0;
  for (Index i = 0; i < vals.size(); ++i)
    if (i != target) off_max = std::max(off_max, std::abs(vals(i)));

  c.coefficients = coeffs;
  c.separation = 1 - off_max;
  c.lp_lower = sol.lp_lower;
  c.lp_upper = sol.lp_upper;
  c.lower = sol.lower;
  c.upper = sol.upper;
  if (off_max < 1 - options.tol && std::abs(vals(target) - 1.0) <= 1e-9)
    c.status = PeakStatus::certified_peak;
  else if (sol.lower >= 1 - options.tol * 1e-2)
    c.status = PeakStatus::certified_not_peak;
  else
    c.status = PeakStatus::undecided;
  return c;
}

std::vector<Index> set_minus(const std::vector<Index>& a, const std::vector<Index>& b) {
  std::vector<Index> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Re-evaluates a certificate from the family alone.
bool reverifies(const WitnessFamily& W, const PeakCertificate& c) {
  if (c.status != PeakStatus::certified_peak) return false;
  const VectorXc vals = W.values * c.coefficients;
  if (std::abs(vals(c.target) - 1.0) > 1e-9) return false;
  for (Index i = 0; i < vals.size(); ++i)
    if (i != c.target && std::abs(vals(i)) > 1 - c.separation + 1e-12) return false;
  return c.separation > 0;
}

ProductReport product_check(const Quadruple& Q, Regime regime, const CertifyOptions& options, bool peaks) {
  ProductReport rep;
  rep.theorem = peaks ? "S0(B~) = S0(E) x S0(B)" : "Gamma(B~) = pi(Gamma(E) x Gamma(B))";
  rep.quadruple = Q.label;
  rep.regime = regime;

  if (regime == Regime::exact) {
    const auto adm = check_admissible(Q);
    for (const auto& c : adm.checks)
      if (!c.passed) {
        rep.preconditions_ok = false;
        rep.notes.push_back("admissibility " + c.name + " failed" + (c.detail.empty() ? "" : ": " + c.detail));
      }
    if (rep.preconditions_ok && !check_natural(Q)) {
      rep.preconditions_ok = false;
      rep.notes.push_back("quadruple is not natural");
    }
    if (!rep.preconditions_ok) return rep;
    rep.notes.push_back("evaluation continuity holds automatically in finite dimension");
  } else {
    if (Q.scalar.fiber_dim() != 1 || Q.scalar.space.labels != Q.space.labels) {
      rep.preconditions_ok = false;
      rep.notes.push_back("scalar witness system must be C-valued on X");
      return rep;
    }
    rep.notes.push_back("admissibility not checked: witness spans are degree-capped truncations");
  }

  const auto estE = shilov_estimate(algebra_witnesses(Q.scalars), options);
  const WitnessFamily WB = witness_family(Q.scalar);
  const auto estB = shilov_estimate(WB, options);
  const FunctionSystem Bt = regime == Regime::exact ? Q.vector : span_BE(Q.scalar, Q.scalars);
  const WitnessFamily WBt = witness_family(Bt);
  const auto estBt = shilov_estimate(WBt, options);

  auto peak_set = [&](const WitnessFamily& W, const ShilovEstimate& est) {
    if (!peaks) return est.peaks;
    std::vector<Index> s;
    for (Index i : est.peaks)
      if (reverifies(W, est.certificates[i])) s.push_back(i);
    return s;
  };
  rep.set_E = peak_set(algebra_witnesses(Q.scalars), estE);
  rep.set_B = peak_set(WB, estB);
  rep.certified = peak_set(WBt, estBt);
  rep.undecided = estBt.undecided;
  rep.candidates = WBt.candidates;
  if (!estE.undecided.empty()) rep.notes.push_back(std::to_string(estE.undecided.size()) + " characters of E undecided");
  if (!estB.undecided.empty()) rep.notes.push_back(std::to_string(estB.undecided.size()) + " points of B undecided");

  const Index X = Q.space.size();
  for (Index p : rep.set_E)
    for (Index x : rep.set_B) rep.expected.push_back(p * X + x);
  std::sort(rep.expected.begin(), rep.expected.end());
  rep.missing = set_minus(rep.expected, rep.certified);
  rep.extra = set_minus(rep.certified, rep.expected);
  rep.coverage = rep.expected.empty()
                     ? 1.0
                     : 1.0 - static_cast<double>(rep.missing.size()) / static_cast<double>(rep.expected.size());
  rep.gamma_equals_s0 = !rep.certified.empty() && is_boundary(WBt, rep.certified).holds;
  if (regime == Regime::exact) {
    rep.passed = rep.missing.empty() && rep.extra.empty() && rep.undecided.empty() && rep.gamma_equals_s0;
    if (peaks) rep.notes.push_back(rep.gamma_equals_s0 ? "peak sets agree with the Shilov boundary check"
                                                       : "peak sets do not form a boundary");
  } else {
    rep.passed = rep.extra.empty();
  }
  return rep;
}

}  // namespace

WitnessFamily make_witness_family(std::vector<std::string> candidates, const MatrixXc& values, std::string label) {
  if (static_cast<Index>(candidates.size()) != values.rows())
    throw DimensionMismatch("witness family: one label per candidate row");
  WitnessFamily W;
  W.candidates = std::move(candidates);
  W.label = std::move(label);
  W.columns = independent_columns(values, 1e-10);
  W.values.resize(values.rows(), static_cast<Index>(W.columns.size()));
  for (std::size_t j = 0; j < W.columns.size(); ++j) W.values.col(static_cast<Index>(j)) = values.col(W.columns[j]);
  return W;
}

WitnessFamily witness_family(const FunctionSystem& S) {
  const auto chars = characters(S.scalars);
  std::vector<std::string> labels;
  for (const auto& chi : chars)
    for (const auto& x : S.space.labels) labels.push_back(S.fiber_dim() == 1 ? x : chi.label + "@" + x);
  return make_witness_family(std::move(labels), gelfand_matrix(S, chars), S.label);
}

WitnessFamily algebra_witnesses(const Algebra& E) {
  const auto chars = characters(E);
  std::vector<std::string> labels;
  for (const auto& chi : chars) labels.push_back(chi.label);
  return make_witness_family(std::move(labels), character_matrix(chars, E.dim()), E.label);
}

std::string to_string(PeakStatus s) {
  switch (s) {
    case PeakStatus::certified_peak: return "certified_peak";
    case PeakStatus::certified_not_peak: return "certified_not_peak";
    default: return "undecided";
  }
}

std::string to_string(Regime r) { return r == Regime::exact ? "exact" : "estimation"; }

PeakCertificate certify_peak(const WitnessFamily& W, Index target, const CertifyOptions& options) {
  if (target < 0 || target >= W.size()) throw InvalidArgument("target index out of range");
  if (W.values.cols() == 0) throw InvalidArgument("degenerate witness family");
  if (W.size() < 2) throw InvalidArgument("certification needs at least two candidates");
  if (options.sides < 8) throw InvalidArgument("polygon needs at least 8 sides");
  SolutionCache cache;
  return certify_prepared(W, prepare(W), target, options, cache);
}

ShilovEstimate shilov_estimate(const WitnessFamily& W, const CertifyOptions& options) {
  if (W.values.cols() == 0) throw InvalidArgument("degenerate witness family");
  const PreparedFamily P = prepare(W);
  SolutionCache cache;
  ShilovEstimate est;
  for (Index i = 0; i < W.size(); ++i) {
    est.certificates.push_back(certify_prepared(W, P, i, options, cache));
    switch (est.certificates.back().status) {
      case PeakStatus::certified_peak: est.peaks.push_back(i); break;
      case PeakStatus::certified_not_peak: est.not_peaks.push_back(i); break;
      default: est.undecided.push_back(i);
    }
  }
  return est;
}

BoundaryCheck is_boundary(const WitnessFamily& W, const std::vector<Index>& F, std::uint64_t seed, int samples) {
  if (F.empty()) throw InvalidArgument("is_boundary needs a nonempty candidate subset");
  for (Index i : F)
    if (i < 0 || i >= W.size()) throw InvalidArgument("candidate index out of range");
  BoundaryCheck out;
  out.seed = seed;
  out.samples = samples;
  auto test = [&](const VectorXc& c) {
    const Eigen::VectorXd mod = (W.values * c).cwiseAbs();
    const double all = mod.maxCoeff();
    if (all == 0) return true;
    double onF = 0;
    for (Index i : F) onF = std::max(onF, mod(i));
    out.worst_ratio = std::min(out.worst_ratio, onF / all);
    if (onF >= (1 - 1e-9) * all) return true;
    out.holds = false;
    out.counterexample = c;
    return false;
  };
  const Index p = W.values.cols();
  for (Index j = 0; j < p; ++j)
    if (!test(VectorXc::Unit(p, j))) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (int t = 0; t < samples; ++t) {
    VectorXc c(p);
    for (Index j = 0; j < p; ++j) c(j) = cplx(g(rng), g(rng));
    if (!test(c)) return out;
  }
  return out;
}

std::vector<Index> argmax_set(const VectorXc& values, double tol) {
  std::vector<Index> out;
  if (values.size() == 0) return out;
  const double m = values.cwiseAbs().maxCoeff();
  for (Index i = 0; i < values.size(); ++i)
    if (std::abs(values(i)) >= m - tol) out.push_back(i);
  return out;
}

ProductPeaker synthesize_product_peaker(const VectorXc& v, const ValueTable& f, const Quadruple& Q) {
  const Algebra& E = Q.scalars;
  detail::require_dim(E, v.size(), "peaker element");
  if (f.rows() != Q.space.size() || f.cols() != 1) throw DimensionMismatch("f must be a scalar table on X");
  const auto chars = characters(E);
  const double vn = gelfand_norm(E, chars, v);
  if (std::abs(vn - 1) > 1e-9) throw InvalidArgument("|v^| must equal 1, got " + std::to_string(vn));
  const double fn = f.cwiseAbs().maxCoeff();
  if (std::abs(fn - 1) > 1e-9) throw InvalidArgument("sup |f| must equal 1, got " + std::to_string(fn));

  ProductPeaker out;
  const Index X = Q.space.size();
  out.g = f.col(0) * v.transpose();
  const auto c = span_membership(Q.vector, out.g);
  out.in_span = c.has_value();
  const VectorXc vhat = character_matrix(chars, E.dim()) * v;
  VectorXc direct(static_cast<Index>(chars.size()) * X);
  for (std::size_t p = 0; p < chars.size(); ++p)
    for (Index y = 0; y < X; ++y) direct(static_cast<Index>(p) * X + y) = f(y, 0) * vhat(static_cast<Index>(p));
  if (out.in_span) {
    out.coefficients = *c;
    out.gelfand_values = gelfand_matrix(Q.vector, chars) * out.coefficients;
  } else {
    out.gelfand_values = gelfand_matrix(make_CXE(Q.space, E), chars) * Q.vector.flatten(out.g);
  }
  out.law_residual = (out.gelfand_values - direct).cwiseAbs().maxCoeff();
  out.max_modulus = out.gelfand_values.cwiseAbs().maxCoeff();
  out.argmax = argmax_set(out.gelfand_values);
  return out;
}

ProductReport verify_product_theorem(const Quadruple& Q, Regime regime, const CertifyOptions& options) {
  return product_check(Q, regime, options, false);
}

ProductReport verify_peak_product(const Quadruple& Q, Regime regime, const CertifyOptions& options) {
  return product_check(Q, regime, options, true);
}

}  // namespace shilov
