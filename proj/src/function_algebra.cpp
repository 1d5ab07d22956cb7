#include "shilov/function_algebra.hpp"

#include <cmath>
#include <random>
#include <set>

#include <Eigen/QR>

#include "shilov/linalg.hpp"

namespace shilov {

namespace {

constexpr double kIndependenceTol = 1e-10;
constexpr double kMembershipTol = 1e-8;

// Least-squares solver for a fixed basis matrix.
class SpanSolver {
 public:
  explicit SpanSolver(const MatrixXc& basis) : basis_(basis), qr_(basis) {}

  std::optional<VectorXc> solve(const VectorXc& f) const {
    if (basis_.cols() == 0) {
      if (f.norm() < kMembershipTol * std::max(1.0, f.norm())) return VectorXc(0);
      return std::nullopt;
    }
    VectorXc c = qr_.solve(f);
    const double res = (basis_ * c - f).norm();
    if (res < kMembershipTol * std::max(1.0, f.norm())) return c;
    return std::nullopt;
  }

 private:
  const MatrixXc& basis_;
  Eigen::ColPivHouseholderQR<MatrixXc> qr_;
};

bool same_points(const FiniteSpace& a, const FiniteSpace& b) { return a.labels == b.labels; }

void require_coords(const FiniteSpace& X, const char* what) {
  if (!X.coords) throw InvalidArgument(std::string(what) + " needs planar coordinates");
}

std::vector<ValueTable> times_basis(const FiniteSpace& X, const Algebra& E, const VectorXc& scalar) {
  std::vector<ValueTable> out;
  for (Index j = 0; j < E.dim(); ++j) {
    ValueTable t = ValueTable::Zero(X.size(), E.dim());
    t.col(j) = scalar;
    out.push_back(std::move(t));
  }
  return out;
}

bool is_closed(const FunctionSystem& S) { return S.closed || products_in_span(S); }

}  // namespace

VectorXc FunctionSystem::flatten(const ValueTable& t) const {
  if (t.rows() != points() || t.cols() != fiber_dim())
    throw DimensionMismatch("value table must be |X| x dim(E)");
  VectorXc v(points() * fiber_dim());
  for (Index x = 0; x < points(); ++x) v.segment(x * fiber_dim(), fiber_dim()) = t.row(x).transpose();
  return v;
}

ValueTable FunctionSystem::unflatten(const VectorXc& v) const {
  if (v.size() != points() * fiber_dim()) throw DimensionMismatch("flattened table has wrong length");
  ValueTable t(points(), fiber_dim());
  for (Index x = 0; x < points(); ++x) t.row(x) = v.segment(x * fiber_dim(), fiber_dim()).transpose();
  return t;
}

FunctionSystem make_system(FiniteSpace X, Algebra E, const std::vector<ValueTable>& tables, NormTag norm,
                           bool closed, std::string label) {
  if (X.size() == 0) throw InvalidArgument("function system on an empty space");
  if (norm.kind == NormTag::Kind::lipschitz) {
    if (!X.has_distance()) throw InvalidArgument("lipschitz norm requires a metric");
    if (!(norm.alpha > 0 && norm.alpha <= 1)) throw InvalidArgument("lipschitz exponent must lie in (0,1]");
  }
  FunctionSystem S;
  S.space = std::move(X);
  S.scalars = std::move(E);
  S.norm = norm;
  S.label = std::move(label);
  MatrixXc all(S.points() * S.fiber_dim(), static_cast<Index>(tables.size()));
  for (std::size_t j = 0; j < tables.size(); ++j) all.col(static_cast<Index>(j)) = S.flatten(tables[j]);
  const auto keep = independent_columns(all, kIndependenceTol);
  S.basis.resize(all.rows(), static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) S.basis.col(static_cast<Index>(j)) = all.col(keep[j]);
  if (!span_membership(S, constant_table(S.space, S.scalars, S.scalars.unit)))
    throw InvalidArgument("system does not contain the constant 1_E");
  S.closed = closed;
  return S;
}

ValueTable constant_table(const FiniteSpace& X, const Algebra& E, const VectorXc& value) {
  detail::require_dim(E, value.size(), "constant value");
  return value.transpose().replicate(X.size(), 1);
}

ValueTable pointwise_product(const Algebra& E, const ValueTable& f, const ValueTable& g) {
  if (f.rows() != g.rows() || f.cols() != E.dim() || g.cols() != E.dim())
    throw DimensionMismatch("pointwise product of incompatible tables");
  ValueTable out(f.rows(), f.cols());
  for (Index x = 0; x < f.rows(); ++x)
    out.row(x) = multiply(E, f.row(x).transpose(), g.row(x).transpose()).transpose();
  return out;
}

VectorXc evaluate(const FunctionSystem& S, const VectorXc& coeffs, Index x) {
  if (coeffs.size() != S.dim()) throw DimensionMismatch("coefficient vector has wrong length");
  if (x < 0 || x >= S.points()) throw InvalidArgument("unknown point index " + std::to_string(x));
  return S.basis.middleRows(x * S.fiber_dim(), S.fiber_dim()) * coeffs;
}

VectorXc evaluate(const FunctionSystem& S, const VectorXc& coeffs, const std::string& point) {
  return evaluate(S, coeffs, S.space.index_of(point));
}

double sup_norm(const Algebra& E, const ValueTable& f) {
  double m = 0;
  for (Index x = 0; x < f.rows(); ++x) m = std::max(m, norm(E, f.row(x).transpose()));
  return m;
}

double lipschitz_seminorm(const FiniteSpace& X, const Algebra& E, const ValueTable& f, double alpha) {
  if (!X.has_distance()) throw InvalidArgument("lipschitz seminorm requires a metric");
  if (!(alpha > 0 && alpha <= 1)) throw InvalidArgument("lipschitz exponent must lie in (0,1]");
  double m = 0;
  for (Index x = 0; x < X.size(); ++x)
    for (Index y = x + 1; y < X.size(); ++y) {
      const VectorXc diff = (f.row(x) - f.row(y)).transpose();
      m = std::max(m, norm(E, diff) / std::pow(X.distance(x, y), alpha));
    }
  return m;
}

double lipschitz_norm(const FiniteSpace& X, const Algebra& E, const ValueTable& f, double alpha) {
  return sup_norm(E, f) + lipschitz_seminorm(X, E, f, alpha);
}

double system_norm(const FunctionSystem& S, const ValueTable& f) {
  if (S.norm.kind == NormTag::Kind::sup) return sup_norm(S.scalars, f);
  return lipschitz_norm(S.space, S.scalars, f, S.norm.alpha);
}

std::optional<VectorXc> span_membership(const FunctionSystem& S, const ValueTable& f) {
  return SpanSolver(S.basis).solve(S.flatten(f));
}

bool products_in_span(const FunctionSystem& S) {
  const SpanSolver solver(S.basis);
  for (Index i = 0; i < S.dim(); ++i)
    for (Index j = i; j < S.dim(); ++j)
      if (!solver.solve(S.flatten(pointwise_product(S.scalars, S.table(i), S.table(j))))) return false;
  return true;
}

FunctionSystem close_under_products(const FunctionSystem& S) {
  FunctionSystem out = S;
  const Index cap = S.points() * S.fiber_dim();
  bool grew = true;
  while (grew && out.dim() < cap) {
    grew = false;
    const Index n = out.dim();
    for (Index i = 0; i < n && out.dim() < cap; ++i)
      for (Index j = i; j < n && out.dim() < cap; ++j) {
        const VectorXc p = out.flatten(pointwise_product(out.scalars, out.table(i), out.table(j)));
        if (SpanSolver(out.basis).solve(p)) continue;
        MatrixXc wider(out.basis.rows(), out.dim() + 1);
        wider << out.basis, p;
        if (numerical_rank(wider, kIndependenceTol) <= out.dim()) continue;
        out.basis = std::move(wider);
        grew = true;
      }
  }
  out.closed = true;
  return out;
}

FunctionSystem make_CXE(const FiniteSpace& X, const Algebra& E) {
  const Index n = X.size() * E.dim();
  std::vector<ValueTable> tables;
  for (Index x = 0; x < X.size(); ++x)
    for (Index k = 0; k < E.dim(); ++k) {
      ValueTable t = ValueTable::Zero(X.size(), E.dim());
      t(x, k) = 1.0;
      tables.push_back(std::move(t));
    }
  auto S = make_system(X, E, tables, NormTag::sup(), true, "C(X," + E.label + ")");
  if (S.dim() != n) throw InvalidArgument("C(X,E) basis lost rank");
  return S;
}

FunctionSystem make_lip(const FiniteSpace& X, const Algebra& E, double alpha) {
  auto S = make_CXE(X, E);
  if (!X.has_distance()) throw InvalidArgument("lipschitz system requires a metric");
  if (!(alpha > 0 && alpha <= 1)) throw InvalidArgument("lipschitz exponent must lie in (0,1]");
  S.norm = NormTag::lipschitz(alpha);
  S.label = "Lip_" + std::to_string(alpha) + "(X," + E.label + ")";
  return S;
}

FunctionSystem make_poly(const FiniteSpace& X, const Algebra& E, int degree) {
  require_coords(X, "polynomial system");
  if (degree < 0) throw InvalidArgument("polynomial degree must be nonnegative");
  const Eigen::Map<const VectorXc> z(X.coords->data(), X.size());
  std::vector<ValueTable> tables;
  VectorXc zk = VectorXc::Ones(X.size());
  for (int k = 0; k <= degree; ++k) {
    for (auto& t : times_basis(X, E, zk)) tables.push_back(std::move(t));
    zk = zk.cwiseProduct(z);
  }
  auto S = make_system(X, E, tables, NormTag::sup(), false, "P_" + std::to_string(degree) + "(X," + E.label + ")");
  S.closed = products_in_span(S);
  return S;
}

FunctionSystem make_rational(const FiniteSpace& X, const Algebra& E, int degree, const std::vector<cplx>& poles) {
  require_coords(X, "rational system");
  if (degree < 0) throw InvalidArgument("rational degree must be nonnegative");
  const Eigen::Map<const VectorXc> z(X.coords->data(), X.size());
  std::vector<ValueTable> tables;
  VectorXc zk = VectorXc::Ones(X.size());
  for (int k = 0; k <= degree; ++k) {
    for (auto& t : times_basis(X, E, zk)) tables.push_back(std::move(t));
    zk = zk.cwiseProduct(z);
  }
  for (cplx c : poles) {
    for (Index x = 0; x < X.size(); ++x)
      if (std::abs(z(x) - c) <= 1e-12 * std::max(1.0, std::abs(c)))
        throw InvalidArgument("pole collides with sample point " + X.labels[x]);
    const VectorXc inv = (z.array() - c).inverse().matrix();
    VectorXc p = inv;
    for (int k = 1; k <= degree; ++k) {
      for (auto& t : times_basis(X, E, p)) tables.push_back(std::move(t));
      p = p.cwiseProduct(inv);
    }
  }
  auto S = make_system(X, E, tables, NormTag::sup(), false, "R_" + std::to_string(degree) + "(X," + E.label + ")");
  S.closed = products_in_span(S);
  return S;
}

FunctionSystem span_BE(const FunctionSystem& B, const Algebra& E) {
  if (B.fiber_dim() != 1) throw InvalidArgument("span_BE needs a scalar system");
  std::vector<ValueTable> tables;
  for (Index i = 0; i < B.dim(); ++i)
    for (auto& t : times_basis(B.space, E, B.basis.col(i))) tables.push_back(std::move(t));
  return make_system(B.space, E, tables, B.norm, B.closed, "span(" + B.label + "." + E.label + ")");
}

Algebra as_algebra(const FunctionSystem& S) {
  if (!is_closed(S)) throw InvalidArgument("system " + S.label + " is not closed under products");
  const Index n = S.dim();
  const SpanSolver solver(S.basis);
  Algebra A;
  A.label = S.label.empty() ? "system" : S.label;
  A.left.assign(n, MatrixXc::Zero(n, n));
  for (Index i = 0; i < n; ++i)
    for (Index j = i; j < n; ++j) {
      const auto c = solver.solve(S.flatten(pointwise_product(S.scalars, S.table(i), S.table(j))));
      if (!c) throw InvalidArgument("product of basis functions left the span");
      A.left[i].col(j) = *c;
      A.left[j].col(i) = *c;
    }
  const auto u = solver.solve(S.flatten(constant_table(S.space, S.scalars, S.scalars.unit)));
  if (!u) throw InvalidArgument("system does not contain the constant 1_E");
  A.unit = *u;
  double s = 1.0;
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) s = std::max(s, A.left[i].col(j).cwiseAbs().sum());
  A.weights = Eigen::VectorXd::Constant(n, s);
  return A;
}

bool separation_check(const FunctionSystem& S) {
  for (Index x = 0; x < S.points(); ++x)
    for (Index y = x + 1; y < S.points(); ++y) {
      bool separated = false;
      for (Index j = 0; j < S.dim() && !separated; ++j) {
        const VectorXc d = S.basis.block(x * S.fiber_dim(), j, S.fiber_dim(), 1) -
                           S.basis.block(y * S.fiber_dim(), j, S.fiber_dim(), 1);
        separated = norm(S.scalars, d) > 1e-9;
      }
      if (!separated) return false;
    }
  return true;
}

double embedding_constant(const FunctionSystem& S, std::uint64_t seed, int samples) {
  if (S.norm.kind == NormTag::Kind::sup) return 1.0;
  double best = 0;
  auto consider = [&](const ValueTable& f) {
    const double den = system_norm(S, f);
    if (den > 0) best = std::max(best, sup_norm(S.scalars, f) / den);
  };
  consider(constant_table(S.space, S.scalars, S.scalars.unit));
  for (Index j = 0; j < S.dim(); ++j) consider(S.table(j));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  for (int t = 0; t < samples; ++t) {
    VectorXc c(S.dim());
    for (Index j = 0; j < S.dim(); ++j) c(j) = cplx(g(rng), g(rng));
    if (c.norm() == 0) continue;
    consider(S.combine(c / c.norm()));
  }
  return best;
}

MatrixXc gelfand_matrix(const FunctionSystem& S, const std::vector<Character<double>>& chars) {
  const Index X = S.points(), d = S.fiber_dim();
  MatrixXc out(static_cast<Index>(chars.size()) * X, S.dim());
  for (std::size_t p = 0; p < chars.size(); ++p) {
    detail::require_dim(S.scalars, chars[p].values.size(), "character");
    for (Index x = 0; x < X; ++x)
      out.row(static_cast<Index>(p) * X + x) = chars[p].values.transpose() * S.basis.middleRows(x * d, d);
  }
  return out;
}

ValidationReport check_admissible(const Quadruple& Q) {
  ValidationReport rep;
  rep.subject = "quadruple " + Q.label;
  const FiniteSpace& X = Q.space;
  const FunctionSystem& B = Q.scalar;
  const FunctionSystem& Bt = Q.vector;

  {
    std::string why;
    const std::set<std::string> distinct(X.labels.begin(), X.labels.end());
    if (X.size() == 0) why = "empty space";
    else if (static_cast<Index>(distinct.size()) != X.size()) why = "duplicate point labels";
    else if (X.metric && !validate_metric(X).passed()) why = "metric invalid";
    rep.add("(1) X compact Hausdorff", why.empty(), 0.0, why);
  }
  {
    const auto er = validate_algebra(Q.scalars);
    std::string why;
    for (const auto& c : er.checks)
      if (!c.passed) why += (why.empty() ? "" : "; ") + c.name + (c.detail.empty() ? "" : " " + c.detail);
    rep.add("(2) E commutative unital", er.passed(), 0.0, why);
  }
  const bool shape_ok = same_points(B.space, X) && same_points(Bt.space, X) && B.fiber_dim() == 1 &&
                        Bt.fiber_dim() == Q.scalars.dim();
  rep.add("shared space", shape_ok, 0.0, shape_ok ? "" : "systems disagree with X or E");
  if (!shape_ok) return rep;

  // (3) characters of B are exactly the point evaluations
  {
    std::string why;
    double residual = 0;
    if (!is_closed(B)) {
      why = "B is not closed under products";
    } else {
      Character<double> one{VectorXc::Ones(1), "id"};
      const MatrixXc evals = gelfand_matrix(B, {one});
      const auto chars = characters(as_algebra(B));
      if (static_cast<Index>(chars.size()) != X.size())
        why = std::to_string(chars.size()) + " characters for " + std::to_string(X.size()) + " points";
      std::vector<bool> hit(X.size(), false);
      for (const auto& chi : chars) {
        double best = std::numeric_limits<double>::infinity();
        Index at = -1;
        for (Index x = 0; x < X.size(); ++x) {
          const double d = (evals.row(x).transpose() - chi.values).cwiseAbs().maxCoeff();
          if (d < best) best = d, at = x;
        }
        residual = std::max(residual, best);
        if (best > 1e-6 * std::max(1.0, chi.values.cwiseAbs().maxCoeff())) {
          if (why.empty()) why = chi.label + " is not a point evaluation";
        } else if (hit[at]) {
          if (why.empty()) why = "two characters at " + X.labels[at];
        } else {
          hit[at] = true;
        }
      }
    }
    rep.add("(3) B natural", why.empty(), residual, why);
  }

  // (4) B~ is an E-valued function algebra
  {
    std::string why;
    if (!span_membership(Bt, constant_table(X, Q.scalars, Q.scalars.unit))) why = "1_E not in B~";
    else if (!separation_check(Bt)) why = "B~ does not separate points";
    else if (!is_closed(Bt)) why = "B~ is not closed under products";
    rep.add("(4) B~ function algebra", why.empty(), 0.0, why);
  }

  // (5) B.E inside B~
  {
    std::string why;
    const SpanSolver solver(Bt.basis);
    for (Index i = 0; i < B.dim() && why.empty(); ++i)
      for (Index k = 0; k < Q.scalars.dim() && why.empty(); ++k) {
        ValueTable t = ValueTable::Zero(X.size(), Q.scalars.dim());
        t.col(k) = B.basis.col(i);
        if (!solver.solve(Bt.flatten(t))) why = "b" + std::to_string(i) + ".e" + std::to_string(k) + " not in B~";
      }
    rep.add("(5) B.E in B~", why.empty(), 0.0, why);
  }

  // (6) chi o f in B
  {
    std::string why;
    const auto chars = characters(Q.scalars);
    const MatrixXc G = gelfand_matrix(Bt, chars);
    const SpanSolver solver(B.basis);
    for (std::size_t p = 0; p < chars.size() && why.empty(); ++p)
      for (Index j = 0; j < Bt.dim() && why.empty(); ++j)
        if (!solver.solve(G.block(static_cast<Index>(p) * X.size(), j, X.size(), 1)))
          why = chars[p].label + " o f" + std::to_string(j) + " not in B";
    rep.add("(6) chi o B~ in B", why.empty(), 0.0, why);
  }
  return rep;
}

std::vector<PiCharacter> build_pi(const Quadruple& Q) {
  const auto chars = characters(Q.scalars);
  const MatrixXc G = gelfand_matrix(Q.vector, chars);
  const Index X = Q.vector.points();
  std::vector<PiCharacter> out;
  for (std::size_t p = 0; p < chars.size(); ++p)
    for (Index x = 0; x < X; ++x) {
      const Index row = static_cast<Index>(p) * X + x;
      out.push_back({static_cast<Index>(p), x,
                     {G.row(row).transpose(), chars[p].label + "@" + Q.vector.space.labels[x]}});
    }
  return out;
}

bool check_pi_injective(const Quadruple& Q) {
  const auto pi = build_pi(Q);
  for (std::size_t a = 0; a < pi.size(); ++a)
    for (std::size_t b = a + 1; b < pi.size(); ++b)
      if ((pi[a].functional.values - pi[b].functional.values).cwiseAbs().maxCoeff() <= 1e-6) return false;
  return true;
}

bool check_natural(const Quadruple& Q) {
  if (!is_closed(Q.vector)) throw InvalidArgument("naturality needs a closed B~");
  if (!check_pi_injective(Q)) return false;
  const auto pi = build_pi(Q);
  const auto chars = characters(as_algebra(Q.vector));
  if (chars.size() != pi.size()) return false;
  std::vector<bool> hit(pi.size(), false);
  for (const auto& chi : chars) {
    const double tol = 1e-6 * std::max(1.0, chi.values.cwiseAbs().maxCoeff());
    bool found = false;
    for (std::size_t a = 0; a < pi.size() && !found; ++a)
      if (!hit[a] && (pi[a].functional.values - chi.values).cwiseAbs().maxCoeff() <= tol) hit[a] = found = true;
    if (!found) return false;
  }
  return true;
}

}  // namespace shilov
