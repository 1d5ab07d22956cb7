#include "shilov/minimax_lp.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace shilov {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Column {
  Eigen::VectorXd A;
  double cost = 0;
  long id = 0;
  bool box = false;
};

struct Candidate {
  Column col;
  double rc = 0;
  bool found = false;
};

// Revised simplex on the dual of
//   min t  s.t.  Re(exp(-i theta) (a_k + b_k z)) <= t,  |Re z_j|, |Im z_j| <= R.
// Dual columns: cuts [1; Re(rot b_k); -Im(rot b_k)] with cost -Re(rot a_k),
// and box columns +-e_i with cost R. Row 0 is sum(lambda) = 1, rows 1..q and
// q+1..2q carry Re z and Im z. The simplex multipliers are (-t, Re z, Im z).
class ChebyshevSimplex {
 public:
  ChebyshevSimplex(const VectorXc& a, const MatrixXc& b, int sides, double certified_box)
      : a_(a), b_(b), n_(a.size()), q_(b.cols()), r_(2 * b.cols() + 1), m_(sides),
        box_(std::min(certified_box, 1 + 2 * a.cwiseAbs().maxCoeff())), box_cert_(certified_box) {
    scale_ = std::max(1.0, a.cwiseAbs().maxCoeff());
    rc_tol_ = 1e-11 * scale_;
    rhs_ = Eigen::VectorXd::Unit(r_, 0);
    Index j0 = 0;
    a.cwiseAbs().maxCoeff(&j0);
    basis_.push_back(polygon_column(j0, nearest_direction(a(j0))));
    for (Index i = 1; i < r_; ++i) basis_.push_back(box_column(i, basis_[0].A(i) > 0 ? -1 : 1));
    refactor();
  }

  // Moves the right-hand side off zero in the z rows so no vertex of the
  // polygon program is degenerate. The initial basis stays feasible.
  void perturb(double eps, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.5, 1.0);
    for (Index i = 1; i < r_; ++i) rhs_(i) = eps * u(rng) * (basis_[i].A(i) > 0 ? 1 : -1) * (1 + std::abs(basis_[0].A(i)));
    refactor();
  }

  // Drops the perturbation and restores primal feasibility by dual simplex
  // steps over the polygon pool. Returns false if the budget ran out.
  bool unperturb(int budget) {
    rhs_ = Eigen::VectorXd::Unit(r_, 0);
    refactor(false);
    for (int it = 0; it < budget; ++it) {
      Index row = 0;
      if (x_.minCoeff(&row) >= -1e-13) {
        x_ = x_.cwiseMax(0.0);
        return true;
      }
      multipliers();
      const Candidate e = dual_ratio(Binv_.row(row).transpose());
      if (!e.found) return false;
      pivot_on(e.col, row);
      ++pivots_;
    }
    return false;
  }

  enum class Outcome { optimal, stopped, budget };

  // Primal simplex until no column of the pool prices out, the pivot budget
  // runs out, or a threshold is crossed: the best upper bound falls below
  // stop_below or the lower bound reaches stop_above.
  Outcome run(bool tangent, int budget, double stop_below, double stop_above, double gap) {
    const bool watch = std::isfinite(stop_below) || std::isfinite(stop_above) || tangent;
    int stall = 0;
    double last = objective();
    for (int it = 0; it < budget; ++it) {
      multipliers();
      const bool bland = stall > 30;
      const Candidate e = price(tangent, bland);
      if (watch) {
        const double lo = lower(), up = best_upper_;
        if (up < stop_below || lo >= stop_above) return Outcome::stopped;
        if (tangent && up - lo <= 1e-12 + gap * std::max(1.0, up)) return Outcome::optimal;
      }
      if (!e.found) return Outcome::optimal;
      if (stall > 400 && e.rc > -1e-9 * scale_) return Outcome::optimal;
      pivot(e.col, bland);
      ++pivots_;
      const double now = objective();
      if (now < last - 1e-15 * std::max(1.0, std::abs(last))) {
        stall = 0;
        last = now;
      } else {
        ++stall;
      }
    }
    multipliers();
    price(tangent, false);
    return Outcome::budget;
  }

  // Enlarges the working box while it binds. Returns true when it grew.
  bool widen_box() {
    double slack = 0;
    for (Index i = 0; i < r_; ++i)
      if (basis_[i].box) slack += x_(i);
    if (box_ >= box_cert_ || slack <= 1e-13) return false;
    box_ = std::min(4 * box_, box_cert_);
    for (auto& c : basis_)
      if (c.box) c.cost = box_;
    return true;
  }

  // Weak duality from the cut weights alone: for nonnegative lambda,
  // t* sum(lambda) >= h.lambda - |sum lambda g|_1 R, R bounding a minimizer.
  double lower() const {
    double mass = 0, h = 0;
    Eigen::VectorXd G = Eigen::VectorXd::Zero(r_);
    for (Index i = 0; i < r_; ++i) {
      if (basis_[i].box || x_(i) <= 0) continue;
      mass += x_(i);
      h -= basis_[i].cost * x_(i);
      G += x_(i) * basis_[i].A;
    }
    if (mass <= 0) return 0;
    return std::max(0.0, (h - box_cert_ * G.tail(r_ - 1).lpNorm<1>()) / mass);
  }

  void refresh() {
    multipliers();
    price(false, false);
  }
  double best_upper() const { return best_upper_; }
  const VectorXc& best_z() const { return best_z_; }
  int pivots() const { return pivots_; }

  VectorXc current_z() const {
    VectorXc z(q_);
    for (Index j = 0; j < q_; ++j) z(j) = cplx(y_(1 + j), y_(1 + q_ + j));
    return z;
  }

  double modulus_at(const VectorXc& z) const { return (a_ + b_ * z).cwiseAbs().maxCoeff(); }

 private:
  double angle_step() const { return kTwoPi / m_; }

  int nearest_direction(cplx w) const {
    if (w == cplx(0)) return 0;
    double ang = std::arg(w);
    if (ang < 0) ang += kTwoPi;
    return static_cast<int>(std::lround(ang / angle_step())) % m_;
  }

  Column cut(Index k, double theta, long id) const {
    const cplx rot = std::polar(1.0, -theta);
    Column c;
    c.A.resize(r_);
    c.A(0) = 1;
    for (Index j = 0; j < q_; ++j) {
      const cplx beta = rot * b_(k, j);
      c.A(1 + j) = beta.real();
      c.A(1 + q_ + j) = -beta.imag();
    }
    c.cost = -(rot * a_(k)).real();
    c.id = id;
    return c;
  }

  Column polygon_column(Index k, int dir) const {
    return cut(k, angle_step() * dir, static_cast<long>(2 * (r_ - 1) + k * m_ + dir));
  }

  Column box_column(Index row, int sign) const {
    Column c;
    c.A = Eigen::VectorXd::Zero(r_);
    c.A(row) = sign;
    c.cost = box_;
    c.id = 2 * (row - 1) + (sign < 0 ? 1 : 0);
    c.box = true;
    return c;
  }

  double objective() const {
    double s = 0;
    for (Index i = 0; i < r_; ++i) s += basis_[i].cost * x_(i);
    return s;
  }

  void refactor(bool clamp = true) {
    Eigen::MatrixXd B(r_, r_);
    for (Index i = 0; i < r_; ++i) B.col(i) = basis_[i].A;
    Binv_ = B.partialPivLu().inverse();
    x_ = Binv_ * rhs_;
    if (clamp) x_ = x_.cwiseMax(0.0);
    since_refactor_ = 0;
  }

  void multipliers() {
    Eigen::VectorXd cb(r_);
    for (Index i = 0; i < r_; ++i) cb(i) = basis_[i].cost;
    y_ = Binv_.transpose() * cb;
  }

  Candidate price(bool tangent, bool bland) {
    const VectorXc z = current_z();
    const VectorXc w = a_ + b_ * z;
    const double up = w.cwiseAbs().maxCoeff();
    if (up < best_upper_) {
      best_upper_ = up;
      best_z_ = z;
    }
    const double t = -y_(0);
    Candidate best;
    auto offer = [&](auto make, double rc, long id) {
      if (rc >= -rc_tol_) return;
      if (bland ? (!best.found || id < best.col.id) : rc < best.rc) {
        best.col = make();
        best.rc = rc;
        best.found = true;
      }
    };
    for (Index i = 1; i < r_; ++i) {
      offer([&] { return box_column(i, 1); }, box_ - y_(i), 2 * (i - 1));
      offer([&] { return box_column(i, -1); }, box_ + y_(i), 2 * (i - 1) + 1);
    }
    for (Index k = 0; k < n_; ++k) {
      const double mod = std::abs(w(k));
      if (mod <= t + rc_tol_) continue;
      if (tangent) {
        const long id = next_id_++;
        offer([&] { return cut(k, std::arg(w(k)), id); }, t - mod, id);
      } else if (bland) {
        for (int d = 0; d < m_; ++d) {
          const double rc = t - (std::polar(1.0, -angle_step() * d) * w(k)).real();
          if (rc < -rc_tol_) {
            offer([&] { return polygon_column(k, d); }, rc, 2 * (r_ - 1) + k * m_ + d);
            break;
          }
        }
      } else {
        const int d = nearest_direction(w(k));
        const double rc = t - (std::polar(1.0, -angle_step() * d) * w(k)).real();
        offer([&] { return polygon_column(k, d); }, rc, 0);
      }
    }
    return best;
  }

  // Entering column for a dual simplex step on the row whose B^-1 row is rho.
  // For a cut, rho.A = rho(0) + Re(rot (b_k zeta)) with zeta built from rho.
  Candidate dual_ratio(const Eigen::VectorXd& rho) {
    const VectorXc w = a_ + b_ * current_z();
    VectorXc zeta(q_);
    for (Index j = 0; j < q_; ++j) zeta(j) = cplx(rho(1 + j), rho(1 + q_ + j));
    const VectorXc u = b_ * zeta;
    const double t = -y_(0);
    const double piv_tol = 1e-9 * std::max(1.0, rho.cwiseAbs().maxCoeff());
    Candidate best;
    double best_ratio = std::numeric_limits<double>::infinity(), best_alpha = 0;
    auto consider = [&](auto make, double rc, double alpha) {
      if (alpha >= -piv_tol) return;
      const double ratio = std::max(0.0, rc) / -alpha;
      if (ratio < best_ratio - 1e-15 || (ratio <= best_ratio + 1e-15 && -alpha > best_alpha)) {
        best_ratio = ratio;
        best_alpha = -alpha;
        best.col = make();
        best.rc = rc;
        best.found = true;
      }
    };
    for (Index i = 1; i < r_; ++i) {
      consider([&] { return box_column(i, 1); }, box_ - y_(i), rho(i));
      consider([&] { return box_column(i, -1); }, box_ + y_(i), -rho(i));
    }
    for (Index k = 0; k < n_; ++k)
      for (int d = 0; d < m_; ++d) {
        const cplx rot = std::polar(1.0, -angle_step() * d);
        consider([&] { return polygon_column(k, d); }, t - (rot * w(k)).real(), rho(0) + (rot * u(k)).real());
      }
    return best;
  }

  // Product-form update of B^-1 for entering direction d = B^-1 A at row leave.
  void eliminate(const Eigen::VectorXd& d, Index leave) {
    const Eigen::RowVectorXd pivot_row = Binv_.row(leave) / d(leave);
    Binv_.noalias() -= d * pivot_row;
    Binv_.row(leave) = pivot_row;
  }

  void pivot_on(const Column& col, Index leave) {
    const Eigen::VectorXd d = Binv_ * col.A;
    const double step = x_(leave) / d(leave);
    eliminate(d, leave);
    x_ -= step * d;
    x_(leave) = step;
    basis_[leave] = col;
    if (++since_refactor_ >= 32) refactor(false);
  }

  // Harris two-pass ratio test.
  void pivot(const Column& col, bool bland) {
    const Eigen::VectorXd d = Binv_ * col.A;
    const double piv_tol = 1e-9 * std::max(1.0, d.cwiseAbs().maxCoeff());
    constexpr double slack = 1e-11;
    double bound = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < r_; ++i)
      if (d(i) > piv_tol) bound = std::min(bound, (std::max(0.0, x_(i)) + slack) / d(i));
    Index leave = -1;
    for (Index i = 0; i < r_; ++i) {
      if (d(i) <= piv_tol || std::max(0.0, x_(i)) / d(i) > bound) continue;
      if (leave < 0 || (bland ? basis_[i].id < basis_[leave].id : d(i) > d(leave))) leave = i;
    }
    if (leave < 0) throw Error("minimax: dual program became unbounded");
    const double step = std::max(0.0, x_(leave)) / d(leave);
    eliminate(d, leave);
    x_ = (x_ - step * d).cwiseMax(0.0);
    x_(leave) = step;
    basis_[leave] = col;
    if (++since_refactor_ >= 32) refactor();
  }

  const VectorXc& a_;
  const MatrixXc& b_;
  Index n_, q_, r_;
  int m_;
  double box_;
  double box_cert_;
  double scale_ = 1;
  double rc_tol_ = 0;
  Eigen::VectorXd rhs_;
  std::vector<Column> basis_;
  Eigen::MatrixXd Binv_;
  Eigen::VectorXd x_, y_;
  int since_refactor_ = 0;
  int pivots_ = 0;
  long next_id_ = std::numeric_limits<long>::max() / 2;
  double best_upper_ = std::numeric_limits<double>::infinity();
  VectorXc best_z_;
};

// Radius of a box in the real coordinates of z containing a minimizer of
// both the exact and the polygon problem.
double minimizer_box(const VectorXc& a, const MatrixXc& b, int sides) {
  const Eigen::SelfAdjointEigenSolver<MatrixXc> eig(b.adjoint() * b, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const double top = ev.maxCoeff();
  double smallest = top;
  for (Index i = 0; i < ev.size(); ++i)
    if (ev(i) > 1e-24 * top) smallest = std::min(smallest, ev(i));
  const double t0 = a.cwiseAbs().maxCoeff() / std::cos(kTwoPi / (2 * sides));
  const double reach = std::sqrt(static_cast<double>(a.size())) * t0 + a.norm();
  return 1.01 * reach / std::sqrt(smallest) + 1e-9;
}

}  // namespace

MinimaxResult solve_minimax(const VectorXc& a, const MatrixXc& b, const MinimaxOptions& options) {
  if (b.rows() != a.size()) throw DimensionMismatch("minimax: a and b disagree on the number of rows");
  if (options.sides < 8) throw InvalidArgument("minimax: polygon needs at least 8 sides");
  MinimaxResult res;
  const Index q = b.cols();
  if (a.size() == 0) {
    res.polygon_z = res.z = VectorXc::Zero(q);
    res.converged = true;
    return res;
  }
  if (q == 0 || b.cwiseAbs().maxCoeff() == 0) {
    const double v = a.cwiseAbs().maxCoeff();
    res.polygon_lower = res.polygon_upper = res.lower = res.upper = v;
    res.polygon_z = res.z = VectorXc::Zero(q);
    res.converged = true;
    return res;
  }

  ChebyshevSimplex lp(a, b, options.sides, minimizer_box(a, b, options.sides));
  const int r = static_cast<int>(2 * q + 1);
  const int budget = 200 * r + 2000;
  using Outcome = ChebyshevSimplex::Outcome;
  auto finish = [&] {
    lp.refresh();
    res.lower = lp.lower();
    res.z = lp.best_z();
    res.upper = lp.modulus_at(res.z);
    res.polygon_lower = res.lower;
    res.polygon_z = lp.current_z();
    res.polygon_upper = lp.modulus_at(res.polygon_z);
    res.pivots = lp.pivots();
    return res;
  };
  // false when a threshold stopped the polygon program
  auto polygon = [&] {
    do {
      const Outcome o = lp.run(false, budget, options.stop_below, options.stop_above, 0.0);
      if (o == Outcome::stopped) return false;
      if (o == Outcome::budget) throw Error("minimax: polygon program did not converge");
    } while (lp.widen_box());
    return true;
  };
  lp.perturb(1e-7, 0x9e37'79b9'7f4a'7c15ULL);
  if (!polygon()) return finish();
  if (!lp.unperturb(20 * r + 200)) throw Error("minimax: could not remove the perturbation");
  if (!polygon()) return finish();
  lp.refresh();
  res.polygon_lower = lp.lower();
  res.polygon_z = lp.current_z();
  res.polygon_upper = lp.modulus_at(res.polygon_z);

  const int refine = options.max_refine_pivots > 0 ? options.max_refine_pivots : 40 * r + 400;
  res.converged =
      lp.run(true, refine, options.stop_below, options.stop_above, options.gap) == Outcome::optimal;
  res.lower = std::max(res.polygon_lower, lp.lower());
  res.z = lp.best_z();
  res.upper = lp.modulus_at(res.z);
  if (res.polygon_upper < res.upper) {
    res.z = res.polygon_z;
    res.upper = res.polygon_upper;
  }
  res.pivots = lp.pivots();
  return res;
}

}  // namespace shilov
