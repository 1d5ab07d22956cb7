#include "shilov/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

namespace shilov {

double FiniteSpace::distance(Index i, Index j) const {
  if (metric) return (*metric)(i, j);
  if (coords) return std::abs((*coords)[i] - (*coords)[j]);
  throw InvalidArgument("space has neither a metric nor planar coordinates");
}

Eigen::MatrixXd FiniteSpace::distance_matrix() const {
  const Index n = size();
  Eigen::MatrixXd D(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) D(i, j) = distance(i, j);
  return D;
}

Index FiniteSpace::index_of(const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw InvalidArgument("unknown point '" + label + "'");
  return static_cast<Index>(it - labels.begin());
}

FiniteSpace make_planar_space(std::vector<cplx> coords, const std::string& prefix) {
  FiniteSpace X;
  for (std::size_t i = 0; i < coords.size(); ++i) X.labels.push_back(prefix + std::to_string(i));
  X.coords = std::move(coords);
  return X;
}

FiniteSpace make_metric_space(Eigen::MatrixXd metric, std::vector<std::string> labels) {
  if (metric.rows() != metric.cols()) throw DimensionMismatch("metric must be square");
  FiniteSpace X;
  if (labels.empty())
    for (Index i = 0; i < metric.rows(); ++i) labels.push_back("x" + std::to_string(i));
  if (static_cast<Index>(labels.size()) != metric.rows())
    throw DimensionMismatch("metric size does not match label count");
  X.labels = std::move(labels);
  X.metric = std::move(metric);
  return X;
}

FiniteSpace join_spaces(const FiniteSpace& a, const FiniteSpace& b) {
  if (!a.coords || !b.coords) throw InvalidArgument("join_spaces needs planar coordinates");
  FiniteSpace X;
  X.labels = a.labels;
  X.labels.insert(X.labels.end(), b.labels.begin(), b.labels.end());
  std::vector<cplx> c = *a.coords;
  c.insert(c.end(), b.coords->begin(), b.coords->end());
  X.coords = std::move(c);
  return X;
}

ValidationReport validate_metric(const FiniteSpace& X) {
  ValidationReport rep;
  rep.subject = "metric";
  if (!X.has_distance()) {
    rep.add("present", false, 0.0, "no metric and no coordinates");
    return rep;
  }
  const Eigen::MatrixXd D = X.distance_matrix();
  const Index n = X.size();
  const double tol = 1e-12;
  std::string diag, sym, pos, tri;
  double r_diag = 0, r_sym = 0, r_tri = 0;
  for (Index i = 0; i < n && diag.empty(); ++i)
    if (std::abs(D(i, i)) > tol) {
      diag = X.labels[i];
      r_diag = std::abs(D(i, i));
    }
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      if (sym.empty() && std::abs(D(i, j) - D(j, i)) > tol) {
        sym = "(" + X.labels[i] + "," + X.labels[j] + ")";
        r_sym = std::abs(D(i, j) - D(j, i));
      }
      if (pos.empty() && !(D(i, j) > 0)) pos = "(" + X.labels[i] + "," + X.labels[j] + ")";
    }
  for (Index a = 0; a < n && tri.empty(); ++a)
    for (Index b = 0; b < n && tri.empty(); ++b)
      for (Index c = 0; c < n && tri.empty(); ++c) {
        const double excess = D(a, c) - D(a, b) - D(b, c);
        if (excess > tol) {
          tri = "(" + X.labels[a] + "," + X.labels[b] + "," + X.labels[c] + ")";
          r_tri = excess;
        }
      }
  rep.add("zero_diagonal", diag.empty(), r_diag, diag);
  rep.add("symmetry", sym.empty(), r_sym, sym);
  rep.add("positivity", pos.empty(), 0.0, pos);
  rep.add("triangle", tri.empty(), r_tri, tri);
  return rep;
}

// ---------------------------------------------------------------- rasters

std::pair<Index, Index> RasterRegion::nearest_pixel(cplx z) const {
  const cplx u = (z - origin) / pixel_size;
  return {static_cast<Index>(std::lround(u.imag())), static_cast<Index>(std::lround(u.real()))};
}

bool RasterRegion::contains(cplx z) const {
  const auto [r, c] = nearest_pixel(z);
  for (Index dr = -1; dr <= 1; ++dr)
    for (Index dc = -1; dc <= 1; ++dc)
      if (set(r + dr, c + dc)) return true;
  return false;
}

Index RasterRegion::count() const { return (grid != 0).count(); }

void require_valid_raster(const RasterRegion& R) {
  if (!(R.pixel_size > 0)) throw InvalidArgument("raster pixel_size must be positive");
  if (R.rows() < 3 || R.cols() < 3 || R.count() == 0) throw InvalidArgument("raster region is empty");
  const bool margin = (R.grid.row(0) == 0).all() && (R.grid.row(R.rows() - 1) == 0).all() &&
                      (R.grid.col(0) == 0).all() && (R.grid.col(R.cols() - 1) == 0).all();
  if (!margin) throw InvalidArgument("raster region must keep a one-pixel empty margin");
}

bool shape_contains(const Shape& shape, cplx z) {
  for (const auto& part : shape) {
    const bool in = std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          const double d = std::abs(z - p.center);
          if constexpr (std::is_same_v<T, Disk>)
            return d <= p.radius;
          else
            return d >= p.inner && d <= p.outer;
        },
        part);
    if (in) return true;
  }
  return false;
}

std::string shape_problem(const Shape& shape) {
  if (shape.empty()) return "shape has no parts";
  for (std::size_t k = 0; k < shape.size(); ++k) {
    const std::string where = "part " + std::to_string(k);
    if (const auto* d = std::get_if<Disk>(&shape[k])) {
      if (!(d->radius > 0)) return where + ": disk radius must be positive";
    } else {
      const auto& a = std::get<Annulus>(shape[k]);
      if (!(a.inner > 0) || !(a.outer > a.inner))
        return where + ": annulus needs r_out > r_in > 0";
    }
  }
  return {};
}

RasterRegion raster_from_shape(const Shape& shape, double resolution) {
  if (const auto p = shape_problem(shape); !p.empty()) throw InvalidArgument(p);
  if (!(resolution >= 8)) throw InvalidArgument("raster resolution must be >= 8 pixels per unit");
  const double h = 1.0 / resolution;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& part : shape) {
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          double r;
          if constexpr (std::is_same_v<T, Disk>)
            r = p.radius;
          else
            r = p.outer;
          xmin = std::min(xmin, p.center.real() - r);
          xmax = std::max(xmax, p.center.real() + r);
          ymin = std::min(ymin, p.center.imag() - r);
          ymax = std::max(ymax, p.center.imag() + r);
        },
        part);
  }
  const Index c0 = static_cast<Index>(std::floor(xmin / h)) - 2;
  const Index c1 = static_cast<Index>(std::ceil(xmax / h)) + 2;
  const Index r0 = static_cast<Index>(std::floor(ymin / h)) - 2;
  const Index r1 = static_cast<Index>(std::ceil(ymax / h)) + 2;
  RasterRegion R;
  R.pixel_size = h;
  R.origin = cplx(static_cast<double>(c0) * h, static_cast<double>(r0) * h);
  R.grid = Bitmap::Zero(r1 - r0 + 1, c1 - c0 + 1);
  for (Index r = 0; r < R.rows(); ++r)
    for (Index c = 0; c < R.cols(); ++c) R.grid(r, c) = shape_contains(shape, R.center(r, c)) ? 1 : 0;
  require_valid_raster(R);
  return R;
}

RasterRegion polynomial_hull_raster(const RasterRegion& R) {
  require_valid_raster(R);
  const Index rows = R.rows(), cols = R.cols();
  Bitmap reached = Bitmap::Zero(rows, cols);
  std::queue<std::pair<Index, Index>> q;
  auto push = [&](Index r, Index c) {
    if (r < 0 || c < 0 || r >= rows || c >= cols) return;
    if (R.grid(r, c) != 0 || reached(r, c) != 0) return;
    reached(r, c) = 1;
    q.emplace(r, c);
  };
  for (Index c = 0; c < cols; ++c) {
    push(0, c);
    push(rows - 1, c);
  }
  for (Index r = 0; r < rows; ++r) {
    push(r, 0);
    push(r, cols - 1);
  }
  while (!q.empty()) {
    const auto [r, c] = q.front();
    q.pop();
    push(r + 1, c);
    push(r - 1, c);
    push(r, c + 1);
    push(r, c - 1);
  }
  RasterRegion H = R;
  H.grid = (reached == 0).cast<std::uint8_t>();
  return H;
}

RasterRegion rational_hull_raster(const RasterRegion& R) {
  require_valid_raster(R);
  return R;
}

Bitmap boundary_mask(const RasterRegion& R) {
  Bitmap B = Bitmap::Zero(R.rows(), R.cols());
  for (Index r = 0; r < R.rows(); ++r)
    for (Index c = 0; c < R.cols(); ++c)
      if (R.set(r, c) && (!R.set(r + 1, c) || !R.set(r - 1, c) || !R.set(r, c + 1) || !R.set(r, c - 1)))
        B(r, c) = 1;
  return B;
}

std::vector<cplx> topological_boundary_raster(const RasterRegion& R) {
  require_valid_raster(R);
  const Bitmap B = boundary_mask(R);
  std::vector<cplx> out;
  for (Index r = 0; r < R.rows(); ++r)
    for (Index c = 0; c < R.cols(); ++c)
      if (B(r, c)) out.push_back(R.center(r, c));
  return out;
}

Eigen::ArrayXXi label_components(const Bitmap& mask, int connectivity, Index* count) {
  if (connectivity != 4 && connectivity != 8) throw InvalidArgument("connectivity must be 4 or 8");
  const Index rows = mask.rows(), cols = mask.cols();
  Eigen::ArrayXXi label = Eigen::ArrayXXi::Zero(rows, cols);
  int next = 0;
  std::queue<std::pair<Index, Index>> q;
  for (Index r0 = 0; r0 < rows; ++r0)
    for (Index c0 = 0; c0 < cols; ++c0) {
      if (!mask(r0, c0) || label(r0, c0)) continue;
      label(r0, c0) = ++next;
      q.emplace(r0, c0);
      while (!q.empty()) {
        const auto [r, c] = q.front();
        q.pop();
        for (Index dr = -1; dr <= 1; ++dr)
          for (Index dc = -1; dc <= 1; ++dc) {
            if ((dr == 0 && dc == 0) || (connectivity == 4 && dr != 0 && dc != 0)) continue;
            const Index rr = r + dr, cc = c + dc;
            if (rr < 0 || cc < 0 || rr >= rows || cc >= cols) continue;
            if (!mask(rr, cc) || label(rr, cc)) continue;
            label(rr, cc) = next;
            q.emplace(rr, cc);
          }
      }
    }
  if (count) *count = next;
  return label;
}

Index count_components(const Bitmap& mask, int connectivity) {
  Index n = 0;
  label_components(mask, connectivity, &n);
  return n;
}

namespace {

FiniteSpace sample_boundary(const RasterRegion& R, Index n) {
  const auto pts = topological_boundary_raster(R);
  if (n < 1 || static_cast<Index>(pts.size()) < n)
    throw EmptySample("boundary has " + std::to_string(pts.size()) + " pixels, requested " + std::to_string(n));
  std::vector<cplx> chosen{pts.front()};
  std::vector<double> dist(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) dist[k] = std::abs(pts[k] - pts.front());
  while (static_cast<Index>(chosen.size()) < n) {
    const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
    chosen.push_back(pts[far]);
    for (std::size_t k = 0; k < pts.size(); ++k) dist[k] = std::min(dist[k], std::abs(pts[k] - pts[far]));
  }
  return make_planar_space(std::move(chosen), "b");
}

FiniteSpace sample_grid(const RasterRegion& R, double step) {
  if (!(step > 0)) throw InvalidArgument("grid step must be positive");
  const double h = R.pixel_size;
  const cplx lo = R.center(0, 0), hi = R.center(R.rows() - 1, R.cols() - 1);
  const double half = step / 2;
  const Index reach = static_cast<Index>(std::ceil(half / h));
  std::vector<cplx> pts;
  for (Index j = static_cast<Index>(std::ceil(lo.imag() / step)); j * step <= hi.imag(); ++j)
    for (Index i = static_cast<Index>(std::ceil(lo.real() / step)); i * step <= hi.real(); ++i) {
      const cplx p(static_cast<double>(i) * step, static_cast<double>(j) * step);
      const auto [r, c] = R.nearest_pixel(p);
      if (!R.set(r, c)) continue;
      bool inside = true;
      for (Index dr = -reach; dr <= reach && inside; ++dr)
        for (Index dc = -reach; dc <= reach && inside; ++dc)
          if (std::abs(R.center(r + dr, c + dc) - p) <= half && !R.set(r + dr, c + dc)) inside = false;
      if (inside) pts.push_back(p);
    }
  if (pts.empty()) throw EmptySample("no interior grid point fits inside the region");
  return make_planar_space(std::move(pts), "g");
}

FiniteSpace sample_circle(const RasterRegion& R, const CircleSample& s) {
  if (s.n < 1 || !(s.radius > 0)) throw InvalidArgument("circle sample needs n >= 1 and radius > 0");
  std::vector<cplx> pts;
  for (Index k = 0; k < s.n; ++k) {
    const double t = 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(s.n);
    const cplx z = s.center + s.radius * cplx(std::cos(t), std::sin(t));
    if (!R.contains(z)) {
      std::ostringstream os;
      os << "circle sample " << k << " at (" << z.real() << "," << z.imag() << ") lies outside the region";
      throw EmptySample(os.str());
    }
    pts.push_back(z);
  }
  return make_planar_space(std::move(pts), "c");
}

}  // namespace

FiniteSpace sample_raster(const RasterRegion& R, const SampleStrategy& strategy) {
  require_valid_raster(R);
  return std::visit(
      [&](const auto& s) -> FiniteSpace {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoundaryUniform>)
          return sample_boundary(R, s.n);
        else if constexpr (std::is_same_v<T, InteriorGrid>)
          return sample_grid(R, s.step);
        else
          return sample_circle(R, s);
      },
      strategy);
}

}  // namespace shilov
