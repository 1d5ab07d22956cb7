#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "shilov/types.hpp"

namespace shilov {

/// A finite compact space: labelled points, optionally embedded in the
/// plane and optionally carrying an explicit metric. Without a metric the
/// Euclidean distance of the coordinates is used.
struct FiniteSpace {
  std::vector<std::string> labels;
  std::optional<std::vector<cplx>> coords;
  std::optional<Eigen::MatrixXd> metric;

  Index size() const { return static_cast<Index>(labels.size()); }
  bool has_distance() const { return metric.has_value() || coords.has_value(); }
  double distance(Index i, Index j) const;
  Eigen::MatrixXd distance_matrix() const;
  Index index_of(const std::string& label) const;
};

/// Points in the plane labelled prefix0, prefix1, ...
FiniteSpace make_planar_space(std::vector<cplx> coords, const std::string& prefix = "x");
FiniteSpace make_metric_space(Eigen::MatrixXd metric, std::vector<std::string> labels = {});
/// Concatenation of two planar spaces (labels kept, coordinates required).
FiniteSpace join_spaces(const FiniteSpace& a, const FiniteSpace& b);

/// Symmetry, positivity, zero diagonal and the triangle inequality (1e-12).
ValidationReport validate_metric(const FiniteSpace& X);

// ---------------------------------------------------------------- rasters

using Bitmap = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Plane region as a bitmap. Pixel (r, c) has center
/// origin + pixel_size * (c + i r); row 0 is the lowest row. The outermost
/// rows and columns are always unset.
struct RasterRegion {
  Bitmap grid;
  cplx origin{0.0, 0.0};
  double pixel_size = 1.0;

  Index rows() const { return grid.rows(); }
  Index cols() const { return grid.cols(); }
  cplx center(Index r, Index c) const {
    return origin + pixel_size * cplx(static_cast<double>(c), static_cast<double>(r));
  }
  bool set(Index r, Index c) const {
    return r >= 0 && c >= 0 && r < rows() && c < cols() && grid(r, c) != 0;
  }
  /// Pixel whose center is nearest to z (may lie outside the grid).
  std::pair<Index, Index> nearest_pixel(cplx z) const;
  /// z lies in the region up to one pixel: its nearest pixel or one of that
  /// pixel's 8 neighbours is set.
  bool contains(cplx z) const;
  Index count() const;
};

/// Throws InvalidArgument unless the region is nonempty with an empty margin.
void require_valid_raster(const RasterRegion& R);

struct Disk {
  cplx center;
  double radius;
};
struct Annulus {
  cplx center;
  double inner;
  double outer;
};
using ShapePart = std::variant<Disk, Annulus>;
/// Union of parts.
using Shape = std::vector<ShapePart>;

bool shape_contains(const Shape& shape, cplx z);
/// Empty string when the shape is well formed, otherwise the reason.
std::string shape_problem(const Shape& shape);

/// Pixel p is set iff its center lies in the (closed) shape. Pixel centers
/// sit on the lattice pixel_size * Z^2 with pixel_size = 1 / resolution, so
/// rasters of shapes with the same extent share the same grid.
RasterRegion raster_from_shape(const Shape& shape, double resolution);

/// R together with every bounded 4-connected component of its complement.
RasterRegion polynomial_hull_raster(const RasterRegion& R);
/// Identity: rationally convex hulls of plane sets add nothing.
RasterRegion rational_hull_raster(const RasterRegion& R);

/// Set pixels with at least one unset 4-neighbour.
Bitmap boundary_mask(const RasterRegion& R);
std::vector<cplx> topological_boundary_raster(const RasterRegion& R);

/// Component labels (0 = not in mask, 1..k) with 4- or 8-connectivity.
Eigen::ArrayXXi label_components(const Bitmap& mask, int connectivity, Index* count = nullptr);
Index count_components(const Bitmap& mask, int connectivity);

struct BoundaryUniform {
  Index n;
};
struct InteriorGrid {
  double step;
};
struct CircleSample {
  cplx center;
  double radius;
  Index n;
};
using SampleStrategy = std::variant<BoundaryUniform, InteriorGrid, CircleSample>;

/// Discretizes a region into a planar FiniteSpace.
///  - BoundaryUniform: n boundary pixel centers by farthest-point selection.
///  - InteriorGrid: points of step * Z^2 whose disk of radius step / 2 has
///    only set pixel centers.
///  - CircleSample: the exact points center + radius * exp(2 pi i k / n),
///    each of which must lie in R.
/// Throws EmptySample when nothing (or not enough) can be sampled.
FiniteSpace sample_raster(const RasterRegion& R, const SampleStrategy& strategy);

}  // namespace shilov
