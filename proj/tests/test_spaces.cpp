#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "shilov/spaces.hpp"

using namespace shilov;

namespace {

// Random bitmap with an empty margin: union of a few random pixel blobs.
RasterRegion random_blob(std::mt19937_64& rng, Index size = 40) {
  RasterRegion R;
  R.pixel_size = 0.05;
  R.grid = Bitmap::Zero(size, size);
  std::uniform_int_distribution<Index> pos(1, size - 2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int k = 0; k < 6; ++k) {
    const Index r = pos(rng), c = pos(rng);
    const double rad = 2 + 6 * u(rng);
    for (Index i = 1; i < size - 1; ++i)
      for (Index j = 1; j < size - 1; ++j) {
        const double d = std::hypot(double(i - r), double(j - c));
        if (d <= rad && d >= rad * 0.6 * u(rng)) R.grid(i, j) = 1;
      }
  }
  R.grid(size / 2, size / 2) = 1;
  return R;
}

bool subset(const Bitmap& a, const Bitmap& b) { return ((a != 0) && (b == 0)).count() == 0; }

}  // namespace

TEST_CASE("validate_metric") {
  Eigen::MatrixXd D(2, 2);
  D << 0, 1, 1, 0;
  CHECK(validate_metric(make_metric_space(D)).passed());

  D << 0, 0, 0, 0;
  const auto rep = validate_metric(make_metric_space(D));
  CHECK_FALSE(rep.find("positivity")->passed);

  Eigen::MatrixXd T(3, 3);
  T << 0, 1, 5, 1, 0, 1, 5, 1, 0;
  const auto tri = validate_metric(make_metric_space(T, {"a", "b", "c"}));
  CHECK_FALSE(tri.find("triangle")->passed);
  CHECK(tri.find("triangle")->detail == "(a,b,c)");

  CHECK(validate_metric(make_planar_space({0.0, 1.0, cplx(0, 1)})).passed());
  CHECK_FALSE(validate_metric(FiniteSpace{{"p"}, {}, {}}).passed());
}

TEST_CASE("raster_from_shape component structure") {
  const auto disk = raster_from_shape({Disk{0.0, 1.0}}, 16);
  CHECK(count_components(disk.grid, 4) == 1);
  // complement: only the unbounded component
  CHECK(count_components((disk.grid == 0).cast<std::uint8_t>(), 4) == 1);

  const auto ann = raster_from_shape({Annulus{0.0, 0.5, 1.0}}, 16);
  CHECK(count_components((ann.grid == 0).cast<std::uint8_t>(), 4) == 2);

  const auto two = raster_from_shape({Disk{-2.0, 0.5}, Disk{2.0, 0.5}}, 16);
  CHECK(count_components(two.grid, 4) == 2);

  CHECK_THROWS_AS(raster_from_shape({Annulus{0.0, 1.0, 0.5}}, 16), InvalidArgument);
  CHECK_THROWS_AS(raster_from_shape({Annulus{0.0, 0.0, 0.5}}, 16), InvalidArgument);
  CHECK_THROWS_AS(raster_from_shape({Disk{0.0, 1.0}}, 4), InvalidArgument);
}

TEST_CASE("polynomial hull fills the annulus hole") {
  for (double res : {16.0, 32.0}) {
    const auto ann = raster_from_shape({Annulus{0.0, 0.5, 1.0}}, res);
    const auto disk = raster_from_shape({Disk{0.0, 1.0}}, res);
    const auto hull = polynomial_hull_raster(ann);
    REQUIRE(hull.grid.rows() == disk.grid.rows());
    REQUIRE(hull.grid.cols() == disk.grid.cols());
    CHECK((hull.grid == disk.grid).all());
    CHECK(hull.origin == disk.origin);
  }
  const auto disk = raster_from_shape({Disk{0.3, 0.7}}, 20);
  CHECK((polynomial_hull_raster(disk).grid == disk.grid).all());
}

TEST_CASE("rational hull is the identity in the plane") {
  const auto ann = raster_from_shape({Annulus{0.0, 0.5, 1.0}}, 16);
  const auto r = rational_hull_raster(ann);
  CHECK((r.grid == ann.grid).all());
  CHECK_NOTHROW(require_valid_raster(r));
}

TEST_CASE("property: hull is extensive, idempotent, monotone; complement connected") {
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<Index> pos(1, 38);
  for (int t = 0; t < 50; ++t) {
    const auto R = random_blob(rng);
    const auto H = polynomial_hull_raster(R);
    CHECK(subset(R.grid, H.grid));
    CHECK((polynomial_hull_raster(H).grid == H.grid).all());
    CHECK(count_components((H.grid == 0).cast<std::uint8_t>(), 4) == 1);

    RasterRegion bigger = R;
    for (int k = 0; k < 30; ++k) bigger.grid(pos(rng), pos(rng)) = 1;
    CHECK(subset(H.grid, polynomial_hull_raster(bigger).grid));
  }
}

TEST_CASE("topological boundary") {
  const auto disk = raster_from_shape({Disk{0.0, 1.0}}, 16);
  const auto pts = topological_boundary_raster(disk);
  REQUIRE(!pts.empty());
  for (cplx z : pts) CHECK(std::abs(std::abs(z) - 1.0) <= disk.pixel_size);

  const auto ann = raster_from_shape({Annulus{0.0, 0.5, 1.0}}, 16);
  CHECK(count_components(boundary_mask(ann), 8) == 2);
  CHECK(count_components(boundary_mask(polynomial_hull_raster(ann)), 8) == 1);

  RasterRegion full;
  full.pixel_size = 1;
  full.grid = Bitmap::Zero(6, 7);
  full.grid.block(1, 1, 4, 5).setOnes();
  const Bitmap B = boundary_mask(full);
  CHECK(B.count() == 4 * 5 - 2 * 3);
  CHECK((B.block(2, 2, 2, 3) == 0).all());
}

TEST_CASE("sample_raster") {
  const auto disk = raster_from_shape({Disk{0.0, 1.0}}, 16);
  const auto C = sample_raster(disk, CircleSample{0.0, 1.0, 4});
  REQUIRE(C.size() == 4);
  const cplx expect[] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
  for (int k = 0; k < 4; ++k) CHECK(std::abs((*C.coords)[k] - expect[k]) < 1e-15);

  const auto ann = raster_from_shape({Annulus{0.0, 0.5, 1.0}}, 32);
  const auto G = sample_raster(ann, InteriorGrid{0.15});
  REQUIRE(G.size() > 10);
  for (cplx z : *G.coords) {
    CHECK(std::abs(z) > 0.5);
    CHECK(std::abs(z) < 1.0);
  }

  const auto B = sample_raster(disk, BoundaryUniform{8});
  REQUIRE(B.size() == 8);
  for (cplx z : *B.coords) CHECK(std::abs(std::abs(z) - 1.0) <= disk.pixel_size);
  // farthest-point selection spreads the points out
  double min_gap = 10;
  for (Index i = 0; i < 8; ++i)
    for (Index j = i + 1; j < 8; ++j) min_gap = std::min(min_gap, B.distance(i, j));
  CHECK(min_gap > 0.5);

  CHECK(validate_metric(B).passed());
  CHECK(validate_metric(G).passed());

  CHECK_THROWS_AS(sample_raster(disk, CircleSample{0.0, 2.0, 4}), EmptySample);
  CHECK_THROWS_AS(sample_raster(disk, BoundaryUniform{100000}), EmptySample);
  CHECK_THROWS_AS(sample_raster(disk, InteriorGrid{5.0}), EmptySample);
  // inner circle of the annulus sits on the region's edge and still counts
  CHECK(sample_raster(ann, CircleSample{0.0, 0.5, 48}).size() == 48);
}
