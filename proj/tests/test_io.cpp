#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>

#include "shilov/io.hpp"
#include "support.hpp"

using namespace shilov;
using io::Json;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("shilov_io_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("complex values are [re, im] pairs") {
  CHECK(io::to_json(cplx(1.5, -2)) == Json::parse("[1.5, -2.0]"));
  CHECK(io::complex_from_json(Json::parse("[0.25, 3]")) == cplx(0.25, 3));
  CHECK(io::complex_from_json(Json(2.0)) == cplx(2, 0));
  CHECK_THROWS_AS(io::complex_from_json(Json::parse("[1, 2, 3]")), io::FormatError);
  CHECK_THROWS_AS(io::complex_from_json(Json("x")), io::FormatError);
  CHECK_THROWS_AS(io::matrix_from_json(Json::parse("[[1, 2], [3]]")), io::FormatError);
}

TEST_CASE("property: vectors and matrices round-trip exactly") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const Index r = 1 + static_cast<Index>(rng() % 5), c = 1 + static_cast<Index>(rng() % 5);
    MatrixXc M(r, c);
    for (Index i = 0; i < r; ++i) M.row(i) = testing::random_vector(rng, c).transpose();
    const MatrixXc back = io::matrix_from_json(Json::parse(io::to_json(M).dump()));
    CHECK(back == M);
    const VectorXc v = M.col(0);
    CHECK(io::vector_from_json(io::to_json(v)) == v);
  }
}

TEST_CASE("algebras: presets by name and inline structure") {
  const Algebra D = io::algebra_from_json(Json("dual_numbers"));
  CHECK(D.dim() == 2);
  CHECK_THROWS_AS(io::algebra_from_json(Json("no_such_algebra")), io::FormatError);

  for (const char* name : {"pointwise_3", "dual_numbers", "truncated_poly_3", "cyclic_group_3"}) {
    const Algebra E = preset_algebra<double>(name);
    const Json j = io::to_json(E);
    CHECK(j["dim"] == E.dim());
    const Algebra F = io::algebra_from_json(Json::parse(j.dump()));
    REQUIRE(F.dim() == E.dim());
    for (Index i = 0; i < E.dim(); ++i) CHECK((F.left[i] - E.left[i]).norm() == 0);
    CHECK(F.unit == E.unit);
    CHECK(F.weights == E.weights);
    CHECK(F.label == E.label);
  }

  // e*e = e, e*g = g, g*g = e: the group algebra of Z2 written by hand.
  const Json z2 = Json::parse(R"({"structure": [[[[1,0],[0,0]], [[0,0],[1,0]]],
                                                [[[0,0],[1,0]], [[1,0],[0,0]]]],
                                  "unit": [[1,0],[0,0]], "weights": [1, 1], "label": "z2"})");
  const Algebra Z2 = io::algebra_from_json(z2);
  CHECK(validate_algebra(Z2).passed());
  CHECK(characters(Z2).size() == 2);

  Json bad = z2;
  bad["weights"] = Json::array({1});
  CHECK_THROWS_AS(io::algebra_from_json(bad), io::FormatError);
  bad = z2;
  bad.erase("unit");
  CHECK_THROWS_AS(io::algebra_from_json(bad), io::FormatError);
}

TEST_CASE("spaces and systems round-trip") {
  const FiniteSpace X = make_planar_space({{0, 0}, {0.5, 0}, {1, 0.25}});
  const FiniteSpace Y = io::space_from_json(io::to_json(X));
  CHECK(Y.labels == X.labels);
  REQUIRE(Y.coords);
  CHECK(*Y.coords == *X.coords);

  Eigen::MatrixXd d(2, 2);
  d << 0, 2, 2, 0;
  const FiniteSpace M = io::space_from_json(io::to_json(make_metric_space(d, {"p", "q"})));
  CHECK(M.labels == std::vector<std::string>{"p", "q"});
  CHECK(M.distance(0, 1) == 2);
  CHECK_THROWS_AS(io::space_from_json(Json::object()), io::FormatError);

  const FunctionSystem S = make_lip(X, preset_algebra<double>("dual_numbers"), 0.5);
  const FunctionSystem T = io::system_from_json(Json::parse(io::to_json(S).dump()));
  CHECK(T.dim() == S.dim());
  CHECK((T.basis - S.basis).norm() == 0);
  CHECK(T.norm.kind == NormTag::Kind::lipschitz);
  CHECK(T.norm.alpha == 0.5);
  CHECK(T.closed == S.closed);
}

TEST_CASE("certificate JSON re-verifies from the values alone") {
  // p(0) is the mean of p over the 8th roots of unity when deg p < 8.
  std::vector<cplx> pts;
  for (int k = 0; k < 8; ++k) pts.push_back(std::polar(1.0, 2 * M_PI * k / 8));
  pts.push_back(0);
  const FunctionSystem S = make_poly(make_planar_space(pts), complex_field<double>(), 3);
  const WitnessFamily W = witness_family(S);
  const ShilovEstimate est = shilov_estimate(W);
  const Json j = Json::parse(io::to_json(est, W).dump());
  const WitnessFamily W2 = io::witness_family_from_json(j["family"]);
  CHECK(W2.candidates == W.candidates);
  REQUIRE(j["certificates"].size() == static_cast<std::size_t>(W.size()));
  for (const auto& c : j["certificates"]) {
    if (c["status"] != "certified_peak") continue;
    const VectorXc a = W2.values * io::vector_from_json(c["coefficients"]);
    const Index t = c["target"];
    CHECK(std::abs(a(t) - 1.0) <= 1e-9);
    for (Index i = 0; i < a.size(); ++i)
      if (i != t) CHECK(std::abs(a(i)) <= 1 - c["separation"].get<double>() + 1e-12);
  }
  CHECK(j["peaks"].size() == 8);
  CHECK(j["not_peaks"] == Json::array({"x8"}));
}

TEST_CASE("PGM: P2 header, lowest row last, round trip") {
  RasterRegion R;
  R.grid = Bitmap::Zero(4, 3);
  R.grid(1, 1) = 1;
  R.origin = {-1, -2};
  R.pixel_size = 0.5;
  const std::string text = io::raster_pgm(R);
  CHECK(text == "P2\n3 4\n255\n0 0 0\n0 0 0\n0 255 0\n0 0 0\n");
  const RasterRegion back = io::raster_from_pgm(text, io::raster_sidecar(R));
  CHECK((back.grid == R.grid).all());
  CHECK(back.origin == R.origin);
  CHECK(back.pixel_size == R.pixel_size);
  CHECK_THROWS_AS(io::raster_from_pgm("P5\n1 1\n255\n0\n", io::raster_sidecar(R)), io::FormatError);
  CHECK_THROWS_AS(io::raster_from_pgm("P2\n2 2\n255\n0 0\n", io::raster_sidecar(R)), io::FormatError);
}

TEST_CASE("status overlay and CSV") {
  RasterRegion R;
  R.grid = Bitmap::Zero(3, 3);
  R.grid(1, 1) = 1;
  const std::vector<cplx> pts{{0, 0}, {1, 1}, {2, 2}, {7, 7}};
  const std::vector<PeakStatus> st{PeakStatus::certified_peak, PeakStatus::undecided, PeakStatus::certified_not_peak,
                                   PeakStatus::certified_peak};
  CHECK(io::status_overlay_pgm(R, pts, st) == "P2\n3 3\n255\n0 0 0\n0 128 0\n255 0 0\n");
  CHECK(io::status_csv(pts, st).rfind("x,y,status\n0,0,certified_peak\n1,1,undecided\n", 0) == 0);
  CHECK(io::points_csv({{0.5, -0.25}}) == "x,y\n0.5,-0.25\n");
}

TEST_CASE("FNV-1a reference values") {
  CHECK(io::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(io::fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(io::fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("dump is stable and files are replaced whole") {
  const Json j = Json::parse(R"({"b": 1, "a": [1, 2]})");
  CHECK(io::dump(j) == "{\n  \"a\": [\n    1,\n    2\n  ],\n  \"b\": 1\n}\n");

  const auto dir = scratch_dir("atomic");
  const std::string path = (dir / "nested" / "f.txt").string();
  io::write_file_atomic(path, "first");
  io::write_file_atomic(path, "second");
  CHECK(io::read_file(path) == "second");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  CHECK_THROWS_AS(io::read_file((dir / "missing").string()), Error);
}
