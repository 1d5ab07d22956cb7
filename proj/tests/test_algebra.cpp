#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shilov/algebra.hpp"
#include "shilov/gelfand.hpp"
#include "support.hpp"

using namespace shilov;
using shilov::testing::random_algebra;
using shilov::testing::random_vector;

namespace {
VectorXc vec(std::initializer_list<cplx> xs) {
  VectorXc v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (auto x : xs) v(i++) = x;
  return v;
}
}  // namespace

TEST_CASE("multiply on defining relations") {
  const auto D = dual_numbers();
  CHECK(multiply(D, vec({0, 1}), vec({0, 1})).norm() == doctest::Approx(0.0));

  const auto P = pointwise_algebra(2);
  CHECK(multiply(P, vec({1, 0}), vec({0, 1})).norm() == doctest::Approx(0.0));

  const auto Z2 = cyclic_group_algebra(2);
  const VectorXc gg = multiply(Z2, vec({0, 1}), vec({0, 1}));
  CHECK((gg - vec({1, 0})).norm() < 1e-15);

  CHECK_THROWS_AS(multiply(D, vec({1, 0, 0}), vec({1, 0})), DimensionMismatch);
  CHECK_THROWS_AS(multiply(D, vec({1, 0}), vec({1})), DimensionMismatch);
}

TEST_CASE("weighted l1 norm") {
  CHECK(norm(dual_numbers(), vec({1, 1})) == doctest::Approx(2.0));
  CHECK(norm(pointwise_algebra(3), VectorXc::Zero(3).eval()) == 0.0);
  CHECK(norm(pointwise_algebra(2), vec({3, cplx(0, 4)})) == doctest::Approx(7.0));
}

TEST_CASE("validate_algebra") {
  SUBCASE("presets pass") {
    for (const char* name : {"complex", "pointwise_3", "dual_numbers", "truncated_poly_3",
                             "truncated_poly_5", "cyclic_group_2", "cyclic_group_4"}) {
      CAPTURE(name);
      CHECK(validate_algebra(preset_algebra<double>(name)).passed());
    }
  }
  SUBCASE("noncommutative tensor names the pair") {
    auto E = truncated_poly_algebra(3);
    E.left[1](0, 2) = 1.0;  // t * t^2 := 1 while t^2 * t stays 0
    const auto rep = validate_algebra(E);
    const Check* c = rep.find("commutativity");
    REQUIRE(c != nullptr);
    CHECK_FALSE(c->passed);
    CHECK(c->detail.find("(1,2)") != std::string::npos);
    CHECK(c->residual > 0.5);
  }
  SUBCASE("submultiplicativity certificate for Z2 with weights (1, 0.5)") {
    auto E = cyclic_group_algebra(2);
    E.weights << 1.0, 0.5;
    const auto rep = validate_algebra(E);
    const Check* c = rep.find("submultiplicativity");
    REQUIRE(c != nullptr);
    CHECK_FALSE(c->passed);
    // ||g g|| = ||1|| = 1 against w_g^2 = 0.25
    CHECK(c->residual == doctest::Approx(0.75));
    CHECK(c->detail.find("(1,1)") != std::string::npos);
  }
  SUBCASE("broken unit") {
    auto E = dual_numbers();
    E.unit << 1.0, 1.0;
    CHECK_FALSE(validate_algebra(E).find("unit")->passed);
  }
}

TEST_CASE("invert") {
  const auto D = dual_numbers();
  CHECK((invert(D, D.unit) - D.unit).norm() < 1e-12);
  // L_{1+eps} = [[1,0],[1,1]]; solving L x = (1,0) gives x = (1,-1)
  CHECK((invert(D, vec({1, 1})) - vec({1, -1})).norm() < 1e-12);
  CHECK_THROWS_AS(invert(D, vec({0, 1})), NotInvertible);
  CHECK_THROWS_AS(invert(pointwise_algebra(2), vec({1, 0})), NotInvertible);
}

TEST_CASE("presets") {
  CHECK(pointwise_algebra(2).dim() == 2);
  const auto Z3 = cyclic_group_algebra(3);
  const VectorXc g = Z3.basis_vector(1);
  CHECK((power(Z3, g, 3) - Z3.unit).norm() < 1e-15);
  CHECK(preset_algebra<double>("truncated_poly_4").dim() == 4);
  CHECK_THROWS_AS(preset_algebra<double>("pointwise_0"), InvalidArgument);
  CHECK_THROWS_AS(preset_algebra<double>("truncated_poly_1"), InvalidArgument);
  CHECK_THROWS_AS(preset_algebra<double>("octonions"), InvalidArgument);
  CHECK_THROWS_AS(preset_algebra<double>(PresetKind::cyclic_group, 0), InvalidArgument);
}

TEST_CASE("radical of presets") {
  CHECK(radical(pointwise_algebra(2)).empty());

  const auto rd = radical(dual_numbers());
  REQUIRE(rd.size() == 1);
  CHECK((rd[0] - vec({0, 1})).norm() < 1e-12);

  const auto rt = radical(truncated_poly_algebra(3));
  REQUIRE(rt.size() == 2);
  CHECK((rt[0] - vec({0, 1, 0})).norm() < 1e-12);
  CHECK((rt[1] - vec({0, 0, 1})).norm() < 1e-12);

  const auto rc = radical(complex_field());
  CHECK(rc.empty());
}

TEST_CASE("property: submultiplicative norm, bilinearity, inverse involution") {
  std::mt19937_64 rng(20261019);
  for (int trial = 0; trial < 12; ++trial) {
    const auto E = random_algebra(rng);
    REQUIRE(validate_algebra(E).passed());
    const Index n = E.dim();
    for (int s = 0; s < 200; ++s) {
      const VectorXc a = random_vector(rng, n), b = random_vector(rng, n), c = random_vector(rng, n);
      const double lhs = norm(E, multiply(E, a, b));
      CHECK(lhs <= norm(E, a) * norm(E, b) + 1e-9);
      const cplx alpha = shilov::testing::random_complex(rng);
      const VectorXc l = multiply(E, (alpha * a + b).eval(), c);
      const VectorXc r = alpha * multiply(E, a, c) + multiply(E, b, c);
      CHECK((l - r).cwiseAbs().maxCoeff() < 1e-10 * (1 + r.cwiseAbs().maxCoeff()));
    }
    for (int s = 0; s < 20; ++s) {
      const VectorXc a = (E.unit + 0.3 * random_vector(rng, n)).eval();
      VectorXc inv;
      try {
        inv = invert(E, a);
      } catch (const NotInvertible&) {
        continue;
      }
      CHECK((multiply(E, a, inv) - E.unit).norm() < 1e-9);
      CHECK((invert(E, inv) - a).norm() < 1e-8 * (1 + a.norm()));
    }
  }
}

TEST_CASE("property: radical vectors are nilpotent and killed by characters") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto E = random_algebra(rng);
    const auto chars = characters(E);
    const auto rad = radical(E, chars);
    CHECK(static_cast<Index>(rad.size() + chars.size()) == E.dim());
    for (const auto& r : rad) {
      CHECK(power(E, r, static_cast<int>(E.dim())).cwiseAbs().maxCoeff() < 1e-8);
      for (const auto& chi : chars) CHECK(std::abs(chi(r)) < 1e-8);
    }
  }
}

TEST_CASE("templated on the real type") {
  const auto E = truncated_poly_algebra<long double>(3);
  CHECK(validate_algebra(E).passed());
  const auto chars = characters(E);
  REQUIRE(chars.size() == 1);
  CHECK(std::abs(chars[0].values(0) - std::complex<long double>(1)) < 1e-12L);
  CHECK(radical(E, chars).size() == 2);
}
