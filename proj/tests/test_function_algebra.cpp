#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "shilov/function_algebra.hpp"

using namespace shilov;

namespace {

const cplx I(0, 1);

FiniteSpace generic3() { return make_planar_space({cplx(0.3, 0.1), cplx(-0.7, 0.4), cplx(0.2, -0.9)}); }

FiniteSpace line(std::vector<double> xs) {
  std::vector<cplx> z(xs.begin(), xs.end());
  return make_planar_space(z);
}

ValueTable scalar_table(std::vector<cplx> v) {
  ValueTable t(static_cast<Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) t(static_cast<Index>(i)) = v[i];
  return t;
}

VectorXc vec(std::initializer_list<cplx> v) {
  VectorXc out(static_cast<Index>(v.size()));
  Index i = 0;
  for (cplx c : v) out(i++) = c;
  return out;
}

// Independent rank oracle: SVD of the flattened basis.
Index rank_of(const FunctionSystem& S) { return numerical_rank(S.basis, 1e-10); }

bool same_span(const FunctionSystem& A, const FunctionSystem& B) {
  for (Index j = 0; j < A.dim(); ++j)
    if (!span_membership(B, A.table(j))) return false;
  for (Index j = 0; j < B.dim(); ++j)
    if (!span_membership(A, B.table(j))) return false;
  return true;
}

Quadruple standard(const FiniteSpace& X, const Algebra& E) {
  return {"standard", X, E, make_CXE(X, complex_field()), make_CXE(X, E)};
}

}  // namespace

TEST_CASE("evaluate") {
  const auto X = make_planar_space({1.0, I});
  const auto P = make_poly(X, complex_field(), 1);
  const VectorXc one = *span_membership(P, constant_table(X, P.scalars, P.scalars.unit));
  CHECK(std::abs(evaluate(P, one, "x1")(0) - 1.0) < 1e-14);
  const VectorXc z = *span_membership(P, scalar_table({1.0, I}));
  CHECK(std::abs(evaluate(P, z, 1)(0) - I) < 1e-14);
  const auto z2 = pointwise_product(P.scalars, P.combine(z), P.combine(z));
  CHECK(std::abs(z2(1, 0) + 1.0) < 1e-14);
  CHECK_THROWS_AS(evaluate(P, z, 5), InvalidArgument);
  CHECK_THROWS_AS(evaluate(P, z, "nowhere"), InvalidArgument);
}

TEST_CASE("norms") {
  const auto E = dual_numbers();
  const auto X = line({0, 1});
  CHECK(sup_norm(E, constant_table(X, E, E.unit)) == doctest::Approx(1));

  const auto circle = make_planar_space({1.0, I, -1.0, -I, std::polar(1.0, 0.3)});
  CHECK(sup_norm(complex_field(), scalar_table(*circle.coords)) == doctest::Approx(1));

  ValueTable eps(2, 2);
  eps << 0, 0, 0, 1;  // x -> eps x on {0,1}
  CHECK(sup_norm(E, eps) == doctest::Approx(1));

  CHECK(lipschitz_seminorm(X, E, constant_table(X, E, E.unit), 1) == 0);
  const auto f = scalar_table({0.0, 1.0});
  CHECK(lipschitz_seminorm(X, complex_field(), f, 1) == doctest::Approx(1));
  CHECK(lipschitz_norm(X, complex_field(), f, 1) == doctest::Approx(2));

  const auto X3 = line({0, 0.25, 1});
  // pairs: 0.25/0.5, 1/1, 0.75/sqrt(0.75)
  const double expect = std::max({0.25 / std::sqrt(0.25), 1.0, 0.75 / std::sqrt(0.75)});
  CHECK(lipschitz_seminorm(X3, complex_field(), scalar_table({0.0, 0.25, 1.0}), 0.5) == doctest::Approx(expect));

  CHECK_THROWS_AS(lipschitz_seminorm(FiniteSpace{{"a", "b"}, {}, {}}, complex_field(), f, 1), InvalidArgument);
}

TEST_CASE("span_membership") {
  const auto X = line({-1, 1});
  const auto P = make_poly(X, complex_field(), 1);
  for (Index j = 0; j < P.dim(); ++j) {
    const auto c = span_membership(P, P.table(j));
    REQUIRE(c);
    CHECK((*c - VectorXc::Unit(P.dim(), j)).norm() < 1e-12);
  }
  const auto c = span_membership(P, scalar_table({1.0, 1.0}));
  REQUIRE(c);
  CHECK((*c - vec({1.0, 0.0})).norm() < 1e-12);

  const auto Q = make_poly(line({0, 1, 2}), complex_field(), 1);
  CHECK_FALSE(span_membership(Q, scalar_table({0.0, 1.0, 4.0})));
}

TEST_CASE("close_under_products") {
  const auto P = make_poly(generic3(), complex_field(), 1);
  CHECK(P.dim() == 2);
  CHECK_FALSE(P.closed);
  const auto C = close_under_products(P);
  CHECK(C.dim() == 3);
  CHECK(C.closed);
  CHECK(rank_of(C) == 3);

  const auto Pm = make_poly(line({-1, 1}), complex_field(), 1);
  CHECK(Pm.closed);
  CHECK(close_under_products(Pm).dim() == 2);

  const auto E = dual_numbers();
  const auto X = generic3();
  std::vector<ValueTable> gens;
  for (Index k = 0; k < 2; ++k) gens.push_back(constant_table(X, E, VectorXc::Unit(2, k)));
  ValueTable z = ValueTable::Zero(3, 2);
  z.col(0) = Eigen::Map<const VectorXc>(X.coords->data(), 3);
  gens.push_back(z);
  const auto D = close_under_products(make_system(X, E, gens));
  CHECK(D.dim() == 6);
  CHECK(same_span(D, make_CXE(X, E)));
}

TEST_CASE("constructors") {
  const auto X2 = line({0, 1});
  CHECK(make_CXE(X2, pointwise_algebra(2)).dim() == 4);
  CHECK(make_poly(generic3(), complex_field(), 2).dim() == 3);
  CHECK(make_poly(generic3(), complex_field(), 2).closed);

  std::vector<cplx> ring;
  for (int k = 0; k < 12; ++k) ring.push_back(std::polar(k % 2 ? 0.5 : 1.0, 2 * M_PI * k / 12));
  const auto A = make_planar_space(ring);
  const auto R = make_rational(A, complex_field(), 2, {0.0});
  CHECK(R.dim() == 5);
  std::vector<cplx> inv, inv2;
  for (cplx z : ring) inv.push_back(1.0 / z), inv2.push_back(1.0 / (z * z));
  CHECK(span_membership(R, scalar_table(inv)));
  CHECK(span_membership(R, scalar_table(inv2)));
  CHECK_THROWS_AS(make_rational(A, complex_field(), 1, {1.0}), InvalidArgument);

  const auto L = make_lip(X2, dual_numbers(), 0.5);
  CHECK(L.norm.kind == NormTag::Kind::lipschitz);
  CHECK(L.dim() == 4);
  CHECK_THROWS_AS(make_lip(FiniteSpace{{"a"}, {}, {}}, complex_field(), 1), InvalidArgument);
  CHECK_THROWS_AS(make_lip(X2, complex_field(), 1.5), InvalidArgument);
  CHECK_THROWS_AS(make_poly(FiniteSpace{{"a"}, {}, {}}, complex_field(), 1), InvalidArgument);
  CHECK_THROWS_AS(make_system(X2, complex_field(), {scalar_table({0.0, 1.0})}), InvalidArgument);
}

TEST_CASE("span_BE") {
  const auto X = generic3();
  const auto E = truncated_poly_algebra(3);
  CHECK(same_span(span_BE(make_CXE(X, complex_field()), E), make_CXE(X, E)));
  CHECK(rank_of(span_BE(make_CXE(X, complex_field()), E)) == 9);

  const auto one = make_planar_space({0.5});
  CHECK(span_BE(make_CXE(one, complex_field()), E).dim() == 3);

  const auto Pm = make_poly(line({-1, 1}), complex_field(), 1);
  CHECK(span_BE(Pm, pointwise_algebra(2)).dim() == 4);
  CHECK_THROWS_AS(span_BE(make_CXE(X, E), E), InvalidArgument);
}

TEST_CASE("check_admissible") {
  const auto X = generic3();
  for (const auto& E : {complex_field(), dual_numbers(), pointwise_algebra(2), cyclic_group_algebra(3)}) {
    const auto rep = check_admissible(standard(X, E));
    CHECK_MESSAGE(rep.passed(), E.label);
    CHECK(rep.checks.size() >= 6);
  }

  const auto X2 = line({0, 1});
  Quadruple constants{"constants", X2, complex_field(),
                      make_system(X2, complex_field(), {scalar_table({1.0, 1.0})}, NormTag::sup(), true),
                      make_CXE(X2, complex_field())};
  const auto rc = check_admissible(constants);
  CHECK_FALSE(rc.find("(3) B natural")->passed);

  // B~ without the constant eps function
  const auto E = dual_numbers();
  std::vector<ValueTable> tabs;
  tabs.push_back(constant_table(X2, E, E.unit));
  ValueTable d1 = ValueTable::Zero(2, 2), eps_at_1 = ValueTable::Zero(2, 2);
  d1(1, 0) = 1;
  eps_at_1(1, 1) = 1;
  tabs.push_back(d1);
  tabs.push_back(eps_at_1);
  Quadruple missing{"missing", X2, E, make_CXE(X2, complex_field()), make_system(X2, E, tabs)};
  const auto rm = check_admissible(missing);
  CHECK_FALSE(rm.find("(5) B.E in B~")->passed);
  CHECK(rm.find("(3) B natural")->passed);

  // non-closed B is rejected with a diagnostic
  const auto X3 = generic3();
  Quadruple open{"open", X3, complex_field(), make_poly(X3, complex_field(), 1), make_CXE(X3, complex_field())};
  const auto ro = check_admissible(open);
  CHECK_FALSE(ro.find("(3) B natural")->passed);
  CHECK(ro.find("(3) B natural")->detail.find("closed") != std::string::npos);
}

TEST_CASE("build_pi and naturality") {
  const auto X = generic3();
  const auto Qc = standard(X, complex_field());
  CHECK(build_pi(Qc).size() == 3);

  const auto X2 = line({0, 1});
  const auto Q2 = standard(X2, pointwise_algebra(2));
  const auto pi = build_pi(Q2);
  CHECK(pi.size() == 4);
  CHECK(check_pi_injective(Q2));
  const auto alg = as_algebra(Q2.vector);
  for (const auto& p : pi) CHECK(verify_character(alg, p.functional).passed());

  const auto Qd = standard(X, dual_numbers());
  CHECK(build_pi(Qd).size() == 3);

  for (const auto& E : {complex_field(), dual_numbers(), pointwise_algebra(2), cyclic_group_algebra(3)})
    CHECK_MESSAGE(check_natural(standard(X, E)), E.label);

  const auto B = make_poly(generic3(), complex_field(), 2);
  CHECK(check_natural({"scalar", X, complex_field(), B, B}));

  Eigen::MatrixXd D(3, 3);
  D << 0, 1, 2, 1, 0, 1.5, 2, 1.5, 0;
  const auto M = make_metric_space(D, {"p", "q", "r"});
  const auto E = pointwise_algebra(2);
  const Quadruple lip{"lip", M, E, make_lip(M, complex_field(), 0.5), make_lip(M, E, 0.5)};
  CHECK(check_admissible(lip).passed());
  CHECK(check_natural(lip));
  CHECK(characters(as_algebra(lip.vector)).size() == 6);
}

TEST_CASE("embedding_constant") {
  CHECK(embedding_constant(make_CXE(generic3(), dual_numbers())) == 1.0);

  const auto X = line({0, 1});
  const auto lip_const = make_system(X, complex_field(), {scalar_table({1.0, 1.0})}, NormTag::lipschitz(1));
  CHECK(embedding_constant(lip_const) == doctest::Approx(1));

  const auto lin = make_system(X, complex_field(), {scalar_table({1.0, 1.0}), scalar_table({0.0, 1.0})},
                               NormTag::lipschitz(1));
  // f(x) = x: sup 1, seminorm 1
  CHECK(sup_norm(lin.scalars, lin.table(1)) / system_norm(lin, lin.table(1)) == doctest::Approx(0.5));
  CHECK(embedding_constant(lin) >= 0.5);
}

TEST_CASE("separation_check") {
  const auto X = generic3();
  CHECK(separation_check(make_CXE(X, dual_numbers())));
  CHECK_FALSE(separation_check(make_system(X, complex_field(), {scalar_table({1.0, 1.0, 1.0})})));
  CHECK(separation_check(make_poly(X, complex_field(), 1)));
}

TEST_CASE("property: closure is extensive, monotone, idempotent") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> count(0, 2);
  const std::vector<Algebra> scalars = {complex_field(), dual_numbers(), pointwise_algebra(2)};
  for (int t = 0; t < 40; ++t) {
    const auto& E = scalars[t % scalars.size()];
    std::vector<cplx> pts;
    for (int i = 0; i < 4; ++i) pts.push_back(cplx(g(rng), g(rng)));
    const auto X = make_planar_space(pts);
    auto random_table = [&] {
      ValueTable f(X.size(), E.dim());
      for (Index i = 0; i < f.size(); ++i) f(i) = cplx(g(rng), g(rng));
      // sparse support keeps the closure from saturating immediately
      for (Index x = 0; x < X.size(); ++x)
        if (count(rng) == 0) f.row(x).setZero();
      return f;
    };
    std::vector<ValueTable> small{constant_table(X, E, E.unit), random_table()};
    std::vector<ValueTable> large = small;
    large.push_back(random_table());
    const auto S = make_system(X, E, small), L = make_system(X, E, large);
    const auto cS = close_under_products(S), cL = close_under_products(L);
    for (Index j = 0; j < S.dim(); ++j) CHECK(span_membership(cS, S.table(j)));
    for (Index j = 0; j < cS.dim(); ++j) CHECK(span_membership(cL, cS.table(j)));
    CHECK(close_under_products(cS).dim() == cS.dim());
    CHECK(products_in_span(cS));
    CHECK(rank_of(cS) == cS.dim());

    // characters of the closed system: dim minus radical
    const auto A = as_algebra(cS);
    CHECK(validate_algebra(A).passed());
    CHECK(characters(A).size() + radical(A).size() == static_cast<std::size_t>(cS.dim()));
  }
}

TEST_CASE("property: Hausner count and pi characters") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g;
  const std::vector<Algebra> scalars = {complex_field(), dual_numbers(), pointwise_algebra(3),
                                        cyclic_group_algebra(2), truncated_poly_algebra(3)};
  for (int t = 0; t < 15; ++t) {
    const auto& E = scalars[t % scalars.size()];
    std::vector<cplx> pts;
    for (int i = 0; i < 1 + t % 3; ++i) pts.push_back(cplx(g(rng), g(rng)));
    const auto Q = standard(make_planar_space(pts), E);
    const auto alg = as_algebra(Q.vector);
    CHECK(characters(alg).size() == characters(E).size() * pts.size());
    for (const auto& p : build_pi(Q)) CHECK(verify_character(alg, p.functional).passed());
    CHECK(check_pi_injective(Q));
  }
}

TEST_CASE("property: embedding bound holds on random functions") {
  Eigen::MatrixXd D(4, 4);
  D << 0, 1, 2, 2.5, 1, 0, 1.2, 2, 2, 1.2, 0, 1, 2.5, 2, 1, 0;
  const auto M = make_metric_space(D);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (const auto& S : {make_lip(M, dual_numbers(), 0.7), make_CXE(M, pointwise_algebra(2))}) {
    const double c = embedding_constant(S);
    for (int t = 0; t < 10000; ++t) {
      VectorXc coeffs(S.dim());
      for (Index j = 0; j < S.dim(); ++j) coeffs(j) = cplx(g(rng), g(rng));
      const auto f = S.combine(coeffs);
      CHECK(sup_norm(S.scalars, f) <= c * system_norm(S, f) * (1 + 1e-12));
    }
  }
}
