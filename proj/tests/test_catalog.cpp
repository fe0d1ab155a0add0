#include <catch2/catch_amalgamated.hpp>

#include "bsymp/catalog.hpp"
#include "bsymp/classify.hpp"

using namespace bsymp;
using namespace bsymp::models;
using bsymp::sym::Expression;
using bsymp::sym::parse;

namespace {
Expression E(const std::string& s) { return parse(s); }
}  // namespace

TEST_CASE("levi-civita point transformation") {
  Model m = levi_civita_point();

  // omega = u1 du1^dp1 + u2 du1^dp2 + u2 du2^dp1 + u1 du2^dp2, the closed
  // representative whose square degenerates along u1 = +-u2
  geo::DifferentialForm expect(m.chart, 2);
  expect.add({0, 2}, E("u1"));
  expect.add({0, 3}, E("u2"));
  expect.add({1, 2}, E("u2"));
  expect.add({1, 3}, E("u1"));
  CHECK(m.form == expect);

  CHECK(ext_d(m.form).is_zero());
  REQUIRE(m.liouville.has_value());
  CHECK(-ext_d(*m.liouville) == m.form);

  // top power against du1^du2^dp1^dp2
  CHECK(geo::top_coefficient(geo::top_power(m.form)) == E("-2*u1^(2) + 2*u2^(2)"));

  // nondegenerate at (1,0,0,1): determinant 1
  Eigen::MatrixXd mat = geo::matrix_at(m.form, {{"u1", 1}, {"u2", 0}, {"p1", 0}, {"p2", 1}});
  CHECK(mat.determinant() == Catch::Approx(1.0));

  // rank drops to 2 on the fold u1 = u2 = 1
  Eigen::MatrixXd fold = geo::matrix_at(m.form, {{"u1", 1}, {"u2", 1}, {"p1", 0}, {"p2", 0}});
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(fold);
  int rank = 0;
  for (int i = 0; i < 4; ++i)
    if (svd.singularValues()(i) > 1e-9) ++rank;
  CHECK(rank == 2);
}

TEST_CASE("two fixed centers in elliptic coordinates") {
  Model m = two_centers_elliptic();
  geo::DifferentialForm expect(m.chart, 2);
  expect.add({0, 2}, E("cosh(lambda)*cos(nu)"));
  expect.add({1, 3}, E("cosh(lambda)*cos(nu)"));
  expect.add({1, 2}, E("-sinh(lambda)*sin(nu)"));
  expect.add({0, 3}, E("-sinh(lambda)*sin(nu)"));
  CHECK(m.form == expect);

  CHECK(geo::top_coefficient(geo::top_power(m.form)) ==
        E("-2*cosh(lambda)^(2)*cos(nu)^(2) + 2*sinh(lambda)^(2)*sin(nu)^(2)"));

  // at the origin of the chart the coefficient is -2: nondegenerate
  const double c0 = sym::evaluate(geo::top_coefficient(geo::top_power(m.form)),
                                  {{"lambda", 0}, {"nu", 0}, {"p1", 0}, {"p2", 0}});
  CHECK(std::abs(c0) == Catch::Approx(2.0));

  // regression: the display form is not closed (recorded deviation of the
  // source computation; the honest pullback is nondegenerate instead)
  CHECK_FALSE(ext_d(m.form).is_zero());
}

TEST_CASE("mcgehee change at infinity") {
  Model m = mcgehee_infinity();
  geo::DifferentialForm expect(m.chart, 2);
  expect.add({0, 2}, E("-4*x^(-3)"));
  expect.add({1, 3}, E("1"));
  CHECK(m.form == expect);
  REQUIRE(m.map.has_value());  // construction already verified the pullback
  CHECK(ext_d(m.form).is_zero());
  CHECK(geo::top_coefficient(geo::top_power(m.form)) == E("8*x^(-3)"));
  CHECK(m.notes.find("Pr = -(x^3/4) Px") != std::string::npos);
}

TEST_CASE("double collision family: displayed three-term form") {
  const Rational alpha(1);
  Model m = mcgehee_double_collision(alpha);
  const Rational beta = alpha / 2;
  const Rational gamma = Rational(2) / (Rational(2) + alpha);
  CHECK(beta == Rational(1, 2));
  CHECK(gamma == Rational(2, 3));
  const Rational k = -beta * gamma + gamma - 1;  // -2/3

  geo::DifferentialForm expect(m.chart, 2);
  expect.add({0, 2}, gamma * Expression::variable("r", k));
  expect.add({0, 1}, (-gamma * (1 - beta)) *
                         (Expression::variable("r", k) * Expression::variable("w")));
  expect.add({1, 3}, Expression::variable("r", k + 1));  // -dw^dtheta = +dtheta^dw
  CHECK(m.form == expect);
  CHECK(ext_d(m.form).is_zero());
}

TEST_CASE("double collision: alpha = 2 drops the dr^dtheta term") {
  Model m = mcgehee_double_collision(Rational(2));
  CHECK(m.form.coeff({0, 1}).is_zero());
  REQUIRE(m.hamiltonian.has_value());
  CHECK(*m.hamiltonian == E("1/2*r^(-1)*v^(2) + 1/2*r^(-1)*w^(2) - r^(-1)"));
}

TEST_CASE("double collision: exact exponent law (2-3a)/(2+a)") {
  Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const Rational alpha(rng.uniform_int(1, 40), rng.uniform_int(1, 4));
    Model m = mcgehee_double_collision(alpha);
    const Expression top = geo::top_coefficient(geo::top_power(m.form));
    auto [expo, residual] = sym::leading_exponent(top, "r");
    CHECK(expo == double_collision_exponent(alpha));
    CHECK(residual.is_constant());
  }
  // strictly decreasing with range (-3, 1); exact check at alpha = 10^6
  const Rational big = double_collision_exponent(Rational(1000000));
  CHECK(big > Rational(-3));
  CHECK(big < Rational(-299999, 100000));
}

TEST_CASE("general family: exponent gamma(2-alpha)-1 for random parameters") {
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const Rational alpha(rng.uniform_int(1, 30), rng.uniform_int(1, 3));
    Rational gamma(rng.uniform_int(-12, 12), rng.uniform_int(1, 4));
    if (gamma == 0) gamma = Rational(1, 2);
    Model m = mcgehee_general(alpha, gamma);
    const Expression top = geo::top_coefficient(geo::top_power(m.form));
    auto [expo, residual] = sym::leading_exponent(top, "r");
    CHECK(expo == general_exponent(alpha, gamma));
  }
}

TEST_CASE("general family: consistency with the double-collision relation") {
  const Rational alpha(3, 2);
  const Rational gamma = Rational(2) / (Rational(2) + alpha);
  CHECK(mcgehee_general(alpha, gamma).form == mcgehee_double_collision(alpha).form);
}

TEST_CASE("gamma_for_exponent") {
  CHECK(gamma_for_exponent(Rational(6), Rational(-2)) == Rational(1, 4));
  CHECK(gamma_for_exponent(Rational(1), Rational(0)) == Rational(1));
  CHECK_THROWS_AS(gamma_for_exponent(Rational(2), Rational(-5)), AlphaEqualsTwo);

  // postcondition: the produced gamma reaches the requested exponent
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    Rational alpha(rng.uniform_int(1, 20), rng.uniform_int(1, 3));
    if (alpha == 2) alpha += Rational(1, 3);
    const Rational e(rng.uniform_int(-6, 6));
    const Rational gamma = gamma_for_exponent(alpha, e);
    if (gamma == 0) continue;  // e = -1 solves for gamma = 0: outside the family
    Model m = mcgehee_general(alpha, gamma);
    auto [expo, residual] =
        sym::leading_exponent(geo::top_coefficient(geo::top_power(m.form)), "r");
    CHECK(expo == e);
  }

  // alpha = 2 pins the exponent at -1 for every gamma
  for (int g = 1; g <= 5; ++g) {
    Model m = mcgehee_general(Rational(2), Rational(g, 3));
    auto [expo, residual] =
        sym::leading_exponent(geo::top_coefficient(geo::top_power(m.form)), "r");
    CHECK(expo == Rational(-1));
  }
}

TEST_CASE("catalog closedness (two-centers display form exempt)") {
  CHECK(ext_d(levi_civita_point().form).is_zero());
  CHECK(ext_d(mcgehee_infinity().form).is_zero());
  CHECK(ext_d(mcgehee_double_collision(Rational(5, 3)).form).is_zero());
  CHECK(ext_d(mcgehee_general(Rational(3), Rational(-2, 5)).form).is_zero());
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(mcgehee_double_collision(Rational(-1)), InvalidAlpha);
  CHECK_THROWS_AS(mcgehee_double_collision(Rational(0)), InvalidAlpha);
  CHECK_THROWS_AS(mcgehee_general(Rational(1), Rational(0)), InvalidParams);
  CHECK_THROWS_AS(mcgehee_general(Rational(-2), Rational(1)), InvalidParams);
  CHECK_THROWS_AS(make_model("nope"), InvalidParams);
  CHECK_THROWS_AS(make_model("double-collision"), InvalidParams);
}

TEST_CASE("model registry") {
  CHECK(list_models().size() == 5);
  CHECK(make_model("levi-civita").name == "levi-civita");
  CHECK(make_model("double-collision", Rational(2)).params.at("beta") == Rational(1));
}

TEST_CASE("fixtures") {
  using namespace bsymp::models::fixtures;
  CHECK(geo::top_coefficient(geo::top_power(bm_darboux(1))) == E("2*y1^(-1)"));
  CHECK(geo::top_coefficient(geo::top_power(folded_darboux())) == E("2*y1"));
  CHECK(geo::top_coefficient(geo::top_power(b2_desing())) == E("2*x^(-2)"));
  CHECK(geo::top_coefficient(geo::top_power(standard_symplectic(2))) == E("2"));
  CHECK(contact_extended_phase_space(2).chart().dim() == 5);
  CHECK(ext_d(bm_darboux(3)).is_zero());
}
