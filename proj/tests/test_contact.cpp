#include <catch2/catch_amalgamated.hpp>

#include "bsymp/contact.hpp"
#include "bsymp/catalog.hpp"

using namespace bsymp;
using namespace bsymp::contact;
using bsymp::models::fixtures::contact_extended_phase_space;
using bsymp::models::fixtures::standard_symplectic;
using bsymp::sym::Expression;
using bsymp::sym::parse;

TEST_CASE("extended phase space is b-contact with Reeb field d/dt") {
  geo::DifferentialForm alpha = contact_extended_phase_space(2);
  ContactCheck check = is_b_contact(alpha);
  CHECK(check.ok);

  geo::VectorField r = reeb_field(alpha);
  CHECK(r == geo::VectorField::basis(alpha.chart(), "t"));
  // zero component along the singular direction: tangent to Z
  CHECK(r.component("z").is_zero());

  // defining-equation residuals at 50 samples (z off zero)
  Rng rng(3);
  const geo::DifferentialForm da = ext_d(alpha);
  for (int i = 0; i < 50; ++i) {
    std::map<std::string, double> p;
    for (const std::string& v : alpha.chart().vars) p[v] = rng.uniform(-2, 2);
    if (std::abs(p["z"]) < 0.05) p["z"] += 0.1;
    auto [rv, rank] = reeb_field_at(alpha, p);
    CHECK(rank == alpha.chart().dim());
    Eigen::VectorXd exact = geo::vector_at(r, p);
    CHECK((rv - exact).norm() < 1e-10);
    // perturbing the solution breaks the defining equations
    Eigen::VectorXd alpha_row(alpha.chart().dim());
    for (int j = 0; j < alpha.chart().dim(); ++j) {
      const Expression c = alpha.coeff({j});
      alpha_row(j) = c.is_zero() ? 0.0 : sym::evaluate(c, p);
    }
    Eigen::VectorXd noise = Eigen::VectorXd::Zero(alpha.chart().dim());
    noise(1) = 0.1;
    const Eigen::MatrixXd dam = geo::matrix_at(da, p);
    const double res_exact =
        std::abs(alpha_row.dot(rv) - 1.0) + (dam.transpose() * rv).norm();
    const double res_noisy =
        std::abs(alpha_row.dot(rv + noise) - 1.0) + (dam.transpose() * (rv + noise)).norm();
    CHECK(res_exact < 1e-10);
    CHECK(res_noisy > 1e-3);
  }
}

TEST_CASE("dt alone is not contact; classical contact form works") {
  geo::Chart three({"t", "x", "y"});
  geo::DifferentialForm dt(three, 1);
  dt.add({0}, parse("1"));
  CHECK_FALSE(is_b_contact(dt).ok);

  geo::Chart zxy({"z", "x", "y"});
  geo::DifferentialForm classic(zxy, 1);
  classic.add({0}, parse("1"));
  classic.add({2}, parse("x"));  // dz + x dy
  CHECK(is_b_contact(classic).ok);
  geo::VectorField r = reeb_field(classic);
  CHECK(r == geo::VectorField::basis(zxy, "z"));
}

TEST_CASE("even-dimensional charts are rejected") {
  geo::Chart ch({"a", "b"});
  geo::DifferentialForm alpha(ch, 1);
  alpha.add({0}, parse("1"));
  CHECK_THROWS_AS(is_b_contact(alpha), EvenDimension);
}

TEST_CASE("scaling the form scales the Reeb field inversely") {
  geo::DifferentialForm alpha = contact_extended_phase_space(2);
  geo::DifferentialForm two_alpha = Expression::constant(2) * alpha;
  geo::VectorField r2 = reeb_field(two_alpha);
  geo::VectorField expected(alpha.chart());
  expected.set("t", parse("1/2"));
  CHECK(r2 == expected);
}

TEST_CASE("pole order above one is diagnosed") {
  geo::Chart ch({"t", "z", "x"}, "z");
  geo::DifferentialForm alpha(ch, 1);
  alpha.add({0}, parse("1"));
  alpha.add({1}, parse("x*z^(-2)"));
  ContactCheck check = is_b_contact(alpha);
  CHECK_FALSE(check.ok);
  CHECK(check.diagnostics.find("pole") != std::string::npos);
}

TEST_CASE("liouville check") {
  geo::DifferentialForm omega = standard_symplectic(2);
  geo::VectorField x(omega.chart());
  x.set("p1", parse("p1"));
  x.set("p2", parse("p2"));
  CHECK(liouville_check(x, omega));
  CHECK_FALSE(liouville_check(geo::VectorField(omega.chart()), omega));

  // regression: fiber scaling against the b-symplectic d(lambda) of the
  // extended example is again Liouville
  geo::Chart ch({"z", "y2", "x1", "x2"}, "z");
  geo::DifferentialForm lambda(ch, 1);
  lambda.add({0}, parse("x1*z^(-1)"));
  lambda.add({1}, parse("x2"));
  geo::DifferentialForm dl = ext_d(lambda);
  geo::VectorField fiber(ch);
  fiber.set("x1", parse("x1"));
  fiber.set("x2", parse("x2"));
  CHECK(liouville_check(fiber, dl));
}

TEST_CASE("induced contact form") {
  geo::DifferentialForm omega = standard_symplectic(2);
  geo::VectorField x(omega.chart());
  x.set("p1", parse("p1"));
  x.set("p2", parse("p2"));
  geo::DifferentialForm ind = induced_contact(x, omega);
  geo::DifferentialForm expect(omega.chart(), 1);
  expect.add({0}, parse("-p1"));
  expect.add({2}, parse("-p2"));
  CHECK(ind == expect);  // -sum p_i dq_i under the first-slot convention

  CHECK(induced_contact(geo::VectorField(omega.chart()), omega).is_zero());
  CHECK(induced_contact(x, geo::DifferentialForm::zero(omega.chart(), 2)).is_zero());
}

TEST_CASE("induced contact form restricted to the unit fiber sphere is contact") {
  // adapted chart on {p1 = cos(s), p2 = sin(s)}: coordinates (q1, q2, s)
  geo::DifferentialForm omega = standard_symplectic(2);
  geo::VectorField x(omega.chart());
  x.set("p1", parse("p1"));
  x.set("p2", parse("p2"));
  geo::Chart adapted({"q1", "q2", "s"});
  geo::ChartMap onto(adapted, omega.chart(),
                     {{"q1", parse("q1")},
                      {"q2", parse("q2")},
                      {"p1", parse("cos(s)")},
                      {"p2", parse("sin(s)")}});
  geo::DifferentialForm restricted = pullback(onto, induced_contact(x, omega));
  CHECK(is_b_contact(restricted).ok);
}
