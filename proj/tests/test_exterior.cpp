#include <catch2/catch_amalgamated.hpp>

#include "bsymp/form.hpp"
#include "bsymp/form_text.hpp"
#include "bsymp/parser.hpp"

using namespace bsymp;
using namespace bsymp::geo;
using bsymp::sym::Expression;
using bsymp::sym::parse;

namespace {

Expression E(const std::string& s) { return parse(s); }

DifferentialForm two_form(const Chart& ch, std::initializer_list<std::pair<const char*, const char*>> items) {
  DifferentialForm f(ch, 2);
  for (const auto& [pair, coeff] : items) {
    std::string p(pair);
    auto caret = p.find('^');
    std::string a = p.substr(0, caret), b = p.substr(caret + 1);
    f.add({ch.require_index(a), ch.require_index(b)}, E(coeff));
  }
  return f;
}

}  // namespace

TEST_CASE("wedge: disjoint blocks and antisymmetry") {
  Chart ch({"u1", "p1", "u2", "p2"});
  DifferentialForm a = two_form(ch, {{"u1^p1", "1"}});
  DifferentialForm b = two_form(ch, {{"u2^p2", "1"}});
  DifferentialForm w = wedge(a, b);
  CHECK(top_coefficient(w) == E("1"));  // du1^dp1^du2^dp2 in chart order

  DifferentialForm odd(ch, 1);
  odd.add({0}, E("x"));
  odd.add({2}, E("y^(2)"));
  CHECK(wedge(odd, odd).is_zero());

  Chart other({"a", "b", "c", "d"});
  CHECK_THROWS_AS(wedge(a, two_form(other, {{"a^b", "1"}})), ChartMismatch);
}

TEST_CASE("wedge: overflow degree") {
  Chart ch({"x", "y"});
  DifferentialForm a = two_form(ch, {{"x^y", "1"}});
  CHECK_THROWS_AS(wedge(a, a), DegreeOverflow);
}

TEST_CASE("ext_d: d of d vanishes, canonical b-form of the extended phase space") {
  Chart ch({"t", "z", "y2", "x1", "x2"});
  DifferentialForm alpha(ch, 1);
  alpha.add({0}, E("1"));
  alpha.add({1}, E("x1*z^(-1)"));
  alpha.add({2}, E("x2"));
  DifferentialForm da = ext_d(alpha);
  DifferentialForm expect(ch, 2);
  expect.add({3, 1}, E("z^(-1)"));  // dx1 ^ dz / z
  expect.add({3, 2}, E("0"));
  expect.add({4, 2}, E("1"));  // dx2 ^ dy2
  CHECK(da == expect);
  CHECK(ext_d(da).is_zero());
}

TEST_CASE("ext_d of a top form is zero") {
  Chart ch({"x", "y"});
  DifferentialForm vol = two_form(ch, {{"x^y", "x*y"}});
  CHECK(ext_d(vol).is_zero());
}

TEST_CASE("pullback: elliptic coordinates, chain-rule signs") {
  Chart target({"q1", "q2", "p1", "p2"});
  Chart source({"lambda", "nu", "p1", "p2"});
  ChartMap phi(source, target,
               {{"q1", E("sinh(lambda)*cos(nu)")},
                {"q2", E("cosh(lambda)*sin(nu)")},
                {"p1", E("p1")},
                {"p2", E("p2")}});
  DifferentialForm omega0 = two_form(target, {{"q1^p1", "1"}, {"q2^p2", "1"}});
  DifferentialForm pulled = pullback(phi, omega0);

  // dq1 = cosh l cos n dl - sinh l sin n dn ; dq2 = sinh l sin n dl + cosh l cos n dn
  DifferentialForm expect(source, 2);
  expect.add({0, 2}, E("cosh(lambda)*cos(nu)"));
  expect.add({1, 2}, E("-sinh(lambda)*sin(nu)"));
  expect.add({0, 3}, E("sinh(lambda)*sin(nu)"));
  expect.add({1, 3}, E("cosh(lambda)*cos(nu)"));
  CHECK(pulled == expect);
}

TEST_CASE("pullback: McGehee blow-up at infinity") {
  Chart target({"r", "alpha", "Pr", "Palpha"});
  Chart source({"x", "alpha", "Pr", "Palpha"}, "x");
  ChartMap phi(source, target,
               {{"r", E("2*x^(-2)")}, {"alpha", E("alpha")}, {"Pr", E("Pr")}, {"Palpha", E("Palpha")}});
  DifferentialForm omega0 = two_form(target, {{"r^Pr", "1"}, {"alpha^Palpha", "1"}});
  DifferentialForm pulled = pullback(phi, omega0);
  DifferentialForm expect(source, 2);
  expect.add({0, 2}, E("-4*x^(-3)"));
  expect.add({1, 3}, E("1"));
  CHECK(pulled == expect);
}

TEST_CASE("pullback: identity map") {
  Chart ch({"x", "y", "u", "w"});
  DifferentialForm a = two_form(ch, {{"x^y", "x^(2)*cos(u)"}, {"u^w", "3"}});
  CHECK(pullback(ChartMap::identity(ch), a) == a);
}

TEST_CASE("interior: extended phase space contractions") {
  Chart ch({"t", "z", "y2", "x1", "x2"});
  DifferentialForm alpha(ch, 1);
  alpha.add({0}, E("1"));
  alpha.add({1}, E("x1*z^(-1)"));
  alpha.add({2}, E("x2"));
  VectorField dt = VectorField::basis(ch, "t");
  DifferentialForm one = interior(dt, alpha);
  CHECK(one.degree() == 0);
  CHECK(one.coeff({}) == E("1"));
  CHECK(interior(dt, ext_d(alpha)).is_zero());
  CHECK_THROWS_AS(interior(dt, one), DegreeUnderflow);
}

TEST_CASE("lie derivative: Liouville field of the canonical form") {
  Chart ch({"q1", "p1", "q2", "p2"});
  DifferentialForm omega = two_form(ch, {{"q1^p1", "1"}, {"q2^p2", "1"}});
  VectorField liouville(ch);
  liouville.set("p1", E("p1"));
  liouville.set("p2", E("p2"));
  CHECK(lie_derivative(liouville, omega) == omega);
  CHECK(lie_derivative(liouville, DifferentialForm::zero(ch, 2)).is_zero());

  Chart line({"t", "s"});
  DifferentialForm dt_form = DifferentialForm::d(line, "t");
  CHECK(lie_derivative(VectorField::basis(line, "t"), dt_form).is_zero());
}

TEST_CASE("top_power: Darboux and the b^3 model at infinity") {
  Chart ch({"q1", "p1", "q2", "p2"});
  DifferentialForm omega = two_form(ch, {{"q1^p1", "1"}, {"q2^p2", "1"}});
  CHECK(top_coefficient(top_power(omega)) == E("2"));

  Chart mcg({"x", "alpha", "Pr", "Palpha"}, "x");
  DifferentialForm w = two_form(mcg, {{"x^Pr", "-4*x^(-3)"}, {"alpha^Palpha", "1"}});
  CHECK(top_coefficient(top_power(w)) == E("8*x^(-3)"));

  Chart oddc({"x", "y", "z"});
  CHECK_THROWS_AS(top_power(two_form(oddc, {{"x^y", "1"}})), OddDimension);
}

TEST_CASE("numeric matrix view") {
  Chart ch({"x", "y"});
  DifferentialForm omega = two_form(ch, {{"x^y", "x^(2)"}});
  Eigen::MatrixXd m = matrix_at(omega, {{"x", 3.0}, {"y", -1.0}});
  CHECK(m(0, 1) == 9.0);
  CHECK(m(1, 0) == -9.0);
}

TEST_CASE("form literals") {
  Chart ch({"x", "alpha", "Pr", "Palpha"}, "x");
  DifferentialForm f = parse_form_literal(ch, "4*x^(-3) * dx^dPr + dalpha^dPalpha");
  DifferentialForm expect(ch, 2);
  expect.add({0, 2}, E("4*x^(-3)"));
  expect.add({1, 3}, E("1"));
  CHECK(f == expect);

  // signs, implicit unit coefficients, reordered wedge blocks
  DifferentialForm g = parse_form_literal(ch, "-dPr^dx + 2 * dalpha^dPalpha");
  CHECK(g.coeff({0, 2}) == E("1"));
  CHECK(g.coeff({1, 3}) == E("2"));

  // round trip through the printer
  for (const DifferentialForm& form : {f, g})
    CHECK(parse_form_literal(ch, form_to_text(form)) == form);

  CHECK_THROWS_AS(parse_form_literal(ch, "dx + dx^dPr"), ParseError);  // mixed degrees
  CHECK_THROWS_AS(parse_form_literal(ch, ""), ParseError);
}

TEST_CASE("form files") {
  const std::string text =
      "# fixture\n"
      "chart: x1, y1, x2, y2\n"
      "singular: y1\n"
      "form: y1 * dx1^dy1\n"
      "  + dx2^dy2\n";
  FormFile file = parse_form_file(text);
  CHECK(file.chart.dim() == 4);
  CHECK(file.chart.singular_var == "y1");
  DifferentialForm expect(file.chart, 2);
  expect.add({0, 1}, E("y1"));
  expect.add({2, 3}, E("1"));
  CHECK(file.form == expect);

  CHECK_THROWS_AS(parse_form_file("form: dx^dy\n"), ParseError);     // no chart
  CHECK_THROWS_AS(parse_form_file("chart: x y\n"), ParseError);      // no form
  CHECK_THROWS_AS(parse_form_file("chart: x y\nnonsense\n"), ParseError);
}
