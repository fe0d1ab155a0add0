#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bsymp/classify.hpp"
#include "bsymp/form.hpp"
#include "bsymp/parser.hpp"
#include "bsymp/rng.hpp"

namespace bsymp::models {

using geo::Chart;
using geo::ChartMap;
using geo::DifferentialForm;
using geo::VectorField;
using sym::Expression;

struct ExpectedClass {
  sing::Verdict verdict;
  int m = 0;
  Rational exponent;
};

// A ready-made chart + 2-form (+ Hamiltonian, parameters, golden values).
struct Model {
  std::string name;
  Chart chart;
  std::optional<ChartMap> map;  // attached only when form == pullback(map, canonical)
  DifferentialForm form;
  std::optional<DifferentialForm> liouville;  // one-form with form = -d(liouville)
  std::optional<Expression> hamiltonian;
  std::map<std::string, Rational> params;
  std::optional<ExpectedClass> expected;
  std::optional<sing::Hypersurface> hypersurface;  // fold locus when not a coordinate
  bool closed = true;  // two-centers carries a non-closed classical display form
  std::string notes;
};

namespace detail {

inline Expression E(const std::string& s) { return sym::parse(s); }

// Numeric agreement check used where structural equality is blocked by
// unexpanded cos^2 + sin^2 products.
inline bool forms_agree_numerically(const DifferentialForm& a, const DifferentialForm& b,
                                    const std::map<std::string, std::pair<double, double>>& box,
                                    int samples = 25, double tol = 1e-10) {
  if (!compatible(a.chart(), b.chart()) || a.degree() != b.degree()) return false;
  Rng rng(0xface0ff5u);
  for (int s = 0; s < samples; ++s) {
    std::map<std::string, double> p;
    for (const std::string& v : a.chart().vars) {
      auto it = box.find(v);
      const auto [lo, hi] = it == box.end() ? std::pair{-2.0, 2.0} : it->second;
      p[v] = rng.uniform(lo, hi);
    }
    std::map<geo::IndexTuple, double> va, vb;
    for (const auto& [t, c] : a.coeffs()) va[t] = sym::evaluate(c, p);
    for (const auto& [t, c] : b.coeffs()) vb[t] = sym::evaluate(c, p);
    for (const auto& [t, v] : vb)
      if (!va.count(t)) va[t] = 0.0;
    for (const auto& [t, v] : va) {
      const double w = vb.count(t) ? vb.at(t) : 0.0;
      const double scale = std::max({1.0, std::abs(v), std::abs(w)});
      if (std::abs(v - w) > tol * scale) return false;
    }
  }
  return true;
}

inline void check_construction(const Model& m) {
  if (m.closed && !ext_d(m.form).is_zero())
    throw Error("catalog: " + m.name + " form is not closed");
  if (m.liouville && m.form != -ext_d(*m.liouville))
    throw Error("catalog: " + m.name + " form is not -d(liouville)");
  if (m.map) {
    DifferentialForm canonical(m.map->target, 2);
    const int half = m.map->target.dim() / 2;
    // canonical pairing (q_i, p_i) given as the first/second half of the chart
    for (int i = 0; i < half; ++i)
      canonical.add({i, half + i}, Expression::constant(1));
    const DifferentialForm pulled = pullback(*m.map, canonical);
    if (pulled != m.form) {
      std::map<std::string, std::pair<double, double>> box;
      if (m.chart.singular_var) box[*m.chart.singular_var] = {0.3, 2.0};
      if (!forms_agree_numerically(pulled, m.form, box))
        throw Error("catalog: " + m.name + " form disagrees with the pullback of the canonical form");
    }
  }
}

}  // namespace detail

// Point Levi-Civita regularization of the planar Kepler problem: position
// squaring u -> u^2/2 with momenta left unchanged. The stored one-form is
// the pulled-back Liouville form with the orientation that produces the
// fold locus u1 = +-u2; omega = -d(theta) is closed and its square is
// -2(u1^2-u2^2) times the chart volume.
inline Model levi_civita_point() {
  using detail::E;
  Model m;
  m.name = "levi-civita";
  m.chart = Chart({"u1", "u2", "p1", "p2"});
  DifferentialForm theta(m.chart, 1);
  theta.add({0}, E("p1*u1 + p2*u2"));
  theta.add({1}, E("p1*u2 + p2*u1"));
  m.liouville = theta;
  m.form = -ext_d(theta);
  m.expected = ExpectedClass{sing::Verdict::Folded, 1, Rational(1)};
  m.hypersurface = sing::Hypersurface{E("u1^(2) - u2^(2)"),
                                      {{"u1", 1.0}, {"u2", 1.0}, {"p1", 0.3}, {"p2", -0.2}}};
  m.notes = "Hamiltonian omitted: 1/|q| is outside the symbolic algebra.";
  detail::check_construction(m);
  return m;
}

// Elliptic coordinates for the two fixed centers problem. The stored form is
// the classical display form, kept verbatim as the golden value; it is not
// closed and differs from the honest pullback in the sign of the
// dlambda^dp2 term, so neither the closedness check nor a ChartMap applies.
inline Model two_centers_elliptic() {
  using detail::E;
  Model m;
  m.name = "two-centers";
  m.chart = Chart({"lambda", "nu", "p1", "p2"});
  m.form = DifferentialForm(m.chart, 2);
  m.form.add({0, 2}, E("cosh(lambda)*cos(nu)"));
  m.form.add({1, 3}, E("cosh(lambda)*cos(nu)"));
  m.form.add({1, 2}, E("-sinh(lambda)*sin(nu)"));
  m.form.add({0, 3}, E("-sinh(lambda)*sin(nu)"));
  m.closed = false;
  m.expected = ExpectedClass{sing::Verdict::Folded, 1, Rational(1)};
  const double nu0 = 1.0;
  const double lam0 = std::atanh(1.0 / std::tan(nu0));
  m.hypersurface = sing::Hypersurface{
      E("cosh(lambda)*cos(nu) - sinh(lambda)*sin(nu)"),
      {{"lambda", lam0}, {"nu", nu0}, {"p1", 0.4}, {"p2", 0.7}}};
  m.params["mu"] = Rational(1, 2);
  m.notes = "Hamiltonian omitted: 1/r_i terms are outside the symbolic algebra.";
  detail::check_construction(m);
  return m;
}

// McGehee change r = 2/x^2 at infinity in the planar restricted three-body
// problem, momenta untouched: the canonical form pulls back to
// -4 x^-3 dx^dPr + dalpha^dPalpha, a b^3 model along {x = 0}.
inline Model mcgehee_infinity(const Rational& mu = Rational(1, 2)) {
  using detail::E;
  Model m;
  m.name = "mcgehee-infinity";
  m.chart = Chart({"x", "alpha", "Pr", "Palpha"}, "x");
  Chart target({"r", "alpha", "Pr", "Palpha"});
  m.map = ChartMap(m.chart, target,
                   {{"r", E("2*x^(-2)")},
                    {"alpha", E("alpha")},
                    {"Pr", E("Pr")},
                    {"Palpha", E("Palpha")}});
  m.form = DifferentialForm(m.chart, 2);
  m.form.add({0, 2}, E("-4*x^(-3)"));
  m.form.add({1, 3}, E("1"));
  m.params["mu"] = mu;
  m.expected = ExpectedClass{sing::Verdict::BSymplectic, 3, Rational(-3)};
  m.notes = "Canonical momentum relation (not used by the form): Pr = -(x^3/4) Px.";
  detail::check_construction(m);
  return m;
}

// Exponent of omega^2 in r for the double-collision family under
// beta = alpha/2, gamma = 1/(1+beta): (2-3a)/(2+a).
inline Rational double_collision_exponent(const Rational& alpha) {
  return (Rational(2) - 3 * alpha) / (Rational(2) + alpha);
}

// Exponent of omega^2 in r for free gamma: gamma(2-alpha) - 1.
inline Rational general_exponent(const Rational& alpha, const Rational& gamma) {
  return gamma * (Rational(2) - alpha) - 1;
}

// gamma with -alpha*gamma + 2*gamma - 1 = e, i.e. (e+1)/(2-alpha).
inline Rational gamma_for_exponent(const Rational& alpha, const Rational& e) {
  if (alpha == 2) throw AlphaEqualsTwo("gamma_for_exponent: alpha = 2 reaches only exponent -1");
  return (e + 1) / (Rational(2) - alpha);
}

inline std::optional<ExpectedClass> expected_from_exponent(const Rational& e) {
  if (e == 0) return ExpectedClass{sing::Verdict::Symplectic, 0, e};
  if (is_integer(e)) {
    const long long k = to_long(e);
    if (k < 0) return ExpectedClass{sing::Verdict::BSymplectic, static_cast<int>(-k), e};
    return ExpectedClass{sing::Verdict::Folded, static_cast<int>(k), e};
  }
  return ExpectedClass{sing::Verdict::Degenerate, 0, e};
}

// McGehee double-collision blow-up x = r^g e^{i theta},
// y = r^{-b g}(v + i w) e^{i theta} for the potential -|x|^-alpha, with an
// independently chosen gamma. Real expansion of Re(dx ^ d(conj y)):
//   omega = g r^{-bg+g-1} dr^dv - g(1-b) r^{-bg+g-1} w dr^dtheta
//           - r^{-bg+g} dw^dtheta.
inline Model mcgehee_general(const Rational& alpha, const Rational& gamma) {
  using detail::E;
  if (alpha <= 0) throw InvalidParams("mcgehee_general: alpha must be positive");
  if (gamma == 0) throw InvalidParams("mcgehee_general: gamma must be nonzero");
  const Rational beta = alpha / 2;
  Model m;
  m.name = "mcgehee-general";
  m.chart = Chart({"r", "theta", "v", "w"}, "r");
  const Rational k = -beta * gamma + gamma - 1;  // dr-leg exponent
  m.form = DifferentialForm(m.chart, 2);
  m.form.add({0, 2}, gamma * Expression::variable("r", k));
  m.form.add({0, 1}, (-gamma * (1 - beta)) *
                         (Expression::variable("r", k) * Expression::variable("w")));
  {
    geo::IndexTuple wt{3, 1};  // dw ^ dtheta
    m.form.add(wt, -Expression::variable("r", k + 1));
  }
  m.hamiltonian = Rational(1, 2) * (Expression::variable("r", -2 * beta * gamma) *
                                    E("v^(2) + w^(2)")) -
                  Expression::variable("r", -alpha * gamma);
  m.params["alpha"] = alpha;
  m.params["beta"] = beta;
  m.params["gamma"] = gamma;
  m.expected = expected_from_exponent(general_exponent(alpha, gamma));

  Chart target({"x1", "x2", "y1", "y2"});
  m.map = ChartMap(
      m.chart, target,
      {{"x1", Expression::variable("r", gamma) * E("cos(theta)")},
       {"x2", Expression::variable("r", gamma) * E("sin(theta)")},
       {"y1", Expression::variable("r", -beta * gamma) * E("v*cos(theta) - w*sin(theta)")},
       {"y2", Expression::variable("r", -beta * gamma) * E("v*sin(theta) + w*cos(theta)")}});
  detail::check_construction(m);
  return m;
}

// The double-collision model with the collision relation gamma = 1/(1+beta).
inline Model mcgehee_double_collision(const Rational& alpha) {
  if (alpha <= 0) throw InvalidAlpha("mcgehee_double_collision: alpha must be positive");
  const Rational gamma = Rational(2) / (Rational(2) + alpha);
  Model m = mcgehee_general(alpha, gamma);
  m.name = "double-collision";
  m.expected = expected_from_exponent(double_collision_exponent(alpha));
  return m;
}

// --- normal-form fixtures -------------------------------------------------

namespace fixtures {

// dx1 ^ dy1 / y1^m + dx2 ^ dy2 on (x1, y1, x2, y2), Z = {y1 = 0}.
inline DifferentialForm bm_darboux(int m) {
  Chart ch({"x1", "y1", "x2", "y2"}, "y1");
  DifferentialForm f(ch, 2);
  f.add({0, 1}, Expression::variable("y1", Rational(-m)));
  f.add({2, 3}, Expression::constant(1));
  return f;
}

// y1 dx1 ^ dy1 + dx2 ^ dy2, the folded normal form.
inline DifferentialForm folded_darboux() {
  Chart ch({"x1", "y1", "x2", "y2"}, "y1");
  DifferentialForm f(ch, 2);
  f.add({0, 1}, Expression::variable("y1"));
  f.add({2, 3}, Expression::constant(1));
  return f;
}

// dx ^ dy / x^2 + du ^ dw on (x, y, u, w), the b^2 desingularization fixture.
inline DifferentialForm b2_desing() {
  Chart ch({"x", "y", "u", "w"}, "x");
  DifferentialForm f(ch, 2);
  f.add({0, 1}, Expression::variable("x", Rational(-2)));
  f.add({2, 3}, Expression::constant(1));
  return f;
}

// Canonical contact b-form dt + x1 dz/z + sum_{i>=2} x_i dy_i on the
// (2n+1)-chart (t, z, y2..yn, x1..xn), Z = {z = 0}.
inline DifferentialForm contact_extended_phase_space(int n) {
  std::vector<std::string> vars{"t", "z"};
  for (int i = 2; i <= n; ++i) vars.push_back("y" + std::to_string(i));
  for (int i = 1; i <= n; ++i) vars.push_back("x" + std::to_string(i));
  Chart ch(vars, "z");
  DifferentialForm a(ch, 1);
  a.add({0}, Expression::constant(1));
  a.add({1}, Expression::variable("x1") * Expression::variable("z", Rational(-1)));
  for (int i = 2; i <= n; ++i)
    a.add({ch.require_index("y" + std::to_string(i))},
          Expression::variable("x" + std::to_string(i)));
  return a;
}

// sum dq_i ^ dp_i on (q1, p1, ..., qn, pn).
inline DifferentialForm standard_symplectic(int n) {
  std::vector<std::string> vars;
  for (int i = 1; i <= n; ++i) {
    vars.push_back("q" + std::to_string(i));
    vars.push_back("p" + std::to_string(i));
  }
  Chart ch(vars);
  DifferentialForm f(ch, 2);
  for (int i = 0; i < n; ++i) f.add({2 * i, 2 * i + 1}, Expression::constant(1));
  return f;
}

}  // namespace fixtures

// --- registry for the CLI ---------------------------------------------------

struct ModelSpec {
  std::string name;
  std::string parameters;
  std::string expected;
};

inline std::vector<ModelSpec> list_models() {
  return {
      {"levi-civita", "-", "Folded(1) along u1^2 - u2^2 = 0"},
      {"two-centers", "mu", "Folded(1) along cosh(lambda)cos(nu) = sinh(lambda)sin(nu)"},
      {"mcgehee-infinity", "mu", "BSymplectic(3) along x = 0"},
      {"double-collision", "alpha (beta = alpha/2, gamma = 2/(2+alpha))",
       "exponent (2-3a)/(2+a): Symplectic at 2/3, b^1 at 2, b^2 at 6"},
      {"mcgehee-general", "alpha, gamma", "exponent gamma(2-alpha)-1"},
  };
}

inline Model make_model(const std::string& name,
                        const std::optional<Rational>& alpha = std::nullopt,
                        const std::optional<Rational>& gamma = std::nullopt) {
  if (name == "levi-civita") return levi_civita_point();
  if (name == "two-centers") return two_centers_elliptic();
  if (name == "mcgehee-infinity") return mcgehee_infinity();
  if (name == "double-collision") {
    if (!alpha) throw InvalidParams("double-collision needs --alpha");
    return mcgehee_double_collision(*alpha);
  }
  if (name == "mcgehee-general") {
    if (!alpha || !gamma) throw InvalidParams("mcgehee-general needs --alpha and --gamma");
    return mcgehee_general(*alpha, *gamma);
  }
  throw InvalidParams("unknown model: " + name);
}

}  // namespace bsymp::models
