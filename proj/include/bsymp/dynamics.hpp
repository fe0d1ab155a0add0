#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bsymp/catalog.hpp"
#include "bsymp/form.hpp"
#include "bsymp/ode.hpp"

namespace bsymp::flow {

using geo::Chart;
using geo::DifferentialForm;
using geo::VectorField;
using sym::Expression;

namespace detail {

// Cofactor determinant of a matrix of expressions (charts are small).
inline Expression expr_det(const std::vector<std::vector<Expression>>& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  Expression det = Expression::zero();
  for (std::size_t j = 0; j < n; ++j) {
    if (m[0][j].is_zero()) continue;
    std::vector<std::vector<Expression>> minor;
    minor.reserve(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<Expression> row;
      row.reserve(n - 1);
      for (std::size_t jj = 0; jj < n; ++jj)
        if (jj != j) row.push_back(m[i][jj]);
      minor.push_back(std::move(row));
    }
    Expression term = m[0][j] * expr_det(minor);
    det = det + ((j % 2 == 0) ? term : -term);
  }
  return det;
}

inline std::vector<std::vector<Expression>> omega_matrix(const DifferentialForm& omega) {
  const int n = omega.chart().dim();
  std::vector<std::vector<Expression>> m(
      static_cast<std::size_t>(n),
      std::vector<Expression>(static_cast<std::size_t>(n), Expression::zero()));
  for (const auto& [t, c] : omega.coeffs()) {
    m[static_cast<std::size_t>(t[0])][static_cast<std::size_t>(t[1])] = c;
    m[static_cast<std::size_t>(t[1])][static_cast<std::size_t>(t[0])] = -c;
  }
  return m;
}

}  // namespace detail

// Hamiltonian vector field of H with respect to omega, solving
// interior(X, omega) = dH by Cramer's rule over the expression algebra.
// (Equivalently iota_X omega = -dH when the interior product fills the
// second slot; the flow-equation golden tests pin this orientation.)
// The determinant must be a single term, which holds for every catalog
// form; use hamiltonian_rhs_at for a pointwise numeric solve otherwise.
inline VectorField hamiltonian_vector_field(const DifferentialForm& omega, const Expression& h,
                                            std::string* warning = nullptr) {
  if (omega.degree() != 2) throw Error("hamiltonian_vector_field: needs a 2-form");
  const Chart& ch = omega.chart();
  const int n = ch.dim();
  if (warning && !ext_d(omega).is_zero()) *warning = "omega is not closed";

  auto m = detail::omega_matrix(omega);
  Expression det = detail::expr_det(m);
  if (det.is_zero()) throw DegenerateForm("omega has identically zero determinant");
  if (!det.is_monomial())
    throw NonMonomialDeterminant("determinant is not a single term; use the numeric solver");

  // Solve Omega X = -grad H column by column (Cramer).
  std::vector<Expression> rhs;
  rhs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    rhs.push_back(-sym::differentiate(h, ch.vars[static_cast<std::size_t>(i)]));

  VectorField x(ch);
  for (int j = 0; j < n; ++j) {
    auto mj = m;
    for (int i = 0; i < n; ++i)
      mj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          rhs[static_cast<std::size_t>(i)];
    Expression num = detail::expr_det(mj);
    if (num.is_zero()) continue;
    x.components[j] = sym::divide_by_monomial(num, det);
  }
  return x;
}

// Pointwise numeric solve of interior(X, omega) = dH at one point.
inline Eigen::VectorXd hamiltonian_rhs_at(const DifferentialForm& omega, const Expression& h,
                                          const std::map<std::string, double>& point) {
  const Chart& ch = omega.chart();
  const int n = ch.dim();
  Eigen::MatrixXd m = geo::matrix_at(omega, point);
  Eigen::VectorXd grad(n);
  for (int i = 0; i < n; ++i)
    grad(i) = sym::evaluate(sym::differentiate(h, ch.vars[static_cast<std::size_t>(i)]), point);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) throw DegenerateForm("omega is singular at the sample point");
  return lu.solve(-grad);
}

// Time rescaling X_tau = factor * X_t.
inline VectorField reparametrize(const VectorField& x, const Expression& factor) {
  return factor * x;
}

// Flow system: a symbolic field compiled to a numeric right-hand side, plus
// named invariant monitors.
struct FlowSystem {
  Chart chart;
  std::optional<VectorField> symbolic;
  Rhs rhs;
  std::string time_label = "t";
  std::vector<Monitor> monitors;

  std::map<std::string, double> point_of(const State& y) const {
    std::map<std::string, double> p;
    for (int i = 0; i < chart.dim(); ++i) p[chart.vars[static_cast<std::size_t>(i)]] = y(i);
    return p;
  }
};

inline FlowSystem make_flow_system(const VectorField& x, std::string time_label,
                                   std::vector<Monitor> monitors = {}) {
  FlowSystem sys;
  sys.chart = x.chart;
  sys.symbolic = x;
  sys.time_label = std::move(time_label);
  sys.monitors = std::move(monitors);
  const VectorField field = x;
  const Chart chart = x.chart;
  sys.rhs = [field, chart](double, const State& y, State& dy) {
    std::map<std::string, double> p;
    for (int i = 0; i < chart.dim(); ++i) p[chart.vars[static_cast<std::size_t>(i)]] = y(i);
    dy.setZero(chart.dim());
    for (const auto& [i, c] : field.components) dy(i) = sym::evaluate(c, p);
  };
  return sys;
}

inline Trajectory integrate(const FlowSystem& sys, const State& x0, double t0, double t1,
                            double rtol = 1e-10, double atol = 1e-12) {
  IntegratorOptions opts;
  opts.rtol = rtol;
  opts.atol = atol;
  return integrate_dopri54(sys.rhs, x0, t0, t1, opts, sys.monitors);
}

// --- McGehee double-collision machinery -------------------------------------

// F(state) = |w| |v^2 + w^2 - 2|^{1-beta} on the chart (r, theta, v, w).
// Conserved along the primed flow exactly when beta = 1/2; the engine also
// checks the general-exponent variant (1-beta)/(2 beta) symbolically.
inline Monitor mcgehee_first_integral(const Rational& beta) {
  const double expo = to_double(Rational(1) - beta);
  return {"F", [expo](const State& y) {
            const double v = y(2), w = y(3);
            if (w == 0.0) return 0.0;
            const double u = std::abs(v * v + w * w - 2.0);
            return std::abs(w) * std::pow(u, expo);
          }};
}

// Structural check that the corrected exponent (1-beta)/(2 beta) really is
// a first integral: with u = v^2 + w^2 - 2 and F = w u^q, dF/dtau vanishes
// iff w' u + q w u' = 0 as a polynomial identity on the branch w > 0, u > 0.
inline bool first_integral_branch_identity(const VectorField& primed, const Rational& q) {
  using sym::parse;
  const Expression u = parse("v^(2) + w^(2) - 2");
  const Expression vprime = primed.component("v");
  const Expression wprime = primed.component("w");
  const Expression uprime =
      Expression::constant(2) * Expression::variable("v") * vprime +
      Expression::constant(2) * Expression::variable("w") * wprime;
  const Expression g =
      wprime * u + Rational(q) * Expression::variable("w") * uprime;
  return g.is_zero();
}

struct PrimedSystem {
  models::Model model;
  VectorField unprimed;  // Hamiltonian field in t-time
  VectorField primed;    // after dtau = r^{beta gamma + gamma} dt
};

inline PrimedSystem double_collision_system(const Rational& alpha) {
  PrimedSystem sys{models::mcgehee_double_collision(alpha), {}, {}};
  const Rational beta = sys.model.params.at("beta");
  const Rational gamma = sys.model.params.at("gamma");
  sys.unprimed = hamiltonian_vector_field(sys.model.form, *sys.model.hamiltonian);
  sys.primed =
      reparametrize(sys.unprimed, Expression::variable("r", beta * gamma + gamma));
  return sys;
}

// True iff the reparametrized Hamiltonian field reproduces
//   theta' = w,  r' = (1/gamma) v r,  w' = (beta - 1) w v,
//   v' = beta (v^2 - 2) + w^2
// by structural expression equality. The sign of the v' row is the one
// consistent with the Hamiltonian: it keeps H constant along the t-flow
// and w^{2 beta}(v^2 + w^2 - 2)^{beta - 1} constant along the tau-flow.
inline bool verify_flow_equations(const Rational& alpha) {
  if (alpha <= 0) return false;
  const Rational beta = alpha / 2;
  const Rational gamma = Rational(2) / (Rational(2) + alpha);
  PrimedSystem sys = double_collision_system(alpha);
  using sym::parse;
  const Expression theta_t = parse("w");
  const Expression r_t = (Rational(1) / gamma) * parse("v*r");
  const Expression w_t = Rational(beta - 1) * parse("w*v");
  const Expression v_t = Rational(beta) * parse("v^(2) - 2") + parse("w^(2)");
  return sys.primed.component("theta") == theta_t && sys.primed.component("r") == r_t &&
         sys.primed.component("w") == w_t && sys.primed.component("v") == v_t;
}

}  // namespace bsymp::flow
