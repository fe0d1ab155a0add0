#pragma once

#include <string>
#include <vector>

#include "bsymp/form.hpp"
#include "bsymp/parser.hpp"
#include "bsymp/rng.hpp"

namespace bsymp::prop {

using geo::Chart;
using geo::ChartMap;
using geo::DifferentialForm;
using geo::VectorField;
using sym::Expression;

// --- generators --------------------------------------------------------------

inline Chart gen_chart(int dim) {
  std::vector<std::string> vars;
  for (int i = 0; i < dim; ++i) vars.push_back("x" + std::to_string(i + 1));
  return Chart(std::move(vars));
}

// Polynomial expression: nonnegative integer powers, no elementary factors.
// Safe on both sides of any substitution.
inline Expression gen_poly(Rng& rng, const Chart& ch, int max_terms = 3) {
  Expression e = Expression::zero();
  const int terms = static_cast<int>(rng.uniform_int(1, max_terms));
  for (int t = 0; t < terms; ++t) {
    Expression m = Expression::constant(rng.rational(-4, 4, 3));
    for (const std::string& v : ch.vars)
      if (rng.coin() && rng.coin()) m = m * Expression::variable(v, Rational(rng.uniform_int(1, 2)));
    e = e + m;
  }
  return e;
}

// General algebra element: rational powers (possibly negative or fractional)
// and occasional elementary factors.
inline Expression gen_expression(Rng& rng, const Chart& ch, int max_terms = 3) {
  Expression e = Expression::zero();
  const int terms = static_cast<int>(rng.uniform_int(1, max_terms));
  for (int t = 0; t < terms; ++t) {
    Expression m = Expression::constant(rng.rational(-4, 4, 3));
    for (const std::string& v : ch.vars) {
      if (!rng.coin()) continue;
      if (rng.coin()) {
        m = m * Expression::variable(v, rng.rational(-3, 3, 2));
      } else {
        const auto tag = static_cast<sym::ElemTag>(rng.uniform_int(0, 4));
        m = m * Expression::elem(tag, v, rng.uniform_int(1, 2));
      }
    }
    e = e + m;
  }
  return e;
}

inline DifferentialForm gen_form(Rng& rng, const Chart& ch, int degree, bool poly_only,
                                 int max_coeffs = 3) {
  DifferentialForm f(ch, degree);
  const int n = ch.dim();
  const int coeffs = static_cast<int>(rng.uniform_int(1, max_coeffs));
  for (int c = 0; c < coeffs; ++c) {
    geo::IndexTuple t;
    std::vector<int> pool;
    for (int i = 0; i < n; ++i) pool.push_back(i);
    for (int d = 0; d < degree; ++d) {
      const auto pick = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(pool.size()) - 1));
      t.push_back(pool[pick]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    f.add(t, poly_only ? gen_poly(rng, ch) : gen_expression(rng, ch));
  }
  return f;
}

inline VectorField gen_vector_field(Rng& rng, const Chart& ch, bool poly_only = true) {
  VectorField x(ch);
  for (int i = 0; i < ch.dim(); ++i)
    if (rng.coin()) {
      Expression c = poly_only ? gen_poly(rng, ch) : gen_expression(rng, ch);
      if (!c.is_zero()) x.components[i] = std::move(c);
    }
  return x;
}

// Variable relabeling: closure-safe for arbitrary coefficients, including
// elementary factors and fractional powers.
inline ChartMap gen_rename_map(Rng& rng, const Chart& source, const Chart& target) {
  std::map<std::string, Expression> comps;
  for (const std::string& tv : target.vars)
    comps[tv] = Expression::variable(
        source.vars[static_cast<std::size_t>(rng.uniform_int(0, source.dim() - 1))]);
  return ChartMap(source, target, std::move(comps));
}

// Monomial map with positive coefficients: closure-safe for polynomial
// target coefficients; mixed with polynomial maps when allow_sums is set.
inline ChartMap gen_chart_map(Rng& rng, const Chart& source, const Chart& target,
                              bool allow_sums) {
  std::map<std::string, Expression> comps;
  for (const std::string& tv : target.vars) {
    if (allow_sums && rng.coin()) {
      comps[tv] = gen_poly(rng, source, 2);
      if (comps[tv].is_zero()) comps[tv] = Expression::variable(source.vars[0]);
    } else {
      Expression m = Expression::constant(Rational(rng.uniform_int(1, 3)));
      bool used = false;
      for (const std::string& sv : source.vars)
        if (rng.coin()) {
          m = m * Expression::variable(sv, Rational(rng.uniform_int(-2, 2)));
          used = true;
        }
      if (!used) m = m * Expression::variable(source.vars[static_cast<std::size_t>(
                          rng.uniform_int(0, source.dim() - 1))]);
      comps[tv] = m;
    }
  }
  return ChartMap(source, target, std::move(comps));
}

// --- property suites ---------------------------------------------------------

struct SuiteResult {
  std::string name;
  int cases = 0;
  int failures = 0;
  bool ok() const { return failures == 0 && cases > 0; }
};

inline SuiteResult suite_d_squared(Rng& rng, int cases) {
  SuiteResult r{"d(d(a)) = 0", cases, 0};
  for (int i = 0; i < cases; ++i) {
    const int dim = static_cast<int>(rng.uniform_int(2, 5));
    Chart ch = gen_chart(dim);
    const int degree = static_cast<int>(rng.uniform_int(0, dim - 1));
    DifferentialForm a = gen_form(rng, ch, degree, false);
    if (!ext_d(ext_d(a)).is_zero()) r.failures++;
  }
  return r;
}

inline SuiteResult suite_pullback_commutes_with_d(Rng& rng, int cases) {
  SuiteResult r{"pullback(phi, d a) = d pullback(phi, a)", cases, 0};
  for (int i = 0; i < cases; ++i) {
    const int sdim = static_cast<int>(rng.uniform_int(2, 4));
    const int tdim = static_cast<int>(rng.uniform_int(2, 4));
    Chart source = gen_chart(sdim);
    std::vector<std::string> tvars;
    for (int k = 0; k < tdim; ++k) tvars.push_back("y" + std::to_string(k + 1));
    Chart target(tvars);
    // general coefficients need relabeling maps to keep substitution closed
    const bool general = rng.coin();
    ChartMap phi = general ? gen_rename_map(rng, source, target)
                           : gen_chart_map(rng, source, target, rng.coin());
    const int degree = static_cast<int>(rng.uniform_int(0, tdim - 1));
    DifferentialForm a = gen_form(rng, target, degree, !general);
    if (pullback(phi, ext_d(a)) != ext_d(pullback(phi, a))) r.failures++;
  }
  return r;
}

inline SuiteResult suite_pullback_wedge(Rng& rng, int cases) {
  SuiteResult r{"pullback(phi, a ^ b) = pullback(phi, a) ^ pullback(phi, b)", cases, 0};
  for (int i = 0; i < cases; ++i) {
    const int sdim = static_cast<int>(rng.uniform_int(2, 4));
    const int tdim = static_cast<int>(rng.uniform_int(2, 4));
    Chart source = gen_chart(sdim);
    std::vector<std::string> tvars;
    for (int k = 0; k < tdim; ++k) tvars.push_back("y" + std::to_string(k + 1));
    Chart target(tvars);
    const bool general = rng.coin();
    ChartMap phi = general ? gen_rename_map(rng, source, target)
                           : gen_chart_map(rng, source, target, rng.coin());
    // both the target product and its pullback must respect the wedge bound
    const int cap = std::min(sdim, tdim);
    const int p = static_cast<int>(rng.uniform_int(0, cap));
    const int q = static_cast<int>(rng.uniform_int(0, cap - p));
    DifferentialForm a = gen_form(rng, target, p, !general);
    DifferentialForm b = gen_form(rng, target, q, !general);
    if (pullback(phi, wedge(a, b)) != wedge(pullback(phi, a), pullback(phi, b))) r.failures++;
  }
  return r;
}

inline SuiteResult suite_wedge_graded_commutative(Rng& rng, int cases) {
  SuiteResult r{"a ^ b = (-1)^{pq} b ^ a", cases, 0};
  for (int i = 0; i < cases; ++i) {
    const int dim = static_cast<int>(rng.uniform_int(2, 5));
    Chart ch = gen_chart(dim);
    const int p = static_cast<int>(rng.uniform_int(0, dim));
    const int q = static_cast<int>(rng.uniform_int(0, dim - p));
    DifferentialForm a = gen_form(rng, ch, p, false);
    DifferentialForm b = gen_form(rng, ch, q, false);
    DifferentialForm lhs = wedge(a, b);
    DifferentialForm rhs = wedge(b, a);
    if ((p * q) % 2 == 1) rhs = -rhs;
    if (lhs != rhs) r.failures++;
  }
  return r;
}

inline SuiteResult suite_interior_leibniz(Rng& rng, int cases) {
  SuiteResult r{"i_X(a ^ b) = i_X a ^ b + (-1)^p a ^ i_X b", cases, 0};
  for (int i = 0; i < cases; ++i) {
    const int dim = static_cast<int>(rng.uniform_int(2, 5));
    Chart ch = gen_chart(dim);
    const int p = static_cast<int>(rng.uniform_int(1, dim - 1));
    const int q = static_cast<int>(rng.uniform_int(1, dim - p));
    DifferentialForm a = gen_form(rng, ch, p, false);
    DifferentialForm b = gen_form(rng, ch, q, false);
    VectorField x = gen_vector_field(rng, ch, false);
    DifferentialForm lhs = interior(x, wedge(a, b));
    DifferentialForm rhs = wedge(interior(x, a), b);
    DifferentialForm second = wedge(a, interior(x, b));
    rhs = (p % 2 == 1) ? rhs - second : rhs + second;
    if (lhs != rhs) r.failures++;
  }
  return r;
}

inline SuiteResult suite_lie_commutes_with_d(Rng& rng, int cases) {
  SuiteResult r{"L_X d a = d L_X a", cases, 0};
  for (int i = 0; i < cases; ++i) {
    const int dim = static_cast<int>(rng.uniform_int(2, 4));
    Chart ch = gen_chart(dim);
    const int degree = static_cast<int>(rng.uniform_int(0, dim - 1));
    DifferentialForm a = gen_form(rng, ch, degree, false);
    VectorField x = gen_vector_field(rng, ch, false);
    if (lie_derivative(x, ext_d(a)) != ext_d(lie_derivative(x, a))) r.failures++;
  }
  return r;
}

inline std::vector<SuiteResult> run_exterior_suites(std::uint64_t seed, int cases) {
  Rng rng(seed);
  std::vector<SuiteResult> out;
  out.push_back(suite_d_squared(rng, cases));
  out.push_back(suite_pullback_commutes_with_d(rng, cases));
  out.push_back(suite_wedge_graded_commutative(rng, cases));
  out.push_back(suite_interior_leibniz(rng, cases));
  return out;
}

}  // namespace bsymp::prop
