#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

#include "bsymp/classify.hpp"
#include "bsymp/form.hpp"
#include "bsymp/rng.hpp"

namespace bsymp::contact {

using geo::Chart;
using geo::DifferentialForm;
using geo::VectorField;
using sym::Expression;

// alpha ^ (d alpha)^n as a top form on a (2n+1)-chart.
inline DifferentialForm contact_volume(const DifferentialForm& alpha) {
  const Chart& ch = alpha.chart();
  if (ch.dim() % 2 == 0) throw EvenDimension("contact: chart dimension must be odd");
  if (alpha.degree() != 1) throw Error("contact: needs a one-form");
  const int n = (ch.dim() - 1) / 2;
  const DifferentialForm da = ext_d(alpha);
  DifferentialForm pw = da;
  for (int i = 1; i < n; ++i) pw = wedge(pw, da);
  return wedge(alpha, pw);
}

struct ContactCheck {
  bool ok = false;
  Expression volume_coeff;   // coefficient of alpha ^ (d alpha)^n
  Expression cleared_coeff;  // after multiplying by the singular variable
  std::vector<double> samples_on_z;
  std::vector<double> samples_off_z;
  std::string diagnostics;
};

// b-contact condition: alpha ^ (d alpha)^n != 0 as a b-top-form. The order-1
// pole in the singular variable is cleared by multiplication before the
// residual is sampled on and off Z.
inline ContactCheck is_b_contact(const DifferentialForm& alpha,
                                 std::uint64_t seed = sing::kDefaultSeed) {
  ContactCheck out;
  const Chart& ch = alpha.chart();
  const DifferentialForm vol = contact_volume(alpha);
  out.volume_coeff = geo::top_coefficient(vol);
  if (out.volume_coeff.is_zero()) {
    out.diagnostics = "alpha ^ (d alpha)^n vanishes identically";
    return out;
  }
  out.cleared_coeff = out.volume_coeff;
  if (ch.singular_var) {
    const auto [expo, residual] = sym::leading_exponent(out.volume_coeff, *ch.singular_var);
    if (expo < Rational(-1)) {
      out.diagnostics = "pole of order " + rat_str(-expo) + " in " + *ch.singular_var +
                        " exceeds the order-1 b-form pole";
      return out;
    }
    out.cleared_coeff =
        Expression::variable(*ch.singular_var) * out.volume_coeff;
  }
  Rng rng(seed);
  if (ch.singular_var)
    out.samples_on_z = sing::detail::sample_values(out.cleared_coeff, ch, rng,
                                                   {{*ch.singular_var, 0.0}}, 20);
  out.samples_off_z = sing::detail::sample_values(out.cleared_coeff, ch, rng, {}, 20);
  const bool on_ok =
      !ch.singular_var || sing::detail::nonvanishing_consistent_sign(out.samples_on_z);
  const bool off_ok = sing::detail::nonvanishing_consistent_sign(out.samples_off_z);
  out.ok = on_ok && off_ok;
  if (!out.ok) out.diagnostics = "volume coefficient vanishes or changes sign at samples";
  return out;
}

// Reeb field: the unique R with interior(R, alpha) = 1 and
// interior(R, d alpha) = 0. Solved through the contraction identity
// interior(R, alpha ^ (d alpha)^n) = (d alpha)^n, which pins every
// component after one exact division by the volume coefficient.
inline VectorField reeb_field(const DifferentialForm& alpha) {
  const Chart& ch = alpha.chart();
  const int dim = ch.dim();
  const int n = (dim - 1) / 2;
  const DifferentialForm vol = contact_volume(alpha);
  const Expression g = geo::top_coefficient(vol);
  if (g.is_zero()) throw RankDeficient("reeb_field: alpha ^ (d alpha)^n vanishes");

  const DifferentialForm da = ext_d(alpha);
  DifferentialForm mu = DifferentialForm::scalar(ch, Expression::constant(1));
  if (n >= 1) {
    mu = da;
    for (int i = 1; i < n; ++i) mu = wedge(mu, da);
  }

  VectorField r(ch);
  for (int i = 0; i < dim; ++i) {
    geo::IndexTuple rest;
    for (int j = 0; j < dim; ++j)
      if (j != i) rest.push_back(j);
    Expression num = mu.coeff(rest);
    if (num.is_zero()) continue;
    if (i % 2 == 1) num = -num;
    r.components[i] = sym::divide_by_monomial(num, g);
  }

  // defining equations, verified structurally
  const DifferentialForm pairing = interior(r, alpha);
  if (pairing.coeff({}) != Expression::constant(1))
    throw RankDeficient("reeb_field: interior(R, alpha) != 1");
  if (!interior(r, da).is_zero())
    throw RankDeficient("reeb_field: interior(R, d alpha) != 0");
  return r;
}

// Pointwise numeric Reeb solve from the stacked system
// [alpha; d alpha] R = (1, 0, ..., 0); also reports the system rank, which
// must be full for uniqueness.
inline std::pair<Eigen::VectorXd, int> reeb_field_at(const DifferentialForm& alpha,
                                                     const std::map<std::string, double>& point) {
  const Chart& ch = alpha.chart();
  const int dim = ch.dim();
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(dim + 1, dim);
  for (int i = 0; i < dim; ++i) {
    const Expression c = alpha.coeff({i});
    if (!c.is_zero()) sys(0, i) = sym::evaluate(c, point);
  }
  const Eigen::MatrixXd da = geo::matrix_at(ext_d(alpha), point);
  sys.block(1, 0, dim, dim) = da.transpose();  // row j: sum_i R_i da(i, j)
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim + 1);
  rhs(0) = 1.0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sys);
  qr.setThreshold(1e-10);
  return {qr.solve(rhs), static_cast<int>(qr.rank())};
}

// L_X omega == omega, structurally.
inline bool liouville_check(const VectorField& x, const DifferentialForm& omega) {
  return lie_derivative(x, omega) == omega;
}

// The would-be contact form iota_X omega; restricting it to a hypersurface
// happens in a chart adapted by the caller.
inline DifferentialForm induced_contact(const VectorField& x, const DifferentialForm& omega) {
  if (omega.is_zero() || x.components.empty())
    return DifferentialForm::zero(omega.chart(), std::max(0, omega.degree() - 1));
  return interior(x, omega);
}

}  // namespace bsymp::contact
