#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bsymp/form.hpp"
#include "bsymp/rng.hpp"

namespace bsymp::sing {

using geo::Chart;
using geo::DifferentialForm;
using sym::Expression;

inline constexpr std::uint64_t kDefaultSeed = 0x5eed0001u;
inline constexpr int kResidualSamples = 20;
inline constexpr double kResidualBox = 2.0;
inline constexpr double kRankThreshold = 1e-9;
inline constexpr double kFitR2Min = 0.999;
inline constexpr double kFitRationalTol = 0.02;
inline constexpr int kFitMaxDenominator = 12;

enum class Verdict { Symplectic, BSymplectic, Folded, Degenerate };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Symplectic: return "Symplectic";
    case Verdict::BSymplectic: return "BSymplectic";
    case Verdict::Folded: return "Folded";
    case Verdict::Degenerate: return "Degenerate";
  }
  return "?";
}

struct Classification {
  Verdict verdict = Verdict::Degenerate;
  int m = 0;  // order for BSymplectic(m) / Folded(m)
  Rational exponent;
  bool residual_nonvanishing = false;
  bool restriction_ok = false;  // meaningful for Folded only
  std::string method;           // "symbolic" or "numeric-fit"
  std::optional<double> fit_quality;
  std::uint64_t seed = 0;
  std::vector<double> residual_samples;
  std::string diagnostics;
};

// Z = {defining = 0}; the seed is a point on Z used to spawn transversal
// rays for the numeric exponent fit.
struct Hypersurface {
  Expression defining;
  std::map<std::string, double> transversal_seed;
};

// (dvar / var^m) as a 1-form, the singular basis leg of the b^m expansion.
inline DifferentialForm b_basis_leg(const Chart& chart, const std::string& var, int m) {
  DifferentialForm f(chart, 1);
  f.add({chart.require_index(var)}, Expression::variable(var, Rational(-m)));
  return f;
}

struct BDecomposition {
  std::vector<DifferentialForm> alphas;  // alpha_0 .. alpha_{m-1}, no d(var) leg
  DifferentialForm beta;                 // smooth remainder

  // (dvar/var^m) ^ (sum var^i alpha_i) + beta
  DifferentialForm reassemble(const Chart& chart, const std::string& var) const {
    const int m = static_cast<int>(alphas.size());
    DifferentialForm series = DifferentialForm::zero(chart, alphas.empty() ? 1 : alphas[0].degree());
    for (int i = 0; i < m; ++i)
      series = series + Expression::variable(var, Rational(i)) * alphas[static_cast<std::size_t>(i)];
    return wedge(b_basis_leg(chart, var, m), series) + beta;
  }
};

// Canonical extraction of omega = dvar/var^m ^ (sum var^i alpha_i) + beta
// with var-independent alpha_i. Coefficients of d(var)-components must have
// integer exponents >= -m on their singular part; everything else must be
// smooth in var.
inline BDecomposition b_decomposition(const DifferentialForm& omega, const std::string& var,
                                      int m) {
  if (m < 1) throw Error("b_decomposition: m must be positive");
  const Chart& ch = omega.chart();
  const int v = ch.require_index(var);
  const int p = omega.degree();
  if (p < 1) throw Error("b_decomposition: needs degree >= 1");

  BDecomposition out;
  out.alphas.assign(static_cast<std::size_t>(m), DifferentialForm::zero(ch, p - 1));
  out.beta = DifferentialForm::zero(ch, p);

  for (const auto& [t, c] : omega.coeffs()) {
    auto vpos = std::find(t.begin(), t.end(), v);
    if (vpos == t.end()) {
      for (const sym::Term& term : c.terms()) {
        auto it = term.powers.find(var);
        if (it != term.powers.end() && it->second < 0)
          throw NotABmForm("negative power of " + var + " off the d" + var + " leg");
      }
      out.beta.add(t, c);
      continue;
    }
    const int pos = static_cast<int>(vpos - t.begin());
    const int sign = (pos % 2 == 0) ? 1 : -1;  // move dvar to the front
    geo::IndexTuple rest;
    for (int i : t)
      if (i != v) rest.push_back(i);

    Expression smooth = Expression::zero();
    for (const sym::Term& term : c.terms()) {
      auto it = term.powers.find(var);
      Rational q = (it == term.powers.end()) ? Rational(0) : it->second;
      if (q >= 0) {
        smooth = smooth + Expression::from_term(term);
        continue;
      }
      if (q < Rational(-m))
        throw NotABmForm("pole order " + rat_str(-q) + " exceeds " + std::to_string(m) +
                         " in d" + var + " coefficient");
      if (!is_integer(q))
        throw NotABmForm("fractional pole exponent " + rat_str(q) + " in d" + var +
                         " coefficient");
      sym::Term reduced = term;
      reduced.powers.erase(var);
      for (const sym::ElemFactor& f : reduced.elems)
        if (f.var == var)
          throw NotABmForm("singular part of d" + var +
                           " coefficient depends on the defining variable");
      if (sign < 0) reduced.coeff = -reduced.coeff;
      const long long i = to_long(q) + m;  // var^(i-m) = var^q
      out.alphas[static_cast<std::size_t>(i)].add(rest, Expression::from_term(reduced));
    }
    if (!smooth.is_zero()) out.beta.add(t, smooth);
  }
  return out;
}

namespace detail {

inline std::map<std::string, double> sample_point(const Chart& ch, Rng& rng, double box) {
  std::map<std::string, double> p;
  for (const std::string& v : ch.vars) p[v] = rng.uniform(-box, box);
  return p;
}

// Evaluates e at random points (with overrides applied), retrying samples
// that fall outside the domain of fractional powers.
inline std::vector<double> sample_values(const Expression& e, const Chart& ch, Rng& rng,
                                         const std::map<std::string, double>& overrides,
                                         int count) {
  std::vector<double> vals;
  int guard = 0;
  while (static_cast<int>(vals.size()) < count) {
    if (++guard > 100 * count)
      throw Error("sampling failed: expression domain rejects the sample box");
    auto p = sample_point(ch, rng, kResidualBox);
    for (const auto& [k, v] : overrides) p[k] = v;
    try {
      vals.push_back(sym::evaluate(e, p));
    } catch (const DomainError&) {
      continue;
    }
  }
  return vals;
}

inline bool nonvanishing_consistent_sign(const std::vector<double>& vals) {
  if (vals.empty()) return false;
  const double s = vals.front();
  if (s == 0.0 || !std::isfinite(s)) return false;
  for (double v : vals)
    if (!std::isfinite(v) || v == 0.0 || (v > 0) != (s > 0)) return false;
  return true;
}

// Nearest rational with small denominator; nullopt if none within tol.
inline std::optional<Rational> snap_to_rational(double x, int max_den, double tol) {
  std::optional<Rational> best;
  double best_err = tol;
  for (int q = 1; q <= max_den; ++q) {
    double pd = std::round(x * q);
    if (std::abs(pd) > 1e15) continue;
    const auto pnum = static_cast<long long>(pd);
    const double err = std::abs(x - pd / q);
    if (err <= best_err) {
      best_err = err;
      best = Rational(pnum, q);
    }
  }
  return best;
}

struct LineFit {
  double slope = 0, intercept = 0, r2 = 1;
};

inline LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  LineFit f;
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) throw PoorFit("degenerate abscissae in exponent fit");
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_tot = 0, ss_res = 0;
  const double mean = sy / n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double fit = f.slope * xs[i] + f.intercept;
    ss_tot += (ys[i] - mean) * (ys[i] - mean);
    ss_res += (ys[i] - fit) * (ys[i] - fit);
  }
  f.r2 = (ss_tot < 1e-24) ? 1.0 : 1.0 - ss_res / ss_tot;
  return f;
}

inline Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& grad) {
  // columns span ker(grad^T)
  const auto n = grad.size();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(grad.transpose(), Eigen::ComputeFullV);
  return svd.matrixV().rightCols(n - 1);
}

inline int numeric_rank(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0;
  const double thresh = kRankThreshold * s(0);
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > thresh && s(0) > 0) ++r;
  return r;
}

}  // namespace detail

// Pullback of omega to Z = {var = 0}: drops d(var) legs, sets var = 0, and
// reports the maximal numeric rank over sampled points of Z.
inline std::pair<int, bool> restriction_rank(const DifferentialForm& omega,
                                             const std::string& var,
                                             std::uint64_t seed = kDefaultSeed) {
  const Chart& ch = omega.chart();
  const int v = ch.require_index(var);
  for (const auto& [t, c] : omega.coeffs()) {
    for (const sym::Term& term : c.terms()) {
      auto it = term.powers.find(var);
      if (it != term.powers.end() && it->second < 0)
        throw PoleOnZ("coefficient has a pole on {" + var + " = 0}");
    }
  }
  // restrict: drop tuples containing var, set var = 0 elsewhere
  std::map<std::string, Expression> zero_binding{{var, Expression::zero()}};
  std::vector<std::pair<geo::IndexTuple, Expression>> restricted;
  for (const auto& [t, c] : omega.coeffs()) {
    if (std::find(t.begin(), t.end(), v) != t.end()) continue;
    Expression rc = sym::substitute(c, zero_binding);
    if (!rc.is_zero()) restricted.emplace_back(t, std::move(rc));
  }
  const int n = ch.dim();
  std::vector<int> reindex(static_cast<std::size_t>(n), -1);
  int k = 0;
  for (int i = 0; i < n; ++i)
    if (i != v) reindex[static_cast<std::size_t>(i)] = k++;

  Rng rng(seed);
  int best = 0;
  for (int s = 0; s < kResidualSamples; ++s) {
    auto p = detail::sample_point(ch, rng, kResidualBox);
    p[var] = 0.0;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n - 1, n - 1);
    for (const auto& [t, c] : restricted) {
      const double val = sym::evaluate(c, p);
      const int a = reindex[static_cast<std::size_t>(t[0])];
      const int b = reindex[static_cast<std::size_t>(t[1])];
      m(a, b) = val;
      m(b, a) = -val;
    }
    best = std::max(best, detail::numeric_rank(m));
  }
  return {best, best == n - 2};
}

// Singularity type of a closed 2-form along Z = {var = 0} by exact leading
// exponent of the top power.
inline Classification classify_along_coordinate(const DifferentialForm& omega,
                                                const std::string& var,
                                                std::uint64_t seed = kDefaultSeed) {
  const Chart& ch = omega.chart();
  if (omega.degree() != 2) throw Error("classify: needs a degree-2 form");
  if (ch.dim() % 2 != 0) throw OddDimension("classify: chart dimension is odd");
  const Expression top = geo::top_coefficient(geo::top_power(omega));
  if (top.is_zero()) throw IdenticallyZeroTopPower("top power vanishes identically");

  auto [expo, residual] = sym::leading_exponent(top, var);

  Classification out;
  out.method = "symbolic";
  out.seed = seed;
  out.exponent = expo;

  Rng rng(seed);
  out.residual_samples =
      detail::sample_values(residual, ch, rng, {{var, 0.0}}, kResidualSamples);
  out.residual_nonvanishing = detail::nonvanishing_consistent_sign(out.residual_samples);
  if (!out.residual_nonvanishing) {
    out.verdict = Verdict::Degenerate;
    out.diagnostics = "residual of the top power vanishes or changes sign on {" + var + " = 0}";
    return out;
  }
  if (expo == 0) {
    out.verdict = Verdict::Symplectic;
    return out;
  }
  if (is_integer(expo)) {
    const long long e = to_long(expo);
    if (e < 0) {
      out.verdict = Verdict::BSymplectic;
      out.m = static_cast<int>(-e);
      return out;
    }
    out.verdict = Verdict::Folded;
    out.m = static_cast<int>(e);
    try {
      auto [rank, ok] = restriction_rank(omega, var, seed);
      out.restriction_ok = ok;
      if (!ok)
        out.diagnostics = "restriction to Z has rank " + std::to_string(rank) +
                          " < " + std::to_string(ch.dim() - 2);
    } catch (const PoleOnZ& e2) {
      out.restriction_ok = false;
      out.diagnostics = e2.what();
    }
    return out;
  }
  out.verdict = Verdict::Degenerate;
  out.diagnostics = "leading exponent " + rat_str(expo) + " is not an integer";
  return out;
}

// Numeric exponent fit along a ray transversal to a general hypersurface
// Z = {h = 0}: slope of log|top coefficient| against log|h|.
inline Classification classify_along_hypersurface(const DifferentialForm& omega,
                                                  const Hypersurface& z,
                                                  std::uint64_t seed = kDefaultSeed) {
  const Chart& ch = omega.chart();
  if (omega.degree() != 2) throw Error("classify: needs a degree-2 form");
  if (ch.dim() % 2 != 0) throw OddDimension("classify: chart dimension is odd");
  const int n = ch.dim();

  const double h0 = sym::evaluate(z.defining, z.transversal_seed);
  if (std::abs(h0) > 1e-12)
    throw Error("hypersurface seed is not on Z (h = " + std::to_string(h0) + ")");

  Eigen::VectorXd grad(n);
  for (int i = 0; i < n; ++i)
    grad(i) = sym::evaluate(sym::differentiate(z.defining, ch.vars[static_cast<std::size_t>(i)]),
                            z.transversal_seed);
  const double gnorm = grad.norm();
  if (gnorm < 1e-10) throw GradientVanishes("defining function has vanishing gradient at seed");
  const Eigen::VectorXd dir = grad / gnorm;

  const Expression top = geo::top_coefficient(geo::top_power(omega));
  if (top.is_zero()) throw IdenticallyZeroTopPower("top power vanishes identically");

  std::vector<double> xs, ys, cs, hs;
  for (int j = 4; j <= 14; ++j) {
    const double s = std::ldexp(1.0, -j);
    std::map<std::string, double> p = z.transversal_seed;
    for (int i = 0; i < n; ++i) p[ch.vars[static_cast<std::size_t>(i)]] += s * dir(i);
    const double cv = sym::evaluate(top, p);
    const double hv = sym::evaluate(z.defining, p);
    if (hv == 0.0 || !std::isfinite(cv))
      throw PoorFit("ray point landed on Z or outside the domain");
    hs.push_back(hv);
    cs.push_back(cv);
    if (cv == 0.0)
      throw PoorFit("top coefficient vanishes on the transversal ray");
    xs.push_back(std::log(std::abs(hv)));
    ys.push_back(std::log(std::abs(cv)));
  }

  const detail::LineFit fit = detail::least_squares(xs, ys);
  if (fit.r2 < kFitR2Min)
    throw PoorFit("R^2 = " + std::to_string(fit.r2) + " below " + std::to_string(kFitR2Min));
  auto snapped = detail::snap_to_rational(fit.slope, kFitMaxDenominator, kFitRationalTol);
  if (!snapped)
    throw PoorFit("no rational exponent with denominator <= " +
                  std::to_string(kFitMaxDenominator) + " within " +
                  std::to_string(kFitRationalTol) + " of slope " + std::to_string(fit.slope));

  Classification out;
  out.method = "numeric-fit";
  out.seed = seed;
  out.fit_quality = fit.r2;
  out.exponent = *snapped;
  const double expd = to_double(*snapped);
  for (std::size_t i = 0; i < cs.size(); ++i)
    out.residual_samples.push_back(cs[i] / std::pow(std::abs(hs[i]), expd));
  out.residual_nonvanishing = detail::nonvanishing_consistent_sign(out.residual_samples);

  if (*snapped == 0) {
    out.verdict = out.residual_nonvanishing ? Verdict::Symplectic : Verdict::Degenerate;
    return out;
  }
  if (is_integer(*snapped) && out.residual_nonvanishing) {
    const long long e = to_long(*snapped);
    if (e < 0) {
      out.verdict = Verdict::BSymplectic;
      out.m = static_cast<int>(-e);
      return out;
    }
    out.verdict = Verdict::Folded;
    out.m = static_cast<int>(e);
    // numeric restriction rank at sampled points of Z near the seed
    Rng rng(seed);
    int best = 0;
    for (int s = 0; s < kResidualSamples; ++s) {
      Eigen::VectorXd offset(n);
      for (int i = 0; i < n; ++i) offset(i) = rng.uniform(-0.5, 0.5);
      std::map<std::string, double> p = z.transversal_seed;
      const Eigen::MatrixXd tan0 = detail::tangent_basis(dir);
      const Eigen::VectorXd shift = tan0 * (tan0.transpose() * offset);
      for (int i = 0; i < n; ++i) p[ch.vars[static_cast<std::size_t>(i)]] += shift(i);
      // Newton back onto Z along the gradient
      for (int it = 0; it < 30; ++it) {
        const double hv = sym::evaluate(z.defining, p);
        if (std::abs(hv) < 1e-13) break;
        Eigen::VectorXd g(n);
        for (int i = 0; i < n; ++i)
          g(i) = sym::evaluate(
              sym::differentiate(z.defining, ch.vars[static_cast<std::size_t>(i)]), p);
        const double g2 = g.squaredNorm();
        if (g2 < 1e-20) break;
        for (int i = 0; i < n; ++i)
          p[ch.vars[static_cast<std::size_t>(i)]] -= hv * g(i) / g2;
      }
      Eigen::VectorXd g(n);
      for (int i = 0; i < n; ++i)
        g(i) = sym::evaluate(
            sym::differentiate(z.defining, ch.vars[static_cast<std::size_t>(i)]), p);
      if (g.norm() < 1e-12) continue;
      const Eigen::MatrixXd nt = detail::tangent_basis(g / g.norm());
      const Eigen::MatrixXd m = geo::matrix_at(omega, p);
      best = std::max(best, detail::numeric_rank(nt.transpose() * m * nt));
    }
    out.restriction_ok = (best == n - 2);
    return out;
  }
  out.verdict = Verdict::Degenerate;
  out.diagnostics = is_integer(*snapped)
                        ? std::string("residual vanishes or changes sign along the ray")
                        : "fitted exponent " + rat_str(*snapped) + " is not an integer";
  return out;
}

}  // namespace bsymp::sing
