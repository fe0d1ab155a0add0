#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "bsymp/classify.hpp"
#include "bsymp/form.hpp"

namespace bsymp::desing {

using geo::Chart;
using geo::DifferentialForm;
using sym::Expression;

// Odd quintic p(x) = a x + c x^3 + e x^5 on [-1, 1] matching the outer
// branch -1/((2k-1)x^{2k-1}) + 2 to second order at x = 1. The matching
// system is solved exactly, so the glued profile is C^2 with no boundary
// jump at all.
struct SmoothingProfile {
  int k = 1;
  Rational a, c, e;
  int continuity_order = 2;

  static SmoothingProfile make(int k) {
    if (k < 1) throw Error("SmoothingProfile: k must be positive");
    // p(1) = -1/(2k-1) + 2,  p'(1) = 1,  p''(1) = -2k
    const Rational v0 = Rational(-1, 2 * k - 1) + 2;
    const Rational v1 = Rational(1);
    const Rational v2 = Rational(-2 * k);
    // [1 1 1; 1 3 5; 0 6 20] (a c e)^T = (v0 v1 v2)^T, solved by elimination
    SmoothingProfile p;
    p.k = k;
    const Rational d21 = v1 - v0;            // 2c + 4e
    p.e = (v2 - 3 * d21) / 8;                // 6c + 20e - 3(2c + 4e) = 8e
    p.c = (d21 - 4 * p.e) / 2;
    p.a = v0 - p.c - p.e;
    // f'(x) > 0 on [-1, 1], sampled as in the construction requirements
    for (int i = 0; i <= 1000; ++i) {
      const double x = -1.0 + 2.0 * i / 1000.0;
      if (p.inner_prime(x) <= 0)
        throw Error("SmoothingProfile: p' is not positive on [-1,1] for k = " +
                    std::to_string(k));
    }
    return p;
  }

  double inner(double u) const {
    const double u2 = u * u;
    return u * (to_double(a) + u2 * (to_double(c) + u2 * to_double(e)));
  }

  double inner_prime(double u) const {
    const double u2 = u * u;
    return to_double(a) + u2 * (3.0 * to_double(c) + u2 * 5.0 * to_double(e));
  }

  Rational inner_exact(const Rational& u) const {
    return a * u + c * rat_pow(u, 3) + e * rat_pow(u, 5);
  }

  Rational inner_prime_exact(const Rational& u) const {
    return a + 3 * c * rat_pow(u, 2) + 5 * e * rat_pow(u, 4);
  }

  Rational inner_second_exact(const Rational& u) const {
    return 6 * c * u + 20 * e * rat_pow(u, 3);
  }

  // Outer branch and derivatives of the unscaled profile f.
  Rational outer_exact(const Rational& u) const {
    return Rational(-1) / ((2 * k - 1) * rat_pow(u, 2 * k - 1)) + (u > 0 ? 2 : -2);
  }
};

// f_eps(x) = eps^{-(2k-1)} f(x/eps).
inline double f_eps(const SmoothingProfile& p, double eps, double x) {
  if (eps <= 0) throw Error("f_eps: eps must be positive");
  const int k = p.k;
  const double scale = std::pow(eps, static_cast<double>(-(2 * k - 1)));
  if (std::abs(x) <= eps) return scale * p.inner(x / eps);
  const double outer = -1.0 / ((2 * k - 1) * std::pow(x, static_cast<double>(2 * k - 1)));
  return outer + (x > 0 ? 2.0 : -2.0) * scale;
}

// d/dx f_eps: exactly x^{-2k} outside the collar, so the desingularized
// form coincides with the original one there bit for bit.
inline double f_eps_prime(const SmoothingProfile& p, double eps, double x) {
  if (eps <= 0) throw Error("f_eps_prime: eps must be positive");
  const int k = p.k;
  if (std::abs(x) <= eps)
    return std::pow(eps, static_cast<double>(-2 * k)) * p.inner_prime(x / eps);
  return std::pow(x, static_cast<double>(-2 * k));
}

// Pointwise-evaluable 2-form: either a symbolic form or the
// f_eps-desingularization df_eps ^ (sum x^i alpha_i) + beta, which contains
// a piecewise profile and so lives outside the symbolic algebra.
class NumericForm {
 public:
  static NumericForm from_symbolic(DifferentialForm f) {
    if (f.degree() != 2) throw Error("NumericForm: needs a degree-2 form");
    NumericForm n;
    n.chart_ = f.chart();
    n.symbolic_ = std::move(f);
    return n;
  }

  static NumericForm desingularized(const DifferentialForm& omega, const std::string& var,
                                    int k, double eps, const SmoothingProfile& profile) {
    if (k < 1) throw Error("desingularize: k must be positive");
    if (profile.k != k) throw Error("desingularize: profile built for a different k");
    if (eps <= 0) throw Error("desingularize: eps must be positive");
    NumericForm n;
    n.chart_ = omega.chart();
    n.var_index_ = n.chart_.require_index(var);
    n.var_ = var;
    n.k_ = k;
    n.eps_ = eps;
    n.profile_ = profile;
    auto dec = sing::b_decomposition(omega, var, 2 * k);
    n.alphas_ = std::move(dec.alphas);
    n.beta_ = std::move(dec.beta);
    n.desing_ = true;
    return n;
  }

  const Chart& chart() const { return chart_; }

  // Coefficient of dx_i ^ dx_j (any order; antisymmetric).
  double coeff(int i, int j, const std::map<std::string, double>& point) const {
    if (i == j) return 0.0;
    if (i > j) return -coeff(j, i, point);
    if (!desing_) {
      const Expression c = symbolic_.coeff({i, j});
      return c.is_zero() ? 0.0 : sym::evaluate(c, point);
    }
    double value = 0.0;
    const Expression b = beta_.coeff({i, j});
    if (!b.is_zero()) value = sym::evaluate(b, point);
    const double x = point.at(var_);
    if (i == var_index_)
      value += f_eps_prime(profile_, eps_, x) * series_component(j, x, point);
    else if (j == var_index_)
      value -= f_eps_prime(profile_, eps_, x) * series_component(i, x, point);
    return value;
  }

  Eigen::MatrixXd matrix(const std::map<std::string, double>& point) const {
    const int n = chart_.dim();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double v = coeff(i, j, point);
        m(i, j) = v;
        m(j, i) = -v;
      }
    return m;
  }

 private:
  // (sum_m x^m alpha_m)_j evaluated at the point.
  double series_component(int j, double x, const std::map<std::string, double>& point) const {
    double s = 0.0;
    for (std::size_t m = 0; m < alphas_.size(); ++m) {
      const Expression c = alphas_[m].coeff({j});
      if (c.is_zero()) continue;
      s += std::pow(x, static_cast<double>(m)) * sym::evaluate(c, point);
    }
    return s;
  }

  Chart chart_;
  DifferentialForm symbolic_;
  bool desing_ = false;
  int var_index_ = -1;
  std::string var_;
  int k_ = 0;
  double eps_ = 0;
  SmoothingProfile profile_;
  std::vector<DifferentialForm> alphas_;
  DifferentialForm beta_;
};

inline NumericForm desingularize(const DifferentialForm& omega, const std::string& var, int k,
                                 double eps, const SmoothingProfile& profile) {
  return NumericForm::desingularized(omega, var, k, eps, profile);
}

// --- grid verification -----------------------------------------------------

struct GridAxis {
  double lo = -1, hi = 1;
  int count = 11;
};

using GridSpec = std::vector<GridAxis>;  // one axis per chart variable

struct GridFailure {
  std::map<std::string, double> point;
  std::string reason;
};

struct GridReport {
  long points = 0;
  double min_abs_det = std::numeric_limits<double>::infinity();
  bool sign_constant = true;
  int det_sign = 0;
  std::vector<GridFailure> failures;
};

template <typename Sink>
GridReport verify_symplectic_on_grid(const NumericForm& form, const GridSpec& grid, Sink&& sink) {
  const Chart& ch = form.chart();
  if (static_cast<int>(grid.size()) != ch.dim())
    throw Error("verify_symplectic_on_grid: grid axes != chart dimension");
  GridReport rep;
  std::vector<int> idx(grid.size(), 0);
  std::map<std::string, double> point;
  while (true) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const GridAxis& ax = grid[i];
      const double t = ax.count > 1 ? static_cast<double>(idx[i]) / (ax.count - 1) : 0.0;
      point[ch.vars[i]] = ax.lo + (ax.hi - ax.lo) * t;
    }
    ++rep.points;
    try {
      const double det = form.matrix(point).determinant();
      if (!std::isfinite(det)) throw DomainError("determinant is not finite");
      sink(point, det);
      rep.min_abs_det = std::min(rep.min_abs_det, std::abs(det));
      const int s = det > 0 ? 1 : (det < 0 ? -1 : 0);
      if (s == 0)
        rep.sign_constant = false;
      else if (rep.det_sign == 0)
        rep.det_sign = s;
      else if (s != rep.det_sign)
        rep.sign_constant = false;
    } catch (const Error& err) {
      rep.failures.push_back({point, err.what()});
    }
    std::size_t j = 0;
    for (; j < grid.size(); ++j) {
      if (++idx[j] < grid[j].count) break;
      idx[j] = 0;
    }
    if (j == grid.size()) break;
  }
  return rep;
}

inline GridReport verify_symplectic_on_grid(const NumericForm& form, const GridSpec& grid) {
  return verify_symplectic_on_grid(form, grid,
                                   [](const std::map<std::string, double>&, double) {});
}

// --- convergence of the dual bivectors --------------------------------------

struct ConvergenceRow {
  double eps = 0;
  double sup_deviation = 0;
};

// sup over samples of || omega_eps^{-1}(p) - omega^{-1}(p) ||_F per epsilon.
inline std::vector<ConvergenceRow> convergence_report(
    const DifferentialForm& omega, const std::string& var, int k,
    const SmoothingProfile& profile, const std::vector<double>& epsilons,
    const std::vector<std::map<std::string, double>>& samples) {
  if (samples.empty()) return {};
  for (std::size_t i = 1; i < epsilons.size(); ++i)
    if (!(epsilons[i] < epsilons[i - 1]))
      throw Error("convergence_report: epsilons must be strictly decreasing");
  for (const auto& p : samples)
    if (p.at(var) == 0.0) throw Error("convergence_report: sample on Z");

  const NumericForm base = NumericForm::from_symbolic(omega);
  std::vector<ConvergenceRow> rows;
  for (double eps : epsilons) {
    const NumericForm fe = desingularize(omega, var, k, eps, profile);
    double sup = 0.0;
    for (const auto& p : samples) {
      const Eigen::MatrixXd m0 = base.matrix(p);
      const Eigen::MatrixXd m1 = fe.matrix(p);
      const double d0 = m0.determinant();
      const double d1 = m1.determinant();
      if (!std::isfinite(d0) || std::abs(d0) < 1e-300)
        throw SingularMatrixAtSample("omega is singular at a sample");
      if (!std::isfinite(d1) || std::abs(d1) < 1e-300)
        throw SingularMatrixAtSample("omega_eps is singular at a sample");
      sup = std::max(sup, (m1.inverse() - m0.inverse()).norm());
    }
    rows.push_back({eps, sup});
  }
  return rows;
}

// Postcondition helper: non-increasing, and a >= 8x shrink in eps cuts the
// deviation by at least 10x (trivially true when already exactly zero).
inline bool convergence_acceptable(const std::vector<ConvergenceRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].sup_deviation > rows[i - 1].sup_deviation) return false;
  if (rows.size() >= 2 && rows.front().eps >= 8.0 * rows.back().eps) {
    if (rows.front().sup_deviation == 0.0) return rows.back().sup_deviation == 0.0;
    return rows.back().sup_deviation < rows.front().sup_deviation / 10.0;
  }
  return true;
}

}  // namespace bsymp::desing
