#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bsymp/chart.hpp"
#include "bsymp/expression.hpp"

namespace bsymp::geo {

using sym::Expression;

using IndexTuple = std::vector<int>;  // strictly increasing coordinate indices

namespace detail {

// Sorts a tuple in place, returns the permutation sign, or 0 on a repeated
// index (the wedge monomial vanishes).
inline int sort_tuple(IndexTuple& t) {
  int sign = 1;
  for (std::size_t i = 1; i < t.size(); ++i)
    for (std::size_t j = i; j > 0 && t[j - 1] >= t[j]; --j) {
      if (t[j - 1] == t[j]) return 0;
      std::swap(t[j - 1], t[j]);
      sign = -sign;
    }
  return sign;
}

// Sign of merging two disjoint increasing tuples into one increasing tuple.
inline int merge_tuples(const IndexTuple& a, const IndexTuple& b, IndexTuple& out) {
  long long inversions = 0;
  for (int x : a)
    for (int y : b)
      if (x == y) return 0;
      else if (x > y) ++inversions;
  out.clear();
  out.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return (inversions % 2 == 0) ? 1 : -1;
}

}  // namespace detail

// Degree-p form on an ordered chart; coefficients are expressions keyed by
// strictly increasing index tuples, zero coefficients absent.
class DifferentialForm {
 public:
  DifferentialForm() = default;
  DifferentialForm(Chart chart, int degree) : chart_(std::move(chart)), degree_(degree) {
    if (degree_ < 0 || degree_ > chart_.dim() + 1)
      throw Error("DifferentialForm: degree out of range");
  }

  static DifferentialForm zero(const Chart& chart, int degree) {
    return DifferentialForm(chart, degree);
  }

  // The 1-form d(var).
  static DifferentialForm d(const Chart& chart, const std::string& var) {
    DifferentialForm f(chart, 1);
    f.add({chart.require_index(var)}, Expression::constant(1));
    return f;
  }

  static DifferentialForm scalar(const Chart& chart, Expression value) {
    DifferentialForm f(chart, 0);
    f.add({}, std::move(value));
    return f;
  }

  const Chart& chart() const { return chart_; }
  int degree() const { return degree_; }
  const std::map<IndexTuple, Expression>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }

  Expression coeff(const IndexTuple& t) const {
    auto it = coeffs_.find(t);
    return it == coeffs_.end() ? Expression::zero() : it->second;
  }

  // Adds c * dx_t, sorting the tuple and folding the permutation sign into c.
  void add(IndexTuple t, Expression c) {
    if (static_cast<int>(t.size()) != degree_)
      throw Error("DifferentialForm::add: tuple length != degree");
    for (int i : t)
      if (i < 0 || i >= chart_.dim()) throw Error("DifferentialForm::add: bad index");
    int sign = detail::sort_tuple(t);
    if (sign == 0 || c.is_zero()) return;
    if (sign < 0) c = -c;
    auto it = coeffs_.find(t);
    if (it == coeffs_.end()) {
      coeffs_.emplace(std::move(t), std::move(c));
    } else {
      it->second = it->second + c;
      if (it->second.is_zero()) coeffs_.erase(it);
    }
  }

  friend DifferentialForm operator+(const DifferentialForm& a, const DifferentialForm& b) {
    require_same_chart(a.chart_, b.chart_, "form sum");
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.degree_ != b.degree_) throw Error("form sum: degrees differ");
    DifferentialForm r = a;
    for (const auto& [t, c] : b.coeffs_) r.add(t, c);
    return r;
  }

  friend DifferentialForm operator-(const DifferentialForm& a) {
    DifferentialForm r = a;
    for (auto& [t, c] : r.coeffs_) c = -c;
    return r;
  }

  friend DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b) {
    return a + (-b);
  }

  friend DifferentialForm operator*(const Expression& s, const DifferentialForm& a) {
    DifferentialForm r(a.chart_, a.degree_);
    for (const auto& [t, c] : a.coeffs_) r.add(t, s * c);
    return r;
  }

  friend bool operator==(const DifferentialForm& a, const DifferentialForm& b) {
    if (!compatible(a.chart_, b.chart_)) return false;
    if (a.coeffs_.empty() && b.coeffs_.empty()) return true;  // zero in any degree
    return a.degree_ == b.degree_ && a.coeffs_ == b.coeffs_;
  }
  friend bool operator!=(const DifferentialForm& a, const DifferentialForm& b) {
    return !(a == b);
  }

 private:
  Chart chart_;
  int degree_ = 0;
  std::map<IndexTuple, Expression> coeffs_;
};

// Vector field in the coordinate basis; a b-vector field is one whose
// singular_var component vanishes on Z (checked where needed, not here).
struct VectorField {
  Chart chart;
  std::map<int, Expression> components;

  VectorField() = default;
  explicit VectorField(Chart c) : chart(std::move(c)) {}

  static VectorField basis(const Chart& chart, const std::string& var) {
    VectorField x(chart);
    x.set(var, Expression::constant(1));
    return x;
  }

  void set(const std::string& var, Expression e) {
    int i = chart.require_index(var);
    if (e.is_zero())
      components.erase(i);
    else
      components[i] = std::move(e);
  }

  Expression component(int i) const {
    auto it = components.find(i);
    return it == components.end() ? Expression::zero() : it->second;
  }

  Expression component(const std::string& var) const {
    return component(chart.require_index(var));
  }

  friend VectorField operator*(const Expression& s, const VectorField& x) {
    VectorField r(x.chart);
    for (const auto& [i, c] : x.components) {
      Expression p = s * c;
      if (!p.is_zero()) r.components[i] = std::move(p);
    }
    return r;
  }

  friend bool operator==(const VectorField& a, const VectorField& b) {
    return compatible(a.chart, b.chart) && a.components == b.components;
  }
};

// Smooth map between charts; each target coordinate is an expression in the
// source coordinates.
struct ChartMap {
  Chart source;
  Chart target;
  std::map<std::string, Expression> components;  // target var -> expression

  ChartMap() = default;
  ChartMap(Chart src, Chart tgt, std::map<std::string, Expression> comps)
      : source(std::move(src)), target(std::move(tgt)), components(std::move(comps)) {
    for (const std::string& v : target.vars)
      if (!components.count(v)) throw Error("ChartMap: missing component for " + v);
  }

  static ChartMap identity(const Chart& chart) {
    std::map<std::string, Expression> comps;
    for (const std::string& v : chart.vars) comps[v] = Expression::variable(v);
    return ChartMap(chart, chart, std::move(comps));
  }
};

// --- operations ----------------------------------------------------------

inline DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
  require_same_chart(a.chart(), b.chart(), "wedge");
  const int deg = a.degree() + b.degree();
  if (deg > a.chart().dim()) {
    if (a.is_zero() || b.is_zero()) return DifferentialForm::zero(a.chart(), a.chart().dim());
    throw DegreeOverflow("wedge: degree " + std::to_string(deg) + " exceeds dimension");
  }
  DifferentialForm r(a.chart(), deg);
  IndexTuple merged;
  for (const auto& [ta, ca] : a.coeffs())
    for (const auto& [tb, cb] : b.coeffs()) {
      int sign = detail::merge_tuples(ta, tb, merged);
      if (sign == 0) continue;
      Expression c = ca * cb;
      if (sign < 0) c = -c;
      r.add(merged, std::move(c));
    }
  return r;
}

// Exterior derivative; d of a top-degree form is the zero form (reported at
// top degree so that d after d is total).
inline DifferentialForm ext_d(const DifferentialForm& a) {
  const Chart& ch = a.chart();
  if (a.degree() >= ch.dim()) return DifferentialForm::zero(ch, ch.dim());
  DifferentialForm r(ch, a.degree() + 1);
  for (const auto& [t, c] : a.coeffs()) {
    for (int v = 0; v < ch.dim(); ++v) {
      Expression dc = sym::differentiate(c, ch.vars[static_cast<std::size_t>(v)]);
      if (dc.is_zero()) continue;
      IndexTuple nt;
      nt.reserve(t.size() + 1);
      nt.push_back(v);
      nt.insert(nt.end(), t.begin(), t.end());
      r.add(std::move(nt), std::move(dc));  // add() sorts and signs
    }
  }
  return r;
}

// phi^*(a) for a form on the target chart of phi. Degrees above the source
// dimension pull back to the zero form.
inline DifferentialForm pullback(const ChartMap& phi, const DifferentialForm& a) {
  require_same_chart(phi.target, a.chart(), "pullback");
  const Chart& src = phi.source;
  if (a.degree() > src.dim()) return DifferentialForm::zero(src, src.dim());
  std::map<std::string, Expression> bindings = phi.components;
  // d(phi_j) as 1-forms on the source chart
  std::vector<DifferentialForm> dphi;
  dphi.reserve(phi.target.vars.size());
  for (const std::string& tv : phi.target.vars) {
    DifferentialForm df(src, 1);
    const Expression& comp = phi.components.at(tv);
    for (int i = 0; i < src.dim(); ++i) {
      Expression dc = sym::differentiate(comp, src.vars[static_cast<std::size_t>(i)]);
      if (!dc.is_zero()) df.add({i}, std::move(dc));
    }
    dphi.push_back(std::move(df));
  }
  DifferentialForm r(src, a.degree());
  for (const auto& [t, c] : a.coeffs()) {
    DifferentialForm w = DifferentialForm::scalar(src, sym::substitute(c, bindings));
    for (int j : t) w = wedge(w, dphi[static_cast<std::size_t>(j)]);
    r = r + w;
  }
  return r;
}

// Contraction in the first slot with alternating signs.
inline DifferentialForm interior(const VectorField& x, const DifferentialForm& a) {
  require_same_chart(x.chart, a.chart(), "interior");
  if (a.degree() < 1) throw DegreeUnderflow("interior: 0-form has no slot");
  DifferentialForm r(a.chart(), a.degree() - 1);
  for (const auto& [t, c] : a.coeffs()) {
    for (std::size_t k = 0; k < t.size(); ++k) {
      Expression xk = x.component(t[k]);
      if (xk.is_zero()) continue;
      Expression term = xk * c;
      if (k % 2 == 1) term = -term;
      IndexTuple nt;
      nt.reserve(t.size() - 1);
      for (std::size_t j = 0; j < t.size(); ++j)
        if (j != k) nt.push_back(t[j]);
      r.add(std::move(nt), std::move(term));
    }
  }
  return r;
}

// Cartan formula; for a 0-form this is X applied to the function.
inline DifferentialForm lie_derivative(const VectorField& x, const DifferentialForm& a) {
  require_same_chart(x.chart, a.chart(), "lie_derivative");
  if (a.degree() == 0) return interior(x, ext_d(a));
  return interior(x, ext_d(a)) + ext_d(interior(x, a));
}

// omega^(dim/2) for a degree-2 form.
inline DifferentialForm top_power(const DifferentialForm& a) {
  if (a.degree() != 2) throw Error("top_power: needs a degree-2 form");
  const int dim = a.chart().dim();
  if (dim % 2 != 0) throw OddDimension("top_power: chart dimension is odd");
  DifferentialForm r = a;
  for (int i = 1; i < dim / 2; ++i) r = wedge(r, a);
  return r;
}

// Coefficient of the full chart-ordered volume tuple of a top-degree form.
inline Expression top_coefficient(const DifferentialForm& a) {
  if (a.degree() != a.chart().dim()) throw Error("top_coefficient: not a top form");
  IndexTuple all(static_cast<std::size_t>(a.chart().dim()));
  for (int i = 0; i < a.chart().dim(); ++i) all[static_cast<std::size_t>(i)] = i;
  return a.coeff(all);
}

// --- numeric views -------------------------------------------------------

inline Eigen::MatrixXd matrix_at(const DifferentialForm& a,
                                 const std::map<std::string, double>& point) {
  if (a.degree() != 2) throw Error("matrix_at: needs a degree-2 form");
  const int n = a.chart().dim();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [t, c] : a.coeffs()) {
    const double v = sym::evaluate(c, point);
    m(t[0], t[1]) = v;
    m(t[1], t[0]) = -v;
  }
  return m;
}

inline Eigen::VectorXd vector_at(const VectorField& x,
                                 const std::map<std::string, double>& point) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(x.chart.dim());
  for (const auto& [i, c] : x.components) v(i) = sym::evaluate(c, point);
  return v;
}

}  // namespace bsymp::geo
