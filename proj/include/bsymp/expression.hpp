#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bsymp/errors.hpp"
#include "bsymp/rational.hpp"

namespace bsymp::sym {

// Closed term algebra: every expression is a sum of terms
//
//   coeff * prod var^(rational exponent) * prod elem(var)^(integer power)
//
// with elem in {sin, cos, sinh, cosh, exp} applied to bare variables only.
// The algebra is closed under sum, product, differentiation and the
// restricted substitution below, which is all the catalog formulas need.

enum class ElemTag : int { Sin = 0, Cos, Sinh, Cosh, Exp };

inline const char* elem_name(ElemTag t) {
  switch (t) {
    case ElemTag::Sin: return "sin";
    case ElemTag::Cos: return "cos";
    case ElemTag::Sinh: return "sinh";
    case ElemTag::Cosh: return "cosh";
    case ElemTag::Exp: return "exp";
  }
  return "?";
}

inline std::optional<ElemTag> elem_from_name(const std::string& s) {
  if (s == "sin") return ElemTag::Sin;
  if (s == "cos") return ElemTag::Cos;
  if (s == "sinh") return ElemTag::Sinh;
  if (s == "cosh") return ElemTag::Cosh;
  if (s == "exp") return ElemTag::Exp;
  return std::nullopt;
}

struct ElemFactor {
  ElemTag tag;
  std::string var;
  long long power = 1;  // nonzero integer

  friend bool operator==(const ElemFactor& a, const ElemFactor& b) {
    return a.tag == b.tag && a.var == b.var && a.power == b.power;
  }
};

// Canonical order on elementary factors: by argument variable, then tag,
// then power.
inline int elem_cmp(const ElemFactor& a, const ElemFactor& b) {
  if (a.var != b.var) return a.var < b.var ? -1 : 1;
  if (a.tag != b.tag) return static_cast<int>(a.tag) < static_cast<int>(b.tag) ? -1 : 1;
  if (a.power != b.power) return a.power < b.power ? -1 : 1;
  return 0;
}

struct Term {
  Rational coeff{1};
  std::map<std::string, Rational> powers;  // var -> nonzero rational exponent
  std::vector<ElemFactor> elems;           // sorted, unique (var, tag)

  bool is_constant() const { return powers.empty() && elems.empty(); }

  // Total order on the (powers, elems) key. Terms with equal keys merge.
  static int key_cmp(const Term& a, const Term& b) {
    auto ia = a.powers.begin();
    auto ib = b.powers.begin();
    for (; ia != a.powers.end() && ib != b.powers.end(); ++ia, ++ib) {
      if (ia->first != ib->first) return ia->first < ib->first ? -1 : 1;
      if (int c = rat_cmp(ia->second, ib->second)) return c;
    }
    if (ia != a.powers.end()) return 1;
    if (ib != b.powers.end()) return -1;
    for (std::size_t i = 0; i < a.elems.size() && i < b.elems.size(); ++i) {
      if (int c = elem_cmp(a.elems[i], b.elems[i])) return c;
    }
    if (a.elems.size() != b.elems.size()) return a.elems.size() < b.elems.size() ? -1 : 1;
    return 0;
  }
};

class Expression {
 public:
  Expression() = default;

  static Expression zero() { return Expression(); }

  static Expression constant(const Rational& c) {
    Expression e;
    if (c != 0) {
      Term t;
      t.coeff = c;
      e.terms_.push_back(std::move(t));
    }
    return e;
  }

  static Expression variable(const std::string& name, const Rational& exponent = Rational(1)) {
    Term t;
    if (exponent != 0) t.powers[name] = exponent;
    Expression e;
    e.terms_.push_back(std::move(t));
    return e;
  }

  static Expression elem(ElemTag tag, const std::string& var, long long power = 1) {
    Term t;
    if (power != 0) t.elems.push_back({tag, var, power});
    Expression e;
    e.terms_.push_back(std::move(t));
    return e;
  }

  static Expression from_term(Term t) {
    Expression e;
    e.terms_.push_back(std::move(t));
    e.normalize();
    return e;
  }

  static Expression from_terms(std::vector<Term> ts) {
    Expression e;
    e.terms_ = std::move(ts);
    e.normalize();
    return e;
  }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_monomial() const { return terms_.size() == 1; }

  // The single term of a monomial.
  const Term& mono() const {
    if (!is_monomial()) throw Error("Expression::mono: not a single-term expression");
    return terms_.front();
  }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.front().is_constant());
  }

  Rational constant_value() const {
    if (terms_.empty()) return Rational(0);
    if (!is_constant()) throw Error("Expression::constant_value: not constant");
    return terms_.front().coeff;
  }

  friend bool operator==(const Expression& a, const Expression& b) {
    if (a.terms_.size() != b.terms_.size()) return false;
    for (std::size_t i = 0; i < a.terms_.size(); ++i) {
      const Term& x = a.terms_[i];
      const Term& y = b.terms_[i];
      if (x.coeff != y.coeff || Term::key_cmp(x, y) != 0) return false;
    }
    return true;
  }
  friend bool operator!=(const Expression& a, const Expression& b) { return !(a == b); }

  friend Expression operator+(const Expression& a, const Expression& b) {
    Expression r;
    r.terms_ = a.terms_;
    r.terms_.insert(r.terms_.end(), b.terms_.begin(), b.terms_.end());
    r.normalize();
    return r;
  }

  friend Expression operator-(const Expression& a) {
    Expression r = a;
    for (Term& t : r.terms_) t.coeff = -t.coeff;
    return r;
  }

  friend Expression operator-(const Expression& a, const Expression& b) { return a + (-b); }

  friend Expression operator*(const Expression& a, const Expression& b) {
    Expression r;
    r.terms_.reserve(a.terms_.size() * b.terms_.size());
    for (const Term& x : a.terms_)
      for (const Term& y : b.terms_) r.terms_.push_back(mul_terms(x, y));
    r.normalize();
    return r;
  }

  friend Expression operator*(const Rational& c, const Expression& a) {
    return Expression::constant(c) * a;
  }

  // Integer power; positive exponents expand, other exponents require a
  // monomial base (see term_pow).
  Expression pow(const Rational& e) const;

  std::vector<std::string> free_variables() const {
    std::vector<std::string> out;
    for (const Term& t : terms_) {
      for (const auto& [v, q] : t.powers) out.push_back(v);
      for (const ElemFactor& f : t.elems) out.push_back(f.var);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool depends_on(const std::string& var) const {
    for (const Term& t : terms_) {
      if (t.powers.count(var)) return true;
      for (const ElemFactor& f : t.elems)
        if (f.var == var) return true;
    }
    return false;
  }

 private:
  static Term mul_terms(const Term& x, const Term& y) {
    Term r;
    r.coeff = x.coeff * y.coeff;
    r.powers = x.powers;
    for (const auto& [v, q] : y.powers) {
      auto it = r.powers.find(v);
      if (it == r.powers.end())
        r.powers[v] = q;
      else {
        it->second += q;
        if (it->second == 0) r.powers.erase(it);
      }
    }
    r.elems = x.elems;
    for (const ElemFactor& f : y.elems) {
      auto it = std::find_if(r.elems.begin(), r.elems.end(), [&](const ElemFactor& g) {
        return g.tag == f.tag && g.var == f.var;
      });
      if (it == r.elems.end())
        r.elems.push_back(f);
      else {
        it->power += f.power;
        if (it->power == 0) r.elems.erase(it);
      }
    }
    sort_elems(r);
    return r;
  }

  static void sort_elems(Term& t) {
    std::sort(t.elems.begin(), t.elems.end(),
              [](const ElemFactor& a, const ElemFactor& b) { return elem_cmp(a, b) < 0; });
  }

  void normalize() {
    for (Term& t : terms_) {
      for (auto it = t.powers.begin(); it != t.powers.end();)
        it = (it->second == 0) ? t.powers.erase(it) : std::next(it);
      t.elems.erase(std::remove_if(t.elems.begin(), t.elems.end(),
                                   [](const ElemFactor& f) { return f.power == 0; }),
                    t.elems.end());
      sort_elems(t);
    }
    std::sort(terms_.begin(), terms_.end(),
              [](const Term& a, const Term& b) { return Term::key_cmp(a, b) < 0; });
    std::vector<Term> merged;
    for (Term& t : terms_) {
      if (!merged.empty() && Term::key_cmp(merged.back(), t) == 0)
        merged.back().coeff += t.coeff;
      else
        merged.push_back(std::move(t));
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const Term& t) { return t.coeff == 0; }),
                 merged.end());
    terms_ = std::move(merged);
  }

  friend Expression term_pow(const Term& t, const Rational& e);

  std::vector<Term> terms_;
};

// t^e for a single term. Fractional exponents need a positive coefficient
// whose exact root exists and integer results for the elem powers.
inline Expression term_pow(const Term& t, const Rational& e) {
  Term r;
  if (is_integer(e)) {
    if (t.coeff == 0) throw DomainError("term_pow: zero base with nonpositive exponent");
    r.coeff = rat_pow(t.coeff, to_long(e));
  } else {
    if (t.coeff <= 0)
      throw ClosureViolation("fractional power of a nonpositive coefficient: " +
                             rat_str(t.coeff));
    auto c = rat_pow_exact(t.coeff, e);
    if (!c)
      throw ClosureViolation("fractional power " + rat_str(e) + " of coefficient " +
                             rat_str(t.coeff) + " is irrational");
    r.coeff = *c;
  }
  for (const auto& [v, q] : t.powers) {
    Rational ne = q * e;
    if (ne != 0) r.powers[v] = ne;
  }
  for (const ElemFactor& f : t.elems) {
    Rational ne = Rational(f.power) * e;
    if (!is_integer(ne))
      throw ClosureViolation("power " + rat_str(e) + " of " + elem_name(f.tag) + "(" + f.var +
                             ")^" + std::to_string(f.power) + " leaves the algebra");
    if (ne != 0) r.elems.push_back({f.tag, f.var, to_long(ne)});
  }
  return Expression::from_term(std::move(r));
}

inline Expression Expression::pow(const Rational& e) const {
  if (e == 0) return Expression::constant(1);
  if (is_zero()) {
    if (e < 0) throw DomainError("Expression::pow: zero base with negative exponent");
    return Expression::zero();
  }
  if (is_monomial()) return term_pow(terms_.front(), e);
  if (!is_integer(e) || e < 0)
    throw ClosureViolation("power " + rat_str(e) + " of a sum leaves the algebra");
  Expression r = Expression::constant(1);
  Expression base = *this;
  long long n = to_long(e);
  while (n > 0) {
    if (n & 1) r = r * base;
    base = base * base;
    n >>= 1;
  }
  return r;
}

// --- operations -----------------------------------------------------------

enum class ArithOp { Add, Sub, Mul };

inline Expression arith(const Expression& a, const Expression& b, ArithOp op) {
  switch (op) {
    case ArithOp::Add: return a + b;
    case ArithOp::Sub: return a - b;
    case ArithOp::Mul: return a * b;
  }
  throw Error("arith: bad op");
}

// Exact d/dvar. The elementary-function table keeps the algebra closed:
// sin -> cos, cos -> -sin, sinh -> cosh, cosh -> sinh, exp -> exp.
inline Expression differentiate(const Expression& e, const std::string& var) {
  std::vector<Term> out;
  for (const Term& t : e.terms()) {
    auto pit = t.powers.find(var);
    if (pit != t.powers.end()) {
      Term d = t;
      d.coeff *= pit->second;
      Rational ne = pit->second - 1;
      if (ne == 0)
        d.powers.erase(var);
      else
        d.powers[var] = ne;
      out.push_back(std::move(d));
    }
    for (std::size_t i = 0; i < t.elems.size(); ++i) {
      if (t.elems[i].var != var) continue;
      const ElemFactor& f = t.elems[i];
      Term d = t;
      d.coeff *= Rational(f.power);
      // g^k -> k g^(k-1) g'
      if (f.power == 1)
        d.elems.erase(d.elems.begin() + static_cast<std::ptrdiff_t>(i));
      else
        d.elems[i].power = f.power - 1;
      ElemTag dtag;
      switch (f.tag) {
        case ElemTag::Sin: dtag = ElemTag::Cos; break;
        case ElemTag::Cos:
          dtag = ElemTag::Sin;
          d.coeff = -d.coeff;
          break;
        case ElemTag::Sinh: dtag = ElemTag::Cosh; break;
        case ElemTag::Cosh: dtag = ElemTag::Sinh; break;
        case ElemTag::Exp: dtag = ElemTag::Exp; break;
        default: throw Error("differentiate: bad tag");
      }
      Expression prod = Expression::from_term(std::move(d)) * Expression::elem(dtag, var, 1);
      for (const Term& pt : prod.terms()) out.push_back(pt);
    }
  }
  return Expression::from_terms(std::move(out));
}

namespace detail {

// Handles var -> constant c bindings exactly. Only c = 0 is exact inside
// elementary functions (sin 0 = 0, cos 0 = 1, ...).
inline std::optional<Expression> elem_at_zero(ElemTag tag, long long power) {
  switch (tag) {
    case ElemTag::Sin:
    case ElemTag::Sinh:
      if (power < 0) throw DomainError("substitution makes 1/sin(0)");
      return Expression::zero();  // sin(0)^k = 0 for k > 0
    case ElemTag::Cos:
    case ElemTag::Cosh:
    case ElemTag::Exp: return Expression::constant(1);
  }
  return std::nullopt;
}

}  // namespace detail

// Simultaneous substitution, then normalization. A variable occurring with a
// non-integer exponent must be bound to a single-term monomial whose
// coefficient has an exact rational root; a variable inside an elementary
// function only to a bare variable or the constant 0.
inline Expression substitute(const Expression& e,
                             const std::map<std::string, Expression>& bindings) {
  Expression out = Expression::zero();
  for (const Term& t : e.terms()) {
    Expression acc = Expression::constant(t.coeff);
    for (const auto& [v, q] : t.powers) {
      auto bit = bindings.find(v);
      if (bit == bindings.end()) {
        acc = acc * Expression::variable(v, q);
        continue;
      }
      const Expression& b = bit->second;
      if (b.is_zero()) {
        if (q < 0) throw DomainError("substitute: zero bound to negative power of " + v);
        acc = Expression::zero();
        break;
      }
      acc = acc * b.pow(q);
    }
    if (acc.is_zero()) continue;
    for (const ElemFactor& f : t.elems) {
      auto bit = bindings.find(f.var);
      if (bit == bindings.end()) {
        acc = acc * Expression::elem(f.tag, f.var, f.power);
        continue;
      }
      const Expression& b = bit->second;
      if (b.is_zero()) {
        auto r = detail::elem_at_zero(f.tag, f.power);
        if (!r) throw ClosureViolation("substitute: no exact value");
        acc = acc * *r;
        if (acc.is_zero()) break;
        continue;
      }
      if (b.is_constant())
        throw ClosureViolation("substitute: " + std::string(elem_name(f.tag)) +
                               " of a nonzero constant is not in the algebra");
      if (!b.is_monomial())
        throw ClosureViolation("substitute: composite argument for " +
                               std::string(elem_name(f.tag)) + "(" + f.var + ")");
      const Term& m = b.mono();
      if (m.coeff != 1 || !m.elems.empty() || m.powers.size() != 1 ||
          m.powers.begin()->second != 1)
        throw ClosureViolation("substitute: argument of " + std::string(elem_name(f.tag)) +
                               " must stay a bare variable");
      acc = acc * Expression::elem(f.tag, m.powers.begin()->first, f.power);
    }
    out = out + acc;
  }
  return out;
}

// Floating evaluation consistent with the exact semantics.
inline double evaluate(const Expression& e, const std::map<std::string, double>& point) {
  double sum = 0.0;
  for (const Term& t : e.terms()) {
    double acc = to_double(t.coeff);
    for (const auto& [v, q] : t.powers) {
      auto it = point.find(v);
      if (it == point.end()) throw UnboundVariable("evaluate: unbound variable " + v);
      const double base = it->second;
      const double expd = to_double(q);
      if (base < 0 && !is_integer(q))
        throw DomainError("evaluate: negative base " + v + " with fractional exponent");
      if (base == 0 && q < 0)
        throw DomainError("evaluate: zero base " + v + " with negative exponent");
      acc *= std::pow(base, expd);
    }
    for (const ElemFactor& f : t.elems) {
      auto it = point.find(f.var);
      if (it == point.end()) throw UnboundVariable("evaluate: unbound variable " + f.var);
      const double x = it->second;
      double g = 0;
      switch (f.tag) {
        case ElemTag::Sin: g = std::sin(x); break;
        case ElemTag::Cos: g = std::cos(x); break;
        case ElemTag::Sinh: g = std::sinh(x); break;
        case ElemTag::Cosh: g = std::cosh(x); break;
        case ElemTag::Exp: g = std::exp(x); break;
      }
      if (g == 0 && f.power < 0) throw DomainError("evaluate: pole of elementary factor");
      acc *= std::pow(g, static_cast<double>(f.power));
    }
    sum += acc;
  }
  return sum;
}

// Minimum exponent of var across terms plus the residual e / var^exponent.
// The residual always carries a term with zero exponent in var.
inline std::pair<Rational, Expression> leading_exponent(const Expression& e,
                                                        const std::string& var) {
  if (e.is_zero()) throw ZeroExpression("leading_exponent of the zero expression");
  bool first = true;
  Rational m;
  for (const Term& t : e.terms()) {
    auto it = t.powers.find(var);
    Rational q = (it == t.powers.end()) ? Rational(0) : it->second;
    if (first || q < m) {
      m = q;
      first = false;
    }
  }
  std::vector<Term> out;
  for (Term t : e.terms()) {
    auto it = t.powers.find(var);
    Rational q = (it == t.powers.end()) ? Rational(0) : it->second;
    Rational ne = q - m;
    if (ne == 0)
      t.powers.erase(var);
    else
      t.powers[var] = ne;
    out.push_back(std::move(t));
  }
  return {m, Expression::from_terms(std::move(out))};
}

// Exact division by a single-term expression.
inline Expression divide_by_monomial(const Expression& a, const Expression& b) {
  if (b.is_zero()) throw DomainError("divide_by_monomial: zero divisor");
  if (!b.is_monomial()) throw NonMonomialDeterminant("divisor is not a single term");
  return a * term_pow(b.mono(), Rational(-1));
}

}  // namespace bsymp::sym
