#pragma once

#include <cctype>
#include <string>

#include "bsymp/expression.hpp"

namespace bsymp::sym {

// Grammar (whitespace insignificant):
//   expr     := ['+'|'-'] term (('+'|'-') term)*
//   term     := factor ('*' factor)*
//   factor   := primary ('^' exponent)*
//   primary  := number | var | func '(' var ')' | '(' expr ')'
//   exponent := '(' rational ')' | int
//   rational := ['-'] int ('/' int)?
//   func     := sin | cos | sinh | cosh | exp
namespace detail {

class Parser {
 public:
  explicit Parser(std::string text) : text_(std::move(text)) {}

  Expression run() {
    Expression e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  BigInt parse_uint() {
    skip_ws();
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      fail("expected integer");
    std::string digits;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
      digits += text_[pos_++];
    return BigInt(digits);
  }

  Rational parse_rational() {
    bool neg = false;
    if (eat('-'))
      neg = true;
    else
      eat('+');
    BigInt num = parse_uint();
    BigInt den = 1;
    if (eat('/')) den = parse_uint();
    if (den == 0) fail("zero denominator");
    Rational q(num, den);
    return neg ? -q : q;
  }

  std::string parse_ident() {
    skip_ws();
    if (pos_ >= text_.size() || !(std::isalpha(static_cast<unsigned char>(text_[pos_])) ||
                                  text_[pos_] == '_'))
      fail("expected identifier");
    std::string id;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_'))
      id += text_[pos_++];
    return id;
  }

  Rational parse_exponent() {
    if (eat('(')) {
      Rational q = parse_rational();
      if (!eat(')')) fail("expected ')' after exponent");
      return q;
    }
    if (std::isdigit(static_cast<unsigned char>(peek()))) return Rational(parse_uint());
    fail("expected '(rational)' exponent");
  }

  Expression parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      BigInt num = parse_uint();
      BigInt den = 1;
      std::size_t mark = pos_;
      if (eat('/')) {
        skip_ws();
        if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
          den = parse_uint();
        else
          pos_ = mark;  // '/' belonged to something else; not part of a rational
      }
      if (den == 0) fail("zero denominator");
      return Expression::constant(Rational(num, den));
    }
    if (c == '(') {
      ++pos_;
      Expression e = parse_expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    std::string id = parse_ident();
    if (peek() == '(') {
      auto tag = elem_from_name(id);
      if (!tag) fail("unknown function tag '" + id + "'");
      eat('(');
      std::string arg = parse_ident();
      if (!eat(')')) fail("expected ')' after function argument");
      return Expression::elem(*tag, arg, 1);
    }
    return Expression::variable(id);
  }

  Expression parse_factor() {
    Expression e = parse_primary();
    while (true) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '^') {
        ++pos_;
        Rational q = parse_exponent();
        e = e.pow(q);
      } else {
        break;
      }
    }
    return e;
  }

  Expression parse_term() {
    Expression e = parse_factor();
    while (eat('*')) e = e * parse_factor();
    return e;
  }

  Expression parse_expr() {
    bool neg = false;
    if (eat('-'))
      neg = true;
    else
      eat('+');
    Expression e = parse_term();
    if (neg) e = -e;
    while (true) {
      if (eat('+'))
        e = e + parse_term();
      else if (eat('-'))
        e = e - parse_term();
      else
        break;
    }
    return e;
  }

  std::string text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expression parse(const std::string& text) { return detail::Parser(text).run(); }

// Canonical text form; parse(render(e)) == e for every normalized e.
inline std::string render(const Expression& e) {
  if (e.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const Term& t : e.terms()) {
    Rational c = t.coeff;
    if (first) {
      if (c < 0) {
        out += "-";
        c = -c;
      }
    } else {
      out += (c < 0) ? " - " : " + ";
      if (c < 0) c = -c;
    }
    first = false;
    std::string factors;
    for (const auto& [v, q] : t.powers) {
      if (!factors.empty()) factors += "*";
      factors += v;
      if (q != 1) factors += "^(" + rat_str(q) + ")";
    }
    for (const ElemFactor& f : t.elems) {
      if (!factors.empty()) factors += "*";
      factors += std::string(elem_name(f.tag)) + "(" + f.var + ")";
      if (f.power != 1) factors += "^(" + std::to_string(f.power) + ")";
    }
    if (factors.empty())
      out += rat_str(c);
    else if (c == 1)
      out += factors;
    else
      out += rat_str(c) + "*" + factors;
  }
  return out;
}

}  // namespace bsymp::sym
