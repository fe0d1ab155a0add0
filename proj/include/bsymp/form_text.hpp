#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "bsymp/form.hpp"
#include "bsymp/parser.hpp"

namespace bsymp::geo {

// Form literal: "coeff * dvar1^dvar2^..." terms joined by '+'/'-', with the
// coefficient in the expression grammar and optional (defaults to 1).
// Example: "4*x^(-3) * dx^dPr + dalpha^dPalpha".
//
// Form files are line based:
//   chart: x y u w          (required, space or comma separated)
//   singular: x             (optional)
//   form: <literal>         (required; may continue on following lines)
// Lines starting with '#' are comments.

namespace detail {

inline std::vector<std::string> split_top_level(const std::string& s, char sep,
                                                bool keep_sign_terms) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    const bool split_here =
        depth == 0 && (keep_sign_terms ? (c == '+' || c == '-') && !cur.empty() : c == sep);
    if (split_here) {
      out.push_back(cur);
      cur.clear();
      if (keep_sign_terms) cur += c;  // sign belongs to the next term
      continue;
    }
    cur += c;
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline std::string strip(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// "dx^dPr" -> tuple of chart indices, or nullopt if not a wedge block.
inline std::optional<IndexTuple> parse_wedge_block(const Chart& chart, const std::string& raw) {
  IndexTuple t;
  for (const std::string& piece : split_top_level(raw, '^', false)) {
    const std::string p = strip(piece);
    if (p.size() < 2 || p[0] != 'd') return std::nullopt;
    const int idx = chart.index_of(p.substr(1));
    if (idx < 0) return std::nullopt;
    t.push_back(idx);
  }
  return t.empty() ? std::nullopt : std::optional<IndexTuple>(t);
}

}  // namespace detail

inline DifferentialForm parse_form_literal(const Chart& chart, const std::string& text) {
  struct RawTerm {
    sym::Expression coeff;
    std::optional<IndexTuple> tuple;
  };
  std::vector<RawTerm> raw;
  int degree = -1;
  for (const std::string& term_text : detail::split_top_level(text, '+', true)) {
    std::string body = detail::strip(term_text);
    if (body.empty()) continue;
    bool negative = false;
    if (body[0] == '+' || body[0] == '-') {
      negative = body[0] == '-';
      body = detail::strip(body.substr(1));
    }
    std::vector<std::string> chunks = detail::split_top_level(body, '*', false);
    std::optional<IndexTuple> tuple;
    if (!chunks.empty()) {
      tuple = detail::parse_wedge_block(chart, detail::strip(chunks.back()));
      if (tuple) chunks.pop_back();
    }
    std::string coeff_text;
    for (const std::string& c : chunks) {
      if (!coeff_text.empty()) coeff_text += "*";
      coeff_text += detail::strip(c);
    }
    sym::Expression coeff =
        coeff_text.empty() ? sym::Expression::constant(1) : sym::parse(coeff_text);
    if (negative) coeff = -coeff;
    const int d = tuple ? static_cast<int>(tuple->size()) : 0;
    if (degree < 0)
      degree = d;
    else if (degree != d)
      throw ParseError(0, "form literal mixes degrees " + std::to_string(degree) + " and " +
                              std::to_string(d));
    raw.push_back({std::move(coeff), std::move(tuple)});
  }
  if (degree < 0) throw ParseError(0, "empty form literal");
  DifferentialForm f(chart, degree);
  for (RawTerm& t : raw) f.add(t.tuple.value_or(IndexTuple{}), std::move(t.coeff));
  return f;
}

inline std::string form_to_text(const DifferentialForm& f) {
  if (f.is_zero()) return "0";
  std::string out;
  for (const auto& [t, c] : f.coeffs()) {
    if (!out.empty()) out += " + ";
    if (f.degree() == 0) {
      out += "(" + sym::render(c) + ")";
      continue;
    }
    std::string block;
    for (int i : t) {
      if (!block.empty()) block += "^";
      block += "d" + f.chart().vars[static_cast<std::size_t>(i)];
    }
    if (c == sym::Expression::constant(1))
      out += block;
    else
      out += "(" + sym::render(c) + ") * " + block;
  }
  return out;
}

struct FormFile {
  Chart chart;
  DifferentialForm form;
};

inline FormFile parse_form_file(const std::string& content) {
  std::vector<std::string> vars;
  std::optional<std::string> singular;
  std::string literal;
  bool in_form = false;
  std::istringstream in(content);
  std::string line;
  while (std::getline(in, line)) {
    const std::string s = detail::strip(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.rfind("chart:", 0) == 0) {
      std::string rest = s.substr(6);
      for (char& ch : rest)
        if (ch == ',') ch = ' ';
      std::istringstream vs(rest);
      std::string v;
      while (vs >> v) vars.push_back(v);
      in_form = false;
    } else if (s.rfind("singular:", 0) == 0) {
      singular = detail::strip(s.substr(9));
      in_form = false;
    } else if (s.rfind("form:", 0) == 0) {
      literal = detail::strip(s.substr(5));
      in_form = true;
    } else if (in_form) {
      literal += " " + s;  // continuation
    } else {
      throw ParseError(0, "unrecognized form-file line: " + s);
    }
  }
  if (vars.empty()) throw ParseError(0, "form file is missing a 'chart:' line");
  if (literal.empty()) throw ParseError(0, "form file is missing a 'form:' line");
  Chart chart(vars, singular);
  return {chart, parse_form_literal(chart, literal)};
}

}  // namespace bsymp::geo
