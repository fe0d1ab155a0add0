#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "bsymp/errors.hpp"

namespace bsymp::geo {

// Ordered coordinate chart. When the singular hypersurface is a coordinate
// zero set Z = {var = 0}, that variable is recorded as singular_var.
struct Chart {
  std::vector<std::string> vars;
  std::optional<std::string> singular_var;

  Chart() = default;
  explicit Chart(std::vector<std::string> v, std::optional<std::string> sing = std::nullopt)
      : vars(std::move(v)), singular_var(std::move(sing)) {
    for (std::size_t i = 0; i < vars.size(); ++i)
      for (std::size_t j = i + 1; j < vars.size(); ++j)
        if (vars[i] == vars[j]) throw Error("Chart: duplicate variable " + vars[i]);
    if (singular_var && index_of(*singular_var) < 0)
      throw Error("Chart: singular variable " + *singular_var + " not in chart");
  }

  int dim() const { return static_cast<int>(vars.size()); }

  int index_of(const std::string& name) const {
    auto it = std::find(vars.begin(), vars.end(), name);
    return it == vars.end() ? -1 : static_cast<int>(it - vars.begin());
  }

  int require_index(const std::string& name) const {
    int i = index_of(name);
    if (i < 0) throw Error("Chart: no variable " + name);
    return i;
  }

  // Same coordinates in the same order; singular marking does not affect
  // algebraic compatibility.
  friend bool compatible(const Chart& a, const Chart& b) { return a.vars == b.vars; }

  friend bool operator==(const Chart& a, const Chart& b) {
    return a.vars == b.vars && a.singular_var == b.singular_var;
  }
};

inline void require_same_chart(const Chart& a, const Chart& b, const char* where) {
  if (!compatible(a, b)) throw ChartMismatch(std::string(where) + ": charts differ");
}

}  // namespace bsymp::geo
