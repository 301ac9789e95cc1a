#include "svyr2/formula.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "svyr2/glm.hpp"

namespace svyr2 {

namespace {

std::string strip(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_top(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

Term parse_term(const std::string& raw) {
  const std::string t = strip(raw);
  if (t.empty()) throw InvalidArgumentError("formula: empty term");
  Term term;
  if (t.rfind("C(", 0) == 0 && t.back() == ')') {
    term.kind = Term::Kind::categorical;
    term.a = strip(t.substr(2, t.size() - 3));
    if (term.a.empty()) throw InvalidArgumentError("formula: C() needs a column name");
    return term;
  }
  if (t.rfind("spline(", 0) == 0 && t.back() == ')') {
    term.kind = Term::Kind::spline;
    const std::string inner = t.substr(7, t.size() - 8);
    const auto parts = split_top(inner, ';');
    if (parts.size() != 2)
      throw InvalidArgumentError("formula: spline(column; k1,k2,...) needs one ';'");
    term.a = strip(parts[0]);
    for (const auto& k : split_top(parts[1], ',')) {
      const std::string ks = strip(k);
      char* end = nullptr;
      const double v = std::strtod(ks.c_str(), &end);
      if (ks.empty() || end != ks.c_str() + ks.size())
        throw InvalidArgumentError("formula: bad spline knot '" + ks + "'");
      term.knots.push_back(v);
    }
    SplineSpec{term.knots}.validate();
    return term;
  }
  const auto colon = split_top(t, ':');
  if (colon.size() == 2) {
    term.kind = Term::Kind::interaction;
    term.a = strip(colon[0]);
    term.b = strip(colon[1]);
    if (term.a.empty() || term.b.empty())
      throw InvalidArgumentError("formula: interaction needs two column names");
    return term;
  }
  if (colon.size() > 2)
    throw InvalidArgumentError("formula: only two-way products are supported");
  term.kind = Term::Kind::numeric;
  term.a = t;
  return term;
}

std::string format_level(double v) {
  char buf[32];
  if (v == std::floor(v) && std::abs(v) < 1e15)
    std::snprintf(buf, sizeof buf, "%.0f", v);
  else
    std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

ModelSpec parse_formula(const std::string& formula) {
  const auto sides = split_top(formula, '~');
  if (sides.size() != 2)
    throw InvalidArgumentError("formula must have the form 'response ~ terms'");
  ModelSpec spec;
  spec.response = strip(sides[0]);
  if (spec.response.empty()) throw InvalidArgumentError("formula: empty response name");
  for (const auto& t : split_top(sides[1], '+')) spec.terms.push_back(parse_term(t));
  if (spec.terms.empty()) throw InvalidArgumentError("formula: no terms");
  return spec;
}

BoundModel build_dataset(const ColumnTable& table, const ModelSpec& spec,
                         const std::string& weight_col) {
  BoundModel m;
  const std::vector<double>& y = table.col(spec.response);
  const std::size_t n = table.nrows;

  std::vector<std::vector<double>> design;
  for (const auto& term : spec.terms) {
    switch (term.kind) {
      case Term::Kind::numeric: {
        design.push_back(table.col(term.a));
        m.colnames.push_back(term.a);
        break;
      }
      case Term::Kind::categorical: {
        const auto& raw = table.col(term.a);
        std::set<double> levels(raw.begin(), raw.end());
        if (levels.size() < 2)
          throw InvalidArgumentError("C(" + term.a + "): needs at least two levels");
        bool first = true;
        for (double lev : levels) {
          if (first) {  // reference level
            first = false;
            continue;
          }
          std::vector<double> col(n);
          for (std::size_t i = 0; i < n; ++i) col[i] = raw[i] == lev ? 1.0 : 0.0;
          design.push_back(std::move(col));
          m.colnames.push_back(term.a + "=" + format_level(lev));
        }
        break;
      }
      case Term::Kind::spline: {
        const SplineBasis basis = spline_basis(table.col(term.a), SplineSpec{term.knots});
        for (std::size_t j = 0; j < basis.cols; ++j) {
          std::vector<double> col(n);
          for (std::size_t i = 0; i < n; ++i) col[i] = basis.X[i * basis.cols + j];
          design.push_back(std::move(col));
          m.colnames.push_back(j == 0 ? term.a
                                      : term.a + ">" + format_level(term.knots[j - 1]));
        }
        break;
      }
      case Term::Kind::interaction: {
        const auto& a = table.col(term.a);
        const auto& b = table.col(term.b);
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = a[i] * b[i];
        design.push_back(std::move(col));
        m.colnames.push_back(term.a + ":" + term.b);
        break;
      }
    }
  }

  m.data.n = n;
  m.data.p = design.size();
  m.data.y = y;
  m.data.X.resize(n * design.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < design.size(); ++j) m.data.X[i * design.size() + j] = design[j][i];

  if (!weight_col.empty()) {
    const auto& w = table.col(weight_col);
    for (double v : w)
      if (!(v > 0.0) || !std::isfinite(v))
        throw InvalidArgumentError("weight column '" + weight_col +
                                   "' must be strictly positive and finite");
    m.data.weights = w;
  }
  return m;
}

}  // namespace svyr2
