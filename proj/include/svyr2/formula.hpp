#pragma once

// Formula mini-language:
//   y ~ x1 + C(x2) + spline(x3; 50,65) + x4:x5
// C() expands a categorical column (distinct values sorted ascending, first
// level is the reference), spline() builds a linear spline basis with the
// listed interior knots, and a:b is the elementwise product of two numeric
// columns. The intercept is implicit (the fitters prepend it).

#include <string>
#include <vector>

#include "svyr2/dataset.hpp"
#include "svyr2/table.hpp"

namespace svyr2 {

struct Term {
  enum class Kind { numeric, categorical, spline, interaction };
  Kind kind = Kind::numeric;
  std::string a;               // column name (left factor for interaction)
  std::string b;               // right factor for interaction
  std::vector<double> knots;   // spline only
};

struct ModelSpec {
  std::string response;
  std::vector<Term> terms;
};

ModelSpec parse_formula(const std::string& formula);

// Design matrix + response bound to a table. weight_col may be empty (unit
// weights); weight values must be strictly positive.
struct BoundModel {
  Dataset data;
  std::vector<std::string> colnames;  // design matrix columns, no intercept
};
BoundModel build_dataset(const ColumnTable& table, const ModelSpec& spec,
                         const std::string& weight_col);

}  // namespace svyr2
