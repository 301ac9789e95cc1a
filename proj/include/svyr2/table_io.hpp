#pragma once

#include <string>
#include <vector>

#include "svyr2/harness.hpp"

namespace svyr2 {

// %.17g everywhere a double is serialized; the human and machine outputs
// carry identical values at full precision. NaN prints as "nan" in text and
// as null in JSON.
std::string format_double(double v);
std::string json_number(double v);
std::string json_escape(const std::string& s);

// Tab-separated with the fixed header
// design sampling_fraction naive_cs design_cs naive_nag design_nag
// mc_se_naive_cs mc_se_design_cs mc_se_naive_nag mc_se_design_nag failures.
std::string to_tsv(const std::vector<ComparisonRow>& rows);

// {"rows": [...]} with one object per row, same fields as the TSV.
std::string to_json(const std::vector<ComparisonRow>& rows);

}  // namespace svyr2
