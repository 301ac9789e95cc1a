#include "svyr2/table_io.hpp"

#include <cmath>
#include <cstdio>

namespace svyr2 {

namespace {

const char* const kColumns[] = {
    "design",          "sampling_fraction", "naive_cs",        "design_cs",
    "naive_nag",       "design_nag",        "mc_se_naive_cs",  "mc_se_design_cs",
    "mc_se_naive_nag", "mc_se_design_nag",  "failures",
};

std::vector<double> numeric_fields(const ComparisonRow& r) {
  return {r.sampling_fraction, r.naive_cs,        r.design_cs,
          r.naive_nag,         r.design_nag,      r.mc_se_naive_cs,
          r.mc_se_design_cs,   r.mc_se_naive_nag, r.mc_se_design_nag};
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_number(double v) {
  if (!std::isfinite(v)) return "null";
  return format_double(v);
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

std::string to_tsv(const std::vector<ComparisonRow>& rows) {
  std::string out;
  for (std::size_t c = 0; c < std::size(kColumns); ++c) {
    if (c) out += '\t';
    out += kColumns[c];
  }
  out += '\n';
  for (const auto& r : rows) {
    out += r.design;
    for (double v : numeric_fields(r)) {
      out += '\t';
      out += format_double(v);
    }
    out += '\t';
    out += std::to_string(r.failures);
    out += '\n';
  }
  return out;
}

std::string to_json(const std::vector<ComparisonRow>& rows) {
  std::string out = "{\"rows\": [\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += "  {\"design\": \"" + json_escape(r.design) + "\"";
    const auto fields = numeric_fields(r);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      out += ", \"";
      out += kColumns[c + 1];
      out += "\": ";
      out += json_number(fields[c]);
    }
    out += ", \"failures\": " + std::to_string(r.failures) + "}";
    if (i + 1 < rows.size()) out += ',';
    out += '\n';
  }
  out += "]}\n";
  return out;
}

}  // namespace svyr2
