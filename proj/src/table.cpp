#include "svyr2/table.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "svyr2/errors.hpp"

namespace svyr2 {

bool ColumnTable::has(const std::string& name) const {
  for (const auto& n : names)
    if (n == name) return true;
  return false;
}

const std::vector<double>& ColumnTable::col(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return cols[i];
  throw InvalidArgumentError("no column named '" + name + "'");
}

void ColumnTable::add(std::string name, std::vector<double> values) {
  if (!cols.empty() && values.size() != nrows)
    throw InvalidArgumentError("column '" + name + "' has mismatched length");
  nrows = values.size();
  names.push_back(std::move(name));
  cols.push_back(std::move(values));
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

}  // namespace

ColumnTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path + "': empty file, header row required");
  ColumnTable t;
  for (const auto& f : split_fields(line)) {
    const std::string name = trim(f);
    if (name.empty()) throw IoError("'" + path + "': empty column name in header");
    if (t.has(name)) throw IoError("'" + path + "': duplicate column '" + name + "'");
    t.names.push_back(name);
    t.cols.emplace_back();
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_fields(line);
    if (fields.size() != t.names.size())
      throw IoError("'" + path + "' line " + std::to_string(lineno) + ": expected " +
                    std::to_string(t.names.size()) + " fields, got " +
                    std::to_string(fields.size()));
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const std::string f = trim(fields[j]);
      char* end = nullptr;
      const double v = std::strtod(f.c_str(), &end);
      if (f.empty() || end != f.c_str() + f.size())
        throw IoError("'" + path + "' line " + std::to_string(lineno) + ": field '" + f +
                      "' is not a number");
      t.cols[j].push_back(v);
    }
    ++t.nrows;
  }
  return t;
}

void write_csv(const ColumnTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (std::size_t j = 0; j < table.names.size(); ++j)
    out << (j ? "," : "") << table.names[j];
  out << "\n";
  char buf[64];
  for (std::size_t i = 0; i < table.nrows; ++i) {
    for (std::size_t j = 0; j < table.cols.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", table.cols[j][i]);
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace svyr2
