#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace svyr2 {

// Named numeric columns of equal length; the in-memory form of a CSV file.
struct ColumnTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;
  std::size_t nrows = 0;

  bool has(const std::string& name) const;
  const std::vector<double>& col(const std::string& name) const;
  void add(std::string name, std::vector<double> values);
};

// Comma-separated, header row required, UTF-8, '.' decimal point, scientific
// notation accepted. Throws IoError with the offending line on any problem.
ColumnTable read_csv(const std::string& path);

// Writes with %.17g so numeric round-trips are lossless.
void write_csv(const ColumnTable& table, const std::string& path);

}  // namespace svyr2
