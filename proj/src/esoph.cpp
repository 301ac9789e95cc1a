#include "svyr2/esoph.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "svyr2/errors.hpp"

#ifndef SVYR2_SOURCE_DATA_DIR
#define SVYR2_SOURCE_DATA_DIR ""
#endif

namespace svyr2 {

namespace {

bool has_grouped_csv(const std::filesystem::path& dir) {
  std::error_code ec;
  return std::filesystem::is_regular_file(dir / "esoph_grouped.csv", ec);
}

std::filesystem::path exe_relative_share() {
  char buf[4096];
  const ssize_t len = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (len <= 0) return {};
  buf[len] = '\0';
  return std::filesystem::path(buf).parent_path().parent_path() / "share" / "svyr2";
}

std::size_t checked_count(double v, const char* what, std::size_t row) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e6)
    throw IoError(std::string("esoph: ") + what + " must be a small nonnegative integer (row " +
                  std::to_string(row + 1) + ")");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::string data_dir() {
  if (const char* env = std::getenv("SVYR2_DATA_DIR")) {
    const std::filesystem::path dir(env);
    if (has_grouped_csv(dir)) return dir.string();
    throw IoError("SVYR2_DATA_DIR set but " + (dir / "esoph_grouped.csv").string() +
                  " not found");
  }
  const auto installed = exe_relative_share();
  if (!installed.empty() && has_grouped_csv(installed)) return installed.string();
  const std::filesystem::path source(SVYR2_SOURCE_DATA_DIR);
  if (!source.empty() && has_grouped_csv(source)) return source.string();
  throw IoError("cannot locate esoph_grouped.csv; set SVYR2_DATA_DIR");
}

ColumnTable load_esoph_grouped() {
  const auto table = read_csv((std::filesystem::path(data_dir()) / "esoph_grouped.csv").string());
  for (const char* name : {"agegp", "alcgp", "tobgp", "ncases", "ncontrols"})
    if (!table.has(name))
      throw IoError(std::string("esoph_grouped.csv: missing column ") + name);
  return table;
}

ColumnTable expand_esoph(const ColumnTable& grouped, double control_weight) {
  if (!(control_weight > 0.0) || !std::isfinite(control_weight))
    throw InvalidArgumentError("expand_esoph: control_weight must be positive and finite");
  const auto& agegp = grouped.col("agegp");
  const auto& alcgp = grouped.col("alcgp");
  const auto& tobgp = grouped.col("tobgp");
  const auto& ncases = grouped.col("ncases");
  const auto& ncontrols = grouped.col("ncontrols");

  std::vector<double> y, a, b, c, w;
  for (std::size_t r = 0; r < grouped.nrows; ++r) {
    const std::size_t cases = checked_count(ncases[r], "ncases", r);
    const std::size_t controls = checked_count(ncontrols[r], "ncontrols", r);
    for (std::size_t i = 0; i < cases + controls; ++i) {
      y.push_back(i < cases ? 1.0 : 0.0);
      a.push_back(agegp[r]);
      b.push_back(alcgp[r]);
      c.push_back(tobgp[r]);
      w.push_back(i < cases ? 1.0 : control_weight);
    }
  }

  ColumnTable out;
  out.add("y", std::move(y));
  out.add("agegp", std::move(a));
  out.add("alcgp", std::move(b));
  out.add("tobgp", std::move(c));
  out.add("w", std::move(w));
  return out;
}

}  // namespace svyr2
