#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "svyr2/errors.hpp"
#include "svyr2/esoph.hpp"
#include "svyr2/formula.hpp"
#include "svyr2/glm.hpp"
#include "svyr2/rng.hpp"
#include "svyr2/table.hpp"

using namespace svyr2;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

struct TempFile {
  std::string path;
  TempFile(const std::string& name, const std::string& content) : path(temp_path(name)) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

ColumnTable random_table(std::size_t n, std::uint64_t seed) {
  rng::Stream s(seed);
  std::vector<double> y(n), x1(n), x2(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    x1[i] = s.next_normal();
    x2[i] = s.next_normal();
    const double eta = -0.3 + 0.9 * x1[i] - 0.4 * x2[i];
    y[i] = s.next_uniform() < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
    w[i] = 0.5 + 3.0 * s.next_uniform();
  }
  y[0] = 0.0;
  y[n - 1] = 1.0;
  ColumnTable t;
  t.add("y", y);
  t.add("x1", x1);
  t.add("x2", x2);
  t.add("w", w);
  return t;
}

}  // namespace

TEST_SUITE_BEGIN("formula_table");

TEST_CASE("parse_formula recognizes every term kind") {
  const ModelSpec spec = parse_formula("y ~ x1 + C(x2) + spline(x3; 50,65) + x4:x5");
  CHECK(spec.response == "y");
  REQUIRE(spec.terms.size() == 4);
  CHECK(spec.terms[0].kind == Term::Kind::numeric);
  CHECK(spec.terms[0].a == "x1");
  CHECK(spec.terms[1].kind == Term::Kind::categorical);
  CHECK(spec.terms[1].a == "x2");
  CHECK(spec.terms[2].kind == Term::Kind::spline);
  CHECK(spec.terms[2].a == "x3");
  REQUIRE(spec.terms[2].knots.size() == 2);
  CHECK(spec.terms[2].knots[0] == 50.0);
  CHECK(spec.terms[2].knots[1] == 65.0);
  CHECK(spec.terms[3].kind == Term::Kind::interaction);
  CHECK(spec.terms[3].a == "x4");
  CHECK(spec.terms[3].b == "x5");
}

TEST_CASE("parse_formula rejects malformed input") {
  CHECK_THROWS_AS(parse_formula("y x1 + x2"), InvalidArgumentError);
  CHECK_THROWS_AS(parse_formula("~ x1"), InvalidArgumentError);
  CHECK_THROWS_AS(parse_formula("y ~ "), InvalidArgumentError);
  CHECK_THROWS_AS(parse_formula("y ~ x1 + "), InvalidArgumentError);
  CHECK_THROWS_AS(parse_formula("y ~ C()"), InvalidArgumentError);
  CHECK_THROWS_AS(parse_formula("y ~ spline(x)"), InvalidArgumentError);
  CHECK_THROWS_AS(parse_formula("y ~ spline(x; a,b)"), InvalidArgumentError);
  CHECK_THROWS_AS(parse_formula("y ~ spline(x; 65,50)"), InvalidArgumentError);
  CHECK_THROWS_AS(parse_formula("y ~ a:b:c"), InvalidArgumentError);
  CHECK_THROWS_AS(parse_formula("y ~ :b"), InvalidArgumentError);
}

TEST_CASE("categorical expansion sorts levels and drops the first") {
  ColumnTable t;
  t.add("y", {0, 1, 0, 1, 1, 0});
  t.add("g", {3, 1, 2, 3, 1, 2});
  const BoundModel m = build_dataset(t, parse_formula("y ~ C(g)"), "");
  REQUIRE(m.colnames.size() == 2);
  CHECK(m.colnames[0] == "g=2");
  CHECK(m.colnames[1] == "g=3");
  // Rows in order: g = 3,1,2,3,1,2.
  const std::vector<double> want = {0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0};
  REQUIRE(m.data.X.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(m.data.X[i] == want[i]);
}

TEST_CASE("categorical with fewer than two levels is rejected") {
  ColumnTable t;
  t.add("y", {0, 1, 0});
  t.add("g", {5, 5, 5});
  CHECK_THROWS_AS(build_dataset(t, parse_formula("y ~ C(g)"), ""), InvalidArgumentError);
}

TEST_CASE("interaction is the elementwise product") {
  ColumnTable t;
  t.add("y", {0, 1, 0, 1});
  t.add("a", {1, 2, 3, 4});
  t.add("b", {0.5, -1, 2, 0});
  const BoundModel m = build_dataset(t, parse_formula("y ~ a:b"), "");
  REQUIRE(m.colnames.size() == 1);
  CHECK(m.colnames[0] == "a:b");
  CHECK(m.data.X[0] == 0.5);
  CHECK(m.data.X[1] == -2.0);
  CHECK(m.data.X[2] == 6.0);
  CHECK(m.data.X[3] == 0.0);
}

TEST_CASE("spline term expands to the identity column plus hinges") {
  ColumnTable t;
  t.add("y", {0, 1, 1});
  t.add("age", {40, 60, 70});
  const BoundModel m = build_dataset(t, parse_formula("y ~ spline(age; 50,65)"), "");
  REQUIRE(m.colnames.size() == 3);
  CHECK(m.colnames[0] == "age");
  CHECK(m.colnames[1] == "age>50");
  CHECK(m.colnames[2] == "age>65");
  const std::vector<double> want = {40, 0, 0, 60, 10, 0, 70, 20, 5};
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(m.data.X[i] == want[i]);
}

TEST_CASE("unknown columns are rejected by name") {
  ColumnTable t;
  t.add("y", {0, 1});
  t.add("x", {1, 2});
  CHECK_THROWS_AS(build_dataset(t, parse_formula("y ~ z"), ""), InvalidArgumentError);
  CHECK_THROWS_AS(build_dataset(t, parse_formula("z ~ x"), ""), InvalidArgumentError);
  CHECK_THROWS_AS(build_dataset(t, parse_formula("y ~ x"), "wt"), InvalidArgumentError);
}

TEST_CASE("nonpositive weights are rejected with the column named") {
  ColumnTable t;
  t.add("y", {0, 1, 1});
  t.add("x", {1, 2, 3});
  t.add("w", {1.0, -2.0, 1.0});
  try {
    build_dataset(t, parse_formula("y ~ x"), "w");
    FAIL("expected InvalidArgumentError");
  } catch (const InvalidArgumentError& e) {
    CHECK(std::string(e.what()).find("weight") != std::string::npos);
  }
}

TEST_CASE("csv round-trip preserves values and fits exactly") {
  const ColumnTable t = random_table(120, 31);
  const std::string path = temp_path("svyr2_roundtrip.csv");
  write_csv(t, path);
  const ColumnTable back = read_csv(path);
  std::remove(path.c_str());
  REQUIRE(back.names == t.names);
  REQUIRE(back.nrows == t.nrows);
  for (std::size_t j = 0; j < t.cols.size(); ++j)
    for (std::size_t i = 0; i < t.nrows; ++i) CHECK(back.cols[j][i] == t.cols[j][i]);

  const ModelSpec spec = parse_formula("y ~ x1 + x2");
  const FitResult a = fit_logistic(build_dataset(t, spec, "w").data);
  const FitResult b = fit_logistic(build_dataset(back, spec, "w").data);
  REQUIRE(a.coef.size() == b.coef.size());
  for (std::size_t j = 0; j < a.coef.size(); ++j)
    CHECK(a.coef[j] == doctest::Approx(b.coef[j]).epsilon(1e-12));
  CHECK(a.loglik == doctest::Approx(b.loglik).epsilon(1e-12));
}

TEST_CASE("read_csv failure modes") {
  CHECK_THROWS_AS(read_csv(temp_path("svyr2_no_such_file.csv")), IoError);
  {
    TempFile f("svyr2_ragged.csv", "a,b\n1,2\n3\n");
    CHECK_THROWS_AS(read_csv(f.path), IoError);
  }
  {
    TempFile f("svyr2_nonnum.csv", "a,b\n1,fish\n");
    CHECK_THROWS_AS(read_csv(f.path), IoError);
  }
  {
    TempFile f("svyr2_dup.csv", "a,a\n1,2\n");
    CHECK_THROWS_AS(read_csv(f.path), IoError);
  }
  {
    TempFile f("svyr2_empty.csv", "");
    CHECK_THROWS_AS(read_csv(f.path), IoError);
  }
  {
    TempFile f("svyr2_crlf.csv", "a,b\r\n1,2\r\n\r\n3,4\r\n");
    const ColumnTable t = read_csv(f.path);
    CHECK(t.nrows == 2);
    CHECK(t.col("b")[1] == 4.0);
  }
}

TEST_CASE("bundled esophageal study tables") {
  const ColumnTable grouped = load_esoph_grouped();
  CHECK(grouped.nrows == 88);
  REQUIRE(grouped.has("agegp"));
  REQUIRE(grouped.has("ncases"));
  double cases = 0, controls = 0;
  for (std::size_t i = 0; i < grouped.nrows; ++i) {
    cases += grouped.col("ncases")[i];
    controls += grouped.col("ncontrols")[i];
  }
  CHECK(cases == 200.0);
  CHECK(controls == 775.0);

  const ColumnTable expanded = expand_esoph(grouped, 440.0);
  CHECK(expanded.nrows == 975);
  REQUIRE(expanded.names == std::vector<std::string>({"y", "agegp", "alcgp", "tobgp", "w"}));
  double ysum = 0;
  bool level[7] = {};
  for (std::size_t i = 0; i < expanded.nrows; ++i) {
    const double y = expanded.col("y")[i];
    const double w = expanded.col("w")[i];
    ysum += y;
    CHECK(w == (y == 1.0 ? 1.0 : 440.0));
    const int age = static_cast<int>(expanded.col("agegp")[i]);
    REQUIRE(age >= 1);
    REQUIRE(age <= 6);
    level[age] = true;
  }
  CHECK(ysum == 200.0);
  for (int a = 1; a <= 6; ++a) CHECK(level[a]);

  // The bundled individual-level file is exactly the expansion at weight 440.
  const ColumnTable file = read_csv(data_dir() + "/esoph_individual.csv");
  REQUIRE(file.names == expanded.names);
  REQUIRE(file.nrows == expanded.nrows);
  for (std::size_t j = 0; j < file.cols.size(); ++j)
    for (std::size_t i = 0; i < file.nrows; ++i) CHECK(file.cols[j][i] == expanded.cols[j][i]);
}

TEST_CASE("data_dir honors the override variable strictly") {
  const char* old = std::getenv("SVYR2_DATA_DIR");
  const std::string saved = old ? old : "";
  setenv("SVYR2_DATA_DIR", "/nonexistent/svyr2_data", 1);
  CHECK_THROWS_AS(data_dir(), IoError);
  if (old)
    setenv("SVYR2_DATA_DIR", saved.c_str(), 1);
  else
    unsetenv("SVYR2_DATA_DIR");
}

TEST_SUITE_END();
