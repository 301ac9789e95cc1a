#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <doctest.h>

using std::string;

namespace {

struct CliResult {
  int code = -1;
  string out, err;
};

string temp_name(const string& stem) {
  static int counter = 0;
  return "/tmp/svyr2_cli_" + stem + "_" + std::to_string(counter++);
}

string slurp(const string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const string& path, const string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

// Runs the CLI with a controlled environment; env_prefix defaults to
// scrubbing SVYR2_SEED so the ambient shell cannot perturb determinism.
CliResult run_cli(const string& args, const string& env_prefix = "env -u SVYR2_SEED") {
  const string err_path = temp_name("err") + ".txt";
  const string cmd =
      env_prefix + " '" + SVYR2_CLI_PATH + "' " + args + " 2>'" + err_path + "'";
  CliResult r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err_path);
  std::remove(err_path.c_str());
  return r;
}

// Value printed on the "  <key>  <value>" report line for an exact key.
string value_after(const string& out, const string& key) {
  std::istringstream lines(out);
  string line;
  while (std::getline(lines, line)) {
    std::size_t a = line.find_first_not_of(' ');
    if (a == string::npos) continue;
    if (line.compare(a, key.size(), key) != 0) continue;
    std::size_t b = a + key.size();
    if (b >= line.size() || line[b] != ' ') continue;
    b = line.find_first_not_of(' ', b);
    if (b == string::npos) continue;
    return line.substr(b);
  }
  return "";
}

string tsv_field(const string& out, std::size_t row, std::size_t col) {
  std::istringstream lines(out);
  string line;
  for (std::size_t i = 0; i <= row; ++i)
    if (!std::getline(lines, line)) return "";
  std::istringstream fields(line);
  string f;
  for (std::size_t j = 0; j <= col; ++j)
    if (!std::getline(fields, f, '\t')) return "";
  return f;
}

const string kEsophCsv = string(SVYR2_SOURCE_DATA_DIR) + "/esoph_individual.csv";
const string kEsophFormula = "'y ~ C(agegp) + C(alcgp) + C(tobgp)'";

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("weighted esoph fit reports the design statistics at full precision") {
  const CliResult r =
      run_cli("fit --data '" + kEsophCsv + "' --formula " + kEsophFormula + " --weights w");
  CHECK(r.code == 0);
  CHECK(r.err == "");
  CHECK(value_after(r.out, "design_cox_snell") == "0.0011709723093467073");
  CHECK(r.out.find("n: 975") != string::npos);
  CHECK(r.out.find("weight_sum: 341200") != string::npos);
  CHECK(r.out.find("(intercept)") != string::npos);
  CHECK(r.out.find("agegp=2") != string::npos);
}

TEST_CASE("fit without weights collapses design onto classical exactly") {
  const string csv = temp_name("plain") + ".csv";
  spit(csv,
       "y,x\n0,0.1\n1,0.9\n0,0.4\n1,0.6\n0,0.2\n1,0.8\n1,0.3\n0,0.7\n1,0.55\n0,0.45\n");
  const CliResult r = run_cli("fit --data '" + csv + "' --formula 'y ~ x'");
  std::remove(csv.c_str());
  CHECK(r.code == 0);
  const string cs = value_after(r.out, "cox_snell");
  const string dcs = value_after(r.out, "design_cox_snell");
  CHECK(cs != "");
  CHECK(cs == dcs);
  CHECK(value_after(r.out, "nagelkerke") == value_after(r.out, "design_nagelkerke"));
}

TEST_CASE("json and human reports carry identical values") {
  const CliResult human =
      run_cli("fit --data '" + kEsophCsv + "' --formula " + kEsophFormula + " --weights w");
  const CliResult json = run_cli("fit --data '" + kEsophCsv + "' --formula " + kEsophFormula +
                                 " --weights w --json");
  CHECK(json.code == 0);
  for (const char* key : {"cox_snell", "nagelkerke", "design_cox_snell", "design_nagelkerke"}) {
    const string v = value_after(human.out, key);
    CHECK(v != "");
    CHECK(json.out.find("\"" + string(key) + "\": " + v) != string::npos);
  }
}

TEST_CASE("negative weights are a usage error naming the weight column") {
  const string csv = temp_name("negw") + ".csv";
  spit(csv, "y,x,w\n0,1,1\n1,2,-3\n1,3,1\n0,4,1\n");
  const CliResult r = run_cli("fit --data '" + csv + "' --formula 'y ~ x' --weights w");
  std::remove(csv.c_str());
  CHECK(r.code == 2);
  CHECK(r.err.find("weight") != string::npos);
}

TEST_CASE("missing input file exits 2") {
  const CliResult r = run_cli("fit --data /tmp/svyr2_definitely_missing.csv --formula 'y ~ x'");
  CHECK(r.code == 2);
  CHECK(r.err.find("error (io)") != string::npos);
}

TEST_CASE("separated data exits 3 and names the condition") {
  const string csv = temp_name("sep") + ".csv";
  spit(csv, "y,x\n0,-2\n0,-1\n1,1\n1,2\n");
  const CliResult r = run_cli("fit --data '" + csv + "' --formula 'y ~ x'");
  std::remove(csv.c_str());
  CHECK(r.code == 3);
  CHECK(r.err.find("separation") != string::npos);
}

TEST_CASE("gaussian fits report variances and NaN rescaled statistics") {
  const string csv = temp_name("gauss") + ".csv";
  spit(csv, "y,x\n1.5,1\n2.1,2\n2.9,3\n4.2,4\n5.1,5\n");
  const CliResult r = run_cli("fit --data '" + csv + "' --formula 'y ~ x' --family gaussian");
  std::remove(csv.c_str());
  CHECK(r.code == 0);
  CHECK(r.out.find("family: gaussian_mle") != string::npos);
  CHECK(value_after(r.out, "sigma2:") != "");
  CHECK(value_after(r.out, "nagelkerke") == "nan");
}

TEST_CASE("simulate is byte-deterministic per seed") {
  const string args =
      "simulate --pop-size 4000 --coef=-5,1 --ratios 1,2 --replicates 10 --seed 42";
  const CliResult a = run_cli(args);
  const CliResult b = run_cli(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("design\tsampling_fraction\tnaive_cs\tdesign_cs") == 0);
  CHECK(a.out.find("case_control_m1") != string::npos);
  CHECK(a.out.find("population") != string::npos);
  const CliResult c = run_cli(
      "simulate --pop-size 4000 --coef=-5,1 --ratios 1,2 --replicates 10 --seed 43");
  CHECK(c.out != a.out);
}

TEST_CASE("seed environment variable matches --seed, and the flag wins") {
  const string args = "simulate --pop-size 4000 --coef=-5,1 --ratios 1 --replicates 5";
  const CliResult flag = run_cli(args + " --seed 43");
  const CliResult env = run_cli(args, "env SVYR2_SEED=43");
  CHECK(flag.code == 0);
  CHECK(flag.out == env.out);
  const CliResult both = run_cli(args + " --seed 43", "env SVYR2_SEED=999");
  CHECK(both.out == flag.out);
}

TEST_CASE("a malformed seed variable is a usage error naming it") {
  const CliResult r = run_cli("simulate --pop-size 4000 --replicates 2 --ratios 1 --coef=-5,1",
                              "env SVYR2_SEED=not_a_number");
  CHECK(r.code == 2);
  CHECK(r.err.find("SVYR2_SEED") != string::npos);
}

TEST_CASE("simulate json carries the tsv values verbatim") {
  const string args =
      "simulate --pop-size 4000 --coef=-5,1 --ratios 1 --replicates 8 --seed 9";
  const CliResult tsv = run_cli(args);
  const CliResult json = run_cli(args + " --json");
  CHECK(json.code == 0);
  const string naive_cs = tsv_field(tsv.out, 1, 2);
  const string design_cs = tsv_field(tsv.out, 1, 3);
  REQUIRE(naive_cs != "");
  CHECK(json.out.find("\"naive_cs\": " + naive_cs) != string::npos);
  CHECK(json.out.find("\"design_cs\": " + design_cs) != string::npos);
}

TEST_CASE("two-phase simulation emits its three-row table") {
  const CliResult r = run_cli("simulate --design two-phase --pop-size 1200 --replicates 5 --seed 4");
  CHECK(r.code == 0);
  CHECK(r.out.find("case_control") != string::npos);
  CHECK(r.out.find("two_phase") != string::npos);
  CHECK(r.out.find("full_cohort") != string::npos);
  // The phase-two sample has no naive refit: nan cells in the TSV.
  CHECK(tsv_field(r.out, 2, 2) == "nan");
}

TEST_CASE("cc-only flags are rejected under two-phase") {
  const CliResult r =
      run_cli("simulate --design two-phase --pop-size 1200 --coef=-5,1 --replicates 2");
  CHECK(r.code == 2);
  CHECK(r.err.find("--design cc") != string::npos);
}

TEST_CASE("replicate esoph prints the published comparison") {
  const CliResult r = run_cli("replicate esoph");
  CHECK(r.code == 0);
  CHECK(r.out.find("esoph_main") != string::npos);
  CHECK(r.out.find("esoph_interaction") != string::npos);
  CHECK(r.out.find("published comparison") != string::npos);
  CHECK(r.out.find("0.0011709723093467073") != string::npos);
  CHECK(r.out.find(" vs 0.0005") != string::npos);
}

TEST_CASE("unknown replicate target exits 2") {
  const CliResult r = run_cli("replicate bogus");
  CHECK(r.code == 2);
}

TEST_CASE("--out writes exactly the stdout bytes") {
  const string args = "simulate --pop-size 4000 --coef=-5,1 --ratios 1 --replicates 5 --seed 11";
  const CliResult direct = run_cli(args);
  const string out_path = temp_name("outfile") + ".tsv";
  const CliResult filed = run_cli(args + " --out '" + out_path + "'");
  CHECK(filed.code == 0);
  CHECK(filed.out == "");
  CHECK(slurp(out_path) == direct.out);
  std::remove(out_path.c_str());
}

TEST_SUITE_END();
