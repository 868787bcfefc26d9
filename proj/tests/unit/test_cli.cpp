#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <pmcf/cli.hpp>
#include <pmcf/oracle.hpp>

namespace fs = std::filesystem;

namespace {

struct Result
{
  int code = 0;
  std::string out, err;
};

Result invoke(std::vector<std::string> args)
{
  args.insert(args.begin(), "pmcf_lab");
  std::vector<const char*> argv;
  for (const auto& a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = pmcf::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path fresh_dir(const std::string& name)
{
  const fs::path p = fs::temp_directory_path() / ("pmcf_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p)
{
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ','))
      fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

// Table rows without header and slope line, as (param, l2, linf, h1).
std::vector<std::array<double, 4>> table_rows(const fs::path& p)
{
  std::vector<std::array<double, 4>> rows;
  for (const auto& r : read_csv(p)) {
    if (r.empty() || r[0] == "param" || r[0] == "slope")
      continue;
    rows.push_back({std::stod(r[0]), std::stod(r[1]), std::stod(r[2]), std::stod(r[3])});
  }
  return rows;
}

std::vector<std::string> slope_row(const fs::path& p)
{
  for (const auto& r : read_csv(p))
    if (!r.empty() && r[0] == "slope")
      return r;
  return {};
}

} // namespace

TEST_CASE("solve writes the solution and a converged report")
{
  const fs::path dir = fresh_dir("solve");
  const Result r = invoke({"solve", "--domain", "circle:1", "--k", "1", "--eps", "1.0", "--h", "0.4",
                           "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "solution.csv"));
  CHECK(fs::exists(dir / "vertices.csv"));
  CHECK(fs::exists(dir / "triangles.csv"));
  const auto report = read_csv(dir / "newton_report.csv");
  REQUIRE(report.size() == 2);
  CHECK(report[0][3] == "residual");
  CHECK(std::stod(report[1][3]) <= 1e-10);
}

TEST_CASE("explicit eps stages")
{
  const fs::path dir = fresh_dir("stages");
  const Result r = invoke({"solve", "--domain", "ellipse:2,1", "--eps-list", "0.8,0.4,0.3", "--h", "0.2",
                           "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto report = read_csv(dir / "newton_report.csv");
  REQUIRE(report.size() == 4);
  CHECK(std::stod(report[1][1]) == 0.8);
  CHECK(std::stod(report[3][1]) == 0.3);
}

TEST_CASE("study-h table layout")
{
  const fs::path dir = fresh_dir("study_h");
  const Result r = invoke({"study-h", "--domain", "circle:1", "--k", "1", "--eps", "0.1", "--h",
                           "0.4,0.2,0.1,0.05", "--ref-h", "0.025", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto rows = table_rows(dir / "study_h.csv");
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i][0] < rows[i - 1][0]);
  const auto slope = slope_row(dir / "study_h.csv");
  REQUIRE(slope.size() == 4);
  const double l2_slope = std::stod(slope[1]);
  INFO("L2 slope ", l2_slope);
  CHECK(l2_slope >= 1.7);
  CHECK(l2_slope <= 2.3);
}

TEST_CASE("study-eps on the circle, k = 1: strictly decreasing errors")
{
  const fs::path dir = fresh_dir("study_eps_k1");
  const Result r = invoke({"study-eps", "--domain", "circle:1", "--k", "1", "--eps",
                           "0.5,0.35,0.25,0.17", "--h", "0.0125", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto rows = table_rows(dir / "study_eps.csv");
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i][2] < rows[i - 1][2]);
    CHECK(rows[i][1] < rows[i - 1][1]);
  }
}

TEST_CASE("study-eps on the circle, k = 2: errors follow the radial oracle")
{
  const fs::path dir = fresh_dir("study_eps_k2");
  const double h = 0.0125;
  const Result r = invoke({"study-eps", "--domain", "circle:1", "--k", "2", "--eps",
                           "0.5,0.35,0.25,0.17", "--h", "0.0125", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto rows = table_rows(dir / "study_eps.csv");
  REQUIRE(rows.size() == 4);
  std::vector<double> oracle;
  for (const auto& row : rows) {
    const pmcf::RadialProfile p = pmcf::radial_regularized_solve(1.0, 2.0, row[0]);
    double gap = 0.0;
    for (std::size_t i = 0; i < p.r_nodes.size(); ++i)
      gap = std::max(gap, std::abs(p.values[i] - pmcf::exact_circle_solution(1.0, 2.0, p.r_nodes[i])));
    oracle.push_back(gap);
    INFO("eps=", row[0], " fe=", row[2], " oracle=", gap);
    CHECK(std::abs(row[2] - gap) <= 2.0 * h * h + 1e-3);
  }
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK((rows[i][2] < rows[i - 1][2]) == (oracle[i] < oracle[i - 1]));
}

TEST_CASE("study-eps on the ellipse against a reference eps")
{
  const fs::path dir = fresh_dir("study_eps_ellipse");
  const Result r = invoke({"study-eps", "--domain", "ellipse:2,1", "--eps", "0.5,0.35,0.25",
                           "--ref-eps", "0.17", "--h", "0.1", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto rows = table_rows(dir / "study_eps.csv");
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i][2] < rows[i - 1][2]);
  CHECK(invoke({"study-eps", "--domain", "ellipse:2,1", "--eps", "0.5,0.1", "--ref-eps", "0.17",
                "--h", "0.2", "--out", dir.string()})
          .code == 1);
}

TEST_CASE("study-total with two rows has no slope line")
{
  const fs::path dir = fresh_dir("study_total");
  const Result r = invoke({"study-total", "--domain", "circle:1", "--h", "0.4,0.2", "--ref-h", "0.1",
                           "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(table_rows(dir / "study_total.csv").size() == 2);
  CHECK(slope_row(dir / "study_total.csv").empty());

  const Result exact = invoke({"study-total", "--domain", "circle:1", "--h", "0.4,0.2,0.1", "--vs-exact",
                               "--out", dir.string()});
  REQUIRE(exact.code == 0);
  CHECK(slope_row(dir / "study_total.csv").size() == 4);
  CHECK(invoke({"study-total", "--domain", "ellipse:2,1", "--vs-exact", "--out", dir.string()}).code == 1);
}

TEST_CASE("section along a diameter matches the radial oracle")
{
  const fs::path dir = fresh_dir("section");
  const double h = 0.05;
  const Result r = invoke({"section", "--domain", "circle:1", "--eps", "0.1", "--h", "0.05",
                           "--with-oracle", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto rows = read_csv(dir / "section.csv");
  REQUIRE(rows.size() == 202);
  CHECK(rows[0] == std::vector<std::string>{"s", "x", "y", "u", "radial_oracle", "exact"});
  double gap = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    gap = std::max(gap, std::abs(std::stod(rows[i][3]) - std::stod(rows[i][4])));
  CHECK(gap <= 2.0 * h * h + 1e-3);

  const Result y = invoke({"section", "--domain", "ellipse:2,1", "--axis", "y", "--samples", "11",
                           "--h", "0.2", "--out", dir.string()});
  REQUIRE(y.code == 0);
  const auto yrows = read_csv(dir / "section.csv");
  REQUIRE(yrows.size() == 12);
  CHECK(yrows[0].size() == 4);
  CHECK(std::stod(yrows[1][2]) == doctest::Approx(-1.0));
  CHECK(invoke({"section", "--domain", "ellipse:2,1", "--with-oracle", "--out", dir.string()}).code == 1);
  CHECK(invoke({"section", "--axis", "z", "--out", dir.string()}).code == 1);
}

TEST_CASE("deficit and levelset artifacts")
{
  const fs::path dir = fresh_dir("deficit");
  const Result d = invoke({"deficit", "--domain", "ellipse:2,1", "--eps", "0.1", "--h", "0.1",
                           "--levels", "8", "--out", dir.string()});
  REQUIRE(d.code == 0);
  const auto rows = read_csv(dir / "deficit.csv");
  REQUIRE(rows.size() == 9);
  CHECK(rows[0] == std::vector<std::string>{"t", "l", "a", "deficit"});
  CHECK(slurp(dir / "deficit_levels.svg").find("<svg") != std::string::npos);

  const Result l = invoke({"levelset", "--domain", "circle:1", "--level-list", "0.1,0.2", "--h", "0.2",
                           "--out", dir.string()});
  REQUIRE(l.code == 0);
  CHECK(fs::exists(dir / "levels.csv"));
  CHECK(slurp(dir / "levels.svg").find("<path") != std::string::npos);
}

TEST_CASE("mesh export and import")
{
  const fs::path dir = fresh_dir("mesh");
  fs::create_directories(dir);
  const std::string msh = (dir / "disk.msh").string();
  const Result g = invoke({"mesh", "--domain", "circle:1", "--h", "0.3", "--export-msh", msh,
                           "--out", dir.string()});
  REQUIRE(g.code == 0);
  CHECK(g.out.find(" ok") != std::string::npos);
  const std::string vertices = slurp(dir / "vertices.csv");
  const Result i = invoke({"mesh", "--import-msh", msh, "--out", (dir / "again").string()});
  REQUIRE(i.code == 0);
  CHECK(i.out.find(" ok") != std::string::npos);
  CHECK(slurp(dir / "again" / "vertices.csv") == vertices);
  CHECK(invoke({"mesh", "--import-msh", (dir / "missing.msh").string()}).code == 1);
}

TEST_CASE("identical arguments give byte-identical files")
{
  const fs::path a = fresh_dir("repro_a"), b = fresh_dir("repro_b");
  for (const auto& dir : {a, b})
    REQUIRE(invoke({"solve", "--domain", "ellipse:2,1", "--k", "1.5", "--eps", "0.2", "--h", "0.15",
                    "--out", dir.string()})
              .code == 0);
  for (const char* f : {"solution.csv", "vertices.csv", "triangles.csv", "newton_report.csv"})
    CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("output directory from the environment")
{
  const fs::path dir = fresh_dir("env");
  setenv("PMCF_OUTPUT_DIR", dir.c_str(), 1);
  const Result r = invoke({"solve", "--eps", "1", "--h", "0.4"});
  unsetenv("PMCF_OUTPUT_DIR");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "solution.csv"));
}

TEST_CASE("usage errors and help")
{
  CHECK(invoke({}).code == 1);
  CHECK(invoke({"frobnicate"}).code == 1);
  CHECK(invoke({"solve", "--no-such-flag"}).code == 1);
  CHECK(invoke({"solve", "--h"}).code == 1);
  CHECK(invoke({"solve", "--h", "abc"}).code == 1);
  CHECK(invoke({"solve", "--k", "0.3"}).code == 1);
  CHECK(invoke({"solve", "--domain", "square:1"}).code == 1);
  CHECK(invoke({"solve", "--h", "0.6"}).code == 1);
  CHECK(invoke({"solve", "--eps-list", "0.5,0.6"}).code == 1);
  CHECK_FALSE(invoke({"solve", "--k", "0.3"}).err.empty());

  const Result help = invoke({"--help"});
  CHECK(help.code == 0);
  for (const char* cmd : {"solve", "study-h", "study-eps", "study-total", "deficit", "section", "levelset", "mesh"})
    CHECK(help.out.find(cmd) != std::string::npos);

  const Result sub = invoke({"study-eps", "--help"});
  CHECK(sub.code == 0);
  for (const char* flag : {"--domain", "--k", "--out", "--tol", "--eps-start", "--factor", "--eps", "--h",
                           "--ref-eps", "--ref-h"})
    CHECK(sub.out.find(flag) != std::string::npos);
}

TEST_CASE("low k is accepted with a warning")
{
  const fs::path dir = fresh_dir("low_k");
  const Result r = invoke({"solve", "--k", "0.5", "--eps", "1", "--h", "0.4", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("warning") != std::string::npos);
}

TEST_CASE("solver failure exit code")
{
  const fs::path dir = fresh_dir("failure");
  const Result r = invoke({"solve", "--eps", "0.5", "--h", "0.3", "--tol", "1e-30", "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("eps") != std::string::npos);
}

TEST_CASE("the installed binary")
{
  const char* exe = std::getenv("PMCF_LAB");
  if (!exe) {
    MESSAGE("PMCF_LAB not set; skipping subprocess checks");
    return;
  }
  const fs::path dir = fresh_dir("binary");
  const std::string base = std::string("\"") + exe + "\"";
  auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  CHECK(status(base + " --help") == 0);
  CHECK(status(base + " --bogus") == 1);
  CHECK(status(base + " solve --eps 1 --h 0.4 --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "solution.csv"));
  CHECK(status(base + " solve --eps 0.5 --h 0.4 --tol 1e-30 --out " + dir.string()) == 2);
}
