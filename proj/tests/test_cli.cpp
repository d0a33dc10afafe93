#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "qgfv/cli.hpp"

namespace fs = std::filesystem;
using namespace qgfv::cli;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("qgfv_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  fs::path operator/(const std::string& name) const { return dir / name; }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return dir / name;
  }
};

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(slurp(p));
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> column(const fs::path& p, std::size_t col) {
  const auto rows = read_csv(p);
  std::vector<double> v;
  for (std::size_t r = 1; r < rows.size(); ++r) v.push_back(std::stod(rows[r].at(col)));
  return v;
}

double key_value(const std::string& text, const std::string& key) {
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line))
    if (line.rfind(key + " = ", 0) == 0) return std::stod(line.substr(key.size() + 3));
  FAIL("missing key " << key);
  return 0.0;
}

}  // namespace

TEST_CASE("mesh gen and validate") {
  Scratch s;
  const auto q2 = (s / "q2.qgmesh").string();
  CHECK(invoke({"mesh", "gen", "--quad", "2", "2", "1", "1", "-o", q2}).code == kOk);
  const auto v = invoke({"mesh", "validate", q2});
  CHECK(v.code == kOk);
  CHECK(v.out.find("accepted: yes") != std::string::npos);

  const std::string text = slurp(q2);
  s.write("trunc.qgmesh", text.substr(0, text.size() / 2));
  CHECK(invoke({"mesh", "validate", (s / "trunc.qgmesh").string()}).code == kIoError);
  CHECK(invoke({"mesh", "validate", (s / "absent.qgmesh").string()}).code == kIoError);

  CHECK(invoke({"mesh", "gen", "--quad", "1", "1", "1", "1", "-o", (s / "x").string()}).code == kBadArguments);
  CHECK(invoke({"mesh", "gen", "--quad", "1", "1", "-o", (s / "x").string()}).code == kBadArguments);
  CHECK(invoke({"mesh", "gen", "--quad", "4", "4", "1", "-1", "-o", (s / "x").string()}).code == kBadArguments);
  CHECK(invoke({"mesh", "gen", "--quad", "4", "4", "1", "1"}).code == kBadArguments);
  CHECK(invoke({"frobnicate"}).code == kBadArguments);
  CHECK(invoke({}).code == kBadArguments);
  CHECK(!fs::exists(s / "x"));
}

TEST_CASE("cvt mesh gen is reproducible and validates") {
  Scratch s;
  const auto poly = s.write("square.poly", "# unit square\n0 0\n1 0\n1 1\n0 1\n");
  const auto a = (s / "a.qgmesh").string(), b = (s / "b.qgmesh").string();
  REQUIRE(invoke({"mesh", "gen", "--cvt", poly.string(), "64", "40", "7", "-o", a}).code == kOk);
  REQUIRE(invoke({"mesh", "gen", "--cvt", poly.string(), "64", "40", "7", "-o", b}).code == kOk);
  CHECK(slurp(a) == slurp(b));
  CHECK(invoke({"mesh", "validate", a, "--cvt"}).code == kOk);
  CHECK(invoke({"mesh", "gen", "--cvt", (s / "none.poly").string(), "64", "40", "7", "-o", a}).code == kIoError);
}

TEST_CASE("run: rest state stays at rest") {
  Scratch s;
  const auto cfg = s.write("rest.cfg",
                           "case = wind_basin\nscheme = IVFV1\nmesh.quad = 8,8,200000,200000\n"
                           "tau0 = 0\nsteps = 10\noutput_every = 5\n");
  REQUIRE(invoke({"run", cfg.string(), "--out", (s / "out").string()}).code == kOk);
  for (const char* f : {"psi_000000.csv", "psi_000005.csv", "psi_000010.csv"}) {
    const auto rows = read_csv(s / "out" / f);
    CHECK(rows.front() == std::vector<std::string>{"cell_id", "x", "y", "value"});
    CHECK(rows.size() == 82);
    for (double v : column(s / "out" / f, 3)) CHECK(v == 0.0);
  }
  const auto t = column(s / "out" / "diagnostics.csv", 0);
  CHECK(t == std::vector<double>{0.0, 6750.0, 13500.0});
  const std::string manifest = slurp(s / "out" / "manifest.txt");
  CHECK(manifest.find("exit_status = 0") != std::string::npos);
  CHECK(manifest.find("scheme = IVFV1") != std::string::npos);
  CHECK(manifest.find("mesh_checksum = ") != std::string::npos);
  CHECK(key_value(manifest, "end_time") == 13500.0);
  CHECK(!fs::exists(s / "out" / "manifest.txt.tmp"));
}

TEST_CASE("run: VSFV1 on Q2 has no interior freedom") {
  Scratch s;
  const auto cfg = s.write("v1.cfg", "case = wind_basin\nscheme = VSFV1\nmesh.quad = 2,2,200000,200000\nsteps = 5\n");
  REQUIRE(invoke({"run", cfg.string(), "--out", (s / "out").string()}).code == kOk);
  for (double v : column(s / "out" / "psi_000005.csv", 3)) CHECK(v == 0.0);
}

TEST_CASE("run: circular flow keeps total PV and reruns are byte identical") {
  Scratch s;
  const auto cfg = s.write("circ.cfg",
                           "case = circular\nscheme = IVFV1\nmesh.quad = 16,16,3335847.3,3335847.3\n"
                           "steps = 1000\noutput_every = 100\n");
  REQUIRE(invoke({"run", cfg.string(), "--out", (s / "a").string()}).code == kOk);
  REQUIRE(invoke({"run", cfg.string(), "--out", (s / "b").string()}).code == kOk);

  const auto t = column(s / "a" / "diagnostics.csv", 0);
  REQUIRE(t.size() == 11);
  for (std::size_t k = 1; k < t.size(); ++k) CHECK(t[k] > t[k - 1]);
  const auto pv = column(s / "a" / "diagnostics.csv", 1);
  for (double v : pv) CHECK(std::abs(v - pv[0]) <= 1e-12 * std::abs(pv[0]));

  for (const auto& entry : fs::directory_iterator(s / "a")) {
    const auto name = entry.path().filename();
    CHECK_MESSAGE(slurp(entry.path()) == slurp(s / "b" / name), name.string());
  }
}

TEST_CASE("run: errors map to exit codes") {
  Scratch s;
  CHECK(invoke({"run", (s / "missing.cfg").string(), "--out", (s / "o").string()}).code == kIoError);
  const auto bad = s.write("bad.cfg", "case = circular\nmesh.quad = 8,8,1,1\nsteps = ten\n");
  CHECK(invoke({"run", bad.string(), "--out", (s / "o").string()}).code == kBadArguments);
  const auto steady = s.write("steady.cfg", "case = steady_stommel\nmesh.quad = 8,8,200000,200000\n");
  CHECK(invoke({"run", steady.string(), "--out", (s / "o").string()}).code == kBadArguments);
  CHECK(invoke({"steady", (s / "missing.cfg").string()}).code == kIoError);

  s.write("broken.qgmesh", "qgmesh v1\ncells 3\n");
  const auto broken = s.write("broken.cfg", "case = circular\nmesh_file = broken.qgmesh\n");
  CHECK(invoke({"run", broken.string(), "--out", (s / "o").string()}).code == kIoError);

  // unstable step: blows up and reports the step
  const auto blow = s.write("blow.cfg",
                            "case = circular\nscheme = IVFV1\nmesh.quad = 16,16,3335847.3,3335847.3\n"
                            "dt = 5e6\nsteps = 200\noutput_every = 1000\n");
  const auto r = invoke({"run", blow.string(), "--out", (s / "blow").string()});
  CHECK(r.code == kSolverFailure);
  const std::string manifest = slurp(s / "blow" / "manifest.txt");
  CHECK(manifest.find("exit_status = 4") != std::string::npos);
  CHECK(manifest.find("solver failure at step ") != std::string::npos);
}

TEST_CASE("steady command") {
  Scratch s;
  SUBCASE("no wind gives a zero field") {
    const auto cfg = s.write("z.cfg", "case = steady_stommel\nmesh.quad = 8,8,200000,200000\ntau0 = 0\n");
    REQUIRE(invoke({"steady", cfg.string(), "--out", (s / "z").string()}).code == kOk);
    for (double v : column(s / "z" / "psi_steady.csv", 3)) CHECK(v == 0.0);
  }
  SUBCASE("stommel report shows western intensification") {
    const auto cfg = s.write("st.cfg", "case = steady_stommel\nmesh.quad = 32,32,200000,200000\n");
    REQUIRE(invoke({"steady", cfg.string(), "--out", (s / "st").string()}).code == kOk);
    const std::string report = slurp(s / "st" / "boundary_layer.txt");
    CHECK(key_value(report, "west_east_ratio") > 5.0);
    REQUIRE(invoke({"steady", cfg.string(), "--out", (s / "st2").string()}).code == kOk);
    CHECK(report == slurp(s / "st2" / "boundary_layer.txt"));
    CHECK(slurp(s / "st" / "psi_steady.csv") == slurp(s / "st2" / "psi_steady.csv"));
  }
  SUBCASE("munk report carries both widths") {
    const auto cfg = s.write("mk.cfg", "case = steady_munk\nmesh.quad = 24,24,1000000,1000000\n");
    REQUIRE(invoke({"steady", cfg.string(), "--out", (s / "mk").string()}).code == kOk);
    const std::string report = slurp(s / "mk" / "boundary_layer.txt");
    CHECK(key_value(report, "west_width") > 0.0);
    CHECK(key_value(report, "east_width") > 0.0);
  }
  SUBCASE("relaxation that cannot converge exits 4") {
    const auto cfg = s.write("slow.cfg",
                             "case = steady_stommel\nmesh.quad = 8,8,200000,200000\n"
                             "steady.method = relaxation\nsteps = 3\n");
    CHECK(invoke({"steady", cfg.string(), "--out", (s / "slow").string()}).code == kSolverFailure);
    CHECK(slurp(s / "slow" / "manifest.txt").find("exit_status = 4") != std::string::npos);
  }
}
