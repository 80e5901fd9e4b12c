#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "qcf/output.hpp"
#include "qcf/runner.hpp"
#include "support.hpp"

using namespace qcf;
using namespace qcf::test;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qcf_unit_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string l; std::getline(in, l);) ++n;
  return n;
}

const char* small_run = R"({
  "grid": {"n": [16, 16]},
  "model": {"kind": "qc_planar"},
  "hamiltonian": {"couplings": [{"matrix": "sigma_x", "v": 0.3}], "eos": {"kind": "polytropic", "kappa": 0.5}},
  "initial": {"D": {"offset": 1.0, "modes": [{"amp": 0.1, "k": [1, 0, 0]}]},
              "quantum": {"theta": 0.7, "radius": 0.9}, "c": 1.0},
  "integrator": {"dt": 0.01, "steps": 6},
  "diagnostics": {"every": 4},
  "snapshots": {"every": 3}
})";

}  // namespace

TEST_CASE("format_double round-trips and spells non-finite values") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 5e-324}) CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("invariant columns and rows line up") {
  DiagnosticsRecord r;
  CHECK(invariant_columns(2, 2).size() == invariant_row(r, 2, 2).size());
  CHECK(invariant_columns(0, 3).size() == invariant_row(r, 0, 3).size());
  CHECK(invariant_columns(0, 2).front() == "t");
}

TEST_CASE("snapshot round trip is exact") {
  const Grid g = Grid::planar(10, 8, 2.0, 3.0);
  const State s = make_state(g, 2, for_grid(smooth_state(3), g));
  const fs::path dir = scratch("snap");
  const auto files = write_snapshot(dir, "s0", s);
  REQUIRE(files.size() == 2);
  const auto back = read_snapshot(files[0]);
  const auto names = snapshot_fields(s);
  REQUIRE(back.size() == names.size());
  for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i].first == names[i]);
  CHECK(back[0].second.size() == g.size());
  double m = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) m = std::max(m, std::abs(back[0].second[c] - s.f.d[c]));
  CHECK(m == 0.0);
  fs::remove_all(dir);
}

TEST_CASE("sha256 of a known string") {
  const fs::path dir = scratch("sha");
  fs::create_directories(dir);
  std::ofstream(dir / "abc.txt", std::ios::binary) << "abc";
  CHECK(sha256_file(dir / "abc.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  fs::remove_all(dir);
}

TEST_CASE("runner writes table, snapshots and a checksummed manifest") {
  const RunConfig cfg = parse_config_text(small_run);
  const fs::path dir = scratch("run");
  const RunResult r = run(cfg, dir);
  CHECK(r.status == "completed");
  CHECK(r.steps == 6);
  CHECK(r.t_final == doctest::Approx(0.06));
  // header, step 0, step 4, final step 6
  CHECK(r.records == 3);
  CHECK(lines(dir / "invariants.csv") == 4);
  CHECK(fs::exists(dir / "snapshots" / "snap_00000003.bin"));
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m.at("status") == "completed");
  CHECK(m.at("steps") == 6);
  CHECK(m.at("config").at("grid").at("n")[0] == 16);
  bool found = false;
  for (const auto& f : m.at("files"))
    if (f.at("path") == "invariants.csv") {
      found = true;
      CHECK(f.at("sha256") == sha256_file(dir / "invariants.csv"));
    }
  CHECK(found);
  const std::string series = extract_series(dir / "invariants.csv", "mass");
  CHECK(std::count(series.begin(), series.end(), '\n') >= 3);
  CHECK_THROWS_WITH_AS(extract_series(dir / "invariants.csv", "nope"), doctest::Contains("available"), Error);
  fs::remove_all(dir);
}

TEST_CASE("zero-length run writes exactly one row") {
  RunConfig cfg = parse_config_text(small_run);
  cfg.integrator.t_end = 0.0;
  const fs::path dir = scratch("zero");
  const RunResult r = run(cfg, dir);
  CHECK(r.status == "completed");
  CHECK(r.steps == 0);
  CHECK(lines(dir / "invariants.csv") == 2);
  fs::remove_all(dir);
}

TEST_CASE("repeated runs are byte-identical") {
  const RunConfig cfg = parse_config_text(small_run);
  const fs::path a = scratch("rep_a"), b = scratch("rep_b");
  run(cfg, a);
  run(cfg, b);
  CHECK(slurp(a / "invariants.csv") == slurp(b / "invariants.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("a run that loses positivity ends with blow_up and keeps its table") {
  RunConfig cfg = parse_config_text(R"({
    "grid": {"n": [16, 16]},
    "model": {"kind": "qc_planar"},
    "initial": {"D": {"offset": 1.0, "modes": [{"amp": 0.9, "k": [1, 0, 0]}]},
                "u": [{"modes": [{"amp": 3.0, "k": [1, 0, 0]}]}, 0.0], "c": 1.0},
    "integrator": {"dt": 0.05, "steps": 400}
  })");
  const fs::path dir = scratch("blow");
  const RunResult r = run(cfg, dir);
  CHECK(r.status == "blow_up");
  CHECK(r.steps < 400);
  CHECK(lines(dir / "invariants.csv") >= 2);
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m.at("status") == "blow_up");
  fs::remove_all(dir);
}
