#include "support.hpp"

#include "bqwave/run.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace bqwave;
namespace fs = std::filesystem;

namespace {

std::string write_config(const bqtest::TempDir& dir, const std::string& name, const std::string& extra) {
  std::vector<std::pair<std::string, std::string>> kv = {
      {"geometry.ly", "0.5"},      {"geometry.lz", "0.5"},           {"geometry.ny", "4"},
      {"geometry.nz", "4"},        {"physics.k", "4"},               {"solver.a_schedule", "4"},
      {"solver.tau_schedule", "0, 0.5, 1"}, {"solver.tol", "1e-10"}, {"solver.anderson_depth", "5"},
      {"output.dir", dir.str() + "/out_" + name}};
  std::istringstream is(extra);
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find(" = ");
    const std::string key = line.substr(0, eq), value = line.substr(eq + 3);
    bool found = false;
    for (auto& [k, v] : kv)
      if (k == key) {
        v = value;
        found = true;
      }
    if (!found) kv.emplace_back(key, value);
  }
  const std::string path = dir.str() + "/" + name;
  std::ofstream f(path);
  for (const auto& [k, v] : kv) f << k << " = " << v << "\n";
  return path;
}

}  // namespace

TEST_CASE("check-condition") {
  bqtest::TempDir dir("cli");
  std::ostringstream out, err;
  CHECK(run::cmd_check_condition(write_config(dir, "d0.conf", ""), out, err) == run::ok);
  CHECK(out.str().find("\"required\": false") != std::string::npos);
  std::ostringstream o2, e2;
  CHECK(run::cmd_check_condition(write_config(dir, "thick.conf", "physics.d = 1\nphysics.nu = 1e-3\n"),
                                 o2, e2) == run::refused);
  CHECK(o2.str().find("\"satisfied\": false") != std::string::npos);
  std::ostringstream o3, e3;
  CHECK(run::cmd_check_condition(write_config(dir, "bad.conf", "physics.zeta = 1\n"), o3, e3) ==
        run::config_error);
  CHECK(e3.str().find("bad.conf:11") != std::string::npos);
  std::ostringstream o4, e4;
  CHECK(run::cmd_check_condition(dir.str() + "/missing.conf", o4, e4) == run::config_error);
}

TEST_CASE("solve writes artifacts and verify re-audits them") {
  bqtest::TempDir dir("cli");
  std::ostringstream out, err;
  const auto path = write_config(dir, "run.conf", "");
  REQUIRE(run::cmd_solve(path, out, err) == run::ok);
  const fs::path root = dir.path / "out_run.conf";
  CHECK(fs::exists(root / "summary.json"));
  CHECK(fs::exists(root / "c_table.csv"));
  CHECK(fs::exists(root / "stages" / "stage_00.json"));
  CHECK(fs::exists(root / "a_00" / "audit.json"));
  CHECK(fs::exists(root / "a_00" / "profiles.csv"));
  REQUIRE(fs::exists(root / "a_00" / "state.bqfl"));

  std::ostringstream vo, ve;
  CHECK(run::cmd_verify((root / "a_00" / "state.bqfl").string(), (dir.path / "verify").string(), 0.05,
                        vo, ve) == run::ok);
  CHECK(fs::exists(dir.path / "verify" / "audit.json"));
  std::ostringstream bo, be;
  CHECK(run::cmd_verify((dir.path / "nothing.bqfl").string(), "", 0.05, bo, be) == run::config_error);
}

TEST_CASE("solve exit codes") {
  bqtest::TempDir dir("cli");
  std::ostringstream out, err;
  CHECK(run::cmd_solve(write_config(dir, "gate.conf", "physics.d = 1\nphysics.nu = 1e-3\n"), out, err) ==
        run::refused);
  CHECK(fs::exists(dir.path / "out_gate.conf" / "condition.json"));
  CHECK_MESSAGE(run::cmd_solve(write_config(dir, "k0.conf", "physics.k = 0\n"), out, err) == run::not_converged,
                err.str());
  CHECK(run::cmd_solve(write_config(dir, "short.conf", "solver.max_iter = 2\n"), out, err) ==
        run::not_converged);
  CHECK(run::cmd_solve(write_config(dir, "bad.conf", "solver.damping = 2\n"), out, err) ==
        run::config_error);
}

TEST_CASE("sweep") {
  bqtest::TempDir dir("cli");
  std::ostringstream out, err;
  const auto path = write_config(dir, "sw.conf", "physics.d = 1\nsolver.tau_schedule = 0\n");
  CHECK_MESSAGE(run::cmd_sweep(path, "nu", {0.5, 1.0, 2.0}, 1, out, err) == run::ok, err.str());
  const fs::path csv = dir.path / "out_sw.conf" / "sweep_nu" / "summary.csv";
  REQUIRE(fs::exists(csv));
  std::ifstream f(csv);
  std::string header, line;
  std::getline(f, header);
  int rows = 0;
  while (std::getline(f, line)) ++rows;
  CHECK(rows == 3);
  CHECK(run::cmd_sweep(path, "colour", {1.0}, 1, out, err) == run::config_error);

  config::RunConfig cfg;
  run::apply_axis(cfg, "lz", 0.7);
  CHECK(cfg.section.lz == 0.7);
  run::apply_axis(cfg, "rho", 2.0);
  CHECK(cfg.phys.rho[2] == -2.0);
}

TEST_CASE("planar") {
  std::ostringstream out, err;
  CHECK(run::cmd_planar(10.0, 0.25, out, err) == run::ok);
  CHECK(out.str().find("0.1098612288668") != std::string::npos);
  CHECK(run::cmd_planar(-1.0, 0.25, out, err) == run::config_error);
}

TEST_CASE("output root") {
  config::RunConfig cfg;
  cfg.output.dir = "rel/dir";
  ::setenv("BQ_OUT", "/tmp/bqroot", 1);
  CHECK(run::output_dir(cfg) == "/tmp/bqroot/rel/dir");
  cfg.output.dir = "/abs";
  CHECK(run::output_dir(cfg) == "/abs");
  ::unsetenv("BQ_OUT");
}
