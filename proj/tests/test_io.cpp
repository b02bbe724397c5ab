#include "support.hpp"

#include "bqwave/config.hpp"
#include "bqwave/field_io.hpp"
#include "bqwave/json_out.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace bqwave;
using doctest::Approx;

TEST_CASE("text configuration") {
  const std::string text =
      "# comment\n"
      "geometry.ly = 0.25   # trailing\n"
      "[physics]\n"
      "nu = 2\n"
      "rho = 0 0 -3\n"
      "d = 1\n"
      "solver.tau_schedule = 0, 0.5, 1\n";
  auto cfg = config::parse_text(text);
  CHECK(cfg.section.ly == 0.25);
  CHECK(cfg.phys.nu == 2.0);
  CHECK(cfg.phys.rho[2] == -3.0);
  CHECK(cfg.phys.d == 1);
  CHECK(cfg.solver.tau_schedule == std::vector<double>{0.0, 0.5, 1.0});
  // Canonical text parses back to the same configuration.
  auto again = config::parse_text(cfg.canonical());
  CHECK(again.canonical() == cfg.canonical());
  CHECK(again.hash() == cfg.hash());
  // The output block does not enter the hash.
  again.output.dir = "elsewhere";
  CHECK(again.hash() == cfg.hash());
  again.phys.nu = 3.0;
  CHECK(again.hash() != cfg.hash());
}

TEST_CASE("configuration errors carry line numbers") {
  auto line_of = [](const std::string& text) {
    try {
      config::parse_text(text, "t.conf");
    } catch (const config::ConfigError& e) {
      CHECK(std::string(e.what()).rfind("t.conf:", 0) == 0);
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("geometry.ly = 1\n\nphysics.bogus = 2\n") == 3);
  CHECK(line_of("physics.nu = abc\n") == 1);
  CHECK(line_of("physics.nu = 1\nphysics.nu = 2\n") == 2);
  CHECK(line_of("[physics\n") == 1);
  CHECK(line_of("geometry.ly 1\n") == 1);
  CHECK(line_of("physics.rho = 1 2\n") == 1);
  CHECK(line_of("physics.reaction = cubic\n") == 1);
  CHECK(line_of("physics.nu = 1\n") == -1);
  auto cfg = config::parse_text("physics.theta0 = 1.5\n");
  CHECK_THROWS_AS(cfg.validate(), config::ConfigError);
}

TEST_CASE("JSON mirror") {
  const std::string json = R"({
    "geometry": {"kind": "polygon", "vertices": [[0, 0], [1, 0], [0, 1]], "ny": 8, "nz": 8},
    "physics": {"nu": 2, "rho": [0, 0, -3], "reaction": "quadratic"},
    "solver": {"tau_schedule": [0, 1], "force": true}
  })";
  auto a = config::parse_json(json);
  auto b = config::parse_text(
      "geometry.kind = polygon\ngeometry.vertices = 0 0; 1 0; 0 1\ngeometry.ny = 8\n"
      "geometry.nz = 8\nphysics.nu = 2\nphysics.rho = 0 0 -3\nphysics.reaction = quadratic\n"
      "solver.tau_schedule = 0, 1\nsolver.force = true\n");
  CHECK(a.canonical() == b.canonical());
  CHECK_THROWS_AS(config::parse_json("{\"geometry\": 3}"), config::ConfigError);
  CHECK_THROWS_AS(config::parse_json("{oops"), config::ConfigError);
}

TEST_CASE("number formatting and hashing") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(2.0) == "2");
  CHECK(json_out::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(json_out::fnv1a_hex("a") == "af63dc4c8601ec8c");
  json_out::Json j;
  j["x"] = 0.1;
  j["bad"] = std::numeric_limits<double>::quiet_NaN();
  const std::string s = json_out::dump(j);
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  CHECK(s.find("null") != std::string::npos);
  CHECK(json_out::meta("abc")["config_hash"] == "abc");
}

TEST_CASE("state dump round trip") {
  auto setup = bqtest::make_setup(bqtest::square(0.5, 4));
  fixedpoint::FixedPointConfig cfg;
  cfg.a_schedule = {4.0};
  cfg.tau_schedule = {0.0, 0.5};
  cfg.tol = 1e-9;
  auto res = fixedpoint::solve_homotopy(cfg, setup);
  REQUIRE(res.converged);
  geometry::SectionSpec spec;
  spec.ly = spec.lz = 0.5;
  spec.ny = spec.nz = 4;
  bqtest::TempDir dir("bqfl");
  const std::string path = dir.str() + "/state.bqfl";
  io::write_state(path, spec, setup, res.state);
  auto dump = io::read_state(path);
  const auto& s = dump.state;
  CHECK(s.c == res.state.c);
  CHECK(s.tau == 0.5);
  CHECK(s.a() == 4.0);
  CHECK(s.grid.offset() == res.state.grid.offset());
  CHECK(s.t.values == res.state.t.values);
  CHECK(s.v.u == res.state.v.u);
  CHECK(s.v.w == res.state.v.w);
  CHECK(s.u.v == res.state.u.v);
  CHECK(s.t_ext.values == res.state.t_ext.values);
  CHECK(s.residuals == res.state.residuals);
  CHECK(dump.setup.phys.reaction.k == 4.0);
  CHECK(dump.setup.cs->area() == Approx(0.25));

  // Corrupt header and truncated files are rejected.
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.write("XXXX", 4);
  }
  CHECK_THROWS_AS(io::read_state(path), Error);
  { std::ofstream f(path, std::ios::binary | std::ios::trunc); f << "BQFL"; }
  CHECK_THROWS_AS(io::read_state(path), Error);
}

TEST_CASE("profiles CSV") {
  diagnostics::Profiles p;
  p.x = {-1, 0};
  p.max = {1, 0.5};
  p.min = {0.9, 0.25};
  p.mean = {0.95, 0.3};
  std::ostringstream os;
  io::write_profiles_csv(os, p);
  CHECK(os.str() == "x,M,m,mean\n-1,1,0.90000000000000002,0.94999999999999996\n0,0.5,0.25,0.29999999999999999\n");
}
