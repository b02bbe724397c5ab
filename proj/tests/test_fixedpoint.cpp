#include "support.hpp"

#include "bqwave/diagnostics.hpp"

#include <doctest.h>

using namespace bqwave;
using namespace bqwave::fixedpoint;
using doctest::Approx;

namespace {

FixedPointConfig small_config() {
  FixedPointConfig cfg;
  cfg.a_schedule = {5.0};
  cfg.tau_schedule = {0.0, 0.5, 1.0};
  cfg.hx = 0.3125;
  cfg.tol = 1e-10;
  cfg.anderson_depth = 5;
  return cfg;
}

}  // namespace

TEST_CASE("configuration invariants") {
  FixedPointConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.damping = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.tau_schedule = {0.0, 0.5, 0.5};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.anderson_depth = -1;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.a_schedule = {20.0, 10.0};
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("tau = 0 reproduces the discrete planar wave") {
  auto setup = bqtest::make_setup(bqtest::square(0.5, 4));
  FixedPointConfig cfg = small_config();
  cfg.tau_schedule = {0.0};
  auto res = solve_homotopy(cfg, setup);
  REQUIRE(res.converged);
  CHECK(res.stages.size() == 1);
  CHECK(res.stages[0].iterations <= 8);
  CHECK(res.state.v.max_abs() == 0.0);
  CHECK(temperature::normalization_gap(res.state.t, 0.25) == Approx(0.0).epsilon(1e-9));
  CHECK(res.state.c == Approx(temperature::planar_root(5.0, 0.25)).epsilon(1e-2));
  // Cross-sections of the tau = 0 wave are constant.
  const auto& t = res.state.t;
  for (int i = 0; i < t.box.nx; ++i) CHECK(t.at(i, 0, 0) == Approx(t.at(i, 3, 2)).epsilon(1e-10));
}

TEST_CASE("homotopy to tau = 1 and independence of the damping") {
  auto setup = bqtest::make_setup(bqtest::square(0.5, 4));
  FixedPointConfig cfg = small_config();
  cfg.damping = 0.2;
  std::vector<double> seen;
  auto res = solve_homotopy(cfg, setup, 5.0, [&](const StageRecord& r) { seen.push_back(r.tau); });
  REQUIRE(res.converged);
  CHECK(seen == cfg.tau_schedule);
  CHECK_FALSE(res.degenerate);
  CHECK(res.state.c > 0.0);
  CHECK(res.state.t.values.minCoeff() >= -1e-8);
  CHECK(res.state.t.values.maxCoeff() <= 1.0 + 1e-8);
  CHECK(diagnostics::nonzero_reaction(res.state.t, setup.phys.reaction) > 0.0);

  FixedPointConfig other = cfg;
  other.damping = 0.35;
  auto res2 = solve_homotopy(other, setup);
  REQUIRE(res2.converged);
  CHECK(std::abs(res2.state.c - res.state.c) < 10 * cfg.tol);

  // The converged state is a fixed point of the damped map.
  WaveState s = res.state;
  WaveState next = apply_Ka(s, setup, cfg, 1.0, 1.0);
  CHECK(std::abs(next.c - s.c) < 1e-8);
  CHECK((next.t.values - s.t.values).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("continuation in a") {
  auto setup = bqtest::make_setup(bqtest::square(0.5, 4));
  FixedPointConfig cfg = small_config();
  cfg.a_schedule = {5.0, 5.0, 7.5};
  auto res = continue_in_a(cfg, setup);
  REQUIRE(res.runs.size() == 3);
  CHECK(res.cauchy.size() == 2);
  // Repeating a restarts from a fixed point.
  CHECK(res.runs[1].stages.back().iterations <= 2);
  CHECK(res.cauchy[0] < 1e-9);
  CHECK(res.runs[2].converged);
  CHECK(res.runs[2].state.a() == 7.5);

  // Padding keeps the old values and the end data.
  const auto& st = res.runs[0].state;
  auto grid = make_grid(setup, cfg, 7.5);
  WaveState padded = pad_state(st, grid);
  const int shift = grid.half_cells() - st.grid.half_cells();
  CHECK(padded.t.at(shift + 3, 1, 1) == st.t.at(3, 1, 1));
  CHECK(padded.t.at(0, 1, 1) == 1.0);
  CHECK(padded.t.at(padded.t.box.nx - 1, 1, 1) == 0.0);
  CHECK(fields::scaled_divergence(padded.v) < 1e-8);
}

TEST_CASE("zero reaction is reported as degenerate") {
  auto setup = bqtest::make_setup(bqtest::square(0.5, 4), 0, 0.0);
  auto res = solve_homotopy(small_config(), setup);
  CHECK(res.degenerate);
  CHECK_FALSE(res.failure.empty());
}

TEST_CASE("d = 1 refuses a thick channel") {
  auto setup = bqtest::make_setup(bqtest::square(0.5, 4), 1, 4.0, 1e-3);
  FixedPointConfig cfg = small_config();
  try {
    solve_homotopy(cfg, setup);
    FAIL("expected a refusal");
  } catch (const GateRefusal& g) {
    CHECK(g.report().lhs > 1.0);
    CHECK(g.report().required);
  }
  cfg.force = true;
  cfg.tau_schedule = {0.0};
  CHECK(solve_homotopy(cfg, setup).converged);
}
