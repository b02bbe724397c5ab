#include "support.hpp"

#include "bqwave/diagnostics.hpp"

#include <doctest.h>

using namespace bqwave;
using namespace bqwave::diagnostics;
using doctest::Approx;

namespace {

fields::ScalarField profile(const fields::Box& b, const std::function<double(double)>& f) {
  fields::ScalarField t(b);
  for (int i = 0; i < b.nx; ++i)
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k) t.at(i, j, k) = f(b.x(i));
  return t;
}

}  // namespace

TEST_CASE("checks") {
  CHECK(relative_check("x", "", 1.04, 1.0, 0.05).pass);
  CHECK_FALSE(relative_check("x", "", 1.06, 1.0, 0.05).pass);
  CHECK(absolute_check("x", "", 1.0 + 1e-9, 1.0, 1e-8).pass);
  CHECK_FALSE(absolute_check("x", "", 1.0 + 1e-7, 1.0, 1e-8).pass);
  AuditReport r;
  r.records.push_back(relative_check("a", "", 2.0, 1.0, 0.05, false));
  CHECK(r.passed());
  r.records.push_back(relative_check("b", "", 2.0, 1.0, 0.05));
  CHECK_FALSE(r.passed());
  CHECK(r.find("b") != nullptr);
  CHECK(r.find("zzz") == nullptr);
}

TEST_CASE("profiles and monotonicity") {
  auto cs = bqtest::square(0.5, 4);
  fields::Box b{21, -5.0, 0.5, cs};
  auto down = profile(b, [](double x) { return 0.5 * (1 - std::tanh(x)); });
  auto p = profiles_and_monotonicity(down);
  CHECK(p.monotone);
  CHECK(p.x.size() == 21u);
  CHECK(p.max[3] == Approx(p.min[3]));
  CHECK(p.mean[3] == Approx(p.min[3]));
  auto bump = profile(b, [](double x) { return std::exp(-x * x); });
  auto q = profiles_and_monotonicity(bump);
  CHECK_FALSE(q.monotone);
  CHECK(q.worst_increase > 0.1);
  // A transverse variation separates max, min and mean.
  down.at(4, 1, 1) += 0.1;
  auto r = profiles_and_monotonicity(down);
  CHECK(r.max[4] > r.mean[4]);
  CHECK(r.mean[4] > r.min[4]);
}

TEST_CASE("left limit classification") {
  auto cs = bqtest::square(0.5, 4);
  fields::Box b{41, -10.0, 0.5, cs};
  reaction::NonlinearitySpec quad{reaction::Family::quadratic, 1.0, 0.25};
  auto burnt = classify_left_limit(profile(b, [](double x) { return x < -5 ? 1.0 : 0.5; }), quad);
  CHECK(burnt.plateau);
  CHECK(burnt.branch == "full-burn");
  CHECK(burnt.theta_minus == Approx(1.0));
  auto quenched =
      classify_left_limit(profile(b, [](double x) { return x < -5 ? 0.2 : 0.1; }), quad);
  CHECK(quenched.branch == "quenched-ish");
  CHECK(quenched.theta_minus == Approx(0.2));
  CHECK_FALSE(quenched.lemma_note.empty());
  CHECK_THROWS_AS(classify_left_limit(profile(b, [](double x) { return std::sin(x); }), quad),
                  Error);
}

TEST_CASE("reaction integral") {
  auto cs = bqtest::square(0.5, 4);
  fields::Box b{11, 0.0, 0.1, cs};
  reaction::NonlinearitySpec hat{reaction::Family::hat, 4.0, 0.25};
  CHECK(nonzero_reaction(fields::ScalarField(b, 0.0), hat) == 0.0);
  CHECK(nonzero_reaction(fields::ScalarField(b, 0.5), hat) ==
        Approx(4.0 * 0.25 * 0.5 * 0.25 * b.hx * b.nx).epsilon(0.1));
}

TEST_CASE("force potential bound on smooth temperatures") {
  auto setup = bqtest::make_setup(bqtest::square(0.5, 8));
  fields::AxialGrid grid(3.0, 8, 2.0, setup.cs);
  std::mt19937 rng(11);
  for (int r = 0; r < 5; ++r) {
    auto t = bqtest::smooth_scalar(grid.flow_box(), rng);
    auto pb = potential_bound(t, setup);
    CHECK(pb.remainder <= 1.05 * pb.constant * pb.gradient);
  }
  // A temperature that depends on x only has no transverse remainder when rho is axial.
}

TEST_CASE("audits of a converged wave") {
  auto setup = bqtest::make_setup(bqtest::square(0.5, 4));
  fixedpoint::FixedPointConfig cfg;
  cfg.a_schedule = {6.0, 12.0};
  cfg.tau_schedule = {0.0, 0.5, 1.0};
  cfg.tol = 1e-11;
  cfg.anderson_depth = 5;
  auto cont = fixedpoint::continue_in_a(cfg, setup);
  REQUIRE(cont.runs.size() == 2);
  REQUIRE(cont.runs[1].converged);
  const auto& res = cont.runs[1];
  auto rep = audit_all(res.state, setup);
  for (const auto& rec : rep.records)
    if (rec.asserted) CHECK_MESSAGE(rec.pass, rec.name << " " << rec.lhs << " " << rec.rhs);
  CHECK(rep.passed());
  CHECK(rep.find("th_rd.i.lower") != nullptr);
  CHECK(rep.find("quattro") != nullptr);
  CHECK(rep.has_energy);
  // The identity misses only the boundary flux at -a, which decays with a.
  CHECK(rep.energy.residual < energy_identity(cont.runs[0].state, setup).residual);
  CHECK(rep.profiles.monotone);
  CHECK(rep.reaction_integral > 0.0);

  // Audits read the state only.
  auto again = audit_all(res.state, setup);
  CHECK(again.records.size() == rep.records.size());
  for (std::size_t i = 0; i < rep.records.size(); ++i)
    CHECK(again.records[i].lhs == rep.records[i].lhs);

  // A corrupted temperature is caught.
  auto bad = res.state;
  bad.t.at(5, 1, 1) = 1.5;
  CHECK_FALSE(verify_th_rd(bad, setup).passed());
}
