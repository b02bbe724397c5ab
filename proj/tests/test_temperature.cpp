#include "support.hpp"

#include <doctest.h>

using namespace bqwave;
using namespace bqwave::temperature;
using doctest::Approx;

namespace {

double planar_error(int half_cells, double a = 6.0) {
  auto cs = bqtest::square(0.5, 4);
  fields::AxialGrid grid(a, half_cells, 2.0, cs);
  TemperatureProblem prob;
  prob.box = grid.temperature_box();
  prob.c = planar_root(a, 0.25);
  SolveStats st;
  ScalarField t = solve_temperature(prob, &st);
  CHECK(st.residual < 1e-10);
  CHECK(temperature_residual(prob, t) < 1e-10);
  double err = 0.0;
  for (int i = 0; i < prob.box.nx; ++i)
    err = std::max(err, std::abs(t.at(i, 1, 2) - planar_profile(prob.c, a, prob.box.x(i))));
  return err;
}

}  // namespace

TEST_CASE("planar profile and root") {
  const double a = 10.0;
  const double c = planar_root(a, 0.25);
  CHECK(planar_profile(c, a, -a) == Approx(1.0));
  CHECK(planar_profile(c, a, a) == Approx(0.0).epsilon(1e-14));
  CHECK(planar_profile(c, a, 0.0) == Approx(0.25).epsilon(1e-14));
  // With y = e^{-ca} the profile at 0 is y / (1 + y), so c = ln((1 - theta0) / theta0) / a.
  for (double aa : {0.5, 10.0, 400.0})
    for (double th : {0.1, 0.25, 0.6})
      CHECK(planar_root(aa, th) == Approx(std::log((1 - th) / th) / aa).epsilon(1e-12));
  // No overflow for large c a.
  CHECK(std::isfinite(planar_profile(50.0, 100.0, -100.0)));
}

TEST_CASE("tau = 0 solve is second order against the planar profile") {
  const double e1 = planar_error(16), e2 = planar_error(32), e3 = planar_error(64);
  CHECK(e1 < 1e-2);
  CHECK(std::log2(e1 / e2) > 1.9);
  CHECK(std::log2(e2 / e3) > 1.9);
}

TEST_CASE("homogeneous solve and normalization") {
  auto cs = bqtest::square(0.5, 4);
  fields::AxialGrid grid(4.0, 8, 2.0, cs);
  TemperatureProblem prob;
  prob.box = grid.temperature_box();
  prob.c = 0.7;
  ScalarField zero = solve_homogeneous(prob, ScalarField(prob.box));
  CHECK(zero.values.cwiseAbs().maxCoeff() < 1e-14);

  ScalarField pf = planar_field(prob.box, prob.c, 4.0);
  CHECK(normalization_gap(pf, 0.25) == Approx(planar_profile(prob.c, 4.0, 0.0) - 0.25));
  CHECK(max_right_half(pf).value == Approx(planar_profile(prob.c, 4.0, 0.0)));
  ScalarField dx = axial_derivative(pf);
  CHECK(dx.at(0, 0, 0) == 0.0);
  CHECK(dx.at(4, 0, 0) < 0.0);
}

TEST_CASE("reaction and advection enter the solve") {
  auto cs = bqtest::square(0.5, 4);
  fields::AxialGrid grid(4.0, 16, 2.0, cs);
  TemperatureProblem prob;
  prob.box = grid.temperature_box();
  prob.c = planar_root(4.0, 0.25);
  ScalarField base = solve_temperature(prob);
  fields::VectorField v(prob.box);
  prob.tau = 1.0;
  prob.v = &v;
  prob.z = &base;
  prob.reaction = {reaction::Family::hat, 4.0, 0.25};
  ScalarField hot = solve_temperature(prob);
  // A positive source raises the solution (maximum principle).
  CHECK((hot.values - base.values).minCoeff() >= -1e-12);
  CHECK((hot.values - base.values).maxCoeff() > 1e-3);
}
