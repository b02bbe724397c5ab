#include "bqwave/error.hpp"
#include "bqwave/geometry.hpp"

#include <doctest.h>

#include <cmath>

using namespace bqwave::geometry;
using doctest::Approx;

TEST_CASE("rectangle closed forms") {
  const double ly = 0.5, lz = 0.8;
  auto cs = build_rectangle(ly, lz, 16, 16);
  const double pi2 = M_PI * M_PI;
  CHECK(cs.spectral().dirichlet_lambda1 == Approx(pi2 * (1 / (ly * ly) + 1 / (lz * lz))));
  CHECK(cs.spectral().neumann_mu1 == Approx(pi2 / (lz * lz)));
  CHECK(poincare_constant(cs) == Approx(1.0 / std::sqrt(cs.spectral().dirichlet_lambda1)));
  CHECK(poincare_wirtinger_constant(cs) == Approx(lz / M_PI));
  CHECK(cs.area() == Approx(ly * lz));
  CHECK(cs.centroid()[0] == Approx(ly / 2));
  CHECK(transverse_moment(cs, {0, 0, -1}) == Approx(lz / std::sqrt(12.0)).epsilon(1e-3));
  CHECK(transverse_moment(cs, {5, 0, 0}) == Approx(0.0));
}

TEST_CASE("constants scale with dilation") {
  auto a = build_rectangle(0.5, 0.7, 8, 8), b = build_rectangle(1.5, 2.1, 8, 8);
  CHECK(poincare_constant(b) == Approx(3 * poincare_constant(a)));
  CHECK(poincare_wirtinger_constant(b) == Approx(3 * poincare_wirtinger_constant(a)));
}

TEST_CASE("numeric eigenvalues approach the closed forms") {
  auto cs = build_rectangle(0.5, 0.5, 64, 64);
  auto num = numeric_spectral_constants(cs);
  CHECK(std::abs(num.dirichlet_lambda1 / cs.spectral().dirichlet_lambda1 - 1) < 1e-3);
  CHECK(std::abs(num.neumann_mu1 / cs.spectral().neumann_mu1 - 1) < 1e-3);
}

TEST_CASE("polygon sections") {
  // L shape: unit square minus its upper right quarter.
  auto cs = build_polygon({{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}}, 32, 32);
  CHECK_FALSE(cs.full());
  CHECK(cs.area() == Approx(0.75));
  CHECK(cs.centroid()[0] == Approx(5.0 / 12.0));
  CHECK_FALSE(cs.active(31, 31));
  CHECK(cs.active(0, 31));
  // Contained in the unit square, larger than the quarter squares.
  const double lam = cs.spectral().dirichlet_lambda1;
  CHECK(lam > 2 * M_PI * M_PI);
  CHECK(lam < 8 * M_PI * M_PI);
  // A polygon that is a rectangle reproduces the rectangle.
  auto r = build_polygon({{0, 0}, {0.5, 0}, {0.5, 0.5}, {0, 0.5}}, 32, 32);
  CHECK(r.spectral().dirichlet_lambda1 ==
        Approx(2 * M_PI * M_PI / 0.25).epsilon(2e-3));
  CHECK_THROWS_AS(build_polygon({{0, 0}, {1, 0}}, 8, 8), bqwave::InvalidArgument);
}

TEST_CASE("thinness composition") {
  auto cs = build_rectangle(0.5, 0.5, 24, 24);
  PhysParams pp;
  pp.d = 1;
  auto r = evaluate_thinness(cs, pp);
  const double s = 0.5, cp = s / (M_PI * std::sqrt(2.0)), cpw = s / M_PI;
  const double lhs = std::sqrt(14.0) * cp / std::sqrt(M_PI) * s * (cpw + r.moment);
  CHECK(r.lhs == Approx(lhs).epsilon(1e-12));
  CHECK(r.lhs == Approx(0.036).epsilon(0.01));
  CHECK(r.satisfied);
  CHECK(r.required);

  // nu^{-3/2} and linearity in rho.
  PhysParams p2 = pp;
  p2.nu = 4.0;
  CHECK(evaluate_thinness(cs, p2).lhs == Approx(r.lhs / 8.0));
  p2 = pp;
  p2.rho = {0, 0, -2};
  CHECK(evaluate_thinness(cs, p2).lhs == Approx(2 * r.lhs));
  p2 = pp;
  p2.nu = 1e-3;
  auto bad = evaluate_thinness(cs, p2);
  CHECK_FALSE(bad.satisfied);
  CHECK_FALSE(bad.admissible());
  p2.d = 0;
  CHECK(evaluate_thinness(cs, p2).admissible());
}

TEST_CASE("origin convention") {
  auto cs = build_polygon({{1, 1}, {1.5, 1}, {1.5, 1.5}, {1, 1.5}}, 16, 16);
  const Vec3 rho{0, 0, -1};
  const double c = transverse_moment(cs, rho, OriginConvention::centroid);
  const double g = transverse_moment(cs, rho, OriginConvention::as_given);
  CHECK(g > c);
  CHECK(transverse_moment_about(cs, rho, cs.centroid()) == Approx(c));
}

TEST_CASE("names round trip") {
  CHECK(parse_origin(to_string(OriginConvention::as_given)) == OriginConvention::as_given);
  CHECK(parse_cpw(to_string(CpwConvention::literal)) == CpwConvention::literal);
  CHECK(parse_section_kind("polygon") == SectionKind::polygon);
  CHECK_THROWS(parse_origin("middle"));
}
