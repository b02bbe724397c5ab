#include "support.hpp"

#include "bqwave/fields.hpp"
#include "bqwave/operators.hpp"

#include <doctest.h>

using namespace bqwave;
using namespace bqwave::fields;
using doctest::Approx;

TEST_CASE("cutoffs") {
  CHECK(cutoff(0.0) == 1.0);
  CHECK(cutoff(1.0) == 0.0);
  CHECK(cutoff(0.5) == Approx(0.5));
  double prev = 1.0, steep = 0.0;
  for (int i = 1; i <= 1000; ++i) {
    const double t = i / 1000.0;
    CHECK(cutoff(t) <= prev);
    prev = cutoff(t);
    steep = std::max(steep, std::abs(cutoff_slope(t)));
    if (i > 1 && i < 1000)
      CHECK(cutoff_slope(t) == Approx((cutoff(t + 1e-6) - cutoff(t - 1e-6)) / 2e-6).epsilon(1e-4));
  }
  CHECK(steep <= 1.25 + 1e-12);
  CHECK(temperature_cutoff(0.3) == 1.0);
  CHECK(temperature_cutoff(0.7) == 0.0);
}

TEST_CASE("extension coefficients satisfy the moment identities") {
  double prev = 1e300;
  for (int n : {2, 3, 4, 8, 16}) {
    const auto l = extension_coefficients(n);
    const double d = n;
    CHECK(std::abs(l[0] + l[1] + l[2] - 1.0) < 1e-12);
    CHECK(std::abs(-d * l[1] - d * d * l[2] - 1.0) < 1e-12);
    CHECK(std::abs(d * d * l[1] + d * d * d * d * l[2] - 1.0) < 1e-12);
    CHECK(extension_epsilon(n) < prev);
    prev = extension_epsilon(n);
  }
  CHECK_THROWS_AS(extension_coefficients(1), InvalidArgument);
}

TEST_CASE("velocity extension is solenoidal and bounded") {
  auto cs = bqtest::square(0.5, 6);
  for (int n : {2, 4, 8}) {
    // The cutoff width a / (3 n^2) must hold two cells.
    AxialGrid grid(6.0, 400, 1.0, cs);
    const Box rb = grid.temperature_box();
    VectorField v = bqtest::stream_field(rb);
    CHECK(scaled_divergence(v) < 1e-12);
    ExtensionReport rep;
    VectorField e = extend_velocity(v, grid, n, &rep);
    CHECK(e.box.nx == grid.flow_box().nx);
    CHECK(rep.divergence < 1e-8);
    CHECK(scaled_divergence(e) < 1e-8);
    CHECK(rep.amplification <= 1.0 + rep.epsilon);
    // Unchanged on R_a.
    VectorField back = restrict_to(e, rb, grid.offset());
    CHECK((back.u - v.u).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((back.v - v.v).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("temperature extension") {
  auto cs = bqtest::square(0.5, 4);
  AxialGrid grid(4.0, 16, 2.0, cs);
  const Box rb = grid.temperature_box();
  ScalarField t(rb);
  for (int i = 0; i < rb.nx; ++i)
    for (int j = 0; j < rb.ny(); ++j)
      for (int k = 0; k < rb.nz(); ++k) t.at(i, j, k) = 0.5 * (1.0 - rb.x(i) / grid.a());
  ScalarField e = extend_temperature(t, grid);
  const int m = grid.offset();
  CHECK(e.at(m, 1, 1) == 1.0);
  CHECK(e.at(m + rb.nx - 1, 1, 1) == 0.0);
  CHECK(e.at(m - 1, 1, 1) == Approx(2.0 - t.at(1, 1, 1)));
  CHECK(e.at(m + rb.nx, 1, 1) == Approx(-t.at(rb.nx - 2, 1, 1)));
  CHECK(e.at(0, 1, 1) == 0.0);
  t.at(0, 2, 2) = 0.9;
  CHECK_THROWS_AS(extend_temperature(t, grid), InvalidArgument);
}

TEST_CASE("Helmholtz projection") {
  std::mt19937 rng(7);
  for (auto cs : {bqtest::square(0.5, 6),
                  std::make_shared<const geometry::CrossSection>(geometry::build_polygon(
                      {{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}}, 8, 8))}) {
    Box b{12, -1.0, 0.2, cs};
    FaceLayout faces(b);
    CellLayout cells(b, 0, b.nx);
    for (int r = 0; r < 3; ++r) {
      VectorField g(b);
      faces.scatter(faces.gather(bqtest::random_vector(b, rng)), g);
      VectorField p = helmholtz_project(g);
      CHECK(p.divergence_free);
      CHECK(scaled_divergence(p) < 1e-9);
      CHECK(l2_norm(p) <= l2_norm(g) * (1 + 1e-12));
      VectorField pp = helmholtz_project(p);
      CHECK(l2_norm(pp) == Approx(l2_norm(p)).epsilon(1e-10));
      CHECK((faces.gather(pp) - faces.gather(p)).norm() <= 1e-9 * faces.gather(p).norm());
      // g - Pg is orthogonal to Pg.
      VectorField rest = g;
      rest.u -= p.u;
      rest.v -= p.v;
      rest.w -= p.w;
      CHECK(std::abs(inner(rest, p)) <= 1e-9 * l2_norm(g) * l2_norm(g));

      Vec q = Vec::Random(static_cast<Eigen::Index>(cells.size()));
      VectorField grad(b);
      faces.scatter(gradient_matrix(faces, cells) * q, grad);
      CHECK(l2_norm(helmholtz_project(grad)) <= 1e-9 * l2_norm(grad));
    }
  }
}

TEST_CASE("discrete operators on polynomials") {
  auto cs = bqtest::square(1.0, 8);
  Box b{10, 0.0, 0.1, cs};
  ScalarField t(b);
  for (int i = 0; i < b.nx; ++i)
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k) t.at(i, j, k) = b.x(i) * b.x(i);
  ScalarField lap = laplacian(t, Bc::neumann_lateral);
  for (int i = 1; i < b.nx - 1; ++i) CHECK(lap.at(i, 3, 3) == Approx(2.0));
  // Uniform axial flow advects x^2 into 2x (centered).
  VectorField v(b);
  v.u.setConstant(1.0);
  ScalarField adv = advect(v, t);
  for (int i = 1; i < b.nx - 1; ++i) CHECK(adv.at(i, 2, 5) == Approx(2.0 * b.x(i)));
  CHECK(gradient_norm_sq(ScalarField(b, 3.0)) == 0.0);
  CHECK(scaled_divergence(VectorField(b)) == 0.0);
}

TEST_CASE("restriction and grids") {
  auto cs = bqtest::square(0.5, 4);
  AxialGrid grid(5.0, 16, 2.0, cs);
  CHECK(grid.hx() == Approx(5.0 / 16));
  CHECK(grid.A() >= grid.a() + 2.0 - 1e-12);
  const Box fb = grid.flow_box(), rb = grid.temperature_box();
  CHECK(fb.x(grid.offset()) == Approx(-5.0));
  CHECK(fb.x(grid.offset() + rb.nx - 1) == Approx(5.0));
  ScalarField s(fb);
  for (int i = 0; i < fb.nx; ++i) s.at(i, 0, 0) = i;
  ScalarField r = restrict_to(s, rb, grid.offset());
  CHECK(r.at(0, 0, 0) == grid.offset());
  CHECK_THROWS_AS(restrict_to(s, rb, fb.nx), InvalidArgument);
}
