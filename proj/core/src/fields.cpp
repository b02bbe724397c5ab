#include "bqwave/fields.hpp"

#include "bqwave/error.hpp"

#include <cmath>

namespace bqwave::fields {

Bc parse_bc(const std::string& tag) {
  if (tag == "neumann-lateral") return Bc::neumann_lateral;
  if (tag == "dirichlet-all") return Bc::dirichlet_all;
  if (tag == "dirichlet-axial+neumann-lateral") return Bc::dirichlet_axial_neumann_lateral;
  throw InvalidArgument("unknown boundary-condition tag '" + tag + "'");
}

ScalarField divergence(const VectorField& vf) {
  const Box& b = vf.box;
  ScalarField out(b);
  for (int i = 0; i < b.nx; ++i)
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k)
        out.at(i, j, k) = (vf.U(i + 1, j, k) - vf.U(i, j, k)) / b.hx +
                          (vf.V(i, j + 1, k) - vf.V(i, j, k)) / b.hy() +
                          (vf.W(i, j, k + 1) - vf.W(i, j, k)) / b.hz();
  out.apply_mask();
  return out;
}

double scaled_divergence(const VectorField& vf) {
  const double speed = vf.max_abs();
  if (speed == 0.0) return 0.0;
  const auto div = divergence(vf);
  const double hmin = std::min({vf.box.hx, vf.box.hy(), vf.box.hz()});
  return div.values.cwiseAbs().maxCoeff() * hmin / speed;
}

ScalarField laplacian(const ScalarField& sf, Bc bc) {
  const Box& b = sf.box;
  const auto& cs = *b.cs;
  const bool axial_dirichlet = bc != Bc::neumann_lateral;
  const bool lateral_dirichlet = bc == Bc::dirichlet_all;
  const double ix = 1.0 / (b.hx * b.hx), iy = 1.0 / (b.hy() * b.hy()), iz = 1.0 / (b.hz() * b.hz());
  ScalarField out(b);
  for (int i = 0; i < b.nx; ++i) {
    const bool end = i == 0 || i == b.nx - 1;
    if (end && axial_dirichlet) continue;
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k) {
        if (!cs.active(j, k)) continue;
        const double c = sf.at(i, j, k);
        // Node-based axial mirror at Neumann ends.
        const double xl = i > 0 ? sf.at(i - 1, j, k) : sf.at(std::min(1, b.nx - 1), j, k);
        const double xr = i < b.nx - 1 ? sf.at(i + 1, j, k) : sf.at(std::max(b.nx - 2, 0), j, k);
        auto lateral = [&](int jj, int kk) {
          if (cs.active(jj, kk)) return sf.at(i, jj, kk);
          return lateral_dirichlet ? -c : c;
        };
        out.at(i, j, k) = (xl - 2.0 * c + xr) * ix +
                          (lateral(j - 1, k) - 2.0 * c + lateral(j + 1, k)) * iy +
                          (lateral(j, k - 1) - 2.0 * c + lateral(j, k + 1)) * iz;
      }
  }
  return out;
}

ScalarField advect(const VectorField& v, const ScalarField& sf, AdvectionScheme scheme) {
  require_same(v.box, sf.box, "advect");
  const Box& b = sf.box;
  const auto& cs = *b.cs;
  ScalarField out(b);
  for (int i = 0; i < b.nx; ++i)
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k) {
        if (!cs.active(j, k)) continue;
        const double c = sf.at(i, j, k);
        auto flux = [&](double f, double nb) {
          if (scheme == AdvectionScheme::centered) return 0.5 * f * (c + nb);
          return f > 0.0 ? f * c : f * nb;
        };
        const double xl = i > 0 ? sf.at(i - 1, j, k) : c;
        const double xr = i + 1 < b.nx ? sf.at(i + 1, j, k) : c;
        const double yl = cs.active(j - 1, k) ? sf.at(i, j - 1, k) : c;
        const double yr = cs.active(j + 1, k) ? sf.at(i, j + 1, k) : c;
        const double zl = cs.active(j, k - 1) ? sf.at(i, j, k - 1) : c;
        const double zr = cs.active(j, k + 1) ? sf.at(i, j, k + 1) : c;
        out.at(i, j, k) = (flux(v.U(i + 1, j, k), xr) + flux(-v.U(i, j, k), xl)) / b.hx +
                          (flux(v.V(i, j + 1, k), yr) + flux(-v.V(i, j, k), yl)) / b.hy() +
                          (flux(v.W(i, j, k + 1), zr) + flux(-v.W(i, j, k), zl)) / b.hz();
      }
  return out;
}

VectorField advect(const VectorField& vt, const VectorField& u, AdvectionScheme scheme) {
  require_same(vt.box, u.box, "advect");
  FaceLayout faces(u.box);
  const auto a = vector_advection(faces, vt, scheme);
  VectorField out(u.box);
  faces.scatter(a * faces.gather(u), out);
  return out;
}

namespace {

constexpr double kRamp = 0.2;                  // ramp length of the cutoff slope profile
constexpr double kPlateau = 1.0 / (1.0 - kRamp);

// Integral over [0, t] of the slope profile, t in [0, 1/2].
double slope_integral_half(double t) {
  if (t <= kRamp) {
    const double u = t / kRamp;
    return kPlateau * kRamp * (u * u * u - 0.5 * u * u * u * u);
  }
  return kPlateau * (0.5 * kRamp + (t - kRamp));
}

}  // namespace

double cutoff(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  const double g = t <= 0.5 ? slope_integral_half(t) : 1.0 - slope_integral_half(1.0 - t);
  return 1.0 - g;
}

double cutoff_slope(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double s = std::min(t, 1.0 - t);
  if (s >= kRamp) return -kPlateau;
  const double u = s / kRamp;
  return -kPlateau * u * u * (3.0 - 2.0 * u);
}

double temperature_cutoff(double y) { return cutoff(3.0 * (y - 1.0 / 3.0)); }

ScalarField extend_temperature(const ScalarField& t, const AxialGrid& grid, double tol) {
  const Box rb = grid.temperature_box();
  require_same(t.box, rb, "extend_temperature");
  const auto& cs = *rb.cs;
  const int last = rb.nx - 1;
  for (int j = 0; j < rb.ny(); ++j)
    for (int k = 0; k < rb.nz(); ++k) {
      if (!cs.active(j, k)) continue;
      if (std::abs(t.at(0, j, k) - 1.0) > tol || std::abs(t.at(last, j, k)) > tol)
        throw InvalidArgument("extend_temperature: boundary traces must be T(-a) = 1, T(a) = 0");
    }
  const Box fb = grid.flow_box();
  const int m = grid.offset();
  ScalarField out(fb);
  for (int p = 0; p < fb.nx; ++p) {
    const int q = p - m;
    for (int j = 0; j < fb.ny(); ++j)
      for (int k = 0; k < fb.nz(); ++k) {
        if (!cs.active(j, k)) continue;
        double value = 0.0;
        if (q >= 0 && q <= last) {
          value = t.at(q, j, k);
        } else if (q < 0) {
          const double phi = temperature_cutoff(-q * rb.hx);
          if (phi > 0.0) value = phi * (2.0 - t.at(-q, j, k));
        } else {
          const int s = q - last;
          const double phi = temperature_cutoff(s * rb.hx);
          if (phi > 0.0) value = -phi * t.at(last - s, j, k);
        }
        out.at(p, j, k) = value;
      }
  }
  return out;
}

std::array<double, 3> extension_coefficients(int n) {
  if (n < 2) throw InvalidArgument("extension order n must be >= 2");
  const double d = n;
  return {(1.0 + d) * (1.0 + d * d) / (d * d * d), -(1.0 + d * d) / (d * d * (d - 1.0)),
          (1.0 + d) / (d * d * d * (d - 1.0))};
}

double extension_epsilon(int n) {
  const auto l = extension_coefficients(n);
  const double d = n;
  const double axial = (std::abs(l[1]) + std::abs(l[2])) +
                       std::abs(l[0]) * (std::abs(l[0]) + std::abs(l[1]) + std::abs(l[2]));
  const double transverse = d * std::abs(l[1]) + d * d * std::abs(l[2]);
  return std::max(axial, transverse) - 1.0;
}

namespace {

VectorField mirror_x(const VectorField& vf) {
  const Box& b = vf.box;
  VectorField out(b);
  for (int i = 0; i <= b.nx; ++i)
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k) out.U(i, j, k) = -vf.U(b.nx - i, j, k);
  for (int i = 0; i < b.nx; ++i) {
    for (int j = 0; j <= b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k) out.V(i, j, k) = vf.V(b.nx - 1 - i, j, k);
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k <= b.nz(); ++k) out.W(i, j, k) = vf.W(b.nx - 1 - i, j, k);
  }
  return out;
}

// Fills the flow-box nodes to the right of R_a from the R_a field `v`.
void extend_right(const VectorField& v, VectorField& out, int offset, int n, double width) {
  const Box& rb = v.box;
  const Box& fb = out.box;
  const auto lam = extension_coefficients(n);
  const double c2 = -n * lam[1], c3 = -static_cast<double>(n) * n * lam[2];
  const int last = rb.nx - 1;
  for (int p = offset + rb.nx; p < fb.nx; ++p) {
    const int r = p - offset - last;
    const double s = r * rb.hx;
    const double phi = s < width ? cutoff(s / width) : 0.0;
    const int q2 = last - n * r, q3 = last - n * n * r;
    for (int j = 0; j <= fb.ny(); ++j)
      for (int k = 0; k < fb.nz(); ++k)
        out.V(p, j, k) = phi > 0.0 ? phi * (c2 * v.V(q2, j, k) + c3 * v.V(q3, j, k)) : 0.0;
    for (int j = 0; j < fb.ny(); ++j)
      for (int k = 0; k <= fb.nz(); ++k)
        out.W(p, j, k) = phi > 0.0 ? phi * (c2 * v.W(q2, j, k) + c3 * v.W(q3, j, k)) : 0.0;
    // Axial component from the discrete continuity equation.
    for (int j = 0; j < fb.ny(); ++j)
      for (int k = 0; k < fb.nz(); ++k)
        out.U(p + 1, j, k) =
            out.U(p, j, k) - fb.hx * ((out.V(p, j + 1, k) - out.V(p, j, k)) / fb.hy() +
                                      (out.W(p, j, k + 1) - out.W(p, j, k)) / fb.hz());
  }
}

}  // namespace

VectorField extend_velocity(const VectorField& v, const AxialGrid& grid, int n,
                            ExtensionReport* report, double div_tol) {
  const Box rb = grid.temperature_box();
  require_same(v.box, rb, "extend_velocity");
  const auto lam = extension_coefficients(n);
  const double width = grid.a() / (3.0 * n * n);
  if (width < 2.0 * grid.hx())
    throw InvalidArgument("extend_velocity: grid too coarse for n = " + std::to_string(n) +
                          " (cutoff width " + std::to_string(width) + " < 2 hx)");
  const double div = scaled_divergence(v);
  if (div > div_tol)
    throw InvalidArgument("extend_velocity: input is not divergence-free (scaled divergence " +
                          std::to_string(div) + ")");

  const Box fb = grid.flow_box();
  const int m = grid.offset();
  VectorField out(fb);
  const Eigen::Index su = fb.ny() * fb.nz(), sv = (fb.ny() + 1) * fb.nz(),
                     sw = fb.ny() * (fb.nz() + 1);
  out.u.segment(m * su, (rb.nx + 1) * su) = v.u;
  out.v.segment(m * sv, rb.nx * sv) = v.v;
  out.w.segment(m * sw, rb.nx * sw) = v.w;

  extend_right(v, out, m, n, width);
  VectorField mirrored = mirror_x(out);
  extend_right(mirror_x(v), mirrored, m, n, width);
  out = mirror_x(mirrored);
  out.divergence_free = true;

  if (report) {
    report->n = n;
    report->lambda = lam;
    report->epsilon = extension_epsilon(n);
    const double base = v.sup_norm();
    report->amplification = base > 0.0 ? out.sup_norm() / base : 0.0;
    report->divergence = scaled_divergence(out);
    report->cutoff_width = width;
  }
  return out;
}

VectorField helmholtz_project(const VectorField& g, ProjectionInfo* info) {
  const Box& b = g.box;
  FaceLayout faces(b);
  CellLayout cells(b, 0, b.nx);
  const auto grad = gradient_matrix(faces, cells);
  const Vec x = faces.gather(g);
  const Vec rhs = grad.transpose() * x;
  const linalg::SparseMatrix lap = grad.transpose() * grad;
  auto project = [](Vec& r) { r.array() -= r.mean(); };

  Vec q = Vec::Zero(static_cast<Eigen::Index>(cells.size()));
  linalg::KrylovOptions opts;
  opts.rel_tol = 1e-13;
  opts.abs_tol = 1e-300;
  opts.max_iterations = 500;
  linalg::KrylovResult res;
  const auto op = linalg::matrix_op(lap);
  if (b.cs->full()) {
    linalg::SeparableSolver sep(tridiag::neumann_cells(b.nx, b.hx, 1.0, 0.0),
                                tridiag::neumann_cells(b.ny(), b.hy(), 1.0, 0.0),
                                tridiag::neumann_cells(b.nz(), b.hz(), 1.0, 0.0));
    res = linalg::gmres(op, sep.as_op(), rhs, q, opts, project);
  } else {
    linalg::SparseMatrix shifted = lap;
    shifted.diagonal().array() += 1e-10 * lap.diagonal().maxCoeff();
    linalg::IluPreconditioner ilu(shifted);
    opts.max_iterations = 4000;
    res = linalg::gmres(op, ilu.as_op(), rhs, q, opts, project);
  }
  if (!res.converged && res.residual > 1e-10 * std::max(rhs.norm(), 1e-300))
    throw SolverError("helmholtz", "Neumann Poisson solve did not converge", res.history);
  if (info) {
    info->iterations = res.iterations;
    info->residual = res.residual;
  }
  VectorField out(b);
  faces.scatter(x - grad * q, out);
  out.divergence_free = true;
  return out;
}

double l2_norm(const ScalarField& sf) {
  return std::sqrt(sf.values.squaredNorm() * sf.box.cell_volume());
}

double l2_norm(const VectorField& vf) { return std::sqrt(inner(vf, vf)); }

double inner(const VectorField& a, const VectorField& b) {
  require_same(a.box, b.box, "inner");
  return (a.u.dot(b.u) + a.v.dot(b.v) + a.w.dot(b.w)) * a.box.cell_volume();
}

double gradient_norm_sq(const ScalarField& sf) {
  const Box& b = sf.box;
  const auto& cs = *b.cs;
  double acc = 0.0;
  for (int i = 0; i < b.nx; ++i)
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k) {
        if (!cs.active(j, k)) continue;
        const double c = sf.at(i, j, k);
        if (i + 1 < b.nx) acc += std::pow((sf.at(i + 1, j, k) - c) / b.hx, 2);
        if (cs.active(j + 1, k)) acc += std::pow((sf.at(i, j + 1, k) - c) / b.hy(), 2);
        if (cs.active(j, k + 1)) acc += std::pow((sf.at(i, j, k + 1) - c) / b.hz(), 2);
      }
  return acc * b.cell_volume();
}

double gradient_norm_sq(const VectorField& vf) {
  FaceLayout faces(vf.box);
  const Vec x = faces.gather(vf);
  const auto k = vector_stiffness(faces);
  return x.dot(k * x) * vf.box.cell_volume();
}

}  // namespace bqwave::fields
