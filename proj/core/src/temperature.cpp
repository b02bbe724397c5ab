#include "bqwave/temperature.hpp"

#include "bqwave/error.hpp"

#include <cmath>

namespace bqwave::temperature {

using linalg::Vec;

namespace {

struct Assembled {
  fields::CellLayout cells;
  fields::ScalarSystem system;
  double alpha;
};

Assembled assemble(const TemperatureProblem& prob, double left, double right) {
  const auto& b = prob.box;
  if (b.nx < 3) throw InvalidArgument("temperature grid needs at least 3 axial nodes");
  if (!(prob.tau >= 0.0 && prob.tau <= 1.0)) throw InvalidArgument("tau must lie in [0, 1]");
  if (!std::isfinite(prob.c)) throw InvalidArgument("wave speed must be finite");
  const bool advect = prob.tau != 0.0 && prob.v != nullptr && prob.v->max_abs() > 0.0;
  if (prob.v) {
    fields::require_same(prob.v->box, b, "solve_temperature");
    if (!prob.v->finite()) throw InvalidArgument("velocity has non-finite entries");
  }
  fields::CellLayout cells(b, 1, b.nx - 1);
  const double alpha = advect ? prob.tau : 0.0;
  auto sys = fields::scalar_operator(cells, prob.c, alpha, advect ? prob.v : nullptr, prob.scheme,
                                     left, right);
  return {std::move(cells), std::move(sys), alpha};
}

Vec solve_system(const TemperatureProblem& prob, const Assembled& as, const Vec& rhs,
                 SolveStats* stats, const SolverOptions& opts, const char* stage) {
  const auto& b = prob.box;
  linalg::KrylovOptions ko;
  ko.rel_tol = opts.rel_tol;
  ko.max_iterations = opts.max_iterations;
  ko.restart = opts.restart;
  const auto op = linalg::matrix_op(as.system.matrix);
  Vec x = Vec::Zero(rhs.size());
  linalg::KrylovResult res;
  if (b.cs->full()) {
    namespace td = fields::tridiag;
    linalg::SeparableSolver pre(td::dirichlet_nodes(b.nx - 2, b.hx, 1.0, prob.c),
                                td::neumann_cells(b.ny(), b.hy(), 1.0, 0.0),
                                td::neumann_cells(b.nz(), b.hz(), 1.0, 0.0));
    if (as.alpha == 0.0) pre.solve(rhs, x);  // exact up to rounding
    res = linalg::gmres(op, pre.as_op(), rhs, x, ko);
  } else {
    linalg::IluPreconditioner ilu(as.system.matrix);
    res = linalg::gmres(op, ilu.as_op(), rhs, x, ko);
  }
  const double scale = std::max(rhs.norm(), 1e-300);
  if (stats) {
    stats->iterations = res.iterations;
    stats->residual = res.residual / scale;
    stats->history = res.history;
  }
  const bool floor = res.stagnated &&
                     linalg::backward_error(as.system.matrix, x, rhs, res.residual) < 1e-13;
  if (!res.converged && !floor)
    throw SolverError(stage, "GMRES did not converge (relative residual " +
                                 std::to_string(res.residual / scale) + ")",
                      res.history);
  return x;
}

}  // namespace

ScalarField solve_temperature(const TemperatureProblem& prob, SolveStats* stats,
                              const SolverOptions& opts) {
  const auto as = assemble(prob, 1.0, 0.0);
  Vec rhs = as.system.boundary_rhs;
  if (prob.tau != 0.0) {
    if (!prob.z) throw InvalidArgument("solve_temperature: missing source temperature Z");
    fields::require_same(prob.z->box, prob.box, "solve_temperature");
    for (std::size_t q = 0; q < as.cells.size(); ++q)
      rhs[static_cast<Eigen::Index>(q)] +=
          prob.tau * reaction::ignition_value(
                         prob.reaction, prob.z->values[static_cast<Eigen::Index>(as.cells.storage(q))]);
  }
  const Vec x = solve_system(prob, as, rhs, stats, opts, "temperature");
  ScalarField t(prob.box);
  const auto& b = prob.box;
  for (int j = 0; j < b.ny(); ++j)
    for (int k = 0; k < b.nz(); ++k)
      if (b.cs->active(j, k)) t.at(0, j, k) = 1.0;
  as.cells.scatter(x, t);
  return t;
}

ScalarField solve_homogeneous(const TemperatureProblem& prob, const ScalarField& rhs,
                              SolveStats* stats, const SolverOptions& opts) {
  fields::require_same(rhs.box, prob.box, "solve_homogeneous");
  const auto as = assemble(prob, 0.0, 0.0);
  const Vec x = solve_system(prob, as, as.cells.gather(rhs), stats, opts, "sensitivity");
  ScalarField s(prob.box);
  as.cells.scatter(x, s);
  return s;
}

double temperature_residual(const TemperatureProblem& prob, const ScalarField& t) {
  const auto as = assemble(prob, 1.0, 0.0);
  Vec rhs = as.system.boundary_rhs;
  if (prob.tau != 0.0 && prob.z)
    for (std::size_t q = 0; q < as.cells.size(); ++q)
      rhs[static_cast<Eigen::Index>(q)] +=
          prob.tau * reaction::ignition_value(
                         prob.reaction, prob.z->values[static_cast<Eigen::Index>(as.cells.storage(q))]);
  const Vec r = as.system.matrix * as.cells.gather(t) - rhs;
  return r.cwiseAbs().maxCoeff() / std::max(rhs.cwiseAbs().maxCoeff(), 1e-300);
}

ScalarField axial_derivative(const ScalarField& t) {
  const auto& b = t.box;
  ScalarField out(b);
  for (int i = 1; i + 1 < b.nx; ++i)
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k)
        out.at(i, j, k) = (t.at(i + 1, j, k) - t.at(i - 1, j, k)) / (2.0 * b.hx);
  out.apply_mask();
  return out;
}

double planar_profile(double c, double a, double x) {
  if (!(a > 0.0)) throw InvalidArgument("planar_profile: a must be positive");
  if (c == 0.0) return (a - x) / (2.0 * a);
  if (c > 0.0)
    return std::exp(-c * (x + a)) * std::expm1(-c * (a - x)) / std::expm1(-2.0 * c * a);
  const double d = -c;
  return std::expm1(d * (x - a)) / std::expm1(-2.0 * d * a);
}

double planar_root(double a, double theta0) {
  if (!(a > 0.0)) throw InvalidArgument("planar_root: a must be positive");
  if (!(theta0 > 0.0 && theta0 < 1.0)) throw InvalidArgument("planar_root: theta0 in (0, 1)");
  // planar_profile(c, a, 0) = 1 / (1 + e^{ca})
  return std::log(1.0 / theta0 - 1.0) / a;
}

MaxLocation max_right_half(const ScalarField& t) {
  const auto& b = t.box;
  const auto& cs = *b.cs;
  MaxLocation best;
  bool found = false;
  for (int i = 0; i < b.nx; ++i) {
    if (b.x(i) < -1e-9 * b.hx) continue;
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k) {
        if (!cs.active(j, k)) continue;
        const double v = t.at(i, j, k);
        if (!found || v > best.value) {
          best = {v, i, j, k};
          found = true;
        }
      }
  }
  if (!found) throw InvalidArgument("grid does not cover x >= 0");
  return best;
}

double normalization_gap(const ScalarField& t, double theta0) {
  return max_right_half(t).value - theta0;
}

ScalarField planar_field(const fields::Box& box, double c, double a) {
  ScalarField t(box);
  for (int i = 0; i < box.nx; ++i) {
    const double value = planar_profile(c, a, box.x(i));
    for (int j = 0; j < box.ny(); ++j)
      for (int k = 0; k < box.nz(); ++k)
        if (box.cs->active(j, k)) t.at(i, j, k) = value;
  }
  return t;
}

}  // namespace bqwave::temperature
