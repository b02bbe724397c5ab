#pragma once

// Linear reaction-advection-diffusion problem on R_a:
//   -c T_x - Laplace T + tau v . grad T = tau f(Z),  T(-a) = 1, T(a) = 0,
// zero normal flux on the lateral walls.

#include "bqwave/fields.hpp"
#include "bqwave/reaction.hpp"

#include <functional>
#include <optional>

namespace bqwave::temperature {

using fields::ScalarField;
using fields::VectorField;

struct TemperatureProblem {
  fields::Box box;                   // R_a box (axial Dirichlet nodes at both ends)
  double c = 0.0;
  double tau = 0.0;
  const VectorField* v = nullptr;    // on `box`; may be null when tau = 0
  const ScalarField* z = nullptr;    // reaction source temperature; may be null when tau = 0
  reaction::NonlinearitySpec reaction;
  fields::AdvectionScheme scheme = fields::AdvectionScheme::centered;
};

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;            // relative
  std::vector<double> history;
};

struct SolverOptions {
  double rel_tol = 1e-13;
  int max_iterations = 400;
  int restart = 60;
};

/// Solves the problem; throws SolverError with the residual history on failure.
ScalarField solve_temperature(const TemperatureProblem& prob, SolveStats* stats = nullptr,
                              const SolverOptions& opts = {});

/// Solves L s = rhs with homogeneous axial data, where L is the operator of
/// `prob` (the source is ignored). Used for d T / d c, with rhs = T_x.
ScalarField solve_homogeneous(const TemperatureProblem& prob, const ScalarField& rhs,
                              SolveStats* stats = nullptr, const SolverOptions& opts = {});

/// Relative residual of `t` for `prob` (interior nodes, max norm).
double temperature_residual(const TemperatureProblem& prob, const ScalarField& t);

/// Centered axial derivative at interior nodes (zero at the ends).
ScalarField axial_derivative(const ScalarField& t);

/// x -> (e^{-cx} - e^{-ca}) / (e^{ca} - e^{-ca}), evaluated without overflow.
double planar_profile(double c, double a, double x);
/// Root in c of planar_profile(c, a, 0) = theta0.
double planar_root(double a, double theta0);

/// max{T(x, .): x >= 0} - theta0 over active grid nodes.
double normalization_gap(const ScalarField& t, double theta0);

struct MaxLocation {
  double value = 0.0;
  int i = 0, j = 0, k = 0;
};
/// First maximizer over x >= 0 in lexicographic order.
MaxLocation max_right_half(const ScalarField& t);

/// Planar field T(x) sampled on `box`.
ScalarField planar_field(const fields::Box& box, double c, double a);

}  // namespace bqwave::temperature
