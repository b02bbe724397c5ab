#pragma once

// Steady linear Boussinesq flow on the truncated channel [-A, A] x section:
//   -c u_x - nu Laplace u + tau d vt . grad u + grad p = tau T rho,  div u = 0,
// with u = 0 on the walls and on the end faces.

#include "bqwave/fields.hpp"

#include <string>
#include <vector>

namespace bqwave::flow {

using fields::ScalarField;
using fields::VectorField;

enum class PecletPolicy { automatic, centered, upwind };
PecletPolicy parse_peclet_policy(const std::string& name);
std::string to_string(PecletPolicy p);

struct FlowProblem {
  fields::Box box;                      // flow box
  double c = 0.0;
  double tau = 0.0;
  int d = 0;
  double nu = 1.0;
  geometry::Vec3 rho{0.0, 0.0, -1.0};
  const ScalarField* t_ext = nullptr;   // extended temperature on `box`
  const VectorField* v_ext = nullptr;   // extended velocity on `box` (needed when tau d != 0)
  PecletPolicy policy = PecletPolicy::automatic;
  const VectorField* u_guess = nullptr;  // optional initial iterate
  const ScalarField* p_guess = nullptr;
};

struct FlowOptions {
  double rel_tol = 1e-12;
  int max_iterations = 3000;
  int restart = 80;
};

struct FlowStats {
  int iterations = 0;
  double residual = 0.0;          // relative saddle-point residual reported by GMRES
  double momentum_residual = 0.0; // relative max-norm momentum residual after projection
  double divergence = 0.0;        // scaled divergence of u
  double peclet = 0.0;
  fields::AdvectionScheme scheme = fields::AdvectionScheme::centered;
  std::vector<std::string> warnings;
  std::vector<double> history;
};

struct FlowSolution {
  VectorField u;
  ScalarField p;
  FlowStats stats;
};

FlowSolution solve_flow(const FlowProblem& prob, const FlowOptions& opts = {});

/// tau T rho averaged onto the velocity unknown faces (other faces zero).
VectorField buoyancy_force(const ScalarField& t_ext, const geometry::Vec3& rho, double tau = 1.0);

/// q = rho_1 int_0^x mean(T) + rho~ . (x~ - origin) mean(T)(x), trapezoid in x.
ScalarField potential_q(const ScalarField& t_ext, const geometry::Vec3& rho,
                        const geometry::Vec2& origin);

/// T rho - grad q on the velocity unknowns.
VectorField potential_remainder(const ScalarField& t_ext, const ScalarField& q,
                                const geometry::Vec3& rho);

/// max|momentum residual| + max|div u|.
double flow_residual(const VectorField& u, const ScalarField& p, const FlowProblem& prob);

/// Mean over the section of the discrete Poiseuille profile -Laplace w = 1.
double poiseuille_mean(const geometry::CrossSection& cs);

}  // namespace bqwave::flow
