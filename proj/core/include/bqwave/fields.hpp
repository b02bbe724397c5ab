#pragma once

// Discrete differential operators, extension operators and the Helmholtz
// projection on staggered grids.

#include "bqwave/grid.hpp"
#include "bqwave/operators.hpp"

#include <array>
#include <string>

namespace bqwave::fields {

enum class Bc { neumann_lateral, dirichlet_all, dirichlet_axial_neumann_lateral };
Bc parse_bc(const std::string& tag);

/// Conservative face-difference divergence per cell (all faces, boundary ones included).
ScalarField divergence(const VectorField& vf);

/// max |div| scaled by (max face speed / min spacing); 0 for a zero field.
double scaled_divergence(const VectorField& vf);

/// 7-point Laplacian. Axial direction is node based: Dirichlet nodes return 0,
/// Neumann ends use mirrored neighbors. Lateral walls sit half a cell outside.
ScalarField laplacian(const ScalarField& sf, Bc bc);

/// Flux-form v . grad T (equal to the advective form when div v = 0).
/// Axial end nodes use a zero-gradient ghost.
ScalarField advect(const VectorField& v, const ScalarField& sf,
                   AdvectionScheme scheme = AdvectionScheme::centered);

/// Flux-form vt . grad u on the velocity unknowns; other faces are 0.
VectorField advect(const VectorField& vt, const VectorField& u,
                   AdvectionScheme scheme = AdvectionScheme::centered);

/// Monotone C^2 cutoff on [0, 1]: 1 at 0, 0 at 1, max slope 1.25.
double cutoff(double t);
double cutoff_slope(double t);

/// phi(y): 1 for y < 1/3, 0 for y > 2/3, |phi'| <= 3.75.
double temperature_cutoff(double y);

/// Extension of T on R_a to the flow box by the reflection formula
/// (left: phi (2 - T(-2a - x)), right: -phi T(2a - x)).
ScalarField extend_temperature(const ScalarField& t, const AxialGrid& grid, double tol = 1e-8);

std::array<double, 3> extension_coefficients(int n);
/// Amplification margin eps(n) of the velocity extension from the lambda sums.
double extension_epsilon(int n);

struct ExtensionReport {
  int n = 2;
  std::array<double, 3> lambda{};
  double epsilon = 0.0;         // bound from the lambda sums
  double amplification = 0.0;   // measured sup(Ev) / sup(v)
  double divergence = 0.0;      // scaled divergence of Ev
  double cutoff_width = 0.0;
};

/// Divergence-preserving extension of v on R_a (including its outer x-faces)
/// to the flow box, built at the right end and mirrored for the left end.
VectorField extend_velocity(const VectorField& v, const AxialGrid& grid, int n,
                            ExtensionReport* report = nullptr, double div_tol = 1e-8);

struct ProjectionInfo {
  int iterations = 0;
  double residual = 0.0;
};

/// Orthogonal projection onto discretely divergence-free fields with zero
/// normal trace: g - grad q with the Neumann Poisson problem for q.
VectorField helmholtz_project(const VectorField& g, ProjectionInfo* info = nullptr);

// Discrete L2 quantities with cell-volume weights.
double l2_norm(const ScalarField& sf);
double l2_norm(const VectorField& vf);
double inner(const VectorField& a, const VectorField& b);
/// ||grad T||^2 from differences between active neighbors (x, y, z).
double gradient_norm_sq(const ScalarField& sf);
/// <-Laplace u, u> on the velocity unknowns.
double gradient_norm_sq(const VectorField& vf);

}  // namespace bqwave::fields
