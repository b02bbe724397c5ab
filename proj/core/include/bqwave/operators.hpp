#pragma once

// Sparse assembly of the staggered-grid operators acting on unknown faces
// and cells, plus the one-dimensional factors used by the separable solvers.

#include "bqwave/grid.hpp"

namespace bqwave::fields {

enum class AdvectionScheme { centered, upwind };

/// Face gradient of cell values: faces x all cells of the box (active ones only).
/// Rows follow the FaceLayout numbering, columns CellLayout(box, 0, nx).
linalg::SparseMatrix gradient_matrix(const FaceLayout& faces, const CellLayout& cells);

/// -Laplacian on velocity unknowns: homogeneous Dirichlet data on boundary
/// faces, mirrored ghosts beyond walls.
linalg::SparseMatrix vector_stiffness(const FaceLayout& faces);

/// Centered d/dx on velocity unknowns; missing neighbors read as zero, which
/// keeps the matrix skew-symmetric.
linalg::SparseMatrix vector_axial_derivative(const FaceLayout& faces);

/// Flux-form (div(vt (x) u)) advection on velocity unknowns. Skew-symmetric
/// in the centered scheme whenever `vt` is discretely divergence-free.
linalg::SparseMatrix vector_advection(const FaceLayout& faces, const VectorField& vt,
                                      AdvectionScheme scheme);

/// Largest cell Peclet number |vt_face| h / diffusivity over all faces.
double cell_peclet(const VectorField& vt, double diffusivity);

/// Scalar operator -c d/dx - Laplace + alpha div(v .) on the interior nodes
/// 1..nx-2 of `box` (axial Dirichlet nodes at both ends, lateral Neumann).
/// Contributions of the Dirichlet nodes are returned in `boundary_rhs` for
/// end values (left, right).
struct ScalarSystem {
  linalg::SparseMatrix matrix;
  Vec boundary_rhs;
};
ScalarSystem scalar_operator(const CellLayout& cells, double c, double alpha,
                             const VectorField* v, AdvectionScheme scheme, double left,
                             double right);

/// One-dimensional factors of the separable operators (full sections only).
namespace tridiag {
/// Nodes strictly between two Dirichlet nodes: -d2/dx2 * diff - c d/dx.
linalg::Tridiag dirichlet_nodes(int n, double h, double diff, double c);
/// Cell-centered with mirrored (-value) ghosts; c uses zero ghosts.
linalg::Tridiag dirichlet_cells(int n, double h, double diff, double c);
/// Cell-centered zero-flux: -d2/dx2 * diff - c d/dx with one-sided ends.
linalg::Tridiag neumann_cells(int n, double h, double diff, double c);
}  // namespace tridiag

}  // namespace bqwave::fields
