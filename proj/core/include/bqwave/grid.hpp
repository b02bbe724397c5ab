#pragma once

// Tensor grids on truncated cylinders [x0, x0 + (nx-1) hx] x section.
//
// Scalars live at nodes x_i = x0 + i hx crossed with the section's cell
// centers. Velocities use a staggered (MAC) layout: the x-component on
// faces x0 + (i - 1/2) hx, i = 0..nx, and the transverse components on the
// section's cell faces at the scalar nodes.

#include "bqwave/geometry.hpp"
#include "bqwave/linalg.hpp"

#include <memory>

namespace bqwave::fields {

using geometry::CrossSection;
using linalg::Vec;

struct Box {
  int nx = 0;
  double x0 = 0.0;
  double hx = 1.0;
  std::shared_ptr<const CrossSection> cs;

  int ny() const { return cs->ny(); }
  int nz() const { return cs->nz(); }
  double hy() const { return cs->hy(); }
  double hz() const { return cs->hz(); }
  double x(int i) const { return x0 + i * hx; }
  double cell_volume() const { return hx * hy() * hz(); }

  std::size_t cells() const { return static_cast<std::size_t>(nx) * ny() * nz(); }
  std::size_t cell(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * ny() + j) * nz() + k;
  }
  // Face storage of the three velocity components.
  std::size_t u_size() const { return static_cast<std::size_t>(nx + 1) * ny() * nz(); }
  std::size_t v_size() const { return static_cast<std::size_t>(nx) * (ny() + 1) * nz(); }
  std::size_t w_size() const { return static_cast<std::size_t>(nx) * ny() * (nz() + 1); }
  std::size_t u_face(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * ny() + j) * nz() + k;
  }
  std::size_t v_face(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * (ny() + 1) + j) * nz() + k;
  }
  std::size_t w_face(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * ny() + j) * (nz() + 1) + k;
  }

  bool same_as(const Box& o) const;
};

/// Throws InvalidArgument unless both boxes describe the same grid.
void require_same(const Box& a, const Box& b, const char* what);

/// Temperature domain R_a = [-a, a] and the truncated flow domain [-A, A].
///
/// The axial spacing is a / N; the flow box holds 2N + 1 + 2m nodes so that
/// node m + j of the flow box coincides with node j of R_a.
class AxialGrid {
 public:
  AxialGrid() = default;
  /// `margin` is the requested A - a (at least 1).
  AxialGrid(double a, int half_cells, double margin, std::shared_ptr<const CrossSection> cs);

  double a() const { return a_; }
  double A() const { return A_; }
  double hx() const { return hx_; }
  int half_cells() const { return n_; }
  int offset() const { return m_; }
  const std::shared_ptr<const CrossSection>& section() const { return cs_; }

  Box temperature_box() const { return {2 * n_ + 1, -a_, hx_, cs_}; }
  Box flow_box() const { return {2 * n_ + 1 + 2 * m_, -a_ - m_ * hx_, hx_, cs_}; }

 private:
  double a_ = 1.0, A_ = 2.0, hx_ = 0.5;
  int n_ = 2, m_ = 2;
  std::shared_ptr<const CrossSection> cs_;
};

struct ScalarField {
  Box box;
  Vec values;

  ScalarField() = default;
  explicit ScalarField(Box b, double fill = 0.0);

  double& at(int i, int j, int k) { return values[static_cast<Eigen::Index>(box.cell(i, j, k))]; }
  double at(int i, int j, int k) const {
    return values[static_cast<Eigen::Index>(box.cell(i, j, k))];
  }
  bool finite() const { return values.allFinite(); }
  /// Zeroes the entries of inactive section cells.
  void apply_mask();
};

struct VectorField {
  Box box;
  Vec u, v, w;
  bool divergence_free = false;

  VectorField() = default;
  explicit VectorField(Box b);

  double& U(int i, int j, int k) { return u[static_cast<Eigen::Index>(box.u_face(i, j, k))]; }
  double& V(int i, int j, int k) { return v[static_cast<Eigen::Index>(box.v_face(i, j, k))]; }
  double& W(int i, int j, int k) { return w[static_cast<Eigen::Index>(box.w_face(i, j, k))]; }
  double U(int i, int j, int k) const { return u[static_cast<Eigen::Index>(box.u_face(i, j, k))]; }
  double V(int i, int j, int k) const { return v[static_cast<Eigen::Index>(box.v_face(i, j, k))]; }
  double W(int i, int j, int k) const { return w[static_cast<Eigen::Index>(box.w_face(i, j, k))]; }

  double max_abs() const;
  /// sqrt(sum_i ||u^i||_inf^2)
  double sup_norm() const;
  bool finite() const { return u.allFinite() && v.allFinite() && w.allFinite(); }
};

/// Restriction of nodes [offset, offset + nx) of `sf` onto `target`.
ScalarField restrict_to(const ScalarField& sf, const Box& target, int offset);
/// Restriction of a flow field to a sub-box; the outer x-faces of the sub-box are kept.
VectorField restrict_to(const VectorField& vf, const Box& target, int offset);

/// Classification of a velocity face for operator assembly.
enum class FaceKind { unknown, boundary, outside };

/// Numbering of the velocity unknowns (faces strictly inside the domain).
/// Boundary faces carry homogeneous Dirichlet data; `outside` faces lie beyond
/// a wall and are mirrored (ghost = -value) by tangential stencils.
class FaceLayout {
 public:
  explicit FaceLayout(const Box& box);

  const Box& box() const { return box_; }
  std::size_t size() const { return n_; }
  std::size_t component_offset(int comp) const { return offset_[comp]; }
  std::size_t component_size(int comp) const { return offset_[comp + 1] - offset_[comp]; }

  /// comp: 0 = x-faces, 1 = y-faces, 2 = z-faces. Indices may lie out of range.
  FaceKind kind(int comp, int i, int j, int k) const;
  /// Unknown index, or -1.
  long index(int comp, int i, int j, int k) const;

  Vec gather(const VectorField& vf) const;
  /// Writes unknowns into `vf` and zeroes every other face.
  void scatter(const Vec& x, VectorField& vf) const;

 private:
  std::size_t storage(int comp, int i, int j, int k) const;

  Box box_;
  std::vector<long> map_[3];
  std::size_t offset_[4] = {0, 0, 0, 0};
  std::size_t n_ = 0;
};

/// Numbering of active cells with nodes i in [i0, i1).
class CellLayout {
 public:
  CellLayout(const Box& box, int i0, int i1);

  const Box& box() const { return box_; }
  std::size_t size() const { return cells_.size(); }
  long index(int i, int j, int k) const;
  std::size_t storage(std::size_t unknown) const { return cells_[unknown]; }
  int i0() const { return i0_; }
  int i1() const { return i1_; }

  Vec gather(const ScalarField& sf) const;
  void scatter(const Vec& x, ScalarField& sf) const;

 private:
  Box box_;
  int i0_, i1_;
  std::vector<long> map_;
  std::vector<std::size_t> cells_;
};

}  // namespace bqwave::fields
