#include "bqwave/grid.hpp"

#include "bqwave/error.hpp"

#include <cmath>

namespace bqwave::fields {

bool Box::same_as(const Box& o) const {
  return nx == o.nx && cs == o.cs && std::abs(x0 - o.x0) <= 1e-12 * (1.0 + std::abs(x0)) &&
         std::abs(hx - o.hx) <= 1e-14 * hx;
}

void require_same(const Box& a, const Box& b, const char* what) {
  if (!a.same_as(b)) throw InvalidArgument(std::string(what) + ": grid mismatch");
}

AxialGrid::AxialGrid(double a, int half_cells, double margin,
                     std::shared_ptr<const CrossSection> cs)
    : a_(a), n_(half_cells), cs_(std::move(cs)) {
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("a must be positive");
  if (half_cells < 2) throw InvalidArgument("need at least 2 axial cells per half of R_a");
  if (!cs_) throw InvalidArgument("missing cross-section");
  if (!(margin >= 1.0)) throw InvalidArgument("flow margin A - a must be at least 1");
  hx_ = a / half_cells;
  m_ = std::max(1, static_cast<int>(std::ceil(margin / hx_ - 0.5)));
  A_ = a_ + (m_ + 0.5) * hx_;
}

ScalarField::ScalarField(Box b, double fill)
    : box(std::move(b)), values(Vec::Constant(static_cast<Eigen::Index>(box.cells()), fill)) {
  apply_mask();
}

void ScalarField::apply_mask() {
  if (box.cs->full()) return;
  for (int i = 0; i < box.nx; ++i)
    for (int j = 0; j < box.ny(); ++j)
      for (int k = 0; k < box.nz(); ++k)
        if (!box.cs->active(j, k)) at(i, j, k) = 0.0;
}

VectorField::VectorField(Box b)
    : box(std::move(b)),
      u(Vec::Zero(static_cast<Eigen::Index>(box.u_size()))),
      v(Vec::Zero(static_cast<Eigen::Index>(box.v_size()))),
      w(Vec::Zero(static_cast<Eigen::Index>(box.w_size()))) {}

double VectorField::max_abs() const {
  double m = 0.0;
  if (u.size()) m = std::max(m, u.cwiseAbs().maxCoeff());
  if (v.size()) m = std::max(m, v.cwiseAbs().maxCoeff());
  if (w.size()) m = std::max(m, w.cwiseAbs().maxCoeff());
  return m;
}

double VectorField::sup_norm() const {
  const double a = u.size() ? u.cwiseAbs().maxCoeff() : 0.0;
  const double b = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  const double c = w.size() ? w.cwiseAbs().maxCoeff() : 0.0;
  return std::sqrt(a * a + b * b + c * c);
}

ScalarField restrict_to(const ScalarField& sf, const Box& target, int offset) {
  if (offset < 0 || offset + target.nx > sf.box.nx || target.cs != sf.box.cs)
    throw InvalidArgument("restrict_to: target does not fit");
  ScalarField out(target);
  const std::size_t slab = static_cast<std::size_t>(target.ny()) * target.nz();
  for (int i = 0; i < target.nx; ++i)
    for (std::size_t q = 0; q < slab; ++q)
      out.values[static_cast<Eigen::Index>(i * slab + q)] =
          sf.values[static_cast<Eigen::Index>((i + offset) * slab + q)];
  return out;
}

VectorField restrict_to(const VectorField& vf, const Box& target, int offset) {
  if (offset < 0 || offset + target.nx > vf.box.nx || target.cs != vf.box.cs)
    throw InvalidArgument("restrict_to: target does not fit");
  VectorField out(target);
  const Eigen::Index su = target.ny() * target.nz();
  const Eigen::Index sv = (target.ny() + 1) * target.nz();
  const Eigen::Index sw = target.ny() * (target.nz() + 1);
  out.u = vf.u.segment(offset * su, (target.nx + 1) * su);
  out.v = vf.v.segment(offset * sv, target.nx * sv);
  out.w = vf.w.segment(offset * sw, target.nx * sw);
  out.divergence_free = vf.divergence_free;
  return out;
}

FaceLayout::FaceLayout(const Box& box) : box_(box) {
  const auto& cs = *box.cs;
  const int nx = box.nx, ny = box.ny(), nz = box.nz();
  map_[0].assign(box.u_size(), -1);
  map_[1].assign(box.v_size(), -1);
  map_[2].assign(box.w_size(), -1);
  long n = 0;
  for (int i = 1; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 0; k < nz; ++k)
        if (cs.active(j, k)) map_[0][box.u_face(i, j, k)] = n++;
  offset_[1] = static_cast<std::size_t>(n);
  for (int i = 0; i < nx; ++i)
    for (int j = 1; j < ny; ++j)
      for (int k = 0; k < nz; ++k)
        if (cs.active(j - 1, k) && cs.active(j, k)) map_[1][box.v_face(i, j, k)] = n++;
  offset_[2] = static_cast<std::size_t>(n);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      for (int k = 1; k < nz; ++k)
        if (cs.active(j, k - 1) && cs.active(j, k)) map_[2][box.w_face(i, j, k)] = n++;
  offset_[3] = static_cast<std::size_t>(n);
  n_ = static_cast<std::size_t>(n);
}

FaceKind FaceLayout::kind(int comp, int i, int j, int k) const {
  const auto& cs = *box_.cs;
  const int nx = box_.nx, ny = box_.ny(), nz = box_.nz();
  switch (comp) {
    case 0:
      if (i < 0 || i > nx || !cs.active(j, k)) return FaceKind::outside;
      return (i == 0 || i == nx) ? FaceKind::boundary : FaceKind::unknown;
    case 1: {
      if (i < 0 || i >= nx || k < 0 || k >= nz || j < 0 || j > ny) return FaceKind::outside;
      const bool lo = cs.active(j - 1, k), hi = cs.active(j, k);
      if (lo && hi) return FaceKind::unknown;
      return (lo || hi) ? FaceKind::boundary : FaceKind::outside;
    }
    default: {
      if (i < 0 || i >= nx || j < 0 || j >= ny || k < 0 || k > nz) return FaceKind::outside;
      const bool lo = cs.active(j, k - 1), hi = cs.active(j, k);
      if (lo && hi) return FaceKind::unknown;
      return (lo || hi) ? FaceKind::boundary : FaceKind::outside;
    }
  }
}

std::size_t FaceLayout::storage(int comp, int i, int j, int k) const {
  switch (comp) {
    case 0: return box_.u_face(i, j, k);
    case 1: return box_.v_face(i, j, k);
    default: return box_.w_face(i, j, k);
  }
}

long FaceLayout::index(int comp, int i, int j, int k) const {
  if (kind(comp, i, j, k) != FaceKind::unknown) return -1;
  return map_[comp][storage(comp, i, j, k)];
}

Vec FaceLayout::gather(const VectorField& vf) const {
  require_same(vf.box, box_, "FaceLayout::gather");
  Vec x(static_cast<Eigen::Index>(n_));
  const Vec* comps[3] = {&vf.u, &vf.v, &vf.w};
  for (int c = 0; c < 3; ++c)
    for (std::size_t s = 0; s < map_[c].size(); ++s)
      if (map_[c][s] >= 0) x[map_[c][s]] = (*comps[c])[static_cast<Eigen::Index>(s)];
  return x;
}

void FaceLayout::scatter(const Vec& x, VectorField& vf) const {
  if (!vf.box.same_as(box_)) vf = VectorField(box_);
  Vec* comps[3] = {&vf.u, &vf.v, &vf.w};
  for (int c = 0; c < 3; ++c)
    for (std::size_t s = 0; s < map_[c].size(); ++s)
      (*comps[c])[static_cast<Eigen::Index>(s)] = map_[c][s] >= 0 ? x[map_[c][s]] : 0.0;
}

CellLayout::CellLayout(const Box& box, int i0, int i1) : box_(box), i0_(i0), i1_(i1) {
  if (i0 < 0 || i1 > box.nx || i0 >= i1) throw InvalidArgument("CellLayout: bad node range");
  map_.assign(box.cells(), -1);
  for (int i = i0; i < i1; ++i)
    for (int j = 0; j < box.ny(); ++j)
      for (int k = 0; k < box.nz(); ++k)
        if (box.cs->active(j, k)) {
          map_[box.cell(i, j, k)] = static_cast<long>(cells_.size());
          cells_.push_back(box.cell(i, j, k));
        }
}

long CellLayout::index(int i, int j, int k) const {
  if (i < 0 || i >= box_.nx || j < 0 || j >= box_.ny() || k < 0 || k >= box_.nz()) return -1;
  return map_[box_.cell(i, j, k)];
}

Vec CellLayout::gather(const ScalarField& sf) const {
  Vec x(static_cast<Eigen::Index>(cells_.size()));
  for (std::size_t q = 0; q < cells_.size(); ++q)
    x[static_cast<Eigen::Index>(q)] = sf.values[static_cast<Eigen::Index>(cells_[q])];
  return x;
}

void CellLayout::scatter(const Vec& x, ScalarField& sf) const {
  for (std::size_t q = 0; q < cells_.size(); ++q)
    sf.values[static_cast<Eigen::Index>(cells_[q])] = x[static_cast<Eigen::Index>(q)];
}

}  // namespace bqwave::fields
