#include "bqwave/operators.hpp"

#include "bqwave/error.hpp"

#include <cmath>

namespace bqwave::fields {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct Offset {
  int di, dj, dk;
};
constexpr Offset kDirs[6] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};

double spacing(const Box& b, int dir) { return dir == 0 ? b.hx : (dir == 1 ? b.hy() : b.hz()); }

linalg::SparseMatrix finish(std::size_t rows, std::size_t cols, Triplets& t) {
  linalg::SparseMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

template <class F>
void for_each_unknown(const FaceLayout& faces, F&& f) {
  const Box& b = faces.box();
  for (int comp = 0; comp < 3; ++comp) {
    const int ni = b.nx + (comp == 0), nj = b.ny() + (comp == 1), nk = b.nz() + (comp == 2);
    for (int i = 0; i < ni; ++i)
      for (int j = 0; j < nj; ++j)
        for (int k = 0; k < nk; ++k) {
          const long row = faces.index(comp, i, j, k);
          if (row >= 0) f(comp, i, j, k, row);
        }
  }
}

double face_value(const VectorField& vf, int comp, int i, int j, int k) {
  switch (comp) {
    case 0: return vf.U(i, j, k);
    case 1: return vf.V(i, j, k);
    default: return vf.W(i, j, k);
  }
}

// Advecting normal velocity through the control-volume face of a `comp` face
// at (i, j, k) in direction `dir`, side s = -1 / +1 (outward sign included).
double cv_flux(const VectorField& vt, int comp, int dir, int s, int i, int j, int k) {
  if (dir == comp) {
    // CV face at the adjacent cell center: average of the two collinear faces.
    const int o = s > 0 ? 1 : -1;
    int i2 = i, j2 = j, k2 = k;
    (dir == 0 ? i2 : dir == 1 ? j2 : k2) += o;
    return s * 0.5 * (face_value(vt, dir, i, j, k) + face_value(vt, dir, i2, j2, k2));
  }
  // CV face on an edge: average of the two `dir` faces straddling the edge.
  int i1 = i, j1 = j, k1 = k;
  if (s > 0) (dir == 0 ? i1 : dir == 1 ? j1 : k1) += 1;
  int i0 = i1, j0 = j1, k0 = k1;
  (comp == 0 ? i0 : comp == 1 ? j0 : k0) -= 1;
  return s * 0.5 * (face_value(vt, dir, i0, j0, k0) + face_value(vt, dir, i1, j1, k1));
}

}  // namespace

linalg::SparseMatrix gradient_matrix(const FaceLayout& faces, const CellLayout& cells) {
  const Box& b = faces.box();
  Triplets t;
  t.reserve(2 * faces.size());
  for_each_unknown(faces, [&](int comp, int i, int j, int k, long row) {
    const double h = spacing(b, comp);
    int i0 = i, j0 = j, k0 = k;
    (comp == 0 ? i0 : comp == 1 ? j0 : k0) -= 1;
    t.emplace_back(row, cells.index(i, j, k), 1.0 / h);
    t.emplace_back(row, cells.index(i0, j0, k0), -1.0 / h);
  });
  return finish(faces.size(), cells.size(), t);
}

linalg::SparseMatrix vector_stiffness(const FaceLayout& faces) {
  const Box& b = faces.box();
  Triplets t;
  t.reserve(7 * faces.size());
  for_each_unknown(faces, [&](int comp, int i, int j, int k, long row) {
    double diag = 0.0;
    for (int d = 0; d < 6; ++d) {
      const auto& o = kDirs[d];
      const double h = spacing(b, d / 2);
      const double w = 1.0 / (h * h);
      const int ii = i + o.di, jj = j + o.dj, kk = k + o.dk;
      switch (faces.kind(comp, ii, jj, kk)) {
        case FaceKind::unknown:
          t.emplace_back(row, faces.index(comp, ii, jj, kk), -w);
          diag += w;
          break;
        case FaceKind::boundary:
          diag += w;
          break;
        case FaceKind::outside:
          diag += 2.0 * w;
          break;
      }
    }
    t.emplace_back(row, row, diag);
  });
  return finish(faces.size(), faces.size(), t);
}

linalg::SparseMatrix vector_axial_derivative(const FaceLayout& faces) {
  const double h = faces.box().hx;
  Triplets t;
  t.reserve(2 * faces.size());
  for_each_unknown(faces, [&](int comp, int i, int j, int k, long row) {
    const long lo = faces.index(comp, i - 1, j, k), hi = faces.index(comp, i + 1, j, k);
    if (lo >= 0) t.emplace_back(row, lo, -0.5 / h);
    if (hi >= 0) t.emplace_back(row, hi, 0.5 / h);
  });
  return finish(faces.size(), faces.size(), t);
}

linalg::SparseMatrix vector_advection(const FaceLayout& faces, const VectorField& vt,
                                      AdvectionScheme scheme) {
  const Box& b = faces.box();
  require_same(vt.box, b, "vector_advection");
  Triplets t;
  t.reserve(7 * faces.size());
  for_each_unknown(faces, [&](int comp, int i, int j, int k, long row) {
    double diag = 0.0;
    for (int d = 0; d < 6; ++d) {
      const auto& o = kDirs[d];
      const int dir = d / 2, s = (d % 2) ? 1 : -1;
      const double f = cv_flux(vt, comp, dir, s, i, j, k) / spacing(b, dir);
      const long nb = faces.index(comp, i + o.di, j + o.dj, k + o.dk);
      if (scheme == AdvectionScheme::centered) {
        diag += 0.5 * f;
        if (nb >= 0) t.emplace_back(row, nb, 0.5 * f);
      } else if (f > 0.0) {
        diag += f;
      } else if (nb >= 0) {
        t.emplace_back(row, nb, f);
      }
    }
    t.emplace_back(row, row, diag);
  });
  return finish(faces.size(), faces.size(), t);
}

double cell_peclet(const VectorField& vt, double diffusivity) {
  const Box& b = vt.box;
  const double pu = vt.u.size() ? vt.u.cwiseAbs().maxCoeff() * b.hx : 0.0;
  const double pv = vt.v.size() ? vt.v.cwiseAbs().maxCoeff() * b.hy() : 0.0;
  const double pw = vt.w.size() ? vt.w.cwiseAbs().maxCoeff() * b.hz() : 0.0;
  return std::max({pu, pv, pw}) / diffusivity;
}

ScalarSystem scalar_operator(const CellLayout& cells, double c, double alpha,
                             const VectorField* v, AdvectionScheme scheme, double left,
                             double right) {
  const Box& b = cells.box();
  if (alpha != 0.0) {
    if (v == nullptr) throw InvalidArgument("scalar_operator: missing velocity");
    require_same(v->box, b, "scalar_operator");
  }
  const bool advect = alpha != 0.0;
  ScalarSystem out;
  out.boundary_rhs = Vec::Zero(static_cast<Eigen::Index>(cells.size()));
  Triplets t;
  t.reserve(7 * cells.size());
  const auto& cs = *b.cs;
  for (int i = cells.i0(); i < cells.i1(); ++i)
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k) {
        const long row = cells.index(i, j, k);
        if (row < 0) continue;
        double diag = 0.0;
        for (int d = 0; d < 6; ++d) {
          const auto& o = kDirs[d];
          const int dir = d / 2, s = (d % 2) ? 1 : -1;
          const int ii = i + o.di, jj = j + o.dj, kk = k + o.dk;
          const double h = spacing(b, dir);
          if (dir > 0 && !cs.active(jj, kk)) continue;  // zero flux through the wall
          double coef = -1.0 / (h * h);
          diag += 1.0 / (h * h);
          if (dir == 0) coef -= s * 0.5 * c / h;
          if (advect) {
            double f = 0.0;
            if (dir == 0) f = s * v->U(s > 0 ? i + 1 : i, j, k);
            else if (dir == 1) f = s * v->V(i, s > 0 ? j + 1 : j, k);
            else f = s * v->W(i, j, s > 0 ? k + 1 : k);
            f *= alpha / h;
            if (scheme == AdvectionScheme::centered) {
              diag += 0.5 * f;
              coef += 0.5 * f;
            } else if (f > 0.0) {
              diag += f;
            } else {
              coef += f;
            }
          }
          const long col = cells.index(ii, jj, kk);
          if (col >= 0) {
            t.emplace_back(row, col, coef);
          } else if (dir == 0) {
            const double value = ii < cells.i0() ? left : right;
            out.boundary_rhs[row] -= coef * value;
          }
        }
        t.emplace_back(row, row, diag);
      }
  out.matrix = finish(cells.size(), cells.size(), t);
  return out;
}

namespace tridiag {

linalg::Tridiag dirichlet_nodes(int n, double h, double diff, double c) {
  linalg::Tridiag t;
  t.diag.assign(n, 2.0 * diff / (h * h));
  t.sub.assign(n, -diff / (h * h) + 0.5 * c / h);
  t.sup.assign(n, -diff / (h * h) - 0.5 * c / h);
  return t;
}

linalg::Tridiag dirichlet_cells(int n, double h, double diff, double c) {
  auto t = dirichlet_nodes(n, h, diff, c);
  t.diag.front() += diff / (h * h);
  t.diag.back() += diff / (h * h);
  return t;
}

linalg::Tridiag neumann_cells(int n, double h, double diff, double c) {
  auto t = dirichlet_nodes(n, h, diff, c);
  t.diag.front() -= diff / (h * h);
  t.diag.back() -= diff / (h * h);
  return t;
}

}  // namespace tridiag

}  // namespace bqwave::fields
