#include "bqwave/flow.hpp"

#include "bqwave/error.hpp"

#include <Eigen/SparseCholesky>

#include <cmath>
#include <memory>

namespace bqwave::flow {

using fields::Box;
using fields::CellLayout;
using fields::FaceLayout;
using linalg::SparseMatrix;
using linalg::Vec;

PecletPolicy parse_peclet_policy(const std::string& name) {
  if (name == "auto" || name == "automatic") return PecletPolicy::automatic;
  if (name == "centered") return PecletPolicy::centered;
  if (name == "upwind") return PecletPolicy::upwind;
  throw InvalidArgument("unknown Peclet policy '" + name + "' (expected auto | centered | upwind)");
}

std::string to_string(PecletPolicy p) {
  switch (p) {
    case PecletPolicy::automatic: return "auto";
    case PecletPolicy::centered: return "centered";
    case PecletPolicy::upwind: return "upwind";
  }
  return "auto";
}

double poiseuille_mean(const geometry::CrossSection& cs) {
  const int ny = cs.ny(), nz = cs.nz();
  std::vector<int> index(static_cast<std::size_t>(ny * nz), -1);
  int n = 0;
  for (int j = 0; j < ny; ++j)
    for (int k = 0; k < nz; ++k)
      if (cs.active(j, k)) index[static_cast<std::size_t>(j * nz + k)] = n++;
  const double iy = 1.0 / (cs.hy() * cs.hy()), iz = 1.0 / (cs.hz() * cs.hz());
  std::vector<Eigen::Triplet<double>> t;
  for (int j = 0; j < ny; ++j)
    for (int k = 0; k < nz; ++k) {
      const int row = index[static_cast<std::size_t>(j * nz + k)];
      if (row < 0) continue;
      double diag = 0.0;
      const int dj[4] = {-1, 1, 0, 0}, dk[4] = {0, 0, -1, 1};
      for (int q = 0; q < 4; ++q) {
        const double w = q < 2 ? iy : iz;
        if (cs.active(j + dj[q], k + dk[q])) {
          t.emplace_back(row, index[static_cast<std::size_t>((j + dj[q]) * nz + k + dk[q])], -w);
          diag += w;
        } else {
          diag += 2.0 * w;
        }
      }
      t.emplace_back(row, row, diag);
    }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw SolverError("flow", "Poiseuille factorization failed");
  const Eigen::VectorXd w = ldlt.solve(Eigen::VectorXd::Ones(n));
  return w.mean();
}

VectorField buoyancy_force(const ScalarField& t_ext, const geometry::Vec3& rho, double tau) {
  const Box& b = t_ext.box;
  FaceLayout faces(b);
  VectorField f(b);
  for (int i = 1; i < b.nx; ++i)
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k)
        if (faces.index(0, i, j, k) >= 0)
          f.U(i, j, k) = tau * rho[0] * 0.5 * (t_ext.at(i - 1, j, k) + t_ext.at(i, j, k));
  for (int i = 0; i < b.nx; ++i) {
    for (int j = 1; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k)
        if (faces.index(1, i, j, k) >= 0)
          f.V(i, j, k) = tau * rho[1] * 0.5 * (t_ext.at(i, j - 1, k) + t_ext.at(i, j, k));
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 1; k < b.nz(); ++k)
        if (faces.index(2, i, j, k) >= 0)
          f.W(i, j, k) = tau * rho[2] * 0.5 * (t_ext.at(i, j, k - 1) + t_ext.at(i, j, k));
  }
  return f;
}

namespace {

Vec section_means(const ScalarField& sf) {
  const Box& b = sf.box;
  const auto& cs = *b.cs;
  Vec mean = Vec::Zero(b.nx);
  for (int i = 0; i < b.nx; ++i) {
    double s = 0.0;
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k)
        if (cs.active(j, k)) s += sf.at(i, j, k);
    mean[i] = s / cs.active_count();
  }
  return mean;
}

}  // namespace

ScalarField potential_q(const ScalarField& t_ext, const geometry::Vec3& rho,
                        const geometry::Vec2& origin) {
  const Box& b = t_ext.box;
  const auto& cs = *b.cs;
  const Vec mean = section_means(t_ext);
  // Trapezoid primitive of the section mean, anchored at the node closest to x = 0.
  Vec prim = Vec::Zero(b.nx);
  for (int i = 1; i < b.nx; ++i) prim[i] = prim[i - 1] + 0.5 * b.hx * (mean[i - 1] + mean[i]);
  int i0 = static_cast<int>(std::lround(-b.x0 / b.hx));
  i0 = std::clamp(i0, 0, b.nx - 1);
  prim.array() -= prim[i0];
  ScalarField q(b);
  for (int i = 0; i < b.nx; ++i)
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k)
        if (cs.active(j, k))
          q.at(i, j, k) = rho[0] * prim[i] +
                          (rho[1] * (cs.y(j) - origin[0]) + rho[2] * (cs.z(k) - origin[1])) * mean[i];
  return q;
}

VectorField potential_remainder(const ScalarField& t_ext, const ScalarField& q,
                                const geometry::Vec3& rho) {
  fields::require_same(t_ext.box, q.box, "potential_remainder");
  const Box& b = t_ext.box;
  FaceLayout faces(b);
  CellLayout cells(b, 0, b.nx);
  const auto grad = fields::gradient_matrix(faces, cells);
  const Vec r = faces.gather(buoyancy_force(t_ext, rho)) - grad * cells.gather(q);
  VectorField out(b);
  faces.scatter(r, out);
  return out;
}

namespace {

// Block preconditioner for [A G; G^T 0]: upper triangular with an exact
// (separable) or incomplete momentum solve and a two-scale Schur approximation.
class SaddlePreconditioner {
 public:
  SaddlePreconditioner(const FaceLayout& faces, const CellLayout& cells, const SparseMatrix& grad,
                       const SparseMatrix& a0, double c, double nu)
      : faces_(faces), cells_(cells), grad_(grad), nu_(nu) {
    const Box& b = faces.box();
    namespace td = fields::tridiag;
    if (b.cs->full()) {
      const int nx = b.nx, ny = b.ny(), nz = b.nz();
      blocks_.emplace_back(std::make_unique<linalg::SeparableSolver>(
          td::dirichlet_nodes(nx - 1, b.hx, nu, c), td::dirichlet_cells(ny, b.hy(), nu, 0.0),
          td::dirichlet_cells(nz, b.hz(), nu, 0.0)));
      blocks_.emplace_back(std::make_unique<linalg::SeparableSolver>(
          td::dirichlet_cells(nx, b.hx, nu, c), td::dirichlet_nodes(ny - 1, b.hy(), nu, 0.0),
          td::dirichlet_cells(nz, b.hz(), nu, 0.0)));
      blocks_.emplace_back(std::make_unique<linalg::SeparableSolver>(
          td::dirichlet_cells(nx, b.hx, nu, c), td::dirichlet_cells(ny, b.hy(), nu, 0.0),
          td::dirichlet_nodes(nz - 1, b.hz(), nu, 0.0)));
    } else {
      ilu_ = std::make_unique<linalg::IluPreconditioner>(a0, 1e-5, 30);
    }
    const double k = poiseuille_mean(*b.cs);
    axial_scale_ = nu / k;
    linalg::Tridiag one{{0.0}, {0.0}, {0.0}};
    axial_ = std::make_unique<linalg::SeparableSolver>(td::neumann_cells(b.nx, b.hx, 1.0, 0.0),
                                                       one, one);
  }

  void momentum(const Vec& r, Vec& y) const {
    if (ilu_) {
      ilu_->as_op()(r, y);
      return;
    }
    y.resize(r.size());
    for (int comp = 0; comp < 3; ++comp) {
      const auto off = static_cast<Eigen::Index>(faces_.component_offset(comp));
      const auto len = static_cast<Eigen::Index>(faces_.component_size(comp));
      Vec out;
      blocks_[static_cast<std::size_t>(comp)]->solve(r.segment(off, len), out);
      y.segment(off, len) = out;
    }
  }

  void schur(const Vec& r, Vec& y) const {
    const Box& b = faces_.box();
    const auto slab = static_cast<Eigen::Index>(b.cs->active_count());
    // Full sections store cells contiguously per axial node.
    Vec mean(b.nx);
    for (int i = 0; i < b.nx; ++i) mean[i] = r.segment(i * slab, slab).mean();
    Vec axial;
    axial_->solve(mean, axial);
    y.resize(r.size());
    for (int i = 0; i < b.nx; ++i)
      y.segment(i * slab, slab) = nu_ * (r.segment(i * slab, slab).array() - mean[i]).matrix() +
                                  Vec::Constant(slab, axial_scale_ * axial[i]);
  }

  void apply(const Vec& r, Vec& y) const {
    const auto nu_faces = static_cast<Eigen::Index>(faces_.size());
    const auto np = static_cast<Eigen::Index>(cells_.size());
    Vec yp;
    schur(r.tail(np), yp);
    yp = -yp;
    Vec yu;
    momentum(r.head(nu_faces) - grad_ * yp, yu);
    y.resize(r.size());
    y.head(nu_faces) = yu;
    y.tail(np) = yp;
  }

 private:
  const FaceLayout& faces_;
  const CellLayout& cells_;
  const SparseMatrix& grad_;
  double nu_;
  double axial_scale_ = 1.0;
  std::vector<std::unique_ptr<linalg::SeparableSolver>> blocks_;
  std::unique_ptr<linalg::IluPreconditioner> ilu_;
  std::unique_ptr<linalg::SeparableSolver> axial_;
};

struct Assembly {
  SparseMatrix a;       // momentum operator
  SparseMatrix a0;      // without advection
  fields::AdvectionScheme scheme = fields::AdvectionScheme::centered;
  double peclet = 0.0;
  std::vector<std::string> warnings;
};

Assembly assemble(const FlowProblem& prob, const FaceLayout& faces) {
  Assembly as;
  const auto k = fields::vector_stiffness(faces);
  const auto dx = fields::vector_axial_derivative(faces);
  as.a0 = prob.nu * k - prob.c * dx;
  const double coupling = prob.tau * prob.d;
  if (coupling != 0.0 && prob.v_ext && prob.v_ext->max_abs() > 0.0) {
    fields::require_same(prob.v_ext->box, prob.box, "solve_flow");
    as.peclet = coupling * fields::cell_peclet(*prob.v_ext, prob.nu);
    bool upwind = prob.policy == PecletPolicy::upwind;
    if (as.peclet > 2.0) {
      if (prob.policy == PecletPolicy::automatic) {
        upwind = true;
        as.warnings.push_back("cell Peclet " + std::to_string(as.peclet) +
                              " > 2: first-order upwind advection used");
      } else if (prob.policy == PecletPolicy::centered) {
        as.warnings.push_back("cell Peclet " + std::to_string(as.peclet) +
                              " > 2 under centered differencing: advection dominance");
      }
    }
    as.scheme = upwind ? fields::AdvectionScheme::upwind : fields::AdvectionScheme::centered;
    as.a = as.a0 + coupling * fields::vector_advection(faces, *prob.v_ext, as.scheme);
  } else {
    as.a = as.a0;
  }
  return as;
}

void validate(const FlowProblem& prob) {
  if (!(prob.nu > 0.0)) throw InvalidArgument("solve_flow: nu must be positive");
  if (!(prob.tau >= 0.0 && prob.tau <= 1.0)) throw InvalidArgument("solve_flow: tau in [0, 1]");
  if (prob.d != 0 && prob.d != 1) throw InvalidArgument("solve_flow: d must be 0 or 1");
  if (!prob.t_ext) throw InvalidArgument("solve_flow: missing extended temperature");
  fields::require_same(prob.t_ext->box, prob.box, "solve_flow");
  if (prob.tau * prob.d != 0.0) {
    if (!prob.v_ext) throw InvalidArgument("solve_flow: missing extended velocity");
    if (!prob.v_ext->finite()) throw InvalidArgument("solve_flow: non-finite velocity");
  }
  if (prob.box.nx < 3) throw InvalidArgument("solve_flow: flow box too short");
}

}  // namespace

FlowSolution solve_flow(const FlowProblem& prob, const FlowOptions& opts) {
  validate(prob);
  const Box& b = prob.box;
  FaceLayout faces(b);
  CellLayout cells(b, 0, b.nx);
  FlowSolution sol{VectorField(b), ScalarField(b), {}};

  const Vec f = faces.gather(buoyancy_force(*prob.t_ext, prob.rho, prob.tau));
  auto as = assemble(prob, faces);
  sol.stats.peclet = as.peclet;
  sol.stats.scheme = as.scheme;
  sol.stats.warnings = as.warnings;
  if (f.cwiseAbs().maxCoeff() == 0.0) {
    sol.u.divergence_free = true;
    return sol;
  }

  const auto grad = fields::gradient_matrix(faces, cells);
  const SparseMatrix gradt = grad.transpose();
  const auto nf = static_cast<Eigen::Index>(faces.size());
  const auto np = static_cast<Eigen::Index>(cells.size());
  const SparseMatrix& a = as.a;
  linalg::LinearOp op = [&](const Vec& x, Vec& y) {
    y.resize(nf + np);
    y.head(nf).noalias() = a * x.head(nf);
    y.head(nf).noalias() += grad * x.tail(np);
    y.tail(np).noalias() = gradt * x.head(nf);
  };
  SaddlePreconditioner pre(faces, cells, grad, as.a0, prob.c, prob.nu);
  linalg::LinearOp pop = [&](const Vec& x, Vec& y) { pre.apply(x, y); };
  auto project = [&](Vec& x) { x.tail(np).array() -= x.tail(np).mean(); };

  Vec rhs = Vec::Zero(nf + np);
  rhs.head(nf) = f;
  Vec x = Vec::Zero(nf + np);
  if (prob.u_guess && prob.p_guess && prob.u_guess->box.same_as(b) && prob.p_guess->box.same_as(b)) {
    x.head(nf) = faces.gather(*prob.u_guess);
    x.tail(np) = cells.gather(*prob.p_guess);
  }
  linalg::KrylovOptions ko;
  ko.rel_tol = opts.rel_tol;
  ko.max_iterations = opts.max_iterations;
  ko.restart = opts.restart;
  const auto res = linalg::gmres(op, pop, rhs, x, ko, project);
  sol.stats.iterations = res.iterations;
  sol.stats.residual = res.residual / rhs.norm();
  sol.stats.history = res.history;
  if (!res.converged)
    throw SolverError("flow", "saddle-point GMRES stagnated (relative residual " +
                                  std::to_string(sol.stats.residual) + ")",
                      res.history);

  faces.scatter(x.head(nf), sol.u);
  cells.scatter(x.tail(np), sol.p);
  // Remove the last bit of divergence left by the Krylov tolerance.
  sol.u = fields::helmholtz_project(sol.u);
  const Vec u = faces.gather(sol.u);
  const Vec r = a * u + grad * x.tail(np) - f;
  sol.stats.momentum_residual = r.cwiseAbs().maxCoeff() / f.cwiseAbs().maxCoeff();
  sol.stats.divergence = fields::scaled_divergence(sol.u);
  return sol;
}

double flow_residual(const VectorField& u, const ScalarField& p, const FlowProblem& prob) {
  validate(prob);
  const Box& b = prob.box;
  fields::require_same(u.box, b, "flow_residual");
  fields::require_same(p.box, b, "flow_residual");
  FaceLayout faces(b);
  CellLayout cells(b, 0, b.nx);
  const auto as = assemble(prob, faces);
  const auto grad = fields::gradient_matrix(faces, cells);
  const Vec f = faces.gather(buoyancy_force(*prob.t_ext, prob.rho, prob.tau));
  const Vec r = as.a * faces.gather(u) + grad * cells.gather(p) - f;
  const double div = fields::divergence(u).values.cwiseAbs().maxCoeff();
  return (r.size() ? r.cwiseAbs().maxCoeff() : 0.0) + div;
}

}  // namespace bqwave::flow
