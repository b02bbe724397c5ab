#include "bqwave/linalg.hpp"

#include "bqwave/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace bqwave::linalg {

KrylovResult gmres(const LinearOp& op, const LinearOp& precond, const Vec& b, Vec& x,
                   const KrylovOptions& opts, const std::function<void(Vec&)>& project) {
  const Eigen::Index n = b.size();
  if (x.size() != n) x = Vec::Zero(n);
  KrylovResult res;

  const double bnorm = b.norm();
  const double target = std::max(opts.rel_tol * bnorm, opts.abs_tol);
  const int m = std::max(1, opts.restart);

  Vec r(n), w(n), tmp(n);
  op(x, tmp);
  r = b - tmp;
  if (project) project(r);
  double beta = r.norm();
  res.initial_residual = beta;
  res.history.push_back(beta);
  if (beta <= target || bnorm == 0.0) {
    res.converged = true;
    res.residual = beta;
    if (bnorm == 0.0) x.setZero();
    return res;
  }

  std::vector<Vec> basis(m + 1, Vec(n)), zbasis(m, Vec(n));
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd cs(m), sn(m), g(m + 1);

  int total = 0;
  while (total < opts.max_iterations) {
    basis[0] = r / beta;
    g.setZero();
    g(0) = beta;
    int j = 0;
    bool estimate_met = false;
    for (; j < m && total < opts.max_iterations; ++j, ++total) {
      if (precond) {
        precond(basis[j], zbasis[j]);
      } else {
        zbasis[j] = basis[j];
      }
      if (project) project(zbasis[j]);
      op(zbasis[j], w);
      if (project) project(w);
      for (int i = 0; i <= j; ++i) {
        h(i, j) = basis[i].dot(w);
        w.noalias() -= h(i, j) * basis[i];
      }
      h(j + 1, j) = w.norm();
      if (h(j + 1, j) > 0.0) basis[j + 1] = w / h(j + 1, j);
      for (int i = 0; i < j; ++i) {
        const double t = cs(i) * h(i, j) + sn(i) * h(i + 1, j);
        h(i + 1, j) = -sn(i) * h(i, j) + cs(i) * h(i + 1, j);
        h(i, j) = t;
      }
      const double denom = std::hypot(h(j, j), h(j + 1, j));
      cs(j) = denom > 0.0 ? h(j, j) / denom : 1.0;
      sn(j) = denom > 0.0 ? h(j + 1, j) / denom : 0.0;
      h(j, j) = denom;
      h(j + 1, j) = 0.0;
      g(j + 1) = -sn(j) * g(j);
      g(j) = cs(j) * g(j);
      res.history.push_back(std::abs(g(j + 1)));
      if (std::abs(g(j + 1)) <= 0.5 * target || denom == 0.0) {
        estimate_met = true;
        ++j;
        ++total;
        break;
      }
    }
    // Back substitution for the least-squares coefficients.
    Eigen::VectorXd y = h.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    for (int i = 0; i < j; ++i) x.noalias() += y(i) * zbasis[i];

    op(x, tmp);
    r = b - tmp;
    if (project) project(r);
    const double previous = beta;
    beta = r.norm();
    res.residual = beta;
    if (beta <= target) {
      res.converged = true;
      break;
    }
    // rounding floor: a full cycle that barely moves the true residual
    if (estimate_met && beta > 0.5 * previous) {
      res.stagnated = true;
      break;
    }
  }
  res.iterations = total;
  res.residual = beta;
  return res;
}

double backward_error(const SparseMatrix& a, const Vec& x, const Vec& b, double residual_norm) {
  double anorm = 0.0;
  for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) row += std::abs(it.value());
    anorm = std::max(anorm, row);
  }
  const double scale = anorm * x.norm() + b.norm();
  return scale > 0.0 ? residual_norm / scale : 0.0;
}

void solve_tridiagonal(const std::vector<double>& sub, const std::vector<double>& diag,
                       const std::vector<double>& sup, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  if (n == 0) return;
  std::vector<double> c(n);
  double piv = diag[0];
  if (piv == 0.0) throw SolverError("tridiagonal", "zero pivot");
  c[0] = n > 1 ? sup[0] / piv : 0.0;
  rhs[0] /= piv;
  for (std::size_t i = 1; i < n; ++i) {
    piv = diag[i] - sub[i] * c[i - 1];
    if (piv == 0.0) throw SolverError("tridiagonal", "zero pivot");
    c[i] = i + 1 < n ? sup[i] / piv : 0.0;
    rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / piv;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

Eigen::MatrixXd Tridiag::dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = diag[i];
    if (i > 0) m(i, i - 1) = sub[i];
    if (i + 1 < n) m(i, i + 1) = sup[i];
  }
  return m;
}

bool Tridiag::symmetric(double tol) const {
  for (std::size_t i = 1; i < size(); ++i) {
    const double s = std::max({std::abs(sub[i]), std::abs(sup[i - 1]), 1.0});
    if (std::abs(sub[i] - sup[i - 1]) > tol * s) return false;
  }
  return true;
}

namespace {

void eig_symmetric(const Tridiag& t, Eigen::MatrixXd& q, Eigen::VectorXd& lambda) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.dense());
  if (es.info() != Eigen::Success) throw SolverError("separable", "transverse eigensolver failed");
  q = es.eigenvectors();
  lambda = es.eigenvalues();
}

}  // namespace

SeparableSolver::SeparableSolver(const Tridiag& tx, const Tridiag& ty, const Tridiag& tz)
    : nx_(tx.size()), ny_(ty.size()), nz_(tz.size()) {
  if (nx_ == 0 || ny_ == 0 || nz_ == 0) throw InvalidArgument("SeparableSolver: empty operator");
  if (!ty.symmetric() || !tz.symmetric())
    throw InvalidArgument("SeparableSolver: transverse operators must be symmetric");
  eig_symmetric(ty, qy_, ly_);
  eig_symmetric(tz, qz_, lz_);

  const double scale = std::max({ly_.cwiseAbs().maxCoeff(), lz_.cwiseAbs().maxCoeff(),
                                 tx.dense().cwiseAbs().maxCoeff(), 1e-300});
  const std::size_t modes = ny_ * nz_;
  if (tx.symmetric()) {
    axial_diag_ = true;
    eig_symmetric(tx, qx_, lx_);
    for (Eigen::Index i = 0; i < lx_.size(); ++i)
      for (std::size_t j = 0; j < ny_; ++j)
        for (std::size_t k = 0; k < nz_; ++k)
          if (std::abs(lx_(i) + ly_(j) + lz_(k)) < 1e-11 * scale) singular_ = true;
    return;
  }

  cprime_.assign(nx_ * modes, 0.0);
  inv_pivot_.assign(nx_ * modes, 0.0);
  sub_ = tx.sub;
  for (std::size_t j = 0; j < ny_; ++j) {
    for (std::size_t k = 0; k < nz_; ++k) {
      const std::size_t mode = j * nz_ + k;
      const double shift = ly_(j) + lz_(k);
      double prev_c = 0.0;
      for (std::size_t i = 0; i < nx_; ++i) {
        const double piv = tx.diag[i] + shift - (i > 0 ? tx.sub[i] * prev_c : 0.0);
        if (std::abs(piv) < 1e-14 * scale) throw SolverError("separable", "singular axial mode");
        const double ip = 1.0 / piv;
        inv_pivot_[i * modes + mode] = ip;
        prev_c = i + 1 < nx_ ? tx.sup[i] * ip : 0.0;
        cprime_[i * modes + mode] = prev_c;
      }
    }
  }
}

void SeparableSolver::to_modes(Vec& data) const {
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<RowMat> all(data.data(), static_cast<Eigen::Index>(nx_ * ny_),
                         static_cast<Eigen::Index>(nz_));
  all = (all * qz_).eval();
  for (std::size_t i = 0; i < nx_; ++i) {
    Eigen::Map<RowMat> slab(data.data() + i * ny_ * nz_, static_cast<Eigen::Index>(ny_),
                            static_cast<Eigen::Index>(nz_));
    slab = (qy_.transpose() * slab).eval();
  }
}

void SeparableSolver::from_modes(Vec& data) const {
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  for (std::size_t i = 0; i < nx_; ++i) {
    Eigen::Map<RowMat> slab(data.data() + i * ny_ * nz_, static_cast<Eigen::Index>(ny_),
                            static_cast<Eigen::Index>(nz_));
    slab = (qy_ * slab).eval();
  }
  Eigen::Map<RowMat> all(data.data(), static_cast<Eigen::Index>(nx_ * ny_),
                         static_cast<Eigen::Index>(nz_));
  all = (all * qz_.transpose()).eval();
}

void SeparableSolver::solve(const Vec& rhs, Vec& out) const {
  if (static_cast<std::size_t>(rhs.size()) != size())
    throw InvalidArgument("SeparableSolver: size mismatch");
  out = rhs;
  to_modes(out);
  const std::size_t modes = ny_ * nz_;
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<RowMat> m(out.data(), static_cast<Eigen::Index>(nx_),
                       static_cast<Eigen::Index>(modes));
  if (axial_diag_) {
    m = (qx_.transpose() * m).eval();
    const double scale = std::max({lx_.cwiseAbs().maxCoeff(), ly_.cwiseAbs().maxCoeff(),
                                   lz_.cwiseAbs().maxCoeff(), 1e-300});
    for (std::size_t i = 0; i < nx_; ++i)
      for (std::size_t j = 0; j < ny_; ++j)
        for (std::size_t k = 0; k < nz_; ++k) {
          const double lam = lx_(static_cast<Eigen::Index>(i)) + ly_(static_cast<Eigen::Index>(j)) +
                             lz_(static_cast<Eigen::Index>(k));
          double& v = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j * nz_ + k));
          v = std::abs(lam) < 1e-11 * scale ? 0.0 : v / lam;
        }
    m = (qx_ * m).eval();
  } else {
    double* d = out.data();
    for (std::size_t q = 0; q < modes; ++q) d[q] *= inv_pivot_[q];
    for (std::size_t i = 1; i < nx_; ++i) {
      const double s = sub_[i];
      double* cur = d + i * modes;
      const double* prev = d + (i - 1) * modes;
      const double* ip = inv_pivot_.data() + i * modes;
      for (std::size_t q = 0; q < modes; ++q) cur[q] = (cur[q] - s * prev[q]) * ip[q];
    }
    for (std::size_t i = nx_ - 1; i-- > 0;) {
      double* cur = d + i * modes;
      const double* next = d + (i + 1) * modes;
      const double* cp = cprime_.data() + i * modes;
      for (std::size_t q = 0; q < modes; ++q) cur[q] -= cp[q] * next[q];
    }
  }
  from_modes(out);
}

LinearOp SeparableSolver::as_op() const {
  return [this](const Vec& x, Vec& y) { solve(x, y); };
}

IluPreconditioner::IluPreconditioner(const SparseMatrix& a, double drop_tol, int fill)
    : ilu_(std::make_shared<Eigen::IncompleteLUT<double>>()) {
  Eigen::SparseMatrix<double> colmajor = a;
  ilu_->setDroptol(drop_tol);
  ilu_->setFillfactor(fill);
  ilu_->compute(colmajor);
  if (ilu_->info() != Eigen::Success) throw SolverError("ilu", "incomplete factorization failed");
}

LinearOp IluPreconditioner::as_op() const {
  auto ilu = ilu_;
  return [ilu](const Vec& x, Vec& y) { y = ilu->solve(x); };
}

LinearOp matrix_op(const SparseMatrix& a) {
  return [&a](const Vec& x, Vec& y) { y.noalias() = a * x; };
}

}  // namespace bqwave::linalg
