#pragma once

// Krylov solvers and structured preconditioners shared by the field solvers.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <memory>
#include <vector>

namespace bqwave::linalg {

using Vec = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// y = Op(x). Operators never alias input and output.
using LinearOp = std::function<void(const Vec& x, Vec& y)>;

struct KrylovOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int restart = 60;
  int max_iterations = 2000;
};

struct KrylovResult {
  bool converged = false;
  bool stagnated = false;
  int iterations = 0;
  double residual = 0.0;           // final true residual norm
  double initial_residual = 0.0;
  std::vector<double> history;     // preconditioned-GMRES residual estimates
};

/// Right-preconditioned restarted GMRES. `precond` may be empty. The
/// stopping test is ||b - A x|| <= max(rel_tol * ||b||, abs_tol), verified on
/// the true residual at every restart. `project` (optional) is applied to
/// Krylov vectors, used to stay in the range of a singular operator.
KrylovResult gmres(const LinearOp& op, const LinearOp& precond, const Vec& b, Vec& x,
                   const KrylovOptions& opts, const std::function<void(Vec&)>& project = {});

/// ||r|| / (||A||_inf ||x|| + ||b||), the normwise backward error of x.
double backward_error(const SparseMatrix& a, const Vec& x, const Vec& b, double residual_norm);

/// Thomas algorithm for a general tridiagonal system. sub[0] and sup[n-1] unused.
void solve_tridiagonal(const std::vector<double>& sub, const std::vector<double>& diag,
                       const std::vector<double>& sup, std::vector<double>& rhs);

/// One-dimensional tridiagonal operator description.
struct Tridiag {
  std::vector<double> sub, diag, sup;

  std::size_t size() const { return diag.size(); }
  Eigen::MatrixXd dense() const;
  bool symmetric(double tol = 1e-14) const;
};

/// Direct solver for Kronecker-sum operators Tx (x) I (x) I + I (x) Ty (x) I +
/// I (x) I (x) Tz on an nx*ny*nz array stored with the z index fastest.
///
/// Ty and Tz must be symmetric (they are diagonalized once); Tx may be
/// non-symmetric and is handled by a Thomas sweep per transverse mode. When
/// Tx is symmetric and the full operator is singular (pure Neumann), the
/// pseudo-inverse is applied: the null mode of the result is set to zero.
class SeparableSolver {
 public:
  SeparableSolver(const Tridiag& tx, const Tridiag& ty, const Tridiag& tz);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t nz() const { return nz_; }
  std::size_t size() const { return nx_ * ny_ * nz_; }
  bool singular() const { return singular_; }

  void solve(const Vec& rhs, Vec& out) const;
  LinearOp as_op() const;

 private:
  void to_modes(Vec& data) const;
  void from_modes(Vec& data) const;

  std::size_t nx_, ny_, nz_;
  Eigen::MatrixXd qy_, qz_;      // orthonormal eigenvectors (columns)
  Eigen::VectorXd ly_, lz_;
  bool axial_diag_ = false;      // Tx diagonalized as well
  bool singular_ = false;
  Eigen::MatrixXd qx_;
  Eigen::VectorXd lx_;
  // Thomas factors per (i, mode): modified super-diagonal and inverse pivots.
  std::vector<double> cprime_, inv_pivot_, sub_;
};

/// Incomplete-LU preconditioner (threshold ILU) wrapped as a LinearOp.
class IluPreconditioner {
 public:
  explicit IluPreconditioner(const SparseMatrix& a, double drop_tol = 1e-4, int fill = 20);
  LinearOp as_op() const;

 private:
  std::shared_ptr<Eigen::IncompleteLUT<double>> ilu_;
};

/// Wrap a sparse matrix product as a LinearOp.
LinearOp matrix_op(const SparseMatrix& a);

}  // namespace bqwave::linalg
