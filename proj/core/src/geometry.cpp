#include "bqwave/geometry.hpp"

#include "bqwave/error.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bqwave::geometry {

namespace {

constexpr double kPi = std::numbers::pi;

bool inside_polygon(const std::vector<Vec2>& poly, double y, double z) {
  bool in = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = poly[i];
    const auto& b = poly[j];
    if ((a[1] > z) != (b[1] > z)) {
      const double yc = a[0] + (z - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
      if (y < yc) in = !in;
    }
  }
  return in;
}

enum class Wall { dirichlet, neumann };

// 5-point Laplacian on the active cells; walls sit half a cell beyond the last active cell.
Eigen::SparseMatrix<double> masked_laplacian(const CrossSection& cs, Wall wall,
                                             std::vector<int>& index) {
  const int ny = cs.ny(), nz = cs.nz();
  index.assign(static_cast<std::size_t>(ny * nz), -1);
  int n = 0;
  for (int j = 0; j < ny; ++j)
    for (int k = 0; k < nz; ++k)
      if (cs.active(j, k)) index[static_cast<std::size_t>(j * nz + k)] = n++;

  const double iy = 1.0 / (cs.hy() * cs.hy()), iz = 1.0 / (cs.hz() * cs.hz());
  const double ghost = wall == Wall::dirichlet ? 1.0 : 0.0;  // -u ghost adds +1 to the diagonal
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(5 * n));
  for (int j = 0; j < ny; ++j) {
    for (int k = 0; k < nz; ++k) {
      const int row = index[static_cast<std::size_t>(j * nz + k)];
      if (row < 0) continue;
      double diag = 0.0;
      const int dj[4] = {-1, 1, 0, 0}, dk[4] = {0, 0, -1, 1};
      for (int q = 0; q < 4; ++q) {
        const double w = q < 2 ? iy : iz;
        const int jj = j + dj[q], kk = k + dk[q];
        if (cs.active(jj, kk)) {
          diag += w;
          trips.emplace_back(row, index[static_cast<std::size_t>(jj * nz + kk)], -w);
        } else {
          diag += ghost * 2.0 * w;
        }
      }
      trips.emplace_back(row, row, diag);
    }
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trips.begin(), trips.end());
  return a;
}

struct InverseIteration {
  double eigenvalue;
  int iterations;
};

InverseIteration inverse_iteration(const Eigen::SparseMatrix<double>& a, double shift,
                                   Eigen::VectorXd x, bool deflate_constant,
                                   const EigenOptions& opts, const char* what) {
  Eigen::SparseMatrix<double> shifted = a;
  if (shift != 0.0) {
    Eigen::SparseMatrix<double> id(a.rows(), a.cols());
    id.setIdentity();
    shifted += shift * id;
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("eigensolver", std::string(what) + ": factorization failed");

  auto project = [&](Eigen::VectorXd& v) {
    if (deflate_constant) v.array() -= v.mean();
    v.normalize();
  };
  project(x);
  double lambda_old = x.dot(a * x);
  for (int it = 1; it <= opts.max_iterations; ++it) {
    x = ldlt.solve(x);
    project(x);
    const double lambda = x.dot(a * x);
    if (std::abs(lambda - lambda_old) <= opts.rel_tol * std::abs(lambda))
      return {lambda, it};
    lambda_old = lambda;
  }
  throw SolverError("eigensolver", std::string(what) + ": no convergence after " +
                                       std::to_string(opts.max_iterations) + " iterations");
}

}  // namespace

void CrossSection::finalize() {
  active_count_ = 0;
  double sy = 0.0, sz = 0.0;
  for (int j = 0; j < ny_; ++j)
    for (int k = 0; k < nz_; ++k)
      if (active(j, k)) {
        ++active_count_;
        sy += y(j);
        sz += z(k);
      }
  full_ = active_count_ == ny_ * nz_;
  if (active_count_ == 0) throw InvalidArgument("cross-section has no active cells");
  area_ = active_count_ * hy() * hz();
  centroid_ = {sy / active_count_, sz / active_count_};
}

CrossSection build_rectangle(double ly, double lz, int ny, int nz) {
  if (!(ly > 0.0) || !(lz > 0.0) || !std::isfinite(ly) || !std::isfinite(lz))
    throw InvalidArgument("rectangle side lengths must be positive");
  if (ny < 4 || nz < 4) throw InvalidArgument("cross-section resolution must be at least 4x4");
  CrossSection cs;
  cs.kind_ = SectionKind::rectangle;
  cs.ly_ = ly;
  cs.lz_ = lz;
  cs.ny_ = ny;
  cs.nz_ = nz;
  cs.mask_.assign(static_cast<std::size_t>(ny * nz), 1);
  cs.finalize();
  // Exact polygonal area and centroid for the rectangle.
  cs.area_ = ly * lz;
  cs.centroid_ = {0.5 * ly, 0.5 * lz};
  cs.spectral_.dirichlet_lambda1 = kPi * kPi * (1.0 / (ly * ly) + 1.0 / (lz * lz));
  const double longest = std::max(ly, lz);
  cs.spectral_.neumann_mu1 = kPi * kPi / (longest * longest);
  return cs;
}

CrossSection build_polygon(const std::vector<Vec2>& vertices, int ny, int nz) {
  if (vertices.size() < 3) throw InvalidArgument("polygon needs at least three vertices");
  if (ny < 4 || nz < 4) throw InvalidArgument("cross-section resolution must be at least 4x4");
  double ymin = vertices[0][0], ymax = ymin, zmin = vertices[0][1], zmax = zmin;
  for (const auto& v : vertices) {
    ymin = std::min(ymin, v[0]);
    ymax = std::max(ymax, v[0]);
    zmin = std::min(zmin, v[1]);
    zmax = std::max(zmax, v[1]);
  }
  if (!(ymax > ymin) || !(zmax > zmin)) throw InvalidArgument("degenerate polygon");
  CrossSection cs;
  cs.kind_ = SectionKind::polygon;
  cs.polygon_ = vertices;
  cs.y0_ = ymin;
  cs.z0_ = zmin;
  cs.ly_ = ymax - ymin;
  cs.lz_ = zmax - zmin;
  cs.ny_ = ny;
  cs.nz_ = nz;
  cs.mask_.assign(static_cast<std::size_t>(ny * nz), 0);
  for (int j = 0; j < ny; ++j)
    for (int k = 0; k < nz; ++k)
      cs.mask_[static_cast<std::size_t>(j * nz + k)] = inside_polygon(vertices, cs.y(j), cs.z(k));
  cs.finalize();
  cs.spectral_ = numeric_spectral_constants(cs);
  return cs;
}

SpectralConstants numeric_spectral_constants(const CrossSection& cs, const EigenOptions& opts) {
  SpectralConstants out;
  std::vector<int> index;
  const auto dir = masked_laplacian(cs, Wall::dirichlet, index);
  const auto neu = masked_laplacian(cs, Wall::neumann, index);

  // Fixed start vectors: a positive bump for the Dirichlet ground state and a
  // tilted linear field (both transverse directions) for the Neumann mode.
  Eigen::VectorXd bump(dir.rows()), tilt(dir.rows());
  for (int j = 0; j < cs.ny(); ++j)
    for (int k = 0; k < cs.nz(); ++k) {
      const int r = index[static_cast<std::size_t>(j * cs.nz() + k)];
      if (r < 0) continue;
      const double s = (cs.y(j) - cs.y0()) / cs.ly(), t = (cs.z(k) - cs.z0()) / cs.lz();
      bump(r) = std::sin(kPi * s) * std::sin(kPi * t) + 1e-3;
      tilt(r) = (s - 0.5) * cs.ly() + 0.7 * (t - 0.5) * cs.lz();
    }
  const auto d = inverse_iteration(dir, 0.0, bump, false, opts, "dirichlet");
  const double diam2 = cs.ly() * cs.ly() + cs.lz() * cs.lz();
  const auto n = inverse_iteration(neu, 1e-2 * kPi * kPi / diam2, tilt, true, opts, "neumann");
  out.dirichlet_lambda1 = d.eigenvalue;
  out.dirichlet_iterations = d.iterations;
  out.neumann_mu1 = n.eigenvalue;
  out.neumann_iterations = n.iterations;
  return out;
}

double poincare_constant(const CrossSection& cs) {
  return 1.0 / std::sqrt(cs.spectral().dirichlet_lambda1);
}

double poincare_wirtinger_constant(const CrossSection& cs, CpwConvention convention) {
  const double mu = cs.spectral().neumann_mu1;
  return convention == CpwConvention::sharp ? 1.0 / std::sqrt(mu) : 1.0 / mu;
}

double transverse_moment_about(const CrossSection& cs, const Vec3& rho, const Vec2& origin) {
  // Exact cell-wise integration of the quadratic (rho2 y + rho3 z)^2.
  const double hy = cs.hy(), hz = cs.hz();
  double acc = 0.0, wsum = 0.0;
  for (int j = 0; j < cs.ny(); ++j)
    for (int k = 0; k < cs.nz(); ++k) {
      const double w = cs.weight(j, k);
      if (w == 0.0) continue;
      const double lin = rho[1] * (cs.y(j) - origin[0]) + rho[2] * (cs.z(k) - origin[1]);
      acc += w * (lin * lin + rho[1] * rho[1] * hy * hy / 12.0 + rho[2] * rho[2] * hz * hz / 12.0);
      wsum += w;
    }
  return std::sqrt(acc / wsum);
}

double transverse_moment(const CrossSection& cs, const Vec3& rho, OriginConvention origin) {
  const Vec2 o = origin == OriginConvention::centroid ? cs.centroid() : Vec2{0.0, 0.0};
  return transverse_moment_about(cs, rho, o);
}

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

std::vector<std::string> validate(const PhysParams& pp) {
  if (!(pp.nu > 0.0) || !std::isfinite(pp.nu)) throw InvalidArgument("nu must be positive");
  if (pp.d != 0 && pp.d != 1) throw InvalidArgument("d must be 0 or 1");
  for (double r : pp.rho)
    if (!std::isfinite(r)) throw InvalidArgument("rho must be finite");
  reaction::validate(pp.reaction);
  std::vector<std::string> warnings;
  if (pp.rho[2] == 0.0)
    warnings.emplace_back("rho . e3 == 0: gravity has no component along e3");
  return warnings;
}

ConditionReport evaluate_thinness(const CrossSection& cs, const PhysParams& pp,
                                  CpwConvention convention, OriginConvention origin) {
  ConditionReport r;
  r.warnings = validate(pp);
  r.cp = poincare_constant(cs);
  r.cpw = poincare_wirtinger_constant(cs, convention);
  r.moment = transverse_moment(cs, pp.rho, origin);
  r.area = cs.area();
  r.rho_norm = norm(pp.rho);
  r.nu = pp.nu;
  r.d = pp.d;
  r.cpw_convention = convention;
  r.origin = origin;
  r.lhs = std::sqrt(14.0) * r.cp / (pp.nu * std::sqrt(kPi * pp.nu)) * std::sqrt(r.area) *
          (r.rho_norm * r.cpw + r.moment);
  r.satisfied = r.lhs < 1.0;
  r.required = pp.d == 1;
  return r;
}

CrossSection build_section(const SectionSpec& spec) {
  if (spec.kind == SectionKind::rectangle) return build_rectangle(spec.ly, spec.lz, spec.ny, spec.nz);
  return build_polygon(spec.vertices, spec.ny, spec.nz);
}

SectionKind parse_section_kind(const std::string& name) {
  if (name == "rectangle") return SectionKind::rectangle;
  if (name == "polygon") return SectionKind::polygon;
  throw InvalidArgument("unknown geometry kind '" + name + "' (expected rectangle | polygon)");
}

std::string to_string(SectionKind k) { return k == SectionKind::rectangle ? "rectangle" : "polygon"; }

OriginConvention parse_origin(const std::string& name) {
  if (name == "centroid") return OriginConvention::centroid;
  if (name == "as_given") return OriginConvention::as_given;
  throw InvalidArgument("unknown origin convention '" + name + "' (expected centroid | as_given)");
}

std::string to_string(OriginConvention o) {
  return o == OriginConvention::centroid ? "centroid" : "as_given";
}

CpwConvention parse_cpw(const std::string& name) {
  if (name == "sharp") return CpwConvention::sharp;
  if (name == "literal") return CpwConvention::literal;
  throw InvalidArgument("unknown cpw convention '" + name + "' (expected sharp | literal)");
}

std::string to_string(CpwConvention c) { return c == CpwConvention::sharp ? "sharp" : "literal"; }

}  // namespace bqwave::geometry
