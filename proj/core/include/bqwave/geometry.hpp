#pragma once

// Channel cross-section: discretization, spectral constants and the
// relative thinness condition for the d = 1 existence theory.

#include "bqwave/reaction.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace bqwave::geometry {

enum class SectionKind { rectangle, polygon };
enum class OriginConvention { centroid, as_given };
/// `sharp` uses mu1^{-1/2}; `literal` uses mu1^{-1}.
enum class CpwConvention { sharp, literal };

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

/// First Dirichlet and first nonzero Neumann eigenvalues of -Laplace on the section.
struct SpectralConstants {
  double dirichlet_lambda1 = 0.0;
  double neumann_mu1 = 0.0;
  int dirichlet_iterations = 0;
  int neumann_iterations = 0;
};

/// Cell-centered tensor grid over the bounding box [y0, y0+ly] x [z0, z0+lz].
/// Polygon sections activate the cells whose centers lie inside the polygon.
class CrossSection {
 public:
  SectionKind kind() const { return kind_; }
  double ly() const { return ly_; }
  double lz() const { return lz_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  double hy() const { return ly_ / ny_; }
  double hz() const { return lz_ / nz_; }
  double y0() const { return y0_; }
  double z0() const { return z0_; }

  /// Cell (j, k) with j the y index; storage index j * nz + k.
  bool active(int j, int k) const {
    return j >= 0 && k >= 0 && j < ny_ && k < nz_ && mask_[static_cast<std::size_t>(j * nz_ + k)];
  }
  bool full() const { return full_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  int active_count() const { return active_count_; }

  double y(int j) const { return y0_ + (j + 0.5) * hy(); }
  double z(int k) const { return z0_ + (k + 0.5) * hz(); }
  /// Area-summing quadrature weight of cell (j, k); zero for inactive cells.
  double weight(int j, int k) const { return active(j, k) ? hy() * hz() : 0.0; }

  double area() const { return area_; }
  Vec2 centroid() const { return centroid_; }
  const std::vector<Vec2>& polygon() const { return polygon_; }

  /// Spectral data used for C_P and C_PW (closed form for rectangles).
  const SpectralConstants& spectral() const { return spectral_; }

  friend CrossSection build_rectangle(double, double, int, int);
  friend CrossSection build_polygon(const std::vector<Vec2>&, int, int);

 private:
  void finalize();

  SectionKind kind_ = SectionKind::rectangle;
  double ly_ = 1.0, lz_ = 1.0, y0_ = 0.0, z0_ = 0.0;
  int ny_ = 0, nz_ = 0;
  std::vector<std::uint8_t> mask_;
  bool full_ = true;
  int active_count_ = 0;
  double area_ = 0.0;
  Vec2 centroid_{0.0, 0.0};
  std::vector<Vec2> polygon_;
  SpectralConstants spectral_;
};

/// Uniform tensor grid on (0, ly) x (0, lz); requires ly, lz > 0 and ny, nz >= 4.
CrossSection build_rectangle(double ly, double lz, int ny, int nz);

/// Masked grid over the polygon's bounding box; spectral constants by inverse iteration.
CrossSection build_polygon(const std::vector<Vec2>& vertices, int ny, int nz);

/// Serializable description of a section; build_section reproduces it exactly.
struct SectionSpec {
  SectionKind kind = SectionKind::rectangle;
  double ly = 0.5, lz = 0.5;
  std::vector<Vec2> vertices;   // polygon only
  int ny = 24, nz = 24;
};
CrossSection build_section(const SectionSpec& spec);
SectionKind parse_section_kind(const std::string& name);
std::string to_string(SectionKind k);
OriginConvention parse_origin(const std::string& name);
std::string to_string(OriginConvention o);
CpwConvention parse_cpw(const std::string& name);
std::string to_string(CpwConvention c);

struct EigenOptions {
  double rel_tol = 1e-10;
  int max_iterations = 10000;
};

/// Inverse-power iteration on the masked 5-point Laplacians (any section kind).
SpectralConstants numeric_spectral_constants(const CrossSection& cs, const EigenOptions& opts = {});

double poincare_constant(const CrossSection& cs);
double poincare_wirtinger_constant(const CrossSection& cs,
                                   CpwConvention convention = CpwConvention::sharp);

/// Root mean square over the section of rho . (0, x~), with x~ measured from the
/// centroid (default) or from the section's own coordinate origin.
double transverse_moment(const CrossSection& cs, const Vec3& rho,
                         OriginConvention origin = OriginConvention::centroid);

/// Same quantity with x~ measured from an arbitrary origin.
double transverse_moment_about(const CrossSection& cs, const Vec3& rho, const Vec2& origin);

struct PhysParams {
  double nu = 1.0;
  Vec3 rho{0.0, 0.0, -1.0};
  int d = 0;
  reaction::NonlinearitySpec reaction;

  double theta0() const { return reaction.theta0; }
};

/// Throws InvalidArgument on violated invariants; returns warnings.
std::vector<std::string> validate(const PhysParams& pp);

double norm(const Vec3& v);

struct ConditionReport {
  double lhs = 0.0;
  bool satisfied = false;
  bool required = false;     // only d = 1 needs the thinness condition
  double cp = 0.0;
  double cpw = 0.0;
  double moment = 0.0;       // L
  double area = 0.0;
  double rho_norm = 0.0;
  double nu = 0.0;
  int d = 0;
  CpwConvention cpw_convention = CpwConvention::sharp;
  OriginConvention origin = OriginConvention::centroid;
  std::vector<std::string> warnings;

  /// Whether a solve may proceed (d = 0, or d = 1 with the condition met).
  bool admissible() const { return !required || satisfied; }
};

ConditionReport evaluate_thinness(const CrossSection& cs, const PhysParams& pp,
                                  CpwConvention convention = CpwConvention::sharp,
                                  OriginConvention origin = OriginConvention::centroid);

}  // namespace bqwave::geometry
