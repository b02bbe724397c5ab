#pragma once

#include "bqwave/fixedpoint.hpp"

#include <cmath>
#include <filesystem>
#include <memory>
#include <random>
#include <string>

namespace bqtest {

using namespace bqwave;

inline std::shared_ptr<const geometry::CrossSection> square(double side, int n) {
  return std::make_shared<const geometry::CrossSection>(geometry::build_rectangle(side, side, n, n));
}

inline fixedpoint::Setup make_setup(std::shared_ptr<const geometry::CrossSection> cs, int d = 0,
                                    double k = 4.0, double nu = 1.0) {
  fixedpoint::Setup s;
  s.cs = std::move(cs);
  s.phys.nu = nu;
  s.phys.d = d;
  s.phys.reaction.k = k;
  s.phys.reaction.theta0 = 0.25;
  return s;
}

// Sum of a few smooth modes, damped toward the ends of the box.
inline fields::ScalarField smooth_scalar(const fields::Box& b, std::mt19937& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  fields::ScalarField f(b);
  const double Lx = b.hx * (b.nx - 1), ly = b.cs->ly(), lz = b.cs->lz();
  double amp[4], kx[4], ky[4], kz[4], ph[4];
  for (int m = 0; m < 4; ++m) {
    amp[m] = U(rng);
    kx[m] = 1.0 + 3.0 * std::abs(U(rng));
    ky[m] = std::round(3.0 * std::abs(U(rng)));
    kz[m] = std::round(3.0 * std::abs(U(rng)));
    ph[m] = 3.0 * U(rng);
  }
  for (int i = 0; i < b.nx; ++i)
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k) {
        const double x = (b.x(i) - b.x0) / Lx;
        const double y = b.cs->y(j) - b.cs->y0(), z = b.cs->z(k) - b.cs->z0();
        double s = 0.0;
        for (int m = 0; m < 4; ++m)
          s += amp[m] * std::sin(M_PI * kx[m] * x + ph[m]) * std::cos(M_PI * ky[m] * y / ly) *
               std::cos(M_PI * kz[m] * z / lz);
        f.at(i, j, k) = s;
      }
  f.apply_mask();
  return f;
}

inline fields::VectorField random_vector(const fields::Box& b, std::mt19937& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  fields::VectorField f(b);
  for (auto* c : {&f.u, &f.v, &f.w})
    for (Eigen::Index i = 0; i < c->size(); ++i) (*c)[i] = N(rng);
  return f;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("bqwave_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
};

}  // namespace bqtest

namespace bqtest {

// Discretely solenoidal field from two stream functions psi(x, y) and chi(x, z)
// sampled at face corners; zero normal velocity on the lateral walls.
inline fields::VectorField stream_field(const fields::Box& b, double kx = 1.0) {
  fields::VectorField f(b);
  const double ly = b.cs->ly(), lz = b.cs->lz();
  const double L = b.hx * b.nx;
  auto psi = [&](int i, int j, int k) {
    const double x = i * b.hx / L, y = j * b.hy() / ly, z = (k + 0.5) * b.hz() / lz;
    return std::sin(M_PI * y) * std::cos(M_PI * z) * std::sin(2 * M_PI * kx * x + 0.3);
  };
  auto chi = [&](int i, int j, int k) {
    const double x = i * b.hx / L, y = (j + 0.5) * b.hy() / ly, z = k * b.hz() / lz;
    return 0.5 * std::sin(M_PI * z) * std::cos(2 * M_PI * y) * std::cos(M_PI * kx * x);
  };
  for (int i = 0; i <= b.nx; ++i)
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k)
        f.U(i, j, k) = (psi(i, j + 1, k) - psi(i, j, k)) / b.hy() +
                       (chi(i, j, k + 1) - chi(i, j, k)) / b.hz();
  for (int i = 0; i < b.nx; ++i) {
    for (int j = 0; j <= b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k) f.V(i, j, k) = -(psi(i + 1, j, k) - psi(i, j, k)) / b.hx;
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k <= b.nz(); ++k) f.W(i, j, k) = -(chi(i + 1, j, k) - chi(i, j, k)) / b.hx;
  }
  return f;
}

}  // namespace bqtest
