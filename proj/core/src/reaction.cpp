#include "bqwave/reaction.hpp"

#include "bqwave/error.hpp"

#include <algorithm>
#include <cmath>

namespace bqwave::reaction {

Family parse_family(const std::string& name) {
  if (name == "hat") return Family::hat;
  if (name == "quadratic") return Family::quadratic;
  throw InvalidArgument("unknown reaction family '" + name + "' (expected hat | quadratic)");
}

std::string to_string(Family f) { return f == Family::hat ? "hat" : "quadratic"; }

void validate(const NonlinearitySpec& spec) {
  if (!(spec.k >= 0.0) || !std::isfinite(spec.k))
    throw InvalidArgument("reaction amplitude k must be finite and >= 0");
  if (!(spec.theta0 > 0.0 && spec.theta0 < 1.0))
    throw InvalidArgument("ignition temperature theta0 must lie in (0, 1)");
}

double ignition_value(const NonlinearitySpec& spec, double t) {
  if (!(t > spec.theta0) || !(t < 1.0)) return 0.0;
  const double burn = t - spec.theta0;
  const double fuel = 1.0 - t;
  switch (spec.family) {
    case Family::hat:
      return spec.k * burn * fuel;
    case Family::quadratic:
      return spec.k * burn * burn * fuel;
  }
  return 0.0;
}

double lipschitz_bound(const NonlinearitySpec& spec) {
  const double w = 1.0 - spec.theta0;
  switch (spec.family) {
    case Family::hat:
      // f' = k (1 + theta0 - 2T): extreme slopes +-k(1 - theta0) at the ends of the support.
      return spec.k * w;
    case Family::quadratic:
      // f' = k (T - theta0)(2 + theta0 - 3T): interior max k w^2 / 3, end slope -k w^2.
      return spec.k * w * w;
  }
  return 0.0;
}

double sup_value(const NonlinearitySpec& spec) {
  const double w = 1.0 - spec.theta0;
  switch (spec.family) {
    case Family::hat:
      return spec.k * 0.25 * w * w;
    case Family::quadratic:
      return spec.k * 4.0 * w * w * w / 27.0;
  }
  return 0.0;
}

GrowthCheck quadratic_growth_check(const NonlinearitySpec& spec, int samples) {
  GrowthCheck out;
  if (spec.k == 0.0) {
    out.k_min = 0.0;
    out.holds = true;
    return out;
  }
  const double theta = spec.theta0;
  auto ratio = [&](double t) {
    const double b = t - theta;
    return ignition_value(spec, t) / (b * b);
  };
  // A ratio that keeps growing as T decreases to theta0 is unbounded.
  const double r1 = ratio(theta + 1e-4), r2 = ratio(theta + 1e-6), r3 = ratio(theta + 1e-8);
  if (r2 > 10.0 * r1 && r3 > 10.0 * r2) {
    out.k_min = std::numeric_limits<double>::infinity();
    out.holds = false;
    return out;
  }
  double sup = std::max({r1, r2, r3});
  const int n = std::max(samples, 10);
  for (int i = 1; i <= n; ++i) {
    const double t = theta + (1.0 - theta) * static_cast<double>(i) / n;
    sup = std::max(sup, ratio(t));
  }
  // The supremum may only be approached as T decreases to theta0.
  sup = std::max(sup, ratio(theta + 1e-12));
  out.k_min = sup;
  out.holds = std::isfinite(sup);
  return out;
}

}  // namespace bqwave::reaction
