#pragma once

// Ignition-type reaction rates: f = 0 on (-inf, theta0] and [1, inf), f > 0 between.

#include <limits>
#include <string>

namespace bqwave::reaction {

enum class Family { hat, quadratic };

struct NonlinearitySpec {
  Family family = Family::hat;
  double k = 1.0;        // amplitude, >= 0
  double theta0 = 0.25;  // ignition temperature in (0, 1)
};

Family parse_family(const std::string& name);
std::string to_string(Family f);

/// Throws InvalidArgument unless k >= 0 and theta0 in (0, 1).
void validate(const NonlinearitySpec& spec);

/// hat:       k (T - theta0)_+ (1 - T)_+
/// quadratic: k [(T - theta0)_+]^2 (1 - T)_+
double ignition_value(const NonlinearitySpec& spec, double t);

/// Upper bound of |f'| on [0, 1], computed analytically per family.
double lipschitz_bound(const NonlinearitySpec& spec);

/// sup of f on [0, 1].
double sup_value(const NonlinearitySpec& spec);

struct GrowthCheck {
  double k_min = 0.0;   // +inf when f / [(T - theta0)_+]^2 is unbounded
  bool holds = false;
};

/// Smallest k with f(T) <= k [(T - theta0)_+]^2 on [0, 1].
GrowthCheck quadratic_growth_check(const NonlinearitySpec& spec, int samples = 100000);

}  // namespace bqwave::reaction
