#pragma once

// Audits of the a priori bounds, identities and qualitative properties on a
// computed wave. Audits never modify the state.

#include "bqwave/fixedpoint.hpp"

#include <string>
#include <vector>

namespace bqwave::diagnostics {

using fields::ScalarField;
using fields::VectorField;
using fixedpoint::Setup;
using fixedpoint::WaveState;

struct AuditOptions {
  double slack = 0.05;         // relative, on continuum inequalities
  double abs_tol = 1e-8;       // absolute, on pointwise bounds
  double monotone_tol = 1e-8;
  double plateau_tol = 1e-4;
  double plateau_fraction = 0.1;
};

struct AuditRecord {
  std::string name;
  std::string anchor;   // which statement the record checks
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;   // relative for asserted inequalities; absolute for pointwise ones
  bool absolute = false;
  bool asserted = true; // measured records never fail a run
  bool pass = true;
  std::string note;
};

struct Profiles {
  std::vector<double> x, max, min, mean;
  bool monotone = true;          // min(x) non-increasing within tolerance
  double worst_increase = 0.0;
};

struct LeftLimit {
  double theta_minus = 0.0;
  double variation = 0.0;        // spread of the cross-mean over the left window
  double max_mean_gap = 0.0;     // max over the window of M(x) - mean(x)
  bool plateau = false;
  std::string branch;            // quenched-ish, full-burn or indeterminate
  std::string lemma_note;
};

struct EnergyIdentity {
  double lhs = 0.0;              // ||grad T||^2 on R_a
  double rhs = 0.0;              // tau int f(T) T - c theta_-^2 |Omega| / 2
  double theta_minus = 0.0;
  double residual = 0.0;         // |lhs - rhs| / max(lhs, rhs, 1e-14)
};

struct AuditReport {
  std::vector<AuditRecord> records;
  Profiles profiles;
  LeftLimit left;
  bool has_left = false;
  EnergyIdentity energy;
  bool has_energy = false;
  double reaction_integral = 0.0;
  std::vector<std::string> warnings;

  /// True when every asserted record passes.
  bool passed() const;
  const AuditRecord* find(const std::string& name) const;
  void append(const AuditReport& other);
};

/// lhs <= rhs (1 + slack).
AuditRecord relative_check(std::string name, std::string anchor, double lhs, double rhs,
                           double slack, bool asserted = true);
/// lhs <= rhs + tol.
AuditRecord absolute_check(std::string name, std::string anchor, double lhs, double rhs,
                           double tol);

/// Bounds (i)-(v) for the temperature problem on R_a.
AuditReport verify_th_rd(const WaveState& state, const Setup& setup, const AuditOptions& opts = {});

/// Discrete energy identity on R_a; theta_- is the left-edge cross-mean.
EnergyIdentity energy_identity(const WaveState& state, const Setup& setup);
double energy_identity_residual(const WaveState& state, const Setup& setup);

/// Slice max, min and mean over the section for every axial node.
Profiles profiles_and_monotonicity(const ScalarField& t, double tol = 1e-8);

/// Throws Error when no plateau is detected in the left window.
LeftLimit classify_left_limit(const ScalarField& t, const reaction::NonlinearitySpec& spec,
                              const AuditOptions& opts = {});

/// Force-potential, energy, axial-derivative and Xie bounds on the retained
/// flow; Stokes and uniform bounds as measured ratios.
AuditReport verify_apriori_chain(const WaveState& state, const Setup& setup,
                                 const AuditOptions& opts = {});

/// int_{R_a} f(T).
double nonzero_reaction(const ScalarField& t, const reaction::NonlinearitySpec& spec);

/// ||T rho - grad q|| and ||grad T|| on the box of `t_ext`.
struct PotentialBound {
  double remainder = 0.0;
  double gradient = 0.0;
  double constant = 0.0;   // |rho| C_PW + L
};
PotentialBound potential_bound(const ScalarField& t_ext, const Setup& setup);

/// Everything above, with the conclusions of the existence theorem at tau = 1.
AuditReport audit_all(const WaveState& state, const Setup& setup, const AuditOptions& opts = {});

}  // namespace bqwave::diagnostics
