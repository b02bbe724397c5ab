#pragma once

// The map K_a on (c, Z, v), damped iteration along the homotopy in tau, and
// continuation in the half-length a.

#include "bqwave/error.hpp"
#include "bqwave/flow.hpp"
#include "bqwave/temperature.hpp"

#include <functional>
#include <optional>

namespace bqwave::fixedpoint {

using fields::ScalarField;
using fields::VectorField;

struct FixedPointConfig {
  double damping = 0.2;              // relaxation of (T, v) for tau > 0; tau = 0 uses 1
  std::vector<double> tau_schedule{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> a_schedule{20.0};
  double tol = 1e-9;                 // max-norm of (dc, dT, dv)
  int max_iter = 1500;               // per stage
  int extension_n = 2;
  double truncation_factor = 1.0;    // scales A - a = max(4, 8 C_P)
  double hx = 0.3125;                // axial spacing
  int anderson_depth = 5;            // 0: plain damped iteration
  int flow_refresh = 5;              // flow solve every k-th iteration (and near convergence)
  flow::PecletPolicy peclet = flow::PecletPolicy::automatic;
  bool force = false;                // run d = 1 even when the thinness condition fails

  void validate() const;
};

struct Setup {
  std::shared_ptr<const geometry::CrossSection> cs;
  geometry::PhysParams phys;
  geometry::CpwConvention cpw = geometry::CpwConvention::sharp;
  geometry::OriginConvention origin = geometry::OriginConvention::centroid;
};

/// Half-length margin A - a used for the flow box.
double flow_margin(const Setup& setup, const FixedPointConfig& cfg);
fields::AxialGrid make_grid(const Setup& setup, const FixedPointConfig& cfg, double a);

struct WaveState {
  fields::AxialGrid grid;
  double c = 0.0;
  double tau = 0.0;
  ScalarField t;           // on R_a
  VectorField v;           // on R_a, restriction of the last flow solve
  // Retained from the last flow solve for audits.
  ScalarField t_ext;
  VectorField v_ext;
  VectorField u;
  ScalarField p;
  flow::FlowStats flow_stats;
  // Iteration metadata.
  int iterations = 0;
  double damping = 1.0;
  std::vector<double> residuals;
  bool converged = false;

  double a() const { return grid.a(); }
};

/// Planar tau = 0 start: T = planar profile at the continuum root, v = 0.
WaveState initial_state(const Setup& setup, const FixedPointConfig& cfg, double a);

struct KaImage {
  double c = 0.0;
  ScalarField t;
  VectorField v;
  double gain = 0.0;       // d max_{x>=0} T / d c at the maximizer
  bool flow_refreshed = false;
};

struct KaOptions {
  bool refresh_flow = true;
  bool compute_gain = true;
};

/// One evaluation of K_a at `state` (flow retained in `state` when not refreshed).
KaImage evaluate_Ka(WaveState& state, const Setup& setup, const FixedPointConfig& cfg,
                    const KaOptions& opts = {});

/// state + omega (K_a(state) - state) for (T, v) and omega_c for c.
WaveState apply_Ka(const WaveState& state, const Setup& setup, const FixedPointConfig& cfg,
                   double omega, double omega_c);

struct StageRecord {
  double a = 0.0;
  double tau = 0.0;
  double c = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double damping = 0.0;
  bool converged = false;
  std::vector<double> residuals;
  int flow_iterations = 0;
};

struct HomotopyResult {
  WaveState state;             // last converged stage
  std::vector<StageRecord> stages;
  bool converged = false;      // reached the last tau
  bool degenerate = false;     // zero reaction at the fixed point
  std::string failure;
};

/// Raised when d = 1 and the thinness condition fails without `force`.
class GateRefusal : public Error {
 public:
  explicit GateRefusal(geometry::ConditionReport report)
      : Error("thinness condition violated for d = 1 (LHS = " + std::to_string(report.lhs) +
              " >= 1); pass force to override"),
        report_(std::move(report)) {}
  const geometry::ConditionReport& report() const { return report_; }

 private:
  geometry::ConditionReport report_;
};

using StageCallback = std::function<void(const StageRecord&)>;

/// Iterates one tau stage from `state` (in place); returns its record.
StageRecord solve_stage(WaveState& state, double tau, const Setup& setup,
                        const FixedPointConfig& cfg);

HomotopyResult solve_homotopy(const FixedPointConfig& cfg, const Setup& setup, double a,
                              const StageCallback& on_stage = {});
/// Convenience overload using the first entry of the a schedule.
HomotopyResult solve_homotopy(const FixedPointConfig& cfg, const Setup& setup);

/// Warm start on a longer (or equal) R_a: T padded with 1 / 0, v padded with
/// 0 and projected back to solenoidal fields.
WaveState pad_state(const WaveState& state, const fields::AxialGrid& grid);

struct ContinuationResult {
  std::vector<HomotopyResult> runs;
  std::vector<double> a;
  std::vector<double> c;
  std::vector<double> cauchy;   // |c(a_{k+1}) - c(a_k)|
};

ContinuationResult continue_in_a(const FixedPointConfig& cfg, const Setup& setup,
                                 const StageCallback& on_stage = {});

}  // namespace bqwave::fixedpoint
