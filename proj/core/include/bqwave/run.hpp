#pragma once

// Command implementations behind the bqwave tool. Each returns the process
// exit status:
//   0 success, 1 configuration error, 2 thinness condition refused,
//   3 non-convergence (or degenerate wave), 4 asserted audit failure.

#include "bqwave/config.hpp"
#include "bqwave/json_out.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace bqwave::run {

enum Exit : int { ok = 0, config_error = 1, refused = 2, not_converged = 3, audit_failed = 4 };

/// Keeps large work arrays in the heap between iterations (glibc only).
void tune_allocator();

/// Output directory of a run: BQ_OUT (when set) replaces the working
/// directory as the root of relative output.dir values.
std::string output_dir(const config::RunConfig& cfg);

struct RunOutcome {
  int exit_code = ok;
  bool refused = false;
  std::string failure;
  geometry::ConditionReport condition;
  fixedpoint::ContinuationResult result;
  std::vector<diagnostics::AuditReport> audits;   // one per a
  json_out::Json summary;
};

/// Solve + audit + artifacts in `dir` (stage JSON, state dumps, audits,
/// profiles, c(a) table, summary.json). `log` receives progress lines.
RunOutcome execute(const config::RunConfig& cfg, const std::string& dir, std::ostream* log);

int cmd_check_condition(const std::string& config_path, std::ostream& out, std::ostream& err);
int cmd_solve(const std::string& config_path, std::ostream& out, std::ostream& err);

/// axis in {a, nu, rho, k, lz}; `threads` <= 0 uses the hardware count.
int cmd_sweep(const std::string& config_path, const std::string& axis,
              const std::vector<double>& values, int threads, std::ostream& out,
              std::ostream& err);
/// Applies one sweep value to a configuration.
void apply_axis(config::RunConfig& cfg, const std::string& axis, double value);

/// Re-audits a BQFL dump; writes audit.json and profiles.csv into `out_dir`.
int cmd_verify(const std::string& state_path, const std::string& out_dir, double slack,
               std::ostream& out, std::ostream& err);

/// tau = 0 closed form and its root.
int cmd_planar(double a, double theta0, std::ostream& out, std::ostream& err);

}  // namespace bqwave::run
