#pragma once

// Run configuration: flat `section.key = value` text (or its JSON mirror).
//
//   # comment
//   geometry.kind = rectangle
//   geometry.ly = 0.5
//   [physics]            # optional prefix for the following keys
//   rho = 0 0 -1

#include "bqwave/diagnostics.hpp"

#include <string>
#include <vector>

namespace bqwave::config {

/// Malformed configuration; `line` is 0 when no line applies.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& source, int line, const std::string& what)
      : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct OutputConfig {
  std::string dir = "out";
  bool dump_state = true;
  bool csv = true;
  bool stage_json = true;
};

struct RunConfig {
  geometry::SectionSpec section;
  geometry::OriginConvention origin = geometry::OriginConvention::centroid;
  geometry::CpwConvention cpw = geometry::CpwConvention::sharp;
  geometry::PhysParams phys;
  fixedpoint::FixedPointConfig solver;
  diagnostics::AuditOptions audit;
  OutputConfig output;

  /// Every key in a fixed order, values at full precision.
  std::string canonical() const;
  /// FNV-1a of canonical(), excluding the output block.
  std::string hash() const;
  /// Checks every sub-module invariant; throws ConfigError.
  void validate() const;
  fixedpoint::Setup setup() const;
};

/// Keys understood by set_value, in canonical order.
const std::vector<std::string>& known_keys();

/// Assigns one key; throws ConfigError (with `line`) on unknown keys or bad values.
void set_value(RunConfig& cfg, const std::string& key, const std::string& value,
               const std::string& source = "config", int line = 0);
std::string get_value(const RunConfig& cfg, const std::string& key);

RunConfig parse_text(const std::string& text, const std::string& source = "config");
RunConfig parse_json(const std::string& text, const std::string& source = "config");
/// Dispatches on the extension (.json uses the mirror) and validates.
RunConfig load(const std::string& path);

}  // namespace bqwave::config
