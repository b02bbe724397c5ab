#pragma once

// BQFL state dumps and CSV tables.
//
// BQFL layout (little endian): "BQFL", u32 version, then the section spec,
// physics, conventions, grid, scalars and named fields. Each field is
// stored as name, kind, nx, x0, hx and the raw component arrays.

#include "bqwave/diagnostics.hpp"

#include <iosfwd>
#include <string>

namespace bqwave::io {

struct StateDump {
  geometry::SectionSpec section;
  fixedpoint::Setup setup;       // rebuilt from `section` on read
  fixedpoint::WaveState state;
};

inline constexpr std::uint32_t kBqflVersion = 1;

void write_state(const std::string& path, const geometry::SectionSpec& section,
                 const fixedpoint::Setup& setup, const fixedpoint::WaveState& state);
StateDump read_state(const std::string& path);

/// %.17g formatting used by every numeric output.
std::string format_double(double v);

/// x, M, m, mean.
void write_profiles_csv(std::ostream& out, const diagnostics::Profiles& p);
void write_profiles_csv(const std::string& path, const diagnostics::Profiles& p);

/// Rows of already formatted cells, comma separated.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::string& path, const std::string& text);

}  // namespace bqwave::io
