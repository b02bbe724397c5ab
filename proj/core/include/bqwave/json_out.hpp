#pragma once

// JSON documents for reports. Numbers are written with 17 significant digits;
// every document carries the config hash and module versions.

#include "bqwave/diagnostics.hpp"

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

namespace bqwave::json_out {

using Json = nlohmann::ordered_json;

/// Library version string.
std::string version();

/// 64-bit FNV-1a as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

/// Serialization with two-space indent, %.17g doubles, null for non-finite.
std::string dump(const Json& j);

/// {"config_hash", "version", "modules"}.
Json meta(const std::string& config_hash);

Json to_json(const geometry::ConditionReport& r);
Json to_json(const diagnostics::AuditRecord& r);
Json to_json(const diagnostics::AuditReport& r);
Json to_json(const fixedpoint::StageRecord& r);
Json to_json(const flow::FlowStats& s);

}  // namespace bqwave::json_out
