#include "bqwave/json_out.hpp"

#include "bqwave/field_io.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#ifndef BQWAVE_VERSION
#define BQWAVE_VERSION "0.0.0"
#endif

namespace bqwave::json_out {

std::string version() { return BQWAVE_VERSION; }

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void emit(std::ostringstream& os, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << inner << Json(it.key()).dump() << ": ";
        emit(os, it.value(), indent + 1);
      }
      os << '\n' << pad << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // flat numeric arrays stay on one line
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      os << '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) os << (flat ? ", " : ",");
        first = false;
        if (!flat) os << '\n' << inner;
        emit(os, e, indent + 1);
      }
      if (!flat) os << '\n' << pad;
      os << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v))
        os << "null";
      else
        os << io::format_double(v);
      return;
    }
    default:
      os << j.dump();
  }
}

}  // namespace

std::string dump(const Json& j) {
  std::ostringstream os;
  emit(os, j, 0);
  os << '\n';
  return os.str();
}

Json meta(const std::string& config_hash) {
  Json m;
  m["config_hash"] = config_hash;
  m["version"] = version();
  Json mods;
  for (const char* name : {"geometry", "reaction", "fields", "temperature_solver", "flow_solver",
                           "fixedpoint", "diagnostics", "cli"})
    mods[name] = version();
  m["modules"] = mods;
  m["bqfl_version"] = io::kBqflVersion;
  return m;
}

Json to_json(const geometry::ConditionReport& r) {
  Json j;
  j["lhs"] = r.lhs;
  j["satisfied"] = r.satisfied;
  j["required"] = r.required;
  j["admissible"] = r.admissible();
  j["d"] = r.d;
  j["nu"] = r.nu;
  j["rho_norm"] = r.rho_norm;
  j["C_P"] = r.cp;
  j["C_PW"] = r.cpw;
  j["L"] = r.moment;
  j["area"] = r.area;
  j["cpw_convention"] = geometry::to_string(r.cpw_convention);
  j["origin"] = geometry::to_string(r.origin);
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const diagnostics::AuditRecord& r) {
  Json j;
  j["name"] = r.name;
  j["anchor"] = r.anchor;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["slack"] = r.slack;
  j["slack_kind"] = r.absolute ? "absolute" : "relative";
  j["asserted"] = r.asserted;
  j["pass"] = r.pass;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

Json to_json(const diagnostics::AuditReport& r) {
  Json j;
  j["passed"] = r.passed();
  Json recs = Json::array();
  for (const auto& rec : r.records) recs.push_back(to_json(rec));
  j["records"] = recs;
  j["reaction_integral"] = r.reaction_integral;
  if (r.has_energy) {
    j["energy_identity"] = {{"lhs", r.energy.lhs},
                            {"rhs", r.energy.rhs},
                            {"theta_minus", r.energy.theta_minus},
                            {"residual", r.energy.residual}};
  }
  if (r.has_left) {
    j["left_limit"] = {{"theta_minus", r.left.theta_minus},
                       {"branch", r.left.branch},
                       {"variation", r.left.variation},
                       {"max_mean_gap", r.left.max_mean_gap},
                       {"lemma", r.left.lemma_note}};
  }
  j["monotone_min"] = r.profiles.monotone;
  j["warnings"] = r.warnings;
  return j;
}

Json to_json(const flow::FlowStats& s) {
  Json j;
  j["iterations"] = s.iterations;
  j["residual"] = s.residual;
  j["momentum_residual"] = s.momentum_residual;
  j["divergence"] = s.divergence;
  j["peclet"] = s.peclet;
  j["scheme"] = s.scheme == fields::AdvectionScheme::upwind ? "upwind" : "centered";
  j["warnings"] = s.warnings;
  return j;
}

Json to_json(const fixedpoint::StageRecord& r) {
  Json j;
  j["a"] = r.a;
  j["tau"] = r.tau;
  j["c"] = r.c;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["residual"] = r.residual;
  j["damping"] = r.damping;
  j["flow_iterations"] = r.flow_iterations;
  j["residuals"] = r.residuals;
  return j;
}

}  // namespace bqwave::json_out
