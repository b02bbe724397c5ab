#include "bqwave/config.hpp"

#include "bqwave/field_io.hpp"
#include "bqwave/json_out.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace bqwave::config {

namespace {

struct Bad {
  std::string what;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto* end = t.data() + t.size();
  auto [p, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || p != end) throw Bad{"expected a number, got '" + t + "'"};
  return v;
}

int to_int(const std::string& s) {
  const std::string t = trim(s);
  int v = 0;
  const auto* end = t.data() + t.size();
  auto [p, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || p != end) throw Bad{"expected an integer, got '" + t + "'"};
  return v;
}

bool to_bool(const std::string& s) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw Bad{"expected true | false, got '" + t + "'"};
}

std::vector<double> to_list(const std::string& s) {
  std::string t = s;
  for (char& ch : t)
    if (ch == ',' || ch == '[' || ch == ']') ch = ' ';
  std::istringstream is(t);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) out.push_back(to_double(tok));
  return out;
}

std::string from_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + io::format_double(v[i]);
  return out;
}

// "y z; y z; ..."
std::vector<geometry::Vec2> to_vertices(const std::string& s) {
  std::vector<geometry::Vec2> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, ';')) {
    if (trim(item).empty()) continue;
    const auto xs = to_list(item);
    if (xs.size() != 2) throw Bad{"each vertex needs two coordinates 'y z'"};
    out.push_back({xs[0], xs[1]});
  }
  return out;
}

std::string from_vertices(const std::vector<geometry::Vec2>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i)
    out += (i ? "; " : "") + io::format_double(vs[i][0]) + " " + io::format_double(vs[i][1]);
  return out;
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

struct Entry {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define BQ_DOUBLE(field) \
  Entry{[](RunConfig& c, const std::string& v) { c.field = to_double(v); }, \
        [](const RunConfig& c) { return io::format_double(c.field); }}
#define BQ_INT(field) \
  Entry{[](RunConfig& c, const std::string& v) { c.field = to_int(v); }, \
        [](const RunConfig& c) { return std::to_string(c.field); }}
#define BQ_BOOL(field) \
  Entry{[](RunConfig& c, const std::string& v) { c.field = to_bool(v); }, \
        [](const RunConfig& c) { return from_bool(c.field); }}

const std::vector<std::pair<std::string, Entry>>& table() {
  static const std::vector<std::pair<std::string, Entry>> t = {
      {"geometry.kind",
       {[](RunConfig& c, const std::string& v) { c.section.kind = geometry::parse_section_kind(trim(v)); },
        [](const RunConfig& c) { return geometry::to_string(c.section.kind); }}},
      {"geometry.ly", BQ_DOUBLE(section.ly)},
      {"geometry.lz", BQ_DOUBLE(section.lz)},
      {"geometry.vertices",
       {[](RunConfig& c, const std::string& v) { c.section.vertices = to_vertices(v); },
        [](const RunConfig& c) { return from_vertices(c.section.vertices); }}},
      {"geometry.ny", BQ_INT(section.ny)},
      {"geometry.nz", BQ_INT(section.nz)},
      {"geometry.origin",
       {[](RunConfig& c, const std::string& v) { c.origin = geometry::parse_origin(trim(v)); },
        [](const RunConfig& c) { return geometry::to_string(c.origin); }}},
      {"geometry.cpw_convention",
       {[](RunConfig& c, const std::string& v) { c.cpw = geometry::parse_cpw(trim(v)); },
        [](const RunConfig& c) { return geometry::to_string(c.cpw); }}},
      {"physics.nu", BQ_DOUBLE(phys.nu)},
      {"physics.rho",
       {[](RunConfig& c, const std::string& v) {
          const auto xs = to_list(v);
          if (xs.size() != 3) throw Bad{"rho needs three components"};
          c.phys.rho = {xs[0], xs[1], xs[2]};
        },
        [](const RunConfig& c) {
          return from_list({c.phys.rho[0], c.phys.rho[1], c.phys.rho[2]});
        }}},
      {"physics.d", BQ_INT(phys.d)},
      {"physics.theta0", BQ_DOUBLE(phys.reaction.theta0)},
      {"physics.reaction",
       {[](RunConfig& c, const std::string& v) { c.phys.reaction.family = reaction::parse_family(trim(v)); },
        [](const RunConfig& c) { return reaction::to_string(c.phys.reaction.family); }}},
      {"physics.k", BQ_DOUBLE(phys.reaction.k)},
      {"solver.damping", BQ_DOUBLE(solver.damping)},
      {"solver.tau_schedule",
       {[](RunConfig& c, const std::string& v) { c.solver.tau_schedule = to_list(v); },
        [](const RunConfig& c) { return from_list(c.solver.tau_schedule); }}},
      {"solver.a_schedule",
       {[](RunConfig& c, const std::string& v) { c.solver.a_schedule = to_list(v); },
        [](const RunConfig& c) { return from_list(c.solver.a_schedule); }}},
      {"solver.tol", BQ_DOUBLE(solver.tol)},
      {"solver.max_iter", BQ_INT(solver.max_iter)},
      {"solver.extension_n", BQ_INT(solver.extension_n)},
      {"solver.truncation_factor", BQ_DOUBLE(solver.truncation_factor)},
      {"solver.hx", BQ_DOUBLE(solver.hx)},
      {"solver.flow_refresh", BQ_INT(solver.flow_refresh)},
      {"solver.anderson_depth", BQ_INT(solver.anderson_depth)},
      {"solver.peclet",
       {[](RunConfig& c, const std::string& v) { c.solver.peclet = flow::parse_peclet_policy(trim(v)); },
        [](const RunConfig& c) { return flow::to_string(c.solver.peclet); }}},
      {"solver.force", BQ_BOOL(solver.force)},
      {"solver.slack", BQ_DOUBLE(audit.slack)},
      {"solver.abs_tol", BQ_DOUBLE(audit.abs_tol)},
      {"solver.monotone_tol", BQ_DOUBLE(audit.monotone_tol)},
      {"output.dir",
       {[](RunConfig& c, const std::string& v) { c.output.dir = trim(v); },
        [](const RunConfig& c) { return c.output.dir; }}},
      {"output.dump_state", BQ_BOOL(output.dump_state)},
      {"output.csv", BQ_BOOL(output.csv)},
      {"output.stage_json", BQ_BOOL(output.stage_json)},
  };
  return t;
}

#undef BQ_DOUBLE
#undef BQ_INT
#undef BQ_BOOL

const Entry* lookup(const std::string& key) {
  for (const auto& [k, e] : table())
    if (k == key) return &e;
  return nullptr;
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, e] : table()) k.push_back(name);
    return k;
  }();
  return keys;
}

void set_value(RunConfig& cfg, const std::string& key, const std::string& value,
               const std::string& source, int line) {
  const Entry* e = lookup(key);
  if (!e) throw ConfigError(source, line, "unknown key '" + key + "'");
  try {
    e->set(cfg, value);
  } catch (const Bad& b) {
    throw ConfigError(source, line, key + ": " + b.what);
  } catch (const InvalidArgument& ex) {
    throw ConfigError(source, line, key + ": " + ex.what());
  }
}

std::string get_value(const RunConfig& cfg, const std::string& key) {
  const Entry* e = lookup(key);
  if (!e) throw ConfigError("config", 0, "unknown key '" + key + "'");
  return e->get(cfg);
}

std::string RunConfig::canonical() const {
  std::string out;
  for (const auto& [k, e] : table()) out += k + " = " + e.get(*this) + "\n";
  return out;
}

std::string RunConfig::hash() const {
  std::string text;
  for (const auto& [k, e] : table())
    if (k.rfind("output.", 0) != 0) text += k + " = " + e.get(*this) + "\n";
  return json_out::fnv1a_hex(text);
}

void RunConfig::validate() const {
  try {
    if (section.kind == geometry::SectionKind::polygon && section.vertices.size() < 3)
      throw InvalidArgument("geometry.vertices: a polygon needs at least 3 vertices");
    if (section.ny < 4 || section.nz < 4)
      throw InvalidArgument("geometry.ny and geometry.nz must be >= 4");
    if (section.kind == geometry::SectionKind::rectangle && !(section.ly > 0.0 && section.lz > 0.0))
      throw InvalidArgument("geometry.ly and geometry.lz must be positive");
    geometry::validate(phys);
    solver.validate();
    if (!(audit.slack >= 0.0)) throw InvalidArgument("solver.slack must be >= 0");
    if (output.dir.empty()) throw InvalidArgument("output.dir is empty");
  } catch (const InvalidArgument& e) {
    throw ConfigError("config", 0, e.what());
  }
}

fixedpoint::Setup RunConfig::setup() const {
  fixedpoint::Setup s;
  s.cs = std::make_shared<const geometry::CrossSection>(geometry::build_section(section));
  s.phys = phys;
  s.cpw = cpw;
  s.origin = origin;
  return s;
}

RunConfig parse_text(const std::string& text, const std::string& source) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string raw;
  std::string prefix;
  int line = 0;
  std::map<std::string, int> seen;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(source, line, "unterminated section header");
      prefix = trim(s.substr(1, s.size() - 2));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "expected 'key = value'");
    std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw ConfigError(source, line, "missing key");
    if (!prefix.empty() && key.find('.') == std::string::npos) key = prefix + "." + key;
    if (auto it = seen.find(key); it != seen.end())
      throw ConfigError(source, line,
                        "duplicate key '" + key + "' (first set on line " + std::to_string(it->second) + ")");
    seen[key] = line;
    set_value(cfg, key, s.substr(eq + 1), source, line);
  }
  return cfg;
}

RunConfig parse_json(const std::string& text, const std::string& source) {
  json_out::Json doc;
  try {
    doc = json_out::Json::parse(text);
  } catch (const json_out::Json::parse_error& e) {
    throw ConfigError(source, 0, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError(source, 0, "top level must be an object");
  RunConfig cfg;
  for (auto sec = doc.begin(); sec != doc.end(); ++sec) {
    if (!sec.value().is_object())
      throw ConfigError(source, 0, "section '" + sec.key() + "' must be an object");
    for (auto it = sec.value().begin(); it != sec.value().end(); ++it) {
      const std::string key = sec.key() + "." + it.key();
      const auto& v = it.value();
      std::string value;
      if (v.is_string()) {
        value = v.get<std::string>();
      } else if (v.is_boolean()) {
        value = v.get<bool>() ? "true" : "false";
      } else if (v.is_number_integer()) {
        value = std::to_string(v.get<long long>());
      } else if (v.is_number()) {
        value = io::format_double(v.get<double>());
      } else if (v.is_array()) {
        for (std::size_t i = 0; i < v.size(); ++i) {
          const auto& e = v[i];
          if (e.is_array()) {
            if (e.size() != 2 || !e[0].is_number() || !e[1].is_number())
              throw ConfigError(source, 0, key + ": vertices must be [y, z] pairs");
            value += (i ? "; " : "") + io::format_double(e[0].get<double>()) + " " +
                     io::format_double(e[1].get<double>());
          } else if (e.is_number()) {
            value += (i ? ", " : "") + io::format_double(e.get<double>());
          } else {
            throw ConfigError(source, 0, key + ": arrays must hold numbers");
          }
        }
      } else {
        throw ConfigError(source, 0, key + ": unsupported value type");
      }
      set_value(cfg, key, value, source, 0);
    }
  }
  return cfg;
}

RunConfig load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(path, 0, "cannot read file");
  std::ostringstream ss;
  ss << f.rdbuf();
  const bool json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  RunConfig cfg = json ? parse_json(ss.str(), path) : parse_text(ss.str(), path);
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(path, 0, std::string(e.what()).substr(std::string("config: ").size()));
  }
  return cfg;
}

}  // namespace bqwave::config
