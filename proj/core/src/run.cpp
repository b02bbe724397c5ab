#include "bqwave/run.hpp"

#include "bqwave/field_io.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace bqwave::run {

using json_out::Json;
namespace fs = std::filesystem;

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string two_digits(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02zu", i);
  return buf;
}

Json config_json(const config::RunConfig& cfg) {
  Json j;
  for (const auto& k : config::known_keys()) j[k] = config::get_value(cfg, k);
  return j;
}

void write_json(const std::string& path, const Json& j) { io::write_text(path, json_out::dump(j)); }

}  // namespace

void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
}

std::string output_dir(const config::RunConfig& cfg) {
  const fs::path dir(cfg.output.dir);
  if (const char* root = std::getenv("BQ_OUT"); root && *root && dir.is_relative())
    return (fs::path(root) / dir).string();
  return dir.string();
}

RunOutcome execute(const config::RunConfig& cfg, const std::string& dir, std::ostream* log) {
  RunOutcome out;
  const std::string hash = cfg.hash();
  const auto setup = cfg.setup();
  out.condition = geometry::evaluate_thinness(*setup.cs, setup.phys, setup.cpw, setup.origin);

  Json summary;
  summary["meta"] = json_out::meta(hash);
  summary["config"] = config_json(cfg);
  summary["condition"] = json_out::to_json(out.condition);

  if (!out.condition.admissible() && !cfg.solver.force) {
    out.refused = true;
    out.exit_code = refused;
    out.failure = "thinness condition violated for d = 1 (LHS = " +
                  io::format_double(out.condition.lhs) + " >= 1); set solver.force = true to override";
    summary["refused"] = true;
    summary["failure"] = out.failure;
    summary["exit_code"] = out.exit_code;
    write_json(join(dir, "condition.json"), summary);
    out.summary = summary;
    return out;
  }

  std::size_t stage_index = 0;
  auto on_stage = [&](const fixedpoint::StageRecord& r) {
    if (log)
      *log << "a = " << io::format_double(r.a) << "  tau = " << io::format_double(r.tau)
           << "  c = " << io::format_double(r.c) << "  iterations = " << r.iterations
           << (r.converged ? "" : "  (not converged)") << std::endl;
    if (cfg.output.stage_json) {
      Json j;
      j["meta"] = json_out::meta(hash);
      j["stage"] = json_out::to_json(r);
      write_json(join(dir, "stages/stage_" + two_digits(stage_index) + ".json"), j);
    }
    ++stage_index;
  };

  out.result = fixedpoint::continue_in_a(cfg.solver, setup, on_stage);

  Json runs = Json::array();
  bool all_converged = true;
  bool audits_ok = true;
  std::vector<std::vector<std::string>> table;
  for (std::size_t n = 0; n < out.result.runs.size(); ++n) {
    const auto& run = out.result.runs[n];
    const std::string sub = join(dir, "a_" + two_digits(n));
    Json rj;
    rj["a"] = out.result.a[n];
    rj["c"] = run.state.c;
    rj["tau"] = run.state.tau;
    rj["converged"] = run.converged;
    rj["degenerate"] = run.degenerate;
    if (!run.failure.empty()) rj["failure"] = run.failure;
    Json stages = Json::array();
    for (const auto& st : run.stages)
      stages.push_back({{"tau", st.tau}, {"c", st.c}, {"iterations", st.iterations},
                        {"residual", st.residual}, {"converged", st.converged}});
    rj["stages"] = stages;

    const bool ok_run = run.converged && !run.degenerate;
    all_converged = all_converged && ok_run;
    if (run.converged) {
      auto report = diagnostics::audit_all(run.state, setup, cfg.audit);
      audits_ok = audits_ok && report.passed();
      rj["audit_passed"] = report.passed();
      rj["reaction_integral"] = report.reaction_integral;
      rj["energy_residual"] = report.energy.residual;
      if (report.has_left) rj["theta_minus"] = report.left.theta_minus;
      Json aj;
      aj["meta"] = json_out::meta(hash);
      aj["a"] = out.result.a[n];
      aj["c"] = run.state.c;
      aj["audit"] = json_out::to_json(report);
      aj["flow"] = json_out::to_json(run.state.flow_stats);
      write_json(join(sub, "audit.json"), aj);
      if (cfg.output.csv) io::write_profiles_csv(join(sub, "profiles.csv"), report.profiles);
      if (cfg.output.dump_state) io::write_state(join(sub, "state.bqfl"), cfg.section, setup, run.state);
      out.audits.push_back(std::move(report));
    }
    table.push_back({io::format_double(out.result.a[n]), io::format_double(run.state.c),
                     n > 0 ? io::format_double(out.result.cauchy[n - 1]) : std::string(),
                     run.converged ? "true" : "false", run.degenerate ? "true" : "false"});
    runs.push_back(rj);
    if (out.failure.empty() && !run.failure.empty()) out.failure = run.failure;
  }
  if (cfg.output.csv) {
    for (auto& r : table) r.insert(r.begin(), hash);
    io::write_csv(join(dir, "c_table.csv"),
                  {"config_hash", "a", "c", "cauchy", "converged", "degenerate"}, table);
  }

  out.exit_code = !all_converged ? not_converged : (!audits_ok ? audit_failed : ok);
  summary["runs"] = runs;
  summary["cauchy"] = out.result.cauchy;
  if (!out.failure.empty()) summary["failure"] = out.failure;
  summary["exit_code"] = out.exit_code;
  write_json(join(dir, "summary.json"), summary);
  out.summary = summary;
  return out;
}

int cmd_check_condition(const std::string& config_path, std::ostream& out, std::ostream& err) {
  config::RunConfig cfg;
  fixedpoint::Setup setup;
  try {
    cfg = config::load(config_path);
    setup = cfg.setup();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  }
  const auto rep = geometry::evaluate_thinness(*setup.cs, setup.phys, setup.cpw, setup.origin);
  Json j;
  j["meta"] = json_out::meta(cfg.hash());
  j["condition"] = json_out::to_json(rep);
  if (!rep.required) j["message"] = "condition not required (d = 0)";
  else j["message"] = rep.satisfied ? "condition satisfied" : "condition violated";
  out << json_out::dump(j);
  return rep.admissible() ? ok : refused;
}

int cmd_solve(const std::string& config_path, std::ostream& out, std::ostream& err) {
  config::RunConfig cfg;
  try {
    cfg = config::load(config_path);
    (void)cfg.setup();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  }
  try {
    const auto res = execute(cfg, output_dir(cfg), &err);
    out << json_out::dump(res.summary);
    if (!res.failure.empty()) err << (res.refused ? "refused: " : "failure: ") << res.failure << '\n';
    return res.exit_code;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  } catch (const Error& e) {
    err << "failure: " << e.what() << '\n';
    return not_converged;
  }
}

void apply_axis(config::RunConfig& cfg, const std::string& axis, double value) {
  if (axis == "a") {
    cfg.solver.a_schedule = {value};
  } else if (axis == "nu") {
    cfg.phys.nu = value;
  } else if (axis == "rho") {
    const double n = geometry::norm(cfg.phys.rho);
    const geometry::Vec3 dir = n > 0.0 ? geometry::Vec3{cfg.phys.rho[0] / n, cfg.phys.rho[1] / n,
                                                        cfg.phys.rho[2] / n}
                                       : geometry::Vec3{0.0, 0.0, -1.0};
    cfg.phys.rho = {value * dir[0], value * dir[1], value * dir[2]};
  } else if (axis == "k") {
    cfg.phys.reaction.k = value;
  } else if (axis == "lz") {
    if (cfg.section.kind != geometry::SectionKind::rectangle)
      throw config::ConfigError("sweep", 0, "axis lz needs a rectangular section");
    cfg.section.lz = value;
  } else {
    throw config::ConfigError("sweep", 0, "unknown axis '" + axis + "' (expected a | nu | rho | k | lz)");
  }
}

int cmd_sweep(const std::string& config_path, const std::string& axis,
              const std::vector<double>& values, int threads, std::ostream& out,
              std::ostream& err) {
  config::RunConfig base;
  std::vector<config::RunConfig> cfgs;
  try {
    base = config::load(config_path);
    if (values.empty()) throw config::ConfigError("sweep", 0, "no values given");
    for (double v : values) {
      auto c = base;
      apply_axis(c, axis, v);
      c.validate();
      cfgs.push_back(std::move(c));
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  }

  const std::string root = join(output_dir(base), "sweep_" + axis);
  struct Row {
    double c = NAN, theta = NAN, integral = NAN, lhs = NAN;
    bool converged = false, degenerate = false, audit = false;
    int exit_code = 0;
    std::string error;
  };
  std::vector<Row> rows(cfgs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cfgs.size(); i = next++) {
      Row& row = rows[i];
      try {
        const auto res = execute(cfgs[i], join(root, "run_" + two_digits(i)), nullptr);
        row.lhs = res.condition.lhs;
        row.exit_code = res.exit_code;
        row.error = res.failure;
        if (!res.result.runs.empty()) {
          const auto& r = res.result.runs.back();
          row.c = r.state.c;
          row.converged = r.converged;
          row.degenerate = r.degenerate;
        }
        if (!res.audits.empty()) {
          const auto& rep = res.audits.back();
          row.integral = rep.reaction_integral;
          row.theta = rep.has_left ? rep.left.theta_minus : NAN;
          row.audit = rep.passed();
        }
      } catch (const std::exception& e) {
        row.error = e.what();
        row.exit_code = not_converged;
      }
      std::lock_guard<std::mutex> lock(log_mutex);
      err << axis << " = " << io::format_double(values[i]) << ": exit " << row.exit_code << '\n';
    }
  };
  const int n = threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min<int>(n, static_cast<int>(cfgs.size())); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::vector<std::string> header{"config_hash", "value", "c", "theta_minus", "reaction_integral",
                                  "condition_lhs", "converged", "degenerate", "audit_passed",
                                  "exit_code", "error"};
  if (axis == "a") header.insert(header.begin() + 3, "cauchy");
  std::vector<std::vector<std::string>> table;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::string error = r.error;
    for (char& ch : error)
      if (ch == ',' || ch == '\n') ch = ';';
    std::vector<std::string> row{cfgs[i].hash(), io::format_double(values[i]), io::format_double(r.c),
                                 io::format_double(r.theta), io::format_double(r.integral),
                                 io::format_double(r.lhs), r.converged ? "true" : "false",
                                 r.degenerate ? "true" : "false", r.audit ? "true" : "false",
                                 std::to_string(r.exit_code), error};
    if (axis == "a")
      row.insert(row.begin() + 3, i > 0 ? io::format_double(std::abs(r.c - rows[i - 1].c)) : "");
    table.push_back(std::move(row));
  }
  const std::string csv = join(root, "summary.csv");
  io::write_csv(csv, header, table);
  std::ifstream f(csv);
  out << f.rdbuf();
  int worst = ok;
  for (const auto& r : rows) worst = std::max(worst, r.exit_code);
  return worst == config_error ? not_converged : (worst == ok ? ok : worst);
}

int cmd_verify(const std::string& state_path, const std::string& out_dir, double slack,
               std::ostream& out, std::ostream& err) {
  io::StateDump dump;
  try {
    dump = io::read_state(state_path);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  }
  diagnostics::AuditOptions opts;
  opts.slack = slack;
  const auto report = diagnostics::audit_all(dump.state, dump.setup, opts);
  Json j;
  j["meta"] = json_out::meta(json_out::fnv1a_hex(state_path.substr(state_path.find_last_of('/') + 1)));
  j["source"] = fs::path(state_path).filename().string();
  j["a"] = dump.state.a();
  j["c"] = dump.state.c;
  j["tau"] = dump.state.tau;
  j["audit"] = json_out::to_json(report);
  const std::string text = json_out::dump(j);
  if (!out_dir.empty()) {
    io::write_text(join(out_dir, "audit.json"), text);
    io::write_profiles_csv(join(out_dir, "profiles.csv"), report.profiles);
  }
  out << text;
  return report.passed() ? ok : audit_failed;
}

int cmd_planar(double a, double theta0, std::ostream& out, std::ostream& err) {
  double c = 0.0;
  try {
    c = temperature::planar_root(a, theta0);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  }
  Json j;
  j["meta"] = json_out::meta(json_out::fnv1a_hex(io::format_double(a) + " " + io::format_double(theta0)));
  j["a"] = a;
  j["theta0"] = theta0;
  j["profile"] = "T(x) = (exp(-c (x + a)) - exp(-2 c a)) / (1 - exp(-2 c a))";
  j["root_equation"] = "(1 - exp(-c a)) / (exp(c a) - exp(-c a)) = theta0";
  j["c"] = c;
  j["T_at_0"] = temperature::planar_profile(c, a, 0.0);
  j["gap"] = temperature::planar_profile(c, a, 0.0) - theta0;
  out << json_out::dump(j);
  return ok;
}

}  // namespace bqwave::run
