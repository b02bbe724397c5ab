// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any FAIL.

#include "support.hpp"

#include "bqwave/diagnostics.hpp"
#include "bqwave/field_io.hpp"
#include "bqwave/operators.hpp"
#include "bqwave/run.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#ifndef BQWAVE_CONFIG_DIR
#define BQWAVE_CONFIG_DIR "configs"
#endif

using namespace bqwave;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<void(Verdict&)>& body) {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs > budget_s) v.require(false, "runtime over " + std::to_string(budget_s) + " s");
  if (!v.pass) ++failures;
  std::printf("[%s] %d %s:%s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.str().c_str(),
              secs);
  std::fflush(stdout);
}

std::string cfg_path(const std::string& name) { return std::string(BQWAVE_CONFIG_DIR) + "/" + name; }

double planar_c(int cells) {
  auto setup = bqtest::make_setup(bqtest::square(0.5, 4));
  fixedpoint::FixedPointConfig cfg;
  cfg.a_schedule = {10.0};
  cfg.tau_schedule = {0.0};
  cfg.hx = 20.0 / cells;
  cfg.tol = 1e-13;
  auto res = fixedpoint::solve_homotopy(cfg, setup);
  if (!res.converged) throw Error("planar run did not converge");
  return res.state.c;
}

run::RunOutcome run_config(const std::string& name, const fs::path& root) {
  auto cfg = config::load(cfg_path(name));
  ::setenv("BQ_OUT", root.c_str(), 1);
  const std::string dir = run::output_dir(cfg);
  ::unsetenv("BQ_OUT");
  return run::execute(cfg, dir, nullptr);
}

void regression_checks(Verdict& v, const run::RunOutcome& out, bool d1) {
  v.require(out.exit_code == run::ok, "exit code " + std::to_string(out.exit_code));
  const auto& runs = out.result.runs;
  v.require(runs.size() == 2 && out.audits.size() == 2, "two lengths a");
  if (runs.size() != 2 || out.audits.size() != 2) return;
  for (std::size_t n = 0; n < 2; ++n) {
    const auto& r = runs[n];
    const auto& rep = out.audits[n];
    const std::string tag = "a=" + io::format_double(r.state.a()) + " ";
    v.require(r.converged && r.state.tau == 1.0, tag + "homotopy reached tau = 1");
    v.require(r.state.c > 0.0, tag + "c > 0");
    v.require(rep.reaction_integral > 0.0, tag + "int f > 0");
    for (const char* name :
         {"th_rd.i.lower", "th_rd.i.upper", "th_rd.ii", "th_rd.iii", "th_rd.iv", "th_rd.v"}) {
      const auto* rec = rep.find(name);
      v.require(rec && rec->pass, tag + name);
    }
    v.require(rep.profiles.monotone, tag + "m(x) non-increasing");
    if (d1)
      for (const char* name : {"due", "cinque", "thXie"}) {
        const auto* rec = rep.find(name);
        v.require(rec && rec->asserted && rec->pass, tag + name);
      }
  }
  const double e20 = out.audits[0].energy.residual, e40 = out.audits[1].energy.residual;
  v.require(e40 < e20, "energy residual decreases with a");
  v.detail << " c(20)=" << io::format_double(runs[0].state.c) << " c(40)=" << io::format_double(runs[1].state.c)
           << " int_f=" << out.audits[0].reaction_integral << " energy_residual(20)=" << e20
           << " energy_residual(40)=" << e40;
  if (d1) {
    const auto& rep = out.audits[0];
    for (const char* name : {"due", "cinque", "thXie", "thour_bound.ratio", "th_uniform_H2.ii.ratio"})
      if (const auto* rec = rep.find(name)) v.detail << " " << name << "=" << rec->lhs / rec->rhs;
  }
}

std::map<std::string, std::string> read_outputs(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension();
    if (ext != ".json" && ext != ".csv") continue;
    std::ifstream f(e.path(), std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    files[fs::relative(e.path(), root).string()] = s.str();
  }
  return files;
}

}  // namespace

int main() {
  run::tune_allocator();
  bqtest::TempDir work("acceptance");

  criterion(1, "planar oracle", 5.0, [](Verdict& v) {
    const double exact = temperature::planar_root(10.0, 0.25);
    const double c64 = planar_c(64), c128 = planar_c(128);
    const double e64 = std::abs(c64 / exact - 1), e128 = std::abs(c128 / exact - 1);
    const double order = std::log2(e64 / e128);
    v.require(e64 < 1e-4, "relative error at 64 cells");
    v.require(order >= 1.9, "observed order");
    v.detail << " c_exact=" << io::format_double(exact) << " c64=" << io::format_double(c64)
             << " rel64=" << e64 << " rel128=" << e128 << " order=" << order;
  });

  criterion(2, "extension operators", 10.0, [](Verdict& v) {
    auto cs = bqtest::square(0.5, 6);
    double prev = 1e300;
    for (int n : {2, 4, 8}) {
      const auto l = fields::extension_coefficients(n);
      const double d = n;
      v.require(std::abs(l[0] + l[1] + l[2] - 1) <= 1e-12, "sum lambda = 1");
      v.require(std::abs(-d * l[1] - d * d * l[2] - 1) <= 1e-12, "-n l2 - n^2 l3 = 1");
      v.require(std::abs(d * d * l[1] + d * d * d * d * l[2] - 1) <= 1e-12, "n^2 l2 + n^4 l3 = 1");
      fields::AxialGrid grid(6.0, 400, 1.0, cs);
      auto field = bqtest::stream_field(grid.temperature_box());
      fields::ExtensionReport rep;
      auto ext = fields::extend_velocity(field, grid, n, &rep);
      v.require(fields::scaled_divergence(ext) <= 1e-8, "divergence of Ev");
      v.require(rep.amplification <= 1 + rep.epsilon, "amplification");
      v.require(rep.epsilon < prev, "eps(n) decreasing");
      prev = rep.epsilon;
      v.detail << " n=" << n << ":eps=" << rep.epsilon << ",amp=" << rep.amplification
               << ",div=" << fields::scaled_divergence(ext);
    }
  });

  criterion(3, "force-potential bound", 30.0, [](Verdict& v) {
    auto setup = bqtest::make_setup(bqtest::square(0.5, 16));
    fields::AxialGrid grid(5.0, 16, 3.0, setup.cs);
    std::mt19937 rng(2024);
    double worst = 0.0;
    for (int r = 0; r < 50; ++r) {
      auto t = bqtest::smooth_scalar(grid.flow_box(), rng);
      auto pb = diagnostics::potential_bound(t, setup);
      worst = std::max(worst, pb.remainder / (pb.constant * pb.gradient));
    }
    v.require(worst <= 1.05, "ratio within 5% slack");
    v.detail << " fields=50 worst_ratio=" << worst;
  });

  criterion(4, "thinness evaluator", 20.0, [](Verdict& v) {
    auto cs = geometry::build_rectangle(0.5, 0.5, 64, 64);
    geometry::PhysParams pp;
    pp.d = 1;
    auto rep = geometry::evaluate_thinness(cs, pp);
    const double s = 0.5, cp = s / (M_PI * std::sqrt(2.0)), cpw = s / M_PI, L = s / std::sqrt(12.0);
    const double closed = std::sqrt(14.0) * cp / std::sqrt(M_PI) * s * (cpw + L);
    const double rel_lhs = std::abs(rep.lhs / closed - 1);
    v.require(rel_lhs <= 1e-10, "LHS vs closed form");
    auto num = geometry::numeric_spectral_constants(cs);
    const double rd = std::abs(num.dirichlet_lambda1 / (2 * M_PI * M_PI / (s * s)) - 1);
    const double rn = std::abs(num.neumann_mu1 / (M_PI * M_PI / (s * s)) - 1);
    v.require(rd <= 1e-3 && rn <= 1e-3, "numeric eigenvalues");
    v.detail << " lhs=" << io::format_double(rep.lhs) << " closed=" << io::format_double(closed)
             << " rel=" << rel_lhs << " dirichlet_rel=" << rd << " neumann_rel=" << rn;
  });

  criterion(5, "fixed-point regression d=0", 600.0, [&](Verdict& v) {
    regression_checks(v, run_config("regression_d0.conf", work.path / "run1"), false);
  });

  criterion(6, "fixed-point regression d=1", 1200.0, [&](Verdict& v) {
    regression_checks(v, run_config("regression_d1.conf", work.path / "d1"), true);
  });

  criterion(7, "gate", 0.0, [&](Verdict& v) {
    ::setenv("BQ_OUT", (work.path / "gate").c_str(), 1);
    std::ostringstream out, err;
    const int code = run::cmd_solve(cfg_path("gate_violation.conf"), out, err);
    auto cfg = config::load(cfg_path("gate_violation.conf"));
    const fs::path report = fs::path(run::output_dir(cfg)) / "condition.json";
    ::unsetenv("BQ_OUT");
    v.require(code == run::refused, "exit code 2");
    v.require(fs::exists(report), "condition.json written");
    v.require(out.str().find("\"satisfied\": false") != std::string::npos, "ConditionReport");
    v.detail << " exit=" << code;
  });

  criterion(8, "Helmholtz projection", 10.0, [](Verdict& v) {
    auto cs = bqtest::square(0.5, 8);
    fields::Box b{16, -2.0, 0.25, cs};
    fields::FaceLayout faces(b);
    fields::CellLayout cells(b, 0, b.nx);
    const auto grad = fields::gradient_matrix(faces, cells);
    std::mt19937 rng(99);
    double idem = 0.0, contr = 0.0, gres = 0.0;
    for (int r = 0; r < 20; ++r) {
      fields::VectorField g(b);
      faces.scatter(faces.gather(bqtest::random_vector(b, rng)), g);
      auto p = fields::helmholtz_project(g);
      auto pp = fields::helmholtz_project(p);
      idem = std::max(idem, (faces.gather(pp) - faces.gather(p)).norm() / faces.gather(p).norm());
      contr = std::max(contr, fields::l2_norm(p) / fields::l2_norm(g) - 1.0);
      linalg::Vec q = linalg::Vec::Random(static_cast<Eigen::Index>(cells.size()));
      fields::VectorField gq(b);
      faces.scatter(grad * q, gq);
      gres = std::max(gres, fields::l2_norm(fields::helmholtz_project(gq)) / fields::l2_norm(gq));
    }
    v.require(idem <= 1e-9, "idempotence");
    v.require(contr <= 1e-9, "contraction");
    v.require(gres <= 1e-9, "gradients");
    v.detail << " fields=20 idempotence=" << idem << " contraction_excess=" << contr
             << " gradient_residual=" << gres;
  });

  criterion(9, "determinism", 0.0, [&](Verdict& v) {
    const fs::path first = work.path / "run1";
    v.require(fs::exists(first), "criterion 5 outputs present");
    run_config("regression_d0.conf", work.path / "run2");
    const auto a = read_outputs(first), b = read_outputs(work.path / "run2");
    v.require(!a.empty(), "outputs found");
    v.require(a.size() == b.size(), "same file set");
    std::size_t same = 0;
    for (const auto& [name, text] : a) {
      auto it = b.find(name);
      if (it != b.end() && it->second == text) ++same;
      else v.require(false, "differs: " + name);
    }
    v.detail << " files=" << a.size() << " identical=" << same;
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
