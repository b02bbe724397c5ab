#include "bqwave/fixedpoint.hpp"

#include "bqwave/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bqwave::fixedpoint {

using linalg::Vec;

void FixedPointConfig::validate() const {
  if (!(damping > 0.0 && damping <= 1.0)) throw InvalidArgument("damping must lie in (0, 1]");
  if (tau_schedule.empty()) throw InvalidArgument("tau schedule is empty");
  if (a_schedule.empty()) throw InvalidArgument("a schedule is empty");
  for (std::size_t i = 0; i < tau_schedule.size(); ++i) {
    if (!(tau_schedule[i] >= 0.0 && tau_schedule[i] <= 1.0))
      throw InvalidArgument("tau schedule entries must lie in [0, 1]");
    if (i > 0 && !(tau_schedule[i] > tau_schedule[i - 1]))
      throw InvalidArgument("tau schedule must be strictly ascending");
  }
  for (std::size_t i = 0; i < a_schedule.size(); ++i) {
    if (!(a_schedule[i] > 0.0)) throw InvalidArgument("a schedule entries must be positive");
    if (i > 0 && a_schedule[i] < a_schedule[i - 1])
      throw InvalidArgument("a schedule must be ascending");
  }
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
  if (extension_n < 2) throw InvalidArgument("extension order n must be >= 2");
  if (!(truncation_factor > 0.0)) throw InvalidArgument("truncation factor must be positive");
  if (!(hx > 0.0)) throw InvalidArgument("axial spacing must be positive");
  if (anderson_depth < 0) throw InvalidArgument("anderson_depth must be >= 0");
  if (flow_refresh < 1) throw InvalidArgument("flow_refresh must be >= 1");
}

double flow_margin(const Setup& setup, const FixedPointConfig& cfg) {
  const double cp = geometry::poincare_constant(*setup.cs);
  return std::max(1.0, std::max(4.0, 8.0 * cp) * cfg.truncation_factor);
}

fields::AxialGrid make_grid(const Setup& setup, const FixedPointConfig& cfg, double a) {
  const int n = std::max(2, static_cast<int>(std::lround(a / cfg.hx)));
  return fields::AxialGrid(a, n, flow_margin(setup, cfg), setup.cs);
}

WaveState initial_state(const Setup& setup, const FixedPointConfig& cfg, double a) {
  WaveState s;
  s.grid = make_grid(setup, cfg, a);
  s.c = temperature::planar_root(a, setup.phys.theta0());
  s.tau = 0.0;
  s.t = temperature::planar_field(s.grid.temperature_box(), s.c, a);
  s.v = VectorField(s.grid.temperature_box());
  s.v.divergence_free = true;
  return s;
}

namespace {

temperature::TemperatureProblem temperature_problem(const WaveState& state, const Setup& setup) {
  temperature::TemperatureProblem prob;
  prob.box = state.grid.temperature_box();
  prob.c = state.c;
  prob.tau = state.tau;
  prob.v = &state.v;
  prob.z = &state.t;
  prob.reaction = setup.phys.reaction;
  return prob;
}

double max_diff(const Vec& a, const Vec& b) {
  return a.size() ? (a - b).cwiseAbs().maxCoeff() : 0.0;
}

double max_diff(const VectorField& a, const VectorField& b) {
  return std::max({max_diff(a.u, b.u), max_diff(a.v, b.v), max_diff(a.w, b.w)});
}

// (c, T, v) as one vector, and the image minus the state in the same layout.
Vec pack(const WaveState& s) {
  const auto nt = s.t.values.size();
  Vec x(1 + nt + s.v.u.size() + s.v.v.size() + s.v.w.size());
  x[0] = s.c;
  x.segment(1, nt) = s.t.values;
  x.segment(1 + nt, s.v.u.size()) = s.v.u;
  x.segment(1 + nt + s.v.u.size(), s.v.v.size()) = s.v.v;
  x.tail(s.v.w.size()) = s.v.w;
  return x;
}

Vec pack(const KaImage& img, const WaveState& s) {
  Vec d(1 + s.t.values.size() + s.v.u.size() + s.v.v.size() + s.v.w.size());
  const auto nt = s.t.values.size();
  d[0] = img.c - s.c;
  d.segment(1, nt) = img.t.values - s.t.values;
  d.segment(1 + nt, s.v.u.size()) = img.v.u - s.v.u;
  d.segment(1 + nt + s.v.u.size(), s.v.v.size()) = img.v.v - s.v.v;
  d.tail(s.v.w.size()) = img.v.w - s.v.w;
  return d;
}

void unpack(const Vec& x, WaveState& s) {
  const auto nt = s.t.values.size();
  s.c = x[0];
  s.t.values = x.segment(1, nt);
  s.v.u = x.segment(1 + nt, s.v.u.size());
  s.v.v = x.segment(1 + nt + s.v.u.size(), s.v.v.size());
  s.v.w = x.tail(s.v.w.size());
  s.v.divergence_free = true;
}

// Type-II Anderson mixing on the relaxed map x -> x + step(x).
class Anderson {
 public:
  explicit Anderson(int depth) : depth_(depth) {}
  void clear() {
    dx_.clear();
    df_.clear();
    has_last_ = false;
  }
  Vec update(const Vec& x, const Vec& f) {
    if (has_last_) {
      dx_.push_back(x - last_x_);
      df_.push_back(f - last_f_);
      if (static_cast<int>(dx_.size()) > depth_) {
        dx_.erase(dx_.begin());
        df_.erase(df_.begin());
      }
    }
    last_x_ = x;
    last_f_ = f;
    has_last_ = true;
    if (dx_.empty()) return x + f;
    const int m = static_cast<int>(dx_.size());
    Eigen::MatrixXd F(f.size(), m);
    for (int i = 0; i < m; ++i) F.col(i) = df_[static_cast<std::size_t>(i)];
    const Eigen::VectorXd gamma = F.colPivHouseholderQr().solve(f);
    Vec out = x + f;
    for (int i = 0; i < m; ++i)
      out -= gamma[i] * (dx_[static_cast<std::size_t>(i)] + df_[static_cast<std::size_t>(i)]);
    return out;
  }

 private:
  int depth_;
  std::vector<Vec> dx_, df_;
  Vec last_x_, last_f_;
  bool has_last_ = false;
};

bool flow_forced(const WaveState& state, const Setup& setup) {
  return state.tau != 0.0 && geometry::norm(setup.phys.rho) != 0.0;
}

}  // namespace

KaImage evaluate_Ka(WaveState& state, const Setup& setup, const FixedPointConfig& cfg,
                    const KaOptions& opts) {
  const auto& grid = state.grid;
  const auto rbox = grid.temperature_box();
  KaImage img;

  // (1)-(2): extensions and the flow subproblem.
  const bool forced = flow_forced(state, setup);
  const bool need_flow = opts.refresh_flow || state.u.box.nx == 0;
  if (need_flow) {
    state.t_ext = fields::extend_temperature(state.t, grid);
    const bool coupled = state.tau * setup.phys.d != 0.0;
    state.v_ext = coupled ? fields::extend_velocity(state.v, grid, cfg.extension_n)
                          : VectorField(grid.flow_box());
    if (forced) {
      flow::FlowProblem fp;
      fp.box = grid.flow_box();
      fp.c = state.c;
      fp.tau = state.tau;
      fp.d = setup.phys.d;
      fp.nu = setup.phys.nu;
      fp.rho = setup.phys.rho;
      fp.t_ext = &state.t_ext;
      fp.v_ext = &state.v_ext;
      fp.policy = cfg.peclet;
      const bool warm = state.u.box.same_as(fp.box) && state.p.box.same_as(fp.box);
      fp.u_guess = warm ? &state.u : nullptr;
      fp.p_guess = warm ? &state.p : nullptr;
      auto sol = flow::solve_flow(fp);
      state.u = std::move(sol.u);
      state.p = std::move(sol.p);
      state.flow_stats = std::move(sol.stats);
    } else {
      state.u = VectorField(grid.flow_box());
      state.u.divergence_free = true;
      state.p = ScalarField(grid.flow_box());
      state.flow_stats = {};
    }
    img.flow_refreshed = true;
  }
  img.v = fields::restrict_to(state.u, rbox, grid.offset());

  // (3): temperature with the reaction evaluated at Z = T.
  const auto prob = temperature_problem(state, setup);
  img.t = temperature::solve_temperature(prob);

  // (4): normalization update of the speed.
  const auto top = temperature::max_right_half(img.t);
  img.c = state.c - setup.phys.theta0() + top.value;

  if (opts.compute_gain) {
    temperature::SolverOptions loose;
    loose.rel_tol = 1e-8;
    const auto s =
        temperature::solve_homogeneous(prob, temperature::axial_derivative(img.t), nullptr, loose);
    img.gain = s.at(top.i, top.j, top.k);
  }
  return img;
}

WaveState apply_Ka(const WaveState& state, const Setup& setup, const FixedPointConfig& cfg,
                   double omega, double omega_c) {
  WaveState next = state;
  const auto img = evaluate_Ka(next, setup, cfg, {true, false});
  next.c = state.c + omega_c * (img.c - state.c);
  next.t.values = state.t.values + omega * (img.t.values - state.t.values);
  next.v.u = state.v.u + omega * (img.v.u - state.v.u);
  next.v.v = state.v.v + omega * (img.v.v - state.v.v);
  next.v.w = state.v.w + omega * (img.v.w - state.v.w);
  next.v.divergence_free = true;
  next.damping = omega;
  return next;
}

StageRecord solve_stage(WaveState& state, double tau, const Setup& setup,
                        const FixedPointConfig& cfg) {
  state.tau = tau;
  state.converged = false;
  state.residuals.clear();
  StageRecord rec;
  rec.a = state.a();
  rec.tau = tau;

  // At tau = 0, T depends on c only: undamped fields and a Newton step in c.
  double omega = tau == 0.0 ? 1.0 : cfg.damping;
  const bool forced = flow_forced(state, setup);
  double last = std::numeric_limits<double>::infinity();
  int growth = 0;
  int since_flow = 0;
  bool near = false;
  const bool accel = cfg.anderson_depth > 0 && tau != 0.0;
  Anderson anderson(cfg.anderson_depth);
  double best = std::numeric_limits<double>::infinity();
  double gain = 0.0;

  for (int it = 1; it <= cfg.max_iter; ++it) {
    const bool refresh =
        it == 1 || !forced || near || since_flow + 1 >= cfg.flow_refresh;
    // the sensitivity moves slowly; refresh it with the flow
    const bool want_gain = refresh || tau == 0.0;
    const auto img = evaluate_Ka(state, setup, cfg, {refresh, want_gain});
    if (want_gain) gain = img.gain;
    since_flow = img.flow_refreshed ? 0 : since_flow + 1;
    if (img.flow_refreshed) rec.flow_iterations += state.flow_stats.iterations;

    const double dc = std::abs(img.c - state.c);
    const double dt = max_diff(img.t.values, state.t.values);
    const double dv = max_diff(img.v, state.v);
    const double res = std::max({dc, dt, dv});
    state.residuals.push_back(res);
    state.iterations = it;

    if (!std::isfinite(res))
      throw SolverError("fixed point", "non-finite residual at tau = " + std::to_string(tau),
                        state.residuals);
    if (res <= cfg.tol && img.flow_refreshed) {
      state.c = img.c;
      state.t = img.t;
      state.v = img.v;
      state.v.divergence_free = true;
      state.converged = true;
      break;
    }
    near = res <= 100.0 * cfg.tol;

    // Relaxation of c from the sensitivity d max T / d c.
    double omega_c;
    if (tau == 0.0) {
      omega_c = gain < 0.0 ? std::clamp(-1.0 / gain, 0.05, 1.0) : 1.0;
    } else {
      omega_c = std::clamp(1.0 / (1.0 - gain), 0.05, 1.0);
    }
    if (res > 1.2 * last) {
      if (++growth >= 3) {
        omega = std::max(0.5 * omega, 0.02);
        growth = 0;
      }
    } else {
      growth = 0;
    }
    last = res;

    Vec step = pack(img, state);
    step[0] *= omega_c;
    step.tail(step.size() - 1) *= omega;
    if (accel) {
      Vec x = pack(state);
      if (res > 2.0 * best) anderson.clear();
      best = std::min(best, res);
      x = anderson.update(x, step);
      unpack(x, state);
    } else {
      unpack(pack(state) + step, state);
    }
  }
  state.damping = omega;
  rec.c = state.c;
  rec.iterations = state.iterations;
  rec.residual = state.residuals.empty() ? 0.0 : state.residuals.back();
  rec.residuals = state.residuals;
  rec.damping = omega;
  rec.converged = state.converged;
  return rec;
}

namespace {

void gate(const Setup& setup) {
  if (setup.phys.d != 1) return;
  auto report = geometry::evaluate_thinness(*setup.cs, setup.phys, setup.cpw, setup.origin);
  if (!report.admissible()) throw GateRefusal(std::move(report));
}

bool zero_reaction(const WaveState& s, const Setup& setup) {
  if (setup.phys.reaction.k == 0.0) return true;
  for (Eigen::Index q = 0; q < s.t.values.size(); ++q)
    if (reaction::ignition_value(setup.phys.reaction, s.t.values[q]) > 0.0) return false;
  return true;
}

std::string degenerate_message(const WaveState& s) {
  return "degenerate: zero reaction at the fixed point; the normalization is held only by the "
         "truncation (c = " + std::to_string(s.c) + " tends to 0 as a grows)";
}

}  // namespace

HomotopyResult solve_homotopy(const FixedPointConfig& cfg, const Setup& setup, double a,
                              const StageCallback& on_stage) {
  cfg.validate();
  geometry::validate(setup.phys);
  if (!cfg.force) gate(setup);

  HomotopyResult out;
  out.state = initial_state(setup, cfg, a);
  for (double tau : cfg.tau_schedule) {
    WaveState trial = out.state;
    StageRecord rec;
    try {
      rec = solve_stage(trial, tau, setup, cfg);
    } catch (const SolverError& e) {
      out.failure = std::string(e.what());
      return out;
    }
    out.stages.push_back(rec);
    if (on_stage) on_stage(rec);
    if (!rec.converged) {
      out.failure = "no convergence at tau = " + std::to_string(tau) + " after " +
                    std::to_string(rec.iterations) + " iterations (residual " +
                    std::to_string(rec.residual) + ")";
      return out;
    }
    out.state = std::move(trial);
  }
  out.converged = true;
  out.degenerate = zero_reaction(out.state, setup);
  if (out.degenerate) out.failure = degenerate_message(out.state);
  return out;
}

HomotopyResult solve_homotopy(const FixedPointConfig& cfg, const Setup& setup) {
  cfg.validate();
  return solve_homotopy(cfg, setup, cfg.a_schedule.front());
}

WaveState pad_state(const WaveState& state, const fields::AxialGrid& grid) {
  const auto old_box = state.grid.temperature_box();
  const auto new_box = grid.temperature_box();
  if (std::abs(old_box.hx - new_box.hx) > 1e-12 * old_box.hx || old_box.cs != new_box.cs)
    throw InvalidArgument("pad_state: grids must share spacing and section");
  const int shift = grid.half_cells() - state.grid.half_cells();
  if (shift < 0) throw InvalidArgument("pad_state: new domain is shorter");

  WaveState s;
  s.grid = grid;
  s.c = state.c;
  s.tau = state.tau;
  s.t = ScalarField(new_box);
  const auto& cs = *new_box.cs;
  for (int i = 0; i < new_box.nx; ++i) {
    const int q = i - shift;
    for (int j = 0; j < new_box.ny(); ++j)
      for (int k = 0; k < new_box.nz(); ++k) {
        if (!cs.active(j, k)) continue;
        if (q < 0) s.t.at(i, j, k) = 1.0;
        else if (q >= old_box.nx) s.t.at(i, j, k) = 0.0;
        else s.t.at(i, j, k) = state.t.at(q, j, k);
      }
  }
  VectorField v(new_box);
  const Eigen::Index su = new_box.ny() * new_box.nz(), sv = (new_box.ny() + 1) * new_box.nz(),
                     sw = new_box.ny() * (new_box.nz() + 1);
  v.u.segment(shift * su, state.v.u.size()) = state.v.u;
  v.v.segment(shift * sv, state.v.v.size()) = state.v.v;
  v.w.segment(shift * sw, state.v.w.size()) = state.v.w;
  s.v = shift == 0 ? v : fields::helmholtz_project(v);
  s.v.divergence_free = true;
  if (shift == 0) {
    s.u = state.u;
    s.p = state.p;
  }
  return s;
}

ContinuationResult continue_in_a(const FixedPointConfig& cfg, const Setup& setup,
                                 const StageCallback& on_stage) {
  cfg.validate();
  ContinuationResult out;
  for (std::size_t n = 0; n < cfg.a_schedule.size(); ++n) {
    const double a = cfg.a_schedule[n];
    const bool warm = n > 0 && out.runs.back().converged;
    if (!warm) {
      out.runs.push_back(solve_homotopy(cfg, setup, a, on_stage));
    } else {
      HomotopyResult run;
      WaveState state = pad_state(out.runs.back().state, make_grid(setup, cfg, a));
      StageRecord rec;
      try {
        rec = solve_stage(state, cfg.tau_schedule.back(), setup, cfg);
        run.stages.push_back(rec);
        if (on_stage) on_stage(rec);
        if (rec.converged) {
          run.converged = true;
          run.state = std::move(state);
          run.degenerate = zero_reaction(run.state, setup);
          if (run.degenerate) run.failure = degenerate_message(run.state);
        } else {
          run.failure = "no convergence at a = " + std::to_string(a);
          run.state = out.runs.back().state;
        }
      } catch (const SolverError& e) {
        run.failure = e.what();
        run.state = out.runs.back().state;
      }
      out.runs.push_back(std::move(run));
    }
    out.a.push_back(a);
    out.c.push_back(out.runs.back().state.c);
    if (n > 0) out.cauchy.push_back(std::abs(out.c[n] - out.c[n - 1]));
  }
  return out;
}

}  // namespace bqwave::fixedpoint
