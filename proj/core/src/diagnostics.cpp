#include "bqwave/diagnostics.hpp"

#include "bqwave/error.hpp"
#include "bqwave/operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bqwave::diagnostics {

using linalg::Vec;

bool AuditReport::passed() const {
  return std::all_of(records.begin(), records.end(),
                     [](const AuditRecord& r) { return !r.asserted || r.pass; });
}

const AuditRecord* AuditReport::find(const std::string& name) const {
  for (const auto& r : records)
    if (r.name == name) return &r;
  return nullptr;
}

void AuditReport::append(const AuditReport& other) {
  records.insert(records.end(), other.records.begin(), other.records.end());
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
}

AuditRecord relative_check(std::string name, std::string anchor, double lhs, double rhs,
                           double slack, bool asserted) {
  AuditRecord r;
  r.name = std::move(name);
  r.anchor = std::move(anchor);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = slack;
  r.asserted = asserted;
  r.pass = std::isfinite(lhs) && std::isfinite(rhs) && lhs <= rhs * (1.0 + slack);
  return r;
}

AuditRecord absolute_check(std::string name, std::string anchor, double lhs, double rhs,
                           double tol) {
  AuditRecord r;
  r.name = std::move(name);
  r.anchor = std::move(anchor);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = tol;
  r.absolute = true;
  r.pass = std::isfinite(lhs) && lhs <= rhs + tol;
  return r;
}

namespace {

geometry::Vec2 origin_of(const Setup& setup) {
  return setup.origin == geometry::OriginConvention::centroid ? setup.cs->centroid()
                                                               : geometry::Vec2{0.0, 0.0};
}

// max |c - v^1| over the axial faces of R_a
double relative_axial_speed(const WaveState& s) {
  if (s.v.u.size() == 0) return std::abs(s.c);
  return (s.v.u.array() - s.c).abs().maxCoeff();
}

double weighted_norm(const Vec& x, double volume) { return std::sqrt(x.squaredNorm() * volume); }

}  // namespace

double nonzero_reaction(const ScalarField& t, const reaction::NonlinearitySpec& spec) {
  const auto& b = t.box;
  double acc = 0.0;
  for (int i = 0; i < b.nx; ++i)
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k)
        if (b.cs->active(j, k)) acc += reaction::ignition_value(spec, t.at(i, j, k));
  return acc * b.cell_volume();
}

AuditReport verify_th_rd(const WaveState& s, const Setup& setup, const AuditOptions& opts) {
  AuditReport rep;
  const auto& b = s.t.box;
  const auto& cs = *b.cs;
  const auto& spec = setup.phys.reaction;

  double tmin = std::numeric_limits<double>::infinity();
  double tmax = -tmin;
  double right_max = -tmin;
  for (int i = 0; i < b.nx; ++i)
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k) {
        if (!cs.active(j, k)) continue;
        const double v = s.t.at(i, j, k);
        tmin = std::min(tmin, v);
        tmax = std::max(tmax, v);
        if (b.x(i) > 1e-9 * b.hx) right_max = std::max(right_max, v);
      }

  rep.records.push_back(absolute_check("th_rd.i.lower", "temperature stays in [0,1]", -tmin, 0.0,
                                       opts.abs_tol));
  rep.records.push_back(absolute_check("th_rd.i.upper", "temperature stays in [0,1]", tmax, 1.0,
                                       opts.abs_tol));
  rep.records.push_back(absolute_check("th_rd.ii", "T <= theta0 for x > 0", right_max,
                                       spec.theta0, opts.abs_tol));

  const double vsup = s.v.u.size() ? s.v.sup_norm() : 0.0;
  rep.records.push_back(relative_check("th_rd.iii", "|c| <= ||v|| + 2 ||f'||^(1/2)",
                                       std::abs(s.c),
                                       vsup + 2.0 * std::sqrt(reaction::lipschitz_bound(spec)),
                                       opts.slack));

  const double rel = relative_axial_speed(s);
  const double area = cs.area();
  const double a = s.a();
  rep.records.push_back(relative_check("th_rd.iv", "||grad T||^2 <= |Omega| (7/2 ||c - v1|| + 1/a)",
                                       fields::gradient_norm_sq(s.t),
                                       area * (3.5 * rel + 1.0 / a), opts.slack));
  rep.reaction_integral = nonzero_reaction(s.t, spec);
  rep.records.push_back(relative_check("th_rd.v", "tau int f(T) <= |Omega| (4 ||c - v1|| + 1/a)",
                                       s.tau * rep.reaction_integral, area * (4.0 * rel + 1.0 / a),
                                       opts.slack));
  return rep;
}

EnergyIdentity energy_identity(const WaveState& s, const Setup& setup) {
  const auto& t = s.t;
  const auto& b = t.box;
  const auto& cs = *b.cs;
  EnergyIdentity e;
  e.lhs = fields::gradient_norm_sq(t);

  double ft = 0.0;
  for (int i = 1; i + 1 < b.nx; ++i)
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k)
        if (cs.active(j, k)) {
          const double v = t.at(i, j, k);
          ft += reaction::ignition_value(setup.phys.reaction, v) * v;
        }
  ft *= s.tau * b.cell_volume();

  double mean = 0.0;
  for (int j = 0; j < b.ny(); ++j)
    for (int k = 0; k < b.nz(); ++k) mean += cs.weight(j, k) * t.at(0, j, k);
  e.theta_minus = mean / cs.area();
  e.rhs = ft - 0.5 * s.c * e.theta_minus * e.theta_minus * cs.area();
  e.residual = std::abs(e.lhs - e.rhs) / std::max({std::abs(e.lhs), std::abs(e.rhs), 1e-14});
  return e;
}

double energy_identity_residual(const WaveState& state, const Setup& setup) {
  return energy_identity(state, setup).residual;
}

Profiles profiles_and_monotonicity(const ScalarField& t, double tol) {
  const auto& b = t.box;
  const auto& cs = *b.cs;
  Profiles p;
  for (int i = 0; i < b.nx; ++i) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    double mean = 0.0;
    for (int j = 0; j < b.ny(); ++j)
      for (int k = 0; k < b.nz(); ++k) {
        if (!cs.active(j, k)) continue;
        const double v = t.at(i, j, k);
        hi = std::max(hi, v);
        lo = std::min(lo, v);
        mean += cs.weight(j, k) * v;
      }
    p.x.push_back(b.x(i));
    p.max.push_back(hi);
    p.min.push_back(lo);
    p.mean.push_back(mean / cs.area());
  }
  for (std::size_t i = 1; i < p.min.size(); ++i) {
    const double inc = p.min[i] - p.min[i - 1];
    p.worst_increase = std::max(p.worst_increase, inc);
    if (inc > tol) p.monotone = false;
  }
  return p;
}

LeftLimit classify_left_limit(const ScalarField& t, const reaction::NonlinearitySpec& spec,
                              const AuditOptions& opts) {
  const auto prof = profiles_and_monotonicity(t, opts.monotone_tol);
  const int n = static_cast<int>(prof.mean.size());
  const int w = std::max(2, static_cast<int>(std::ceil(opts.plateau_fraction * n)));
  LeftLimit out;
  double lo = prof.mean[0], hi = prof.mean[0], sum = 0.0;
  for (int i = 0; i < w && i < n; ++i) {
    lo = std::min(lo, prof.mean[i]);
    hi = std::max(hi, prof.mean[i]);
    sum += prof.mean[i];
    out.max_mean_gap = std::max(out.max_mean_gap, prof.max[i] - prof.mean[i]);
  }
  out.variation = hi - lo;
  out.plateau = out.variation < opts.plateau_tol;
  if (!out.plateau)
    throw Error("left plateau not detected (cross-mean varies by " + std::to_string(out.variation) +
                " over the left window); increase a");
  out.theta_minus = sum / std::min(w, n);
  if (out.theta_minus <= spec.theta0 + 0.02)
    out.branch = "quenched-ish";
  else if (out.theta_minus >= 0.98)
    out.branch = "full-burn";
  else
    out.branch = "indeterminate";

  const auto growth = reaction::quadratic_growth_check(spec);
  if (growth.holds) {
    const double size = spec.k * (1.0 + reaction::sup_value(spec) + reaction::lipschitz_bound(spec));
    out.lemma_note = "quadratic growth holds with k_min = " + std::to_string(growth.k_min) +
                     "; k (1 + |f| + |f'|) = " + std::to_string(size) +
                     "; theta_- = 1 is predicted when this is below the (unquantified) section constant";
  } else {
    out.lemma_note = "quadratic growth bound does not hold; no prediction for theta_-";
  }
  return out;
}

PotentialBound potential_bound(const ScalarField& t_ext, const Setup& setup) {
  const auto& cs = *t_ext.box.cs;
  const auto& rho = setup.phys.rho;
  const auto origin = origin_of(setup);
  const auto q = flow::potential_q(t_ext, rho, origin);
  const auto r = flow::potential_remainder(t_ext, q, rho);
  PotentialBound pb;
  pb.remainder = fields::l2_norm(r);
  pb.gradient = std::sqrt(fields::gradient_norm_sq(t_ext));
  pb.constant = geometry::norm(rho) * geometry::poincare_wirtinger_constant(cs, setup.cpw) +
                geometry::transverse_moment_about(cs, rho, origin);
  return pb;
}

AuditReport verify_apriori_chain(const WaveState& s, const Setup& setup, const AuditOptions& opts) {
  AuditReport rep;
  if (s.t_ext.box.nx == 0 || s.u.box.nx == 0) {
    rep.warnings.push_back("no retained flow; a priori chain skipped");
    return rep;
  }
  const auto& box = s.u.box;
  const auto& cs = *box.cs;
  const double nu = setup.phys.nu;
  const double tau = s.tau;
  const int d = setup.phys.d;
  const double vol = box.cell_volume();
  const double cp = geometry::poincare_constant(cs);

  const auto pb = potential_bound(s.t_ext, setup);
  rep.records.push_back(relative_check("quattro", "||T rho - grad q|| <= (|rho| C_PW + L) ||grad T||",
                                       pb.remainder, pb.constant * pb.gradient, opts.slack));

  fields::FaceLayout faces(box);
  const Vec x = faces.gather(s.u);
  const auto stiff = fields::vector_stiffness(faces);
  const Vec kx = stiff * x;
  const double grad_u = std::sqrt(std::max(0.0, x.dot(kx) * vol));
  const double lap_u = weighted_norm(kx, vol);
  const double ux = weighted_norm(fields::vector_axial_derivative(faces) * x, vol);
  double adv = 0.0;
  if (d != 0 && s.v_ext.box.nx != 0) {
    const auto scheme = s.flow_stats.scheme;
    adv = weighted_norm(fields::vector_advection(faces, s.v_ext, scheme) * x, vol);
  }

  rep.records.push_back(relative_check("due", "||grad u|| <= tau (C_P / nu) (|rho| C_PW + L) ||grad T||",
                                       grad_u, tau * cp / nu * pb.constant * pb.gradient,
                                       opts.slack));
  rep.records.push_back(relative_check("cinque",
                                       "||c u_x|| <= tau (|rho| C_PW + L) ||grad T|| + tau d ||v . grad u||",
                                       std::abs(s.c) * ux,
                                       tau * pb.constant * pb.gradient + tau * d * adv, opts.slack));
  const double usup = s.u.sup_norm();
  rep.records.push_back(relative_check("thXie",
                                       "||u||_inf <= (2 pi)^(-1/2) ||Laplace u||^(1/2) ||grad u||^(1/2)",
                                       usup,
                                       std::sqrt(lap_u * grad_u) / std::sqrt(2.0 * std::numbers::pi),
                                       opts.slack));

  // Stokes data g = -nu Laplace u + grad p from the discrete solution.
  fields::CellLayout cells(box, 0, box.nx);
  const auto grad = fields::gradient_matrix(faces, cells);
  const Vec g = nu * kx + grad * cells.gather(s.p);
  const double gnorm = weighted_norm(g, vol);
  const double stokes = 2.0 / std::sqrt(2.0 * std::numbers::pi * nu) * std::sqrt(grad_u * gnorm);
  auto ratio = relative_check("thour_bound.ratio",
                              "||u||_inf / (2 (2 pi nu)^(-1/2) ||grad u||^(1/2) ||g||^(1/2))",
                              usup, stokes, 0.0, false);
  ratio.note = "remaining term carries an unquantified section constant";
  rep.records.push_back(ratio);

  if (d == 1) {
    const double vsup = s.v_ext.box.nx ? s.v_ext.sup_norm() : 0.0;
    const double lead = 2.0 * cp / (nu * std::sqrt(std::numbers::pi * nu)) * tau * pb.constant *
                        std::sqrt(tau * vsup) * pb.gradient;
    auto r2 = relative_check("th_uniform_H2.ii.ratio",
                             "||u||_inf / (2 C_P (nu sqrt(pi nu))^(-1) (|rho| C_PW + L) ||v||^(1/2) ||grad T||)",
                             usup, lead, 0.0, false);
    r2.note = "plus an unquantified multiple of ||grad T||";
    rep.records.push_back(r2);
  } else {
    auto r1 = relative_check("th_uniform_H2.i.ratio", "||u||_inf / ||grad T||", usup, pb.gradient,
                             0.0, false);
    r1.note = "constant unquantified";
    rep.records.push_back(r1);
  }
  return rep;
}

AuditReport audit_all(const WaveState& s, const Setup& setup, const AuditOptions& opts) {
  AuditReport rep = verify_th_rd(s, setup, opts);
  rep.append(verify_apriori_chain(s, setup, opts));

  rep.profiles = profiles_and_monotonicity(s.t, opts.monotone_tol);
  auto mono = absolute_check("monotone_min", "m(x) is non-increasing", rep.profiles.worst_increase,
                             0.0, opts.monotone_tol);
  rep.records.push_back(mono);

  try {
    rep.left = classify_left_limit(s.t, setup.phys.reaction, opts);
    rep.has_left = true;
  } catch (const Error& e) {
    rep.warnings.emplace_back(e.what());
  }

  rep.energy = energy_identity(s, setup);
  rep.has_energy = true;
  AuditRecord energy;
  energy.name = "energy_identity";
  energy.anchor = "||grad T||^2 = tau int f(T) T - c theta_-^2 |Omega| / 2";
  energy.lhs = rep.energy.lhs;
  energy.rhs = rep.energy.rhs;
  energy.asserted = false;
  energy.pass = rep.energy.residual <= 1e-6;
  energy.note = "relative residual " + std::to_string(rep.energy.residual) +
                "; truncation-dominated, decreases as a grows";
  rep.records.push_back(energy);

  if (s.tau == 1.0) {
    const bool degenerate = setup.phys.reaction.k == 0.0;
    auto c_pos = absolute_check("speed_positive", "c > 0", -s.c, 0.0, 0.0);
    c_pos.pass = s.c > 0.0;
    c_pos.asserted = !degenerate && setup.phys.d == 0;
    rep.records.push_back(c_pos);
    auto react = absolute_check("nonzero_reaction", "0 < int f(T) < inf", -rep.reaction_integral,
                                0.0, 0.0);
    react.pass = rep.reaction_integral > 0.0 && std::isfinite(rep.reaction_integral);
    react.asserted = !degenerate;
    if (degenerate) react.note = "degenerate: zero reaction";
    rep.records.push_back(react);
  }
  return rep;
}

}  // namespace bqwave::diagnostics
