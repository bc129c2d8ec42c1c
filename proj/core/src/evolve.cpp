#include "capelast/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "capelast/error.hpp"

namespace capelast {

namespace {

/// Raw coordinate derivatives of one scalar field.
struct RawGrad {
  VolumeField d1, d2, d3;
};

RawGrad raw_grad(const Grid& g, const VolumeField& f) { return {d_tan(g, f, 1), d_tan(g, f, 2), d_vert(g, f)}; }

/// d_i^phi from raw derivatives, i in 0..2.
VolumeField twisted(const GraphMap& gm, const RawGrad& r, int i) {
  switch (i) {
    case 0: return r.d1 + gm.a31 * r.d3;
    case 1: return r.d2 + gm.a32 * r.d3;
    default: return gm.a33 * r.d3;
  }
}

/// vbar . dbar f + (v . N - d_t phi) d_3^phi f
VolumeField advection(const GraphMap& gm, const VectorField& v, const VolumeField& U, const RawGrad& r) {
  return v[0] * r.d1 + v[1] * r.d2 + U * gm.a33 * r.d3;
}

struct Stage {
  SurfaceField psi;
  VectorField v;
  std::array<VectorField, 3> F;
};

Stage combine(const Stage& base, double h, const Tendencies& k) {
  Stage out = base;
  axpy(out.psi, h, k.psi);
  for (int c = 0; c < 3; ++c) {
    axpy(out.v[c], h, k.v[c]);
    for (int j = 0; j < 3; ++j) axpy(out.F[j][c], h, k.F[j][c]);
  }
  return out;
}

void accumulate(Stage& acc, double h, const Tendencies& k) {
  axpy(acc.psi, h, k.psi);
  for (int c = 0; c < 3; ++c) {
    axpy(acc.v[c], h, k.v[c]);
    for (int j = 0; j < 3; ++j) axpy(acc.F[j][c], h, k.F[j][c]);
  }
}

}  // namespace

Tendencies tendencies(const State& s, const GraphMap& gm, bool dealias_out) {
  const Grid& g = gm.grid;
  if (!g.compatible(s.q) || !g.compatible(s.psi)) throw PreconditionError("tendencies: shape mismatch");
  const VolumeField U = transport_speed(gm, s.v);

  std::array<RawGrad, 3> rv;
  std::array<std::array<RawGrad, 3>, 3> rF;  // rF[j][i] for F_ij
  for (int i = 0; i < 3; ++i) rv[i] = raw_grad(g, s.v[i]);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) rF[j][i] = raw_grad(g, s.F[j][i]);
  const RawGrad rq = raw_grad(g, s.q);

  std::array<std::array<VolumeField, 3>, 3> gv;  // gv[i][l] = d_l^phi v_i
  for (int i = 0; i < 3; ++i)
    for (int l = 0; l < 3; ++l) gv[i][l] = twisted(gm, rv[i], l);

  Tendencies t;
  t.psi = kinematic_rate(g, s.psi, s.v);
  for (int i = 0; i < 3; ++i) {
    VolumeField dv = -advection(gm, s.v, U, rv[i]);
    dv -= twisted(gm, rq, i);
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) dv += s.F[k][l] * twisted(gm, rF[k][i], l);
    t.v[i] = std::move(dv);
  }
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) {
      VolumeField dF = -advection(gm, s.v, U, rF[j][i]);
      for (int l = 0; l < 3; ++l) dF += s.F[j][l] * gv[i][l];
      t.F[j][i] = std::move(dF);
    }

  if (dealias_out) {
    t.psi = dealias(g, t.psi);
    for (auto& c : t.v) c = dealias(g, c);
    for (auto& col : t.F)
      for (auto& c : col) c = dealias(g, c);
  }
  return t;
}

double cfl_limit(const State& s, const GraphMap& gm) {
  const Grid& g = gm.grid;
  const double inf = std::numeric_limits<double>::infinity();
  const double dx = 2.0 * std::numbers::pi / std::max(g.nx(), g.ny());
  double vmax = 0.0;
  for (const auto& c : s.v) vmax = std::max(vmax, c.max_abs());
  const double umax = transport_speed(gm, s.v).max_abs();
  const double adv = vmax > 0.0 ? dx / vmax : inf;
  const double cap = s.sigma > 0.0 ? std::sqrt(dx * dx * dx / (std::numbers::pi * s.sigma)) : inf;
  const double vert = umax > 0.0 ? g.min_vertical_spacing() * gm.c0 / umax : inf;
  return 0.5 * std::min({adv, cap, vert});
}

Stepper::Stepper(Grid g, Cutoff cutoff, SolverOptions solver, StepOptions opts)
    : grid_(std::move(g)), cutoff_(std::move(cutoff)), solver_(grid_, solver), opts_(opts) {}

GraphMap Stepper::graphmap(const State& s) const {
  return build_graphmap(s.psi, kinematic_rate(grid_, s.psi, s.v), cutoff_, grid_);
}

StepResult Stepper::step(const State& s, double dt) const {
  if (!(dt > 0.0)) throw PreconditionError("step: dt must be positive");
  const GraphMap gm0 = graphmap(s);
  if (opts_.check_cfl) {
    const double limit = cfl_limit(s, gm0);
    if (dt > limit) {
      std::ostringstream os;
      os << "time step " << dt << " exceeds the stability bound " << limit;
      throw CflError(os.str(), limit);
    }
  }

  int iterations = 0;
  VolumeField guess = s.q;
  auto eval = [&](const Stage& y, const GraphMap* known) {
    State st;
    st.t = s.t;
    st.sigma = s.sigma;
    st.psi = y.psi;
    st.v = y.v;
    st.F = y.F;
    if (known) {
      st.q = s.q;
      return tendencies(st, *known, opts_.dealias);
    }
    const GraphMap gm = graphmap(st);
    const SolveResult r = solve_pressure(st, gm, solver_, &guess);
    iterations += r.iterations;
    st.q = r.solution;
    guess = r.solution;
    return tendencies(st, gm, opts_.dealias);
  };

  const Stage y0{s.psi, s.v, s.F};
  const Tendencies k1 = eval(y0, &gm0);
  const Tendencies k2 = eval(combine(y0, 0.5 * dt, k1), nullptr);
  const Tendencies k3 = eval(combine(y0, 0.5 * dt, k2), nullptr);
  const Tendencies k4 = eval(combine(y0, dt, k3), nullptr);
  Stage y = y0;
  accumulate(y, dt / 6.0, k1);
  accumulate(y, dt / 3.0, k2);
  accumulate(y, dt / 3.0, k3);
  accumulate(y, dt / 6.0, k4);

  State out;
  out.t = s.t + dt;
  out.sigma = s.sigma;
  out.psi = std::move(y.psi);
  out.F = std::move(y.F);
  if (opts_.filter) {
    out.psi = spectral_filter(grid_, out.psi);
    for (auto& c : y.v) c = spectral_filter(grid_, c);
    for (auto& col : out.F)
      for (auto& c : col) c = spectral_filter(grid_, c);
  }

  // The projection only reads the geometry, which does not depend on d_t psi.
  const GraphMap geom = build_graphmap(out.psi, grid_.surface(), cutoff_, grid_);
  out.v = project_divfree(y.v, geom, solver_);
  set_bottom(out.v[2], grid_.surface());
  for (auto& col : out.F) set_bottom(col[2], grid_.surface());

  SurfaceField psi_t = kinematic_rate(grid_, out.psi, out.v);
  GraphMap gm = build_graphmap(out.psi, psi_t, cutoff_, grid_);
  const SolveResult r = solve_pressure(out, gm, solver_, &guess);
  iterations += r.iterations;
  out.q = r.solution;
  return {std::move(out), std::move(psi_t), std::move(gm), iterations};
}

State step_rk4(const State& s, const Cutoff& cutoff, const Grid& g, double dt) {
  return Stepper(g, cutoff).step(s, dt).state;
}

namespace {

DiagnosticsRecord make_record(const State& s, const GraphMap& gm, const History& h, int k_max, double dt) {
  DiagnosticsRecord r;
  r.t = s.t;
  r.dt = dt;
  r.E_cons = conserved_energy(s, gm);
  const int k = std::min<int>(k_max, static_cast<int>(h.size()) - 1);
  r.E_high = higher_energy(h, gm, k);
  r.constraints = constraint_residuals(s, gm);
  r.rt_min = rt_monitor(s.q, gm, gm.grid, 0.0).rt_min;
  return r;
}

}  // namespace

RunResult run(const RunConfig& config, const RunObserver& observer) {
  const InitSpec& init = config.init;
  const Grid g = Grid::make(init.nx, init.ny, init.nz, init.b);
  const SurfaceField psi0 = sample_surface_recipe(g, init.psi);
  const Cutoff cutoff = make_spec_cutoff(init, g, psi0);
  const State s0 = build_initial_data(init, g, cutoff, config.solver);
  return run_from(config, s0, cutoff, g, observer);
}

RunResult run_from(const RunConfig& config, const State& initial, const Cutoff& cutoff, const Grid& g,
                   const RunObserver& observer) {
  if (config.t_final < initial.t) throw PreconditionError("run: t_final precedes the initial time");
  if (!(config.dt > 0.0)) throw PreconditionError("run: dt must be positive");
  if (config.snapshot_every < 1) throw PreconditionError("run: snapshot_every must be at least 1");
  if (config.k_max < 0 || config.k_max > 4) throw PreconditionError("run: k_max must be in 0..4");

  const double span = config.t_final - initial.t;
  const int steps = span > 0.0 ? static_cast<int>(std::ceil(span / config.dt - 1e-9)) : 0;
  const double dt = steps > 0 ? span / steps : 0.0;
  const Stepper stepper(g, cutoff, config.solver, config.step);

  RunResult out;
  out.history.emplace(g, cutoff, std::max<std::size_t>(config.history_length, config.k_max + 1));
  History& h = *out.history;

  auto snapshot = [&](int n, const State& s) {
    out.snapshots.push_back(s);
    if (observer.on_snapshot) observer.on_snapshot(n, s);
  };
  auto record = [&](const State& s, const GraphMap& gm) {
    const DiagnosticsRecord r = make_record(s, gm, h, config.k_max, dt);
    out.rt_min = out.diagnostics.empty() ? r.rt_min : std::min(out.rt_min, r.rt_min);
    out.diagnostics.push_back(r);
    if (observer.on_record) observer.on_record(r);
  };

  State s = initial;
  try {
    const GraphMap gm0 = stepper.graphmap(s);
    h.push(s, gm0.psi_t);
    record(s, gm0);
    snapshot(0, s);
    for (int n = 1; n <= steps; ++n) {
      StepResult r = stepper.step(s, dt);
      if (n == steps) r.state.t = config.t_final;
      s = std::move(r.state);
      h.push(s, r.psi_t);
      record(s, r.gm);
      if (n % config.snapshot_every == 0 || n == steps) snapshot(n, s);
      out.steps = n;
    }
  } catch (const DegenerateMapError& e) {
    out.aborted = true;
    out.abort_reason = e.what();
  } catch (const SolverError& e) {
    out.aborted = true;
    out.abort_reason = e.what();
  } catch (const CflError& e) {
    out.aborted = true;
    out.abort_reason = e.what();
  }
  return out;
}

}  // namespace capelast
