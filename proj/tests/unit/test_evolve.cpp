#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "capelast/config.hpp"
#include "capelast/error.hpp"
#include "capelast/evolve.hpp"
#include "capelast/manufactured.hpp"

using namespace capelast;
using std::numbers::pi;

namespace {

State rest_state(const Grid& g, double sigma = 0.0) {
  State s;
  s.sigma = sigma;
  s.psi = g.surface();
  s.v = g.vector();
  for (auto& c : s.F) c = g.vector();
  s.q = g.volume();
  return s;
}

GraphMap flat(const Grid& g) { return build_graphmap(g.surface(), g.surface(), make_polynomial_cutoff(g, 0.0), g); }

RunConfig capillary(int n, int nz, double dt, double t_final) {
  RunConfig c = parse_config(R"(
[grid]
nx = 16
ny = 16
nz = 9
[surface]
psi = mode 0.01 cos 1 0
[fields]
v = potential 0.1 cos 1 0; potential 0.05 sin 1 1
F1 = tangent 1 1 cos 1
[physics]
sigma = 0.1
)");
  c.init.nx = c.init.ny = n;
  c.init.nz = nz;
  c.dt = dt;
  c.t_final = t_final;
  return c;
}

}  // namespace

TEST(Tendencies, RestIsStationary) {
  const Grid g = Grid::make(8, 8, 9, 1.0);
  const Tendencies t = tendencies(rest_state(g), flat(g));
  EXPECT_EQ(t.psi.max_abs(), 0.0);
  for (int c = 0; c < 3; ++c) {
    EXPECT_EQ(t.v[c].max_abs(), 0.0);
    for (int j = 0; j < 3; ++j) EXPECT_EQ(t.F[j][c].max_abs(), 0.0);
  }
}

TEST(Tendencies, HorizontalShearIsSteady) {
  const Grid g = Grid::make(16, 16, 9, 1.0);
  State s = rest_state(g);
  s.v[0] = sample(g, [](double, double x2, double) { return std::cos(x2); });
  s.F[0][0] = sample(g, [](double, double x2, double) { return 0.2 * std::cos(x2); });
  const Tendencies t = tendencies(s, flat(g));
  EXPECT_LT(t.v[0].max_abs(), 1e-14);
  EXPECT_LT(t.F[0][0].max_abs(), 1e-14);
}

TEST(Tendencies, PressureGradientDrivesVelocity) {
  const Grid g = Grid::make(16, 16, 9, 1.0);
  State s = rest_state(g);
  s.q = sample(g, [](double x1, double, double z) { return std::sin(x1) * z; });
  const Tendencies t = tendencies(s, flat(g));
  EXPECT_LT((t.v[0] + sample(g, [](double x1, double, double z) { return std::cos(x1) * z; })).max_abs(), 1e-13);
  EXPECT_LT((t.v[2] + sample(g, [](double x1, double, double) { return std::sin(x1); })).max_abs(), 1e-13);
}

TEST(Tendencies, SurfaceRateMatchesManufacturedWave) {
  const Grid g = Grid::make(32, 32, 17, 1.0);
  const AnalyticFlow flow = traveling_wave({});
  const Cutoff cut = flow_cutoff(flow, g);
  const HistoryEntry e = sample_state(flow, 0.0, cut, g);
  const GraphMap gm = build_graphmap(e.state.psi, e.psi_t, cut, g);
  EXPECT_LT((tendencies(e.state, gm).psi - e.psi_t).max_abs(), 1e-12);
}

TEST(Tendencies, DealiasRemovesUpperThird) {
  const Grid g = Grid::make(24, 24, 9, 1.0);
  State s = rest_state(g);
  s.q = sample(g, [](double x1, double, double) { return 0.1 * std::cos(10 * x1); });
  EXPECT_GT(tendencies(s, flat(g)).v[0].max_abs(), 0.5);
  EXPECT_LT(tendencies(s, flat(g), true).v[0].max_abs(), 1e-14);
}

TEST(Cfl, Limits) {
  const Grid g = Grid::make(16, 16, 9, 1.0);
  EXPECT_EQ(cfl_limit(rest_state(g), flat(g)), std::numeric_limits<double>::infinity());
  const double dx = 2 * pi / 16;
  EXPECT_NEAR(cfl_limit(rest_state(g, 2.0), flat(g)), 0.5 * std::sqrt(dx * dx * dx / (2 * pi)), 1e-15);
  State s = rest_state(g);
  s.v[0] = g.volume(4.0);
  EXPECT_NEAR(cfl_limit(s, flat(g)), 0.5 * dx / 4.0, 1e-15);
}

TEST(Stepper, RestStaysAtRest) {
  const Grid g = Grid::make(8, 8, 9, 1.0);
  const Stepper st(g, make_polynomial_cutoff(g, 0.0));
  const StepResult r = st.step(rest_state(g, 1.0), 0.01);
  EXPECT_NEAR(r.state.t, 0.01, 1e-16);
  EXPECT_EQ(r.state.psi.max_abs(), 0.0);
  EXPECT_LT(r.state.q.max_abs(), 1e-14);
  EXPECT_THROW(st.step(rest_state(g), 0.0), PreconditionError);
}

TEST(Stepper, RejectsUnstableStep) {
  const Grid g = Grid::make(16, 16, 9, 1.0);
  const Stepper st(g, make_polynomial_cutoff(g, 0.0));
  State s = rest_state(g, 1.0);
  try {
    st.step(s, 1.0);
    FAIL() << "expected CflError";
  } catch (const CflError& e) {
    EXPECT_NEAR(e.suggested_dt(), cfl_limit(s, flat(g)), 1e-15);
  }
  const Stepper unchecked(g, make_polynomial_cutoff(g, 0.0), {}, {true, false, false});
  EXPECT_NO_THROW(unchecked.step(s, 1.0));
}

TEST(Stepper, KeepsBottomConditionsAndDivergence) {
  const RunConfig c = capillary(16, 9, 0.05, 0.1);
  const Grid g = Grid::make(16, 16, 9, 1.0);
  const Cutoff cut = make_spec_cutoff(c.init, g, sample_surface_recipe(g, c.init.psi));
  const State s0 = build_initial_data(c.init, g, cut);
  const Stepper st(g, cut);
  const StepResult r = st.step(s0, 0.05);
  const ConstraintResiduals cr = constraint_residuals(r.state, r.gm);
  EXPECT_EQ(cr.v3_bot, 0.0);
  EXPECT_EQ(cr.F3_bot, 0.0);
  EXPECT_LT(cr.div_v, 1e-6);
  EXPECT_LT((r.psi_t - kinematic_rate(g, r.state.psi, r.state.v)).max_abs(), 1e-15);
}

TEST(Run, StepsSnapshotsAndFinalTime) {
  RunConfig c = capillary(16, 9, 0.03, 0.1);
  c.snapshot_every = 2;
  std::size_t records = 0;
  const RunResult r = run(c, {[&](const DiagnosticsRecord&) { ++records; }, {}});
  ASSERT_FALSE(r.aborted) << r.abort_reason;
  EXPECT_EQ(r.steps, 4);  // ceil(0.1 / 0.03)
  EXPECT_EQ(records, 5u);
  EXPECT_EQ(r.diagnostics.size(), 5u);
  EXPECT_EQ(r.diagnostics.back().t, 0.1);
  EXPECT_NEAR(r.diagnostics.back().dt, 0.025, 1e-15);
  ASSERT_EQ(r.snapshots.size(), 3u);  // steps 0, 2, 4
  EXPECT_NEAR(r.snapshots[1].t, 0.05, 1e-15);
  ASSERT_TRUE(r.history.has_value());
  EXPECT_EQ(r.history->size(), 5u);
}

TEST(Run, ConservesEnergyOverShortRun) {
  const RunResult r = run(capillary(16, 9, 0.025, 0.1));
  ASSERT_FALSE(r.aborted) << r.abort_reason;
  const double e0 = r.diagnostics.front().E_cons;
  for (const auto& d : r.diagnostics) EXPECT_NEAR(d.E_cons, e0, 1e-8 * e0);
}

TEST(Run, UnstableStepAbortsRun) {
  RunConfig c = capillary(16, 9, 0.5, 1.0);
  const RunResult r = run(c);
  EXPECT_TRUE(r.aborted);
  EXPECT_NE(r.abort_reason.find("stability"), std::string::npos);
  EXPECT_EQ(r.steps, 0);
  EXPECT_EQ(r.diagnostics.size(), 1u);
}

TEST(Run, RejectsBadSchedules) {
  const Grid g = Grid::make(8, 8, 9, 1.0);
  RunConfig c;
  c.t_final = -1.0;
  EXPECT_THROW(run_from(c, rest_state(g), make_polynomial_cutoff(g, 0.0), g), PreconditionError);
  c.t_final = 1.0;
  c.dt = 0.0;
  EXPECT_THROW(run_from(c, rest_state(g), make_polynomial_cutoff(g, 0.0), g), PreconditionError);
  c.dt = 0.1;
  c.k_max = 5;
  EXPECT_THROW(run_from(c, rest_state(g), make_polynomial_cutoff(g, 0.0), g), PreconditionError);
}
