#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "capelast/diagnostics.hpp"
#include "capelast/error.hpp"
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

State shear(const Grid& g) {
  State s = rest_state(g);
  s.v[0] = sample(g, [](double, double x2, double) { return std::cos(x2); });
  s.F[0][0] = sample(g, [](double, double x2, double) { return 0.2 * std::cos(x2); });
  return s;
}

}  // namespace

TEST(ConservedEnergy, FlatAreaTerm) {
  const Grid g = Grid::make(8, 8, 9, 1.0);
  EXPECT_NEAR(conserved_energy(rest_state(g, 2.0), flat(g)), 8 * pi * pi, 1e-12);
}

TEST(ConservedEnergy, UniformVelocity) {
  const Grid g = Grid::make(8, 8, 9, 1.0);
  State s = rest_state(g);
  s.v[0] = g.volume(1.0);
  EXPECT_NEAR(conserved_energy(s, flat(g)), 2 * pi * pi, 1e-12);
}

TEST(ConservedEnergy, ShearAgainstDirectQuadrature) {
  // 1/2 int cos^2 x2 + 1/2 int 0.04 cos^2 x2 over T^2 x (-1, 0) = (1.04 / 2) 2 pi^2
  const Grid g = Grid::make(16, 16, 9, 1.0);
  EXPECT_NEAR(conserved_energy(shear(g), flat(g)), 1.04 * pi * pi, 1e-12);
}

TEST(ConservedEnergy, CurvedSurfaceArea) {
  // sigma int sqrt(1 + 0.01 sin^2 x1) against a fine midpoint rule
  const Grid g = Grid::make(32, 32, 9, 1.0);
  const SurfaceField psi = sample_surface(g, [](double x1, double) { return 0.1 * std::cos(x1); });
  State s = rest_state(g, 1.0);
  s.psi = psi;
  const GraphMap gm = build_graphmap(psi, g.surface(), make_polynomial_cutoff(g, 0.1), g);
  double ref = 0.0;
  const int m = 20000;
  for (int i = 0; i < m; ++i) {
    const double x = (i + 0.5) * 2 * pi / m;
    ref += std::sqrt(1 + 0.01 * std::sin(x) * std::sin(x));
  }
  ref *= 2 * pi / m * 2 * pi;
  EXPECT_NEAR(conserved_energy(s, gm), ref, 1e-10);
}

TEST(HigherEnergy, RestIsZero) {
  const Grid g = Grid::make(8, 8, 9, 1.0);
  History h(g, make_polynomial_cutoff(g, 0.0), 3);
  for (int n = 0; n < 3; ++n) {
    State s = rest_state(g, 1.0);
    s.t = 0.1 * n;
    h.push(s, g.surface());
  }
  EXPECT_EQ(higher_energy(h, flat(g), 2), 0.0);
}

TEST(HigherEnergy, StaticShearEqualsSpatialNorms) {
  const Grid g = Grid::make(16, 16, 9, 1.0);
  History h(g, make_polynomial_cutoff(g, 0.0), 2);
  for (int n = 0; n < 2; ++n) {
    State s = shear(g);
    s.t = 0.1 * n;
    h.push(s, g.surface());
  }
  const State s = shear(g);
  const double expected = sobolev_norm(g, s.F[0], 4) + sobolev_norm(g, s.v, 4);
  EXPECT_NEAR(higher_energy(h, flat(g), 1), expected, 1e-10 * expected);
}

TEST(HigherEnergy, NeedsEnoughHistory) {
  const Grid g = Grid::make(8, 8, 9, 1.0);
  History h(g, make_polynomial_cutoff(g, 0.0), 3);
  h.push(rest_state(g), g.surface());
  EXPECT_THROW(higher_energy(h, flat(g), 1), HistoryError);
  EXPECT_THROW(higher_energy(h, flat(g), 5), PreconditionError);
}

TEST(RtMonitor, LinearPressureFixtures) {
  const Grid g = Grid::make(8, 8, 9, 1.0);
  const VolumeField down = sample(g, [](double, double, double z) { return -z; });
  const RtReport a = rt_monitor(down, flat(g), g, 1.0);
  EXPECT_EQ(a.rt_min, 1.0);
  EXPECT_TRUE(a.holds);
  EXPECT_FALSE(rt_monitor(down, flat(g), g, 1.5).holds);
  const RtReport b = rt_monitor(-1.0 * down, flat(g), g, 0.0);
  EXPECT_EQ(b.rt_min, -1.0);
  EXPECT_FALSE(b.holds);
}

TEST(RtMonitor, TakesMinimumOverSurface) {
  const Grid g = Grid::make(16, 16, 9, 1.0);
  const VolumeField q = sample(g, [](double x1, double, double z) { return -(1.0 + 0.5 * std::cos(x1)) * z; });
  EXPECT_NEAR(rt_monitor(q, flat(g), g, 0.0).rt_min, 0.5, 1e-12);
}

TEST(DiagnosticsCsv, RowMatchesHeader) {
  DiagnosticsRecord r;
  r.t = 0.5;
  r.E_cons = 1.25;
  r.rt_min = -0.0;
  const std::string header = diagnostics_csv_header();
  const std::string row = to_csv_row(r);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
  EXPECT_EQ(row.rfind("0.5,1.25,", 0), 0u);
}

TEST(LemmaChecks, TravelingWaveResidualsAreSmall) {
  const Grid g = Grid::make(32, 32, 17, 1.0);
  const AnalyticFlow flow = traveling_wave({});
  const Cutoff cut = flow_cutoff(flow, g, 0.0, 0.01);
  const History h = sample_history(flow, 0.0, 1e-3, 5, cut, g);
  const auto rows = lemma_checks(h, h.graphmap(4), g);
  int kinds[3] = {0, 0, 0};
  for (const auto& r : rows) {
    EXPECT_LT(r.relative, 1e-8) << r.lemma << ' ' << r.detail;
    kinds[r.lemma == "commutation" ? 0 : r.lemma == "ibp" ? 1 : 2]++;
  }
  EXPECT_GT(kinds[0], 0);
  EXPECT_GT(kinds[1], 0);
  EXPECT_GT(kinds[2], 0);
}

TEST(LemmaChecks, EmptyHistoryThrows) {
  const Grid g = Grid::make(8, 8, 9, 1.0);
  const History h(g, make_polynomial_cutoff(g, 0.0), 3);
  EXPECT_THROW(lemma_checks(h, flat(g), g), HistoryError);
}
