#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "capelast/alinhac.hpp"
#include "capelast/diagnostics.hpp"
#include "capelast/elliptic.hpp"
#include "capelast/error.hpp"
#include "capelast/manufactured.hpp"
#include "cli.hpp"

namespace capelast::cli {

namespace {

struct Table {
  std::ostream& os;
  std::string resolution;
  bool ok = true;

  void row(const std::string& identity, const std::string& alpha, double residual, double tol) {
    const bool pass = std::isfinite(residual) && residual <= tol;
    ok = ok && pass;
    char buf[160];
    std::snprintf(buf, sizeof buf, ",%.6e,%.1e,%s", residual, tol, pass ? "pass" : "FAIL");
    os << identity << ',' << alpha << ',' << resolution << buf << '\n';
  }
};

double rel(double r, double scale) { return scale > 0.0 ? r / scale : r; }

const char* kFields[] = {"v1", "v2", "v3", "F11", "F31", "F12", "F22", "F13", "q"};
const char kAxis[] = {'1', '2', '3'};

/// Test surface psi = 0.1 cos x1 + 0.05 sin x2 carried by the default traveling wave.
AnalyticFlow test_flow() { return traveling_wave(TravelingWave{}); }

void operators_suite(const Grid& g, Table& t) {
  const AnalyticFlow flow = test_flow();
  const Cutoff cut = flow_cutoff(flow, g);
  const HistoryEntry e = sample_state(flow, 0.0, cut, g);
  const State& s = e.state;
  const GraphMap gm = build_graphmap(s.psi, e.psi_t, cut, g);

  for (const char* name : kFields) {
    const VolumeField f = field_of(s, gm, name);
    const double scale = sobolev_norm(g, f, 2);
    for (int i = 1; i <= 3; ++i)
      for (int j = i + 1; j <= 3; ++j) {
        const VolumeField r = dphi(gm, dphi(gm, f, j), i) - dphi(gm, dphi(gm, f, i), j);
        t.row(std::string("commutation_") + name, std::string{kAxis[i - 1], kAxis[j - 1]}, rel(l2_norm(g, r), scale),
              1e-8);
      }
  }
  t.row("curl_grad_q", "-", rel(l2_norm(g, curl_phi(gm, grad_phi(gm, s.q))), sobolev_norm(g, s.q, 2)), 1e-8);
  t.row("div_curl_v", "-", rel(l2_norm(g, div_phi(gm, curl_phi(gm, s.v))), sobolev_norm(g, s.v, 2)), 1e-8);
  t.row("div_v", "-", rel(l2_norm(g, div_phi(gm, s.v)), sobolev_norm(g, s.v, 1)), 1e-8);
  for (int j = 0; j < 3; ++j)
    t.row("div_F" + std::to_string(j + 1), "-", rel(l2_norm(g, div_phi(gm, s.F[j])), sobolev_norm(g, s.F[j], 1)),
          1e-8);
  const SurfaceField kin = kinematic_rate(g, s.psi, s.v) - e.psi_t;
  t.row("kinematic_vN", "-", rel(kin.max_abs(), e.psi_t.max_abs()), 1e-8);

  const SurfaceField kappa = mean_curvature(g, s.psi);
  const SurfaceField exact = sample_surface(g, [](double x1, double x2) {
    const double p1 = -0.1 * std::sin(x1), p2 = 0.05 * std::cos(x2);
    const double p11 = -0.1 * std::cos(x1), p22 = -0.05 * std::sin(x2);
    const double w = 1.0 + p1 * p1 + p2 * p2;
    return ((1.0 + p2 * p2) * p11 + (1.0 + p1 * p1) * p22) / std::pow(w, 1.5);
  });
  t.row("mean_curvature", "-", rel((kappa - exact).max_abs(), exact.max_abs()), 1e-8);
}

void lemmas_suite(const Grid& g, Table& t) {
  const AnalyticFlow flow = test_flow();
  const Cutoff cut = flow_cutoff(flow, g, 0.0, 0.01);
  const History h = sample_history(flow, 0.0, 1e-3, 5, cut, g);
  const GraphMap gm = h.graphmap(h.size() - 1);
  for (const LemmaRow& r : lemma_checks(h, gm, g)) {
    std::string detail = r.detail;
    for (char& ch : detail)
      if (ch == ',' || ch == ' ') ch = ch == ',' ? '/' : '_';
    t.row(r.lemma, detail, r.relative, 1e-8);
  }
}

void alinhac_suite(const Grid& g, std::size_t history, Table& t) {
  if (history < 3)
    throw HistoryError("alinhac suite needs at least 3 stored states (got " + std::to_string(history) + ")");
  const AnalyticFlow flow = test_flow();
  const double dt = 0.025;
  const Cutoff cut = flow_cutoff(flow, g, 0.0, dt * static_cast<double>(history));
  const History h = sample_history(flow, 0.0, dt, history, cut, g);
  const GraphMap gm = h.graphmap(h.size() - 1);
  const AlinhacIdentity ids[] = {AlinhacIdentity::kTau1, AlinhacIdentity::kTau2, AlinhacIdentity::kVertical,
                                 AlinhacIdentity::kMaterial};

  const MultiIndex spatial[] = {{0, 1, 0}, {0, 0, 1}, {0, 2, 0}, {0, 1, 1}, {0, 0, 2}};
  for (const MultiIndex& a : spatial)
    for (const char* f : kFields)
      for (AlinhacIdentity id : ids) {
        const double r = alinhac_residual(h, f, a, id, gm);
        t.row(to_string(id) + "_" + f, a.str(), r, 1e-8);
      }
  for (const MultiIndex& a : {MultiIndex{1, 0, 0}, MultiIndex{1, 1, 0}})
    for (const char* f : {"v1", "v3", "F12", "q"})
      for (AlinhacIdentity id : ids) t.row(to_string(id) + "_" + f, a.str(), alinhac_residual(h, f, a, id, gm), 1e-6);

  const History steady = sample_history(steady_wave(TravelingWave{}), 0.0, dt, 3, cut, g);
  const CurlCommutatorResiduals cc = curl_commutator_residuals(steady, steady.graphmap(steady.size() - 1));
  t.row("curl_commutator_v", "-", cc.r1, 1e-8);
  t.row("curl_commutator_F", "-", cc.r2, 1e-8);
}

void elliptic_suite(const Grid& g, Table& t) {
  const PoissonSolver solver(g);
  auto check = [&](const std::string& name, const SurfaceField& psi,
                   const std::function<double(double, double, double)>& w,
                   const std::function<double(double, double, double)>& lap,
                   const std::function<double(double, double, double)>& wz) {
    const Cutoff cut = make_polynomial_cutoff(g, psi.max_abs());
    const GraphMap gm = build_graphmap(psi, g.surface(), cut, g);
    VolumeField rhs = g.volume(), exact = g.volume();
    SurfaceField neu = g.surface();
    for (int k = 0; k < g.nz(); ++k)
      for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
          const double x1 = g.x1()[i], x2 = g.x2()[j], z = gm.phi(i, j, k);
          rhs(i, j, k) = -lap(x1, x2, z);
          exact(i, j, k) = w(x1, x2, z);
          if (k == g.nz() - 1) neu(i, j) = wz(x1, x2, z);
        }
    const SolveResult r = solver.solve(rhs, top(exact), neu, gm);
    const double scale = 1.0 + rhs.max_abs();
    t.row(name + "_interior_residual", "-", r.interior_residual / scale, 1e-8);
    t.row(name + "_boundary_residual", "-", r.boundary_residual / scale, 1e-8);
    t.row(name + "_error", "-", (r.solution - exact).max_abs() / exact.max_abs(), 1e-8);
  };

  check("flat_harmonic", g.surface(), [](double x1, double, double z) { return std::cos(x1) * std::exp(z); },
        [](double, double, double) { return 0.0; }, [](double x1, double, double z) { return std::cos(x1) * std::exp(z); });

  const SurfaceField psi =
      sample_surface(g, [](double x1, double x2) { return 0.1 * std::cos(x1) + 0.05 * std::sin(x2); });
  auto w = [](double x1, double x2, double z) { return std::exp(std::sin(x1)) * std::cos(x2) * std::exp(z); };
  check("curved", psi, w,
        [w](double x1, double x2, double z) {
          return w(x1, x2, z) * (std::cos(x1) * std::cos(x1) - std::sin(x1));
        },
        w);

  // Projection of a pure gradient: theta = sin(x1) (z - psi)(z + b)^2 vanishes on the top and has
  // zero normal derivative on the bottom.
  const double b = g.depth();
  const Cutoff cut = make_polynomial_cutoff(g, psi.max_abs());
  const GraphMap gm = build_graphmap(psi, g.surface(), cut, g);
  VectorField X = g.vector();
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const double x1 = g.x1()[i], x2 = g.x2()[j], z = gm.phi(i, j, k);
        const double p = 0.1 * std::cos(x1) + 0.05 * std::sin(x2);
        const double p1 = -0.1 * std::sin(x1), p2 = 0.05 * std::cos(x2);
        const double s = std::sin(x1), c = std::cos(x1), zb = z + b;
        X[0](i, j, k) = c * (z - p) * zb * zb - s * p1 * zb * zb;
        X[1](i, j, k) = -s * p2 * zb * zb;
        X[2](i, j, k) = s * (zb * zb + 2.0 * (z - p) * zb);
      }
  const VectorField P = project_divfree(X, gm, solver);
  t.row("projection_of_gradient", "-", l2_norm(g, P) / l2_norm(g, X), 1e-8);
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"operators", "lemmas", "alinhac", "elliptic"};
  return names;
}

int verify_suite(const std::string& suite, const VerifyOptions& opts, std::ostream& csv) {
  if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
    throw std::invalid_argument("unknown suite '" + suite + "'");
  const Grid g = Grid::make(opts.nx, opts.ny, opts.nz, 1.0);
  std::ostringstream res;
  res << opts.nx << 'x' << opts.ny << 'x' << opts.nz;
  std::ostringstream body;
  Table t{body, res.str()};
  if (suite == "operators") operators_suite(g, t);
  if (suite == "lemmas") lemmas_suite(g, t);
  if (suite == "alinhac") alinhac_suite(g, opts.history, t);
  if (suite == "elliptic") elliptic_suite(g, t);
  csv << "identity,alpha,resolution,residual,tolerance,status\n" << body.str();
  return t.ok ? kOk : kFailure;
}

}  // namespace capelast::cli
