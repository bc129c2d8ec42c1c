#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "capelast/elliptic.hpp"
#include "capelast/error.hpp"

using namespace capelast;
using std::numbers::pi;

namespace {

GraphMap curved(const Grid& g, const std::function<double(double, double)>& psi_fn) {
  const SurfaceField psi = sample_surface(g, psi_fn);
  return build_graphmap(psi, g.surface(), make_polynomial_cutoff(g, psi.max_abs()), g);
}

/// Samples a physical-coordinate function at z = phi.
VolumeField at_phi(const GraphMap& gm, const std::function<double(double, double, double)>& fn) {
  const Grid& g = gm.grid;
  VolumeField out = g.volume();
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) out(i, j, k) = fn(g.x1()[i], g.x2()[j], gm.phi(i, j, k));
  return out;
}

Eigen::MatrixXd fourier_matrix(int n) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const double h = 2 * pi / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) d(i, j) = 0.5 * ((i - j) % 2 == 0 ? 1.0 : -1.0) / std::tan((i - j) * h / 2);
  return d;
}

/// Chebyshev differentiation on z = (x - 1) b / 2, x_k = cos(k pi / N).
Eigen::MatrixXd chebyshev_matrix(int nz, double b) {
  const int N = nz - 1;
  Eigen::VectorXd x(nz), c(nz);
  for (int k = 0; k <= N; ++k) {
    x[k] = std::cos(k * pi / N);
    c[k] = (k == 0 || k == N ? 2.0 : 1.0) * (k % 2 == 0 ? 1.0 : -1.0);
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nz, nz);
  for (int i = 0; i <= N; ++i)
    for (int j = 0; j <= N; ++j)
      if (i != j) d(i, j) = c[i] / c[j] / (x[i] - x[j]);
  for (int i = 0; i <= N; ++i) d(i, i) = -d.row(i).sum();
  return d * (2.0 / b);
}

}  // namespace

TEST(Poisson, ZeroDataGivesZero) {
  const Grid g = Grid::make(8, 8, 9, 1.0);
  const GraphMap gm = curved(g, [](double x1, double) { return 0.05 * std::cos(x1); });
  const SolveResult r = PoissonSolver(g).solve(g.volume(), g.surface(), g.surface(), gm);
  EXPECT_EQ(r.solution.max_abs(), 0.0);
}

TEST(Poisson, FlatHarmonicRecovered) {
  const Grid g = Grid::make(16, 16, 13, 1.0);
  const GraphMap gm = curved(g, [](double, double) { return 0.0; });
  const VolumeField exact = sample(g, [](double x1, double, double z) { return std::cos(x1) * std::exp(z); });
  const SurfaceField top_data = sample_surface(g, [](double x1, double) { return std::cos(x1); });
  const SurfaceField neu = sample_surface(g, [](double x1, double) { return std::cos(x1) * std::exp(-1.0); });
  const VolumeField w = solve_poisson_phi(g.volume(), top_data, neu, gm, g, {1e-12, 100, 40});
  EXPECT_LT((w - exact).max_abs(), 1e-11);
}

TEST(Poisson, CurvedManufacturedClosedForm) {
  // W = e^{sin x1} cos x2 e^z has -Delta W = -(cos^2 x1 - sin x1) W in physical coordinates.
  const Grid g = Grid::make(32, 32, 17, 1.0);
  const GraphMap gm = curved(g, [](double x1, double x2) { return 0.1 * std::cos(x1) + 0.05 * std::sin(x2); });
  auto W = [](double x1, double x2, double z) { return std::exp(std::sin(x1)) * std::cos(x2) * std::exp(z); };
  const VolumeField exact = at_phi(gm, W);
  const VolumeField rhs = at_phi(gm, [&](double x1, double x2, double z) {
    return -(std::cos(x1) * std::cos(x1) - std::sin(x1)) * W(x1, x2, z);
  });
  const SolveResult r = PoissonSolver(g, {1e-12, 200, 40}).solve(rhs, top(exact), bottom(exact), gm);
  EXPECT_LT((r.solution - exact).max_abs(), 1e-8);
  EXPECT_LT(r.boundary_residual, 1e-9);
}

TEST(Poisson, OperatorConsistentManufactured) {
  const Grid g = Grid::make(16, 16, 13, 1.0);
  const GraphMap gm = curved(g, [](double x1, double x2) { return 0.05 * std::cos(x1 + x2); });
  const VolumeField w = sample(g, [](double x1, double x2, double z) { return std::sin(x1 - x2) * (1 + z * z); });
  const VolumeField rhs = -laplacian_phi(gm, w);
  const SolveResult r = PoissonSolver(g, {1e-12, 200, 40}).solve(rhs, top(w), bottom(dphi(gm, w, 3)), gm);
  EXPECT_LT((r.solution - w).max_abs(), 1e-9);
  EXPECT_LT(r.interior_residual, 1e-9);
}

TEST(Poisson, ConvergenceFailureIsReported) {
  const Grid g = Grid::make(16, 16, 13, 1.0);
  const GraphMap gm = curved(g, [](double x1, double) { return 0.2 * std::cos(x1); });
  const VolumeField rhs = sample(g, [](double x1, double x2, double z) { return std::cos(x1 + 3 * x2) * z; });
  try {
    PoissonSolver(g, {1e-15, 1, 1}).solve(rhs, g.surface(), g.surface(), gm);
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.iterations(), 1);
    EXPECT_GT(e.residual(), 0.0);
  }
}

TEST(Poisson, FlatInverseInvertsFlatOperator) {
  const Grid g = Grid::make(8, 8, 9, 1.0);
  const GraphMap gm = curved(g, [](double, double) { return 0.0; });
  const PoissonSolver solver(g);
  const VolumeField w = sample(g, [](double x1, double x2, double z) { return std::cos(x1) * std::sin(2 * x2) * z * z; });
  EXPECT_LT((solver.apply_flat_inverse(solver.apply(w, gm)) - w).max_abs(), 1e-12);
}

TEST(Pressure, RestStateHasZeroPressure) {
  const Grid g = Grid::make(8, 8, 9, 1.0);
  State s;
  s.sigma = 1.0;
  s.psi = g.surface();
  s.v = g.vector();
  for (auto& c : s.F) c = g.vector();
  s.q = g.volume();
  const GraphMap gm = curved(g, [](double, double) { return 0.0; });
  const PressureRhs pr = pressure_rhs(s, gm);
  EXPECT_EQ(pr.rhs.max_abs(), 0.0);
  EXPECT_EQ(pr.neu_bottom.max_abs(), 0.0);
  EXPECT_FALSE(pr.advisory);
  EXPECT_LT(solve_pressure(s, gm, PoissonSolver(g)).solution.max_abs(), 1e-14);
}

TEST(Pressure, ShearSourcesVanish) {
  const Grid g = Grid::make(16, 16, 9, 1.0);
  const GraphMap gm = curved(g, [](double, double) { return 0.0; });
  State s;
  s.psi = g.surface();
  s.v = g.vector();
  for (auto& c : s.F) c = g.vector();
  s.q = g.volume();
  s.v[0] = sample(g, [](double, double x2, double) { return std::cos(x2); });
  EXPECT_LT(pressure_rhs(s, gm).rhs.max_abs(), 1e-14);
  s.v[0] = g.volume();
  s.F[0][0] = sample(g, [](double, double x2, double) { return 0.2 * std::cos(x2); });
  EXPECT_LT(pressure_rhs(s, gm).rhs.max_abs(), 1e-14);
}

TEST(Pressure, CapillaryPressureMatchesDenseSolve) {
  // Independent dense assembly of -Delta^phi with the same Fourier x Chebyshev collocation.
  const int n = 8, nz = 9;
  const double b = 1.0, sigma = 1.0;
  const Grid g = Grid::make(n, n, nz, b);
  const SurfaceField psi = sample_surface(g, [](double x1, double) { return 0.1 * std::cos(x1); });
  const Cutoff cut = make_polynomial_cutoff(g, 0.1);
  const GraphMap gm = build_graphmap(psi, g.surface(), cut, g);

  State s;
  s.sigma = sigma;
  s.psi = psi;
  s.v = g.vector();
  for (auto& c : s.F) c = g.vector();
  s.q = g.volume();
  const VolumeField q = solve_pressure(s, gm, PoissonSolver(g, {1e-13, 200, 40})).solution;

  const Eigen::MatrixXd Df = fourier_matrix(n), Dc = chebyshev_matrix(nz, b);
  const int N = n * n * nz;
  auto idx = [&](int i, int j, int k) { return i + n * (j + n * k); };
  Eigen::MatrixXd D1 = Eigen::MatrixXd::Zero(N, N), D2 = D1, D3 = D1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (int m = 0; m < n; ++m) {
          D1(idx(i, j, k), idx(m, j, k)) = Df(i, m);
          D2(idx(i, j, k), idx(i, m, k)) = Df(j, m);
        }
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (int m = 0; m < nz; ++m) D3(idx(i, j, k), idx(i, j, m)) = Dc(k, m);

  // phi = x3 + chi psi with chi = 3s^2 - 2s^3, s = (x3 + b) / b.
  Eigen::VectorXd a31(N), a32(N), a33(N);
  for (int k = 0; k < nz; ++k) {
    const double sk = (g.x3()[k] + b) / b;
    const double chi = sk * sk * (3 - 2 * sk), dchi = 6 * sk * (1 - sk) / b;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double p = 0.1 * std::cos(g.x1()[i]), dp = -0.1 * std::sin(g.x1()[i]);
        const double d3 = 1 + dchi * p;
        a31[idx(i, j, k)] = -chi * dp / d3;
        a32[idx(i, j, k)] = 0.0;
        a33[idx(i, j, k)] = 1 / d3;
      }
  }
  const Eigen::MatrixXd P1 = D1 + a31.asDiagonal() * D3;
  const Eigen::MatrixXd P2 = D2 + a32.asDiagonal() * D3;
  const Eigen::MatrixXd P3 = a33.asDiagonal() * D3;
  Eigen::MatrixXd A = -(P1 * P1 + P2 * P2 + P3 * P3);
  // kappa = d1 (psi' / sqrt(1 + psi'^2)) with the same collocation derivative
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) p[i] = 0.1 * std::cos(g.x1()[i]);
  const Eigen::VectorXd dp = Df * p;
  const Eigen::VectorXd kappa = Df * dp.cwiseQuotient((1.0 + dp.array().square()).sqrt().matrix());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int t = idx(i, j, 0), bt = idx(i, j, nz - 1);
      A.row(t).setZero();
      A(t, t) = 1.0;
      rhs[t] = -sigma * kappa[i];
      A.row(bt) = P3.row(bt);
    }
  const Eigen::VectorXd dense = A.partialPivLu().solve(rhs);
  double err = 0.0;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) err = std::max(err, std::abs(dense[idx(i, j, k)] - q(i, j, k)));
  EXPECT_LT(err, 1e-8);
  EXPECT_GT(q.max_abs(), 1e-3);
}

TEST(Projection, DivergenceFreeFieldIsUnchanged) {
  const Grid g = Grid::make(16, 16, 9, 1.0);
  const GraphMap gm = curved(g, [](double, double) { return 0.0; });
  VectorField X = g.vector();
  X[2] = g.volume(1.0);
  X[0] = sample(g, [](double, double x2, double z) { return std::cos(x2) * z; });
  const VectorField Y = project_divfree(X, gm, g);
  for (int c = 0; c < 3; ++c) EXPECT_LT((Y[c] - X[c]).max_abs(), 1e-8);
}

TEST(Projection, GradientWithZeroTopTraceIsRemoved) {
  const Grid g = Grid::make(16, 16, 13, 1.0);
  const GraphMap gm = curved(g, [](double x1, double) { return 0.1 * std::cos(x1); });
  // theta vanishes on the top and has zero normal derivative on the bottom.
  VolumeField theta_mapped = g.volume();
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const double p = gm.psi(i, j);
      for (int k = 0; k < g.nz(); ++k) {
        const double z = gm.phi(i, j, k);
        theta_mapped(i, j, k) = std::sin(g.x1()[i]) * (z - p) * (z + 1.0) * (z + 1.0);
      }
    }
  const VectorField X = grad_phi(gm, theta_mapped);
  const VectorField Y = project_divfree(X, gm, g);
  EXPECT_LT(l2_norm(g, Y), 1e-8 * l2_norm(g, X));
}

TEST(Projection, ResultIsDivergenceFreeAndIdempotent) {
  const Grid g = Grid::make(16, 16, 13, 1.0);
  const GraphMap gm = curved(g, [](double x1, double x2) { return 0.05 * std::sin(x1 + x2); });
  VectorField X = g.vector();
  X[0] = sample(g, [](double x1, double, double z) { return std::cos(x1) * std::exp(z); });
  X[2] = sample(g, [](double, double x2, double z) { return std::sin(x2) * z; });
  const VectorField Y = project_divfree(X, gm, g);
  EXPECT_LT(l2_norm(g, div_phi(gm, Y)), 1e-8);
  const VectorField Z = project_divfree(Y, gm, g);
  for (int c = 0; c < 3; ++c) EXPECT_LT((Z[c] - Y[c]).max_abs(), 1e-8);
}

TEST(Hodge, ZeroFieldHasNoRatio) {
  const Grid g = Grid::make(8, 8, 9, 1.0);
  const GraphMap gm = curved(g, [](double, double) { return 0.0; });
  const HodgeReport r = hodge_report(g.vector(), gm, g, 1);
  EXPECT_EQ(r.norm_s, 0.0);
  EXPECT_FALSE(r.ratio.has_value());
}

TEST(Hodge, ShearFieldAnalyticNorms) {
  const Grid g = Grid::make(16, 16, 9, 1.0);
  const GraphMap gm = curved(g, [](double, double) { return 0.0; });
  VectorField X = g.vector();
  X[0] = sample(g, [](double, double x2, double) { return std::cos(x2); });
  const HodgeReport r = hodge_report(X, gm, g, 1);
  EXPECT_LT(r.div_norm, 1e-12);
  // curl = (0, 0, sin x2): ||.||_0^2 = 2 pi^2
  EXPECT_NEAR(r.curl_norm, pi * std::sqrt(2.0), 1e-8);
  EXPECT_NEAR(r.l2, pi * std::sqrt(2.0), 1e-8);
  EXPECT_NEAR(r.norm_s, 2 * pi, 1e-8);
  // dbar X = (-sin x2, 0, 0)
  EXPECT_NEAR(r.tangential, pi * std::sqrt(2.0), 1e-8);
  ASSERT_TRUE(r.ratio.has_value());
  EXPECT_GT(*r.ratio, 0.0);
}

TEST(Hodge, RatioStableUnderRefinement) {
  auto ratio = [](int n, int nz) {
    const Grid g = Grid::make(n, n, nz, 1.0);
    const GraphMap gm = curved(g, [](double x1, double) { return 0.05 * std::cos(x1); });
    VectorField X = g.vector();
    X[0] = sample(g, [](double x1, double x2, double z) { return std::exp(std::sin(x1) + z) * std::cos(x2); });
    X[1] = sample(g, [](double x1, double, double z) { return std::cos(x1 - z); });
    X[2] = sample(g, [](double, double x2, double z) { return z * std::sin(2 * x2); });
    return *hodge_report(X, gm, g, 2).ratio;
  };
  const double a = ratio(16, 13), b = ratio(32, 17);
  EXPECT_NEAR(a, b, 1e-4 * b);
}

TEST(Neumann, CompatibilityOfExactFluxes) {
  const Grid g = Grid::make(32, 32, 17, 1.0);
  const GraphMap gm = curved(g, [](double x1, double x2) { return 0.1 * std::cos(x1) + 0.05 * std::sin(x2); });
  auto W = [](double x1, double x2, double z) { return std::exp(std::sin(x1)) * std::cos(x2) * std::exp(z); };
  const VolumeField w = at_phi(gm, W);
  const VolumeField rhs = at_phi(gm, [&](double x1, double x2, double z) {
    return -(std::cos(x1) * std::cos(x1) - std::sin(x1)) * W(x1, x2, z);
  });
  const VectorField gw = grad_phi(gm, w);
  const auto N = gm.surface_normal();
  const SurfaceField g_top = top(gw[0]) * N[0] + top(gw[1]) * N[1] + top(gw[2]);
  EXPECT_LT(std::abs(neumann_compatibility(rhs, g_top, bottom(gw[2]), gm)), 1e-9);
  EXPECT_GT(std::abs(neumann_compatibility(rhs, g_top + 1.0, bottom(gw[2]), gm)), 1.0);
}
