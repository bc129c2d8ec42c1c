#include "capelast/elliptic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>

#include "capelast/error.hpp"

namespace capelast {

namespace {

double dot_raw(const VolumeField& a, const VolumeField& b) {
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * b[n];
  return s;
}

double norm_raw(const VolumeField& a) { return std::sqrt(dot_raw(a, a)); }

void scale_planes(VolumeField& f, const std::vector<double>& s) {
  for (int k = 0; k < f.nz(); ++k)
    for (double& x : f.plane(k)) x *= s[k];
}

}  // namespace

struct PoissonSolver::Impl {
  Grid grid;
  SolverOptions opts;
  // Row scaling that turns the Euclidean norm of interior rows into the discrete L2 norm.
  std::vector<double> row_scale;
  std::vector<int> mode_factor;  // mode index -> factorization index
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> factors;

  Impl(const Grid& g, SolverOptions o) : grid(g), opts(o) {
    const int nz = g.nz();
    const auto wz = g.vertical_weights();
    const double wt = g.tangential_weight();
    row_scale.resize(nz);
    for (int k = 0; k < nz; ++k) row_scale[k] = std::sqrt(wt * ((k == 0 || k == nz - 1) ? 1.0 : wz[k]));

    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> d(g.cheb_diff().data(),
                                                                                                nz, nz);
    const Eigen::MatrixXd d2 = d * d;

    const int half = g.nx() / 2 + 1;
    const auto k1 = g.wavenumbers(1);
    const auto k2 = g.wavenumbers(2);
    std::map<long, int> by_k2;
    mode_factor.resize(static_cast<std::size_t>(half) * g.ny());
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < half; ++i) {
        const double e1 = (i == g.nx() / 2) ? 0.0 : k1[i];
        const double e2 = (j == g.ny() / 2) ? 0.0 : k2[j];
        const long ksq = std::lround(e1 * e1 + e2 * e2);
        auto it = by_k2.find(ksq);
        if (it == by_k2.end()) {
          Eigen::MatrixXd m = -d2;
          for (int k = 0; k < nz; ++k) m(k, k) += static_cast<double>(ksq);
          m.row(0).setZero();
          m(0, 0) = 1.0;
          m.row(nz - 1) = d.row(nz - 1);
          factors.emplace_back(m);
          it = by_k2.emplace(ksq, static_cast<int>(factors.size()) - 1).first;
        }
        mode_factor[j * half + i] = it->second;
      }
  }
};

PoissonSolver::PoissonSolver(const Grid& g, SolverOptions opts) : impl_(std::make_unique<Impl>(g, opts)) {
  if (!(opts.tol > 0.0) || opts.max_iter < 1 || opts.restart < 1)
    throw PreconditionError("PoissonSolver: tol, max_iter and restart must be positive");
}
PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

const Grid& PoissonSolver::grid() const noexcept { return impl_->grid; }
const SolverOptions& PoissonSolver::options() const noexcept { return impl_->opts; }

VolumeField PoissonSolver::apply(const VolumeField& W, const GraphMap& gm) const {
  const Grid& g = impl_->grid;
  VolumeField out = -laplacian_phi(gm, W);
  const int nz = g.nz();
  std::copy(W.plane(0).begin(), W.plane(0).end(), out.plane(0).begin());
  const VolumeField w3 = d_vert(g, W);
  auto bot = out.plane(nz - 1);
  auto src = w3.plane(nz - 1);
  auto a33 = gm.a33.plane(nz - 1);
  for (std::size_t n = 0; n < bot.size(); ++n) bot[n] = a33[n] * src[n];
  return out;
}

VolumeField PoissonSolver::apply_flat_inverse(const VolumeField& r) const {
  const Grid& g = impl_->grid;
  const auto& fft = g.fft();
  const int nz = g.nz();
  const std::size_t cps = fft.complex_plane_size();
  std::vector<double> spec(2 * cps * nz);
  fft.forward(r.data(), spec.data(), nz);
  auto* c = reinterpret_cast<std::complex<double>*>(spec.data());
  Eigen::MatrixXd col(nz, 2);
  for (std::size_t m = 0; m < cps; ++m) {
    for (int k = 0; k < nz; ++k) {
      col(k, 0) = c[k * cps + m].real();
      col(k, 1) = c[k * cps + m].imag();
    }
    const Eigen::MatrixXd sol = impl_->factors[impl_->mode_factor[m]].solve(col);
    for (int k = 0; k < nz; ++k) c[k * cps + m] = {sol(k, 0), sol(k, 1)};
  }
  VolumeField out = g.volume();
  fft.inverse(spec.data(), out.data(), nz);
  return out;
}

SolveResult PoissonSolver::solve(const VolumeField& rhs, const SurfaceField& dir_top, const SurfaceField& neu_bottom,
                                 const GraphMap& gm, const VolumeField* initial_guess) const {
  const Grid& g = impl_->grid;
  if (!g.compatible(rhs) || !g.compatible(dir_top) || !g.compatible(neu_bottom) || !g.compatible(gm.phi))
    throw PreconditionError("solve_poisson_phi: field shapes do not match the grid");
  if (!(gm.c0 > 0.0)) throw DegenerateMapError("solve_poisson_phi: degenerate graph map", gm.c0);
  if (!rhs.all_finite() || !dir_top.all_finite() || !neu_bottom.all_finite())
    throw PreconditionError("solve_poisson_phi: non-finite input data");

  const auto& S = impl_->row_scale;
  std::vector<double> S_inv(S.size());
  for (std::size_t k = 0; k < S.size(); ++k) S_inv[k] = 1.0 / S[k];

  VolumeField b = rhs;
  set_top(b, dir_top);
  set_bottom(b, neu_bottom);

  const double target = 0.5 * impl_->opts.tol * (1.0 + l2_norm(g, rhs));
  const int restart = impl_->opts.restart;
  const int max_iter = impl_->opts.max_iter;

  // Scaled residual S (b - L x).
  auto residual = [&](const VolumeField& x) {
    VolumeField r = b - apply(x, gm);
    scale_planes(r, S);
    return r;
  };
  // Right preconditioner P^{-1} S^{-1}.
  auto precondition = [&](VolumeField z) {
    scale_planes(z, S_inv);
    return apply_flat_inverse(z);
  };

  VolumeField x = initial_guess ? *initial_guess : g.volume();
  if (!g.compatible(x)) throw PreconditionError("solve_poisson_phi: initial guess shape mismatch");
  VolumeField r = residual(x);
  double beta = norm_raw(r);
  int iterations = 0;

  std::vector<VolumeField> V;
  std::vector<std::vector<double>> H;
  std::vector<double> cs(restart), sn(restart), e(restart + 1);

  while (beta > target && iterations < max_iter) {
    V.assign(1, r * (1.0 / beta));
    H.assign(restart, std::vector<double>(restart + 1, 0.0));
    std::fill(e.begin(), e.end(), 0.0);
    e[0] = beta;
    int j = 0;
    while (j < restart && iterations < max_iter) {
      VolumeField w = apply(precondition(V[j]), gm);
      scale_planes(w, S);
      for (int i = 0; i <= j; ++i) {
        H[j][i] = dot_raw(w, V[i]);
        axpy(w, -H[j][i], V[i]);
      }
      // Second Gram-Schmidt pass keeps the basis orthogonal at tight tolerances.
      for (int i = 0; i <= j; ++i) {
        const double h = dot_raw(w, V[i]);
        H[j][i] += h;
        axpy(w, -h, V[i]);
      }
      const double hn = norm_raw(w);
      H[j][j + 1] = hn;
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H[j][i] + sn[i] * H[j][i + 1];
        H[j][i + 1] = -sn[i] * H[j][i] + cs[i] * H[j][i + 1];
        H[j][i] = t;
      }
      const double denom = std::hypot(H[j][j], H[j][j + 1]);
      cs[j] = denom > 0.0 ? H[j][j] / denom : 1.0;
      sn[j] = denom > 0.0 ? H[j][j + 1] / denom : 0.0;
      H[j][j] = denom;
      H[j][j + 1] = 0.0;
      e[j + 1] = -sn[j] * e[j];
      e[j] = cs[j] * e[j];
      ++j;
      ++iterations;
      if (std::abs(e[j]) <= target || !(hn > 0.0)) break;
      V.push_back(w * (1.0 / hn));
    }
    // Back substitution on the triangular system.
    std::vector<double> y(j, 0.0);
    for (int i = j - 1; i >= 0; --i) {
      double s = e[i];
      for (int l = i + 1; l < j; ++l) s -= H[l][i] * y[l];
      y[i] = H[i][i] != 0.0 ? s / H[i][i] : 0.0;
    }
    VolumeField update = g.volume();
    for (int i = 0; i < j; ++i) axpy(update, y[i], V[i]);
    x += precondition(update);
    r = residual(x);
    const double new_beta = norm_raw(r);
    if (!(new_beta < beta) && iterations >= max_iter) {
      beta = new_beta;
      break;
    }
    beta = new_beta;
  }

  SolveResult out;
  out.iterations = iterations;
  VolumeField rr = b - apply(x, gm);
  out.boundary_residual =
      std::max(top(rr).max_abs(), bottom(rr).max_abs());
  set_top(rr, g.surface());
  set_bottom(rr, g.surface());
  out.interior_residual = l2_norm(g, rr);
  if (!x.all_finite() || beta > target) {
    std::ostringstream os;
    os << "elliptic solve did not converge: scaled residual " << beta << " > " << target << " after " << iterations
       << " iterations";
    throw SolverError(os.str(), iterations, beta);
  }
  out.solution = std::move(x);
  return out;
}

VolumeField solve_poisson_phi(const VolumeField& rhs, const SurfaceField& dir_top, const SurfaceField& neu_bottom,
                              const GraphMap& gm, const Grid& g, const SolverOptions& opts) {
  return PoissonSolver(g, opts).solve(rhs, dir_top, neu_bottom, gm).solution;
}

PressureRhs pressure_rhs(const State& s, const GraphMap& gm) {
  const Grid& g = gm.grid;
  std::array<VectorField, 3> gv;  // gv[l][i] = d_i^phi v_l
  for (int l = 0; l < 3; ++l) gv[l] = grad_phi(gm, s.v[l]);
  VolumeField rhs = g.volume();
  for (int i = 0; i < 3; ++i)
    for (int l = 0; l < 3; ++l) rhs += gv[l][i] * gv[i][l];
  for (int k = 0; k < 3; ++k) {
    std::array<VectorField, 3> gf;
    for (int l = 0; l < 3; ++l) gf[l] = grad_phi(gm, s.F[k][l]);
    for (int i = 0; i < 3; ++i)
      for (int l = 0; l < 3; ++l) rhs -= gf[l][i] * gf[i][l];
  }

  // Normal trace of the momentum equation on the bottom, where d_t v_3 = 0.
  VolumeField flux = g.volume();
  for (int k = 0; k < 3; ++k) flux += directional_phi(gm, s.F[k], s.F[k][2]);
  flux -= s.v[0] * gv[2][0] + s.v[1] * gv[2][1];
  flux -= transport_speed(gm, s.v) * gv[2][2];
  // gv[2][0] is d_1^phi v_3; on the bottom plane d_1 phi = 0 so it coincides with d_1 v_3.

  PressureRhs out{std::move(rhs), bottom(flux), false};
  const ConstraintResiduals cr = constraint_residuals(s, gm);
  out.advisory = std::max({cr.div_v, cr.div_F, cr.FN_top, cr.F3_bot, cr.v3_bot}) > 1e-4;
  return out;
}

SolveResult solve_pressure(const State& s, const GraphMap& gm, const PoissonSolver& solver,
                           const VolumeField* initial_guess) {
  const PressureRhs pr = pressure_rhs(s, gm);
  const SurfaceField dir = -s.sigma * mean_curvature(gm.grid, s.psi);
  return solver.solve(pr.rhs, dir, pr.neu_bottom, gm, initial_guess);
}

VectorField project_divfree(const VectorField& X, const GraphMap& gm, const PoissonSolver& solver) {
  const Grid& g = gm.grid;
  const VolumeField rhs = -div_phi(gm, X);
  const VolumeField theta = solver.solve(rhs, g.surface(), g.surface(), gm).solution;
  const VectorField grad = grad_phi(gm, theta);
  VectorField out = X - grad;
  return out;
}

VectorField project_divfree(const VectorField& X, const GraphMap& gm, const Grid& g) {
  return project_divfree(X, gm, PoissonSolver(g));
}

HodgeReport hodge_report(const VectorField& X, const GraphMap& gm, const Grid& g, int s) {
  if (s < 1 || s > 4) throw PreconditionError("hodge_report: s must be in 1..4");
  HodgeReport r;
  r.norm_s = sobolev_norm(g, X, s);
  r.div_norm = sobolev_norm(g, div_phi(gm, X), s - 1);
  r.curl_norm = sobolev_norm(g, curl_phi(gm, X), s - 1);
  double tan2 = 0.0;
  for (int m1 = 0; m1 <= s; ++m1)
    for (const auto& c : X) {
      const VolumeField d = d_tan(g, c, m1, s - m1);
      tan2 += quad_volume(g, d * d);
    }
  r.tangential = std::sqrt(std::max(0.0, tan2));
  r.l2 = l2_norm(g, X);
  const double denom = r.div_norm * r.div_norm + r.curl_norm * r.curl_norm + tan2 + r.l2 * r.l2;
  if (denom > 0.0) r.ratio = r.norm_s * r.norm_s / denom;
  return r;
}

double neumann_compatibility(const VolumeField& rhs, const SurfaceField& g_top, const SurfaceField& g_bottom,
                             const GraphMap& gm) {
  const Grid& g = gm.grid;
  return quad_volume(g, rhs * gm.d3phi) + quad_surface(g, g_top) - quad_surface(g, g_bottom);
}

}  // namespace capelast
