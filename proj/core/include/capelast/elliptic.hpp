#pragma once

#include <memory>
#include <optional>

#include "capelast/graphmap.hpp"
#include "capelast/grid.hpp"
#include "capelast/state.hpp"

namespace capelast {

struct SolverOptions {
  double tol = 1e-9;
  int max_iter = 500;
  int restart = 40;
};

struct SolveResult {
  VolumeField solution;
  int iterations = 0;
  /// ||-Delta^phi W - rhs||_0 over interior nodes.
  double interior_residual = 0.0;
  /// Largest boundary-row mismatch (Dirichlet top or Neumann bottom).
  double boundary_residual = 0.0;
};

/// Mixed problem -Delta^phi W = rhs in the slab, W = dir_top on the top, d_3^phi W = neu_bottom on
/// the bottom. Restarted GMRES, right-preconditioned by the exact inverse of the flat (psi = 0)
/// operator, which diagonalizes in tangential Fourier modes.
class PoissonSolver {
 public:
  explicit PoissonSolver(const Grid& g, SolverOptions opts = {});
  ~PoissonSolver();
  PoissonSolver(PoissonSolver&&) noexcept;
  PoissonSolver& operator=(PoissonSolver&&) noexcept;

  const Grid& grid() const noexcept;
  const SolverOptions& options() const noexcept;

  /// Throws SolverError when the tolerance is not met within max_iter iterations.
  SolveResult solve(const VolumeField& rhs, const SurfaceField& dir_top, const SurfaceField& neu_bottom,
                    const GraphMap& gm, const VolumeField* initial_guess = nullptr) const;

  /// Row operator: W on the top plane, -Delta^phi W inside, d_3^phi W on the bottom plane.
  VolumeField apply(const VolumeField& W, const GraphMap& gm) const;
  /// Inverse of the flat operator applied to boundary-row data laid out like apply()'s output.
  VolumeField apply_flat_inverse(const VolumeField& r) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

VolumeField solve_poisson_phi(const VolumeField& rhs, const SurfaceField& dir_top, const SurfaceField& neu_bottom,
                              const GraphMap& gm, const Grid& g, const SolverOptions& opts = {});

struct PressureRhs {
  VolumeField rhs;
  SurfaceField neu_bottom;
  /// Set when the state's constraints are violated by more than 1e-4.
  bool advisory = false;
};

/// rhs = d_i^phi v_l d_l^phi v_i - d_i^phi F_lk d_l^phi F_ik, bottom data from the normal trace of
/// the momentum equation.
PressureRhs pressure_rhs(const State& s, const GraphMap& gm);

/// Solves for q with top data -sigma kappa(psi).
SolveResult solve_pressure(const State& s, const GraphMap& gm, const PoissonSolver& solver,
                           const VolumeField* initial_guess = nullptr);

/// X - grad^phi theta with -Delta^phi theta = -div^phi X, theta = 0 on top, d_3^phi theta = 0 on bottom.
VectorField project_divfree(const VectorField& X, const GraphMap& gm, const PoissonSolver& solver);
VectorField project_divfree(const VectorField& X, const GraphMap& gm, const Grid& g);

struct HodgeReport {
  double norm_s = 0.0;      ///< ||X||_s
  double div_norm = 0.0;    ///< ||div^phi X||_{s-1}
  double curl_norm = 0.0;   ///< ||curl^phi X||_{s-1}
  double tangential = 0.0;  ///< ||dbar^s X||_0
  double l2 = 0.0;          ///< ||X||_0
  /// ||X||_s^2 over the sum of the four right-hand squares; empty when that sum is zero.
  std::optional<double> ratio;
};

HodgeReport hodge_report(const VectorField& X, const GraphMap& gm, const Grid& g, int s);

/// Solvability defect of the all-Neumann problem with the given fluxes:
/// int rhs d3phi + int_top g_top - int_bottom g_bottom, where g_top = grad^phi W . N and
/// g_bottom = d_3^phi W.
double neumann_compatibility(const VolumeField& rhs, const SurfaceField& g_top, const SurfaceField& g_bottom,
                             const GraphMap& gm);

}  // namespace capelast
