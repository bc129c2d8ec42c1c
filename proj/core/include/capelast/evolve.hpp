#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "capelast/diagnostics.hpp"
#include "capelast/elliptic.hpp"
#include "capelast/graphmap.hpp"
#include "capelast/state.hpp"

namespace capelast {

struct Tendencies {
  SurfaceField psi;
  VectorField v;
  std::array<VectorField, 3> F;
};

/// Right-hand sides of the evolution system for a state whose q is current. gm must be built from
/// (psi, v . N). With `dealias` the tangential 2/3 rule is applied to every tendency.
Tendencies tendencies(const State& s, const GraphMap& gm, bool dealias = false);

/// 0.5 min(dx / max|v|, sqrt(dx^3 / (pi sigma)), dz_min c0 / max|v . N - d_t phi|); infinite at rest
/// with sigma = 0.
double cfl_limit(const State& s, const GraphMap& gm);

struct StepOptions {
  bool dealias = true;
  bool filter = false;
  bool check_cfl = true;
};

struct StepResult {
  State state;
  SurfaceField psi_t;
  GraphMap gm;
  int solver_iterations = 0;
};

/// Classical RK4 with a pressure solve per stage. After the update v is projected to a div-free
/// field, v_3 and F_3j are reset to zero on the bottom, and q is solved for the new state.
class Stepper {
 public:
  Stepper(Grid g, Cutoff cutoff, SolverOptions solver = {}, StepOptions opts = {});

  const Grid& grid() const noexcept { return grid_; }
  const Cutoff& cutoff() const noexcept { return cutoff_; }
  const PoissonSolver& solver() const noexcept { return solver_; }
  const StepOptions& options() const noexcept { return opts_; }

  /// Geometry of a state with d_t psi = v . N.
  GraphMap graphmap(const State& s) const;

  /// Throws CflError (with the suggested step) when dt exceeds cfl_limit and checking is on.
  StepResult step(const State& s, double dt) const;

 private:
  Grid grid_;
  Cutoff cutoff_;
  PoissonSolver solver_;
  StepOptions opts_;
};

State step_rk4(const State& s, const Cutoff& cutoff, const Grid& g, double dt);

struct RunConfig {
  InitSpec init;
  double t_final = 0.5;
  double dt = 0.05;
  int snapshot_every = 10;
  int k_max = 1;
  double rt_c0 = 0.0;
  std::size_t history_length = 5;
  SolverOptions solver;
  StepOptions step;
};

struct RunResult {
  std::vector<DiagnosticsRecord> diagnostics;
  /// States at step 0, every snapshot_every steps, and the final step.
  std::vector<State> snapshots;
  std::optional<History> history;
  int steps = 0;
  bool aborted = false;
  std::string abort_reason;
  double rt_min = 0.0;  ///< minimum of rt_min over the run
};

struct RunObserver {
  std::function<void(const DiagnosticsRecord&)> on_record;
  std::function<void(int step, const State&)> on_snapshot;
};

/// Evolves from build_initial_data(config.init) to t_final in uniform steps no longer than
/// config.dt. Physics failures (degenerate map, solver breakdown, CFL) end the run with
/// aborted = true; records already produced are kept and were passed to the observer.
RunResult run(const RunConfig& config, const RunObserver& observer = {});

/// Same, starting from a prepared state.
RunResult run_from(const RunConfig& config, const State& initial, const Cutoff& cutoff, const Grid& g,
                   const RunObserver& observer = {});

}  // namespace capelast
