#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "capelast/graphmap.hpp"
#include "capelast/grid.hpp"

namespace capelast {

/// One time slice. F[j] is the j-th column of the deformation tensor, so F[j][i] holds F_ij.
struct State {
  double t = 0.0;
  double sigma = 0.0;
  SurfaceField psi;
  VectorField v;
  std::array<VectorField, 3> F;
  VolumeField q;
};

// Initial-data recipes ----------------------------------------------------------------------

enum class Trig { kCos, kSin };

/// amp * trig(k1 x1 + k2 x2)
struct SurfaceMode {
  double amp = 0.0;
  Trig trig = Trig::kCos;
  int k1 = 0;
  int k2 = 0;
};

/// Uniform random cos/sin amplitudes in [-amp, amp] for every mode 0 < |k|_inf <= kmax.
struct RandomModes {
  double amp = 0.0;
  int kmax = 1;
  std::uint64_t seed = 0;
};

struct SurfaceRecipe {
  std::vector<SurfaceMode> modes;
  std::optional<RandomModes> random;
};

enum class DepthProfile { kOne, kLinear, kExp, kCos };

/// One additive term of a physical vector field u(xbar, z), evaluated at z = phi.
///  potential: u = grad Phi with Phi = amp trig(k.x) cosh(|k|(z+b)) / cosh(|k| b)
///  component: u_i = amp trig(k.x) P(z), P in {1, z+b, e^z, cos z}
///  tangent:   stream function s = amp trig(k.x) (z+b) / (psi+b), u = (d_z s, 0, -d_1 s) for dir 1;
///             k must vanish along dir, which keeps u tangent to the surface
struct FieldTerm {
  enum class Kind { kPotential, kComponent, kTangent };
  Kind kind = Kind::kComponent;
  double amp = 0.0;
  Trig trig = Trig::kCos;
  int k1 = 0;
  int k2 = 0;
  int component = 1;
  DepthProfile profile = DepthProfile::kOne;
  int dir = 1;
};

using FieldRecipe = std::vector<FieldTerm>;

struct InitSpec {
  int nx = 32;
  int ny = 32;
  int nz = 17;
  double b = 1.0;
  double sigma = 0.0;
  CutoffProfile cutoff = CutoffProfile::kPolynomial;
  double delta0 = 0.1;
  SurfaceRecipe psi;
  FieldRecipe v;
  std::array<FieldRecipe, 3> F;
};

SurfaceField sample_surface_recipe(const Grid& g, const SurfaceRecipe& r);
/// Samples the recipe in physical coordinates at z = phi(x).
VectorField sample_field_recipe(const GraphMap& gm, const FieldRecipe& r);

struct SolverOptions;

/// Cutoff selected by the initial-data settings, sized for the sampled surface.
Cutoff make_spec_cutoff(const InitSpec& spec, const Grid& g, const SurfaceField& psi0);

/// Samples the recipes, projects v and each F_j to div-free fields, enforces the bottom
/// conditions and solves for q with q = -sigma kappa on the top.
State build_initial_data(const InitSpec& spec, const Grid& g, const Cutoff& cutoff, const SolverOptions& opts);
State build_initial_data(const InitSpec& spec, const Grid& g, const Cutoff& cutoff);

/// d_t psi = v . N on the top surface.
SurfaceField kinematic_rate(const Grid& g, const SurfaceField& psi, const VectorField& v);

struct ConstraintResiduals {
  double div_v = 0.0;   ///< ||div^phi v||_0
  double div_F = 0.0;   ///< max_j ||div^phi F_j||_0
  double FN_top = 0.0;  ///< max_j sup_Sigma |F_j . N|
  double F3_bot = 0.0;  ///< max_j sup_bottom |F_3j|
  double v3_bot = 0.0;  ///< sup_bottom |v_3|
};

ConstraintResiduals constraint_residuals(const State& s, const GraphMap& gm);

// History -----------------------------------------------------------------------------------

struct HistoryEntry {
  State state;
  SurfaceField psi_t;
};

/// Ring buffer of recent states at uniform spacing; index 0 is the oldest retained entry.
class History {
 public:
  History(Grid g, Cutoff cutoff, std::size_t capacity = 5);

  /// Throws HistoryError unless the new time continues the uniform spacing.
  void push(State s, SurfaceField psi_t);

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  bool empty() const noexcept { return entries_.empty(); }
  const HistoryEntry& operator[](std::size_t i) const { return entries_.at(i); }
  const HistoryEntry& newest() const;
  std::vector<double> times() const;
  /// Uniform spacing; zero while fewer than two entries are stored.
  double dt() const noexcept { return dt_; }

  const Grid& grid() const noexcept { return grid_; }
  const Cutoff& cutoff() const noexcept { return cutoff_; }
  GraphMap graphmap(std::size_t i) const;

 private:
  Grid grid_;
  Cutoff cutoff_;
  std::size_t capacity_;
  double dt_ = 0.0;
  std::deque<HistoryEntry> entries_;
};

/// Finite-difference weights for the m-th derivative at x0 using all given nodes.
std::vector<double> fd_weights(std::span<const double> nodes, double x0, int m);

/// Weights for the m-th time derivative at history entry `at` over all stored entries.
/// Throws HistoryError when fewer than m + 1 entries are available.
std::vector<double> time_weights(const History& h, std::size_t at, int m);

}  // namespace capelast
