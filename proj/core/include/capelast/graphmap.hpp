#pragma once

// Graph coordinates: the map Phi(t, x) = (x1, x2, phi) with phi = x3 + chi(x3) psi flattens the
// moving fluid domain onto the fixed slab. Twisted operators are the physical derivatives pulled
// back through that map.

#include <array>
#include <vector>

#include "capelast/grid.hpp"

namespace capelast {

enum class CutoffProfile {
  kPlateau,     ///< chi == 1 on (-delta0, 0], C^3 smoothstep transition, chi == 0 near -b
  kPolynomial,  ///< chi = 3s^2 - 2s^3 with s = (x3 + b) / b
};

struct Cutoff {
  CutoffProfile profile = CutoffProfile::kPolynomial;
  double depth = 1.0;
  double delta0 = 0.0;
  double psi0_sup = 0.0;
  /// 1 / (1 + psi0_sup)
  double lip_bound = 1.0;
  /// Largest |chi'| over [-b, 0] (closed form, not sampled).
  double max_slope = 0.0;
  /// Whether max_slope <= lip_bound.
  bool lipschitz_ok = false;

  // Plateau transition parameters: slope profile supported on [lo, hi] with ramps of width eps.
  double lo = 0.0;
  double hi = 0.0;
  double eps = 0.0;

  std::vector<double> chi;   ///< sampled on the grid's depth nodes
  std::vector<double> dchi;  ///< chi' on the depth nodes

  double chi_at(double x3) const;
  double dchi_at(double x3) const;
};

/// Plateau cutoff. Requires 0 < delta0 < b/4 and psi0_sup >= 0; throws InfeasibleCutoffError when
/// the transition region cannot hold a ramp with slope <= 1 / (1 + psi0_sup).
Cutoff make_cutoff(const Grid& g, double delta0, double psi0_sup);

/// Cubic cutoff with chi(0) = 1, chi'(0) = 0, chi(-b) = chi'(-b) = 0. Only the chart condition
/// sup |chi' psi0| < 1 is enforced; lipschitz_ok reports the stronger bound.
Cutoff make_polynomial_cutoff(const Grid& g, double psi0_sup);

Cutoff make_cutoff(const Grid& g, CutoffProfile profile, double delta0, double psi0_sup);

/// Geometry derived from (psi, d_t psi). Built once per state; read-only afterwards.
struct GraphMap {
  explicit GraphMap(Grid g) : grid(std::move(g)) {}

  Grid grid;
  SurfaceField psi, psi_t, d1psi, d2psi;
  VolumeField phi, d1phi, d2phi, d3phi, dtphi;
  /// Third row of the cofactor matrix; rows one and two are the identity.
  VolumeField a31, a32, a33;
  double c0 = 1.0;

  /// Surface normal (-d1 psi, -d2 psi, 1).
  std::array<SurfaceField, 3> surface_normal() const;
  /// Interior field (-d1 phi, -d2 phi, 1).
  VectorField extended_normal() const;
};

/// Throws DegenerateMapError if min d3(phi) <= 0.
GraphMap build_graphmap(const SurfaceField& psi, const SurfaceField& psi_t, const Cutoff& cutoff, const Grid& g);

/// d_i^phi f for i in {1, 2, 3}.
VolumeField dphi(const GraphMap& gm, const VolumeField& f, int i);
VectorField grad_phi(const GraphMap& gm, const VolumeField& f);
VolumeField div_phi(const GraphMap& gm, const VectorField& X);
VectorField curl_phi(const GraphMap& gm, const VectorField& X);
/// sum_i d_i^phi d_i^phi f
VolumeField laplacian_phi(const GraphMap& gm, const VolumeField& f);
/// (X . grad^phi) f
VolumeField directional_phi(const GraphMap& gm, const VectorField& X, const VolumeField& f);

/// v . (-d1 phi, -d2 phi, 1) - d_t phi
VolumeField transport_speed(const GraphMap& gm, const VectorField& v);
/// f_t + vbar . dbar f + (v . N - d_t phi) d_3^phi f
VolumeField material_derivative(const GraphMap& gm, const VolumeField& f_t, const VolumeField& f, const VectorField& v);

/// div(grad psi / sqrt(1 + |grad psi|^2)) on the torus.
SurfaceField mean_curvature(const Grid& g, const SurfaceField& psi);

}  // namespace capelast
