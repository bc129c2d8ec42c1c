#include "capelast/graphmap.hpp"

#include <algorithm>
#include <sstream>

#include "capelast/error.hpp"

namespace capelast {

namespace {

double smoothstep(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double smoothstep_integral(double t) { return t * t * t * t * (2.5 + t * (-3.0 + t)); }

void sample_profile(const Grid& g, Cutoff& c) {
  const auto x3 = g.x3();
  c.chi.resize(x3.size());
  c.dchi.resize(x3.size());
  for (std::size_t k = 0; k < x3.size(); ++k) {
    c.chi[k] = c.chi_at(x3[k]);
    c.dchi[k] = c.dchi_at(x3[k]);
  }
}

VolumeField vertical_profile(const Grid& g, const std::vector<double>& values) {
  VolumeField f = g.volume();
  for (int k = 0; k < g.nz(); ++k) std::fill(f.plane(k).begin(), f.plane(k).end(), values[k]);
  return f;
}

}  // namespace

double Cutoff::chi_at(double x3) const {
  if (profile == CutoffProfile::kPolynomial) {
    const double s = std::clamp((x3 + depth) / depth, 0.0, 1.0);
    return s * s * (3.0 - 2.0 * s);
  }
  if (x3 <= lo) return 0.0;
  if (x3 >= hi) return 1.0;
  const double slope = 1.0 / (hi - lo - eps);
  if (x3 < lo + eps) return slope * eps * smoothstep_integral((x3 - lo) / eps);
  if (x3 > hi - eps) return 1.0 - slope * eps * smoothstep_integral((hi - x3) / eps);
  return slope * (0.5 * eps + (x3 - lo - eps));
}

double Cutoff::dchi_at(double x3) const {
  if (profile == CutoffProfile::kPolynomial) {
    const double s = std::clamp((x3 + depth) / depth, 0.0, 1.0);
    return 6.0 * s * (1.0 - s) / depth;
  }
  if (x3 <= lo || x3 >= hi) return 0.0;
  const double slope = 1.0 / (hi - lo - eps);
  if (x3 < lo + eps) return slope * smoothstep((x3 - lo) / eps);
  if (x3 > hi - eps) return slope * smoothstep((hi - x3) / eps);
  return slope;
}

Cutoff make_cutoff(const Grid& g, double delta0, double psi0_sup) {
  const double b = g.depth();
  if (!(delta0 > 0.0) || !(delta0 < b)) throw PreconditionError("cutoff: need 0 < delta0 < b");
  if (!(psi0_sup >= 0.0)) throw PreconditionError("cutoff: psi0_sup must be non-negative");

  Cutoff c;
  c.profile = CutoffProfile::kPlateau;
  c.depth = b;
  c.delta0 = delta0;
  c.psi0_sup = psi0_sup;
  c.lip_bound = 1.0 / (1.0 + psi0_sup);
  c.lo = -b + 0.05 * (b - delta0);
  c.hi = -delta0;
  const double width = c.hi - c.lo;
  const double needed = 1.0 + psi0_sup;
  if (width <= needed) {
    std::ostringstream os;
    os << "cutoff transition needs width > " << needed << " but only " << width
       << " is available below the plateau";
    throw InfeasibleCutoffError(os.str());
  }
  if (!(delta0 < 0.25 * b)) throw PreconditionError("cutoff: need delta0 < b/4");
  c.eps = std::min(0.25 * width, width - needed);
  c.max_slope = 1.0 / (width - c.eps);
  c.lipschitz_ok = c.max_slope <= c.lip_bound * (1.0 + 1e-14);
  sample_profile(g, c);
  return c;
}

Cutoff make_polynomial_cutoff(const Grid& g, double psi0_sup) {
  if (!(psi0_sup >= 0.0)) throw PreconditionError("cutoff: psi0_sup must be non-negative");
  Cutoff c;
  c.profile = CutoffProfile::kPolynomial;
  c.depth = g.depth();
  c.psi0_sup = psi0_sup;
  c.lip_bound = 1.0 / (1.0 + psi0_sup);
  c.max_slope = 1.5 / c.depth;
  c.lipschitz_ok = c.max_slope <= c.lip_bound;
  if (c.max_slope * psi0_sup >= 1.0) {
    std::ostringstream os;
    os << "cutoff: sup|chi' psi0| = " << c.max_slope * psi0_sup << " >= 1; the graph chart is degenerate";
    throw InfeasibleCutoffError(os.str());
  }
  sample_profile(g, c);
  return c;
}

Cutoff make_cutoff(const Grid& g, CutoffProfile profile, double delta0, double psi0_sup) {
  return profile == CutoffProfile::kPlateau ? make_cutoff(g, delta0, psi0_sup) : make_polynomial_cutoff(g, psi0_sup);
}

std::array<SurfaceField, 3> GraphMap::surface_normal() const {
  return {-d1psi, -d2psi, grid.surface(1.0)};
}

VectorField GraphMap::extended_normal() const { return {-d1phi, -d2phi, grid.volume(1.0)}; }

GraphMap build_graphmap(const SurfaceField& psi, const SurfaceField& psi_t, const Cutoff& cutoff, const Grid& g) {
  if (!g.compatible(psi) || !g.compatible(psi_t)) throw PreconditionError("build_graphmap: surface shape mismatch");
  if (cutoff.chi.size() != static_cast<std::size_t>(g.nz()))
    throw PreconditionError("build_graphmap: cutoff sampled on a different grid");
  if (!psi.all_finite() || !psi_t.all_finite()) throw PreconditionError("build_graphmap: non-finite surface data");

  GraphMap gm(g);
  gm.psi = psi;
  gm.psi_t = psi_t;
  gm.d1psi = d_tan(g, psi, 1);
  gm.d2psi = d_tan(g, psi, 2);

  const VolumeField chi = vertical_profile(g, cutoff.chi);
  const VolumeField dchi = vertical_profile(g, cutoff.dchi);
  const int nz = g.nz();
  const VolumeField psi3 = extrude(psi, nz);

  gm.phi = sample(g, [](double, double, double x3) { return x3; }) + chi * psi3;
  gm.d1phi = chi * extrude(gm.d1psi, nz);
  gm.d2phi = chi * extrude(gm.d2psi, nz);
  gm.d3phi = dchi * psi3 + 1.0;
  gm.dtphi = chi * extrude(psi_t, nz);

  gm.c0 = gm.d3phi.min();
  if (!(gm.c0 > 0.0)) {
    std::ostringstream os;
    os << "graph map degenerate: min d3(phi) = " << gm.c0;
    throw DegenerateMapError(os.str(), gm.c0);
  }
  gm.a33 = map(gm.d3phi, [](double x) { return 1.0 / x; });
  gm.a31 = -(gm.d1phi * gm.a33);
  gm.a32 = -(gm.d2phi * gm.a33);
  return gm;
}

VolumeField dphi(const GraphMap& gm, const VolumeField& f, int i) {
  switch (i) {
    case 1: {
      VolumeField out = d_tan(gm.grid, f, 1);
      out += gm.a31 * d_vert(gm.grid, f);
      return out;
    }
    case 2: {
      VolumeField out = d_tan(gm.grid, f, 2);
      out += gm.a32 * d_vert(gm.grid, f);
      return out;
    }
    case 3:
      return gm.a33 * d_vert(gm.grid, f);
    default:
      throw PreconditionError("dphi: direction must be 1, 2 or 3");
  }
}

VectorField grad_phi(const GraphMap& gm, const VolumeField& f) {
  const VolumeField f3 = d_vert(gm.grid, f);
  VectorField out{d_tan(gm.grid, f, 1), d_tan(gm.grid, f, 2), gm.a33 * f3};
  out[0] += gm.a31 * f3;
  out[1] += gm.a32 * f3;
  return out;
}

VolumeField div_phi(const GraphMap& gm, const VectorField& X) {
  VolumeField out = d_tan(gm.grid, X[0], 1);
  out += d_tan(gm.grid, X[1], 2);
  VolumeField vert = gm.a31 * d_vert(gm.grid, X[0]);
  vert += gm.a32 * d_vert(gm.grid, X[1]);
  vert += gm.a33 * d_vert(gm.grid, X[2]);
  out += vert;
  return out;
}

VectorField curl_phi(const GraphMap& gm, const VectorField& X) {
  const VectorField g0 = grad_phi(gm, X[0]);
  const VectorField g1 = grad_phi(gm, X[1]);
  const VectorField g2 = grad_phi(gm, X[2]);
  return {g2[1] - g1[2], g0[2] - g2[0], g1[0] - g0[1]};
}

VolumeField laplacian_phi(const GraphMap& gm, const VolumeField& f) { return div_phi(gm, grad_phi(gm, f)); }

VolumeField directional_phi(const GraphMap& gm, const VectorField& X, const VolumeField& f) {
  return dot(X, grad_phi(gm, f));
}

VolumeField transport_speed(const GraphMap& gm, const VectorField& v) {
  VolumeField u = v[2] - gm.dtphi;
  u -= v[0] * gm.d1phi;
  u -= v[1] * gm.d2phi;
  return u;
}

VolumeField material_derivative(const GraphMap& gm, const VolumeField& f_t, const VolumeField& f, const VectorField& v) {
  VolumeField out = f_t;
  out += v[0] * d_tan(gm.grid, f, 1);
  out += v[1] * d_tan(gm.grid, f, 2);
  out += transport_speed(gm, v) * dphi(gm, f, 3);
  return out;
}

SurfaceField mean_curvature(const Grid& g, const SurfaceField& psi) {
  const SurfaceField p1 = d_tan(g, psi, 1);
  const SurfaceField p2 = d_tan(g, psi, 2);
  const SurfaceField inv = map(p1 * p1 + p2 * p2, [](double s) { return 1.0 / std::sqrt(1.0 + s); });
  SurfaceField kappa = d_tan(g, p1 * inv, 1);
  kappa += d_tan(g, p2 * inv, 2);
  return kappa;
}

}  // namespace capelast
