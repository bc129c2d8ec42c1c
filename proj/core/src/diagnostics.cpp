#include "capelast/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "capelast/alinhac.hpp"
#include "capelast/error.hpp"

namespace capelast {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double relative(double residual, double scale) { return scale > 1e-300 ? residual / scale : residual; }

/// m-th time derivative at entry `at` of a quantity evaluated on every stored entry.
template <class T, class Fn>
T time_derivative(const History& h, std::size_t at, int m, Fn&& value) {
  if (m == 0) return value(at);
  const auto w = time_weights(h, at, m);
  T acc = value(0) * w[0];
  for (std::size_t n = 1; n < h.size(); ++n) acc += value(n) * w[n];
  return acc;
}

}  // namespace

std::string diagnostics_csv_header() { return "t,E_cons,E_high,div_v,div_F,FN_top,v3_bot,F3_bot,rt_min,dt"; }

std::string to_csv_row(const DiagnosticsRecord& r) {
  std::ostringstream os;
  os << fmt(r.t) << ',' << fmt(r.E_cons) << ',' << fmt(r.E_high) << ',' << fmt(r.constraints.div_v) << ','
     << fmt(r.constraints.div_F) << ',' << fmt(r.constraints.FN_top) << ',' << fmt(r.constraints.v3_bot) << ','
     << fmt(r.constraints.F3_bot) << ',' << fmt(r.rt_min) << ',' << fmt(r.dt);
  return os.str();
}

double conserved_energy(const State& s, const GraphMap& gm) {
  const Grid& g = gm.grid;
  VolumeField density = dot(s.v, s.v);
  for (const auto& col : s.F) density += dot(col, col);
  const SurfaceField slope2 = gm.d1psi * gm.d1psi + gm.d2psi * gm.d2psi;
  const SurfaceField area = map(slope2, [](double x) { return std::sqrt(1.0 + x); });
  return 0.5 * quad_volume(g, density * gm.d3phi) + s.sigma * quad_surface(g, area);
}

double higher_energy(const History& h, const GraphMap& gm, int k_max) {
  if (k_max < 0 || k_max > 4) throw PreconditionError("higher_energy: k_max must be in 0..4");
  if (h.size() < static_cast<std::size_t>(k_max) + 1) {
    std::ostringstream os;
    os << "higher_energy: k_max = " << k_max << " needs " << k_max + 1 << " stored states, history holds "
       << h.size();
    throw HistoryError(os.str());
  }
  const Grid& g = gm.grid;
  const std::size_t at = h.size() - 1;
  const double sigma = h.newest().state.sigma;
  double total = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    const int s = 4 - k;
    double f2 = 0.0;
    for (int j = 0; j < 3; ++j) {
      const VectorField dF = time_derivative<VectorField>(h, at, k, [&](std::size_t n) { return h[n].state.F[j]; });
      const double nj = sobolev_norm(g, dF, s);
      f2 += nj * nj;
    }
    total += std::sqrt(f2);
    const VectorField dv = time_derivative<VectorField>(h, at, k, [&](std::size_t n) { return h[n].state.v; });
    total += sobolev_norm(g, dv, s);
    const SurfaceField dpsi = time_derivative<SurfaceField>(h, at, k, [&](std::size_t n) { return h[n].state.psi; });
    const double n1 = sobolev_norm(g, d_tan(g, dpsi, 1), s);
    const double n2 = sobolev_norm(g, d_tan(g, dpsi, 2), s);
    total += std::sqrt(sigma) * std::sqrt(n1 * n1 + n2 * n2);
    if (k <= 3) {
      const VolumeField dq = time_derivative<VolumeField>(h, at, k, [&](std::size_t n) { return h[n].state.q; });
      total += sobolev_norm(g, dq, s);
    }
  }
  return total;
}

RtReport rt_monitor(const VolumeField& q, const GraphMap& gm, const Grid& g, double c0_req) {
  if (!g.compatible(q) || !g.compatible(gm.phi)) throw PreconditionError("rt_monitor: shape mismatch");
  const SurfaceField dq = top(d_vert(g, q));
  RtReport r;
  r.rt_min = 0.0 - dq.max();
  r.holds = r.rt_min >= c0_req;
  return r;
}

std::vector<LemmaRow> lemma_checks(const History& h, const GraphMap& gm, const Grid& g) {
  if (h.empty()) throw HistoryError("lemma_checks: history is empty");
  const std::size_t c = (h.size() - 1) / 2;
  const GraphMap mid = h.size() == 1 ? gm : h.graphmap(c);
  const State& s = h[c].state;
  const bool timed = h.size() >= 2;

  std::vector<std::string> names = {"v1", "v2", "v3", "q"};
  for (int j = 1; j <= 3; ++j)
    for (int i = 1; i <= 3; ++i) {
      const std::string name = "F" + std::to_string(i) + std::to_string(j);
      if (field_of(s, mid, name).max_abs() > 0.0) names.push_back(name);
    }

  auto series_dt = [&](std::size_t at, auto&& value) {
    return time_derivative<VolumeField>(h, at, 1, value);
  };
  // d_t^phi f = d_t f - (d_t phi / d3 phi) d3 f, at the middle entry.
  auto dt_phi = [&](auto&& value) {
    VolumeField out = series_dt(c, value);
    out -= mid.dtphi * dphi(mid, value(c), 3);
    return out;
  };

  std::vector<GraphMap> gms;
  for (std::size_t n = 0; timed && n < h.size(); ++n) gms.push_back(n == c ? mid : h.graphmap(n));

  std::vector<LemmaRow> rows;
  const char* dir_name[4] = {"t", "1", "2", "3"};
  for (const auto& name : names) {
    const VolumeField f = field_of(s, mid, name);
    const double scale = sobolev_norm(g, f, 2);

    for (int i = 1; i <= 3; ++i)
      for (int j = i + 1; j <= 3; ++j) {
        const VolumeField r = dphi(mid, dphi(mid, f, j), i) - dphi(mid, dphi(mid, f, i), j);
        const double res = l2_norm(g, r);
        rows.push_back({"commutation", name + " [" + dir_name[i] + "," + dir_name[j] + "]", res, scale,
                        relative(res, scale)});
      }
    if (timed) {
      auto f_n = [&](std::size_t n) { return field_of(h[n].state, gms[n], name); };
      for (int i = 1; i <= 3; ++i) {
        // d_t^phi d_i^phi f - d_i^phi d_t^phi f
        VolumeField r = dt_phi([&](std::size_t n) { return dphi(gms[n], f_n(n), i); });
        r -= dphi(mid, dt_phi(f_n), i);
        const double res = l2_norm(g, r);
        rows.push_back({"commutation", name + " [t," + dir_name[i] + "]", res, scale, relative(res, scale)});
      }

      // d/dt int f d3phi = int D_t^phi f d3phi
      const double lhs = time_derivative<double>(h, c, 1, [&](std::size_t n) {
        return quad_volume(g, f_n(n) * gms[n].d3phi);
      });
      const VolumeField dtf = material_derivative(mid, series_dt(c, f_n), f, s.v);
      const VolumeField integrand = dtf * mid.d3phi;
      const double rhs = quad_volume(g, integrand);
      const double res = std::abs(lhs - rhs);
      const double sc = std::abs(lhs) + quad_volume(g, map(integrand, [](double x) { return std::abs(x); }));
      rows.push_back({"transport", name, res, sc, relative(res, sc)});
    }
  }

  // int (d_i f) g d3phi + int f (d_i g) d3phi = int_top f g N_i + int_bottom f g n_i, n = (0, 0, -1)
  const auto N = mid.surface_normal();
  for (std::size_t a = 0; a < names.size(); ++a) {
    const std::string& fn = names[a];
    const std::string& gn = names[(a + 1) % names.size()];
    const VolumeField f = field_of(s, mid, fn);
    const VolumeField gg = field_of(s, mid, gn);
    for (int i = 1; i <= 3; ++i) {
      const VolumeField t1 = dphi(mid, f, i) * gg * mid.d3phi;
      const VolumeField t2 = f * dphi(mid, gg, i) * mid.d3phi;
      const SurfaceField fg_top = top(f) * top(gg);
      const SurfaceField t3 = fg_top * N[i - 1];
      const double bottom_term = i == 3 ? -quad_surface(g, bottom(f) * bottom(gg)) : 0.0;
      const double res = std::abs(quad_volume(g, t1) + quad_volume(g, t2) - quad_surface(g, t3) - bottom_term);
      auto l1 = [&](const auto& x) { return map(x, [](double y) { return std::abs(y); }); };
      const double sc = quad_volume(g, l1(t1)) + quad_volume(g, l1(t2)) + quad_surface(g, l1(t3)) +
                        std::abs(bottom_term);
      rows.push_back({"ibp", fn + "," + gn + " i=" + std::to_string(i), res, sc, relative(res, sc)});
    }
  }
  return rows;
}

std::string lemma_csv_header() { return "lemma,detail,residual,scale,relative"; }

std::string to_csv_row(const LemmaRow& r) {
  std::ostringstream os;
  os << r.lemma << ",\"" << r.detail << "\"," << fmt(r.residual) << ',' << fmt(r.scale) << ',' << fmt(r.relative);
  return os.str();
}

}  // namespace capelast
