#include "capelast/manufactured.hpp"

#include <algorithm>
#include <cmath>

#include "capelast/error.hpp"

namespace capelast {

namespace {

struct ModeValue {
  double f, d1, d2;
};

ModeValue eval_mode(const SurfaceMode& m, double x1, double x2) {
  const double th = m.k1 * x1 + m.k2 * x2;
  const double c = std::cos(th), s = std::sin(th);
  if (m.trig == Trig::kCos) return {m.amp * c, -m.amp * m.k1 * s, -m.amp * m.k2 * s};
  return {m.amp * s, m.amp * m.k1 * c, m.amp * m.k2 * c};
}

ModeValue eval_modes(const std::vector<SurfaceMode>& ms, double x1, double x2) {
  ModeValue out{0.0, 0.0, 0.0};
  for (const auto& m : ms) {
    const ModeValue v = eval_mode(m, x1, x2);
    out.f += v.f;
    out.d1 += v.d1;
    out.d2 += v.d2;
  }
  return out;
}

/// Field of the stream function s = c z + A h(x) (z - psi)(z + b) in direction dir: returns
/// (d_z s) e_dir + (-d_dir s) e_3.
std::array<double, 3> stream_field(int dir, double c, double A, const ModeValue& h, const ModeValue& psi, double z,
                                   double b) {
  std::array<double, 3> u{0.0, 0.0, 0.0};
  const double dh = dir == 1 ? h.d1 : h.d2;
  const double dpsi = dir == 1 ? psi.d1 : psi.d2;
  u[dir - 1] = c + A * h.f * (2.0 * z - psi.f + b);
  u[2] = -A * (dh * (z - psi.f) * (z + b) - h.f * dpsi * (z + b));
  return u;
}

}  // namespace

AnalyticFlow traveling_wave(const TravelingWave& p) {
  AnalyticFlow f;
  f.b = p.b;
  f.sigma = p.sigma;
  const auto surf = [p](double t, double x1, double x2) {
    return eval_modes(p.psi, x1 - p.c1 * t, x2 - p.c2 * t);
  };
  f.psi = [surf](double t, double x1, double x2) { return surf(t, x1, x2).f; };
  f.psi_t = [surf, p](double t, double x1, double x2) {
    const ModeValue s = surf(t, x1, x2);
    return -p.c1 * s.d1 - p.c2 * s.d2;
  };
  f.v = [surf, p](double t, double x1, double x2, double z) {
    const ModeValue s = surf(t, x1, x2);
    const auto u1 = stream_field(1, p.c1, p.v_amp[0], eval_mode(p.v_shape[0], x1, x2), s, z, p.b);
    const auto u2 = stream_field(2, p.c2, p.v_amp[1], eval_mode(p.v_shape[1], x1, x2), s, z, p.b);
    return std::array<double, 3>{u1[0] + u2[0], u1[1] + u2[1], u1[2] + u2[2]};
  };
  for (int j = 0; j < 3; ++j)
    f.F[j] = [surf, p, j](double t, double x1, double x2, double z) {
      return stream_field(p.F_dir[j], 0.0, p.F_amp[j], eval_mode(p.F_shape[j], x1, x2), surf(t, x1, x2), z, p.b);
    };
  f.q = [p](double t, double x1, double x2, double z) {
    return -z + p.q_amp * std::cos(x1 - p.c1 * t + x2) * std::exp(z);
  };
  return f;
}

AnalyticFlow steady_wave(TravelingWave p) {
  p.c1 = 0.0;
  p.c2 = 0.0;
  return traveling_wave(p);
}

HistoryEntry sample_state(const AnalyticFlow& flow, double t, const Cutoff& cutoff, const Grid& g) {
  if (std::abs(flow.b - g.depth()) > 1e-14 * g.depth()) throw PreconditionError("sample_state: depth mismatch");
  HistoryEntry e;
  State& s = e.state;
  s.t = t;
  s.sigma = flow.sigma;
  s.psi = sample_surface(g, [&](double x1, double x2) { return flow.psi(t, x1, x2); });
  e.psi_t = sample_surface(g, [&](double x1, double x2) { return flow.psi_t(t, x1, x2); });
  const GraphMap gm = build_graphmap(s.psi, e.psi_t, cutoff, g);

  s.v = g.vector();
  for (auto& col : s.F) col = g.vector();
  s.q = g.volume();
  const auto x1 = g.x1();
  const auto x2 = g.x2();
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        const double z = gm.phi(i, j, k);
        const auto v = flow.v(t, x1[i], x2[j], z);
        for (int c = 0; c < 3; ++c) s.v[c](i, j, k) = v[c];
        for (int col = 0; col < 3; ++col) {
          const auto F = flow.F[col](t, x1[i], x2[j], z);
          for (int c = 0; c < 3; ++c) s.F[col][c](i, j, k) = F[c];
        }
        s.q(i, j, k) = flow.q(t, x1[i], x2[j], z);
      }
  return e;
}

History sample_history(const AnalyticFlow& flow, double t0, double dt, std::size_t count, const Cutoff& cutoff,
                       const Grid& g) {
  if (count == 0) throw PreconditionError("sample_history: count must be positive");
  History h(g, cutoff, std::max<std::size_t>(count, 2));
  for (std::size_t n = 0; n < count; ++n) {
    HistoryEntry e = sample_state(flow, t0 + static_cast<double>(n) * dt, cutoff, g);
    h.push(std::move(e.state), std::move(e.psi_t));
  }
  return h;
}

Cutoff flow_cutoff(const AnalyticFlow& flow, const Grid& g, double t0, double t1) {
  double sup = 0.0;
  for (double t : {t0, 0.5 * (t0 + t1), t1}) {
    const SurfaceField psi = sample_surface(g, [&](double x1, double x2) { return flow.psi(t, x1, x2); });
    sup = std::max(sup, psi.max_abs());
  }
  return make_polynomial_cutoff(g, sup);
}

}  // namespace capelast
