#include "capelast/alinhac.hpp"

#include <functional>
#include <sstream>

#include "capelast/error.hpp"

namespace capelast {

namespace {

using Series = std::vector<VolumeField>;

int levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

class Calculus {
 public:
  Calculus(const History& h, const GraphMap& newest) : h_(h) {
    if (h.empty()) throw HistoryError("alinhac: history is empty");
    if (!newest.grid.same_as(h.grid()) && !(newest.grid.nx() == h.grid().nx() && newest.grid.ny() == h.grid().ny() &&
                                            newest.grid.nz() == h.grid().nz()))
      throw PreconditionError("alinhac: graph map and history live on different grids");
    const SurfaceField& psi = h.newest().state.psi;
    if ((newest.psi - psi).max_abs() > 1e-12 * (1.0 + psi.max_abs()))
      throw PreconditionError("alinhac: graph map does not belong to the newest history entry");
    N_ = h.size() - 1;
    gms_.reserve(h.size());
    for (std::size_t n = 0; n < N_; ++n) gms_.push_back(h.graphmap(n));
    gms_.push_back(newest);
  }

  std::size_t size() const { return gms_.size(); }
  std::size_t newest() const { return N_; }
  const Grid& grid() const { return gms_.back().grid; }
  const GraphMap& gm(std::size_t n) const { return gms_[n]; }
  const State& state(std::size_t n) const { return h_[n].state; }

  Series make(const std::function<VolumeField(std::size_t)>& fn) const {
    Series s;
    s.reserve(size());
    for (std::size_t n = 0; n < size(); ++n) s.push_back(fn(n));
    return s;
  }

  Series field(std::string_view name) const {
    return make([&](std::size_t n) { return field_of(state(n), gm(n), name); });
  }

  /// m-th time derivative of the series at entry n.
  VolumeField dt(const Series& s, std::size_t n, int m) const {
    if (m == 0) return s[n];
    const auto w = time_weights(h_, n, m);
    VolumeField acc = grid().volume();
    for (std::size_t i = 0; i < s.size(); ++i) axpy(acc, w[i], s[i]);
    return acc;
  }

  VolumeField D_at(const Series& s, MultiIndex a, std::size_t n) const {
    return d_tan(grid(), dt(s, n, a.t), a.x1, a.x2);
  }
  VolumeField D(const Series& s, MultiIndex a) const { return D_at(s, a, N_); }
  Series D_series(const Series& s, MultiIndex a) const {
    return make([&](std::size_t n) { return D_at(s, a, n); });
  }

  static Series product(const Series& a, const Series& b) {
    Series out;
    out.reserve(a.size());
    for (std::size_t n = 0; n < a.size(); ++n) out.push_back(a[n] * b[n]);
    return out;
  }

  /// [D^a, x, y] = D^a(xy) - (D^a x) y - x D^a y
  VolumeField triple(const Series& x, const Series& y, MultiIndex a) const {
    VolumeField out = D(product(x, y), a);
    out -= D(x, a) * y[N_];
    out -= x[N_] * D(y, a);
    return out;
  }

  /// [D^a, x] y = D^a(xy) - x D^a y
  VolumeField commutator(const Series& x, const Series& y, MultiIndex a) const {
    VolumeField out = D(product(x, y), a);
    out -= x[N_] * D(y, a);
    return out;
  }

  /// sum over unit beta <= a of (a_beta / |a|) [D^{a-beta}, (d3 phi)^-2] D^beta d3 phi
  VolumeField chain(MultiIndex a) const {
    const Series g = make([&](std::size_t n) { return gm(n).d3phi; });
    const Series ginv2 = make([&](std::size_t n) { return gm(n).a33 * gm(n).a33; });
    VolumeField out = grid().volume();
    const double total = a.order();
    const MultiIndex units[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    const int counts[3] = {a.t, a.x1, a.x2};
    for (int u = 0; u < 3; ++u) {
      if (counts[u] == 0) continue;
      const MultiIndex rest{a.t - units[u].t, a.x1 - units[u].x1, a.x2 - units[u].x2};
      if (rest.order() == 0) continue;
      const Series dg = D_series(g, units[u]);
      axpy(out, counts[u] / total, commutator(ginv2, dg, rest));
    }
    return out;
  }

  /// D_t^phi of a series, evaluated at entry n with that entry's geometry.
  VolumeField material(const Series& s, std::size_t n) const {
    return material_derivative(gm(n), dt(s, n, 1), s[n], state(n).v);
  }

 private:
  const History& h_;
  std::vector<GraphMap> gms_;
  std::size_t N_ = 0;
};

void require_positive_order(MultiIndex a) {
  a.validate();
  if (a.order() == 0) throw PreconditionError("alinhac remainders need |alpha| >= 1");
}

VolumeField good_unknown_at(const Calculus& c, const Series& f, const Series& phi, MultiIndex a, std::size_t n) {
  VolumeField out = c.D_at(f, a, n);
  out -= c.D_at(phi, a, n) * dphi(c.gm(n), f[n], 3);
  return out;
}

Series phi_series(const Calculus& c) {
  return c.make([&](std::size_t n) { return c.gm(n).phi; });
}

VolumeField ctau(const Calculus& c, const Series& f, MultiIndex a, int tau) {
  const std::size_t N = c.newest();
  const Series f3 = c.make([&](std::size_t n) { return d_vert(c.grid(), f[n]); });
  const Series ginv = c.make([&](std::size_t n) { return c.gm(n).a33; });
  const Series dtau = c.make([&](std::size_t n) { return tau == 1 ? c.gm(n).d1phi : c.gm(n).d2phi; });

  VolumeField out = -c.triple(Calculus::product(dtau, ginv), f3, a);
  out -= f3[N] * c.triple(dtau, ginv, a);
  out += f3[N] * dtau[N] * c.chain(a);
  out += c.D(phi_series(c), a) * dphi(c.gm(N), dphi(c.gm(N), f[N], 3), tau);
  return out;
}

VolumeField c3(const Calculus& c, const Series& f, MultiIndex a) {
  const std::size_t N = c.newest();
  const Series f3 = c.make([&](std::size_t n) { return d_vert(c.grid(), f[n]); });
  const Series ginv = c.make([&](std::size_t n) { return c.gm(n).a33; });

  VolumeField out = c.triple(ginv, f3, a);
  out -= f3[N] * c.chain(a);
  out += c.D(phi_series(c), a) * dphi(c.gm(N), dphi(c.gm(N), f[N], 3), 3);
  return out;
}

VolumeField dremainder(const Calculus& c, const Series& f, MultiIndex a) {
  const std::size_t N = c.newest();
  const GraphMap& gmN = c.gm(N);
  const VectorField& vN = c.state(N).v;
  const Series f3 = c.make([&](std::size_t n) { return d_vert(c.grid(), f[n]); });
  const Series ginv = c.make([&](std::size_t n) { return c.gm(n).a33; });
  const Series U = c.make([&](std::size_t n) { return transport_speed(c.gm(n), c.state(n).v); });

  VolumeField out = c.grid().volume();
  for (int tau = 0; tau < 2; ++tau) {
    const Series vt = c.make([&](std::size_t n) { return c.state(n).v[tau]; });
    const Series df = c.make([&](std::size_t n) { return d_tan(c.grid(), f[n], tau + 1); });
    out += c.commutator(vt, df, a);
  }
  out += c.triple(Calculus::product(U, ginv), f3, a);
  out += c.triple(ginv, U, a) * f3[N];
  out -= U[N] * f3[N] * c.chain(a);

  // [D^a, v] N = D^a(v . N) - v . D^a N with N = (-d1 phi, -d2 phi, 1).
  const Series vN_dot = c.make([&](std::size_t n) { return dot(c.state(n).v, c.gm(n).extended_normal()); });
  const Series d1 = c.make([&](std::size_t n) { return c.gm(n).d1phi; });
  const Series d2 = c.make([&](std::size_t n) { return c.gm(n).d2phi; });
  VolumeField comm = c.D(vN_dot, a);
  comm += vN[0] * c.D(d1, a);
  comm += vN[1] * c.D(d2, a);
  out += ginv[N] * f3[N] * comm;

  const Series f3phi = c.make([&](std::size_t n) { return dphi(c.gm(n), f[n], 3); });
  out += c.D(phi_series(c), a) * material_derivative(gmN, c.dt(f3phi, N, 1), f3phi[N], vN);
  return out;
}

}  // namespace

void MultiIndex::validate() const {
  if (t < 0 || x1 < 0 || x2 < 0) throw PreconditionError("multi-index entries must be non-negative");
  if (order() > 4) throw PreconditionError("multi-index order must be at most 4");
}

std::string MultiIndex::str() const {
  std::ostringstream os;
  os << "(" << t << ";" << x1 << "," << x2 << ")";
  return os.str();
}

std::string to_string(AlinhacIdentity which) {
  switch (which) {
    case AlinhacIdentity::kTau1:
      return "tau1";
    case AlinhacIdentity::kTau2:
      return "tau2";
    case AlinhacIdentity::kVertical:
      return "vertical";
    case AlinhacIdentity::kMaterial:
      return "material";
  }
  return "unknown";
}

VolumeField field_of(const State& s, const GraphMap& gm, std::string_view field) {
  if (field == "q") return s.q;
  if (field == "phi") return gm.phi;
  if (field.size() == 2 && field[0] == 'v' && field[1] >= '1' && field[1] <= '3') return s.v[field[1] - '1'];
  if (field.size() == 3 && field[0] == 'F' && field[1] >= '1' && field[1] <= '3' && field[2] >= '1' &&
      field[2] <= '3')
    return s.F[field[2] - '1'][field[1] - '1'];
  throw PreconditionError("unknown field name '" + std::string(field) + "'");
}

VolumeField tangential_derivative(const History& h, std::string_view field, MultiIndex a) {
  a.validate();
  if (h.empty()) throw HistoryError("tangential_derivative: history is empty");
  const GraphMap gm = h.graphmap(h.size() - 1);
  const Calculus c(h, gm);
  return c.D(c.field(field), a);
}

VolumeField good_unknown(const History& h, std::string_view field, MultiIndex a, const GraphMap& gm) {
  a.validate();
  const Calculus c(h, gm);
  return good_unknown_at(c, c.field(field), phi_series(c), a, c.newest());
}

VolumeField remainder_Ctau(const History& h, std::string_view field, MultiIndex a, int tau, const GraphMap& gm) {
  require_positive_order(a);
  if (tau != 1 && tau != 2) throw PreconditionError("remainder_Ctau: tau must be 1 or 2");
  const Calculus c(h, gm);
  return ctau(c, c.field(field), a, tau);
}

VolumeField remainder_C3(const History& h, std::string_view field, MultiIndex a, const GraphMap& gm) {
  require_positive_order(a);
  const Calculus c(h, gm);
  return c3(c, c.field(field), a);
}

VolumeField remainder_D(const History& h, std::string_view field, MultiIndex a, const GraphMap& gm) {
  require_positive_order(a);
  const Calculus c(h, gm);
  return dremainder(c, c.field(field), a);
}

double alinhac_residual(const History& h, std::string_view field, MultiIndex a, AlinhacIdentity which,
                        const GraphMap& gm) {
  require_positive_order(a);
  const Calculus c(h, gm);
  const std::size_t N = c.newest();
  const Series f = c.field(field);
  const Series phi = phi_series(c);
  const GraphMap& gmN = c.gm(N);

  VolumeField lhs, rhs;
  switch (which) {
    case AlinhacIdentity::kTau1:
    case AlinhacIdentity::kTau2: {
      const int tau = which == AlinhacIdentity::kTau1 ? 1 : 2;
      lhs = c.D(c.make([&](std::size_t n) { return dphi(c.gm(n), f[n], tau); }), a);
      rhs = dphi(gmN, good_unknown_at(c, f, phi, a, N), tau) + ctau(c, f, a, tau);
      break;
    }
    case AlinhacIdentity::kVertical:
      lhs = c.D(c.make([&](std::size_t n) { return dphi(c.gm(n), f[n], 3); }), a);
      rhs = dphi(gmN, good_unknown_at(c, f, phi, a, N), 3) + c3(c, f, a);
      break;
    case AlinhacIdentity::kMaterial: {
      lhs = c.D(c.make([&](std::size_t n) { return c.material(f, n); }), a);
      const Series G = c.make([&](std::size_t n) { return good_unknown_at(c, f, phi, a, n); });
      rhs = c.material(G, N) + dremainder(c, f, a);
      break;
    }
  }
  return l2_norm(gmN.grid, lhs - rhs);
}

CurlCommutatorResiduals curl_commutator_residuals(const History& h, const GraphMap& gm) {
  if (h.size() < 2) throw HistoryError("curl commutators need at least two stored states for D_t");
  const Calculus c(h, gm);
  const std::size_t N = c.newest();
  const GraphMap& gmN = c.gm(N);
  const State& s = c.state(N);
  const Grid& g = gmN.grid;

  CurlCommutatorResiduals out;

  VectorField dtv = g.vector();
  for (int i = 0; i < 3; ++i) {
    const Series vi = c.make([&](std::size_t n) { return c.state(n).v[i]; });
    dtv[i] = c.material(vi, N);
  }
  VectorField res1 = curl_phi(gmN, dtv);
  const Series curls[3] = {
      c.make([&](std::size_t n) { return curl_phi(c.gm(n), c.state(n).v)[0]; }),
      c.make([&](std::size_t n) { return curl_phi(c.gm(n), c.state(n).v)[1]; }),
      c.make([&](std::size_t n) { return curl_phi(c.gm(n), c.state(n).v)[2]; }),
  };
  std::array<VectorField, 3> gv;  // gv[k][a] = d_a^phi v_k
  for (int k = 0; k < 3; ++k) gv[k] = grad_phi(gmN, s.v[k]);
  for (int i = 0; i < 3; ++i) {
    res1[i] -= c.material(curls[i], N);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const int e = levi_civita(i, a, b);
        if (e == 0) continue;
        for (int k = 0; k < 3; ++k) axpy(res1[i], -e, gv[k][a] * gv[b][k]);
      }
  }
  out.r1 = l2_norm(g, res1);

  VectorField force = g.vector();
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i) force[i] += directional_phi(gmN, s.F[k], s.F[k][i]);
  VectorField res2 = curl_phi(gmN, force);
  for (int k = 0; k < 3; ++k) {
    const VectorField cf = curl_phi(gmN, s.F[k]);
    for (int i = 0; i < 3; ++i) res2[i] -= directional_phi(gmN, s.F[k], cf[i]);
    std::array<VectorField, 3> gf;  // gf[l][a] = d_a^phi F_lk
    for (int l = 0; l < 3; ++l) gf[l] = grad_phi(gmN, s.F[k][l]);
    for (int i = 0; i < 3; ++i)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
          const int e = levi_civita(i, a, b);
          if (e == 0) continue;
          for (int l = 0; l < 3; ++l) axpy(res2[i], -e, gf[l][a] * gf[b][l]);
        }
  }
  out.r2 = l2_norm(g, res2);
  return out;
}

}  // namespace capelast
