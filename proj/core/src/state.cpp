#include "capelast/state.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "capelast/elliptic.hpp"
#include "capelast/error.hpp"

namespace capelast {

namespace {

double trig(Trig t, double theta) { return t == Trig::kCos ? std::cos(theta) : std::sin(theta); }
// d/dtheta of trig(t, theta)
double dtrig(Trig t, double theta) { return t == Trig::kCos ? -std::sin(theta) : std::cos(theta); }

double depth_profile(DepthProfile p, double z, double b) {
  switch (p) {
    case DepthProfile::kOne:
      return 1.0;
    case DepthProfile::kLinear:
      return z + b;
    case DepthProfile::kExp:
      return std::exp(z);
    case DepthProfile::kCos:
      return std::cos(z);
  }
  return 1.0;
}

}  // namespace

SurfaceField sample_surface_recipe(const Grid& g, const SurfaceRecipe& r) {
  SurfaceField psi = g.surface();
  auto add_mode = [&](double amp, Trig t, int k1, int k2) {
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) psi(i, j) += amp * trig(t, k1 * g.x1()[i] + k2 * g.x2()[j]);
  };
  for (const auto& m : r.modes) add_mode(m.amp, m.trig, m.k1, m.k2);
  if (r.random) {
    const RandomModes& rm = *r.random;
    if (rm.kmax < 1) throw PreconditionError("random surface modes need kmax >= 1");
    std::mt19937_64 rng(rm.seed);
    std::uniform_real_distribution<double> dist(-rm.amp, rm.amp);
    for (int k1 = 0; k1 <= rm.kmax; ++k1)
      for (int k2 = -rm.kmax; k2 <= rm.kmax; ++k2) {
        if (k1 == 0 && k2 <= 0) continue;
        const double ac = dist(rng);
        const double as = dist(rng);
        add_mode(ac, Trig::kCos, k1, k2);
        add_mode(as, Trig::kSin, k1, k2);
      }
  }
  return psi;
}

VectorField sample_field_recipe(const GraphMap& gm, const FieldRecipe& r) {
  const Grid& g = gm.grid;
  const double b = g.depth();
  VectorField u = g.vector();
  for (const FieldTerm& term : r) {
    if (term.kind == FieldTerm::Kind::kComponent && (term.component < 1 || term.component > 3))
      throw PreconditionError("field recipe: component must be 1, 2 or 3");
    if (term.kind == FieldTerm::Kind::kTangent && term.dir != 1 && term.dir != 2)
      throw PreconditionError("field recipe: tangent direction must be 1 or 2");
    if (term.kind == FieldTerm::Kind::kTangent && (term.dir == 1 ? term.k1 : term.k2) != 0)
      throw PreconditionError("field recipe: tangent shape may only vary across its direction");
    const double kappa = std::hypot(term.k1, term.k2);
    for (int k = 0; k < g.nz(); ++k)
      for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
          const double z = gm.phi(i, j, k);
          const double theta = term.k1 * g.x1()[i] + term.k2 * g.x2()[j];
          switch (term.kind) {
            case FieldTerm::Kind::kPotential: {
              if (kappa == 0.0) break;
              const double c = std::cosh(kappa * (z + b)) / std::cosh(kappa * b);
              const double s = std::sinh(kappa * (z + b)) / std::cosh(kappa * b);
              u[0](i, j, k) += term.amp * term.k1 * dtrig(term.trig, theta) * c;
              u[1](i, j, k) += term.amp * term.k2 * dtrig(term.trig, theta) * c;
              u[2](i, j, k) += term.amp * kappa * trig(term.trig, theta) * s;
              break;
            }
            case FieldTerm::Kind::kComponent:
              u[term.component - 1](i, j, k) +=
                  term.amp * trig(term.trig, theta) * depth_profile(term.profile, z, b);
              break;
            case FieldTerm::Kind::kTangent: {
              const double h = gm.psi(i, j) + b;
              if (!(h > 0.0)) throw PreconditionError("tangent recipe: surface touches the bottom");
              const double slope = term.dir == 1 ? gm.d1psi(i, j) : gm.d2psi(i, j);
              const double m = term.amp * trig(term.trig, theta);
              u[term.dir - 1](i, j, k) += m / h;
              u[2](i, j, k) += m * (z + b) * slope / (h * h);
              break;
            }
          }
        }
  }
  return u;
}

Cutoff make_spec_cutoff(const InitSpec& spec, const Grid& g, const SurfaceField& psi0) {
  return make_cutoff(g, spec.cutoff, spec.delta0, psi0.max_abs());
}

SurfaceField kinematic_rate(const Grid& g, const SurfaceField& psi, const VectorField& v) {
  SurfaceField rate = top(v[2]);
  rate -= top(v[0]) * d_tan(g, psi, 1);
  rate -= top(v[1]) * d_tan(g, psi, 2);
  return rate;
}

State build_initial_data(const InitSpec& spec, const Grid& g, const Cutoff& cutoff, const SolverOptions& opts) {
  if (spec.sigma < 0.0) throw PreconditionError("initial data: sigma must be non-negative");
  const PoissonSolver solver(g, opts);
  State s;
  s.t = 0.0;
  s.sigma = spec.sigma;
  s.psi = sample_surface_recipe(g, spec.psi);
  const GraphMap gm0 = build_graphmap(s.psi, g.surface(), cutoff, g);

  VectorField v = sample_field_recipe(gm0, spec.v);
  set_bottom(v[2], g.surface());
  s.v = project_divfree(v, gm0, solver);
  set_bottom(s.v[2], g.surface());

  for (int j = 0; j < 3; ++j) {
    VectorField f = sample_field_recipe(gm0, spec.F[j]);
    set_bottom(f[2], g.surface());
    s.F[j] = project_divfree(f, gm0, solver);
    set_bottom(s.F[j][2], g.surface());
    const auto n = gm0.surface_normal();
    const SurfaceField fn = top(s.F[j][0]) * n[0] + top(s.F[j][1]) * n[1] + top(s.F[j][2]);
    const double scale = 1.0 + l2_norm(g, s.F[j]);
    if (fn.max_abs() > 1e-8 * scale) {
      std::ostringstream os;
      os << "initial data: column F" << j + 1 << " is not tangent to the surface (|F.N| = " << fn.max_abs() << ")";
      throw PreconditionError(os.str());
    }
  }

  const GraphMap gm = build_graphmap(s.psi, kinematic_rate(g, s.psi, s.v), cutoff, g);
  s.q = g.volume();
  s.q = solve_pressure(s, gm, solver).solution;
  return s;
}

State build_initial_data(const InitSpec& spec, const Grid& g, const Cutoff& cutoff) {
  return build_initial_data(spec, g, cutoff, SolverOptions{});
}

ConstraintResiduals constraint_residuals(const State& s, const GraphMap& gm) {
  const Grid& g = gm.grid;
  ConstraintResiduals r;
  r.div_v = l2_norm(g, div_phi(gm, s.v));
  r.v3_bot = bottom(s.v[2]).max_abs();
  const auto n = gm.surface_normal();
  for (const auto& col : s.F) {
    r.div_F = std::max(r.div_F, l2_norm(g, div_phi(gm, col)));
    const SurfaceField fn = top(col[0]) * n[0] + top(col[1]) * n[1] + top(col[2]);
    r.FN_top = std::max(r.FN_top, fn.max_abs());
    r.F3_bot = std::max(r.F3_bot, bottom(col[2]).max_abs());
  }
  return r;
}

History::History(Grid g, Cutoff cutoff, std::size_t capacity)
    : grid_(std::move(g)), cutoff_(std::move(cutoff)), capacity_(capacity) {
  if (capacity_ < 2) throw PreconditionError("History capacity must be at least 2");
}

void History::push(State s, SurfaceField psi_t) {
  if (!entries_.empty()) {
    const double step = s.t - entries_.back().state.t;
    if (!(step > 0.0)) throw HistoryError("History: times must be strictly increasing");
    if (entries_.size() >= 2 && std::abs(step - dt_) > 1e-9 * dt_) {
      std::ostringstream os;
      os << "History: non-uniform spacing (" << step << " after " << dt_ << ")";
      throw HistoryError(os.str());
    }
    if (entries_.size() == 1) dt_ = step;
  }
  entries_.push_back({std::move(s), std::move(psi_t)});
  if (entries_.size() > capacity_) entries_.pop_front();
}

const HistoryEntry& History::newest() const {
  if (entries_.empty()) throw HistoryError("History is empty");
  return entries_.back();
}

std::vector<double> History::times() const {
  std::vector<double> t;
  t.reserve(entries_.size());
  for (const auto& e : entries_) t.push_back(e.state.t);
  return t;
}

GraphMap History::graphmap(std::size_t i) const {
  const HistoryEntry& e = entries_.at(i);
  return build_graphmap(e.state.psi, e.psi_t, cutoff_, grid_);
}

std::vector<double> fd_weights(std::span<const double> nodes, double x0, int m) {
  // Fornberg's recursion.
  const int n = static_cast<int>(nodes.size()) - 1;
  if (m < 0 || n < m) throw PreconditionError("fd_weights: need at least m + 1 nodes");
  std::vector<std::vector<double>> c(n + 1, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n + 1);
  for (int i = 0; i <= n; ++i) w[i] = c[i][m];
  return w;
}

std::vector<double> time_weights(const History& h, std::size_t at, int m) {
  if (h.size() < static_cast<std::size_t>(m) + 1) {
    std::ostringstream os;
    os << "time derivative of order " << m << " needs " << m + 1 << " stored states, history holds " << h.size();
    throw HistoryError(os.str());
  }
  if (at >= h.size()) throw PreconditionError("time_weights: entry index out of range");
  const auto t = h.times();
  return fd_weights(t, t[at], m);
}

}  // namespace capelast
