#pragma once

// Closed-form flows for identity checks and solver tests. Fields are given in physical
// coordinates (t, x1, x2, z) and sampled at z = phi.

#include <array>
#include <functional>
#include <vector>

#include "capelast/graphmap.hpp"
#include "capelast/state.hpp"

namespace capelast {

using SurfaceFn = std::function<double(double t, double x1, double x2)>;
using ScalarFn = std::function<double(double t, double x1, double x2, double z)>;
using VectorFn = std::function<std::array<double, 3>(double t, double x1, double x2, double z)>;

struct AnalyticFlow {
  double b = 1.0;
  double sigma = 0.0;
  SurfaceFn psi;
  SurfaceFn psi_t;
  VectorFn v;
  std::array<VectorFn, 3> F;  ///< columns
  ScalarFn q;
};

/// Surface translating at velocity (c1, c2) with a velocity field built from two stream
/// functions s_a = c_a z + A_a h_a(x) (z - psi)(z + b): v_a = d_z s_a, v_3 = -d_1 s_1 - d_2 s_2.
/// v is divergence free, v . N = d_t psi on the surface and v_3 = 0 on the bottom. Each F column
/// comes from the same construction with c = 0, so it is divergence free and tangent to the surface.
struct TravelingWave {
  double b = 1.0;
  double sigma = 0.0;
  std::vector<SurfaceMode> psi = {{0.1, Trig::kCos, 1, 0}, {0.05, Trig::kSin, 0, 1}};
  double c1 = 0.7;
  double c2 = -0.4;
  std::array<double, 2> v_amp = {0.3, 0.2};
  std::array<SurfaceMode, 2> v_shape = {SurfaceMode{1.0, Trig::kCos, 1, 1}, SurfaceMode{1.0, Trig::kSin, 1, -1}};
  /// Amplitude, shape and stream direction (1 or 2) per column.
  std::array<double, 3> F_amp = {0.25, 0.15, 0.1};
  std::array<SurfaceMode, 3> F_shape = {SurfaceMode{1.0, Trig::kCos, 1, -1}, SurfaceMode{1.0, Trig::kSin, 1, 1},
                                        SurfaceMode{1.0, Trig::kCos, 0, 2}};
  std::array<int, 3> F_dir = {1, 2, 1};
  double q_amp = 0.2;
};

AnalyticFlow traveling_wave(const TravelingWave& p);

/// The same flow frozen at t = 0 with c1 = c2 = 0: time independent, v . N = 0.
AnalyticFlow steady_wave(TravelingWave p);

/// State and d_t psi at time t.
HistoryEntry sample_state(const AnalyticFlow& flow, double t, const Cutoff& cutoff, const Grid& g);

/// `count` states at t0, t0 + dt, ... in a history of matching capacity.
History sample_history(const AnalyticFlow& flow, double t0, double dt, std::size_t count, const Cutoff& cutoff,
                       const Grid& g);

/// Polynomial cutoff sized for sup |psi| over the given times.
Cutoff flow_cutoff(const AnalyticFlow& flow, const Grid& g, double t0 = 0.0, double t1 = 0.0);

}  // namespace capelast
