#pragma once

// Discrete slab T^2 x (-b, 0): Fourier nodes on both periodic axes, Chebyshev-Gauss-Lobatto
// nodes in depth, field containers, spectral derivatives and quadrature.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <type_traits>
#include <vector>

namespace capelast {

/// Flat sample storage shared by surface and volume fields. Element-wise arithmetic is
/// defined for operands of identical type and size.
class Samples {
 public:
  Samples() = default;
  explicit Samples(std::size_t n, double value = 0.0) : data_(n, value) {}

  std::size_t size() const noexcept { return data_.size(); }
  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  double& operator[](std::size_t n) { return data_[n]; }
  double operator[](std::size_t n) const { return data_[n]; }

  double max_abs() const;
  double min() const;
  double max() const;
  bool all_finite() const;

 protected:
  std::vector<double> data_;
};

/// nx x ny real samples on the torus, x1 fastest.
class SurfaceField : public Samples {
 public:
  SurfaceField() = default;
  SurfaceField(int nx, int ny, double value = 0.0)
      : Samples(static_cast<std::size_t>(nx) * ny, value), nx_(nx), ny_(ny) {}

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double& operator()(int i, int j) { return data_[i + static_cast<std::size_t>(nx_) * j]; }
  double operator()(int i, int j) const { return data_[i + static_cast<std::size_t>(nx_) * j]; }
  bool same_shape(const SurfaceField& o) const { return nx_ == o.nx_ && ny_ == o.ny_; }

 private:
  int nx_ = 0;
  int ny_ = 0;
};

/// nx x ny x nz real samples on the slab, x1 fastest then x2 then depth index
/// (k = 0 is the top surface, k = nz-1 the bottom).
class VolumeField : public Samples {
 public:
  VolumeField() = default;
  VolumeField(int nx, int ny, int nz, double value = 0.0)
      : Samples(static_cast<std::size_t>(nx) * ny * nz, value), nx_(nx), ny_(ny), nz_(nz) {}

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  int nz() const noexcept { return nz_; }
  std::size_t plane_size() const noexcept { return static_cast<std::size_t>(nx_) * ny_; }
  double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }
  std::span<double> plane(int k) { return {data_.data() + k * plane_size(), plane_size()}; }
  std::span<const double> plane(int k) const { return {data_.data() + k * plane_size(), plane_size()}; }
  bool same_shape(const VolumeField& o) const { return nx_ == o.nx_ && ny_ == o.ny_ && nz_ == o.nz_; }

 private:
  std::size_t index(int i, int j, int k) const {
    return i + static_cast<std::size_t>(nx_) * (j + static_cast<std::size_t>(ny_) * k);
  }
  int nx_ = 0;
  int ny_ = 0;
  int nz_ = 0;
};

/// Three volume components, 0-based (component c holds the paper's index c+1).
using VectorField = std::array<VolumeField, 3>;

template <class F>
concept FieldType = std::is_same_v<F, SurfaceField> || std::is_same_v<F, VolumeField>;

void check_same_shape(const SurfaceField& a, const SurfaceField& b);
void check_same_shape(const VolumeField& a, const VolumeField& b);

template <FieldType F, class Op>
F zip(const F& a, const F& b, Op op) {
  check_same_shape(a, b);
  F out = a;
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = op(a[n], b[n]);
  return out;
}

template <FieldType F, class Op>
F map(const F& a, Op op) {
  F out = a;
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = op(a[n]);
  return out;
}

template <FieldType F> F operator+(const F& a, const F& b) { return zip(a, b, std::plus<>{}); }
template <FieldType F> F operator-(const F& a, const F& b) { return zip(a, b, std::minus<>{}); }
template <FieldType F> F operator*(const F& a, const F& b) { return zip(a, b, std::multiplies<>{}); }
template <FieldType F> F operator/(const F& a, const F& b) { return zip(a, b, std::divides<>{}); }
template <FieldType F> F operator*(double s, const F& a) { return map(a, [s](double x) { return s * x; }); }
template <FieldType F> F operator*(const F& a, double s) { return s * a; }
template <FieldType F> F operator+(const F& a, double s) { return map(a, [s](double x) { return x + s; }); }
template <FieldType F> F operator-(const F& a) { return map(a, [](double x) { return -x; }); }

template <FieldType F> F& operator+=(F& a, const F& b) {
  check_same_shape(a, b);
  for (std::size_t n = 0; n < a.size(); ++n) a[n] += b[n];
  return a;
}
template <FieldType F> F& operator-=(F& a, const F& b) {
  check_same_shape(a, b);
  for (std::size_t n = 0; n < a.size(); ++n) a[n] -= b[n];
  return a;
}
template <FieldType F> F& operator*=(F& a, double s) {
  for (std::size_t n = 0; n < a.size(); ++n) a[n] *= s;
  return a;
}

/// a += s * b
template <FieldType F> void axpy(F& a, double s, const F& b) {
  check_same_shape(a, b);
  for (std::size_t n = 0; n < a.size(); ++n) a[n] += s * b[n];
}

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double s, const VectorField& a);
VectorField operator*(const VectorField& a, double s);
VectorField& operator+=(VectorField& a, const VectorField& b);
VolumeField dot(const VectorField& a, const VectorField& b);

class FourierTransforms;

/// Collocation grid for T^2 x (-b, 0). Immutable; copies share node tables and FFT plans.
class Grid {
 public:
  /// Throws PreconditionError unless nx, ny are even and >= 4, nz >= 5 and b > 0.
  static Grid make(int nx, int ny, int nz, double b);

  int nx() const noexcept;
  int ny() const noexcept;
  int nz() const noexcept;
  double depth() const noexcept;
  std::size_t plane_size() const noexcept;
  std::size_t size() const noexcept;

  std::span<const double> x1() const noexcept;
  std::span<const double> x2() const noexcept;
  /// Depth nodes, strictly decreasing from 0 to -b.
  std::span<const double> x3() const noexcept;
  /// Clenshaw-Curtis weights for the depth nodes on [-b, 0].
  std::span<const double> vertical_weights() const noexcept;
  /// (2 pi / nx)(2 pi / ny)
  double tangential_weight() const noexcept;
  /// Row-major nz x nz Chebyshev differentiation matrix for d/dx3 on [-b, 0].
  std::span<const double> cheb_diff() const noexcept;
  /// Integer wavenumbers per axis (axis 1: size nx/2+1 real-to-complex half, axis 2: size ny),
  /// Nyquist entries included as their signed value.
  std::span<const double> wavenumbers(int axis) const noexcept;
  /// Smallest spacing between neighbouring depth nodes.
  double min_vertical_spacing() const noexcept;

  const FourierTransforms& fft() const noexcept;

  VolumeField volume(double value = 0.0) const { return {nx(), ny(), nz(), value}; }
  SurfaceField surface(double value = 0.0) const { return {nx(), ny(), value}; }
  VectorField vector() const { return {volume(), volume(), volume()}; }

  bool same_as(const Grid& o) const noexcept { return impl_ == o.impl_; }
  bool compatible(const VolumeField& f) const noexcept;
  bool compatible(const SurfaceField& f) const noexcept;

 private:
  struct Impl;
  explicit Grid(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Batched real-to-complex transforms over x1-x2 planes.
class FourierTransforms {
 public:
  FourierTransforms(int nx, int ny, int nz);
  ~FourierTransforms();
  FourierTransforms(const FourierTransforms&) = delete;
  FourierTransforms& operator=(const FourierTransforms&) = delete;

  int complex_plane_size() const noexcept { return (nx_ / 2 + 1) * ny_; }
  /// Unnormalized forward transform of `planes` consecutive planes. Output holds
  /// interleaved (re, im) pairs, complex_plane_size() per plane.
  void forward(const double* in, double* out_complex, int planes) const;
  /// Inverse transform including the 1/(nx ny) normalization. `in_complex` is clobbered.
  void inverse(double* in_complex, double* out, int planes) const;

 private:
  int nx_, ny_, nz_;
  void* r2c_vol_ = nullptr;
  void* c2r_vol_ = nullptr;
  void* r2c_plane_ = nullptr;
  void* c2r_plane_ = nullptr;
};

// Sampling helpers ------------------------------------------------------------------------

VolumeField sample(const Grid& g, const std::function<double(double, double, double)>& fn);
SurfaceField sample_surface(const Grid& g, const std::function<double(double, double)>& fn);

SurfaceField top(const VolumeField& f);
SurfaceField bottom(const VolumeField& f);
void set_top(VolumeField& f, const SurfaceField& s);
void set_bottom(VolumeField& f, const SurfaceField& s);
/// Constant-in-depth extension of a surface field.
VolumeField extrude(const SurfaceField& s, int nz);

// Differentiation -------------------------------------------------------------------------

/// Fourier-spectral partial derivative along x1 (axis = 1) or x2 (axis = 2).
VolumeField d_tan(const Grid& g, const VolumeField& f, int axis);
SurfaceField d_tan(const Grid& g, const SurfaceField& f, int axis);
/// Mixed tangential derivative d1^m1 d2^m2 computed in a single transform. Nyquist modes are
/// dropped for any nonzero order, so this equals repeated single derivatives.
VolumeField d_tan(const Grid& g, const VolumeField& f, int m1, int m2);
SurfaceField d_tan(const Grid& g, const SurfaceField& f, int m1, int m2);
/// Chebyshev collocation derivative along x3.
VolumeField d_vert(const Grid& g, const VolumeField& f);

/// Orszag 2/3-rule truncation of tangential modes.
VolumeField dealias(const Grid& g, const VolumeField& f);
SurfaceField dealias(const Grid& g, const SurfaceField& f);
/// Exponential spectral filter exp(-alpha (k/kmax)^order) on tangential modes.
VolumeField spectral_filter(const Grid& g, const VolumeField& f, double alpha = 36.0, int order = 36);
SurfaceField spectral_filter(const Grid& g, const SurfaceField& f, double alpha = 36.0, int order = 36);

// Quadrature and norms ----------------------------------------------------------------------

double quad_volume(const Grid& g, const VolumeField& f);
double quad_surface(const Grid& g, const SurfaceField& f);

/// L2 norms, the s = 0 case of sobolev_norm.
double l2_norm(const Grid& g, const VolumeField& f);
double l2_norm(const Grid& g, const SurfaceField& f);
double l2_norm(const Grid& g, const VectorField& f);

/// sqrt(sum over multi-indices |m| <= s of ||D^m f||_0^2). Volume norms use all three
/// directions; surface norms the two tangential ones. s in 0..4.
double sobolev_norm(const Grid& g, const VolumeField& f, int s);
double sobolev_norm(const Grid& g, const SurfaceField& f, int s);
double sobolev_norm(const Grid& g, const VectorField& f, int s);

}  // namespace capelast
