#include "capelast/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <mutex>
#include <numbers>
#include <sstream>

#include "capelast/error.hpp"

namespace capelast {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<double> chebyshev_nodes(int n_intervals) {
  std::vector<double> xi(n_intervals + 1);
  for (int k = 0; k <= n_intervals; ++k) xi[k] = std::sin(kPi * (n_intervals - 2.0 * k) / (2.0 * n_intervals));
  return xi;
}

// Differentiation matrix on [-1, 1] for nodes cos(k pi / N), k = 0..N.
std::vector<double> chebyshev_matrix(int n_intervals) {
  const int n = n_intervals + 1;
  std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
  auto c = [&](int k) { return ((k == 0 || k == n_intervals) ? 2.0 : 1.0) * ((k % 2) ? -1.0 : 1.0); };
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      // x_i - x_j = 2 sin((i+j) pi / 2N) sin((j-i) pi / 2N)
      const double diff = 2.0 * std::sin((i + j) * kPi / (2.0 * n_intervals)) *
                          std::sin((j - i) * kPi / (2.0 * n_intervals));
      const double value = c(i) / (c(j) * diff);
      d[i * n + j] = value;
      row_sum += value;
    }
    d[i * n + i] = -row_sum;
  }
  return d;
}

// Clenshaw-Curtis weights on [-1, 1].
std::vector<double> clenshaw_curtis(int n_intervals) {
  const int n = n_intervals;
  std::vector<double> w(n + 1, 0.0);
  std::vector<double> theta(n + 1);
  for (int k = 0; k <= n; ++k) theta[k] = kPi * k / n;
  std::vector<double> v(n > 1 ? n - 1 : 0, 1.0);
  if (n % 2 == 0) {
    w[0] = w[n] = 1.0 / (n * n - 1.0);
    for (int k = 1; k < n / 2; ++k)
      for (int i = 1; i < n; ++i) v[i - 1] -= 2.0 * std::cos(2.0 * k * theta[i]) / (4.0 * k * k - 1.0);
    for (int i = 1; i < n; ++i) v[i - 1] -= std::cos(n * theta[i]) / (n * n - 1.0);
  } else {
    w[0] = w[n] = 1.0 / (static_cast<double>(n) * n);
    for (int k = 1; k <= (n - 1) / 2; ++k)
      for (int i = 1; i < n; ++i) v[i - 1] -= 2.0 * std::cos(2.0 * k * theta[i]) / (4.0 * k * k - 1.0);
  }
  for (int i = 1; i < n; ++i) w[i] = 2.0 * v[i - 1] / n;
  return w;
}

}  // namespace

// Samples ---------------------------------------------------------------------------------

double Samples::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

double Samples::min() const { return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end()); }
double Samples::max() const { return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end()); }

bool Samples::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

void check_same_shape(const SurfaceField& a, const SurfaceField& b) {
  if (!a.same_shape(b)) throw PreconditionError("surface field shape mismatch");
}

void check_same_shape(const VolumeField& a, const VolumeField& b) {
  if (!a.same_shape(b)) throw PreconditionError("volume field shape mismatch");
}

VectorField operator+(const VectorField& a, const VectorField& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
VectorField operator-(const VectorField& a, const VectorField& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
VectorField operator*(double s, const VectorField& a) { return {s * a[0], s * a[1], s * a[2]}; }
VectorField operator*(const VectorField& a, double s) { return s * a; }
VectorField& operator+=(VectorField& a, const VectorField& b) {
  for (int c = 0; c < 3; ++c) a[c] += b[c];
  return a;
}

VolumeField dot(const VectorField& a, const VectorField& b) {
  VolumeField out = a[0] * b[0];
  for (std::size_t n = 0; n < out.size(); ++n) out[n] += a[1][n] * b[1][n] + a[2][n] * b[2][n];
  return out;
}

// FourierTransforms -----------------------------------------------------------------------

FourierTransforms::FourierTransforms(int nx, int ny, int nz) : nx_(nx), ny_(ny), nz_(nz) {
  std::lock_guard lock(planner_mutex());
  const int dims[2] = {ny, nx};
  const int real_dist = nx * ny;
  const int complex_dist = complex_plane_size();
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  double* real_buf = fftw_alloc_real(static_cast<std::size_t>(real_dist) * nz);
  fftw_complex* cplx_buf = fftw_alloc_complex(static_cast<std::size_t>(complex_dist) * nz);
  auto make_pair = [&](int howmany, void*& fwd, void*& inv) {
    fwd = fftw_plan_many_dft_r2c(2, dims, howmany, real_buf, nullptr, 1, real_dist, cplx_buf, nullptr, 1,
                                 complex_dist, flags);
    inv = fftw_plan_many_dft_c2r(2, dims, howmany, cplx_buf, nullptr, 1, complex_dist, real_buf, nullptr, 1,
                                 real_dist, flags);
  };
  make_pair(nz, r2c_vol_, c2r_vol_);
  make_pair(1, r2c_plane_, c2r_plane_);
  fftw_free(real_buf);
  fftw_free(cplx_buf);
}

FourierTransforms::~FourierTransforms() {
  std::lock_guard lock(planner_mutex());
  for (void* p : {r2c_vol_, c2r_vol_, r2c_plane_, c2r_plane_})
    if (p) fftw_destroy_plan(static_cast<fftw_plan>(p));
}

void FourierTransforms::forward(const double* in, double* out_complex, int planes) const {
  auto* in_mut = const_cast<double*>(in);  // r2c never writes its input
  auto* out = reinterpret_cast<fftw_complex*>(out_complex);
  if (planes == nz_) {
    fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_vol_), in_mut, out);
    return;
  }
  for (int p = 0; p < planes; ++p)
    fftw_execute_dft_r2c(static_cast<fftw_plan>(r2c_plane_), in_mut + static_cast<std::size_t>(p) * nx_ * ny_,
                         out + static_cast<std::size_t>(p) * complex_plane_size());
}

void FourierTransforms::inverse(double* in_complex, double* out, int planes) const {
  auto* in = reinterpret_cast<fftw_complex*>(in_complex);
  if (planes == nz_) {
    fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_vol_), in, out);
  } else {
    for (int p = 0; p < planes; ++p)
      fftw_execute_dft_c2r(static_cast<fftw_plan>(c2r_plane_), in + static_cast<std::size_t>(p) * complex_plane_size(),
                           out + static_cast<std::size_t>(p) * nx_ * ny_);
  }
  const double scale = 1.0 / (static_cast<double>(nx_) * ny_);
  const std::size_t n = static_cast<std::size_t>(planes) * nx_ * ny_;
  for (std::size_t i = 0; i < n; ++i) out[i] *= scale;
}

// Grid ------------------------------------------------------------------------------------

struct Grid::Impl {
  int nx, ny, nz;
  double b;
  std::vector<double> x1, x2, x3, wz, dz, k1, k2;
  std::unique_ptr<FourierTransforms> fft;
};

Grid Grid::make(int nx, int ny, int nz, double b) {
  if (nx < 4 || ny < 4 || nx % 2 || ny % 2) {
    std::ostringstream os;
    os << "tangential node counts must be even and >= 4 (got nx=" << nx << ", ny=" << ny << ")";
    throw PreconditionError(os.str());
  }
  if (nz < 5) throw PreconditionError("nz must be >= 5");
  if (!(b > 0.0) || !std::isfinite(b)) throw PreconditionError("depth b must be positive");

  auto impl = std::make_shared<Impl>();
  impl->nx = nx;
  impl->ny = ny;
  impl->nz = nz;
  impl->b = b;
  impl->x1.resize(nx);
  impl->x2.resize(ny);
  for (int i = 0; i < nx; ++i) impl->x1[i] = 2.0 * kPi * i / nx;
  for (int j = 0; j < ny; ++j) impl->x2[j] = 2.0 * kPi * j / ny;

  const int n_int = nz - 1;
  const auto xi = chebyshev_nodes(n_int);
  impl->x3.resize(nz);
  for (int k = 0; k < nz; ++k) impl->x3[k] = 0.5 * b * (xi[k] - 1.0);
  impl->x3.front() = 0.0;
  impl->x3.back() = -b;

  impl->wz = clenshaw_curtis(n_int);
  for (double& w : impl->wz) w *= 0.5 * b;
  impl->dz = chebyshev_matrix(n_int);
  for (double& d : impl->dz) d *= 2.0 / b;

  impl->k1.resize(nx / 2 + 1);
  for (int i = 0; i <= nx / 2; ++i) impl->k1[i] = i;
  impl->k2.resize(ny);
  for (int j = 0; j < ny; ++j) impl->k2[j] = (j <= ny / 2) ? j : j - ny;
  impl->k2[ny / 2] = -ny / 2;

  impl->fft = std::make_unique<FourierTransforms>(nx, ny, nz);
  return Grid(std::move(impl));
}

int Grid::nx() const noexcept { return impl_->nx; }
int Grid::ny() const noexcept { return impl_->ny; }
int Grid::nz() const noexcept { return impl_->nz; }
double Grid::depth() const noexcept { return impl_->b; }
std::size_t Grid::plane_size() const noexcept { return static_cast<std::size_t>(impl_->nx) * impl_->ny; }
std::size_t Grid::size() const noexcept { return plane_size() * impl_->nz; }
std::span<const double> Grid::x1() const noexcept { return impl_->x1; }
std::span<const double> Grid::x2() const noexcept { return impl_->x2; }
std::span<const double> Grid::x3() const noexcept { return impl_->x3; }
std::span<const double> Grid::vertical_weights() const noexcept { return impl_->wz; }
double Grid::tangential_weight() const noexcept { return 4.0 * kPi * kPi / (impl_->nx * impl_->ny); }
std::span<const double> Grid::cheb_diff() const noexcept { return impl_->dz; }
std::span<const double> Grid::wavenumbers(int axis) const noexcept { return axis == 1 ? impl_->k1 : impl_->k2; }
double Grid::min_vertical_spacing() const noexcept { return impl_->x3[0] - impl_->x3[1]; }
const FourierTransforms& Grid::fft() const noexcept { return *impl_->fft; }

bool Grid::compatible(const VolumeField& f) const noexcept {
  return f.nx() == nx() && f.ny() == ny() && f.nz() == nz();
}
bool Grid::compatible(const SurfaceField& f) const noexcept { return f.nx() == nx() && f.ny() == ny(); }

// Sampling --------------------------------------------------------------------------------

VolumeField sample(const Grid& g, const std::function<double(double, double, double)>& fn) {
  VolumeField f = g.volume();
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) f(i, j, k) = fn(g.x1()[i], g.x2()[j], g.x3()[k]);
  return f;
}

SurfaceField sample_surface(const Grid& g, const std::function<double(double, double)>& fn) {
  SurfaceField f = g.surface();
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) f(i, j) = fn(g.x1()[i], g.x2()[j]);
  return f;
}

SurfaceField top(const VolumeField& f) {
  SurfaceField s(f.nx(), f.ny());
  std::copy_n(f.plane(0).begin(), s.size(), s.data());
  return s;
}

SurfaceField bottom(const VolumeField& f) {
  SurfaceField s(f.nx(), f.ny());
  std::copy_n(f.plane(f.nz() - 1).begin(), s.size(), s.data());
  return s;
}

void set_top(VolumeField& f, const SurfaceField& s) {
  if (s.nx() != f.nx() || s.ny() != f.ny()) throw PreconditionError("set_top: shape mismatch");
  std::copy_n(s.data(), s.size(), f.plane(0).begin());
}

void set_bottom(VolumeField& f, const SurfaceField& s) {
  if (s.nx() != f.nx() || s.ny() != f.ny()) throw PreconditionError("set_bottom: shape mismatch");
  std::copy_n(s.data(), s.size(), f.plane(f.nz() - 1).begin());
}

VolumeField extrude(const SurfaceField& s, int nz) {
  VolumeField f(s.nx(), s.ny(), nz);
  for (int k = 0; k < nz; ++k) std::copy_n(s.data(), s.size(), f.plane(k).begin());
  return f;
}

// Spectral operations ---------------------------------------------------------------------

namespace {

using Multiplier = std::function<std::complex<double>(double k1, double k2, bool nyquist)>;

void apply_multiplier(const Grid& g, const double* in, double* out, int planes, const Multiplier& mult) {
  const auto& fft = g.fft();
  const int half = g.nx() / 2 + 1;
  const std::size_t cps = fft.complex_plane_size();
  std::vector<double> spec(2 * cps * planes);
  fft.forward(in, spec.data(), planes);
  const auto k1 = g.wavenumbers(1);
  const auto k2 = g.wavenumbers(2);
  std::vector<std::complex<double>> table(cps);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < half; ++i) {
      const bool nyq = (i == g.nx() / 2) || (j == g.ny() / 2);
      table[j * half + i] = mult(k1[i], k2[j], nyq);
    }
  auto* c = reinterpret_cast<std::complex<double>*>(spec.data());
  for (int p = 0; p < planes; ++p)
    for (std::size_t m = 0; m < cps; ++m) c[p * cps + m] *= table[m];
  fft.inverse(spec.data(), out, planes);
}

std::complex<double> ipow(double k, int m) {
  std::complex<double> r(1.0, 0.0);
  const std::complex<double> ik(0.0, k);
  for (int n = 0; n < m; ++n) r *= ik;
  return r;
}

Multiplier derivative_multiplier(int m1, int m2, int nx, int ny) {
  return [=](double k1, double k2, bool) -> std::complex<double> {
    if (m1 > 0 && std::abs(k1) == nx / 2) return 0.0;
    if (m2 > 0 && std::abs(k2) == ny / 2) return 0.0;
    return ipow(k1, m1) * ipow(k2, m2);
  };
}

Multiplier two_thirds_multiplier(int nx, int ny) {
  const double c1 = nx / 3.0;
  const double c2 = ny / 3.0;
  return [=](double k1, double k2, bool) -> std::complex<double> {
    return (std::abs(k1) < c1 && std::abs(k2) < c2) ? 1.0 : 0.0;
  };
}

Multiplier exp_filter_multiplier(int nx, int ny, double alpha, int order) {
  return [=](double k1, double k2, bool) -> std::complex<double> {
    const double r1 = std::abs(k1) / (nx / 2.0);
    const double r2 = std::abs(k2) / (ny / 2.0);
    return std::exp(-alpha * (std::pow(r1, order) + std::pow(r2, order)));
  };
}

void check_axis(int axis) {
  if (axis != 1 && axis != 2) throw PreconditionError("tangential axis must be 1 or 2");
}

}  // namespace

VolumeField d_tan(const Grid& g, const VolumeField& f, int axis) {
  check_axis(axis);
  return axis == 1 ? d_tan(g, f, 1, 0) : d_tan(g, f, 0, 1);
}

SurfaceField d_tan(const Grid& g, const SurfaceField& f, int axis) {
  check_axis(axis);
  return axis == 1 ? d_tan(g, f, 1, 0) : d_tan(g, f, 0, 1);
}

VolumeField d_tan(const Grid& g, const VolumeField& f, int m1, int m2) {
  if (!g.compatible(f)) throw PreconditionError("d_tan: field does not match grid");
  if (m1 == 0 && m2 == 0) return f;
  VolumeField out = g.volume();
  apply_multiplier(g, f.data(), out.data(), g.nz(), derivative_multiplier(m1, m2, g.nx(), g.ny()));
  return out;
}

SurfaceField d_tan(const Grid& g, const SurfaceField& f, int m1, int m2) {
  if (!g.compatible(f)) throw PreconditionError("d_tan: field does not match grid");
  if (m1 == 0 && m2 == 0) return f;
  SurfaceField out = g.surface();
  apply_multiplier(g, f.data(), out.data(), 1, derivative_multiplier(m1, m2, g.nx(), g.ny()));
  return out;
}

VolumeField d_vert(const Grid& g, const VolumeField& f) {
  if (!g.compatible(f)) throw PreconditionError("d_vert: field does not match grid");
  const int nz = g.nz();
  const auto d = g.cheb_diff();
  const std::size_t ps = g.plane_size();
  VolumeField out = g.volume();
  for (int k = 0; k < nz; ++k) {
    double* dst = out.plane(k).data();
    for (int l = 0; l < nz; ++l) {
      const double c = d[k * nz + l];
      const double* src = f.plane(l).data();
      for (std::size_t n = 0; n < ps; ++n) dst[n] += c * src[n];
    }
  }
  return out;
}

VolumeField dealias(const Grid& g, const VolumeField& f) {
  VolumeField out = g.volume();
  apply_multiplier(g, f.data(), out.data(), g.nz(), two_thirds_multiplier(g.nx(), g.ny()));
  return out;
}

SurfaceField dealias(const Grid& g, const SurfaceField& f) {
  SurfaceField out = g.surface();
  apply_multiplier(g, f.data(), out.data(), 1, two_thirds_multiplier(g.nx(), g.ny()));
  return out;
}

VolumeField spectral_filter(const Grid& g, const VolumeField& f, double alpha, int order) {
  VolumeField out = g.volume();
  apply_multiplier(g, f.data(), out.data(), g.nz(), exp_filter_multiplier(g.nx(), g.ny(), alpha, order));
  return out;
}

SurfaceField spectral_filter(const Grid& g, const SurfaceField& f, double alpha, int order) {
  SurfaceField out = g.surface();
  apply_multiplier(g, f.data(), out.data(), 1, exp_filter_multiplier(g.nx(), g.ny(), alpha, order));
  return out;
}

// Quadrature ------------------------------------------------------------------------------

double quad_volume(const Grid& g, const VolumeField& f) {
  if (!g.compatible(f)) throw PreconditionError("quad_volume: field does not match grid");
  const auto wz = g.vertical_weights();
  double total = 0.0;
  for (int k = 0; k < g.nz(); ++k) {
    double plane_sum = 0.0;
    for (double x : f.plane(k)) plane_sum += x;
    total += wz[k] * plane_sum;
  }
  return total * g.tangential_weight();
}

double quad_surface(const Grid& g, const SurfaceField& f) {
  if (!g.compatible(f)) throw PreconditionError("quad_surface: field does not match grid");
  double total = 0.0;
  for (double x : f.values()) total += x;
  return total * g.tangential_weight();
}

double l2_norm(const Grid& g, const VolumeField& f) { return std::sqrt(std::max(0.0, quad_volume(g, f * f))); }
double l2_norm(const Grid& g, const SurfaceField& f) { return std::sqrt(std::max(0.0, quad_surface(g, f * f))); }
double l2_norm(const Grid& g, const VectorField& f) {
  return std::sqrt(std::max(0.0, quad_volume(g, dot(f, f))));
}

double sobolev_norm(const Grid& g, const VolumeField& f, int s) {
  if (s < 0 || s > 4) throw PreconditionError("sobolev_norm: order must be in 0..4");
  double sum = 0.0;
  for (int m1 = 0; m1 <= s; ++m1)
    for (int m2 = 0; m1 + m2 <= s; ++m2) {
      VolumeField d = d_tan(g, f, m1, m2);
      for (int m3 = 0; m1 + m2 + m3 <= s; ++m3) {
        if (m3 > 0) d = d_vert(g, d);
        sum += quad_volume(g, d * d);
      }
    }
  return std::sqrt(std::max(0.0, sum));
}

double sobolev_norm(const Grid& g, const SurfaceField& f, int s) {
  if (s < 0 || s > 4) throw PreconditionError("sobolev_norm: order must be in 0..4");
  double sum = 0.0;
  for (int m1 = 0; m1 <= s; ++m1)
    for (int m2 = 0; m1 + m2 <= s; ++m2) {
      const SurfaceField d = d_tan(g, f, m1, m2);
      sum += quad_surface(g, d * d);
    }
  return std::sqrt(std::max(0.0, sum));
}

double sobolev_norm(const Grid& g, const VectorField& f, int s) {
  double sum = 0.0;
  for (const auto& c : f) {
    const double n = sobolev_norm(g, c, s);
    sum += n * n;
  }
  return std::sqrt(sum);
}

}  // namespace capelast
