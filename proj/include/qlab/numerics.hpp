#pragma once

// Periodic position/momentum lattices, unitary transforms between them,
// and the densities that live on either axis.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlab {

using cplx = std::complex<double>;

// Raised when a simulation leaves the region where the lattice is a faithful
// stand-in for the continuum (packet wrap-around, momentum aliasing).
class guard_error : public std::runtime_error {
 public:
  guard_error(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

struct Grid {
  std::size_t n = 0;
  double length = 0.0;
  double dx = 0.0;
  double dk = 0.0;
  std::vector<double> positions;
  std::vector<double> momenta;

  double nyquist() const { return 0.5 * static_cast<double>(n) * dk; }

  bool same_as(const Grid& o) const { return n == o.n && length == o.length; }
};

using GridPtr = std::shared_ptr<const Grid>;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// x_j = -L/2 + j dx and k_m = 2 pi m / L for m in [-n/2, n/2), both ascending.
inline Grid make_grid(std::size_t n, double length) {
  if (n < 8 || !is_power_of_two(n))
    throw std::invalid_argument("grid size must be a power of two >= 8, got " + std::to_string(n));
  if (!(length > 0.0) || !std::isfinite(length))
    throw std::invalid_argument("grid length must be positive");

  Grid g;
  g.n = n;
  g.length = length;
  g.dx = length / static_cast<double>(n);
  g.dk = 2.0 * std::numbers::pi / length;
  g.positions.resize(n);
  g.momenta.resize(n);
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  for (std::size_t j = 0; j < n; ++j) {
    g.positions[j] = -0.5 * length + static_cast<double>(j) * g.dx;
    g.momenta[j] = static_cast<double>(static_cast<std::ptrdiff_t>(j) - half) * g.dk;
  }
  return g;
}

inline GridPtr make_grid_ptr(std::size_t n, double length) {
  return std::make_shared<const Grid>(make_grid(n, length));
}

/// Smallest power of two >= n (and >= 8). Used to realize arbitrary requested sizes.
inline std::size_t round_up_pow2(std::size_t n) {
  std::size_t p = 8;
  while (p < n) p <<= 1;
  return p;
}

namespace detail {

// FFTW plans are created once per (size, direction) and reused through the
// new-array execute interface, which is safe to call concurrently.
inline fftw_plan cached_plan(std::size_t n, int sign) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, int>, fftw_plan> plans;
  std::lock_guard lock(mu);
  auto key = std::make_pair(n, sign);
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  std::vector<cplx> scratch(n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.emplace(key, p);
  return p;
}

inline void fft_inplace(std::vector<cplx>& data, int sign) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(cached_plan(data.size(), sign), buf, buf);
}

}  // namespace detail

/// phi(k_m) = dx / sqrt(2 pi) * sum_j psi(x_j) exp(-i k_m x_j).
///
/// With the lattice origin at -L/2 the phase exp(i k_m L/2) reduces to (-1)^m,
/// so the sum is a plain DFT followed by a shift to ascending momenta.
inline std::vector<cplx> to_momentum(const Grid& g, std::span<const cplx> psi) {
  if (psi.size() != g.n) throw std::invalid_argument("amplitude length does not match grid");
  const std::size_t n = g.n;
  const std::size_t half = n / 2;
  std::vector<cplx> buf(psi.begin(), psi.end());
  detail::fft_inplace(buf, FFTW_FORWARD);
  const double scale = g.dx / std::sqrt(2.0 * std::numbers::pi);
  std::vector<cplx> phi(n);
  for (std::size_t j = 0; j < n; ++j) {
    // lattice index j <-> integer m = j - n/2, DFT bin m mod n
    const std::size_t bin = (j + half) % n;
    const double sign = ((j + half) % 2 == 0) ? 1.0 : -1.0;  // (-1)^m, n even
    phi[j] = sign * scale * buf[bin];
  }
  return phi;
}

/// Exact inverse of to_momentum: psi(x_j) = dk / sqrt(2 pi) * sum_m phi(k_m) exp(i k_m x_j).
inline std::vector<cplx> to_position(std::span<const cplx> phi, const Grid& g) {
  if (phi.size() != g.n) throw std::invalid_argument("amplitude length does not match grid");
  const std::size_t n = g.n;
  const std::size_t half = n / 2;
  std::vector<cplx> buf(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t bin = (j + half) % n;
    const double sign = ((j + half) % 2 == 0) ? 1.0 : -1.0;
    buf[bin] = sign * phi[j];
  }
  detail::fft_inplace(buf, FFTW_BACKWARD);
  const double scale = g.dk / std::sqrt(2.0 * std::numbers::pi);
  for (auto& v : buf) v *= scale;
  return buf;
}

// Amplitudes in both representations, kept consistent at construction.
class WaveFunction {
 public:
  static WaveFunction from_position(GridPtr grid, std::vector<cplx> amp_x) {
    auto amp_k = to_momentum(*grid, amp_x);
    return WaveFunction(std::move(grid), std::move(amp_x), std::move(amp_k));
  }

  static WaveFunction from_momentum(GridPtr grid, std::vector<cplx> amp_k) {
    auto amp_x = to_position(amp_k, *grid);
    return WaveFunction(std::move(grid), std::move(amp_x), std::move(amp_k));
  }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const cplx> amp_x() const { return amp_x_; }
  std::span<const cplx> amp_k() const { return amp_k_; }

  double norm_x() const {
    double s = 0.0;
    for (const auto& a : amp_x_) s += std::norm(a);
    return s * grid_->dx;
  }

  double norm_k() const {
    double s = 0.0;
    for (const auto& a : amp_k_) s += std::norm(a);
    return s * grid_->dk;
  }

  WaveFunction normalized() const {
    const double n = norm_x();
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("cannot normalize a zero or non-finite state");
    const double s = 1.0 / std::sqrt(n);
    auto x = amp_x_;
    auto k = amp_k_;
    for (auto& a : x) a *= s;
    for (auto& a : k) a *= s;
    return WaveFunction(grid_, std::move(x), std::move(k));
  }

 private:
  WaveFunction(GridPtr grid, std::vector<cplx> x, std::vector<cplx> k)
      : grid_(std::move(grid)), amp_x_(std::move(x)), amp_k_(std::move(k)) {}

  GridPtr grid_;
  std::vector<cplx> amp_x_;
  std::vector<cplx> amp_k_;
};

/// <a|b> = sum_j conj(a_j) b_j dx.
inline cplx inner_product(const WaveFunction& a, const WaveFunction& b) {
  if (!a.grid().same_as(b.grid())) throw std::invalid_argument("inner product across different grids");
  cplx s{0.0, 0.0};
  const auto xa = a.amp_x();
  const auto xb = b.amp_x();
  for (std::size_t j = 0; j < xa.size(); ++j) s += std::conj(xa[j]) * xb[j];
  return s * a.grid().dx;
}

struct Density {
  double weight = 0.0;  // quadrature weight of one cell (dx or dk)
  std::vector<double> values;

  double mass() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * weight;
  }
};

// Joint density on an n x n lattice, row-major in (first, second) coordinate.
struct Density2D {
  std::size_t n = 0;
  double weight = 0.0;  // area of one cell
  std::vector<double> values;

  double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }

  double mass() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * weight;
  }
};

/// |amp|^2 renormalized to unit mass under the given cell weight.
inline Density density(std::span<const cplx> amps, double weight) {
  Density d;
  d.weight = weight;
  d.values.resize(amps.size());
  double s = 0.0;
  for (std::size_t j = 0; j < amps.size(); ++j) {
    d.values[j] = std::norm(amps[j]);
    s += d.values[j];
  }
  if (s > 0.0) {
    const double inv = 1.0 / (s * weight);
    for (auto& v : d.values) v *= inv;
  }
  return d;
}

inline Density position_density(const WaveFunction& w) { return density(w.amp_x(), w.grid().dx); }
inline Density momentum_density(const WaveFunction& w) { return density(w.amp_k(), w.grid().dk); }

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of a density sampled at the given abscissae.
inline Moments moments(const Density& d, std::span<const double> axis) {
  double m = 0.0;
  for (std::size_t j = 0; j < axis.size(); ++j) m += axis[j] * d.values[j];
  m *= d.weight;
  double v = 0.0;
  for (std::size_t j = 0; j < axis.size(); ++j) v += (axis[j] - m) * (axis[j] - m) * d.values[j];
  return {m, v * d.weight};
}

/// Throws guard_error when the packet's mean +/- 5 std does not fit inside the box.
inline void check_in_domain(const WaveFunction& w, double t, double n_sigma = 5.0) {
  const auto& g = w.grid();
  const auto mo = moments(position_density(w), g.positions);
  const double reach = n_sigma * std::sqrt(mo.variance);
  if (mo.mean - reach < -0.5 * g.length || mo.mean + reach > 0.5 * g.length) {
    throw guard_error("packet within " + std::to_string(n_sigma) +
                          " std of the periodic boundary at t=" + std::to_string(t) +
                          " (mean " + std::to_string(mo.mean) + ", std " +
                          std::to_string(std::sqrt(mo.variance)) + ", half-length " +
                          std::to_string(0.5 * g.length) + ")",
                      t);
  }
}

}  // namespace qlab
