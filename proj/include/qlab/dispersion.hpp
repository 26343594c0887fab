#pragma once

// Positive-energy relativistic free-particle dispersion, coherent packets,
// and the two momentum-space propagators.

#include "qlab/entropy.hpp"
#include "qlab/numerics.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qlab {

struct DispersionModel {
  double c = 1.0;
  double hbar_over_m = 1.0;

  // (hbar k / m c)
  double reduced(double k) const { return hbar_over_m * k / c; }

  void validate() const {
    if (!(c > 0.0)) throw std::invalid_argument("speed of light must be positive");
    if (!(hbar_over_m > 0.0)) throw std::invalid_argument("hbar_over_m must be positive");
  }
};

enum class Propagator { exact, taylor };

inline const char* to_string(Propagator p) { return p == Propagator::exact ? "exact" : "taylor"; }

/// c sqrt(k^2 + (m c / hbar)^2)
inline double omega(double k, const DispersionModel& m) {
  const double rest = m.c / m.hbar_over_m;
  return m.c * std::sqrt(k * k + rest * rest);
}

inline double group_velocity(double k, const DispersionModel& m) {
  const double u = m.reduced(k);
  return m.hbar_over_m * k / std::sqrt(1.0 + u * u);
}

inline double hessian(double k, const DispersionModel& m) {
  const double u = m.reduced(k);
  return m.hbar_over_m * std::pow(1.0 + u * u, -1.5);
}

struct HessianEigenvalues {
  double lambda1 = 0.0;   // along k
  double lambda23 = 0.0;  // transverse, doubly degenerate
};

inline HessianEigenvalues hessian_eigenvalues_3d(double knorm, const DispersionModel& m) {
  if (knorm < 0.0) throw std::invalid_argument("knorm must be nonnegative");
  const double u2 = m.reduced(knorm) * m.reduced(knorm);
  return {m.hbar_over_m * std::pow(1.0 + u2, -1.5), m.hbar_over_m / std::sqrt(1.0 + u2)};
}

/// Full 3x3 Hessian of omega at wave vector k.
inline Matrix3 hessian_3d(const std::array<double, 3>& k, const DispersionModel& m) {
  std::array<double, 3> u{};
  double u2 = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    u[i] = m.reduced(k[i]);
    u2 += u[i] * u[i];
  }
  const double pre = m.hbar_over_m * std::pow(1.0 + u2, -1.5);
  Matrix3 h{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      h[i][j] = pre * ((i == j ? 1.0 + u2 : 0.0) - u[i] * u[j]);
  return h;
}

struct CoherentStateParams {
  double r0 = 0.0;
  double k0 = 0.0;
  double sigma2 = 1.0;  // amplitude variance; the position density has variance sigma2 / 2
};

/// psi(x) = (pi sigma2)^(-1/4) exp(-(x - r0)^2 / (2 sigma2)) exp(i k0 x), renormalized on the lattice.
inline WaveFunction coherent_state(const CoherentStateParams& p, GridPtr grid) {
  if (!(p.sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
  if (std::abs(p.k0) + 4.0 / std::sqrt(p.sigma2) >= grid->nyquist())
    throw guard_error("momentum content |k0| + 4/sqrt(sigma2) = " +
                          std::to_string(std::abs(p.k0) + 4.0 / std::sqrt(p.sigma2)) +
                          " reaches the lattice Nyquist momentum " + std::to_string(grid->nyquist()),
                      0.0);
  const double norm = std::pow(std::numbers::pi * p.sigma2, -0.25);
  std::vector<cplx> amp(grid->n);
  for (std::size_t j = 0; j < grid->n; ++j) {
    const double dx = grid->positions[j] - p.r0;
    amp[j] = norm * std::exp(-dx * dx / (2.0 * p.sigma2)) * std::polar(1.0, p.k0 * grid->positions[j]);
  }
  return WaveFunction::from_position(std::move(grid), std::move(amp)).normalized();
}

namespace detail {

template <class Phase>
WaveFunction apply_momentum_phase(const WaveFunction& w, Phase&& phase) {
  const auto& g = w.grid();
  std::vector<cplx> phi(w.amp_k().begin(), w.amp_k().end());
  for (std::size_t j = 0; j < g.n; ++j) phi[j] *= std::polar(1.0, -phase(g.momenta[j]));
  return WaveFunction::from_momentum(w.grid_ptr(), std::move(phi));
}

}  // namespace detail

/// phi(k) -> phi(k) exp(-i omega(k) t)
inline WaveFunction propagate_exact(const WaveFunction& w, double t, const DispersionModel& m) {
  return detail::apply_momentum_phase(w, [&](double k) { return omega(k, m) * t; });
}

/// Second-order expansion of the exact phase about k0:
/// [omega(k0) + v_g(k0)(k - k0) + H(k0)(k - k0)^2 / 2] t.
/// The constant term is v_p(k0) k0 = omega(k0); it is kept so amplitudes are
/// directly comparable with propagate_exact.
inline WaveFunction propagate_taylor(const WaveFunction& w, double t, const DispersionModel& m, double k0) {
  const double w0 = omega(k0, m);
  const double vg = group_velocity(k0, m);
  const double h = hessian(k0, m);
  auto out = detail::apply_momentum_phase(w, [&](double k) {
    const double dk = k - k0;
    return (w0 + vg * dk + 0.5 * h * dk * dk) * t;
  });
  return out.normalized();
}

/// Expansion point taken as the momentum-density mean of w.
inline WaveFunction propagate_taylor(const WaveFunction& w, double t, const DispersionModel& m) {
  const double k0 = moments(momentum_density(w), w.grid().momenta).mean;
  return propagate_taylor(w, t, m, k0);
}

inline WaveFunction propagate(const WaveFunction& w, double t, const DispersionModel& m, Propagator p) {
  return p == Propagator::exact ? propagate_exact(w, t, m) : propagate_taylor(w, t, m);
}

/// Pointwise complex conjugate in position; mirrors the momentum density.
inline WaveFunction conjugate(const WaveFunction& w) {
  std::vector<cplx> amp(w.amp_x().begin(), w.amp_x().end());
  for (auto& a : amp) a = std::conj(a);
  return WaveFunction::from_position(w.grid_ptr(), std::move(amp));
}

}  // namespace qlab
