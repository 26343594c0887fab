#pragma once

// Differential entropies of lattice densities and the closed form for
// dispersing Gaussian packets. All values in nats.

#include "qlab/linalg.hpp"
#include "qlab/numerics.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

namespace qlab {

struct EntropyValue {
  double s_r = 0.0;
  double s_k = 0.0;
  double total = 0.0;
};

inline constexpr double kDensityFloor = 1e-300;

namespace detail {

inline double neg_plogp_sum(std::span<const double> values) {
  double s = 0.0;
  for (double p : values) {
    if (std::isnan(p)) throw std::invalid_argument("NaN in density");
    if (p > kDensityFloor) s -= p * std::log(p);
  }
  return s;
}

}  // namespace detail

/// -sum rho ln rho * w with 0 ln 0 = 0.
inline double differential_entropy(const Density& rho) {
  return detail::neg_plogp_sum(rho.values) * rho.weight;
}

inline double joint_entropy_2d(const Density2D& rho) {
  return detail::neg_plogp_sum(rho.values) * rho.weight;
}

inline EntropyValue phase_space_entropy(const WaveFunction& w) {
  EntropyValue e;
  e.s_r = differential_entropy(position_density(w));
  e.s_k = differential_entropy(momentum_density(w));
  e.total = e.s_r + e.s_k;
  return e;
}

using Matrix3 = std::array<std::array<double, 3>, 3>;

namespace detail {

// ln(1 + x^2) without overflow for large x
inline double log1p_square(double x) {
  const double ax = std::abs(x);
  if (ax < 1e150) return std::log1p(ax * ax);
  return 2.0 * std::log(ax) + std::log1p(1.0 / (ax * ax));
}

inline double minimum_entropy(int dim) { return dim * (1.0 + std::log(std::numbers::pi)); }

}  // namespace detail

/// 1 + ln pi + 1/2 ln(1 + t^2 (H / sigma2)^2) for a 1D coherent packet of amplitude variance sigma2.
inline double gaussian_entropy_closed_form(double sigma2, double hess, double t) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
  if (!(hess > 0.0)) throw std::invalid_argument("hessian must be positive");
  return detail::minimum_entropy(1) + 0.5 * detail::log1p_square(t * hess / sigma2);
}

/// 3(1 + ln pi) + 1/2 ln det(I + t^2 (Sigma^-1 H)^2).
///
/// Sigma^-1 H is similar to the symmetric L^-1 H L^-T (Sigma = L L^T), so its
/// eigenvalues mu_i are real and positive and the determinant factorizes into
/// prod(1 + t^2 mu_i^2).
inline double gaussian_entropy_closed_form(const Matrix3& sigma2, const Matrix3& hess, double t) {
  Matrix s(3, 3);
  Matrix h(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      s(i, j) = sigma2[i][j];
      h(i, j) = hess[i][j];
    }
  if (!s.is_symmetric() || !h.is_symmetric())
    throw std::invalid_argument("covariance and hessian must be symmetric");
  for (double ev : jacobi_eigen(h).values)
    if (!(ev > 0.0)) throw std::invalid_argument("hessian is not positive definite");

  const Matrix linv = lower_inverse(cholesky(s));
  Matrix m = linv * h * linv.transposed();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) m(j, i) = m(i, j) = 0.5 * (m(i, j) + m(j, i));

  double logdet = 0.0;
  for (double mu : jacobi_eigen(m).values) logdet += detail::log1p_square(t * mu);
  return detail::minimum_entropy(3) + 0.5 * logdet;
}

}  // namespace qlab
