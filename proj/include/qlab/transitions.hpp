#pragma once

// Exact finite-level transition dynamics: the two-state closed form, its
// golden-rule limit, N-state eigen-expansions, and the oscillating
// densities of a two-state superposition.

#include "qlab/entropy.hpp"
#include "qlab/linalg.hpp"
#include "qlab/numerics.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qlab {

struct TwoLevelSystem {
  double omega1 = 0.0;
  double omega2 = 0.0;
  double w11 = 0.0;
  double w12 = 0.0;  // w21 == w12
  double w22 = 0.0;

  double omega1_total() const { return omega1 + w11; }
  double omega2_total() const { return omega2 + w22; }
};

struct TwoLevelSpectrum {
  double eta = 0.0;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double theta = 0.0;
};

/// Diagonalizes H'/hbar = [[w1 + w11, w12], [w12, w2 + w22]].
///
/// theta = atan2(2 w12, w1tot - w2tot) / 2, so sin 2theta = 2 w12 / eta and
/// cos 2theta = (w1tot - w2tot) / eta hold together. theta lies in [0, pi/2]
/// for w12 >= 0 and in (-pi/2, 0) for w12 < 0, where it carries the sign of
/// alpha_2. At eta == 0 the matrix is already diagonal and theta = 0.
inline TwoLevelSpectrum two_level_spectrum(const TwoLevelSystem& sys) {
  const double a = sys.omega1_total();
  const double b = sys.omega2_total();
  const double diff = a - b;
  TwoLevelSpectrum s;
  s.eta = std::hypot(diff, 2.0 * sys.w12);
  if (!std::isfinite(s.eta)) throw std::invalid_argument("two-level parameters must be finite");
  s.lambda_plus = 0.5 * (a + b + s.eta);
  s.lambda_minus = 0.5 * (a + b - s.eta);
  s.theta = s.eta == 0.0 ? 0.0 : 0.5 * std::atan2(2.0 * sys.w12, diff);
  return s;
}

/// (alpha1, alpha2) of exp(-i H' t / hbar) |1>.
inline std::pair<cplx, cplx> transition_coefficients(const TwoLevelSystem& sys, double t) {
  const auto s = two_level_spectrum(sys);
  const cplx ep = std::polar(1.0, -s.lambda_plus * t);
  const cplx em = std::polar(1.0, -s.lambda_minus * t);
  const double c = std::cos(s.theta);
  const double sn = std::sin(s.theta);
  const cplx a1 = c * c * ep + sn * sn * em;
  const cplx a2 = std::sin(2.0 * s.theta) * 0.5 * (ep - em);
  return {a1, a2};
}

/// |alpha2(t)|^2 = 4 w12^2 / eta^2 sin^2((lambda+ - lambda-) t / 2)
inline double transition_probability(const TwoLevelSystem& sys, double t) {
  const auto s = two_level_spectrum(sys);
  if (s.eta == 0.0) return 0.0;
  const double amp = 2.0 * sys.w12 / s.eta;
  const double sn = std::sin(0.5 * (s.lambda_plus - s.lambda_minus) * t);
  return amp * amp * sn * sn;
}

/// Weak-coupling, off-resonance limit: 4 w12^2 / (w1 - w2)^2 sin^2((w2 - w1) t / 2).
inline double fermi_approximation(const TwoLevelSystem& sys, double t) {
  const double gap = sys.omega1 - sys.omega2;
  if (gap == 0.0) throw std::domain_error("golden-rule approximation is singular at resonance");
  const double sn = std::sin(0.5 * (sys.omega2 - sys.omega1) * t);
  return 4.0 * sys.w12 * sys.w12 / (gap * gap) * sn * sn;
}

/// Entropy recurrence time pi / |lambda+ - lambda-|.
inline double oscillation_period(const TwoLevelSystem& sys) {
  const auto s = two_level_spectrum(sys);
  if (s.eta == 0.0) throw std::domain_error("oscillation period undefined for a degenerate uncoupled system");
  return std::numbers::pi / s.eta;
}

// Symmetric N x N H'/hbar with its eigen-decomposition computed once at construction.
class MultiLevelSystem {
 public:
  explicit MultiLevelSystem(Matrix hmat) : hmat_(std::move(hmat)) {
    if (hmat_.rows() < 2 || hmat_.rows() != hmat_.cols())
      throw std::invalid_argument("multi-level matrix must be square with N >= 2");
    if (!hmat_.is_symmetric()) throw std::invalid_argument("multi-level matrix must be symmetric");
    eig_ = jacobi_eigen(hmat_);
  }

  static MultiLevelSystem from(const TwoLevelSystem& s) {
    Matrix m(2, 2);
    m(0, 0) = s.omega1_total();
    m(1, 1) = s.omega2_total();
    m(0, 1) = m(1, 0) = s.w12;
    return MultiLevelSystem(std::move(m));
  }

  std::size_t dim() const { return hmat_.rows(); }
  const Matrix& hmat() const { return hmat_; }
  const std::vector<double>& eigenvalues() const { return eig_.values; }
  // eigenvectors()(i, j): component j of eigenvector i
  const Matrix& eigenvectors() const { return eig_.vectors; }

 private:
  Matrix hmat_;
  SymmetricEigen eig_;
};

/// alpha_j(t) = sum_i exp(-i lambda_i t) v_ij v_i0 for the system started in state 0.
inline cplx multistate_coefficients(const MultiLevelSystem& sys, std::size_t j, double t) {
  if (j >= sys.dim()) throw std::out_of_range("state index out of range");
  const auto& lam = sys.eigenvalues();
  const auto& v = sys.eigenvectors();
  cplx a{0.0, 0.0};
  for (std::size_t i = 0; i < sys.dim(); ++i) a += std::polar(v(i, j) * v(i, 0), -lam[i] * t);
  return a;
}

/// |alpha_j(t)|^2 via the pairwise cosine expansion.
inline double multistate_probability(const MultiLevelSystem& sys, std::size_t j, double t) {
  if (j >= sys.dim()) throw std::out_of_range("state index out of range");
  const auto& lam = sys.eigenvalues();
  const auto& v = sys.eigenvectors();
  const std::size_t n = sys.dim();
  double p = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = v(i, j) * v(i, 0);
    p += wi * wi;
    for (std::size_t k = i + 1; k < n; ++k)
      p += 2.0 * wi * v(k, j) * v(k, 0) * std::cos((lam[i] - lam[k]) * t);
  }
  return p;
}

/// c(t) = sum_i exp(-i lambda_i t) v_i (v_i . c0) for an arbitrary initial coefficient vector.
inline std::vector<cplx> evolve_coefficients(const MultiLevelSystem& sys, std::span<const cplx> c0, double t) {
  if (c0.size() != sys.dim()) throw std::invalid_argument("coefficient vector has wrong dimension");
  const auto& lam = sys.eigenvalues();
  const auto& v = sys.eigenvectors();
  const std::size_t n = sys.dim();
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx proj{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) proj += v(i, k) * c0[k];
    proj *= std::polar(1.0, -lam[i] * t);
    for (std::size_t k = 0; k < n; ++k) out[k] += v(i, k) * proj;
  }
  return out;
}

/// Linear combination sum_j c_j basis_j in both representations.
inline WaveFunction superpose(std::span<const WaveFunction> basis, std::span<const cplx> coeffs) {
  if (basis.empty() || basis.size() != coeffs.size())
    throw std::invalid_argument("basis and coefficient counts differ");
  const std::size_t n = basis.front().grid().n;
  std::vector<cplx> x(n);
  for (std::size_t b = 0; b < basis.size(); ++b) {
    const auto bx = basis[b].amp_x();
    for (std::size_t j = 0; j < n; ++j) x[j] += coeffs[b] * bx[j];
  }
  return WaveFunction::from_position(basis.front().grid_ptr(), std::move(x));
}

/// Oscillator-shaped functions H_n(x / s) exp(-x^2 / (2 s^2)), s^2 = sigma2,
/// sampled on the grid and orthonormalized by modified Gram-Schmidt.
inline std::vector<WaveFunction> oscillator_basis(const GridPtr& grid, std::size_t count, double sigma2 = 1.0,
                                                  double center = 0.0) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
  std::vector<std::vector<cplx>> raw(count, std::vector<cplx>(grid->n));
  const double s = std::sqrt(sigma2);
  for (std::size_t j = 0; j < grid->n; ++j) {
    const double u = (grid->positions[j] - center) / s;
    const double g = std::exp(-0.5 * u * u);
    double hm1 = 0.0;
    double h = 1.0;
    for (std::size_t k = 0; k < count; ++k) {
      raw[k][j] = h * g;
      // physicists' recurrence H_{k+1} = 2u H_k - 2k H_{k-1}
      const double next = 2.0 * u * h - 2.0 * static_cast<double>(k) * hm1;
      hm1 = h;
      h = next;
    }
  }
  std::vector<WaveFunction> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    auto v = raw[k];
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& prev : out) {
        cplx ov{0.0, 0.0};
        const auto px = prev.amp_x();
        for (std::size_t j = 0; j < grid->n; ++j) ov += std::conj(px[j]) * v[j];
        ov *= grid->dx;
        for (std::size_t j = 0; j < grid->n; ++j) v[j] -= ov * px[j];
      }
    }
    out.push_back(WaveFunction::from_position(grid, std::move(v)).normalized());
  }
  return out;
}

// Coefficient fields of rho(t) = F1 + F2 sin^2(eta t / 2) + F3 sin(eta t)
// on one axis (A_i in position, B_i in momentum).
struct OscillationFields {
  std::vector<double> f1;
  std::vector<double> f2;
  std::vector<double> f3;
};

namespace detail {

inline OscillationFields oscillation_fields(std::span<const cplx> a, std::span<const cplx> b, double theta) {
  const double s2 = std::sin(2.0 * theta);
  const double c2 = std::cos(2.0 * theta);
  OscillationFields f;
  f.f1.resize(a.size());
  f.f2.resize(a.size());
  f.f3.resize(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    const cplx cross = std::conj(a[j]) * b[j];
    f.f1[j] = std::norm(a[j]);
    f.f2[j] = s2 * s2 * (std::norm(b[j]) - std::norm(a[j])) + 2.0 * s2 * c2 * cross.real();
    f.f3[j] = s2 * cross.imag();
  }
  return f;
}

inline Density assemble(const OscillationFields& f, double sin2_half, double sin_full, double weight) {
  Density d;
  d.weight = weight;
  d.values.resize(f.f1.size());
  double mass = 0.0;
  for (std::size_t j = 0; j < f.f1.size(); ++j) {
    double v = f.f1[j] + f.f2[j] * sin2_half + f.f3[j] * sin_full;
    if (v < 0.0) {
      if (v < -1e-12) throw std::runtime_error("transition density negative beyond tolerance");
      v = 0.0;
    }
    d.values[j] = v;
    mass += v;
  }
  const double inv = 1.0 / (mass * weight);
  for (auto& v : d.values) v *= inv;
  return d;
}

}  // namespace detail

struct TransitionFields {
  OscillationFields position;
  OscillationFields momentum;
  double eta = 0.0;
};

inline TransitionFields transition_fields(const TwoLevelSystem& sys, const WaveFunction& psi1,
                                          const WaveFunction& psi2) {
  if (std::abs(inner_product(psi1, psi2)) > 1e-8)
    throw std::invalid_argument("transition basis must be orthogonal");
  const auto s = two_level_spectrum(sys);
  return {detail::oscillation_fields(psi1.amp_x(), psi2.amp_x(), s.theta),
          detail::oscillation_fields(psi1.amp_k(), psi2.amp_k(), s.theta), s.eta};
}

/// Position and momentum densities of alpha1(t) psi1 + alpha2(t) psi2.
inline std::pair<Density, Density> transition_densities(const TwoLevelSystem& sys, const WaveFunction& psi1,
                                                         const WaveFunction& psi2, double t) {
  const auto f = transition_fields(sys, psi1, psi2);
  const double half = std::sin(0.5 * f.eta * t);
  const double full = std::sin(f.eta * t);
  return {detail::assemble(f.position, half * half, full, psi1.grid().dx),
          detail::assemble(f.momentum, half * half, full, psi1.grid().dk)};
}

inline EntropyValue transition_entropy(const TwoLevelSystem& sys, const WaveFunction& psi1,
                                       const WaveFunction& psi2, double t) {
  const auto [rr, rk] = transition_densities(sys, psi1, psi2, t);
  EntropyValue e;
  e.s_r = differential_entropy(rr);
  e.s_k = differential_entropy(rk);
  e.total = e.s_r + e.s_k;
  return e;
}

}  // namespace qlab
