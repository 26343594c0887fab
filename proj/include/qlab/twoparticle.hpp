#pragma once

// Symmetrized and antisymmetrized two-particle states built from two
// single-particle factors, their joint densities and entropy, and the
// head-on collision of two coherent packets.

#include "qlab/dispersion.hpp"
#include "qlab/entropy.hpp"
#include "qlab/numerics.hpp"
#include "qlab/series.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlab {

enum class Statistics { fermion, boson };

inline const char* to_string(Statistics s) { return s == Statistics::fermion ? "fermion" : "boson"; }

// -1 for fermions, +1 for bosons
inline double exchange_sign(Statistics s) { return s == Statistics::fermion ? -1.0 : 1.0; }

struct TwoParticleState {
  WaveFunction psi1;
  WaveFunction psi2;
  Statistics stats;
  double c_t;
};

/// C_t = 2 (1 -/+ |<psi1|psi2>|^2); fermions with (near-)identical factors are rejected.
inline TwoParticleState make_two_particle(WaveFunction psi1, WaveFunction psi2, Statistics stats) {
  if (!psi1.grid().same_as(psi2.grid())) throw std::invalid_argument("two-particle factors live on different grids");
  for (const auto* w : {&psi1, &psi2})
    if (std::abs(w->norm_x() - 1.0) > 1e-8) throw std::invalid_argument("two-particle factors must be normalized");
  const double ov = std::abs(inner_product(psi1, psi2));
  if (stats == Statistics::fermion && ov > 1.0 - 1e-10)
    throw std::invalid_argument("antisymmetrized state vanishes: factors are identical (Pauli exclusion)");
  const double c_t = 2.0 * (1.0 + exchange_sign(stats) * ov * ov);
  return {std::move(psi1), std::move(psi2), stats, c_t};
}

namespace detail {

// Calls f(i, j, rho_ij) for every cell of
//   [r1(i) r2(j) + r1(j) r2(i) +/- 2 Re(a_i conj(b_i) b_j conj(a_j))] / C.
// rho_ij and rho_ji are computed from identical operations.
template <class F>
void for_each_joint(std::span<const cplx> a, std::span<const cplx> b, double sign, double c_t, F&& f) {
  const std::size_t n = a.size();
  std::vector<double> ra(n), rb(n), zr(n), zi(n);
  for (std::size_t i = 0; i < n; ++i) {
    ra[i] = std::norm(a[i]);
    rb[i] = std::norm(b[i]);
    const cplx z = a[i] * std::conj(b[i]);
    zr[i] = z.real();
    zi[i] = z.imag();
  }
  const double inv = 1.0 / c_t;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double direct = ra[i] * rb[j] + ra[j] * rb[i];
      const double cross = zr[i] * zr[j] + zi[i] * zi[j];
      double v = (direct + sign * 2.0 * cross) * inv;
      if (v < 0.0) {
        if (v < -1e-12) throw std::runtime_error("joint density negative beyond tolerance");
        v = 0.0;
      }
      f(i, j, v);
    }
  }
}

inline Density2D joint_density(std::span<const cplx> a, std::span<const cplx> b, double sign, double c_t,
                               double cell) {
  Density2D d;
  d.n = a.size();
  d.weight = cell * cell;
  d.values.resize(d.n * d.n);
  for_each_joint(a, b, sign, c_t, [&](std::size_t i, std::size_t j, double v) { d.values[i * d.n + j] = v; });
  return d;
}

inline double joint_entropy_streamed(std::span<const cplx> a, std::span<const cplx> b, double sign, double c_t,
                                     double cell) {
  double s = 0.0;
  for_each_joint(a, b, sign, c_t, [&](std::size_t, std::size_t, double v) {
    if (v > kDensityFloor) s -= v * std::log(v);
  });
  return s * cell * cell;
}

}  // namespace detail

inline Density2D joint_density_position(const TwoParticleState& s) {
  return detail::joint_density(s.psi1.amp_x(), s.psi2.amp_x(), exchange_sign(s.stats), s.c_t, s.psi1.grid().dx);
}

inline Density2D joint_density_momentum(const TwoParticleState& s) {
  return detail::joint_density(s.psi1.amp_k(), s.psi2.amp_k(), exchange_sign(s.stats), s.c_t, s.psi1.grid().dk);
}

/// Joint position entropy plus joint momentum entropy; the n x n densities are not stored.
inline EntropyValue two_particle_entropy(const TwoParticleState& s) {
  const double sign = exchange_sign(s.stats);
  EntropyValue e;
  e.s_r = detail::joint_entropy_streamed(s.psi1.amp_x(), s.psi2.amp_x(), sign, s.c_t, s.psi1.grid().dx);
  e.s_k = detail::joint_entropy_streamed(s.psi1.amp_k(), s.psi2.amp_k(), sign, s.c_t, s.psi1.grid().dk);
  e.total = e.s_r + e.s_k;
  return e;
}

struct CollisionParams {
  double k1 = 1.0;
  double c1 = -30.0;
  double c2 = 30.0;
  double sigma2 = 1.0;
  DispersionModel model{};
  double t_max = 80.0;
  std::size_t n_steps = 161;  // number of sampled times in [0, t_max]
  Statistics stats = Statistics::fermion;
  std::size_t grid_n = 1024;
  double length = 320.0;
  double snapshot_stride = 20.0;  // <= 0 disables snapshots
  std::size_t snapshot_decimation = 4;
};

struct DensitySnapshot {
  double t = 0.0;
  std::vector<double> x;  // decimated axis
  std::vector<double> rho;  // row-major over (x1, x2)
};

struct CollisionResult {
  EntropySeries series;
  std::vector<double> separation;    // |<x>_1 - <x>_2| per sample
  std::vector<double> packet_sigma;  // position std of one packet per sample
  double max_diagonal = 0.0;         // max_t max_x rho(x, x)
  std::vector<DensitySnapshot> snapshots;
};

namespace detail {

struct CollisionPackets {
  WaveFunction p1;
  WaveFunction p2;
};

inline CollisionPackets initial_packets(const CollisionParams& p, const GridPtr& grid) {
  return {coherent_state({p.c1, p.k1, p.sigma2}, grid), coherent_state({p.c2, -p.k1, p.sigma2}, grid)};
}

}  // namespace detail

/// Evolves both packets from t = 0 to each sample time with the exact
/// propagator, antisymmetrizes (or symmetrizes) and records the joint entropy.
inline CollisionResult collision_scenario(const CollisionParams& p) {
  p.model.validate();
  if (p.n_steps < 8) throw std::invalid_argument("collision needs at least 8 sampled times");
  if (!(p.c1 < p.c2)) throw std::invalid_argument("collision requires c1 < c2");
  if (!(p.sigma2 > 0.0)) throw std::invalid_argument("sigma2 must be positive");
  if (!(p.t_max > 0.0)) throw std::invalid_argument("t_max must be positive");

  const auto grid = make_grid_ptr(p.grid_n, p.length);
  const auto init = detail::initial_packets(p, grid);

  CollisionResult out;
  out.series.meta = {{"propagator", "exact"}, {"statistics", to_string(p.stats)}};

  const auto evolve = [&](double t) {
    auto w1 = propagate_exact(init.p1, t, p.model);
    auto w2 = propagate_exact(init.p2, t, p.model);
    check_in_domain(w1, t);
    check_in_domain(w2, t);
    return make_two_particle(std::move(w1), std::move(w2), p.stats);
  };

  for (double t : sample_times(0.0, p.t_max, p.n_steps)) {
    const auto state = evolve(t);
    const auto e = two_particle_entropy(state);
    out.series.push(t, e.s_r, e.s_k);

    const auto m1 = moments(position_density(state.psi1), grid->positions);
    const auto m2 = moments(position_density(state.psi2), grid->positions);
    out.separation.push_back(std::abs(m1.mean - m2.mean));
    out.packet_sigma.push_back(std::sqrt(m1.variance));

    if (p.stats == Statistics::fermion) {
      const auto a = state.psi1.amp_x();
      const auto b = state.psi2.amp_x();
      for (std::size_t i = 0; i < grid->n; ++i) {
        const double direct = 2.0 * std::norm(a[i]) * std::norm(b[i]);
        const cplx z = a[i] * std::conj(b[i]);
        const double cross = z.real() * z.real() + z.imag() * z.imag();
        out.max_diagonal = std::max(out.max_diagonal, (direct - 2.0 * cross) / state.c_t);
      }
    }
  }

  if (p.snapshot_stride > 0.0) {
    const std::size_t dec = std::max<std::size_t>(1, p.snapshot_decimation);
    for (std::size_t k = 0; static_cast<double>(k) * p.snapshot_stride <= p.t_max + 1e-9; ++k) {
      const double t = static_cast<double>(k) * p.snapshot_stride;
      const auto state = evolve(t);
      const auto rho = joint_density_position(state);
      DensitySnapshot snap;
      snap.t = t;
      for (std::size_t i = 0; i < grid->n; i += dec) snap.x.push_back(grid->positions[i]);
      for (std::size_t i = 0; i < grid->n; i += dec)
        for (std::size_t j = 0; j < grid->n; j += dec) snap.rho.push_back(rho(i, j));
      out.snapshots.push_back(std::move(snap));
    }
  }
  return out;
}

}  // namespace qlab
