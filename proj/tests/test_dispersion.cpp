#include "oracles.hpp"
#include "qlab/dispersion.hpp"
#include "qlab/entropy.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qlab;

TEST(Dispersion, ReferenceValues) {
  const DispersionModel m;
  EXPECT_DOUBLE_EQ(omega(0.0, m), 1.0);
  EXPECT_NEAR(omega(1.0, m), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(group_velocity(1.0, m), 0.7071067811865475, 1e-15);
  EXPECT_NEAR(hessian(1.0, m), 0.3535533905932738, 1e-15);
  EXPECT_DOUBLE_EQ(group_velocity(0.0, m), 0.0);
  EXPECT_DOUBLE_EQ(hessian(0.0, m), 1.0);
}

TEST(Dispersion, DerivativesMatchFiniteDifferences) {
  for (const DispersionModel m : {DispersionModel{1.0, 1.0}, DispersionModel{2.0, 0.5}, DispersionModel{0.7, 3.0}}) {
    const auto w = [&](long double k) { return oracle::omega_ld(k, m.c, m.hbar_over_m); };
    for (int i = 0; i <= 80; ++i) {
      const double k = -10.0 + 0.25 * i;
      EXPECT_NEAR(omega(k, m), static_cast<double>(w(k)), 1e-14 * omega(k, m));
      EXPECT_NEAR(group_velocity(k, m), oracle::central_diff(w, k, 1e-3), 1e-9);
      EXPECT_NEAR(hessian(k, m), oracle::second_diff(w, k, 1e-3), 1e-7 * hessian(k, m));
    }
  }
}

TEST(Dispersion, SubluminalAndConvex) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> k(-1e3, 1e3);
  std::uniform_real_distribution<double> p(0.1, 5.0);
  for (int i = 0; i < 500; ++i) {
    const DispersionModel m{p(rng), p(rng)};
    const double kk = k(rng);
    EXPECT_LT(std::abs(group_velocity(kk, m)), m.c);
    EXPECT_GT(hessian(kk, m), 0.0);
    EXPECT_GE(omega(kk, m), m.c * m.c / m.hbar_over_m * (1.0 - 1e-15));
    EXPECT_DOUBLE_EQ(omega(kk, m), omega(-kk, m));
  }
}

TEST(Dispersion, NonrelativisticLimit) {
  const DispersionModel m{1e4, 1.0};
  EXPECT_NEAR(group_velocity(2.0, m), 2.0, 1e-6);
  EXPECT_NEAR(hessian(2.0, m), 1.0, 1e-6);
}

TEST(Dispersion, ModelValidation) {
  EXPECT_THROW((DispersionModel{0.0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((DispersionModel{1.0, -1.0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW(DispersionModel{}.validate());
}

TEST(Hessian3D, EigenvaluesAlongAndAcrossK) {
  const DispersionModel m{1.0, 1.0};
  const std::array<double, 3> k{0.6, -0.8, 1.2};
  const double kn = std::sqrt(0.36 + 0.64 + 1.44);
  const auto h = hessian_3d(k, m);
  const auto ev = hessian_eigenvalues_3d(kn, m);
  Matrix hm(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) hm(i, j) = h[i][j];
  const auto e = jacobi_eigen(hm);
  EXPECT_NEAR(e.values[0], ev.lambda1, 1e-14);
  EXPECT_NEAR(e.values[1], ev.lambda23, 1e-14);
  EXPECT_NEAR(e.values[2], ev.lambda23, 1e-14);
  EXPECT_NEAR(ev.lambda1, hessian(kn, m), 1e-15);
  EXPECT_THROW(hessian_eigenvalues_3d(-1.0, m), std::invalid_argument);
}

TEST(Hessian3D, MatchesFiniteDifferences) {
  const DispersionModel m{1.3, 0.8};
  const std::array<double, 3> k{0.4, 1.1, -0.7};
  const auto w3 = [&](std::array<double, 3> q) {
    return omega(std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]), m);
  };
  const auto h = hessian_3d(k, m);
  const double e = 1e-4;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      auto pp = k, pm = k, mp = k, mm = k;
      pp[i] += e, pp[j] += e;
      pm[i] += e, pm[j] -= e;
      mp[i] -= e, mp[j] += e;
      mm[i] -= e, mm[j] -= e;
      const double fd = (w3(pp) - w3(pm) - w3(mp) + w3(mm)) / (4 * e * e);
      EXPECT_NEAR(h[i][j], fd, 1e-6);
    }
}

TEST(CoherentState, AliasingGuard) {
  const auto grid = make_grid_ptr(64, 10.0);  // nyquist ~ 20.1
  EXPECT_NO_THROW(coherent_state({0.0, 10.0, 1.0}, grid));
  EXPECT_THROW(coherent_state({0.0, 17.0, 1.0}, grid), guard_error);
  EXPECT_THROW(coherent_state({0.0, 0.0, 0.0}, grid), std::invalid_argument);
}

TEST(Propagation, PreservesNormAndMomentumDensity) {
  const auto grid = make_grid_ptr(512, 100.0);
  const auto w0 = coherent_state({-5.0, 1.0, 1.5}, grid);
  const DispersionModel m;
  for (double t : {0.5, 3.0, 12.0}) {
    for (auto p : {Propagator::exact, Propagator::taylor}) {
      const auto w = propagate(w0, t, m, p);
      EXPECT_NEAR(w.norm_x(), 1.0, 1e-12);
      for (std::size_t j = 0; j < grid->n; ++j) ASSERT_NEAR(std::norm(w.amp_k()[j]), std::norm(w0.amp_k()[j]), 1e-13);
    }
  }
}

TEST(Propagation, CenterMovesAtGroupVelocity) {
  const auto grid = make_grid_ptr(1024, 200.0);
  const DispersionModel m;
  const auto w0 = coherent_state({-40.0, 1.0, 4.0}, grid);
  const double t = 30.0;
  // <x>(t) = <x>(0) + t <v_g(k)> exactly under a free dispersion relation
  const auto rk = momentum_density(w0);
  double mean_vg = 0.0;
  for (std::size_t j = 0; j < grid->n; ++j) mean_vg += rk.values[j] * group_velocity(grid->momenta[j], m);
  mean_vg *= rk.weight;
  const auto mx = moments(position_density(propagate_exact(w0, t, m)), grid->positions);
  EXPECT_NEAR(mx.mean, -40.0 + mean_vg * t, 1e-8);
  EXPECT_LT(mean_vg, group_velocity(1.0, m));
  const auto tx = moments(position_density(propagate_taylor(w0, t, m, 1.0)), grid->positions);
  EXPECT_NEAR(tx.mean, -40.0 + group_velocity(1.0, m) * t, 1e-8);
  EXPECT_NEAR(tx.variance, 0.5 * (4.0 + std::pow(hessian(1.0, m) * t, 2) / 4.0), 1e-8);
}

TEST(Propagation, TaylorAgreesWithExactForShortTimes) {
  const auto grid = make_grid_ptr(512, 60.0);
  const DispersionModel m;
  const auto w0 = coherent_state({0.0, 0.5, 2.0}, grid);
  const auto a = propagate_exact(w0, 0.2, m);
  const auto b = propagate_taylor(w0, 0.2, m, 0.5);
  EXPECT_GT(std::abs(inner_product(a, b)), 1.0 - 1e-4);
}

TEST(Propagation, ExactIsAGroup) {
  const auto grid = make_grid_ptr(256, 50.0);
  const DispersionModel m{1.0, 0.7};
  const auto w0 = coherent_state({2.0, -0.3, 1.0}, grid);
  const auto a = propagate_exact(propagate_exact(w0, 1.3, m), 2.2, m);
  const auto b = propagate_exact(w0, 3.5, m);
  const auto back = propagate_exact(b, -3.5, m);
  for (std::size_t j = 0; j < grid->n; ++j) {
    EXPECT_LT(std::abs(a.amp_x()[j] - b.amp_x()[j]), 1e-12);
    EXPECT_LT(std::abs(back.amp_x()[j] - w0.amp_x()[j]), 1e-12);
  }
}

TEST(Propagation, ConjugationReversesTime) {
  const auto grid = make_grid_ptr(256, 50.0);
  const DispersionModel m;
  const auto w0 = coherent_state({1.0, 0.4, 1.0}, grid);
  const double T = 4.0, t = 1.5;
  const auto lhs = propagate_exact(conjugate(propagate_exact(w0, T, m)), t, m);
  const auto rhs = conjugate(propagate_exact(w0, T - t, m));
  for (std::size_t j = 0; j < grid->n; ++j) EXPECT_LT(std::abs(lhs.amp_x()[j] - rhs.amp_x()[j]), 1e-12);
}

TEST(Propagation, FreeEntropyMatchesClosedFormUnderTaylor) {
  const auto grid = make_grid_ptr(1024, 100.0);
  const DispersionModel m;
  const auto w0 = coherent_state({0.0, 0.0, 1.0}, grid);
  for (double t : {0.0, 1.0, 4.0}) {
    const auto e = phase_space_entropy(propagate_taylor(w0, t, m, 0.0));
    EXPECT_NEAR(e.total, gaussian_entropy_closed_form(1.0, 1.0, t), 1e-6);
  }
}
