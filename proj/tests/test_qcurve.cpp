#include "oracles.hpp"
#include "qlab/qcurve.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qlab;

namespace {

std::vector<double> ramp(std::size_t n, double slope) {
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = 1.0 + slope * static_cast<double>(j);
  return v;
}

}  // namespace

TEST(Classify, SyntheticShapes) {
  EXPECT_EQ(classify(std::vector<double>(10, 2.5)).kind, Block::C);
  EXPECT_EQ(classify(ramp(10, 0.1)).kind, Block::I);
  EXPECT_EQ(classify(ramp(10, -0.1)).kind, Block::D);
  std::vector<double> osc(20);
  for (std::size_t j = 0; j < osc.size(); ++j) osc[j] = std::sin(0.7 * static_cast<double>(j));
  EXPECT_EQ(classify(osc).kind, Block::O);
}

TEST(Classify, SubToleranceWigglesAreConstant) {
  std::vector<double> v(16, 1.0);
  for (std::size_t j = 0; j < v.size(); ++j) v[j] += (j % 2 ? 4e-7 : -4e-7);
  const auto b = classify(v);
  EXPECT_EQ(b.kind, Block::C);
  EXPECT_NEAR(b.range, 8e-7, 1e-15);
}

TEST(Classify, PlateauWithNoiseStillIncreasing) {
  auto v = ramp(12, 0.01);
  v[5] -= 5e-7;  // dip smaller than eps
  EXPECT_EQ(classify(v).kind, Block::I);
  v[5] -= 0.05;
  EXPECT_EQ(classify(v).kind, Block::O);
}

TEST(Classify, EvidenceAndEpsilon) {
  const auto b = classify(ramp(10, 0.5), 1e-6);
  EXPECT_NEAR(b.max_rise, 0.5, 1e-15);
  EXPECT_NEAR(b.max_fall, -0.5, 1e-15);
  EXPECT_NEAR(b.range, 4.5, 1e-15);
  EXPECT_EQ(classify(ramp(10, 0.5), 10.0).kind, Block::C);
}

TEST(Classify, RejectsShortOrNonFinite) {
  EXPECT_THROW(classify(ramp(7, 1.0)), std::invalid_argument);
  auto v = ramp(9, 1.0);
  v[3] = std::nan("");
  EXPECT_THROW(classify(v), std::invalid_argument);
}

TEST(Classify, ReversalSwapsIncreasingAndDecreasing) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> step(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v{0.0};
    for (int j = 0; j < 15; ++j) v.push_back(v.back() + step(rng) - 0.3);
    std::vector<double> r(v.rbegin(), v.rend());
    const auto a = classify(v).kind;
    const auto b = classify(r).kind;
    const Block want = a == Block::I ? Block::D : a == Block::D ? Block::I : a;
    EXPECT_EQ(b, want);
  }
}

TEST(Series, SampleTimesAndPush) {
  const auto t = sample_times(0.0, 2.0, 5);
  EXPECT_EQ(t, (std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0}));
  EntropySeries s;
  s.push(0.0, 1.0, 2.0);
  EXPECT_DOUBLE_EQ(s.values.front(), 3.0);
  EXPECT_THROW(s.push(0.0, 1.0, 1.0), std::invalid_argument);
}

TEST(Series, OnsetAndDrop) {
  EntropySeries s;
  const double v[] = {1.0, 2.0, 3.0, 2.5, 2.7, 3.5, 3.4, 4.0};
  for (int j = 0; j < 8; ++j) s.push(j, v[j], 0.0);
  ASSERT_TRUE(decrease_onset(s).has_value());
  EXPECT_DOUBLE_EQ(*decrease_onset(s), 2.0);
  EXPECT_NEAR(max_drop_below_running_max(s), 0.5, 1e-15);
  EntropySeries inc;
  for (int j = 0; j < 8; ++j) inc.push(j, j, 0.0);
  EXPECT_FALSE(decrease_onset(inc).has_value());
  EXPECT_EQ(max_drop_below_running_max(inc), 0.0);
}

TEST(QCurve, FreePacketIsIncreasingWithConstantMomentumEntropy) {
  const auto grid = make_grid_ptr(1024, 100.0);
  const QCurve q{FreeEvolution{coherent_state({0.0, 0.0, 1.0}, grid), {}, Propagator::exact}, 0.0, 10.0, 21};
  const auto s = sample_entropy_series(q);
  EXPECT_EQ(classify(s).kind, Block::I);
  for (double v : s.s_k) EXPECT_NEAR(v, s.s_k.front(), 1e-12);
  EXPECT_EQ(s.meta.front().second, "exact");
}

TEST(QCurve, ConjugatedCurveMirrorsCoherentCurve) {
  const auto grid = make_grid_ptr(1024, 100.0);
  const DispersionModel m;
  const double T = 6.0;
  const CoherentStateParams p{0.0, 0.5, 1.0};
  const auto inc = sample_entropy_series(QCurve{FreeEvolution{coherent_state(p, grid), m}, 0.0, T, 25});
  const auto dec = sample_entropy_series(make_decreasing_from_coherent(p, m, T, grid, 25));
  EXPECT_EQ(classify(dec).kind, Block::D);
  for (std::size_t j = 0; j < 25; ++j) EXPECT_NEAR(dec.values[j], inc.values[24 - j], 1e-9);
}

TEST(QCurve, FiniteLevelEigenstateIsConstant) {
  const auto grid = make_grid_ptr(256, 40.0);
  std::mt19937_64 rng(1);
  const MultiLevelSystem sys(oracle::random_symmetric(4, rng));
  std::vector<cplx> c0(4);
  for (std::size_t k = 0; k < 4; ++k) c0[k] = sys.eigenvectors()(2, k);
  const QCurve q{FiniteLevelEvolution{c0, sys, oscillator_basis(grid, 4)}, 0.0, 15.0, 16};
  const auto b = classify(sample_entropy_series(q));
  EXPECT_EQ(b.kind, Block::C);
  EXPECT_LT(b.range, 1e-10);
}

TEST(QCurve, FiniteLevelDimensionMismatch) {
  const auto grid = make_grid_ptr(64, 20.0);
  const MultiLevelSystem sys(Matrix::identity(3));
  const QCurve q{FiniteLevelEvolution{std::vector<cplx>(2), sys, oscillator_basis(grid, 3)}, 0.0, 1.0, 8};
  EXPECT_THROW(sample_entropy_series(q), std::invalid_argument);
}

TEST(QCurve, TooFewSamples) {
  const auto grid = make_grid_ptr(64, 20.0);
  const QCurve q{FreeEvolution{coherent_state({}, grid)}, 0.0, 1.0, 5};
  EXPECT_THROW(sample_entropy_series(q), std::invalid_argument);
}

TEST(QCurve, PairEvolutionMatchesDirectEntropy) {
  const auto grid = make_grid_ptr(128, 60.0);
  const auto a = coherent_state({-10.0, 1.0, 1.0}, grid);
  const auto b = coherent_state({10.0, -1.0, 1.0}, grid);
  const QCurve q{PairEvolution{a, b, Statistics::fermion, {}}, 0.0, 4.0, 8};
  const auto s = sample_entropy_series(q);
  const DispersionModel m;
  const auto ref = two_particle_entropy(make_two_particle(propagate_exact(a, 4.0, m), propagate_exact(b, 4.0, m),
                                                          Statistics::fermion));
  EXPECT_NEAR(s.values.back(), ref.total, 1e-12);
}

TEST(QCurve, DecreasingConstructionGuards) {
  const auto grid = make_grid_ptr(256, 40.0);
  EXPECT_THROW(make_decreasing_from_coherent({0.0, 0.0, 1.0}, {}, 0.0, grid), std::invalid_argument);
  EXPECT_THROW(make_decreasing_from_coherent({0.0, 0.0, 1.0}, {}, 200.0, grid), guard_error);
}
