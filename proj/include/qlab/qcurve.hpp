#pragma once

// QCurves (initial state, evolution, time interval), their sampled entropy
// series, and classification into constant / increasing / decreasing /
// oscillating blocks.

#include "qlab/dispersion.hpp"
#include "qlab/entropy.hpp"
#include "qlab/series.hpp"
#include "qlab/transitions.hpp"
#include "qlab/twoparticle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace qlab {

// A single particle under the free dispersion relation.
struct FreeEvolution {
  WaveFunction initial;
  DispersionModel model{};
  Propagator propagator = Propagator::exact;
};

// A superposition of basis functions under a finite-level H'.
struct FiniteLevelEvolution {
  std::vector<cplx> initial;  // coefficients over basis
  MultiLevelSystem system;
  std::vector<WaveFunction> basis;
};

// Two free particles with exchange statistics.
struct PairEvolution {
  WaveFunction psi1;
  WaveFunction psi2;
  Statistics stats = Statistics::fermion;
  DispersionModel model{};
};

struct QCurve {
  std::variant<FreeEvolution, FiniteLevelEvolution, PairEvolution> evolution;
  double t0 = 0.0;
  double t1 = 1.0;
  std::size_t n_samples = 64;
};

/// Entropy of the curve's state at time t (measured from t0 = 0 of the evolution).
inline EntropyValue entropy_at(const QCurve& q, double t) {
  return std::visit(
      [t](const auto& ev) -> EntropyValue {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, FreeEvolution>) {
          return phase_space_entropy(propagate(ev.initial, t, ev.model, ev.propagator));
        } else if constexpr (std::is_same_v<T, FiniteLevelEvolution>) {
          const auto c = evolve_coefficients(ev.system, ev.initial, t);
          return phase_space_entropy(superpose(ev.basis, c));
        } else {
          return two_particle_entropy(make_two_particle(propagate_exact(ev.psi1, t, ev.model),
                                                        propagate_exact(ev.psi2, t, ev.model), ev.stats));
        }
      },
      q.evolution);
}

inline EntropySeries sample_entropy_series(const QCurve& q) {
  if (q.n_samples < 8) throw std::invalid_argument("a QCurve needs at least 8 samples");
  if (const auto* fl = std::get_if<FiniteLevelEvolution>(&q.evolution)) {
    if (fl->initial.size() != fl->system.dim() || fl->basis.size() != fl->system.dim())
      throw std::invalid_argument("finite-level state, system and basis dimensions differ");
  }
  EntropySeries s;
  for (double t : sample_times(q.t0, q.t1, q.n_samples)) {
    const auto e = entropy_at(q, t);
    s.push(t, e.s_r, e.s_k);
  }
  std::visit(
      [&s](const auto& ev) {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, FreeEvolution>)
          s.meta.emplace_back("propagator", to_string(ev.propagator));
        else if constexpr (std::is_same_v<T, FiniteLevelEvolution>)
          s.meta.emplace_back("propagator", "finite-level");
        else
          s.meta.emplace_back("propagator", "exact");
      },
      q.evolution);
  return s;
}

enum class Block { C, I, D, O };

inline const char* to_string(Block b) {
  switch (b) {
    case Block::C: return "C";
    case Block::I: return "I";
    case Block::D: return "D";
    case Block::O: return "O";
  }
  return "?";
}

struct BlockLabel {
  Block kind = Block::C;
  double max_rise = 0.0;  // largest forward difference
  double max_fall = 0.0;  // largest backward drop, as a positive number
  double range = 0.0;     // max - min
};

inline constexpr double kDefaultClassifyEps = 1e-6;

/// Constant if the range is below eps; increasing if no step falls by eps or
/// more; decreasing if no step rises by eps or more; otherwise oscillating.
inline BlockLabel classify(std::span<const double> values, double eps = kDefaultClassifyEps) {
  if (values.size() < 8) throw std::invalid_argument("series too short to classify (need >= 8 samples)");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("series contains a non-finite value");
  BlockLabel b;
  b.max_rise = -std::numeric_limits<double>::infinity();
  b.max_fall = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < values.size(); ++j) {
    const double d = values[j + 1] - values[j];
    b.max_rise = std::max(b.max_rise, d);
    b.max_fall = std::max(b.max_fall, -d);
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  b.range = *hi - *lo;

  if (b.range < eps)
    b.kind = Block::C;
  else if (b.max_fall < eps)  // every d_j > -eps
    b.kind = Block::I;
  else if (b.max_rise < eps)  // every d_j < eps
    b.kind = Block::D;
  else
    b.kind = Block::O;
  return b;
}

inline BlockLabel classify(const EntropySeries& s, double eps = kDefaultClassifyEps) { return classify(s.values, eps); }

/// Time of the last sample before the first step that falls by more than eps,
/// i.e. where the entropy stops increasing. Empty if it never falls.
inline std::optional<double> decrease_onset(const EntropySeries& s, double eps = kDefaultClassifyEps) {
  for (std::size_t j = 0; j + 1 < s.size(); ++j)
    if (s.values[j + 1] < s.values[j] - eps) return s.times[j];
  return std::nullopt;
}

/// Largest amount by which the series falls below its own running maximum.
inline double max_drop_below_running_max(const EntropySeries& s) {
  double runmax = -std::numeric_limits<double>::infinity();
  double drop = 0.0;
  for (double v : s.values) {
    runmax = std::max(runmax, v);
    drop = std::max(drop, runmax - v);
  }
  return drop;
}

/// Evolves a coherent packet to T, conjugates it, and returns the curve of the
/// conjugated state over [0, T]. Its entropy retraces the coherent curve backwards.
inline QCurve make_decreasing_from_coherent(const CoherentStateParams& params, const DispersionModel& model, double T,
                                            const GridPtr& grid, std::size_t n_samples = 64) {
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
  model.validate();
  const auto start = coherent_state(params, grid);
  for (double t : sample_times(0.0, T, 8)) check_in_domain(propagate_exact(start, t, model), t);
  auto flipped = conjugate(propagate_exact(start, T, model));
  return QCurve{FreeEvolution{std::move(flipped), model, Propagator::exact}, 0.0, T, n_samples};
}

}  // namespace qlab
