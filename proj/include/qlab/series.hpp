#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qlab {

// Sampled entropy evolution. values holds the total; s_r / s_k the parts.
struct EntropySeries {
  std::vector<double> times;
  std::vector<double> s_r;
  std::vector<double> s_k;
  std::vector<double> values;
  std::vector<std::pair<std::string, std::string>> meta;

  std::size_t size() const { return times.size(); }

  void push(double t, double sr, double sk) {
    if (!times.empty() && !(t > times.back())) throw std::invalid_argument("series times must be strictly ascending");
    times.push_back(t);
    s_r.push_back(sr);
    s_k.push_back(sk);
    values.push_back(sr + sk);
  }
};

/// n equally spaced samples covering [t0, t1] inclusive.
inline std::vector<double> sample_times(double t0, double t1, std::size_t n) {
  if (!(t1 > t0)) throw std::invalid_argument("time interval must satisfy t1 > t0");
  if (n < 2) throw std::invalid_argument("need at least two samples");
  std::vector<double> ts(n);
  const double dt = (t1 - t0) / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < n; ++j) ts[j] = t0 + dt * static_cast<double>(j);
  ts.back() = t1;
  return ts;
}

}  // namespace qlab
