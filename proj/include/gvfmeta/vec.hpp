#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gvfmeta {

// Feature vectors are plain dense vectors of doubles. All math in this
// library is 64-bit so that golden-trace tests stay stable across platforms.
using FeatureVector = std::vector<double>;

// Misconfiguration (wrong dimensions, unknown ids, bad config files).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numeric contract was violated at runtime (NaN/Inf crossing a boundary,
// zero-probability behaviour action). The harness catches these per seed.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void check_dim(const FeatureVector& v, std::size_t expect, const char* where) {
  if (v.size() != expect) {
    throw config_error(std::string(where) + ": dimension mismatch, got " +
                       std::to_string(v.size()) + ", expected " + std::to_string(expect));
  }
}

inline void check_finite(const FeatureVector& v, const char* where) {
  for (double x : v) {
    if (!std::isfinite(x)) throw numeric_error(std::string(where) + ": non-finite entry");
  }
}

inline void check_finite(double x, const char* where) {
  if (!std::isfinite(x)) throw numeric_error(std::string(where) + ": non-finite value");
}

inline double dot(const FeatureVector& a, const FeatureVector& b) {
  if (a.size() != b.size()) throw config_error("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline std::size_t argmax(const FeatureVector& v) {
  if (v.empty()) throw config_error("argmax: empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;  // ties break to the lowest index
  }
  return best;
}

inline double max_value(const FeatureVector& v) { return v[argmax(v)]; }

inline double linf_norm(const FeatureVector& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace gvfmeta
