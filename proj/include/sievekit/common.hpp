#pragma once

// Shared scalar types, vector helpers and RNG plumbing used by every module.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sievekit {

// All asymptotic exponents are expressed base-N with N = (4/3)^(d/2).
// Converting a base-N exponent x to a per-dimension base-2 exponent
// multiplies by (1/2)*log2(4/3).
inline constexpr double kLog2FourThirds = 0.4150374992788438;
inline constexpr double kHalfLog2FourThirds = 0.2075187496394219;

// List-size scale N for a concrete dimension.
inline double list_scale(std::size_t d) {
  return std::pow(4.0 / 3.0, static_cast<double>(d) / 2.0);
}

// Non-oriented angle in radians, [0, pi].
struct Angle {
  double rad = 0.0;
};

// Per-dimension base-2 log of a volume ratio: ratio = 2^(value*d) up to poly(d).
struct LogRatio {
  double value = 0.0;
};

// Unit vector on S^(d-1).
struct SpherePoint {
  std::vector<double> coords;

  std::size_t dim() const { return coords.size(); }
};

struct McEstimate {
  double value = 0.0;
  double std_err = 0.0;
  std::size_t samples = 0;
};

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derive an independent stream from a base seed and a stable key. Parallel
// callers own their streams, keyed by work item, so results do not depend on
// the worker count.
inline Rng derive_rng(std::uint64_t seed, std::uint64_t key0, std::uint64_t key1 = 0) {
  return Rng(splitmix64(splitmix64(seed ^ 0x5eedULL) ^ splitmix64(key0)) ^ splitmix64(key1 * 0x9e37ULL + 1));
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline double clamp_unit(double x) { return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x); }

inline void check_dim(const SpherePoint& a, const SpherePoint& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("sphere points of different dimension");
}

inline SpherePoint make_sphere_point(std::vector<double> coords) {
  double n = norm(coords);
  if (!(std::abs(n - 1.0) <= 1e-9)) throw std::invalid_argument("sphere point must be unit norm");
  return SpherePoint{std::move(coords)};
}

inline std::size_t resolve_threads(int requested) {
  if (requested > 0) return static_cast<std::size_t>(requested);
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn(begin, end) over disjoint chunks of [0, n). Chunk boundaries depend
// only on n and the thread count; callers merge per-chunk results in chunk
// order to stay deterministic.
template <class Fn>
void parallel_chunks(std::size_t n, std::size_t threads, Fn&& fn) {
  if (n == 0) return;
  std::size_t t = threads == 0 ? 1 : std::min(threads, n);
  if (t <= 1) {
    fn(std::size_t{0}, n, std::size_t{0});
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  std::size_t chunk = (n + t - 1) / t;
  for (std::size_t w = 0; w < t; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, w, &fn] { fn(lo, hi, w); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace sievekit
