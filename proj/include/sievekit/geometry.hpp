#pragma once

// Spherical cap and wedge geometry on S^(d-1), residual decompositions, and
// the Monte-Carlo validators for the asymptotic volume formulas.

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "sievekit/common.hpp"

namespace sievekit::geometry {

// Per-dimension log2 of the relative volume of a cap of angle alpha:
// vol(H_{v,alpha}) / vol(S^(d-1)) = poly(d) * sin(alpha)^d.
// Valid for alpha in (0, pi/2].
inline LogRatio cap_ratio_log(Angle alpha) {
  if (!(alpha.rad > 0.0) || alpha.rad > std::numbers::pi / 2 + 1e-12)
    throw std::domain_error("cap_ratio_log: alpha must be in (0, pi/2]");
  return LogRatio{std::log2(std::sin(alpha.rad))};
}

// Per-dimension log2 of the relative volume of the intersection of two caps
// of angle alpha whose centers are at angle theta:
// poly(d) * (1 - 2cos^2(alpha)/(1+cos(theta)))^(d/2).
inline LogRatio wedge_ratio_log(Angle alpha, Angle theta) {
  if (!(alpha.rad > 0.0) || alpha.rad > std::numbers::pi / 2 + 1e-12)
    throw std::domain_error("wedge_ratio_log: alpha must be in (0, pi/2]");
  if (!(theta.rad >= 0.0) || theta.rad >= std::numbers::pi)
    throw std::domain_error("wedge_ratio_log: theta must be in [0, pi)");
  double ca = std::cos(alpha.rad);
  double base = 1.0 - 2.0 * ca * ca / (1.0 + std::cos(theta.rad));
  if (!(base > 0.0)) throw std::domain_error("wedge_ratio_log: empty wedge (base <= 0)");
  return LogRatio{0.5 * std::log2(base)};
}

// Angle threshold theta*_alpha = 2*arcsin(1/(2 sin alpha)): two unit residuals
// within a cap of angle alpha yield a reduced difference exactly when their
// angle is at most theta*_alpha. Requires alpha in [pi/3, pi/2].
inline Angle theta_star(Angle alpha) {
  if (alpha.rad < std::numbers::pi / 3 - 1e-12 || alpha.rad > std::numbers::pi / 2 + 1e-12)
    throw std::domain_error("theta_star: alpha must be in [pi/3, pi/2]");
  return Angle{2.0 * std::asin(1.0 / (2.0 * std::sin(alpha.rad)))};
}

inline Angle angle_between(const SpherePoint& a, const SpherePoint& b) {
  check_dim(a, b);
  return Angle{std::acos(clamp_unit(dot(a.coords, b.coords)))};
}

struct Residual {
  Angle alpha;    // angle between x and s
  SpherePoint y;  // unit vector orthogonal to s with x = cos(alpha) s + sin(alpha) y
};

// Decomposes x against a cap center s. Rejects x = +-s (no defined residual
// direction); x orthogonal to s gives alpha = pi/2 and y = x.
inline Residual residual_decompose(const SpherePoint& x, const SpherePoint& s) {
  check_dim(x, s);
  double c = clamp_unit(dot(x.coords, s.coords));
  double sn = std::sqrt(std::max(0.0, 1.0 - c * c));
  if (sn < 1e-9) throw std::domain_error("residual_decompose: x is parallel to s");
  std::vector<double> y(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) y[i] = (x.coords[i] - c * s.coords[i]) / sn;
  // renormalize: the subtraction above loses a few bits when alpha is small
  double yn = norm(y);
  for (auto& v : y) v /= yn;
  return Residual{Angle{std::acos(c)}, SpherePoint{std::move(y)}};
}

inline SpherePoint sample_sphere(std::size_t d, Rng& rng) {
  if (d < 2) throw std::invalid_argument("sample_sphere: d must be >= 2");
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(d);
  double n = 0.0;
  do {
    for (auto& v : x) v = gauss(rng);
    n = norm(x);
  } while (n < 1e-12);
  for (auto& v : x) v /= n;
  return SpherePoint{std::move(x)};
}

// Uniform point on the border of the cap: exactly at angle alpha from s.
inline SpherePoint sample_cap_border(const SpherePoint& s, Angle alpha, Rng& rng) {
  if (!(alpha.rad > 0.0) || !(alpha.rad < std::numbers::pi))
    throw std::domain_error("sample_cap_border: alpha must be in (0, pi)");
  SpherePoint g = sample_sphere(s.dim(), rng);
  double c = dot(g.coords, s.coords);
  std::vector<double> y(s.dim());
  for (std::size_t i = 0; i < s.dim(); ++i) y[i] = g.coords[i] - c * s.coords[i];
  double yn = norm(y);
  if (yn < 1e-12) return sample_cap_border(s, alpha, rng);
  double ca = std::cos(alpha.rad), sa = std::sin(alpha.rad);
  std::vector<double> x(s.dim());
  for (std::size_t i = 0; i < s.dim(); ++i) x[i] = ca * s.coords[i] + sa * y[i] / yn;
  return SpherePoint{std::move(x)};
}

// Uniform point inside the cap, by rejection from the full sphere. Intended
// for the obtuse angles this toolkit works at (cap mass >= ~1e-4 at desk
// dimensions); gives up after max_tries rejections.
inline SpherePoint sample_cap_uniform(const SpherePoint& s, Angle alpha, Rng& rng,
                                      std::size_t max_tries = 1u << 20) {
  if (!(alpha.rad > 0.0) || alpha.rad > std::numbers::pi / 2 + 1e-12)
    throw std::domain_error("sample_cap_uniform: alpha must be in (0, pi/2]");
  double ca = std::cos(alpha.rad);
  for (std::size_t t = 0; t < max_tries; ++t) {
    SpherePoint x = sample_sphere(s.dim(), rng);
    if (dot(x.coords, s.coords) >= ca) return x;
  }
  throw std::runtime_error("sample_cap_uniform: rejection budget exhausted");
}

// Exact relative cap mass at a concrete dimension: the sin^(d-2) surface
// integral by composite Simpson quadrature, so concrete instantiations can
// be calibrated without the poly(d) slack of the per-dimension formula.
// Valid for alpha in (0, pi].
inline double cap_mass(std::size_t d, Angle alpha) {
  if (d < 2) throw std::domain_error("cap_mass: d must be >= 2");
  if (!(alpha.rad > 0.0) || alpha.rad > std::numbers::pi + 1e-12)
    throw std::domain_error("cap_mass: alpha must be in (0, pi]");
  auto f = [&](double t) { return std::pow(std::sin(t), static_cast<double>(d - 2)); };
  auto simpson = [&](double hi) {
    std::size_t n = 16384;
    double h = hi / static_cast<double>(n);
    double s = f(0.0) + f(hi);
    for (std::size_t i = 1; i < n; ++i) s += f(h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
  };
  return simpson(std::min(alpha.rad, std::numbers::pi)) / simpson(std::numbers::pi);
}

// Cap angle whose exact mass at dimension d equals the target.
inline Angle cap_angle_for_mass(std::size_t d, double mass) {
  if (!(mass > 0.0) || mass > 1.0) throw std::domain_error("cap_angle_for_mass: mass in (0, 1]");
  double lo = 1e-9, hi = std::numbers::pi;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    (cap_mass(d, Angle{mid}) < mass ? lo : hi) = mid;
  }
  return Angle{0.5 * (lo + hi)};
}

// Empirical cap volume ratio at a concrete dimension (binomial std error).
inline McEstimate mc_cap_ratio(std::size_t d, Angle alpha, std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("mc_cap_ratio: n must be positive");
  double ca = std::cos(alpha.rad);
  std::size_t hits = 0;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    double nr = 0.0;
    for (auto& v : x) {
      v = gauss(rng);
      nr += v * v;
    }
    // center e_1 by symmetry
    if (x[0] >= ca * std::sqrt(nr)) ++hits;
  }
  double p = static_cast<double>(hits) / static_cast<double>(n);
  return McEstimate{p, std::sqrt(std::max(p * (1.0 - p), 1.0 / n) / n), n};
}

// Empirical wedge volume ratio: centers e_1 and cos(theta) e_1 + sin(theta) e_2.
inline McEstimate mc_wedge_ratio(std::size_t d, Angle alpha, Angle theta, std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("mc_wedge_ratio: n must be positive");
  if (d < 2) throw std::invalid_argument("mc_wedge_ratio: d must be >= 2");
  double ca = std::cos(alpha.rad);
  double ct = std::cos(theta.rad), st = std::sin(theta.rad);
  std::size_t hits = 0;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    double nr = 0.0;
    for (auto& v : x) {
      v = gauss(rng);
      nr += v * v;
    }
    double sc = ca * std::sqrt(nr);
    if (x[0] >= sc && ct * x[0] + st * x[1] >= sc) ++hits;
  }
  double p = static_cast<double>(hits) / static_cast<double>(n);
  return McEstimate{p, std::sqrt(std::max(p * (1.0 - p), 1.0 / n) / n), n};
}

}  // namespace sievekit::geometry
