#pragma once

// Integer lattice bases with exact coefficient tracking: parsing, classical
// Gram-Schmidt, LLL reduction with a recorded unimodular transform, Klein's
// randomized nearest-plane sampler, and a proof-grade enumeration oracle.
//
// Every lattice point carries integer coordinates w.r.t. the basis it was
// built from; embeddings are recomputed from those coordinates, never
// drifted incrementally, so list vectors are genuine lattice vectors.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sievekit/common.hpp"

namespace sievekit::lattice {

using IntMatrix = std::vector<std::vector<std::int64_t>>;

struct Basis {
  std::size_t d = 0;
  IntMatrix rows;  // row i is basis vector b_i
};

// mu is lower-triangular with unit diagonal; bstar_norms[i] = |b*_i|.
struct GSO {
  std::vector<std::vector<double>> mu;
  std::vector<double> bstar_norms;
};

struct LatticePoint {
  std::vector<std::int64_t> coeffs;
  std::vector<double> embed;
  double norm = 0.0;
};

inline LatticePoint make_point(const Basis& b, std::vector<std::int64_t> coeffs) {
  if (coeffs.size() != b.d) throw std::invalid_argument("coefficient size mismatch");
  LatticePoint p;
  p.embed.assign(b.d, 0.0);
  for (std::size_t i = 0; i < b.d; ++i) {
    if (coeffs[i] == 0) continue;
    auto ci = static_cast<double>(coeffs[i]);
    for (std::size_t j = 0; j < b.d; ++j) p.embed[j] += ci * static_cast<double>(b.rows[i][j]);
  }
  double n2 = 0.0;
  for (double x : p.embed) n2 += x * x;
  p.norm = std::sqrt(n2);
  p.coeffs = std::move(coeffs);
  return p;
}

inline GSO gso(const Basis& b) {
  std::size_t d = b.d;
  if (d == 0 || b.rows.size() != d) throw std::invalid_argument("empty or malformed basis");
  std::vector<std::vector<double>> star(d, std::vector<double>(d));
  GSO g;
  g.mu.assign(d, std::vector<double>(d, 0.0));
  g.bstar_norms.assign(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    if (b.rows[i].size() != d) throw std::invalid_argument("basis is not square");
    double row_n2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      star[i][j] = static_cast<double>(b.rows[i][j]);
      row_n2 += star[i][j] * star[i][j];
    }
    for (std::size_t k = 0; k < i; ++k) {
      double num = 0.0;
      for (std::size_t j = 0; j < d; ++j) num += static_cast<double>(b.rows[i][j]) * star[k][j];
      double m = num / (g.bstar_norms[k] * g.bstar_norms[k]);
      g.mu[i][k] = m;
      for (std::size_t j = 0; j < d; ++j) star[i][j] -= m * star[k][j];
    }
    g.mu[i][i] = 1.0;
    double n2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) n2 += star[i][j] * star[i][j];
    if (!std::isfinite(n2)) throw std::runtime_error("Gram-Schmidt overflow");
    // a projected vector collapsing to numerical zero means dependent rows
    if (n2 <= 1e-16 * std::max(row_n2, 1.0)) throw std::domain_error("singular basis");
    g.bstar_norms[i] = std::sqrt(n2);
  }
  return g;
}

inline Basis parse_basis(const std::string& text) {
  Basis b;
  std::size_t i = 0, n = text.size();
  auto skip_ws = [&] {
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  if (i >= n || text[i] != '[') throw std::invalid_argument("expected '[' to open the matrix");
  ++i;
  for (;;) {
    skip_ws();
    if (i < n && text[i] == ']') {
      ++i;
      break;
    }
    if (i >= n || text[i] != '[') throw std::invalid_argument("expected '[' to open a row");
    ++i;
    std::vector<std::int64_t> row;
    for (;;) {
      skip_ws();
      if (i < n && text[i] == ']') {
        ++i;
        break;
      }
      if (i >= n) throw std::invalid_argument("unterminated row");
      std::size_t start = i;
      if (text[i] == '+' || text[i] == '-') ++i;
      while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (i == start || (i == start + 1 && !std::isdigit(static_cast<unsigned char>(text[start]))))
        throw std::invalid_argument("non-integer token in row");
      if (i < n && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != ']')
        throw std::invalid_argument("non-integer token in row");
      row.push_back(std::stoll(text.substr(start, i - start)));
    }
    b.rows.push_back(std::move(row));
  }
  skip_ws();
  if (i != n) throw std::invalid_argument("trailing characters after matrix");
  b.d = b.rows.size();
  if (b.d == 0) throw std::invalid_argument("empty matrix");
  for (const auto& r : b.rows)
    if (r.size() != b.d) throw std::invalid_argument("matrix is not square");
  try {
    gso(b);
  } catch (const std::domain_error&) {
    throw std::invalid_argument("singular matrix");
  }
  return b;
}

inline std::string write_basis(const Basis& b) {
  std::ostringstream os;
  os << '[';
  for (const auto& row : b.rows) {
    os << '[';
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) os << ' ';
      os << row[j];
    }
    os << ']';
  }
  os << ']';
  return os.str();
}

struct LllResult {
  Basis basis;
  IntMatrix transform;  // unimodular: basis.rows = transform * input rows
};

namespace detail {

// determinant of an integer matrix by partial-pivot elimination in long
// double; only used to confirm a transform is unimodular (|det| = 1), where
// a 0.5 absolute error margin suffices
inline double det_estimate(const IntMatrix& m) {
  std::size_t d = m.size();
  std::vector<std::vector<long double>> a(d, std::vector<long double>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) a[i][j] = static_cast<long double>(m[i][j]);
  long double det = 1.0L;
  for (std::size_t k = 0; k < d; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < d; ++i)
      if (std::fabs(static_cast<double>(a[i][k])) > std::fabs(static_cast<double>(a[piv][k]))) piv = i;
    if (a[piv][k] == 0.0L) return 0.0;
    if (piv != k) {
      std::swap(a[piv], a[k]);
      det = -det;
    }
    det *= a[k][k];
    for (std::size_t i = k + 1; i < d; ++i) {
      long double f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < d; ++j) a[i][j] -= f * a[k][j];
    }
  }
  return static_cast<double>(det);
}

}  // namespace detail

inline LllResult lll_reduce(const Basis& input, double delta = 0.99) {
  if (!(delta > 0.25 && delta < 1.0)) throw std::domain_error("delta must lie in (1/4, 1)");
  Basis b = input;
  gso(b);  // validates shape and independence up front
  std::size_t d = b.d;
  IntMatrix u(d, std::vector<std::int64_t>(d, 0));
  for (std::size_t i = 0; i < d; ++i) u[i][i] = 1;

  GSO g = gso(b);
  std::size_t k = 1;
  while (k < d) {
    // size-reduce row k; mu updates are exact under the row operation
    for (std::size_t jj = k; jj-- > 0;) {
      auto q = std::llround(g.mu[k][jj]);
      if (q != 0) {
        for (std::size_t l = 0; l < d; ++l) {
          b.rows[k][l] -= q * b.rows[jj][l];
          u[k][l] -= q * u[jj][l];
        }
        for (std::size_t l = 0; l <= jj; ++l) g.mu[k][l] -= static_cast<double>(q) * g.mu[jj][l];
      }
    }
    double bk = g.bstar_norms[k] * g.bstar_norms[k];
    double bk1 = g.bstar_norms[k - 1] * g.bstar_norms[k - 1];
    double m = g.mu[k][k - 1];
    if (bk >= (delta - m * m) * bk1) {
      ++k;
    } else {
      std::swap(b.rows[k], b.rows[k - 1]);
      std::swap(u[k], u[k - 1]);
      g = gso(b);
      k = (k > 1) ? k - 1 : 1;
    }
  }
  double det = detail::det_estimate(u);
  if (std::fabs(std::fabs(det) - 1.0) > 0.5) throw std::runtime_error("transform is not unimodular");
  return {std::move(b), std::move(u)};
}

// smallest sampler width with good smoothing after reduction
inline double klein_default_width(const GSO& g) {
  double mx = 0.0;
  for (double x : g.bstar_norms) mx = std::max(mx, x);
  std::size_t d = g.bstar_norms.size();
  return mx * std::sqrt(std::log(static_cast<double>(std::max<std::size_t>(d, 2)))) * 1.5;
}

namespace detail {

// discrete Gaussian on Z with density proportional to exp(-pi (x-c)^2 / s^2),
// by rejection from a uniform window wide enough to hold all but ~2^-40 mass
inline std::int64_t sample_z_gaussian(double c, double s, Rng& rng) {
  double t = s * 2.95 + 1.0;  // sqrt(ln 2^40 / pi) ~ 2.97
  auto lo = static_cast<std::int64_t>(std::floor(c - t));
  auto hi = static_cast<std::int64_t>(std::ceil(c + t));
  std::uniform_int_distribution<std::int64_t> pick(lo, hi);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (;;) {
    std::int64_t z = pick(rng);
    double dx = (static_cast<double>(z) - c) / s;
    if (coin(rng) <= std::exp(-std::numbers::pi * dx * dx)) return z;
  }
}

}  // namespace detail

// Klein's randomized nearest-plane sampler around the origin. Callers should
// keep s at or above klein_default_width for near-spherical output; smaller
// widths still sample lattice points, just with a basis-skewed law.
inline LatticePoint klein_sample(const Basis& b, const GSO& g, double s, Rng& rng) {
  if (!(s > 0.0)) throw std::domain_error("width must be positive");
  std::size_t d = b.d;
  std::vector<std::int64_t> x(d, 0);
  for (int attempt = 0; attempt < 64; ++attempt) {
    bool nonzero = false;
    for (std::size_t ii = d; ii-- > 0;) {
      double c = 0.0;
      for (std::size_t j = ii + 1; j < d; ++j) c -= static_cast<double>(x[j]) * g.mu[j][ii];
      x[ii] = detail::sample_z_gaussian(c, s / g.bstar_norms[ii], rng);
      nonzero = nonzero || x[ii] != 0;
    }
    if (nonzero) return make_point(b, x);
  }
  throw std::runtime_error("sampler kept returning the zero vector");
}

namespace detail {

inline __int128 exact_norm2(const Basis& b, const std::vector<std::int64_t>& coeffs) {
  std::size_t d = b.d;
  __int128 n2 = 0;
  for (std::size_t j = 0; j < d; ++j) {
    __int128 e = 0;
    for (std::size_t i = 0; i < d; ++i)
      e += static_cast<__int128>(coeffs[i]) * static_cast<__int128>(b.rows[i][j]);
    n2 += e * e;
  }
  return n2;
}

}  // namespace detail

// Exhaustive shortest-vector search (Fincke-Pohst order, no pruning beyond
// the running radius). Float partial norms carry a small slack so the true
// optimum is never cut; candidates are confirmed with exact integer norms.
inline LatticePoint enumerate_shortest(const Basis& b) {
  if (b.d > 45) throw std::domain_error("enumeration guard: dimension above 45");
  GSO g = gso(b);
  std::size_t d = b.d;

  double r2 = std::numeric_limits<double>::infinity();
  for (const auto& row : b.rows) {
    double n2 = 0.0;
    for (auto v : row) n2 += static_cast<double>(v) * static_cast<double>(v);
    r2 = std::min(r2, n2);
  }
  double bound = r2 * (1.0 + 1e-9);

  std::vector<std::int64_t> x(d, 0), best;
  __int128 best_n2 = 0;
  {
    // the shortest input row is the starting incumbent
    std::size_t arg = 0;
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d; ++i) {
      double n2 = 0.0;
      for (auto v : b.rows[i]) n2 += static_cast<double>(v) * static_cast<double>(v);
      if (n2 < mn) {
        mn = n2;
        arg = i;
      }
    }
    best.assign(d, 0);
    best[arg] = 1;
    best_n2 = detail::exact_norm2(b, best);
  }

  // depth-first over levels d-1 .. 0; partial[i] = squared norm of the
  // projection onto the last (d-i) Gram-Schmidt directions
  std::vector<double> partial(d + 1, 0.0);
  auto descend = [&](auto&& self, std::size_t lvl) -> void {
    std::size_t i = lvl - 1;
    double c = 0.0;
    for (std::size_t j = lvl; j < d; ++j) c -= static_cast<double>(x[j]) * g.mu[j][i];
    double w = g.bstar_norms[i] * g.bstar_norms[i];
    // zig-zag around the center, nearest first
    auto x0 = std::llround(c);
    for (std::int64_t step = 0;; ++step) {
      bool any = false;
      for (int sgn : {+1, -1}) {
        if (step == 0 && sgn < 0) continue;
        std::int64_t xi = x0 + sgn * step;
        double dx = static_cast<double>(xi) - c;
        double p = partial[lvl] + dx * dx * w;
        if (p > bound) continue;
        any = true;
        x[i] = xi;
        partial[i] = p;
        if (i == 0) {
          bool zero = true;
          for (auto v : x)
            if (v != 0) {
              zero = false;
              break;
            }
          if (zero) continue;
          __int128 n2 = detail::exact_norm2(b, x);
          if (n2 < best_n2) {
            best_n2 = n2;
            best = x;
            bound = static_cast<double>(n2) * (1.0 + 1e-9);
          }
        } else {
          self(self, i);
        }
      }
      // per side, |xi - c| grows monotonically with step, so once both
      // sides miss the radius every later step misses it too
      if (!any) break;
    }
    x[i] = 0;
  };
  descend(descend, d);
  return make_point(b, best);
}

inline Basis generate_random_basis(std::size_t d, unsigned bits, std::uint64_t seed) {
  if (d == 0 || d > 64) throw std::domain_error("dimension must lie in [1, 64]");
  if (bits == 0 || bits > 30) throw std::domain_error("entry width must lie in [1, 30] bits");
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng = derive_rng(seed, 0x9a5eull, attempt);
    std::uniform_int_distribution<std::int64_t> entry(0, (std::int64_t{1} << bits) - 1);
    Basis b;
    b.d = d;
    b.rows.assign(d, std::vector<std::int64_t>(d));
    for (auto& row : b.rows)
      for (auto& v : row) v = entry(rng);
    try {
      gso(b);
      return b;
    } catch (const std::domain_error&) {
      continue;  // vanishing-probability singular draw; redraw deterministically
    }
  }
}

}  // namespace sievekit::lattice
