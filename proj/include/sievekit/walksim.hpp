#pragma once

// Classical emulation of the walk's vertex data structure: member lists,
// per-filter inner buckets with capped visibility windows, and the marked
// bit. The walk itself is never executed (classically it confers no
// advantage); what is measured here is every data-structure claim the
// speedup rests on: setup/update work, candidate-set bounds, and the
// marked-vertex fraction epsilon.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sievekit/common.hpp"
#include "sievekit/costmodel.hpp"
#include "sievekit/geometry.hpp"
#include "sievekit/rpc.hpp"

namespace sievekit::walksim {

struct WalkConfig {
  double c = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double rho = 0.0;
  Angle alpha{0.0};       // outer filter angle (exponent calculus)
  Angle theta_star{0.0};  // reduction threshold for unit residuals
  Angle beta{0.0};        // inner filter angle (exponent calculus)
  double rho0 = 0.0;
};

// rho = 0 is the degenerate single-filter configuration (beta's cap covers
// everything); it also stands in for rho = rho0 when c1 = c2 forces rho0 = 0
inline WalkConfig make_walk_config(double c, double c1, double c2, double rho) {
  auto dp = costmodel::derive(c, c1, c2);
  if (!(rho >= 0.0) || rho > dp.rho0 + 1e-12)
    throw std::domain_error("rho must lie in [0, rho0]");
  return {c, c1, c2, rho, dp.alpha, dp.theta_star, dp.beta, dp.rho0};
}

// Concrete sizes at dimension d. Filter angles are re-calibrated through the
// exact cap integral so that expected counts hit their N-power targets at
// desk dimensions instead of drifting by poly(d) factors.
struct VertexShape {
  std::size_t vertex_size = 0;  // N^c1 members
  std::size_t code_words = 0;   // |C2| = N^(rho+c1-c2) inner filters
  std::size_t cap = 0;          // visibility window: first 2 N^c2 ids per filter
  std::size_t k_bound = 0;      // guard: no point may hit more than 2 N^rho filters
  Angle alpha_d{0.0};
  Angle beta_d{0.0};
  Angle theta_star_d{0.0};
};

inline VertexShape vertex_shape(const WalkConfig& cfg, std::size_t d) {
  if (d < 8) throw std::domain_error("vertex_shape: dimension too small");
  double n_log2 = static_cast<double>(d) * kHalfLog2FourThirds;
  auto count = [&](double e) {
    return static_cast<std::size_t>(std::max<long long>(1, std::llround(std::exp2(e * n_log2))));
  };
  VertexShape s;
  s.vertex_size = count(cfg.c1);
  s.code_words = count(cfg.rho + cfg.c1 - cfg.c2);
  // floor keeps |K(y)| <= 2 N^rho and |window| <= 2 N^c2 literal, so the
  // per-step candidate count is bounded by their product
  s.cap = static_cast<std::size_t>(
      std::max(1.0, std::floor(2.0 * std::exp2(cfg.c2 * n_log2))));
  s.k_bound = static_cast<std::size_t>(
      std::max(1.0, std::floor(2.0 * std::exp2(cfg.rho * n_log2))));
  s.alpha_d = geometry::cap_angle_for_mass(d, std::exp2(-(1.0 - cfg.c) * n_log2));
  s.beta_d = geometry::cap_angle_for_mass(
      d, std::min(1.0, std::exp2((cfg.c2 - cfg.c1) * n_log2)));
  double a = std::clamp(s.alpha_d.rad, std::numbers::pi / 3, std::numbers::pi / 2);
  s.theta_star_d = geometry::theta_star(Angle{a});
  return s;
}

struct WalkCounters {
  std::size_t setup_ops = 0;       // decode outputs written during builds
  std::size_t update_ops = 0;      // filter touches plus candidates scanned
  std::size_t check_ops = 0;       // pair angle tests
  std::size_t vertices_sampled = 0;
  std::size_t marked_count = 0;
};

struct WalkVertex {
  std::vector<std::size_t> members;  // ascending ids into the residual pool
  std::map<rpc::CodewordId, std::vector<std::size_t>> inner;  // ascending ids
  bool marked = false;

  friend bool operator==(const WalkVertex&, const WalkVertex&) = default;
};

namespace detail {

inline bool reduces(const std::vector<SpherePoint>& pool, std::size_t i, std::size_t j,
                    double cos_ts) {
  return dot(pool[i].coords, pool[j].coords) >= cos_ts;
}

// marked from scratch: some visibility window holds a reducing pair
inline bool scan_marked(const std::vector<SpherePoint>& pool, const WalkVertex& v,
                        std::size_t cap, double cos_ts, WalkCounters* counters) {
  for (const auto& [t, lst] : v.inner) {
    std::size_t w = std::min(cap, lst.size());
    for (std::size_t a = 0; a + 1 < w; ++a)
      for (std::size_t b = a + 1; b < w; ++b) {
        if (counters) ++counters->check_ops;
        if (reduces(pool, lst[a], lst[b], cos_ts)) return true;
      }
  }
  return false;
}

}  // namespace detail

// Inner code with the high-probability regularity made unconditional: any
// draw where some guarded point decodes to more than k_bound filters is
// thrown away and redrawn. The guard set is the points the vertex will
// index (its members, or the whole swap pool for an update walk).
inline rpc::RpcCode sample_inner_code(const std::vector<SpherePoint>& guard,
                                      const VertexShape& shape, Rng& rng,
                                      int max_attempts = 256) {
  if (guard.empty()) throw std::invalid_argument("empty guard set");
  std::size_t d = guard.front().dim();
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    auto code = rpc::sample_rpc(d, 1, shape.code_words, shape.beta_d, rng);
    bool ok = true;
    for (const auto& p : guard)
      if (rpc::decode_relevant(code, p).size() > shape.k_bound) {
        ok = false;
        break;
      }
    if (ok) return code;
  }
  throw std::runtime_error("inner-code guard kept rejecting draws");
}

inline WalkVertex build_vertex(const std::vector<SpherePoint>& pool,
                               std::vector<std::size_t> ids, const rpc::RpcCode& code2,
                               const VertexShape& shape, WalkCounters* counters = nullptr) {
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    throw std::invalid_argument("duplicate member ids");
  if (!ids.empty() && ids.back() >= pool.size())
    throw std::invalid_argument("member id out of range");
  WalkVertex v;
  v.members = std::move(ids);
  for (std::size_t id : v.members) {
    auto ts = rpc::decode_relevant(code2, pool[id]);
    if (counters) counters->setup_ops += ts.size();
    for (auto& t : ts) v.inner[std::move(t)].push_back(id);
  }
  v.marked =
      detail::scan_marked(pool, v, shape.cap, std::cos(shape.theta_star_d.rad), counters);
  if (counters) {
    ++counters->vertices_sampled;
    counters->marked_count += v.marked;
  }
  return v;
}

// One walk step: swap y_old out for y_new. Structure updates touch only the
// filters of the two points. The marked bit is maintained incrementally in
// the not-marked state: the only pairs that can become visible are those
// involving an element newly inside some touched visibility window (the
// inserted point, or an element exposed when a removal shifts a full
// window). A marked vertex is rescanned from scratch, since the witness
// pair may have left.
inline WalkVertex vertex_update(const WalkVertex& v, std::size_t y_old, std::size_t y_new,
                                const std::vector<SpherePoint>& pool, const rpc::RpcCode& code2,
                                const VertexShape& shape, WalkCounters* counters = nullptr) {
  auto mpos = std::lower_bound(v.members.begin(), v.members.end(), y_old);
  if (mpos == v.members.end() || *mpos != y_old)
    throw std::invalid_argument("y_old is not a member");
  if (std::binary_search(v.members.begin(), v.members.end(), y_new))
    throw std::invalid_argument("y_new is already a member");
  if (y_new >= pool.size()) throw std::invalid_argument("y_new out of range");

  WalkVertex w = v;
  w.members.erase(w.members.begin() + (mpos - v.members.begin()));
  w.members.insert(std::lower_bound(w.members.begin(), w.members.end(), y_new), y_new);

  auto k_old = rpc::decode_relevant(code2, pool[y_old]);
  auto k_new = rpc::decode_relevant(code2, pool[y_new]);
  if (counters) counters->update_ops += k_old.size() + k_new.size();

  std::vector<rpc::CodewordId> touched;
  for (const auto& t : k_old) {
    auto it = w.inner.find(t);
    if (it == w.inner.end())
      throw std::invalid_argument("vertex was built with a different inner code");
    auto& lst = it->second;
    auto p = std::lower_bound(lst.begin(), lst.end(), y_old);
    if (p == lst.end() || *p != y_old)
      throw std::invalid_argument("vertex was built with a different inner code");
    lst.erase(p);
    if (lst.empty())
      w.inner.erase(it);
    else
      touched.push_back(t);
  }
  for (const auto& t : k_new) {
    auto& lst = w.inner[t];
    lst.insert(std::lower_bound(lst.begin(), lst.end(), y_new), y_new);
    touched.push_back(t);
  }

  double cos_ts = std::cos(shape.theta_star_d.rad);
  if (v.marked) {
    w.marked = detail::scan_marked(pool, w, shape.cap, cos_ts, counters);
    return w;
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  bool hit = false;
  for (const auto& t : touched) {
    auto after_it = w.inner.find(t);
    if (after_it == w.inner.end()) continue;
    const auto& after = after_it->second;
    std::size_t wa = std::min(shape.cap, after.size());
    // window membership before the update (empty if the filter was new)
    auto before_it = v.inner.find(t);
    auto in_before = [&](std::size_t id) {
      if (before_it == v.inner.end()) return false;
      const auto& lst = before_it->second;
      std::size_t wb = std::min(shape.cap, lst.size());
      auto p = std::lower_bound(lst.begin(), lst.begin() + wb, id);
      return p != lst.begin() + wb && *p == id;
    };
    for (std::size_t a = 0; a < wa && !hit; ++a) {
      if (in_before(after[a])) continue;  // not newly visible here
      for (std::size_t b = 0; b < wa && !hit; ++b) {
        if (b == a) continue;
        if (counters) ++counters->update_ops;
        hit = detail::reduces(pool, after[a], after[b], cos_ts);
      }
    }
    if (hit) break;
  }
  w.marked = hit;
  return w;
}

// marked fraction over random vertices, each with a fresh code guarded
// against that vertex's own members
inline McEstimate estimate_epsilon(const std::vector<SpherePoint>& pool, const WalkConfig& cfg,
                                   std::size_t trials, Rng& rng,
                                   WalkCounters* counters = nullptr) {
  if (trials < 100) throw std::domain_error("estimate_epsilon: at least 100 trials");
  if (pool.empty()) throw std::domain_error("empty pool");
  std::size_t d = pool.front().dim();
  auto shape = vertex_shape(cfg, d);
  if (pool.size() < shape.vertex_size)
    throw std::domain_error("pool smaller than the vertex size");
  std::vector<std::size_t> all(pool.size());
  std::iota(all.begin(), all.end(), 0);
  std::size_t marked = 0;
  std::vector<SpherePoint> subset;
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<std::size_t> ids;
    ids.reserve(shape.vertex_size);
    std::sample(all.begin(), all.end(), std::back_inserter(ids), shape.vertex_size, rng);
    subset.clear();
    for (std::size_t id : ids) subset.push_back(pool[id]);
    auto code2 = sample_inner_code(subset, shape, rng);
    marked += build_vertex(pool, std::move(ids), code2, shape, counters).marked;
  }
  double p = static_cast<double>(marked) / static_cast<double>(trials);
  double se = std::sqrt(std::max(p * (1.0 - p), 1.0 / static_cast<double>(trials)) /
                        static_cast<double>(trials));
  return McEstimate{p, se, trials};
}

// Finite-dimension prediction for epsilon, all pieces measured on the pool:
// P(some of the C(n1,2) member pairs reduces) * P(a reducing pair shares at
// least one of the |C2| filters).
inline double epsilon_model(const std::vector<SpherePoint>& pool, const WalkConfig& cfg,
                            Rng& rng, std::size_t samples = 20000) {
  if (pool.size() < 2) return 0.0;
  std::size_t d = pool.front().dim();
  auto shape = vertex_shape(cfg, d);
  double cos_ts = std::cos(shape.theta_star_d.rad);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);

  std::vector<std::pair<std::size_t, std::size_t>> reducing;
  std::size_t red = 0;
  for (std::size_t t = 0; t < samples; ++t) {
    std::size_t i = pick(rng), j = pick(rng);
    while (j == i) j = pick(rng);
    if (detail::reduces(pool, i, j, cos_ts)) {
      ++red;
      if (reducing.size() < 512) reducing.emplace_back(i, j);
    }
  }
  double p_reduce = static_cast<double>(red) / static_cast<double>(samples);
  if (reducing.empty()) return 0.0;

  double cos_b = std::cos(shape.beta_d.rad);
  std::uniform_int_distribution<std::size_t> pick_pair(0, reducing.size() - 1);
  std::size_t shared = 0;
  for (std::size_t t = 0; t < samples; ++t) {
    auto [i, j] = reducing[pick_pair(rng)];
    auto c = geometry::sample_sphere(d, rng);
    if (dot(pool[i].coords, c.coords) >= cos_b && dot(pool[j].coords, c.coords) >= cos_b)
      ++shared;
  }
  double w_share = static_cast<double>(shared) / static_cast<double>(samples);
  double q = 1.0 - std::pow(1.0 - w_share, static_cast<double>(shape.code_words));
  double n1 = static_cast<double>(shape.vertex_size);
  return std::min(1.0, 0.5 * n1 * (n1 - 1.0) * p_reduce * q);
}

// spectral gap of the Johnson graph J(n, r)
inline double johnson_gap(std::size_t n, std::size_t r) {
  if (r < 1 || r >= n) throw std::domain_error("johnson_gap: need 1 <= r < n");
  return static_cast<double>(n) / (static_cast<double>(r) * static_cast<double>(n - r));
}

}  // namespace sievekit::walksim
