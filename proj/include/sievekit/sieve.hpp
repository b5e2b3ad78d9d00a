#pragma once

// The sieve proper: bucket a list of lattice points by spherical filters
// drawn from random product codes, combine pairs inside each bucket into
// shorter vectors (exact integer coefficients, exact norm tests), and repeat
// with fresh codes until the list is refilled at the reduced radius. Full
// SVP solving iterates that step with a shrinking radius. Pair search inside
// a bucket is pluggable: exhaustive, or the two-level residual filtering
// whose walk-side costs the cost model prices.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "sievekit/common.hpp"
#include "sievekit/costmodel.hpp"
#include "sievekit/geometry.hpp"
#include "sievekit/lattice.hpp"
#include "sievekit/rpc.hpp"
#include "sievekit/walksim.hpp"

namespace sievekit::sieve {

enum class Strategy { AllPairs, TwoLevel };

struct SieveConfig {
  double c = 0.33;              // filter exponent: cap mass N^-(1-c)
  double gamma = 0.97;          // per-step radius shrink
  double saturation_mult = 6.0; // list size N' = saturation_mult * N
  Strategy strategy = Strategy::AllPairs;
  std::optional<walksim::WalkConfig> walk;  // required for TwoLevel
  std::uint64_t seed = 1;
  int max_rounds = 200;
  std::size_t max_codes = 0;  // fresh codes per step; 0 = from the repetition model
};

struct ReduciblePair {
  std::size_t i = 0;
  std::size_t j = 0;
  int sign = 1;  // result = bucket[i] + sign * bucket[j]
  lattice::LatticePoint result;
};

struct StepResult {
  std::vector<lattice::LatticePoint> points;  // sorted by (norm, coeffs)
  bool reached_target = false;
  std::size_t codes_used = 0;
  std::size_t pairs_tested = 0;
  std::size_t pairs_found = 0;  // distinct pair results accepted
  std::map<std::size_t, std::size_t> occupancy;  // bucket size -> bucket count
};

struct RunReport {
  std::size_t rounds = 0;
  std::vector<double> min_norms;     // per round; nonincreasing
  std::vector<double> median_norms;  // per round
  std::map<std::size_t, std::size_t> occupancy;
  std::size_t pairs_tested = 0;
  std::size_t pairs_found = 0;
  double wall_seconds = 0.0;
  std::vector<std::size_t> nb_rep;  // codes consumed per round
  bool saturated = true;            // false once any round misses its target
};

struct SolveResult {
  lattice::LatticePoint shortest;
  RunReport report;
};

namespace detail {

inline lattice::LatticePoint combine(const lattice::LatticePoint& a,
                                     const lattice::LatticePoint& b, int sign) {
  lattice::LatticePoint r;
  std::size_t n = a.coeffs.size(), d = a.embed.size();
  r.coeffs.resize(n);
  r.embed.resize(d);
  double s = static_cast<double>(sign);
  for (std::size_t k = 0; k < n; ++k) r.coeffs[k] = a.coeffs[k] + sign * b.coeffs[k];
  for (std::size_t k = 0; k < d; ++k) r.embed[k] = a.embed[k] + s * b.embed[k];
  r.norm = norm(r.embed);
  return r;
}

inline bool is_zero(const lattice::LatticePoint& p) {
  return std::all_of(p.coeffs.begin(), p.coeffs.end(),
                     [](std::int64_t c) { return c == 0; });
}

// v and -v are the same output: keep the sign making the first nonzero
// coefficient positive
inline void canonical_sign(lattice::LatticePoint& p) {
  for (std::int64_t c : p.coeffs) {
    if (c > 0) return;
    if (c < 0) {
      for (auto& x : p.coeffs) x = -x;
      for (auto& x : p.embed) x = -x;
      return;
    }
  }
}

// cap_angle_for_mass costs milliseconds (nested quadrature under bisection)
// and the sieve asks for the same handful of calibrations millions of times,
// so memoize across calls and threads
inline Angle calibrated_cap_angle(std::size_t d, double mass) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, double>, double> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({d, mass});
    if (it != cache.end()) return Angle{it->second};
  }
  Angle a = geometry::cap_angle_for_mass(d, mass);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(std::make_pair(d, mass), a.rad);
  return a;
}

inline void validate_config(const SieveConfig& cfg) {
  if (!(cfg.c > 0.0) || !(cfg.c < 1.0)) throw std::domain_error("c must be in (0,1)");
  if (!(cfg.gamma > 0.0) || !(cfg.gamma < 1.0))
    throw std::domain_error("gamma must be in (0,1)");
  if (!(cfg.saturation_mult >= 1.0))
    throw std::domain_error("saturation_mult must be at least 1");
  if (cfg.max_rounds < 1) throw std::domain_error("max_rounds must be positive");
  if (cfg.strategy == Strategy::TwoLevel) {
    if (!cfg.walk) throw std::invalid_argument("TwoLevel requires walk parameters");
    if (std::abs(cfg.walk->c - cfg.c) > 1e-9)
      throw std::invalid_argument("walk parameters were derived for a different c");
  }
}

}  // namespace detail

// Exhaustive pair scan: the completeness oracle every other strategy is
// judged against.
inline std::vector<ReduciblePair> find_all_solutions_allpairs(
    const std::vector<lattice::LatticePoint>& bucket, double limit,
    std::size_t* tested = nullptr) {
  std::vector<ReduciblePair> out;
  for (std::size_t i = 0; i + 1 < bucket.size(); ++i)
    for (std::size_t j = i + 1; j < bucket.size(); ++j) {
      if (tested) ++*tested;
      for (int sign : {-1, +1}) {
        auto r = detail::combine(bucket[i], bucket[j], sign);
        if (detail::is_zero(r) || r.norm > limit) continue;
        out.push_back({i, j, sign, std::move(r)});
      }
    }
  return out;
}

// Two-level search: decompose bucket members into unit residuals against the
// filter center, bucket the residuals by a second, finer code, and test
// pairs only inside each inner bucket's visibility window (first 2 N^c2
// members in ascending id order). A single inner code finds an N^(rho-rho0)
// fraction of the solutions, so the code is resampled to drive completeness
// back to a constant.
inline std::vector<ReduciblePair> find_all_solutions_twolevel(
    const std::vector<lattice::LatticePoint>& bucket, const SpherePoint& center,
    const walksim::WalkConfig& walk, double limit, Rng& rng,
    std::size_t* tested = nullptr) {
  // re-derive to reject hand-rolled parameter sets
  auto dp = costmodel::derive(walk.c, walk.c1, walk.c2);
  if (!(walk.rho >= 0.0) || walk.rho > dp.rho0 + 1e-12)
    throw std::domain_error("rho must lie in [0, rho0]");

  std::vector<ReduciblePair> out;
  if (bucket.size() < 2) return out;
  std::size_t d = center.dim();
  double n_log2 = static_cast<double>(d) * kHalfLog2FourThirds;
  double beta_mass = std::min(1.0, std::exp2((walk.c2 - walk.c1) * n_log2));
  auto b2 = static_cast<std::size_t>(std::max<long long>(
      1, std::llround(std::exp2((walk.rho + walk.c1 - walk.c2) * n_log2))));
  // visibility window: twice the expected per-filter load of THIS list. For a
  // vertex-sized list of N^c1 points that is the model's 2 N^c2 literally; a
  // fixed cap on a larger list would shadow high ids permanently instead of
  // controlling the tail.
  auto cap = static_cast<std::size_t>(std::max(
      1.0, std::floor(2.0 * static_cast<double>(bucket.size()) * beta_mass)));
  auto n_codes = static_cast<std::size_t>(
      std::max(1.0, std::ceil(4.0 * std::exp2((walk.rho0 - walk.rho) * n_log2))));
  // residuals live on the sphere orthogonal to the center, one dimension down
  Angle beta_d = detail::calibrated_cap_angle(d - 1, beta_mass);

  std::vector<std::size_t> ids;
  std::vector<SpherePoint> res;
  for (std::size_t i = 0; i < bucket.size(); ++i) {
    const auto& p = bucket[i];
    if (p.norm <= 0.0 || p.embed.size() != d) continue;
    std::vector<double> u(d);
    for (std::size_t k = 0; k < d; ++k) u[k] = p.embed[k] / p.norm;
    try {
      auto r = geometry::residual_decompose(make_sphere_point(std::move(u)), center);
      ids.push_back(i);
      res.push_back(std::move(r.y));
    } catch (const std::invalid_argument&) {
      // aligned with the center itself: no residual direction, skip
    }
  }
  if (ids.size() < 2) return out;

  std::set<std::tuple<std::size_t, std::size_t, int>> seen;
  for (std::size_t code_i = 0; code_i < n_codes; ++code_i) {
    auto code2 = rpc::sample_rpc(d, 1, b2, beta_d, rng);
    std::map<rpc::CodewordId, std::vector<std::size_t>> inner;
    for (std::size_t k = 0; k < res.size(); ++k)
      for (auto& t : rpc::decode_relevant(code2, res[k]))
        inner[std::move(t)].push_back(k);  // k ascending: windows id-ordered
    for (const auto& [t, lst] : inner) {
      std::size_t w = std::min(cap, lst.size());
      for (std::size_t a = 0; a + 1 < w; ++a)
        for (std::size_t b = a + 1; b < w; ++b) {
          std::size_t i = ids[lst[a]], j = ids[lst[b]];
          if (tested) ++*tested;
          for (int sign : {-1, +1}) {
            if (!seen.insert({i, j, sign}).second) continue;
            auto r = detail::combine(bucket[i], bucket[j], sign);
            if (detail::is_zero(r) || r.norm > limit) continue;
            out.push_back({i, j, sign, std::move(r)});
          }
        }
    }
  }
  return out;
}

// One radius step: refill the list at norm <= gamma * R from pairs sharing a
// filter, under fresh codes until the target count or the code budget is
// hit. Points already short enough pass through; at asymptotic scale the
// pair supply dominates and the pass-through is vacuous, at desk scale it
// keeps the list from collapsing. A partial result is an outcome, not an
// exception: the caller sees reached_target.
inline StepResult sieve_step(const std::vector<lattice::LatticePoint>& L, double R,
                             const SieveConfig& cfg, Rng& rng, int threads = 1) {
  detail::validate_config(cfg);
  if (L.empty()) throw std::invalid_argument("empty input list");
  std::size_t d = L.front().embed.size();
  for (const auto& p : L) {
    if (p.embed.size() != d) throw std::invalid_argument("mixed dimensions");
    if (p.norm > R * (1.0 + 1e-9)) throw std::invalid_argument("input norm exceeds R");
    if (p.norm <= 0.0) throw std::invalid_argument("zero vector in input");
  }

  double n_log2 = static_cast<double>(d) * kHalfLog2FourThirds;
  double limit = cfg.gamma * R;
  std::size_t target = L.size();
  Angle alpha_d = detail::calibrated_cap_angle(d, std::exp2(-(1.0 - cfg.c) * n_log2));
  std::size_t block = rpc::block_size_for(std::exp2((1.0 - cfg.c) * n_log2), 2);
  std::size_t budget = cfg.max_codes;
  if (budget == 0) {
    // repetition model: N^(c-zeta) codes cover the reducing pairs of one
    // list; the constant absorbs the saturation multiple and coupon overlap
    double zeta = costmodel::derive(cfg.c, cfg.c, 0.0).zeta;
    budget = static_cast<std::size_t>(
        std::max(8.0, std::ceil(8.0 * std::max(1.0, std::exp2((cfg.c - zeta) * n_log2)))));
  }

  std::vector<SpherePoint> dirs;
  dirs.reserve(L.size());
  for (const auto& p : L) {
    std::vector<double> u(d);
    for (std::size_t k = 0; k < d; ++k) u[k] = p.embed[k] / p.norm;
    dirs.push_back(make_sphere_point(std::move(u)));
  }

  std::map<std::vector<std::int64_t>, lattice::LatticePoint> accepted;
  for (const auto& p : L)
    if (p.norm <= limit) {
      auto q = p;
      detail::canonical_sign(q);
      accepted.emplace(q.coeffs, std::move(q));
    }

  // Every step runs its whole repetition budget: pairs shorter than the
  // current worst displace it at the truncation below, so later shells start
  // from the best list this radius can offer. Stopping at the first refill
  // lets the pass-through mask unsearched pairs and recall of the shortest
  // vector becomes seed luck.
  StepResult res;
  while (res.codes_used < budget) {
    ++res.codes_used;
    auto code = rpc::sample_rpc(d, 2, block, alpha_d, rng);
    auto buckets = rpc::bucket_points(code, dirs, threads);
    std::uint64_t salt = rng();

    std::vector<const rpc::Bucket*> items;
    items.reserve(buckets.size());
    for (const auto& [t, bkt] : buckets) {
      ++res.occupancy[bkt.members.size()];
      items.push_back(&bkt);
    }

    std::vector<std::vector<ReduciblePair>> found(items.size());
    std::vector<std::size_t> tested(items.size(), 0);
    parallel_chunks(items.size(), resolve_threads(threads),
                    [&](std::size_t lo, std::size_t hi, std::size_t) {
      for (std::size_t b = lo; b < hi; ++b) {
        const auto& members = items[b]->members;
        if (members.size() < 2) continue;
        std::vector<lattice::LatticePoint> pts;
        pts.reserve(members.size());
        for (std::size_t id : members) pts.push_back(L[id]);
        if (cfg.strategy == Strategy::AllPairs) {
          found[b] = find_all_solutions_allpairs(pts, limit, &tested[b]);
        } else {
          // the codeword lives in the rotated padded space; its first d
          // coordinates are the cap center seen by unpadded queries
          auto cw = rpc::assemble(code, items[b]->codeword);
          std::vector<double> ctr(cw.coords.begin(),
                                  cw.coords.begin() + static_cast<std::ptrdiff_t>(d));
          double cn = norm(ctr);
          if (cn < 1e-9) continue;  // codeword orthogonal to the query space
          for (auto& x : ctr) x /= cn;
          Rng bucket_rng = derive_rng(salt, b);
          found[b] = find_all_solutions_twolevel(pts, make_sphere_point(std::move(ctr)),
                                                 *cfg.walk, limit, bucket_rng, &tested[b]);
        }
      }
    });

    for (std::size_t b = 0; b < items.size(); ++b) {
      res.pairs_tested += tested[b];
      for (auto& pr : found[b]) {
        detail::canonical_sign(pr.result);
        if (accepted.emplace(pr.result.coeffs, std::move(pr.result)).second)
          ++res.pairs_found;
      }
    }
  }

  res.points.reserve(accepted.size());
  for (auto& [key, p] : accepted) res.points.push_back(std::move(p));
  std::sort(res.points.begin(), res.points.end(), [](const auto& a, const auto& b) {
    if (a.norm != b.norm) return a.norm < b.norm;
    return a.coeffs < b.coeffs;
  });
  if (res.points.size() > target) res.points.resize(target);
  res.reached_target = res.points.size() >= target;
  return res;
}

// LLL-reduce, seed a list with discrete-Gaussian samples (plus the reduced
// rows themselves), then ratchet the radius down by gamma per round until
// the minimum stagnates or the round budget runs out. Returns the shortest
// nonzero vector seen; a saturation shortfall is recorded in the report, and
// whatever partial list remains keeps sieving.
inline SolveResult solve_svp(const lattice::Basis& b, const SieveConfig& cfg,
                             int threads = 1) {
  detail::validate_config(cfg);
  if (b.d > 48) throw std::domain_error("solve_svp: dimension above desk guard 48");
  auto t0 = std::chrono::steady_clock::now();

  auto red = lattice::lll_reduce(b, 0.99);
  auto g = lattice::gso(red.basis);
  double s = lattice::klein_default_width(g);
  Rng rng = derive_rng(cfg.seed, 0x51e7eull);

  double n_pts = cfg.saturation_mult * std::exp2(static_cast<double>(b.d) * kHalfLog2FourThirds);
  auto target = static_cast<std::size_t>(std::max<long long>(8, std::llround(n_pts)));

  std::map<std::vector<std::int64_t>, lattice::LatticePoint> init;
  for (std::size_t i = 0; i < b.d; ++i) {
    std::vector<std::int64_t> e(b.d, 0);
    e[i] = 1;
    auto p = lattice::make_point(red.basis, e);
    detail::canonical_sign(p);
    init.emplace(p.coeffs, std::move(p));
  }
  for (std::size_t tries = 0; init.size() < target && tries < 400 * target; ++tries) {
    auto p = lattice::klein_sample(red.basis, g, s, rng);
    detail::canonical_sign(p);
    init.emplace(p.coeffs, std::move(p));
  }

  std::vector<lattice::LatticePoint> L;
  L.reserve(init.size());
  for (auto& [key, p] : init) L.push_back(std::move(p));

  RunReport rep;
  lattice::LatticePoint best = L.front();
  double R = 0.0;
  for (const auto& p : L) {
    R = std::max(R, p.norm);
    if (p.norm < best.norm) best = p;
  }

  // R shrinks by gamma every round no matter what, so the run terminates on
  // its own: once R falls under the lattice minimum the step can only emit
  // the empty list and the loop breaks. Stagnation is five rounds without
  // any change to the list; the min norm alone sits at its LLL value for
  // most of the descent, so it cannot be the progress signal.
  int stagnant = 0;
  for (int round = 0; round < cfg.max_rounds; ++round) {
    auto step = sieve_step(L, R, cfg, rng, threads);
    ++rep.rounds;
    rep.nb_rep.push_back(step.codes_used);
    rep.pairs_tested += step.pairs_tested;
    rep.pairs_found += step.pairs_found;
    for (const auto& [size, count] : step.occupancy) rep.occupancy[size] += count;
    if (!step.reached_target) rep.saturated = false;
    if (step.points.empty()) break;

    bool unchanged = step.points.size() == L.size() &&
                     std::equal(step.points.begin(), step.points.end(), L.begin(),
                                [](const auto& a, const auto& b) { return a.coeffs == b.coeffs; });
    L = std::move(step.points);
    R *= cfg.gamma;
    double mn = L.front().norm;  // sorted ascending by norm
    rep.min_norms.push_back(mn);
    rep.median_norms.push_back(L[L.size() / 2].norm);
    if (mn < best.norm) best = L.front();
    if (L.size() < 4) {
      rep.saturated = false;
      break;
    }
    stagnant = unchanged ? stagnant + 1 : 0;
    if (stagnant >= 5) break;
  }

  // All internal coefficients are relative to the reduced working basis.
  // Remap through the unimodular transform so the caller can audit the
  // result against the basis they handed in; the embedded vector is the
  // same integer point either way.
  std::vector<std::int64_t> in_coeffs(b.d, 0);
  for (std::size_t i = 0; i < b.d; ++i)
    for (std::size_t k = 0; k < b.d; ++k)
      in_coeffs[k] += best.coeffs[i] * red.transform[i][k];
  best.coeffs = std::move(in_coeffs);

  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(best), std::move(rep)};
}

}  // namespace sievekit::sieve
