#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <tuple>
#include <vector>

#include "sievekit/sieve.hpp"

using Catch::Approx;
using sievekit::Angle;
using sievekit::Rng;
using sievekit::SpherePoint;
using sievekit::derive_rng;
using sievekit::kHalfLog2FourThirds;
using sievekit::norm;
namespace costmodel = sievekit::costmodel;
namespace geometry = sievekit::geometry;
namespace lattice = sievekit::lattice;
namespace sieve = sievekit::sieve;
namespace walksim = sievekit::walksim;

namespace {

lattice::Basis identity_basis(std::size_t d) {
  lattice::Basis b;
  b.d = d;
  b.rows.assign(d, std::vector<std::int64_t>(d, 0));
  for (std::size_t i = 0; i < d; ++i) b.rows[i][i] = 1;
  return b;
}

lattice::LatticePoint int_point(std::vector<std::int64_t> coeffs) {
  lattice::LatticePoint p;
  p.embed.assign(coeffs.begin(), coeffs.end());
  p.coeffs = std::move(coeffs);
  p.norm = norm(p.embed);
  return p;
}

std::vector<std::int64_t> canon(std::vector<std::int64_t> c) {
  for (auto v : c) {
    if (v > 0) break;
    if (v < 0) {
      for (auto& x : c) x = -x;
      break;
    }
  }
  return c;
}

// n distinct discrete-Gaussian points, canonical sign, ascending norm.
// Sampling runs on the reduced basis but coefficients are remapped to the
// caller's basis so the membership audit rebuilds against that basis.
std::vector<lattice::LatticePoint> klein_list(const lattice::Basis& b, std::size_t n,
                                              Rng& rng) {
  auto red = lattice::lll_reduce(b, 0.99);
  auto g = lattice::gso(red.basis);
  double s = lattice::klein_default_width(g);
  std::map<std::vector<std::int64_t>, lattice::LatticePoint> acc;
  for (std::size_t tries = 0; acc.size() < n && tries < 500 * n; ++tries) {
    auto p = lattice::klein_sample(red.basis, g, s, rng);
    std::vector<std::int64_t> in_coeffs(b.d, 0);
    for (std::size_t i = 0; i < b.d; ++i)
      for (std::size_t k = 0; k < b.d; ++k)
        in_coeffs[k] += p.coeffs[i] * red.transform[i][k];
    auto key = canon(std::move(in_coeffs));
    acc.emplace(key, lattice::make_point(b, key));
  }
  REQUIRE(acc.size() == n);
  std::vector<lattice::LatticePoint> out;
  out.reserve(n);
  for (auto& [k, p] : acc) out.push_back(std::move(p));
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b2) { return a.norm < b2.norm; });
  return out;
}

// n points whose norms all sit in (gamma*R, R]: no input can pass through a
// sieve step untouched, so step outputs are pure pair results
std::pair<std::vector<lattice::LatticePoint>, double> shell_list(const lattice::Basis& b,
                                                                 std::size_t n, double gamma,
                                                                 Rng& rng) {
  auto pool = klein_list(b, 60 * n, rng);
  for (std::size_t j = pool.size(); j-- > n;) {
    double r = pool[j].norm;
    auto lb = std::lower_bound(pool.begin(), pool.end(), gamma * r,
                               [](const auto& p, double v) { return p.norm <= v; });
    auto count = static_cast<std::size_t>(std::distance(lb, pool.begin() + j + 1));
    if (count >= n) {
      std::vector<lattice::LatticePoint> out(pool.begin() + (j + 1 - n), pool.begin() + j + 1);
      return {std::move(out), r};
    }
  }
  FAIL("no norm shell wide enough");
  return {};
}

// integer points in a spherical cap around `center` at radius ~1000, plus
// planted reducing pairs (partner = point minus a short integer delta)
std::vector<lattice::LatticePoint> planted_bucket(std::size_t d, Angle alpha,
                                                  const SpherePoint& center, int n_fill,
                                                  int n_plant, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto in_cap = [&](const std::vector<double>& e) {
    double dc = 0.0, nn = norm(e);
    for (std::size_t k = 0; k < d; ++k) dc += e[k] * center.coords[k];
    return nn > 0.0 && dc / nn >= std::cos(alpha.rad);
  };
  std::vector<lattice::LatticePoint> bucket;
  while (bucket.size() < static_cast<std::size_t>(n_fill)) {
    auto s = geometry::sample_sphere(d, rng);
    double R = 900.0 + 100.0 * unif(rng);
    std::vector<std::int64_t> c(d);
    for (std::size_t k = 0; k < d; ++k) c[k] = std::llround(R * s.coords[k]);
    auto p = int_point(std::move(c));
    if (p.norm < 1.0 || p.norm > 1000.0 || !in_cap(p.embed)) continue;
    bucket.push_back(std::move(p));
  }
  int planted = 0;
  while (planted < n_plant) {
    const auto& x = bucket[static_cast<std::size_t>(unif(rng) * n_fill)];
    double dn = (0.3 + 0.6 * unif(rng)) * 0.9 * x.norm;
    std::vector<double> dir(d);
    for (auto& v : dir) v = gauss(rng);
    double dd = norm(dir);
    std::vector<std::int64_t> c(d);
    for (std::size_t k = 0; k < d; ++k)
      c[k] = x.coeffs[k] - std::llround(dn * dir[k] / dd);
    auto y = int_point(std::move(c));
    if (y.norm < 1.0 || y.norm > 1000.0 || !in_cap(y.embed)) continue;
    bucket.push_back(std::move(y));
    ++planted;
  }
  return bucket;
}

// exact membership: rebuild the embedding from the stored coefficients; all
// intermediates are integers below 2^53, so equality is bitwise
void audit_membership(const lattice::Basis& b, const lattice::LatticePoint& p) {
  auto rebuilt = lattice::make_point(b, p.coeffs);
  REQUIRE(rebuilt.embed == p.embed);
  REQUIRE(rebuilt.norm == p.norm);
}

std::set<std::vector<std::int64_t>> coeff_set(const std::vector<lattice::LatticePoint>& pts) {
  std::set<std::vector<std::int64_t>> out;
  for (const auto& p : pts) out.insert(canon(p.coeffs));
  return out;
}

}  // namespace

TEST_CASE("step and config validation reject bad domains") {
  auto L = std::vector<lattice::LatticePoint>{int_point({3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0})};
  Rng rng = derive_rng(1, 0xbadull);
  sieve::SieveConfig cfg;

  SECTION("c outside (0,1)") {
    cfg.c = 1.0;
    REQUIRE_THROWS_AS(sieve::sieve_step(L, 4.0, cfg, rng), std::domain_error);
    cfg.c = 0.0;
    REQUIRE_THROWS_AS(sieve::sieve_step(L, 4.0, cfg, rng), std::domain_error);
  }
  SECTION("gamma outside (0,1)") {
    cfg.gamma = 1.0;
    REQUIRE_THROWS_AS(sieve::sieve_step(L, 4.0, cfg, rng), std::domain_error);
  }
  SECTION("two-level without walk parameters") {
    cfg.strategy = sieve::Strategy::TwoLevel;
    REQUIRE_THROWS_AS(sieve::sieve_step(L, 4.0, cfg, rng), std::invalid_argument);
  }
  SECTION("walk derived for a different c") {
    cfg.strategy = sieve::Strategy::TwoLevel;
    auto dp = costmodel::derive(0.45, 0.40, 0.20);
    cfg.walk = walksim::make_walk_config(0.45, 0.40, 0.20, dp.rho0);
    cfg.c = 0.33;
    REQUIRE_THROWS_AS(sieve::sieve_step(L, 4.0, cfg, rng), std::invalid_argument);
  }
  SECTION("input list shape") {
    REQUIRE_THROWS_AS(sieve::sieve_step({}, 4.0, cfg, rng), std::invalid_argument);
    REQUIRE_THROWS_AS(sieve::sieve_step(L, 2.5, cfg, rng), std::invalid_argument);
    auto zero = int_point(std::vector<std::int64_t>(12, 0));
    REQUIRE_THROWS_AS(sieve::sieve_step({L[0], zero}, 4.0, cfg, rng), std::invalid_argument);
    auto other = int_point({1, 0, 0, 0});
    REQUIRE_THROWS_AS(sieve::sieve_step({L[0], other}, 4.0, cfg, rng), std::invalid_argument);
  }
}

TEST_CASE("antipodal inputs never produce the zero vector") {
  // wide filters (c = 0.9) force v and -v into shared buckets, so the
  // all-pairs scan actually evaluates v + (-v) and must discard it
  std::size_t d = 12;
  Rng rng = derive_rng(3, 0x2e40ull);
  std::vector<lattice::LatticePoint> L;
  L.push_back(int_point({3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}));
  L.push_back(int_point({-3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}));
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (L.size() < 10) {
    std::vector<std::int64_t> c(d);
    for (auto& x : c) x = std::llround(1.6 * gauss(rng));
    auto p = int_point(std::move(c));
    if (p.norm < 0.5 || p.norm > 3.0) continue;
    L.push_back(std::move(p));
  }
  sieve::SieveConfig cfg;
  cfg.c = 0.9;
  auto res = sieve::sieve_step(L, 3.0, cfg, rng);
  REQUIRE(res.pairs_tested > 0);
  for (const auto& p : res.points) {
    bool zero = std::all_of(p.coeffs.begin(), p.coeffs.end(),
                            [](std::int64_t v) { return v == 0; });
    REQUIRE_FALSE(zero);
    REQUIRE(p.norm <= 0.97 * 3.0 + 1e-12);
  }
}

TEST_CASE("step outputs are audited lattice vectors below the shrunk radius") {
  std::size_t d = 36;
  auto b = lattice::generate_random_basis(d, 8, 17);
  Rng rng = derive_rng(17, 0x57e9ull);
  auto L = klein_list(b, 600, rng);
  double R = L.back().norm;

  sieve::SieveConfig cfg;
  cfg.c = 0.1;
  auto res = sieve::sieve_step(L, R, cfg, rng);
  REQUIRE(res.points.size() > 0);
  REQUIRE(res.pairs_found > 0);

  std::set<std::vector<std::int64_t>> seen;
  for (const auto& p : res.points) {
    REQUIRE(p.norm <= 0.97 * R * (1.0 + 1e-12));
    audit_membership(b, p);
    // duplicate suppression: no repeated coeff vector, no v/-v twins
    REQUIRE(seen.insert(canon(p.coeffs)).second);
    REQUIRE(p.coeffs == canon(p.coeffs));
  }
}

TEST_CASE("all-pairs scan is exhaustive") {
  SECTION("single point gives nothing") {
    auto bucket = std::vector<lattice::LatticePoint>{int_point({5, 0, 0, 0})};
    REQUIRE(sieve::find_all_solutions_allpairs(bucket, 4.0).empty());
  }
  SECTION("planted pair below the reduction angle is found") {
    std::size_t d = 32;
    Rng rng = derive_rng(9, 0x91a7ull);
    std::vector<lattice::LatticePoint> bucket;
    std::vector<std::int64_t> v(d, 0), w(d, 0);
    v[0] = 10;
    w[0] = 9;
    w[1] = 4;  // angle(v, w) = 0.418 < pi/3, |v - w| = sqrt(17)
    bucket.push_back(int_point(v));
    bucket.push_back(int_point(w));
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (bucket.size() < 12) {
      std::vector<std::int64_t> c(d);
      for (auto& x : c) x = std::llround(1.8 * gauss(rng));
      auto p = int_point(std::move(c));
      if (p.norm < 8.0 || p.norm > 10.0) continue;
      bucket.push_back(std::move(p));
    }
    double limit = 0.97 * 10.0;
    auto found = sieve::find_all_solutions_allpairs(bucket, limit);
    bool planted = false;
    for (const auto& pr : found) {
      REQUIRE(pr.result.norm <= limit);
      if (pr.i == 0 && pr.j == 1 && pr.sign == -1) {
        planted = true;
        REQUIRE(pr.result.coeffs[0] == 1);
        REQUIRE(pr.result.coeffs[1] == -4);
      }
    }
    REQUIRE(planted);
  }
  SECTION("count matches an independent recount") {
    std::size_t d = 16, n = 20;
    Rng rng = derive_rng(12, 0xc0c0ull);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<lattice::LatticePoint> bucket;
    while (bucket.size() < n) {
      std::vector<std::int64_t> c(d);
      for (auto& x : c) x = std::llround(40.0 * gauss(rng));
      auto p = int_point(std::move(c));
      if (p.norm < 1.0 || p.norm > 200.0) continue;
      bucket.push_back(std::move(p));
    }
    double limit = 0.97 * 200.0;
    std::size_t tested = 0;
    auto found = sieve::find_all_solutions_allpairs(bucket, limit, &tested);
    REQUIRE(tested == n * (n - 1) / 2);

    std::size_t recount = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        for (int sign : {-1, +1}) {
          std::vector<double> sum(d);
          for (std::size_t k = 0; k < d; ++k)
            sum[k] = bucket[i].embed[k] + sign * bucket[j].embed[k];
          double nn = norm(sum);
          if (nn > 0.0 && nn <= limit) ++recount;
        }
    REQUIRE(found.size() == recount);
  }
}

TEST_CASE("two-level search degenerates, stays sound, and finds plants") {
  std::size_t d = 36;
  double n_log2 = static_cast<double>(d) * kHalfLog2FourThirds;
  Angle alpha_d = geometry::cap_angle_for_mass(d, std::exp2(-0.55 * n_log2));

  SECTION("c2 = c1 collapses to subsampled all-pairs and finds the plant") {
    // beta = pi/2, rho0 = 0: a single all-catching inner filter per code
    auto walk = walksim::make_walk_config(0.4, 0.3, 0.3, 0.0);
    REQUIRE(walk.rho0 == Approx(0.0).margin(1e-12));
    Rng rng = derive_rng(21, 0xdeed1ull);
    auto center = geometry::sample_sphere(d, rng);
    auto bucket = planted_bucket(d, alpha_d, center, 20, 5, rng);
    double rmax = 0.0;
    for (const auto& p : bucket) rmax = std::max(rmax, p.norm);
    double limit = 0.97 * rmax;

    Rng r2 = derive_rng(21, 0xfeed2ull);
    auto got = sieve::find_all_solutions_twolevel(bucket, center, walk, limit, r2);
    auto truth = sieve::find_all_solutions_allpairs(bucket, limit);
    REQUIRE(!truth.empty());
    // degenerate windows cover the whole residual list, so one code already
    // recovers everything
    REQUIRE(got.size() == truth.size());
  }

  SECTION("soundness: two-level output is a subset of all-pairs on seeded buckets") {
    auto dp = costmodel::derive(0.45, 0.40, 0.20);
    auto walk = walksim::make_walk_config(0.45, 0.40, 0.20, dp.rho0);
    for (int t = 0; t < 10; ++t) {
      Rng rng = derive_rng(100 + t, 0x50deull);
      auto center = geometry::sample_sphere(d, rng);
      auto bucket = planted_bucket(d, alpha_d, center, 25, 8, rng);
      double rmax = 0.0;
      for (const auto& p : bucket) rmax = std::max(rmax, p.norm);
      double limit = 0.97 * rmax;

      auto truth = sieve::find_all_solutions_allpairs(bucket, limit);
      std::set<std::tuple<std::size_t, std::size_t, int>> truth_keys;
      for (const auto& pr : truth) truth_keys.insert({pr.i, pr.j, pr.sign});

      Rng r2 = derive_rng(200 + t, 0x7e57ull);
      auto got = sieve::find_all_solutions_twolevel(bucket, center, walk, limit, r2);
      std::set<std::tuple<std::size_t, std::size_t, int>> got_keys;
      for (const auto& pr : got) {
        REQUIRE(pr.result.norm <= limit);
        REQUIRE(got_keys.insert({pr.i, pr.j, pr.sign}).second);  // distinct
      }
      for (const auto& k : got_keys) REQUIRE(truth_keys.count(k) == 1);
    }
  }

  SECTION("rho below rho0: plant found within the 4x resample allowance") {
    // the search runs ceil(4 N^(rho0-rho)) inner codes, four times the
    // model's expected resample count for one solution
    auto dp = costmodel::derive(0.45, 0.40, 0.20);
    auto walk = walksim::make_walk_config(0.45, 0.40, 0.20, dp.rho0 / 2.0);
    int found_runs = 0;
    for (int t = 0; t < 5; ++t) {
      Rng rng = derive_rng(300 + t, 0x91deull);
      auto center = geometry::sample_sphere(d, rng);
      auto bucket = planted_bucket(d, alpha_d, center, 20, 1, rng);
      double rmax = 0.0;
      for (const auto& p : bucket) rmax = std::max(rmax, p.norm);
      const auto& plant = bucket.back();  // partner of some earlier point
      double limit = 0.97 * rmax;
      Rng r2 = derive_rng(400 + t, 0x3a11ull);
      auto got = sieve::find_all_solutions_twolevel(bucket, center, walk, limit, r2);
      for (const auto& pr : got)
        if (pr.j == bucket.size() - 1 || pr.i == bucket.size() - 1) {
          ++found_runs;
          break;
        }
      (void)plant;
    }
    REQUIRE(found_runs >= 4);
  }

  SECTION("recall at rho = rho0 clears forty percent of the oracle") {
    auto dp = costmodel::derive(0.45, 0.40, 0.20);
    auto walk = walksim::make_walk_config(0.45, 0.40, 0.20, dp.rho0);
    double recall_sum = 0.0;
    int n_buckets = 20;
    for (int t = 0; t < n_buckets; ++t) {
      Rng rng = derive_rng(500 + t, 0x8ecaull);
      auto center = geometry::sample_sphere(d, rng);
      auto bucket = planted_bucket(d, alpha_d, center, 30, 10, rng);
      double rmax = 0.0;
      for (const auto& p : bucket) rmax = std::max(rmax, p.norm);
      double limit = 0.97 * rmax;

      auto truth = sieve::find_all_solutions_allpairs(bucket, limit);
      REQUIRE(!truth.empty());
      std::set<std::vector<std::int64_t>> truth_keys;
      for (const auto& pr : truth) truth_keys.insert(canon(pr.result.coeffs));
      Rng r2 = derive_rng(900 + t, 0xabcdull);
      auto got = sieve::find_all_solutions_twolevel(bucket, center, walk, limit, r2);
      std::set<std::vector<std::int64_t>> hit;
      for (const auto& pr : got) {
        auto key = canon(pr.result.coeffs);
        if (truth_keys.count(key)) hit.insert(std::move(key));
      }
      recall_sum += static_cast<double>(hit.size()) / static_cast<double>(truth_keys.size());
    }
    REQUIRE(recall_sum / n_buckets >= 0.40);
  }
}

TEST_CASE("two-level step recovers the all-pairs step's outputs at c = 0.1") {
  // spec'd head-to-head at sieve-step level: same list, same seed, the
  // two-level strategy must keep at least 40% of what all-pairs reduces
  std::size_t d = 36;
  auto b = lattice::generate_random_basis(d, 8, 23);
  Rng rng = derive_rng(23, 0x5e11ull);
  auto nprime = static_cast<std::size_t>(
      std::llround(6.0 * std::exp2(static_cast<double>(d) * kHalfLog2FourThirds)));
  auto [L, R] = shell_list(b, nprime, 0.97, rng);

  sieve::SieveConfig base;
  base.c = 0.1;
  auto dp = costmodel::derive(0.1, 0.08, 0.04);
  sieve::SieveConfig two = base;
  two.strategy = sieve::Strategy::TwoLevel;
  two.walk = walksim::make_walk_config(0.1, 0.08, 0.04, dp.rho0);

  Rng ra = derive_rng(77, 0xaaaull);
  auto res_all = sieve::sieve_step(L, R, base, ra);
  Rng rt = derive_rng(77, 0xaaaull);
  auto res_two = sieve::sieve_step(L, R, two, rt);

  auto all_keys = coeff_set(res_all.points);
  REQUIRE(!all_keys.empty());
  std::size_t hit = 0;
  for (const auto& k : coeff_set(res_two.points)) hit += all_keys.count(k);
  REQUIRE(static_cast<double>(hit) >= 0.40 * static_cast<double>(all_keys.size()));
}

TEST_CASE("solve on the identity lattice returns a unit vector") {
  auto b = identity_basis(20);
  sieve::SieveConfig cfg;
  cfg.seed = 4;
  auto r = sieve::solve_svp(b, cfg);
  REQUIRE(r.shortest.norm == 1.0);
  std::int64_t nonzero = 0, absmax = 0;
  for (auto c : r.shortest.coeffs) {
    if (c != 0) ++nonzero;
    absmax = std::max(absmax, std::abs(c));
  }
  REQUIRE(nonzero == 1);
  REQUIRE(absmax == 1);
  REQUIRE(std::is_sorted(r.report.min_norms.begin(), r.report.min_norms.end(),
                         std::greater<double>()));
}

TEST_CASE("solve matches enumeration on a random basis") {
  auto b = lattice::generate_random_basis(30, 10, 11);
  auto ref = lattice::enumerate_shortest(b);
  sieve::SieveConfig cfg;
  cfg.seed = 11;
  auto r = sieve::solve_svp(b, cfg);
  REQUIRE(r.shortest.norm <= 1.05 * ref.norm);
  audit_membership(b, r.shortest);
  REQUIRE(std::is_sorted(r.report.min_norms.begin(), r.report.min_norms.end(),
                         std::greater<double>()));
  REQUIRE(r.report.rounds == r.report.nb_rep.size());
  REQUIRE(r.report.wall_seconds > 0.0);
  // dimension guard
  REQUIRE_THROWS_AS(sieve::solve_svp(identity_basis(49), cfg), std::domain_error);
}

TEST_CASE("repetition count grows at the modeled rate") {
  // NB_REP = N' / (pairs per code): measured from single-code steps on norm
  // shells, its log-slope across d tracks c - zeta
  double c = 0.1;
  double zeta = costmodel::derive(c, c, 0.0).zeta;
  std::vector<std::size_t> dims = {24, 30, 36};
  std::vector<double> log_nb;
  for (std::size_t d : dims) {
    auto b = lattice::generate_random_basis(d, 8, 77 + d);
    Rng rng = derive_rng(d, 0x5108ull);
    auto nprime = static_cast<std::size_t>(
        std::llround(6.0 * std::exp2(static_cast<double>(d) * kHalfLog2FourThirds)));
    auto [L, R] = shell_list(b, nprime, 0.97, rng);
    sieve::SieveConfig cfg;
    cfg.c = c;
    cfg.max_codes = 1;
    double yield_sum = 0.0;
    int n_codes = 60;
    for (int i = 0; i < n_codes; ++i) {
      auto res = sieve::sieve_step(L, R, cfg, rng);
      yield_sum += static_cast<double>(res.pairs_found);
    }
    double mean_yield = yield_sum / n_codes;
    REQUIRE(mean_yield > 0.0);
    log_nb.push_back(std::log2(static_cast<double>(nprime) / mean_yield));
  }
  // least-squares slope over the three dimensions
  double mx = (24.0 + 30.0 + 36.0) / 3.0, my = (log_nb[0] + log_nb[1] + log_nb[2]) / 3.0;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    double dx = static_cast<double>(dims[i]) - mx;
    num += dx * (log_nb[i] - my);
    den += dx * dx;
  }
  double slope = num / den;
  double model = (c - zeta) * kHalfLog2FourThirds;
  REQUIRE(slope == Approx(model).epsilon(0.25));
}

TEST_CASE("bucket occupancy concentrates at its modeled size") {
  std::size_t d = 40;
  auto b = lattice::generate_random_basis(d, 6, 31);
  Rng rng = derive_rng(31, 0x0cc0ull);
  auto n_pts = static_cast<std::size_t>(
      std::llround(std::exp2(static_cast<double>(d) * kHalfLog2FourThirds)));
  auto L = klein_list(b, n_pts, rng);
  double R = L.back().norm;

  sieve::SieveConfig cfg;
  cfg.c = 0.33;
  cfg.max_codes = 3;
  auto res = sieve::sieve_step(L, R, cfg, rng);
  double members = 0.0, buckets = 0.0;
  for (const auto& [size, count] : res.occupancy) {
    members += static_cast<double>(size * count);
    buckets += static_cast<double>(count);
  }
  REQUIRE(buckets > 0.0);
  double mean = members / buckets;
  double model = std::exp2(cfg.c * static_cast<double>(d) * kHalfLog2FourThirds);
  REQUIRE(mean >= 0.5 * model);
  REQUIRE(mean <= 2.0 * model);
}

TEST_CASE("worker count never changes the outcome") {
  std::size_t d = 30;
  auto b = lattice::generate_random_basis(d, 8, 41);
  Rng rng = derive_rng(41, 0xf00dull);
  auto L = klein_list(b, 200, rng);
  double R = L.back().norm;

  for (auto strategy : {sieve::Strategy::AllPairs, sieve::Strategy::TwoLevel}) {
    sieve::SieveConfig cfg;
    cfg.c = 0.33;
    cfg.max_codes = 4;
    cfg.strategy = strategy;
    if (strategy == sieve::Strategy::TwoLevel) {
      auto dp = costmodel::derive(0.33, 0.1952, 0.0603);
      cfg.walk = walksim::make_walk_config(0.33, 0.1952, 0.0603, dp.rho0);
    }
    Rng r1 = derive_rng(90, 0x111ull);
    auto a = sieve::sieve_step(L, R, cfg, r1, 1);
    Rng r4 = derive_rng(90, 0x111ull);
    auto bres = sieve::sieve_step(L, R, cfg, r4, 4);
    REQUIRE(a.points.size() == bres.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i)
      REQUIRE(a.points[i].coeffs == bres.points[i].coeffs);
    REQUIRE(a.pairs_tested == bres.pairs_tested);
    REQUIRE(a.pairs_found == bres.pairs_found);
    REQUIRE(a.occupancy == bres.occupancy);
    REQUIRE(a.codes_used == bres.codes_used);
  }
}
