#pragma once

// Command-line front end wiring every module together: basis generation,
// end-to-end solving, reference-value oracles, exponent optimization,
// trade-off curves, and the geometry / walk validation suites.
//
// Exit codes: 0 success; 1 bad parameters or I/O failure; 2 a validation
// check failed or the requested optimum is infeasible. Reports are JSON
// with sorted keys; apart from the "timing" subobject they are
// byte-identical for a fixed command line and seed.

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iterator>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "sievekit/common.hpp"
#include "sievekit/costmodel.hpp"
#include "sievekit/geometry.hpp"
#include "sievekit/io.hpp"
#include "sievekit/lattice.hpp"
#include "sievekit/rpc.hpp"
#include "sievekit/sieve.hpp"
#include "sievekit/walksim.hpp"

namespace sievekit::cli {

using io::Json;

namespace detail {

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

inline void deliver(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty())
    out << text;
  else
    io::write_text_file(path, text);
}

inline std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// Uniform check rows; min/max are null when that side is unbounded.
struct Checker {
  Json rows = Json::array();
  bool all_pass = true;

  void bounded(const std::string& name, double observed, std::optional<double> lo,
               std::optional<double> hi) {
    bool ok = std::isfinite(observed) && (!lo || observed >= *lo) && (!hi || observed <= *hi);
    all_pass = all_pass && ok;
    Json row{{"name", name}, {"observed", observed}, {"pass", ok}};
    row["min"] = lo ? Json(*lo) : Json();
    row["max"] = hi ? Json(*hi) : Json();
    rows.push_back(std::move(row));
  }
  void near(const std::string& name, double observed, double ref, double tol) {
    bounded(name, observed, ref - tol, ref + tol);
  }
  void at_most(const std::string& name, double observed, double hi) {
    bounded(name, observed, std::nullopt, hi);
  }
  void at_least(const std::string& name, double observed, double lo) {
    bounded(name, observed, lo, std::nullopt);
  }
};

inline int finish_checks(const std::string& command, Json params, Checker& ck,
                         const Stopwatch& sw, const std::string& out_path, std::ostream& out,
                         std::ostream& err) {
  Json results{{"checks", ck.rows}, {"all_pass", ck.all_pass}};
  deliver(io::report_text(command, std::move(params), std::move(results),
                          Json{{"wall_seconds", sw.seconds()}}),
          out_path, out);
  if (!ck.all_pass) {
    err << command << ": at least one check failed\n";
    return 2;
  }
  return 0;
}

// ---------------------------------------------------------------- oracle

inline void suite_cost(Checker& ck) {
  using namespace costmodel;
  ck.near("classical_c_to_zero_total_d", cost({1e-6, 0.0, 0.0, 0.0, Mode::Classical}).total_d,
          0.2925, 1e-3);
  ck.near("grover_crossover_total_d", cost({0.2782, 0.0, 0.0, 0.0, Mode::Grover}).total_d,
          0.2653, 1e-3);
  auto dp = derive(0.3300, 0.1952, 0.0603);
  ck.near("walk_rho_pinned_total_d",
          cost({0.3300, 0.1952, 0.0603, dp.rho0, Mode::Walk}).total_d, 0.2605, 1e-3);
  ck.near("walk_free_optimum_total_d", cost({0.3696, 0.2384, 0.0, 0.0, Mode::Walk}).total_d,
          0.2570, 1e-3);
}

inline void suite_optimize(Checker& ck) {
  auto r = costmodel::optimize(costmodel::Mode::Walk);
  ck.at_most("walk_optimum_total_d", r.cost.total_d, 0.2571);
  ck.near("walk_optimum_c", r.params.c, 0.3696, 0.005);
  ck.near("walk_optimum_c1", r.params.c1, 0.2384, 0.005);
  ck.at_most("walk_optimum_c2", r.params.c2, 0.003);
  ck.at_most("walk_optimum_rho", r.params.rho, 0.003);
  costmodel::OptimizeBounds pin;
  pin.pin_rho_to_rho0 = true;
  ck.at_most("walk_rho_pinned_optimum_total_d",
             costmodel::optimize(costmodel::Mode::Walk, pin).cost.total_d, 0.2606);
}

inline void suite_tradeoff(Checker& ck) {
  // published QRAM-budget table: (budget, time, quantum memory)
  const std::array<std::array<double, 3>, 7> refs = {{{0.0, 0.2925, 0.0},
                                                      {0.02, 0.2827, 0.0},
                                                      {0.04, 0.2733, 0.0},
                                                      {0.0578, 0.2653, 0.0},
                                                      {0.065, 0.2621, 0.0190},
                                                      {0.070, 0.2598, 0.0324},
                                                      {0.0767, 0.2570, 0.0495}}};
  std::vector<double> ms;
  for (const auto& r : refs) ms.push_back(r[0]);
  auto rows = costmodel::tradeoff_curve(costmodel::TradeoffKind::QRam, ms);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ck.near("qram_row_" + fmt4(ms[i]) + "_tau", rows[i].tau, refs[i][1], 5e-4);
    ck.near("qram_row_" + fmt4(ms[i]) + "_mu", rows[i].mu, refs[i][2], 5e-4);
  }
  double worst_qram = 0.0;
  for (const auto& r : rows)
    worst_qram = std::max(worst_qram, std::abs(r.tau - (0.2925 - 0.4647 * r.m)));
  ck.at_most("qram_affine_residual", worst_qram, 1e-3);

  auto qmem = costmodel::tradeoff_curve(costmodel::TradeoffKind::QMem,
                                        {0.0, 0.0125, 0.025, 0.0375, 0.0495});
  double worst_qmem = 0.0;
  for (const auto& r : qmem)
    worst_qmem = std::max(worst_qmem, std::abs(r.tau - (0.2653 - 0.1670 * r.m)));
  ck.at_most("qmem_affine_residual", worst_qmem, 1e-4);

  ck.near("lambda_walk_one_third", costmodel::optimize_lambda(1.0 / 3.0).lambda, 0.2824, 5e-4);
  auto lg = costmodel::optimize_objective(costmodel::Mode::Grover, {}, 1.0 / 3.0);
  ck.near("lambda_grover_one_third", costmodel::lambda_metric(lg.cost, 1.0 / 3.0), 0.2849,
          5e-4);
}

// brute force over all B^m assembled codewords, precomputed once per code
inline std::vector<std::pair<rpc::CodewordId, SpherePoint>> assemble_all(
    const rpc::RpcCode& code) {
  std::vector<std::pair<rpc::CodewordId, SpherePoint>> all;
  rpc::CodewordId id;
  id.indices.assign(code.m, 0);
  for (;;) {
    all.emplace_back(id, rpc::assemble(code, id));
    std::size_t k = 0;
    while (k < code.m && id.indices[k] + 1 == code.B) id.indices[k++] = 0;
    if (k == code.m) break;
    ++id.indices[k];
  }
  return all;
}

inline void suite_rpc(Checker& ck, std::uint64_t seed) {
  struct Shape {
    std::size_t d, m, B;
    double alpha;
  };
  const Shape shapes[] = {{12, 2, 32, 1.2}, {16, 2, 100, 1.1}, {18, 3, 40, 1.25}};
  for (std::size_t s = 0; s < std::size(shapes); ++s) {
    const auto& sh = shapes[s];
    Rng rng = derive_rng(seed, 0xdec0deull, s);
    auto code = rpc::sample_rpc(sh.d, sh.m, sh.B, Angle{sh.alpha}, rng);
    auto table = assemble_all(code);
    double cos_a = std::cos(code.alpha.rad);
    std::size_t mismatches = 0, nonempty = 0;
    for (int t = 0; t < 100; ++t) {
      auto v = geometry::sample_sphere(sh.d, rng);
      std::vector<double> q(code.padded_dim(), 0.0);
      std::copy(v.coords.begin(), v.coords.end(), q.begin());
      std::vector<rpc::CodewordId> slow;
      for (const auto& [cid, emb] : table)
        if (dot(emb.coords, q) >= cos_a) slow.push_back(cid);
      std::sort(slow.begin(), slow.end());
      auto fast = rpc::decode_relevant(code, v);
      mismatches += fast != slow;
      nonempty += !fast.empty();
    }
    std::string tag = "d" + std::to_string(sh.d) + "_m" + std::to_string(sh.m) + "_B" +
                      std::to_string(sh.B);
    ck.at_most("rpc_decode_mismatches_" + tag, static_cast<double>(mismatches), 0.0);
    ck.at_least("rpc_decode_nonempty_queries_" + tag, static_cast<double>(nonempty), 1.0);
  }
}

inline void suite_svp(Checker& ck, int threads) {
  for (std::uint64_t seed : {11ull, 22ull, 33ull}) {
    auto b = lattice::generate_random_basis(30, 10, seed);
    auto enu = lattice::enumerate_shortest(b);
    sieve::SieveConfig cfg;  // all-pairs defaults
    auto r = sieve::solve_svp(b, cfg, threads);
    std::string tag = "svp_basis_seed" + std::to_string(seed);
    ck.bounded(tag + "_norm_ratio", r.shortest.norm / enu.norm, 1.0 - 1e-12, 1.05);
    auto rebuilt = lattice::make_point(b, r.shortest.coeffs);
    bool member = rebuilt.embed == r.shortest.embed && r.shortest.norm > 0.0;
    ck.at_least(tag + "_membership_audit", member ? 1.0 : 0.0, 1.0);
  }
}

struct OracleOpts {
  std::string suite = "all";
  std::uint64_t seed = 7;
  int threads = 1;
  std::string out_path;
};

inline int cmd_oracle(const OracleOpts& o, std::ostream& out, std::ostream& err) {
  Stopwatch sw;
  Checker ck;
  bool all = o.suite == "all";
  if (all || o.suite == "cost") suite_cost(ck);
  if (all || o.suite == "optimize") suite_optimize(ck);
  if (all || o.suite == "tradeoff") suite_tradeoff(ck);
  if (all || o.suite == "rpc") suite_rpc(ck, o.seed);
  if (all || o.suite == "svp") suite_svp(ck, o.threads);
  return finish_checks(
      "oracle",
      Json{{"suite", o.suite}, {"seed", o.seed}, {"threads", o.threads}}, ck, sw,
      o.out_path, out, err);
}

// ------------------------------------------------------------------- gen

struct GenOpts {
  std::size_t d = 30;
  unsigned bits = 10;
  std::uint64_t seed = 1;
  std::string out_path;
};

inline int cmd_gen(const GenOpts& o, std::ostream& out, std::ostream&) {
  deliver(lattice::write_basis(lattice::generate_random_basis(o.d, o.bits, o.seed)),
          o.out_path, out);
  return 0;
}

// ----------------------------------------------------------------- solve

struct SolveOpts {
  std::string basis_path;
  double c = 0.33;
  double gamma = 0.97;
  std::string strategy = "allpairs";
  double c1 = -1.0, c2 = -1.0, rho = -1.0;
  double saturation_mult = 6.0;
  int max_rounds = 200;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string report_path;
};

inline int cmd_solve(const SolveOpts& o, std::ostream& out, std::ostream& err) {
  auto basis = lattice::parse_basis(io::read_text_file(o.basis_path));
  sieve::SieveConfig cfg;
  cfg.c = o.c;
  cfg.gamma = o.gamma;
  cfg.saturation_mult = o.saturation_mult;
  cfg.max_rounds = o.max_rounds;
  cfg.seed = o.seed;
  Json params{{"basis", o.basis_path},
              {"c", o.c},
              {"gamma", o.gamma},
              {"strategy", o.strategy},
              {"saturation_mult", o.saturation_mult},
              {"max_rounds", o.max_rounds},
              {"seed", o.seed},
              {"threads", o.threads}};
  if (o.strategy == "twolevel") {
    if (o.c1 < 0.0 || o.c2 < 0.0) {
      err << "solve: --strategy twolevel needs --c1 and --c2\n";
      return 1;
    }
    double rho = o.rho < 0.0 ? costmodel::derive(o.c, o.c1, o.c2).rho0 : o.rho;
    cfg.strategy = sieve::Strategy::TwoLevel;
    cfg.walk = walksim::make_walk_config(o.c, o.c1, o.c2, rho);
    params["c1"] = o.c1;
    params["c2"] = o.c2;
    params["rho"] = rho;
  }
  auto r = sieve::solve_svp(basis, cfg, o.threads);

  Json res;
  res["shortest_norm"] = r.shortest.norm;
  res["shortest_coeffs"] = r.shortest.coeffs;
  res["rounds"] = r.report.rounds;
  res["saturated"] = r.report.saturated;
  res["pairs_tested"] = r.report.pairs_tested;
  res["pairs_found"] = r.report.pairs_found;
  res["nb_rep"] = r.report.nb_rep;
  res["min_norms"] = r.report.min_norms;
  res["median_norms"] = r.report.median_norms;
  Json occ = Json::object();
  for (const auto& [size, count] : r.report.occupancy) occ[std::to_string(size)] = count;
  res["occupancy"] = std::move(occ);
  deliver(io::report_text("solve", std::move(params), std::move(res),
                          Json{{"wall_seconds", r.report.wall_seconds}}),
          o.report_path, out);
  return 0;
}

// -------------------------------------------------------------- optimize

struct OptimizeOpts {
  std::string mode = "walk";
  double qmem_max = -1.0;
  double qram_max = -1.0;
  bool pin_rho0 = false;
  std::string out_path;
};

inline Json breakdown_json(const costmodel::ExponentParams& p, const costmodel::CostBreakdown& cb) {
  return Json{{"c", p.c},           {"c1", p.c1},
              {"c2", p.c2},         {"rho", p.rho},
              {"total_d", cb.total_d}, {"qram_d", cb.qram_d},
              {"qmem_d", cb.qmem_d},   {"total_N", cb.total_N},
              {"setup", cb.setup},     {"update", cb.update},
              {"eps", cb.eps},         {"t1", cb.t1},
              {"fas", cb.fas},         {"nb_rep", cb.nb_rep}};
}

inline int cmd_optimize(const OptimizeOpts& o, std::ostream& out, std::ostream& err) {
  Stopwatch sw;
  costmodel::Mode mode = o.mode == "walk"      ? costmodel::Mode::Walk
                         : o.mode == "grover"  ? costmodel::Mode::Grover
                                               : costmodel::Mode::Classical;
  costmodel::OptimizeBounds bounds;
  if (o.qmem_max >= 0.0) bounds.qmem_max_d = o.qmem_max;
  if (o.qram_max >= 0.0) bounds.qram_max_d = o.qram_max;
  bounds.pin_rho_to_rho0 = o.pin_rho0;
  auto r = costmodel::optimize(mode, bounds);
  Json params{{"mode", o.mode}, {"pin_rho0", o.pin_rho0}};
  params["qmem_max"] = o.qmem_max >= 0.0 ? Json(o.qmem_max) : Json();
  params["qram_max"] = o.qram_max >= 0.0 ? Json(o.qram_max) : Json();
  if (!(r.cost.total_d < 1.0)) {
    err << "optimize: no feasible point under the given bounds\n";
    return 2;
  }
  deliver(io::report_text("optimize", std::move(params), breakdown_json(r.params, r.cost),
                          Json{{"wall_seconds", sw.seconds()}}),
          o.out_path, out);
  return 0;
}

// -------------------------------------------------------------- tradeoff

struct TradeoffOpts {
  std::string kind = "qram";
  int points = 40;
  std::string pins;
  std::string out_path;
};

inline int cmd_tradeoff(const TradeoffOpts& o, std::ostream& out, std::ostream& err) {
  auto kind = o.kind == "qmem" ? costmodel::TradeoffKind::QMem : costmodel::TradeoffKind::QRam;
  // largest supported budget per kind; beyond it the unconstrained optimum
  // already satisfies the bound (tradeoff_curve rejects larger values)
  double m_hi = kind == costmodel::TradeoffKind::QMem ? 0.0495 : 0.0767;
  std::vector<double> ms;
  if (!o.pins.empty()) {
    std::size_t pos = 0;
    while (pos <= o.pins.size()) {
      std::size_t comma = o.pins.find(',', pos);
      std::string tok = o.pins.substr(pos, comma == std::string::npos ? comma : comma - pos);
      try {
        ms.push_back(std::stod(tok));
      } catch (const std::exception&) {
        err << "tradeoff: bad --pins entry: " << tok << "\n";
        return 1;
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  } else {
    if (o.points < 2) {
      err << "tradeoff: --points must be at least 2\n";
      return 1;
    }
    for (int i = 0; i < o.points; ++i)
      ms.push_back(m_hi * static_cast<double>(i) / static_cast<double>(o.points - 1));
  }
  deliver(io::emit_curve_csv(costmodel::tradeoff_curve(kind, ms)), o.out_path, out);
  return 0;
}

// ---------------------------------------------------------------- lambda

struct LambdaOpts {
  double x = 1.0 / 3.0;
  std::string out_path;
};

inline int cmd_lambda(const LambdaOpts& o, std::ostream& out, std::ostream&) {
  Stopwatch sw;
  auto r = costmodel::optimize_lambda(o.x);
  Json res = breakdown_json(r.params, r.cost);
  res["lambda"] = r.lambda;
  deliver(io::report_text("lambda", Json{{"x", o.x}}, std::move(res),
                          Json{{"wall_seconds", sw.seconds()}}),
          o.out_path, out);
  return 0;
}

// ------------------------------------------------------ validate-geometry

struct GeoOpts {
  std::uint64_t seed = 7;
  std::string out_path;
};

inline int cmd_validate_geometry(const GeoOpts& o, std::ostream& out, std::ostream& err) {
  using std::numbers::pi;
  Stopwatch sw;
  Checker ck;

  ck.near("theta_star_pi_over_3", geometry::theta_star(Angle{pi / 3}).rad, 1.2310, 1e-3);
  // pi/3 itself is not representable; equality holds at machine rounding
  ck.at_most("theta_star_pi_over_2_abs_err",
             std::abs(geometry::theta_star(Angle{pi / 2}).rad - pi / 3),
             std::ldexp(1.0, -51));

  {  // reducing iff the residual angle clears theta*, on cap borders
    const std::size_t d = 32;
    Rng rng = derive_rng(o.seed, 0x9e0ull);
    std::size_t disagreements = 0;
    for (double alpha : {1.06, 1.2, pi / 2}) {
      double ts = geometry::theta_star(Angle{alpha}).rad;
      auto s = geometry::sample_sphere(d, rng);
      for (int rep = 0; rep < 3400; ++rep) {
        auto x0 = geometry::sample_cap_border(s, Angle{alpha}, rng);
        auto x1 = geometry::sample_cap_border(s, Angle{alpha}, rng);
        std::vector<double> diff(d);
        for (std::size_t i = 0; i < d; ++i) diff[i] = x0.coords[i] - x1.coords[i];
        bool reduces = norm(diff) <= 1.0;
        double theta = geometry::angle_between(geometry::residual_decompose(x0, s).y,
                                               geometry::residual_decompose(x1, s).y)
                           .rad;
        if (reduces != (theta <= ts)) ++disagreements;
      }
    }
    ck.at_most("reduction_equivalence_disagreements", static_cast<double>(disagreements), 0.0);
  }

  {  // cap-mass log-slope across d recovers log2 sin alpha; the O(log d)/d
     // term costs about 0.04 absolute at these d, hence the 0.05 margin
    Rng rng = derive_rng(o.seed, 0x510e5ull);
    for (double alpha : {0.9, 1.1, 1.3}) {
      const std::array<double, 4> ds = {12, 16, 20, 24};
      std::array<double, 4> logs{};
      for (std::size_t i = 0; i < ds.size(); ++i) {
        auto est = geometry::mc_cap_ratio(static_cast<std::size_t>(ds[i]), Angle{alpha},
                                          2000000, rng);
        logs[i] = std::log2(est.value);
      }
      double mx = 0, my = 0;
      for (std::size_t i = 0; i < ds.size(); ++i) mx += ds[i], my += logs[i];
      mx /= ds.size(), my /= ds.size();
      double sxy = 0, sxx = 0;
      for (std::size_t i = 0; i < ds.size(); ++i) {
        sxy += (ds[i] - mx) * (logs[i] - my);
        sxx += (ds[i] - mx) * (ds[i] - mx);
      }
      ck.near("cap_log_slope_alpha_" + fmt4(alpha), sxy / sxx, std::log2(std::sin(alpha)),
              0.05);
    }
  }

  {  // a wedge with zero separation is the cap itself
    Rng rc = derive_rng(o.seed, 0x3d9e1ull);
    Rng rw = derive_rng(o.seed, 0x3d9e2ull);
    auto cap = geometry::mc_cap_ratio(14, Angle{1.15}, 600000, rc);
    auto wedge = geometry::mc_wedge_ratio(14, Angle{1.15}, Angle{0.0}, 600000, rw);
    ck.at_most("wedge_zero_identity_abs_diff", std::abs(wedge.value - cap.value),
               3.0 * std::hypot(cap.std_err, wedge.std_err));
  }

  {  // multiplicative Chernoff at delta = 1: Pr[hits >= 2E] <= exp(-E/3)
    const std::size_t d = 20;
    const double alpha = 1.0;
    Rng rng = derive_rng(o.seed, 0xc4e2ull);
    double p = geometry::mc_cap_ratio(d, Angle{alpha}, 2000000, rng).value;
    auto M = static_cast<std::size_t>(std::llround(8.0 / p));
    std::vector<SpherePoint> centers;
    centers.reserve(M);
    for (std::size_t i = 0; i < M; ++i) centers.push_back(geometry::sample_sphere(d, rng));
    double expected = static_cast<double>(M) * p;
    const std::size_t trials = 10000;
    std::size_t exceed = 0;
    double ca = std::cos(alpha);
    for (std::size_t t = 0; t < trials; ++t) {
      auto x = geometry::sample_sphere(d, rng);
      std::size_t hits = 0;
      for (const auto& cpt : centers)
        if (dot(x.coords, cpt.coords) >= ca) ++hits;
      if (static_cast<double>(hits) >= 2.0 * expected) ++exceed;
    }
    double freq = static_cast<double>(exceed) / static_cast<double>(trials);
    double bound = std::exp(-expected / 3.0);
    double se = std::sqrt(bound * (1.0 - bound) / static_cast<double>(trials));
    ck.at_most("chernoff_exceedance_freq", freq, bound + 3.0 * se);
  }

  return finish_checks("validate-geometry", Json{{"seed", o.seed}}, ck, sw, o.out_path, out,
                       err);
}

// ---------------------------------------------------------- walk-validate

struct WalkValOpts {
  std::size_t d = 40;
  double c = 0.45, c1 = 0.40, c2 = 0.20, rho = -1.0;
  std::size_t trials = 1000;
  std::size_t pool_n = 0;  // 0 = the full list size at this dimension
  std::size_t updates = 100;
  std::uint64_t seed = 9;
  bool check = false;
  std::string out_path;
};

// normalized J(4,2) walk matrix diagonalized by cyclic Jacobi sweeps; an
// explicit spectral reference independent of the closed-form gap
inline double johnson_j42_gap_explicit() {
  std::vector<unsigned> verts;
  for (unsigned m = 0; m < 16; ++m)
    if (std::popcount(m) == 2) verts.push_back(m);
  double a[6][6] = {};
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j)
      if (i != j && std::popcount(verts[i] & verts[j]) == 1) a[i][j] = 0.25;
  for (int sweep = 0; sweep < 64; ++sweep)
    for (std::size_t p = 0; p < 6; ++p)
      for (std::size_t q = p + 1; q < 6; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        double phi = 0.5 * std::atan2(2.0 * a[p][q], a[q][q] - a[p][p]);
        double cr = std::cos(phi), sr = std::sin(phi);
        for (std::size_t k = 0; k < 6; ++k) {
          double akp = a[k][p], akq = a[k][q];
          a[k][p] = cr * akp - sr * akq;
          a[k][q] = sr * akp + cr * akq;
        }
        for (std::size_t k = 0; k < 6; ++k) {
          double apk = a[p][k], aqk = a[q][k];
          a[p][k] = cr * apk - sr * aqk;
          a[q][k] = sr * apk + cr * aqk;
        }
      }
  std::array<double, 6> eig{};
  for (std::size_t i = 0; i < 6; ++i) eig[i] = a[i][i];
  std::sort(eig.begin(), eig.end(), std::greater<>());
  return 1.0 - eig[1];
}

inline int cmd_walk_validate(const WalkValOpts& o, std::ostream& out, std::ostream& err) {
  Stopwatch sw;
  auto base = walksim::make_walk_config(o.c, o.c1, o.c2, 0.0);
  double rho = o.rho < 0.0 ? base.rho0 : o.rho;
  auto cfg = walksim::make_walk_config(o.c, o.c1, o.c2, rho);
  auto shape = walksim::vertex_shape(cfg, o.d);
  double n_log2 = static_cast<double>(o.d) * kHalfLog2FourThirds;
  std::size_t pool_n =
      o.pool_n ? o.pool_n
               : std::max<std::size_t>(shape.vertex_size + 2,
                                       static_cast<std::size_t>(std::llround(std::exp2(n_log2))));
  Rng rng = derive_rng(o.seed, 0xa11da7ull);
  std::vector<SpherePoint> pool;
  pool.reserve(pool_n);
  for (std::size_t i = 0; i < pool_n; ++i) pool.push_back(geometry::sample_sphere(o.d, rng));

  walksim::WalkCounters ct;
  auto est = walksim::estimate_epsilon(pool, cfg, o.trials, rng, &ct);
  double storage_mean =
      static_cast<double>(ct.setup_ops) / static_cast<double>(ct.vertices_sampled);

  // update cost along one maintained walk
  std::vector<std::size_t> all(pool.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<std::size_t> ids;
  std::sample(all.begin(), all.end(), std::back_inserter(ids), shape.vertex_size, rng);
  std::vector<SpherePoint> subset;
  for (std::size_t id : ids) subset.push_back(pool[id]);
  auto code2 = walksim::sample_inner_code(subset, shape, rng);
  auto v = walksim::build_vertex(pool, std::move(ids), code2, shape, nullptr);
  walksim::WalkCounters uc;
  double update_sum = 0.0, candidates_max = 0.0;
  std::uniform_int_distribution<std::size_t> pick_pool(0, pool.size() - 1);
  for (std::size_t step = 0; step < o.updates; ++step) {
    std::uniform_int_distribution<std::size_t> pick_member(0, v.members.size() - 1);
    std::size_t y_old = v.members[pick_member(rng)];
    std::size_t y_new = pick_pool(rng);
    while (std::binary_search(v.members.begin(), v.members.end(), y_new))
      y_new = pick_pool(rng);
    std::size_t before = uc.update_ops;
    v = walksim::vertex_update(v, y_old, y_new, pool, code2, shape, &uc);
    auto delta = static_cast<double>(uc.update_ops - before);
    update_sum += delta;
    candidates_max = std::max(candidates_max, delta);
  }
  double model = walksim::epsilon_model(pool, cfg, rng);

  Json res{{"epsilon_empirical", est.value},
           {"epsilon_model", model},
           {"storage_mean", storage_mean},
           {"update_mean", update_sum / static_cast<double>(o.updates)},
           {"candidates_max", candidates_max}};
  Json params{{"d", o.d},     {"c", o.c},
              {"c1", o.c1},   {"c2", o.c2},
              {"rho", rho},   {"trials", o.trials},
              {"pool", pool_n}, {"updates", o.updates},
              {"seed", o.seed}, {"check", o.check}};

  if (o.check) {
    Checker ck;
    {  // incremental marked bit against from-scratch rebuilds, walks with
       // planted reducing pairs so marked states are actually visited
      std::size_t mismatches = 0, marked_steps = 0;
      std::size_t n_back = std::max<std::size_t>(16, shape.vertex_size);
      for (std::uint64_t s = 0; s < 20; ++s) {
        Rng r = derive_rng(o.seed, 0x5c4a7ull, s);
        std::vector<SpherePoint> p2;
        for (std::size_t i = 0; i < n_back; ++i) p2.push_back(geometry::sample_sphere(o.d, r));
        for (int k = 0; k < 12; ++k) {
          auto x = geometry::sample_sphere(o.d, r);
          auto g = geometry::sample_sphere(o.d, r);
          double gx = dot(g.coords, x.coords);
          std::vector<double> u(o.d);
          for (std::size_t i = 0; i < o.d; ++i) u[i] = g.coords[i] - gx * x.coords[i];
          double un = norm(u);
          double delta = 0.8 * shape.theta_star_d.rad;
          std::vector<double> y(o.d);
          for (std::size_t i = 0; i < o.d; ++i)
            y[i] = std::cos(delta) * x.coords[i] + std::sin(delta) * u[i] / un;
          p2.push_back(x);
          p2.push_back(make_sphere_point(std::move(y)));
        }
        auto c2 = walksim::sample_inner_code(p2, shape, r);
        std::vector<std::size_t> a2(p2.size());
        std::iota(a2.begin(), a2.end(), 0);
        std::vector<std::size_t> mids;
        std::sample(a2.begin(), a2.end(), std::back_inserter(mids), shape.vertex_size, r);
        auto w = walksim::build_vertex(p2, std::move(mids), c2, shape, nullptr);
        std::uniform_int_distribution<std::size_t> pick2(0, p2.size() - 1);
        for (int step = 0; step < 100; ++step) {
          std::uniform_int_distribution<std::size_t> pm(0, w.members.size() - 1);
          std::size_t y_old = w.members[pm(r)];
          std::size_t y_new = pick2(r);
          while (std::binary_search(w.members.begin(), w.members.end(), y_new))
            y_new = pick2(r);
          w = walksim::vertex_update(w, y_old, y_new, p2, c2, shape, nullptr);
          auto scratch = walksim::build_vertex(p2, w.members, c2, shape, nullptr);
          mismatches += w.marked != scratch.marked;
          marked_steps += w.marked;
        }
      }
      ck.at_most("incremental_marked_mismatches", static_cast<double>(mismatches), 0.0);
      ck.at_least("marked_steps_visited", static_cast<double>(marked_steps), 1.0);
    }
    {  // empirical epsilon tracks the finite-d model at rho0 and rho0/2,
       // and their ratio tracks the density discount
      auto cfg_a = walksim::make_walk_config(o.c, o.c1, o.c2, base.rho0);
      auto cfg_b = walksim::make_walk_config(o.c, o.c1, o.c2, base.rho0 / 2.0);
      Rng r = derive_rng(o.seed, 0xe5217ull);
      std::size_t tr = std::max<std::size_t>(o.trials, 1000);
      auto ea = walksim::estimate_epsilon(pool, cfg_a, tr, r);
      auto eb = walksim::estimate_epsilon(pool, cfg_b, tr, r);
      double ma = walksim::epsilon_model(pool, cfg_a, r);
      double mb = walksim::epsilon_model(pool, cfg_b, r);
      ck.at_least("epsilon_rho0_positive", ea.value, 1e-12);
      ck.at_least("epsilon_rho0_half_positive", eb.value, 1e-12);
      if (ea.value > 0.0 && eb.value > 0.0) {
        ck.bounded("epsilon_vs_model_rho0", ea.value / ma, 0.25, 4.0);
        ck.bounded("epsilon_vs_model_rho0_half", eb.value / mb, 0.25, 4.0);
        double want = std::exp2(-(base.rho0 / 2.0) * n_log2);
        ck.bounded("epsilon_ratio_vs_density_discount", (eb.value / ea.value) / want, 0.25,
                   4.0);
      }
    }
    ck.at_most("johnson_gap_J42_abs_err",
               std::abs(johnson_j42_gap_explicit() - walksim::johnson_gap(4, 2)), 1e-9);
    res["checks"] = ck.rows;
    res["all_pass"] = ck.all_pass;
    deliver(io::report_text("walk-validate", std::move(params), std::move(res),
                            Json{{"wall_seconds", sw.seconds()}}),
            o.out_path, out);
    if (!ck.all_pass) {
      err << "walk-validate: at least one check failed\n";
      return 2;
    }
    return 0;
  }

  deliver(io::report_text("walk-validate", std::move(params), std::move(res),
                          Json{{"wall_seconds", sw.seconds()}}),
          o.out_path, out);
  return 0;
}

// ----------------------------------------------------------------- bench

struct BenchOpts {
  std::string suite = "strategy";
  std::size_t d = 36;
  double c = 0.45, c1 = 0.40, c2 = 0.20, rho = -1.0;
  int buckets = 20;
  int fill = 30;
  int plant = 10;
  unsigned bits = 8;
  std::uint64_t seed = 5;
  int threads = 1;
  bool check = false;
  std::string out_path;
};

inline std::vector<std::int64_t> canonical_coeffs(std::vector<std::int64_t> c) {
  for (auto v : c) {
    if (v > 0) break;
    if (v < 0) {
      for (auto& x : c) x = -x;
      break;
    }
  }
  return c;
}

// integer points in a cap around `center` at radius about 1000, plus planted
// reducing pairs (partner = point minus a short integer delta)
inline std::vector<lattice::LatticePoint> planted_bucket(std::size_t d, Angle alpha,
                                                         const SpherePoint& center, int n_fill,
                                                         int n_plant, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto in_cap = [&](const std::vector<double>& e) {
    double nn = norm(e);
    return nn > 0.0 && dot(e, center.coords) / nn >= std::cos(alpha.rad);
  };
  auto int_point = [](std::vector<std::int64_t> coeffs) {
    lattice::LatticePoint p;
    p.embed.assign(coeffs.begin(), coeffs.end());
    p.coeffs = std::move(coeffs);
    p.norm = norm(p.embed);
    return p;
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
    for (auto& w : dir) w = gauss(rng);
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

inline int cmd_bench(const BenchOpts& o, std::ostream& out, std::ostream& err) {
  Stopwatch sw;
  double n_log2 = static_cast<double>(o.d) * kHalfLog2FourThirds;
  auto dp = costmodel::derive(o.c, o.c1, o.c2);
  double rho = o.rho < 0.0 ? dp.rho0 : o.rho;
  auto walk = walksim::make_walk_config(o.c, o.c1, o.c2, rho);
  Json params{{"suite", o.suite}, {"d", o.d},         {"c", o.c},
              {"c1", o.c1},       {"c2", o.c2},       {"rho", rho},
              {"seed", o.seed},   {"threads", o.threads}, {"check", o.check}};

  if (o.suite == "strategy") {
    params["buckets"] = o.buckets;
    params["fill"] = o.fill;
    params["plant"] = o.plant;
    Angle alpha_d = geometry::cap_angle_for_mass(o.d, std::exp2(-(1.0 - o.c) * n_log2));
    std::size_t violations = 0, truth_total = 0, got_total = 0;
    double recall_sum = 0.0;
    int recall_buckets = 0;
    double all_s = 0.0, two_s = 0.0;
    for (int t = 0; t < o.buckets; ++t) {
      Rng rng = derive_rng(o.seed + static_cast<std::uint64_t>(t), 0x8ecaull);
      auto center = geometry::sample_sphere(o.d, rng);
      auto bucket = planted_bucket(o.d, alpha_d, center, o.fill, o.plant, rng);
      double rmax = 0.0;
      for (const auto& p : bucket) rmax = std::max(rmax, p.norm);
      double limit = 0.97 * rmax;

      Stopwatch ta;
      auto truth = sieve::find_all_solutions_allpairs(bucket, limit);
      all_s += ta.seconds();
      Rng r2 = derive_rng(o.seed + 1000 + static_cast<std::uint64_t>(t), 0xabcdull);
      Stopwatch tb;
      auto got = sieve::find_all_solutions_twolevel(bucket, center, walk, limit, r2);
      two_s += tb.seconds();

      std::set<std::tuple<std::size_t, std::size_t, int>> truth_ids;
      std::set<std::vector<std::int64_t>> truth_keys;
      for (const auto& pr : truth) {
        truth_ids.emplace(pr.i, pr.j, pr.sign);
        truth_keys.insert(canonical_coeffs(pr.result.coeffs));
      }
      std::set<std::vector<std::int64_t>> hit;
      for (const auto& pr : got) {
        if (!truth_ids.count({pr.i, pr.j, pr.sign})) ++violations;
        auto key = canonical_coeffs(pr.result.coeffs);
        if (truth_keys.count(key)) hit.insert(std::move(key));
      }
      truth_total += truth.size();
      got_total += got.size();
      if (!truth_keys.empty()) {
        recall_sum += static_cast<double>(hit.size()) / static_cast<double>(truth_keys.size());
        ++recall_buckets;
      }
    }
    double recall =
        recall_buckets ? recall_sum / static_cast<double>(recall_buckets) : 0.0;
    Json res{{"soundness_violations", violations},
             {"recall_mean", recall},
             {"allpairs_pairs", truth_total},
             {"twolevel_pairs", got_total},
             {"buckets_scored", recall_buckets}};
    if (o.check) {
      Checker ck;
      ck.at_most("twolevel_subset_of_allpairs_violations", static_cast<double>(violations),
                 0.0);
      ck.at_least("twolevel_recall_mean", recall, 0.40);
      res["checks"] = ck.rows;
      res["all_pass"] = ck.all_pass;
      deliver(io::report_text("bench", std::move(params), std::move(res),
                              Json{{"wall_seconds", sw.seconds()},
                                   {"allpairs_seconds", all_s},
                                   {"twolevel_seconds", two_s}}),
              o.out_path, out);
      if (!ck.all_pass) {
        err << "bench: at least one check failed\n";
        return 2;
      }
      return 0;
    }
    deliver(io::report_text("bench", std::move(params), std::move(res),
                            Json{{"wall_seconds", sw.seconds()},
                                 {"allpairs_seconds", all_s},
                                 {"twolevel_seconds", two_s}}),
            o.out_path, out);
    return 0;
  }

  // step suite: one sieve step per strategy on a fresh sampled list
  params["bits"] = o.bits;
  auto b = lattice::generate_random_basis(o.d, o.bits, o.seed);
  auto red = lattice::lll_reduce(b, 0.99);
  auto g = lattice::gso(red.basis);
  double s = lattice::klein_default_width(g);
  Rng rng = derive_rng(o.seed, 0xbe4c4ull);
  auto target = static_cast<std::size_t>(
      std::max<long long>(8, std::llround(6.0 * std::exp2(n_log2))));
  std::map<std::vector<std::int64_t>, lattice::LatticePoint> acc;
  for (std::size_t tries = 0; acc.size() < target && tries < 400 * target; ++tries) {
    auto p = lattice::klein_sample(red.basis, g, s, rng);
    auto key = canonical_coeffs(p.coeffs);
    if (key != p.coeffs) p = lattice::make_point(red.basis, key);
    acc.emplace(std::move(key), std::move(p));
  }
  std::vector<lattice::LatticePoint> L;
  double R = 0.0;
  for (auto& [k, p] : acc) {
    R = std::max(R, p.norm);
    L.push_back(std::move(p));
  }
  Json res{{"list_size", L.size()}, {"radius", R}};
  Json timing{{"wall_seconds", 0.0}};
  for (std::string strat : {"allpairs", "twolevel"}) {
    sieve::SieveConfig cfg;
    cfg.c = o.c;
    cfg.seed = o.seed;
    if (strat == "twolevel") {
      cfg.strategy = sieve::Strategy::TwoLevel;
      cfg.walk = walk;
    }
    Rng step_rng = derive_rng(o.seed, 0x57e9ull);
    Stopwatch ts;
    auto step = sieve::sieve_step(L, R, cfg, step_rng, o.threads);
    timing[strat + "_seconds"] = ts.seconds();
    res[strat + "_codes_used"] = step.codes_used;
    res[strat + "_pairs_tested"] = step.pairs_tested;
    res[strat + "_pairs_found"] = step.pairs_found;
    res[strat + "_out_size"] = step.points.size();
    res[strat + "_reached_target"] = step.reached_target;
  }
  timing["wall_seconds"] = sw.seconds();
  deliver(io::report_text("bench", std::move(params), std::move(res), std::move(timing)),
          o.out_path, out);
  return 0;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"lattice sieving toolkit: exponent models, validation suites, SVP solving"};
  app.require_subcommand(1);
  int rc = 0;

  detail::GenOpts gen;
  auto* sgen = app.add_subcommand("gen", "write a seeded random integer basis");
  sgen->add_option("--d", gen.d, "dimension")->required();
  sgen->add_option("--bits", gen.bits, "entry width in bits (default 10)");
  sgen->add_option("--seed", gen.seed, "generator seed (default 1)");
  sgen->add_option("--out", gen.out_path, "output path (default stdout)");
  sgen->callback([&] { rc = detail::cmd_gen(gen, out, err); });

  detail::SolveOpts solve;
  auto* ssolve = app.add_subcommand("solve", "run the sieve on a basis file");
  ssolve->add_option("--basis", solve.basis_path, "basis file, bracketed rows")->required();
  ssolve->add_option("--c", solve.c, "filter exponent (default 0.33)");
  ssolve->add_option("--gamma", solve.gamma, "radius shrink per step (default 0.97)");
  ssolve->add_option("--strategy", solve.strategy, "allpairs | twolevel (default allpairs)")
      ->check(CLI::IsMember({"allpairs", "twolevel"}));
  ssolve->add_option("--c1", solve.c1, "walk vertex exponent (twolevel)");
  ssolve->add_option("--c2", solve.c2, "inner filter exponent (twolevel)");
  ssolve->add_option("--rho", solve.rho, "inner density exponent (default rho0)");
  ssolve->add_option("--saturation-mult", solve.saturation_mult,
                     "list size multiplier (default 6)");
  ssolve->add_option("--max-rounds", solve.max_rounds, "round cap (default 200)");
  ssolve->add_option("--seed", solve.seed, "sieve seed (default 1)");
  ssolve->add_option("--threads", solve.threads, "worker threads (default 1)");
  ssolve->add_option("--report,--out", solve.report_path, "JSON report path (default stdout)");
  ssolve->callback([&] { rc = detail::cmd_solve(solve, out, err); });

  detail::OracleOpts oracle;
  auto* sor = app.add_subcommand("oracle", "check reference values against slow oracles");
  sor->add_option("--suite", oracle.suite, "cost | optimize | tradeoff | rpc | svp | all")
      ->check(CLI::IsMember({"cost", "optimize", "tradeoff", "rpc", "svp", "all"}));
  sor->add_option("--seed", oracle.seed, "query seed (default 7)");
  sor->add_option("--threads", oracle.threads, "worker threads for the svp suite");
  sor->add_option("--out", oracle.out_path, "JSON report path (default stdout)");
  sor->callback([&] { rc = detail::cmd_oracle(oracle, out, err); });

  detail::OptimizeOpts opt;
  auto* sopt = app.add_subcommand("optimize", "minimize the time exponent");
  sopt->add_option("--mode", opt.mode, "classical | grover | walk (default walk)")
      ->check(CLI::IsMember({"classical", "grover", "walk"}));
  sopt->add_option("--qmem-max", opt.qmem_max, "quantum memory budget, per-d exponent");
  sopt->add_option("--qram-max", opt.qram_max, "QRAM budget, per-d exponent");
  sopt->add_flag("--pin-rho0", opt.pin_rho0, "fix rho at the completeness point rho0");
  sopt->add_option("--out", opt.out_path, "JSON report path (default stdout)");
  sopt->callback([&] { rc = detail::cmd_optimize(opt, out, err); });

  detail::TradeoffOpts tr;
  auto* str = app.add_subcommand("tradeoff", "memory-budget curve as CSV");
  str->add_option("--kind", tr.kind, "qram | qmem (default qram)")
      ->check(CLI::IsMember({"qram", "qmem"}));
  str->add_option("--points", tr.points, "evenly spaced budgets (default 40)");
  str->add_option("--pins", tr.pins, "comma-separated budgets, overrides --points");
  str->add_option("--out", tr.out_path, "CSV path (default stdout)");
  str->callback([&] { rc = detail::cmd_tradeoff(tr, out, err); });

  detail::LambdaOpts la;
  auto* sla = app.add_subcommand("lambda", "optimize time with QRAM priced at degree x");
  sla->add_option("--x", la.x, "QRAM price exponent (default 1/3)");
  sla->add_option("--out", la.out_path, "JSON report path (default stdout)");
  sla->callback([&] { rc = detail::cmd_lambda(la, out, err); });

  detail::GeoOpts geo;
  auto* sgeo = app.add_subcommand("validate-geometry", "sphere-geometry property suite");
  sgeo->add_option("--seed", geo.seed, "sampling seed (default 7)");
  sgeo->add_option("--out", geo.out_path, "JSON report path (default stdout)");
  sgeo->callback([&] { rc = detail::cmd_validate_geometry(geo, out, err); });

  detail::WalkValOpts wv;
  auto* swv = app.add_subcommand("walk-validate", "measure walk-vertex statistics");
  swv->add_option("--d", wv.d, "dimension (default 40)");
  swv->add_option("--c", wv.c, "filter exponent (default 0.45)");
  swv->add_option("--c1", wv.c1, "vertex exponent (default 0.40)");
  swv->add_option("--c2", wv.c2, "inner filter exponent (default 0.20)");
  swv->add_option("--rho", wv.rho, "inner density exponent (default rho0)");
  swv->add_option("--trials", wv.trials, "marked-fraction trials (default 1000)");
  swv->add_option("--pool", wv.pool_n, "pool size (default: list size at d)");
  swv->add_option("--updates", wv.updates, "walk steps for update stats (default 100)");
  swv->add_option("--seed", wv.seed, "sampling seed (default 9)");
  swv->add_flag("--check", wv.check, "also run the walk-structure checks");
  swv->add_option("--out", wv.out_path, "JSON report path (default stdout)");
  swv->callback([&] { rc = detail::cmd_walk_validate(wv, out, err); });

  detail::BenchOpts be;
  auto* sbe = app.add_subcommand("bench", "strategy soundness/recall and step timing");
  sbe->add_option("--suite", be.suite, "strategy | step (default strategy)")
      ->check(CLI::IsMember({"strategy", "step"}));
  sbe->add_option("--d", be.d, "dimension (default 36)");
  sbe->add_option("--c", be.c, "filter exponent (default 0.45)");
  sbe->add_option("--c1", be.c1, "vertex exponent (default 0.40)");
  sbe->add_option("--c2", be.c2, "inner filter exponent (default 0.20)");
  sbe->add_option("--rho", be.rho, "inner density exponent (default rho0)");
  sbe->add_option("--buckets", be.buckets, "planted buckets (default 20)");
  sbe->add_option("--fill", be.fill, "background points per bucket (default 30)");
  sbe->add_option("--plant", be.plant, "planted pairs per bucket (default 10)");
  sbe->add_option("--bits", be.bits, "basis entry width for the step suite (default 8)");
  sbe->add_option("--seed", be.seed, "sampling seed (default 5)");
  sbe->add_option("--threads", be.threads, "worker threads (default 1)");
  sbe->add_flag("--check", be.check, "enforce soundness and the recall floor");
  sbe->add_option("--out", be.out_path, "JSON report path (default stdout)");
  sbe->callback([&] { rc = detail::cmd_bench(be, out, err); });

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("sievekit");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "sievekit: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "sievekit: " << e.what() << "\n";
    return 1;
  }
  return rc;
}

inline int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  args.reserve(argc > 0 ? static_cast<std::size_t>(argc - 1) : 0);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace sievekit::cli
