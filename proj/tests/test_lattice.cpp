#include <catch2/catch_amalgamated.hpp>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numbers>

#include "sievekit/common.hpp"
#include "sievekit/lattice.hpp"

using namespace sievekit;
using namespace sievekit::lattice;
using boost::multiprecision::cpp_int;

namespace {

// exact |det B|^2 through fraction-free elimination of the integer Gram matrix
cpp_int gram_det(const Basis& b) {
  std::size_t d = b.d;
  std::vector<std::vector<cpp_int>> m(d, std::vector<cpp_int>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      cpp_int s = 0;
      for (std::size_t l = 0; l < d; ++l) s += cpp_int(b.rows[i][l]) * b.rows[j][l];
      m[i][j] = s;
    }
  cpp_int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < d; ++k) {
    if (m[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < d && m[p][k] == 0) ++p;
      if (p == d) return 0;
      std::swap(m[p], m[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < d; ++i)
      for (std::size_t j = k + 1; j < d; ++j)
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[d - 1][d - 1];
}

// plain Gram-Schmidt, written independently of the library routine
struct PlainGso {
  std::vector<std::vector<double>> star, mu;
};

PlainGso plain_gso(const Basis& b) {
  std::size_t d = b.d;
  PlainGso g;
  g.star.assign(d, std::vector<double>(d, 0.0));
  g.mu.assign(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) g.star[i][j] = static_cast<double>(b.rows[i][j]);
    for (std::size_t k = 0; k < i; ++k) {
      double num = 0.0, den = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        num += static_cast<double>(b.rows[i][j]) * g.star[k][j];
        den += g.star[k][j] * g.star[k][j];
      }
      g.mu[i][k] = num / den;
      for (std::size_t j = 0; j < d; ++j) g.star[i][j] -= g.mu[i][k] * g.star[k][j];
    }
    g.mu[i][i] = 1.0;
  }
  return g;
}

bool lovasz_holds(const Basis& b, double delta) {
  auto g = plain_gso(b);
  std::size_t d = b.d;
  auto n2 = [&](std::size_t i) {
    double s = 0.0;
    for (double x : g.star[i]) s += x * x;
    return s;
  };
  for (std::size_t k = 1; k < d; ++k) {
    for (std::size_t j = 0; j < k; ++j)
      if (std::abs(g.mu[k][j]) > 0.5 + 1e-9) return false;
    double m = g.mu[k][k - 1];
    if (n2(k) < (delta - m * m) * n2(k - 1) - 1e-6) return false;
  }
  return true;
}

__int128 exact_norm2(const Basis& b, const std::vector<std::int64_t>& coeffs) {
  __int128 n2 = 0;
  for (std::size_t j = 0; j < b.d; ++j) {
    __int128 e = 0;
    for (std::size_t i = 0; i < b.d; ++i)
      e += static_cast<__int128>(coeffs[i]) * b.rows[i][j];
    n2 += e * e;
  }
  return n2;
}

// exhaustive search over the coefficient box |coeff_i| <= r
__int128 box_min_norm2(const Basis& b, std::int64_t r) {
  std::size_t d = b.d;
  std::vector<std::int64_t> c(d, -r);
  __int128 best = -1;
  for (;;) {
    bool zero = true;
    for (auto v : c)
      if (v) {
        zero = false;
        break;
      }
    if (!zero) {
      __int128 n2 = exact_norm2(b, c);
      if (best < 0 || n2 < best) best = n2;
    }
    std::size_t i = 0;
    while (i < d && c[i] == r) c[i++] = -r;
    if (i == d) break;
    ++c[i];
  }
  return best;
}

}  // namespace

TEST_CASE("basis text format round trips") {
  auto b = parse_basis("[[1 0][0 1]]");
  REQUIRE(b.d == 2);
  CHECK(b.rows[0] == std::vector<std::int64_t>{1, 0});
  CHECK(b.rows[1] == std::vector<std::int64_t>{0, 1});

  auto r = generate_random_basis(10, 8, 11);
  auto back = parse_basis(write_basis(r));
  CHECK(back.rows == r.rows);

  // parse accepts loose whitespace; write emits one canonical form
  std::string loose = "[ [ 3 -1 ]\n [ 2  5 ] ]";
  auto p = parse_basis(loose);
  CHECK(write_basis(p) == "[[3 -1][2 5]]");
  CHECK(write_basis(parse_basis(write_basis(p))) == write_basis(p));

  CHECK_THROWS_AS(parse_basis("[[1 0][2 0]]"), std::invalid_argument);   // singular
  CHECK_THROWS_AS(parse_basis("[[1 0][0 1 2]]"), std::invalid_argument); // not square
  CHECK_THROWS_AS(parse_basis("[[1 a][0 1]]"), std::invalid_argument);   // bad token
  CHECK_THROWS_AS(parse_basis("[[1 0][0 1]"), std::invalid_argument);    // unbalanced
  CHECK_THROWS_AS(parse_basis("[1 0 0 1]"), std::invalid_argument);      // no rows
  CHECK_THROWS_AS(parse_basis("[[1 0][0 1]]tail"), std::invalid_argument);
  CHECK_THROWS_AS(parse_basis("[]"), std::invalid_argument);             // empty
}

TEST_CASE("gram schmidt basics and the determinant identity") {
  auto id = parse_basis("[[1 0 0][0 1 0][0 0 1]]");
  auto g = gso(id);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(g.bstar_norms[i] == Catch::Approx(1.0).margin(1e-12));
    for (std::size_t j = 0; j < i; ++j) CHECK(g.mu[i][j] == Catch::Approx(0.0).margin(1e-12));
  }

  auto b2 = parse_basis("[[2 0][1 2]]");
  auto g2 = gso(b2);
  CHECK(g2.bstar_norms[0] == Catch::Approx(2.0).margin(1e-12));
  CHECK(g2.bstar_norms[1] == Catch::Approx(2.0).margin(1e-12));
  CHECK(g2.mu[1][0] == Catch::Approx(0.5).margin(1e-12));

  // reconstruction: rows = mu * star, with star rebuilt from mu and rows
  auto r = generate_random_basis(12, 8, 12);
  auto gr = gso(r);
  auto pg = plain_gso(r);
  for (std::size_t i = 0; i < r.d; ++i) {
    double n = 0.0;
    for (double x : pg.star[i]) n += x * x;
    CHECK(std::sqrt(n) == Catch::Approx(gr.bstar_norms[i]).epsilon(1e-9));
    for (std::size_t j = 0; j < r.d; ++j) {
      double rec = 0.0;
      for (std::size_t k = 0; k <= i; ++k) rec += gr.mu[i][k] * pg.star[k][j];
      CHECK(rec == Catch::Approx(static_cast<double>(r.rows[i][j])).margin(1e-6));
    }
  }

  // product of projected norms equals |det| (exact integer elimination oracle)
  auto b20 = generate_random_basis(20, 10, 13);
  auto g20 = gso(b20);
  double log_prod = 0.0;
  for (double x : g20.bstar_norms) log_prod += std::log(x);
  cpp_int det2 = gram_det(b20);
  REQUIRE(det2 > 0);
  double log_det = 0.5 * std::log(det2.convert_to<double>());
  CHECK(log_prod == Catch::Approx(log_det).epsilon(1e-9));

  CHECK_THROWS_AS(gso(Basis{2, {{1, 0}, {2, 0}}}), std::domain_error);
}

TEST_CASE("lll reduction") {
  SECTION("already reduced input is unchanged") {
    auto id = parse_basis("[[1 0][0 1]]");
    auto r = lll_reduce(id);
    CHECK(r.basis.rows == id.rows);
    CHECK(r.transform == IntMatrix{{1, 0}, {0, 1}});
  }
  SECTION("collapses a badly skewed pair") {
    auto b = parse_basis("[[1 0][1000000 1]]");
    auto r = lll_reduce(b);
    double n0 = std::hypot(static_cast<double>(r.basis.rows[0][0]),
                           static_cast<double>(r.basis.rows[0][1]));
    CHECK(n0 == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("knapsack-style basis satisfies the Lovasz condition") {
    // identity block with a heavy appended-weights column plus a modulus row
    std::size_t d = 25;
    Basis b;
    b.d = d;
    b.rows.assign(d, std::vector<std::int64_t>(d, 0));
    Rng rng = derive_rng(11, 2);
    std::uniform_int_distribution<std::int64_t> w(1, (1 << 20) - 1);
    for (std::size_t i = 0; i + 1 < d; ++i) {
      b.rows[i][i] = 1;
      b.rows[i][d - 1] = w(rng);
    }
    b.rows[d - 1][d - 1] = std::int64_t{1} << 22;

    auto r = lll_reduce(b, 0.99);
    CHECK(lovasz_holds(r.basis, 0.99));

    // same lattice: rows == transform * input, transform unimodular
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        __int128 s = 0;
        for (std::size_t k = 0; k < d; ++k)
          s += static_cast<__int128>(r.transform[i][k]) * b.rows[k][j];
        CHECK(static_cast<std::int64_t>(s) == r.basis.rows[i][j]);
      }
    CHECK(gram_det(r.basis) == gram_det(b));
  }
  SECTION("delta domain") {
    auto id = parse_basis("[[1 0][0 1]]");
    CHECK_THROWS_AS(lll_reduce(id, 0.25), std::domain_error);
    CHECK_THROWS_AS(lll_reduce(id, 1.0), std::domain_error);
  }
}

TEST_CASE("klein sampler") {
  SECTION("per-coordinate law matches the one-dimensional discrete Gaussian") {
    auto b = parse_basis("[[1 0 0 0 0 0 0 0][0 1 0 0 0 0 0 0][0 0 1 0 0 0 0 0][0 0 0 1 0 0 0 0]"
                         "[0 0 0 0 1 0 0 0][0 0 0 0 0 1 0 0][0 0 0 0 0 0 1 0][0 0 0 0 0 0 0 1]]");
    auto g = gso(b);
    double s = 10.0;
    // exact window moments of exp(-pi k^2 / s^2)
    double den = 0.0, num = 0.0;
    for (int k = -80; k <= 80; ++k) {
      double wgt = std::exp(-std::numbers::pi * k * k / (s * s));
      den += wgt;
      num += static_cast<double>(k) * k * wgt;
    }
    double exact_var = num / den;

    Rng rng = derive_rng(11, 3);
    std::size_t n = 100000;
    std::vector<double> sum(8, 0.0), sum2(8, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      auto p = klein_sample(b, g, s, rng);
      bool zero = true;
      for (auto c : p.coeffs) zero = zero && c == 0;
      REQUIRE(!zero);
      for (std::size_t i = 0; i < 8; ++i) {
        auto ci = static_cast<double>(p.coeffs[i]);
        sum[i] += ci;
        sum2[i] += ci * ci;
      }
    }
    for (std::size_t i = 0; i < 8; ++i) {
      double mean = sum[i] / static_cast<double>(n);
      double var = sum2[i] / static_cast<double>(n) - mean * mean;
      CHECK(std::abs(mean) < 0.15);
      CHECK(var == Catch::Approx(exact_var).epsilon(0.10));
    }
  }
  SECTION("outputs are genuine lattice points") {
    auto b = generate_random_basis(10, 8, 14);
    auto g = gso(b);
    Rng rng = derive_rng(11, 4);
    for (int t = 0; t < 50; ++t) {
      auto p = klein_sample(b, g, klein_default_width(g), rng);
      auto q = make_point(b, p.coeffs);
      for (std::size_t j = 0; j < b.d; ++j) CHECK(p.embed[j] == q.embed[j]);
      CHECK(p.norm == q.norm);
    }
  }
  SECTION("seed separation") {
    auto b = generate_random_basis(10, 8, 14);
    auto g = gso(b);
    Rng r1 = derive_rng(11, 5), r2 = derive_rng(11, 6);
    int diff = 0;
    for (int t = 0; t < 20; ++t) {
      auto p1 = klein_sample(b, g, klein_default_width(g), r1);
      auto p2 = klein_sample(b, g, klein_default_width(g), r2);
      if (p1.coeffs != p2.coeffs) ++diff;
    }
    CHECK(diff > 0);
  }
}

TEST_CASE("shortest vector enumeration") {
  SECTION("identity lattice") {
    auto b = parse_basis("[[1 0 0][0 1 0][0 0 1]]");
    auto p = enumerate_shortest(b);
    CHECK(p.norm == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("hand-checkable 2x2 against a coefficient box") {
    auto b = parse_basis("[[2 0][1 2]]");
    auto p = enumerate_shortest(b);
    CHECK(p.norm == Catch::Approx(2.0).margin(1e-12));
    CHECK(exact_norm2(b, p.coeffs) == box_min_norm2(b, 3));
  }
  SECTION("exhaustive box agreement in six dimensions") {
    auto b = generate_random_basis(6, 5, 15);
    auto r = lll_reduce(b);
    auto p = enumerate_shortest(r.basis);
    CHECK(exact_norm2(r.basis, p.coeffs) == box_min_norm2(r.basis, 5));
  }
  SECTION("norm is a lattice invariant under reduction") {
    auto b = generate_random_basis(10, 6, 16);
    auto r = lll_reduce(b);
    auto p0 = enumerate_shortest(b);
    auto p1 = enumerate_shortest(r.basis);
    CHECK(exact_norm2(b, p0.coeffs) == exact_norm2(r.basis, p1.coeffs));
  }
  SECTION("twenty dimensions after reduction") {
    auto b = generate_random_basis(20, 8, 17);
    auto r = lll_reduce(b);
    auto p = enumerate_shortest(r.basis);
    double min_row = std::numeric_limits<double>::infinity();
    for (const auto& row : r.basis.rows) {
      double n2 = 0.0;
      for (auto v : row) n2 += static_cast<double>(v) * static_cast<double>(v);
      min_row = std::min(min_row, std::sqrt(n2));
    }
    CHECK(p.norm <= min_row * (1.0 + 1e-12));
    // with a reduced basis the optimum sits in a small coefficient box
    for (auto c : p.coeffs) CHECK(std::abs(c) <= 5);
  }
  SECTION("dimension guard") {
    auto b = generate_random_basis(46, 4, 18);
    CHECK_THROWS_AS(enumerate_shortest(b), std::domain_error);
  }
}

TEST_CASE("lattice points recompute their embedding from coefficients") {
  auto b = generate_random_basis(9, 9, 19);
  Rng rng = derive_rng(11, 7);
  std::uniform_int_distribution<std::int64_t> coeff(-7, 7);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::int64_t> c(b.d);
    for (auto& v : c) v = coeff(rng);
    auto p = make_point(b, c);
    for (std::size_t j = 0; j < b.d; ++j) {
      __int128 e = 0;
      for (std::size_t i = 0; i < b.d; ++i) e += static_cast<__int128>(c[i]) * b.rows[i][j];
      CHECK(p.embed[j] == static_cast<double>(static_cast<std::int64_t>(e)));
    }
  }
  CHECK_THROWS_AS(make_point(b, {1, 2}), std::invalid_argument);
}
