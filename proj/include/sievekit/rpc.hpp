#pragma once

// Random product codes on the sphere and their list decoding. A code is a
// uniformly random rotation of a product of m small random subcodes, so the
// B^m codewords are never materialized: decoding scores each block of the
// rotated query against its subcode and walks a best-first branch-and-bound
// over blocks, emitting exactly the codewords within the filter angle.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sievekit/common.hpp"
#include "sievekit/geometry.hpp"

namespace sievekit::rpc {

struct CodewordId {
  std::vector<std::uint32_t> indices;  // one subcode index per block

  friend bool operator==(const CodewordId& a, const CodewordId& b) = default;
  friend bool operator<(const CodewordId& a, const CodewordId& b) {
    return a.indices < b.indices;
  }
};

struct RpcCode {
  std::size_t d = 0;        // ambient (query) dimension
  std::size_t m = 0;        // block count
  std::size_t block = 0;    // block dimension; padded: m * block >= d
  std::size_t B = 0;        // codewords per block
  Angle alpha{0.0};         // filter angle the code is meant for
  std::vector<std::vector<SpherePoint>> subcodes;  // m x B, each of norm sqrt(1/m)
  std::vector<std::vector<double>> rotation;       // orthogonal, (m*block)^2

  std::size_t padded_dim() const { return m * block; }
  double codeword_count_log2() const {
    return static_cast<double>(m) * std::log2(static_cast<double>(B));
  }
};

// shape + seed fully determine a code; serialization stores these five
// numbers, never the matrices
struct RpcSpec {
  std::size_t d = 0;
  std::size_t m = 0;
  std::size_t B = 0;
  double alpha_rad = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const RpcSpec&, const RpcSpec&) = default;
};

struct Bucket {
  CodewordId codeword;
  std::vector<std::size_t> members;  // point ids, ascending
};

struct DecodeStats {
  std::size_t visited = 0;  // branch-and-bound nodes touched
};

namespace detail {

// rows of an orthogonal matrix drawn from the rotation-invariant law:
// Gram-Schmidt of a Gaussian matrix with the positive-diagonal convention
inline std::vector<std::vector<double>> haar_rotation(std::size_t n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> q(n, std::vector<double>(n));
  for (auto& row : q)
    for (auto& x : row) x = gauss(rng);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      double pr = 0.0;
      for (std::size_t j = 0; j < n; ++j) pr += q[i][j] * q[k][j];
      for (std::size_t j = 0; j < n; ++j) q[i][j] -= pr * q[k][j];
    }
    double n2 = 0.0;
    for (double x : q[i]) n2 += x * x;
    double inv = 1.0 / std::sqrt(n2);
    if (q[i][i] < 0.0) inv = -inv;
    for (double& x : q[i]) x *= inv;
  }
  return q;
}

inline std::vector<double> rotate(const std::vector<std::vector<double>>& q,
                                  const std::vector<double>& x) {
  std::size_t n = q.size();
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += q[i][j] * x[j];
    y[i] = s;
  }
  return y;
}

inline std::vector<double> rotate_back(const std::vector<std::vector<double>>& q,
                                       const std::vector<double>& x) {
  std::size_t n = q.size();
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) y[j] += q[i][j] * x[i];
  return y;
}

}  // namespace detail

inline RpcCode sample_rpc(std::size_t d, std::size_t m, std::size_t B, Angle alpha, Rng& rng) {
  if (d == 0 || m == 0 || B == 0) throw std::invalid_argument("code shape must be positive");
  if (m > d) throw std::invalid_argument("more blocks than dimensions");
  if (!(alpha.rad > 0.0)) throw std::invalid_argument("filter angle must be positive");
  RpcCode code;
  code.d = d;
  code.m = m;
  code.B = B;
  code.block = (d + m - 1) / m;
  code.alpha = alpha;
  double scale = std::sqrt(1.0 / static_cast<double>(m));
  code.subcodes.assign(m, {});
  for (std::size_t k = 0; k < m; ++k) {
    code.subcodes[k].reserve(B);
    for (std::size_t i = 0; i < B; ++i) {
      auto p = geometry::sample_sphere(code.block, rng);
      for (double& x : p.coords) x *= scale;
      code.subcodes[k].push_back(std::move(p));
    }
  }
  code.rotation = detail::haar_rotation(code.padded_dim(), rng);
  return code;
}

inline RpcCode make_rpc(const RpcSpec& spec) {
  Rng rng = derive_rng(spec.seed, 0x7270c0deULL);
  return sample_rpc(spec.d, spec.m, spec.B, Angle{spec.alpha_rad}, rng);
}

// the concrete codeword vector, laid out in the ambient padded dimension
inline SpherePoint assemble(const RpcCode& code, const CodewordId& id) {
  if (id.indices.size() != code.m) throw std::invalid_argument("codeword block count mismatch");
  std::vector<double> c(code.padded_dim(), 0.0);
  for (std::size_t k = 0; k < code.m; ++k) {
    if (id.indices[k] >= code.B) throw std::invalid_argument("codeword index out of range");
    const auto& blockpt = code.subcodes[k][id.indices[k]];
    for (std::size_t j = 0; j < code.block; ++j) c[k * code.block + j] = blockpt.coords[j];
  }
  return SpherePoint{detail::rotate(code.rotation, c)};
}

// All codewords within the code's filter angle of v: per-block scores of the
// unrotated query, then depth-first over blocks with scores visited best
// first, pruning against the best completion of the remaining blocks. Output
// is sorted lexicographically.
inline std::vector<CodewordId> decode_relevant(const RpcCode& code, const SpherePoint& v,
                                               DecodeStats* stats = nullptr) {
  if (v.dim() != code.d) throw std::invalid_argument("query dimension mismatch");
  std::vector<double> padded(code.padded_dim(), 0.0);
  std::copy(v.coords.begin(), v.coords.end(), padded.begin());
  std::vector<double> w = detail::rotate_back(code.rotation, padded);

  double threshold = std::cos(code.alpha.rad);
  std::size_t m = code.m, B = code.B;

  // scores[k][r] = (inner product, index), sorted descending per block
  std::vector<std::vector<std::pair<double, std::uint32_t>>> scores(m);
  for (std::size_t k = 0; k < m; ++k) {
    scores[k].resize(B);
    for (std::size_t i = 0; i < B; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < code.block; ++j)
        s += w[k * code.block + j] * code.subcodes[k][i].coords[j];
      scores[k][i] = {s, static_cast<std::uint32_t>(i)};
    }
    std::sort(scores[k].begin(), scores[k].end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
  }
  std::vector<double> tail_best(m + 1, 0.0);
  for (std::size_t k = m; k-- > 0;) tail_best[k] = tail_best[k + 1] + scores[k][0].first;

  std::vector<CodewordId> out;
  CodewordId cur;
  cur.indices.assign(m, 0);
  std::size_t visited = 0;
  auto descend = [&](auto&& self, std::size_t k, double partial) -> void {
    for (const auto& [s, idx] : scores[k]) {
      ++visited;
      // scores are descending: once the optimistic completion misses the
      // threshold, every later candidate in this block misses it too
      if (partial + s + tail_best[k + 1] < threshold) break;
      cur.indices[k] = idx;
      if (k + 1 == m)
        out.push_back(cur);
      else
        self(self, k + 1, partial + s);
    }
  };
  descend(descend, 0, 0.0);
  if (stats) stats->visited = visited;
  std::sort(out.begin(), out.end());
  return out;
}

// Buckets every point into the filters it decodes to. Points are sharded
// across workers in contiguous ranges, so concatenating per-worker maps in
// worker order keeps each member list ascending.
inline std::map<CodewordId, Bucket> bucket_points(const RpcCode& code,
                                                  const std::vector<SpherePoint>& points,
                                                  int threads = 1) {
  std::size_t t = static_cast<std::size_t>(resolve_threads(threads));
  std::vector<std::map<CodewordId, std::vector<std::size_t>>> shard(std::max<std::size_t>(t, 1));
  parallel_chunks(points.size(), static_cast<int>(t), [&](std::size_t lo, std::size_t hi, int w) {
    auto& local = shard[static_cast<std::size_t>(w)];
    for (std::size_t p = lo; p < hi; ++p)
      for (auto& id : decode_relevant(code, points[p])) local[std::move(id)].push_back(p);
  });
  std::map<CodewordId, Bucket> out;
  for (auto& local : shard)
    for (auto& [id, members] : local) {
      auto& bucket = out[id];
      if (bucket.members.empty()) bucket.codeword = id;
      bucket.members.insert(bucket.members.end(), members.begin(), members.end());
    }
  return out;
}

// smallest per-block size whose product reaches the requested codeword
// count; the realized count B^m overshoots by at most (1 + 1/B)^m
inline std::size_t block_size_for(double target_count, std::size_t m) {
  if (m == 0) throw std::invalid_argument("block count must be positive");
  if (!(target_count >= 1.0)) return 1;
  double b = std::ceil(std::pow(target_count, 1.0 / static_cast<double>(m)) - 1e-9);
  return static_cast<std::size_t>(b);
}

}  // namespace sievekit::rpc
