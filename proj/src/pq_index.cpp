#include "kgalign/pq_index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <random>

#include "kgalign/errors.hpp"

namespace kgalign {
namespace {

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

// k-means++ then Lloyd iterations over `points` (n x dim). Returns kc x dim centroids.
std::vector<double> kmeans(const std::vector<double>& points, std::size_t n, std::size_t dim,
                           std::size_t kc, std::mt19937_64& rng, const KMeansOptions& opt) {
  auto point = [&](std::size_t i) { return std::span<const double>(points.data() + i * dim, dim); };
  std::vector<double> centroids;
  centroids.reserve(kc * dim);
  std::vector<bool> chosen(n, false);
  auto take = [&](std::size_t i) {
    chosen[i] = true;
    auto p = point(i);
    centroids.insert(centroids.end(), p.begin(), p.end());
  };

  take(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(point(i), {centroids.data(), dim});
  while (centroids.size() < kc * dim) {
    double total = 0.0;
    for (double x : d2) total += x;
    std::size_t pick = n;
    if (total > 0.0) {
      double target = uniform01(rng) * total, acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (d2[i] > 0.0 && acc > target) {
          pick = i;
          break;
        }
      }
      if (pick == n)  // rounding at the tail
        for (std::size_t i = n; i-- > 0;)
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
    } else {
      // Every point already coincides with a centroid: fall back to unused points.
      for (std::size_t i = 0; i < n && pick == n; ++i)
        if (!chosen[i]) pick = i;
    }
    take(pick);
    auto c = std::span<const double>(centroids.data() + centroids.size() - dim, dim);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(point(i), c));
  }

  std::vector<std::size_t> assign(n, 0);
  for (std::size_t iter = 0; iter < opt.max_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < kc; ++c) {
        double dist = squared_distance(point(i), {centroids.data() + c * dim, dim});
        if (dist < best) {
          best = dist;
          assign[i] = c;
        }
      }
    }
    std::vector<double> sums(kc * dim, 0.0);
    std::vector<std::size_t> counts(kc, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[assign[i]];
      auto p = point(i);
      for (std::size_t k = 0; k < dim; ++k) sums[assign[i] * dim + k] += p[k];
    }
    double moved = 0.0;
    for (std::size_t c = 0; c < kc; ++c) {
      if (counts[c] == 0) continue;  // empty cluster keeps its centroid
      double shift = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        double updated = sums[c * dim + k] / static_cast<double>(counts[c]);
        double delta = updated - centroids[c * dim + k];
        shift += delta * delta;
        centroids[c * dim + k] = updated;
      }
      moved = std::max(moved, std::sqrt(shift));
    }
    if (moved < opt.tolerance) break;
  }
  return centroids;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void sort_and_truncate(std::vector<ScoredKey>& all, std::size_t k) {
  auto better = [](const ScoredKey& a, const ScoredKey& b) {
    return a.score != b.score ? a.score > b.score : a.key < b.key;
  };
  if (k < all.size()) {
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), better);
    all.resize(k);
  } else {
    std::sort(all.begin(), all.end(), better);
  }
}

}  // namespace

std::vector<double> PqIndex::reconstruct(std::size_t row) const {
  std::vector<double> out;
  out.reserve(d);
  for (std::size_t s = 0; s < m; ++s) {
    auto c = centroid(s, codes[row * m + s]);
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

PqIndex build_pq(const EmbeddingMatrix& vectors, std::size_t m, std::size_t kc,
                 std::uint64_t seed, const KMeansOptions& options) {
  const std::size_t n = vectors.rows(), d = vectors.dim;
  if (m == 0 || d % m != 0) throw BadShape(d, m);
  if (kc == 0 || n < kc) throw TooFewVectors(n, kc);
  if (kc > std::numeric_limits<std::uint32_t>::max()) throw TooFewVectors(n, kc);

  PqIndex index;
  index.m = m;
  index.kc = kc;
  index.d = d;
  index.keys = vectors.row_keys;
  index.codebooks.reserve(m * kc * (d / m));
  index.codes.assign(n * m, 0);
  const std::size_t sub = d / m;

  std::vector<double> slice(n * sub);
  for (std::size_t s = 0; s < m; ++s) {
    for (std::size_t i = 0; i < n; ++i)
      std::copy_n(vectors.values.data() + i * d + s * sub, sub, slice.data() + i * sub);
    std::mt19937_64 rng(mix_seed(seed, s));
    auto centroids = kmeans(slice, n, sub, kc, rng, options);
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t code = 0;
      for (std::size_t c = 0; c < kc; ++c) {
        double dist = squared_distance({slice.data() + i * sub, sub}, {centroids.data() + c * sub, sub});
        if (dist < best) {
          best = dist;
          code = static_cast<std::uint32_t>(c);
        }
      }
      index.codes[i * m + s] = code;
    }
    index.codebooks.insert(index.codebooks.end(), centroids.begin(), centroids.end());
  }
  return index;
}

std::vector<ScoredKey> query_topk(const PqIndex& index, std::span<const double> query,
                                  std::size_t k) {
  if (query.size() != index.d) throw DimensionMismatch(index.d, query.size());
  const std::size_t sub = index.sub_dim();
  std::vector<double> table(index.m * index.kc);
  for (std::size_t s = 0; s < index.m; ++s)
    for (std::size_t c = 0; c < index.kc; ++c)
      table[s * index.kc + c] = dot(query.subspan(s * sub, sub), index.centroid(s, c));

  std::vector<ScoredKey> all;
  all.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    double score = 0.0;
    for (std::size_t s = 0; s < index.m; ++s) score += table[s * index.kc + index.codes[i * index.m + s]];
    all.push_back({index.keys[i], score, i});
  }
  sort_and_truncate(all, k);
  return all;
}

std::vector<ScoredKey> exact_topk(const EmbeddingMatrix& vectors, std::span<const double> query,
                                  std::size_t k) {
  if (query.size() != vectors.dim) throw DimensionMismatch(vectors.dim, query.size());
  std::vector<ScoredKey> all;
  all.reserve(vectors.rows());
  for (std::size_t i = 0; i < vectors.rows(); ++i)
    all.push_back({vectors.row_keys[i], dot(query, vectors.row(i)), i});
  sort_and_truncate(all, k);
  return all;
}

// ---- persistence ----

namespace {

template <class T>
void put(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  if constexpr (std::is_floating_point_v<T>) {
    auto bits = std::bit_cast<std::uint64_t>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  } else {
    for (std::size_t i = 0; i < sizeof(T); ++i)
      bytes[i] = static_cast<unsigned char>(static_cast<std::uint64_t>(value) >> (8 * i));
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw Error("ann", "truncated PQ index file");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  if constexpr (std::is_floating_point_v<T>) return std::bit_cast<double>(bits);
  else return static_cast<T>(bits);
}

constexpr std::uint16_t kPqVersion = 1;

}  // namespace

void save_pq(std::ostream& out, const PqIndex& index) {
  out.write("PQIX", 4);
  put<std::uint16_t>(out, kPqVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(index.m));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(index.kc));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(index.d));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(index.size()));
  for (double x : index.codebooks) put<double>(out, x);
  for (std::uint32_t c : index.codes) put<std::uint32_t>(out, c);
  for (const auto& key : index.keys) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(key.str().size()));
    out.write(key.str().data(), static_cast<std::streamsize>(key.str().size()));
  }
}

PqIndex load_pq(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "PQIX", 4) != 0)
    throw Error("ann", "not a PQ index file (bad magic)");
  auto version = get<std::uint16_t>(in);
  if (version != kPqVersion) throw Error("ann", "unsupported PQ index version " + std::to_string(version));
  PqIndex index;
  index.m = get<std::uint32_t>(in);
  index.kc = get<std::uint32_t>(in);
  index.d = get<std::uint32_t>(in);
  std::size_t n = get<std::uint32_t>(in);
  if (index.m == 0 || index.d % index.m != 0) throw BadShape(index.d, index.m);
  index.codebooks.resize(index.m * index.kc * index.sub_dim());
  for (double& x : index.codebooks) x = get<double>(in);
  index.codes.resize(n * index.m);
  for (auto& c : index.codes) {
    c = get<std::uint32_t>(in);
    if (c >= index.kc) throw Error("ann", "PQ code out of range");
  }
  index.keys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string key(get<std::uint32_t>(in), '\0');
    if (!in.read(key.data(), static_cast<std::streamsize>(key.size())))
      throw Error("ann", "truncated PQ index file");
    index.keys.emplace_back(std::move(key));
  }
  return index;
}

}  // namespace kgalign
