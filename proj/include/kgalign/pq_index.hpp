#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kgalign/embedding.hpp"

namespace kgalign {

/// Product-quantized vectors: d split into `m` subspaces, each encoded by the nearest of
/// `kc` k-means centroids.
struct PqIndex {
  std::size_t m = 0;
  std::size_t kc = 0;
  std::size_t d = 0;
  std::vector<double> codebooks;      // m * kc * (d / m)
  std::vector<std::uint32_t> codes;   // n * m
  std::vector<Iri> keys;

  std::size_t size() const noexcept { return keys.size(); }
  std::size_t sub_dim() const noexcept { return m ? d / m : 0; }
  std::span<const double> centroid(std::size_t sub, std::size_t c) const {
    return {codebooks.data() + (sub * kc + c) * sub_dim(), sub_dim()};
  }
  /// The vector a row decodes to.
  std::vector<double> reconstruct(std::size_t row) const;

  friend bool operator==(const PqIndex&, const PqIndex&) = default;
};

struct KMeansOptions {
  std::size_t max_iterations = 25;
  double tolerance = 1e-6;  // stop once no centroid moves further than this
};

/// Per-subspace k-means with k-means++ seeding. Deterministic for a given seed.
/// Throws BadShape when d % m != 0 and TooFewVectors when n < kc.
PqIndex build_pq(const EmbeddingMatrix& vectors, std::size_t m, std::size_t kc,
                 std::uint64_t seed, const KMeansOptions& options = {});

struct ScoredKey {
  Iri key;
  double score;
  std::size_t row;
};

/// Asymmetric scoring: per-subspace dot-product tables against the raw query, summed per
/// code row. Top k by score descending, ties by key.
std::vector<ScoredKey> query_topk(const PqIndex& index, std::span<const double> query,
                                  std::size_t k);

/// Exhaustive cosine ranking over raw rows with the same ordering rule.
std::vector<ScoredKey> exact_topk(const EmbeddingMatrix& vectors, std::span<const double> query,
                                  std::size_t k);

/// Little-endian binary layout:
///   "PQIX" | u16 version=1 | u32 m | u32 kc | u32 d | u32 n
///   | f64 codebooks[m*kc*(d/m)] | u32 codes[n*m] | n x (u32 byte length, UTF-8 key bytes)
void save_pq(std::ostream& out, const PqIndex& index);
PqIndex load_pq(std::istream& in);

}  // namespace kgalign
