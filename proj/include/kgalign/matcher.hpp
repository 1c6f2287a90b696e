#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kgalign/embedding.hpp"
#include "kgalign/reasoner.hpp"

namespace kgalign {

/// Dense p x q cosine scores between source rows and target rows.
struct SimilarityMatrix {
  std::vector<Iri> source_keys;
  std::vector<Iri> target_keys;
  std::vector<double> scores;  // row-major

  std::size_t rows() const noexcept { return source_keys.size(); }
  std::size_t cols() const noexcept { return target_keys.size(); }
  double at(std::size_t i, std::size_t j) const { return scores[i * cols() + j]; }
  double& at(std::size_t i, std::size_t j) { return scores[i * cols() + j]; }
  std::span<const double> row(std::size_t i) const { return {scores.data() + i * cols(), cols()}; }
};

using IndexPair = std::pair<std::size_t, std::size_t>;
using PairSet = std::set<IndexPair>;

/// Source rows are processed in blocks of `block_rows` spread over `workers` threads; every
/// cell is one sequential dot product, so the result does not depend on the partition.
/// Throws DimensionMismatch when the two matrices disagree on d.
SimilarityMatrix similarity_matrix(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                                   std::size_t workers = 1, std::size_t block_rows = 64);

/// Only the listed source rows (in the given order), against every target row.
SimilarityMatrix similarity_rows(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                                 std::span<const std::size_t> source_rows);

/// Indices of the k largest entries, score descending then index ascending.
std::vector<std::size_t> top_k_indices(std::span<const double> values, std::size_t k);

/// (i, j) survives iff j is in row i's top k and i is in column j's top k.
PairSet mutual_topk(const SimilarityMatrix& m, std::size_t k);

struct ScoredCell {
  std::size_t row;
  std::size_t col;
  double score;
};

/// One-to-one assignment over the candidate cells only. Maximizes the number of matched
/// pairs first, then the total score; among optima returns the lexicographically smallest
/// pair set. Rows or columns without a feasible partner stay unmatched.
PairSet assign_one_to_one(std::span<const ScoredCell> candidates);

PairSet hungarian_assign(const SimilarityMatrix& m, const PairSet& candidates);

PairSet threshold_filter(const PairSet& pairs, const SimilarityMatrix& m, double theta);

/// Class<->Class, ObjectProperty<->ObjectProperty, DataProperty<->DataProperty,
/// Individual<->Individual; Unknown matches anything.
bool kinds_compatible(EntityKind a, EntityKind b);

PairSet type_filter(const PairSet& pairs, const SimilarityMatrix& m,
                    const InferredOntology& src, const InferredOntology& tgt);

struct AnnSettings {
  std::size_t subspaces = 8;
  std::size_t centroids = 256;
  std::uint64_t seed = 0;
  /// Exact matrix below this many cells.
  std::size_t activation_cells = 4'000'000;
};

struct MatcherConfig {
  std::size_t k = 5;
  double theta = 0.5;
  bool mutual_topk = true;
  bool enforce_types = true;
  bool enforce_one_to_one = true;
  std::optional<AnnSettings> ann;
  std::size_t workers = 1;

  void validate() const;
};

struct Correspondence {
  Iri source;
  Iri target;
  double confidence = 0.0;
  std::string relation = "=";

  friend bool operator==(const Correspondence&, const Correspondence&) = default;
};

struct AlignmentSet {
  std::vector<Correspondence> cells;  // sorted by (source, target)
};

struct AlignmentSide {
  const InferredOntology* ontology = nullptr;
  const EmbeddingMatrix* embeddings = nullptr;
};

struct StageCounts {
  std::size_t candidates = 0;
  std::size_t assigned = 0;
  std::size_t above_threshold = 0;
  std::size_t type_consistent = 0;
  bool used_ann = false;
};

struct AlignResult {
  AlignmentSet alignment;
  /// Empty when the approximate index was used.
  std::optional<SimilarityMatrix> matrix;
  StageCounts counts;
};

/// similarity -> mutual top-k -> one-to-one assignment -> threshold -> type filter.
AlignResult align(const AlignmentSide& src, const AlignmentSide& tgt, const MatcherConfig& config);

}  // namespace kgalign
