#include "kgalign/matcher.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "kgalign/errors.hpp"
#include "kgalign/pq_index.hpp"

namespace kgalign {

SimilarityMatrix similarity_matrix(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                                   std::size_t workers, std::size_t block_rows) {
  if (src.dim != tgt.dim) throw DimensionMismatch(src.dim, tgt.dim);
  SimilarityMatrix m;
  m.source_keys = src.row_keys;
  m.target_keys = tgt.row_keys;
  m.scores.assign(src.rows() * tgt.rows(), 0.0);
  block_rows = std::max<std::size_t>(block_rows, 1);
  const std::size_t blocks = (src.rows() + block_rows - 1) / block_rows;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t b = next++; b < blocks; b = next++) {
      std::size_t end = std::min(src.rows(), (b + 1) * block_rows);
      for (std::size_t i = b * block_rows; i < end; ++i)
        for (std::size_t j = 0; j < tgt.rows(); ++j) m.at(i, j) = dot(src.row(i), tgt.row(j));
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(blocks, 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return m;
}

SimilarityMatrix similarity_rows(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                                 std::span<const std::size_t> source_rows) {
  if (src.dim != tgt.dim) throw DimensionMismatch(src.dim, tgt.dim);
  SimilarityMatrix m;
  m.target_keys = tgt.row_keys;
  for (std::size_t r : source_rows) {
    m.source_keys.push_back(src.row_keys.at(r));
    for (std::size_t j = 0; j < tgt.rows(); ++j) m.scores.push_back(dot(src.row(r), tgt.row(j)));
  }
  return m;
}

std::vector<std::size_t> top_k_indices(std::span<const double> values, std::size_t k) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto better = [&](std::size_t a, std::size_t b) {
    return values[a] != values[b] ? values[a] > values[b] : a < b;
  };
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), better);
  idx.resize(k);
  return idx;
}

PairSet mutual_topk(const SimilarityMatrix& m, std::size_t k) {
  const std::size_t p = m.rows(), q = m.cols();
  std::vector<std::vector<bool>> in_row_top(p, std::vector<bool>(q, false));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j : top_k_indices(m.row(i), k)) in_row_top[i][j] = true;
  PairSet out;
  std::vector<double> column(p);
  for (std::size_t j = 0; j < q; ++j) {
    for (std::size_t i = 0; i < p; ++i) column[i] = m.at(i, j);
    for (std::size_t i : top_k_indices(column, k))
      if (in_row_top[i][j]) out.emplace(i, j);
  }
  return out;
}

PairSet threshold_filter(const PairSet& pairs, const SimilarityMatrix& m, double theta) {
  PairSet out;
  for (const auto& [i, j] : pairs)
    if (m.at(i, j) >= theta) out.emplace(i, j);
  return out;
}

bool kinds_compatible(EntityKind a, EntityKind b) {
  return a == EntityKind::Unknown || b == EntityKind::Unknown || a == b;
}

namespace {

EntityKind kind_of(const InferredOntology& onto, const Iri& iri) {
  const Entity* e = onto.base.find(iri);
  return e ? e->kind : EntityKind::Unknown;
}

}  // namespace

PairSet type_filter(const PairSet& pairs, const SimilarityMatrix& m,
                    const InferredOntology& src, const InferredOntology& tgt) {
  PairSet out;
  for (const auto& [i, j] : pairs)
    if (kinds_compatible(kind_of(src, m.source_keys[i]), kind_of(tgt, m.target_keys[j])))
      out.emplace(i, j);
  return out;
}

void MatcherConfig::validate() const {
  if (k < 1) throw ConfigError("k must be at least 1");
  if (!(theta >= -1.0 && theta <= 1.0)) throw ConfigError("theta must lie in [-1, 1]");
  if (ann) {
    if (ann->subspaces < 1) throw ConfigError("PQ needs at least one subspace");
    if (ann->centroids < 1) throw ConfigError("PQ needs at least one centroid");
  }
}

namespace {

// Candidate cells from PQ indexes over both sides; scores are recomputed exactly.
std::vector<ScoredCell> ann_candidates(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                                       const MatcherConfig& config) {
  const AnnSettings& ann = *config.ann;
  auto forward = build_pq(tgt, ann.subspaces, std::min(ann.centroids, tgt.rows()), ann.seed);
  PairSet pairs;
  for (std::size_t i = 0; i < src.rows(); ++i)
    for (const auto& hit : query_topk(forward, src.row(i), config.k)) pairs.emplace(i, hit.row);
  if (config.mutual_topk) {
    auto backward = build_pq(src, ann.subspaces, std::min(ann.centroids, src.rows()), ann.seed);
    PairSet reverse;
    for (std::size_t j = 0; j < tgt.rows(); ++j)
      for (const auto& hit : query_topk(backward, tgt.row(j), config.k))
        reverse.emplace(hit.row, j);
    PairSet both;
    std::set_intersection(pairs.begin(), pairs.end(), reverse.begin(), reverse.end(),
                          std::inserter(both, both.end()));
    pairs = std::move(both);
  }
  std::vector<ScoredCell> cells;
  for (const auto& [i, j] : pairs) cells.push_back({i, j, dot(src.row(i), tgt.row(j))});
  return cells;
}

}  // namespace

AlignResult align(const AlignmentSide& src, const AlignmentSide& tgt, const MatcherConfig& config) {
  config.validate();
  if (!src.embeddings || !tgt.embeddings || !src.ontology || !tgt.ontology)
    throw ConfigError("align needs embeddings and ontologies for both sides");
  const EmbeddingMatrix& se = *src.embeddings;
  const EmbeddingMatrix& te = *tgt.embeddings;
  if (se.dim != te.dim) throw DimensionMismatch(se.dim, te.dim);

  AlignResult result;
  std::vector<ScoredCell> cells;
  const std::size_t cell_count = se.rows() * te.rows();
  if (config.ann && cell_count > config.ann->activation_cells && se.rows() > 0 && te.rows() > 0) {
    result.counts.used_ann = true;
    cells = ann_candidates(se, te, config);
  } else {
    result.matrix = similarity_matrix(se, te, config.workers);
    const SimilarityMatrix& m = *result.matrix;
    if (config.mutual_topk) {
      for (const auto& [i, j] : mutual_topk(m, config.k)) cells.push_back({i, j, m.at(i, j)});
    } else {
      cells.reserve(cell_count);
      for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) cells.push_back({i, j, m.at(i, j)});
    }
  }
  result.counts.candidates = cells.size();

  if (config.enforce_one_to_one) {
    PairSet chosen = assign_one_to_one(cells);
    std::erase_if(cells, [&](const ScoredCell& c) { return !chosen.contains({c.row, c.col}); });
  }
  result.counts.assigned = cells.size();

  std::erase_if(cells, [&](const ScoredCell& c) { return !(c.score >= config.theta); });
  result.counts.above_threshold = cells.size();

  if (config.enforce_types) {
    std::erase_if(cells, [&](const ScoredCell& c) {
      return !kinds_compatible(kind_of(*src.ontology, se.row_keys[c.row]),
                               kind_of(*tgt.ontology, te.row_keys[c.col]));
    });
  }
  result.counts.type_consistent = cells.size();

  for (const auto& c : cells)
    result.alignment.cells.push_back(
        {se.row_keys[c.row], te.row_keys[c.col], std::clamp(c.score, 0.0, 1.0), "="});
  std::sort(result.alignment.cells.begin(), result.alignment.cells.end(),
            [](const Correspondence& a, const Correspondence& b) {
              return a.source != b.source ? a.source < b.source : a.target < b.target;
            });
  return result;
}

}  // namespace kgalign
