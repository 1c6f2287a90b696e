#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kgalign/matcher.hpp"

namespace kgalign {

enum class GoldFormat { AlignmentXml, Tsv };

struct GoldAlignment {
  std::set<IriPair> pairs;  // relation "="
  std::vector<std::string> warnings;
};

/// Reads OAEI Alignment Format XML (Cell / entity1 / entity2 / relation) or two-column TSV.
/// Cells whose relation is not "=" and duplicate pairs are skipped with a warning.
/// Throws MalformedAlignment.
GoldAlignment load_gold(std::istream& in, GoldFormat format);
GoldAlignment load_gold_file(const std::string& path);

/// Writes an OAEI Alignment Format document; measure has four decimals, relation "=".
void write_alignment_xml(std::ostream& out, const AlignmentSet& alignment,
                         const std::optional<Iri>& onto1 = std::nullopt,
                         const std::optional<Iri>& onto2 = std::nullopt);

struct RankedMetrics {
  double precision_at_1 = 0.0;
  double mrr = 0.0;
  std::size_t ranked_pairs = 0;
};

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t true_pos = 0;
  std::size_t false_pos = 0;
  std::size_t false_neg = 0;
  std::optional<RankedMetrics> ranked;
};

/// 2PR / (P + R), or 0 when P + R == 0.
double f1_score(double precision, double recall);

/// Set metrics of the predicted cells against gold. Throws EmptyGold.
Metrics score(const AlignmentSet& predicted, const GoldAlignment& gold);

/// Rank of each gold target in its source row (descending score, ties by target IRI).
/// Gold targets missing from the matrix count as unranked (reciprocal rank 0).
/// Throws MissingEntity when a gold source is not a matrix row, EmptyGold when gold is empty.
RankedMetrics score_ranked(const SimilarityMatrix& m, const GoldAlignment& gold);

}  // namespace kgalign
