#include <doctest.h>

#include <random>

#include "kgalign/errors.hpp"
#include "kgalign/rdf_parser.hpp"
#include "kgalign/verbalizer.hpp"
#include "test_support.hpp"

using namespace kgalign;
using kgtest::matrix_from;
using kgtest::similarity_from;

namespace {

SimilarityMatrix transpose(const SimilarityMatrix& m) {
  SimilarityMatrix t;
  t.source_keys = m.target_keys;
  t.target_keys = m.source_keys;
  t.scores.resize(m.scores.size());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t.at(j, i) = m.at(i, j);
  return t;
}

// Rank of entry j among values: count of entries that sort before it.
std::size_t rank_in(std::span<const double> values, std::size_t j) {
  std::size_t r = 0;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (values[k] > values[j] || (values[k] == values[j] && k < j)) ++r;
  return r;
}

PairSet brute_mutual_topk(const SimilarityMatrix& m, std::size_t k) {
  PairSet out;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      std::vector<double> col(m.rows());
      for (std::size_t r = 0; r < m.rows(); ++r) col[r] = m.at(r, j);
      if (rank_in(m.row(i), j) < k && rank_in(col, i) < k) out.emplace(i, j);
    }
  return out;
}

struct Side {
  InferredOntology onto;
  EmbeddingMatrix emb;
};

Side side(std::string_view turtle, std::size_t dim = 128, VerbalizerConfig vc = {}) {
  Side s{compute_closure(parse_ontology(turtle, RdfFormat::Turtle)), {}};
  std::vector<KeyedText> texts;
  for (const auto& v : verbalize_all(s.onto, {"en"}, vc)) texts.emplace_back(v.entity, v.text);
  s.emb = HashEmbedder(dim).embed(texts);
  return s;
}

const char* kSmall = R"(
@prefix : <http://a/> .
:Person a owl:Class . :Student a owl:Class ; rdfs:subClassOf :Person .
:Course a owl:Class . :takes a owl:ObjectProperty ; rdfs:domain :Student ; rdfs:range :Course .
:name a owl:DatatypeProperty ; rdfs:domain :Person .
)";

}  // namespace

TEST_CASE("similarity matrix examples") {
  auto one = matrix_from({{0.3, 0.4}});
  CHECK(similarity_matrix(one, one).at(0, 0) == doctest::Approx(1.0));
  auto x = matrix_from({{1, 0}}), y = matrix_from({{0, 1}});
  CHECK(similarity_matrix(x, y).at(0, 0) == 0.0);
  auto src = matrix_from({{1, 0}, {0.6, 0.8}}), tgt = matrix_from({{0, 1}, {1, 0}});
  auto m = similarity_matrix(src, tgt);
  CHECK(m.at(0, 0) == doctest::Approx(0.0));
  CHECK(m.at(0, 1) == doctest::Approx(1.0));
  CHECK(m.at(1, 0) == doctest::Approx(0.8));
  CHECK(m.at(1, 1) == doctest::Approx(0.6));
  CHECK_THROWS_AS(similarity_matrix(matrix_from({{1, 0, 0}}), x), DimensionMismatch);
}

TEST_CASE("similarity matrix does not depend on the thread partition") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> a(97, std::vector<double>(16)), b(41, std::vector<double>(16));
  for (auto& r : a)
    for (auto& v : r) v = g(rng);
  for (auto& r : b)
    for (auto& v : r) v = g(rng);
  auto src = matrix_from(a), tgt = matrix_from(b);
  auto ref = similarity_matrix(src, tgt, 1, 64);
  for (std::size_t workers : {2u, 3u, 8u})
    for (std::size_t block : {1u, 7u, 200u}) CHECK(similarity_matrix(src, tgt, workers, block).scores == ref.scores);
  std::vector<std::size_t> rows{5, 0, 96};
  auto part = similarity_rows(src, tgt, rows);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t j = 0; j < tgt.rows(); ++j) CHECK(part.at(r, j) == ref.at(rows[r], j));
}

TEST_CASE("mutual top-k examples") {
  CHECK(mutual_topk(similarity_from({{0.9, 0.1}, {0.2, 0.8}}), 1) == PairSet{{0, 0}, {1, 1}});
  CHECK(mutual_topk(similarity_from({{0.9, 0.8}, {0.85, 0.1}}), 1) == PairSet{{0, 0}});
  auto m = similarity_from({{0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}});
  CHECK(mutual_topk(m, 3) == kgtest::all_cells(m));
}

TEST_CASE("top_k_indices ordering") {
  std::vector<double> v{0.5, 0.9, 0.5, 0.1};
  CHECK(top_k_indices(v, 3) == std::vector<std::size_t>{1, 0, 2});
  CHECK(top_k_indices(v, 10).size() == 4);
}

TEST_CASE("property: mutual top-k is symmetric and matches brute force") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> dim(1, 9), kk(1, 4);
  for (int trial = 0; trial < 200; ++trial) {
    auto m = kgtest::random_grid_matrix(dim(rng), dim(rng), rng);
    std::size_t k = kk(rng);
    auto forward = mutual_topk(m, k);
    PairSet swapped;
    for (const auto& [i, j] : mutual_topk(transpose(m), k)) swapped.emplace(j, i);
    CHECK(forward == swapped);
    CHECK(forward == brute_mutual_topk(m, k));
  }
}

TEST_CASE("threshold examples") {
  auto m = similarity_from({{0.9, 1.0}, {0.55, 0.45}});
  auto all = kgtest::all_cells(m);
  CHECK(threshold_filter(all, m, -1.0) == all);
  CHECK(threshold_filter({{0, 0}, {0, 1}}, m, 1.0) == PairSet{{0, 1}});
  CHECK(threshold_filter({{1, 0}, {1, 1}}, m, 0.5) == PairSet{{1, 0}});
}

TEST_CASE("property: raising theta only removes pairs") {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> dim(1, 9);
  std::uniform_real_distribution<double> th(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto m = kgtest::random_grid_matrix(dim(rng), dim(rng), rng);
    auto pairs = mutual_topk(m, 2);
    double a = th(rng), b = th(rng);
    if (a > b) std::swap(a, b);
    auto low = threshold_filter(pairs, m, a), high = threshold_filter(pairs, m, b);
    CHECK(std::includes(low.begin(), low.end(), high.begin(), high.end()));
  }
}

TEST_CASE("type filter") {
  auto src = compute_closure(parse_ontology(
      "@prefix : <http://a/> . :C a owl:Class . :D a owl:Class . :x rdfs:label \"x\" .", RdfFormat::Turtle));
  auto tgt = compute_closure(parse_ontology(
      "@prefix : <http://b/> . :C a owl:Class . :p a owl:ObjectProperty .", RdfFormat::Turtle));
  SimilarityMatrix m;
  m.source_keys = {Iri("http://a/C"), Iri("http://a/x")};
  m.target_keys = {Iri("http://b/C"), Iri("http://b/p")};
  m.scores = {1, 1, 1, 1};
  CHECK(type_filter({{0, 1}}, m, src, tgt).empty());
  CHECK(type_filter({{0, 0}}, m, src, tgt) == PairSet{{0, 0}});
  CHECK(type_filter({{1, 0}, {1, 1}}, m, src, tgt) == PairSet{{1, 0}, {1, 1}});
  CHECK(kinds_compatible(EntityKind::Individual, EntityKind::Individual));
  CHECK_FALSE(kinds_compatible(EntityKind::ObjectProperty, EntityKind::DataProperty));
}

TEST_CASE("disjoint vocabularies align to nothing at a high threshold") {
  auto a = side(kSmall);
  auto b = side(R"(
@prefix : <http://b/> .
:Zebra a owl:Class . :Volcano a owl:Class ; rdfs:subClassOf :Mountain . :Mountain a owl:Class .
:erupts a owl:ObjectProperty ; rdfs:domain :Volcano .
)");
  MatcherConfig cfg;
  cfg.theta = 0.9;
  auto r = align({&a.onto, &a.emb}, {&b.onto, &b.emb}, cfg);
  CHECK(r.alignment.cells.empty());
}

TEST_CASE("self-alignment is the identity") {
  auto a = side(kSmall);
  MatcherConfig cfg;
  cfg.k = 1;
  cfg.theta = 0.99;
  auto r = align({&a.onto, &a.emb}, {&a.onto, &a.emb}, cfg);
  REQUIRE(r.alignment.cells.size() == a.emb.rows());
  for (const auto& c : r.alignment.cells) {
    CHECK(c.source == c.target);
    CHECK(c.confidence == doctest::Approx(1.0));
    CHECK(c.relation == "=");
  }
  CHECK(r.counts.candidates >= r.counts.assigned);
  CHECK(r.counts.assigned >= r.counts.above_threshold);
  CHECK(r.counts.above_threshold >= r.counts.type_consistent);
}

TEST_CASE("align validates its configuration") {
  auto a = side(kSmall);
  MatcherConfig cfg;
  cfg.k = 0;
  CHECK_THROWS_AS(align({&a.onto, &a.emb}, {&a.onto, &a.emb}, cfg), ConfigError);
  cfg.k = 1;
  cfg.theta = 1.5;
  CHECK_THROWS_AS(align({&a.onto, &a.emb}, {&a.onto, &a.emb}, cfg), ConfigError);
  cfg.theta = 0.5;
  CHECK_THROWS_AS(align({&a.onto, nullptr}, {&a.onto, &a.emb}, cfg), ConfigError);
}

TEST_CASE("toggles") {
  auto a = side(kSmall);
  auto b = side(R"(
@prefix : <http://b/> .
:Persona a owl:Class . :Students a owl:Class ; rdfs:subClassOf :Persona .
:Course a owl:ObjectProperty .
)");
  MatcherConfig base;
  base.theta = 0.0;
  auto full = align({&a.onto, &a.emb}, {&b.onto, &b.emb}, base);
  for (const auto& c : full.alignment.cells)
    CHECK(kinds_compatible(a.onto.base.find(c.source)->kind, b.onto.base.find(c.target)->kind));

  MatcherConfig loose = base;
  loose.enforce_one_to_one = false;
  loose.mutual_topk = false;
  loose.enforce_types = false;
  auto all = align({&a.onto, &a.emb}, {&b.onto, &b.emb}, loose);
  CHECK(all.counts.candidates == a.emb.rows() * b.emb.rows());

  MatcherConfig many = base;
  many.enforce_one_to_one = false;
  auto r = align({&a.onto, &a.emb}, {&b.onto, &b.emb}, many);
  CHECK(r.alignment.cells.size() >= full.alignment.cells.size());
}

TEST_CASE("approximate candidates on a large enough input") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  std::vector<std::vector<double>> rows(64, std::vector<double>(16));
  for (auto& r : rows)
    for (auto& v : r) v = g(rng);
  auto emb = matrix_from(rows);
  Ontology o;
  for (const auto& k : emb.row_keys) o.entities.emplace(k, Entity{k, EntityKind::Class, {}, {}});
  auto inf = compute_closure(o);
  MatcherConfig cfg;
  cfg.k = 3;
  cfg.theta = 0.99;
  cfg.ann = AnnSettings{1, 64, 0, 100};  // one subspace, one centroid per vector: exact
  auto r = align({&inf, &emb}, {&inf, &emb}, cfg);
  CHECK(r.counts.used_ann);
  CHECK_FALSE(r.matrix.has_value());
  CHECK(r.alignment.cells.size() == 64);
  for (const auto& c : r.alignment.cells) CHECK(c.source == c.target);

  cfg.ann->activation_cells = 1'000'000;
  auto exact = align({&inf, &emb}, {&inf, &emb}, cfg);
  CHECK_FALSE(exact.counts.used_ann);
  CHECK(exact.alignment.cells == r.alignment.cells);
}
