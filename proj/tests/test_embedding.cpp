#include <doctest.h>

#include <numeric>
#include <sstream>

#include "kgalign/errors.hpp"
#include "provider_contract.hpp"

using namespace kgalign;
using kgtest::iri;

TEST_CASE("normalize_rows") {
  std::vector<double> v{3, 4};
  normalize_rows(v, 2);
  CHECK(v[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(0.8).epsilon(1e-12));

  std::vector<double> unit{0.6, 0.8, 1.0, 0.0};
  auto copy = unit;
  normalize_rows(unit, 2);
  for (std::size_t i = 0; i < unit.size(); ++i) CHECK(std::abs(unit[i] - copy[i]) <= 1e-9);

  std::vector<double> zero{1, 0, 0, 0};
  try {
    normalize_rows(zero, 2);
    FAIL("expected ZeroVector");
  } catch (const ZeroVector& e) {
    CHECK(e.row() == 1);
  }
}

TEST_CASE("hash embedder: identical text, identical unit rows") {
  HashEmbedder h(64);
  std::vector<KeyedText> t{{iri("a"), "University"}, {iri("b"), "University"}};
  auto m = h.embed(t);
  for (std::size_t k = 0; k < 64; ++k) CHECK(m.row(0)[k] == m.row(1)[k]);
  CHECK(std::abs(kgtest::norm(m.row(0)) - 1.0) <= 1e-6);
}

TEST_CASE("hash embedder: cognates share trigram mass") {
  HashEmbedder h(64);
  std::vector<KeyedText> t{{iri("a"), "university"}, {iri("b"), "université"}, {iri("c"), "zebra"}};
  auto m = h.embed(t);
  double cognate = dot(m.row(0), m.row(1));
  double unrelated = dot(m.row(0), m.row(2));
  CHECK(cognate > unrelated);
  // Values from the independent Python implementation next to the bilingual fixture.
  CHECK(cognate == doctest::Approx(0.8333333333333335).epsilon(1e-12));
  CHECK(unrelated == doctest::Approx(0.0));
}

TEST_CASE("hash embedder: reference buckets and signs") {
  // " ab" and "ab " hashed with FNV-1a 64; buckets and signs computed independently.
  auto f0 = HashEmbedder(16, 0).features("ab");
  std::vector<double> e0(16, 0.0);
  e0[8] = -1;
  e0[14] = -1;
  CHECK(f0 == e0);
  auto f7 = HashEmbedder(16, 7).features("AB");
  std::vector<double> e7(16, 0.0);
  e7[1] = -1;
  e7[15] = -1;
  CHECK(f7 == e7);
}

TEST_CASE("hash embedder: whitespace and case are normalized") {
  HashEmbedder h(128);
  CHECK(h.features("  Hello \t World ") == h.features("hello world"));
  CHECK(h.features("ÄRGER") == h.features("ärger"));
}

TEST_CASE("hash embedder: configuration") {
  CHECK_THROWS_AS(HashEmbedder(4), ConfigError);
  CHECK(HashEmbedder(64).id() != HashEmbedder(64, 3).id());
  ProviderConfig c;
  c.dimension = 7;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("hash embedder passes the provider contract") {
  kgtest::check_provider_contract(HashEmbedder(96));
}

TEST_CASE("file vectors: lookup in query order") {
  std::istringstream in("dim=3\nhttp://x/a 1 0 0\nhttp://x/b 0 2 0\nhttp://x/c 0 0 3\n");
  FileVectorProvider p(in, "inline");
  CHECK(p.dim() == 3);
  std::vector<KeyedText> q{{Iri("http://x/c"), "C"}, {Iri("http://x/a"), "A"}, {Iri("http://x/b"), "B"}};
  auto m = p.embed(q);
  REQUIRE(m.rows() == 3);
  CHECK(m.row_keys[0] == Iri("http://x/c"));
  CHECK(m.row(0)[2] == doctest::Approx(1.0));
  CHECK(m.row(1)[0] == doctest::Approx(1.0));
  CHECK(m.row(2)[1] == doctest::Approx(1.0));
  std::vector<KeyedText> missing{{Iri("http://x/z"), "Z"}};
  CHECK_THROWS_AS(p.embed(missing), MissingVector);
}

TEST_CASE("file vectors: malformed files") {
  std::istringstream short_row("dim=3\nhttp://x/a 1 0\n");
  CHECK_THROWS_AS(FileVectorProvider(short_row, "inline"), DimensionMismatch);
  std::istringstream no_header("http://x/a 1 0\n");
  CHECK_THROWS_AS(FileVectorProvider(no_header, "inline"), EmbeddingError);
  std::istringstream zero("dim=2\nhttp://x/a 0 0\n");
  FileVectorProvider zp(zero, "inline");
  std::vector<KeyedText> q{{Iri("http://x/a"), "A"}};
  CHECK_THROWS_AS(zp.embed(q), ZeroVector);
}

TEST_CASE("file vectors round-trip and pass the provider contract") {
  auto texts = kgtest::contract_texts();
  auto reference = HashEmbedder(24).embed(texts);
  std::stringstream file;
  write_vector_file(file, reference);
  FileVectorProvider p(file, "inline");
  auto m = p.embed(texts);
  REQUIRE(m.values.size() == reference.values.size());
  for (std::size_t i = 0; i < m.values.size(); ++i) CHECK(std::abs(m.values[i] - reference.values[i]) <= 1e-15);
  kgtest::check_provider_contract(p);
}

TEST_CASE("embed_batch preconditions") {
  ProviderConfig c;
  c.dimension = 16;
  CHECK_THROWS_AS(embed_batch({}, c), ConfigError);
  std::vector<KeyedText> empty_text{{iri("a"), ""}};
  CHECK_THROWS_AS(embed_batch(empty_text, c), ConfigError);
  std::vector<KeyedText> ok{{iri("a"), "x"}};
  CHECK(embed_batch(ok, c).dim == 16);
  ProviderConfig remote;
  remote.kind = ProviderKind::RemoteService;
  CHECK_THROWS_AS(make_provider(remote), ConfigError);
}
