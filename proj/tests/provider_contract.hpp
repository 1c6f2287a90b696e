#pragma once

// Checks every embedding provider must pass, whatever backs it.

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "kgalign/embedding.hpp"
#include "test_support.hpp"

namespace kgtest {

inline std::vector<kgalign::KeyedText> contract_texts() {
  const std::vector<std::string> words = {
      "A University is a Educational Institution which has awards degree.",
      "A Universität is a Bildungseinrichtung.",
      "teaches is a relation from Professor to Course.",
      "A Person.",
      "Ωμέγα",
      "A Person.",
      "zebra",
      "   spaced   out   text  ",
      "Москва",
      "x"};
  std::vector<kgalign::KeyedText> out;
  for (std::size_t i = 0; i < words.size(); ++i) out.emplace_back(iri("k" + std::to_string(i)), words[i]);
  return out;
}

inline void check_provider_contract(const kgalign::EmbeddingProvider& provider) {
  auto texts = contract_texts();
  auto m = provider.embed(texts);

  // One unit row per text, keys in input order.
  REQUIRE(m.rows() == texts.size());
  REQUIRE(m.values.size() == m.rows() * m.dim);
  CHECK(m.dim > 0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    CHECK(m.row_keys[i] == texts[i].first);
    CHECK(std::abs(norm(m.row(i)) - 1.0) <= 1e-6);
  }

  // Same text, same row.
  for (std::size_t k = 0; k < m.dim; ++k) CHECK(m.row(3)[k] == m.row(5)[k]);

  // Deterministic across calls.
  auto again = provider.embed(texts);
  CHECK(again.values == m.values);

  // Permuting inputs permutes rows.
  std::vector<std::size_t> perm(texts.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(5);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<kgalign::KeyedText> shuffled;
  for (std::size_t p : perm) shuffled.push_back(texts[p]);
  auto sm = provider.embed(shuffled);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    CHECK(sm.row_keys[i] == m.row_keys[perm[i]]);
    for (std::size_t k = 0; k < m.dim; ++k) CHECK(sm.row(i)[k] == doctest::Approx(m.row(perm[i])[k]).epsilon(1e-12));
  }

  // Dot products of unit rows are cosines.
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.rows(); ++j) {
      double d = kgalign::dot(m.row(i), m.row(j));
      double c = d / (norm(m.row(i)) * norm(m.row(j)));
      CHECK(std::abs(d - c) <= 1e-6);
    }

  // Empty input gives an empty matrix.
  CHECK(provider.embed({}).rows() == 0);
}

}  // namespace kgtest
