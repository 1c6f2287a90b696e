#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kgalign/ontology.hpp"

namespace kgalign {

/// Row-major dense matrix, one unit-norm row per key.
struct EmbeddingMatrix {
  std::size_t dim = 0;
  std::string provider_id;
  std::vector<Iri> row_keys;
  std::vector<double> values;  // row_keys.size() * dim

  std::size_t rows() const noexcept { return row_keys.size(); }
  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
  std::span<double> row(std::size_t i) { return {values.data() + i * dim, dim}; }
};

/// Divides every row of a rows x dim buffer by its Euclidean norm in place.
/// Throws ZeroVector(row) for rows with zero (or non-finite) norm.
void normalize_rows(std::span<double> values, std::size_t dim);

double dot(std::span<const double> a, std::span<const double> b);

enum class ProviderKind { HashTest, FileVectors, RemoteService };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::HashTest;
  std::size_t dimension = 384;  // HashTest, >= 8
  std::uint64_t seed = 0;       // HashTest
  std::string path;             // FileVectors
  std::string endpoint;         // RemoteService base URL, e.g. http://localhost:8080
  std::size_t batch_size = 64;
  std::chrono::milliseconds timeout{30000};
  std::size_t max_in_flight = 4;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

using KeyedText = std::pair<Iri, std::string>;

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string id() const = 0;
  /// Returns unit-normalized rows in input order.
  virtual EmbeddingMatrix embed(std::span<const KeyedText> texts) const = 0;
};

/// Signed feature hashing of character 3-grams (lowercased, whitespace collapsed, padded with
/// one space on each side) into `dimension` buckets. Uses 64-bit FNV-1a, so results are
/// identical on every platform.
class HashEmbedder final : public EmbeddingProvider {
 public:
  explicit HashEmbedder(std::size_t dimension, std::uint64_t seed = 0);
  std::string id() const override;
  EmbeddingMatrix embed(std::span<const KeyedText> texts) const override;

  /// Unnormalized feature vector of one text.
  std::vector<double> features(std::string_view text) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

/// Precomputed vectors. File format: a header line `dim=<d>`, then one record per line:
/// `<IRI> <v1> ... <vd>` separated by single spaces.
class FileVectorProvider final : public EmbeddingProvider {
 public:
  explicit FileVectorProvider(const std::string& path);
  FileVectorProvider(std::istream& in, std::string source_name);
  std::string id() const override;
  EmbeddingMatrix embed(std::span<const KeyedText> texts) const override;
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return vectors_.size(); }

 private:
  void load(std::istream& in);
  std::string source_;
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// Client for the batch embedding service: POST <endpoint>/embed with {"texts": [...]},
/// expecting {"dim": d, "vectors": [[...], ...]} in request order.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  explicit RemoteEmbedder(ProviderConfig config);
  std::string id() const override;
  EmbeddingMatrix embed(std::span<const KeyedText> texts) const override;

 private:
  ProviderConfig config_;
  std::string scheme_host_port_;
  std::string path_prefix_;
};

/// Writes vectors in the FileVectors format (17 significant digits).
void write_vector_file(std::ostream& out, const EmbeddingMatrix& m);

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config);

/// Throws ConfigError when `texts` is empty or holds an empty string.
EmbeddingMatrix embed_batch(std::span<const KeyedText> texts, const ProviderConfig& config);

}  // namespace kgalign
