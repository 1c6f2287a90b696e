#include "kgalign/embedding.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "kgalign/errors.hpp"
#include "utf8.hpp"

namespace kgalign {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize_rows(std::span<double> values, std::size_t dim) {
  if (dim == 0) return;
  const std::size_t rows = values.size() / dim;
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = values.subspan(r * dim, dim);
    double norm = std::sqrt(dot(row, row));
    if (!(norm > 0.0) || !std::isfinite(norm)) throw ZeroVector(r);
    for (double& x : row) x /= norm;
  }
}

void ProviderConfig::validate() const {
  switch (kind) {
    case ProviderKind::HashTest:
      if (dimension < 8) throw ConfigError("hash provider dimension must be at least 8");
      break;
    case ProviderKind::FileVectors:
      if (path.empty()) throw ConfigError("file provider needs a vectors file");
      break;
    case ProviderKind::RemoteService:
      if (endpoint.empty()) throw ConfigError("remote provider needs an endpoint");
      if (batch_size < 1) throw ConfigError("batch size must be at least 1");
      if (max_in_flight < 1) throw ConfigError("in-flight limit must be at least 1");
      break;
  }
}

// ---- HashEmbedder ----

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

// Lowercased code points with whitespace runs collapsed and one space of padding on each side.
std::vector<std::uint32_t> normalize_text(std::string_view text) {
  std::vector<std::uint32_t> out{' '};
  for (std::uint32_t cp : utf8::decode(text)) {
    if (utf8::is_space(cp)) {
      if (out.back() != ' ') out.push_back(' ');
    } else {
      out.push_back(utf8::to_lower(cp));
    }
  }
  if (out.back() != ' ') out.push_back(' ');
  return out;
}

}  // namespace

HashEmbedder::HashEmbedder(std::size_t dimension, std::uint64_t seed)
    : dim_(dimension), seed_(seed) {
  if (dim_ < 8) throw ConfigError("hash provider dimension must be at least 8");
}

std::string HashEmbedder::id() const {
  return "hash-trigram-d" + std::to_string(dim_) + (seed_ ? "-s" + std::to_string(seed_) : "");
}

std::vector<double> HashEmbedder::features(std::string_view text) const {
  std::vector<double> v(dim_, 0.0);
  auto cps = normalize_text(text);
  if (cps.size() <= 2) return v;  // only padding: nothing to hash
  const std::uint64_t basis = kFnvOffset ^ (seed_ * 0x9E3779B97F4A7C15ULL);
  std::string gram;
  for (std::size_t i = 0; i + 3 <= cps.size(); ++i) {
    gram.clear();
    for (std::size_t k = i; k < i + 3; ++k) utf8::append(gram, cps[k]);
    std::uint64_t h = fnv1a(gram, basis);
    std::size_t bucket = static_cast<std::size_t>(h % dim_);
    v[bucket] += (h >> 63) ? -1.0 : 1.0;
  }
  return v;
}

EmbeddingMatrix HashEmbedder::embed(std::span<const KeyedText> texts) const {
  EmbeddingMatrix m;
  m.dim = dim_;
  m.provider_id = id();
  m.values.reserve(texts.size() * dim_);
  for (const auto& [iri, text] : texts) {
    m.row_keys.push_back(iri);
    auto f = features(text);
    m.values.insert(m.values.end(), f.begin(), f.end());
  }
  normalize_rows(m.values, m.dim);
  return m;
}

// ---- FileVectorProvider ----

FileVectorProvider::FileVectorProvider(const std::string& path) : source_(path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open vectors file '" + path + "'");
  load(in);
}

FileVectorProvider::FileVectorProvider(std::istream& in, std::string source_name)
    : source_(std::move(source_name)) {
  load(in);
}

void FileVectorProvider::load(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto bad = [&](const std::string& what) {
    return EmbeddingError(source_ + ":" + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (dim_ == 0) {
      if (!line.starts_with("dim=")) throw bad("expected header 'dim=<d>'");
      try {
        dim_ = std::stoul(line.substr(4));
      } catch (const std::exception&) {
        throw bad("malformed dimension");
      }
      if (dim_ == 0) throw bad("dimension must be positive");
      continue;
    }
    std::istringstream fields(line);
    std::string iri;
    fields >> iri;
    std::vector<double> v;
    v.reserve(dim_);
    std::string tok;
    while (fields >> tok) {
      char* end = nullptr;
      double x = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') throw bad("malformed number '" + tok + "'");
      v.push_back(x);
    }
    if (v.size() != dim_) throw DimensionMismatch(dim_, v.size());
    vectors_[iri] = std::move(v);
  }
  if (dim_ == 0) throw EmbeddingError(source_ + ": missing 'dim=<d>' header");
}

std::string FileVectorProvider::id() const { return "file:" + source_; }

EmbeddingMatrix FileVectorProvider::embed(std::span<const KeyedText> texts) const {
  EmbeddingMatrix m;
  m.dim = dim_;
  m.provider_id = id();
  m.values.reserve(texts.size() * dim_);
  for (const auto& [iri, text] : texts) {
    auto it = vectors_.find(iri.str());
    if (it == vectors_.end()) throw MissingVector(iri.str());
    m.row_keys.push_back(iri);
    m.values.insert(m.values.end(), it->second.begin(), it->second.end());
  }
  normalize_rows(m.values, m.dim);
  return m;
}

void write_vector_file(std::ostream& out, const EmbeddingMatrix& m) {
  out << "dim=" << m.dim << "\n" << std::setprecision(17);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << m.row_keys[r].str();
    for (double x : m.row(r)) out << ' ' << x;
    out << '\n';
  }
}

std::unique_ptr<EmbeddingProvider> make_provider(const ProviderConfig& config) {
  config.validate();
  switch (config.kind) {
    case ProviderKind::HashTest:
      return std::make_unique<HashEmbedder>(config.dimension, config.seed);
    case ProviderKind::FileVectors: return std::make_unique<FileVectorProvider>(config.path);
    case ProviderKind::RemoteService: return std::make_unique<RemoteEmbedder>(config);
  }
  throw ConfigError("unknown provider kind");
}

EmbeddingMatrix embed_batch(std::span<const KeyedText> texts, const ProviderConfig& config) {
  if (texts.empty()) throw ConfigError("embed_batch needs at least one text");
  for (const auto& [iri, text] : texts)
    if (text.empty()) throw ConfigError("empty text for <" + iri.str() + ">");
  return make_provider(config)->embed(texts);
}

}  // namespace kgalign
