#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgalign {

/// Root of every error the engine raises. `stage()` names the pipeline stage
/// that produced it so the CLI can attribute failures.
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config", what) {}
};

// ---- ingestion ----

class MalformedSyntax : public Error {
 public:
  MalformedSyntax(std::size_t line, std::size_t column, const std::string& detail)
      : Error("parse", "line " + std::to_string(line) + ", column " + std::to_string(column) +
                           ": " + detail),
        line_(line),
        column_(column),
        detail_(detail) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string detail_;
};

class UnsupportedFeature : public Error {
 public:
  explicit UnsupportedFeature(const std::string& detail)
      : Error("parse", "unsupported Turtle feature: " + detail) {}
};

class UnknownEntity : public Error {
 public:
  explicit UnknownEntity(const std::string& iri)
      : Error("verbalize", "unknown entity <" + iri + ">"), iri_(iri) {}
  const std::string& iri() const noexcept { return iri_; }

 private:
  std::string iri_;
};

// ---- embeddings ----

class EmbeddingError : public Error {
 public:
  explicit EmbeddingError(const std::string& what) : Error("embed", what) {}
};

class MissingVector : public EmbeddingError {
 public:
  explicit MissingVector(const std::string& iri)
      : EmbeddingError("no vector for <" + iri + ">"), iri_(iri) {}
  const std::string& iri() const noexcept { return iri_; }

 private:
  std::string iri_;
};

class ServiceError : public EmbeddingError {
 public:
  ServiceError(int status, std::string body)
      : EmbeddingError("embedding service returned status " + std::to_string(status) + ": " +
                       body),
        status_(status),
        body_(std::move(body)) {}
  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

class Timeout : public EmbeddingError {
 public:
  explicit Timeout(const std::string& what) : EmbeddingError("timeout: " + what) {}
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("embed", "dimension mismatch: expected " + std::to_string(expected) + ", got " +
                           std::to_string(got)),
        expected_(expected),
        got_(got) {}
  std::size_t expected() const noexcept { return expected_; }
  std::size_t got() const noexcept { return got_; }

 private:
  std::size_t expected_;
  std::size_t got_;
};

class ZeroVector : public Error {
 public:
  explicit ZeroVector(std::size_t row)
      : Error("embed", "row " + std::to_string(row) + " has zero norm"), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

// ---- ann ----

class BadShape : public Error {
 public:
  BadShape(std::size_t d, std::size_t m)
      : Error("ann", "dimension " + std::to_string(d) + " is not divisible by " +
                         std::to_string(m) + " subspaces") {}
};

class TooFewVectors : public Error {
 public:
  TooFewVectors(std::size_t n, std::size_t kc)
      : Error("ann", std::to_string(n) + " vectors cannot train " + std::to_string(kc) +
                         " centroids") {}
};

// ---- evaluation ----

class MalformedAlignment : public Error {
 public:
  explicit MalformedAlignment(const std::string& detail)
      : Error("gold", "malformed alignment: " + detail) {}
};

class EmptyGold : public Error {
 public:
  EmptyGold() : Error("evaluate", "gold alignment is empty") {}
};

class MissingEntity : public Error {
 public:
  explicit MissingEntity(const std::string& iri)
      : Error("evaluate", "gold entity <" + iri + "> is not in the similarity matrix"),
        iri_(iri) {}
  const std::string& iri() const noexcept { return iri_; }

 private:
  std::string iri_;
};

}  // namespace kgalign
