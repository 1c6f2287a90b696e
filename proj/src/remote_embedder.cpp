#include <httplib.h>

#include <atomic>
#include <exception>
#include <json.hpp>
#include <optional>
#include <thread>

#include "kgalign/embedding.hpp"
#include "kgalign/errors.hpp"

namespace kgalign {
namespace {

using json = nlohmann::json;

struct Batch {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t dim = 0;
  std::vector<double> values;
};

std::string error_message(const httplib::Response& res) {
  try {
    auto body = json::parse(res.body);
    if (body.is_object() && body.contains("error") && body["error"].is_string())
      return body["error"].get<std::string>();
  } catch (const json::exception&) {
  }
  return res.body;
}

}  // namespace

RemoteEmbedder::RemoteEmbedder(ProviderConfig config) : config_(std::move(config)) {
  config_.validate();
  const std::string& ep = config_.endpoint;
  auto scheme = ep.find("://");
  if (scheme == std::string::npos || ep.compare(0, scheme, "http") != 0)
    throw ConfigError("endpoint must be an http:// URL, got '" + ep + "'");
  auto slash = ep.find('/', scheme + 3);
  scheme_host_port_ = ep.substr(0, slash);
  path_prefix_ = slash == std::string::npos ? "" : ep.substr(slash);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
}

std::string RemoteEmbedder::id() const { return "remote:" + config_.endpoint; }

EmbeddingMatrix RemoteEmbedder::embed(std::span<const KeyedText> texts) const {
  std::vector<Batch> batches;
  for (std::size_t b = 0; b < texts.size(); b += config_.batch_size)
    batches.push_back({b, std::min(texts.size(), b + config_.batch_size), 0, {}});

  std::vector<std::exception_ptr> errors(batches.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(config_.timeout);
    client.set_read_timeout(config_.timeout);
    client.set_write_timeout(config_.timeout);
    for (std::size_t i = next++; i < batches.size(); i = next++) {
      Batch& batch = batches[i];
      try {
        json request = {{"texts", json::array()}};
        for (std::size_t k = batch.begin; k < batch.end; ++k)
          request["texts"].push_back(texts[k].second);
        auto started = std::chrono::steady_clock::now();
        auto res = client.Post(path_prefix_ + "/embed", request.dump(), "application/json");
        if (!res) {
          auto elapsed = std::chrono::steady_clock::now() - started;
          if (res.error() == httplib::Error::ConnectionTimeout ||
              (res.error() == httplib::Error::Read && elapsed >= config_.timeout))
            throw Timeout(config_.endpoint + " did not answer within " +
                          std::to_string(config_.timeout.count()) + " ms");
          throw EmbeddingError("request to " + config_.endpoint +
                               " failed: " + httplib::to_string(res.error()));
        }
        if (res->status != 200) throw ServiceError(res->status, error_message(*res));

        json body;
        try {
          body = json::parse(res->body);
        } catch (const json::exception& e) {
          throw EmbeddingError(std::string("malformed service response: ") + e.what());
        }
        if (!body.is_object() || !body.contains("dim") || !body["dim"].is_number_integer() ||
            body["dim"].get<long long>() <= 0 || !body.contains("vectors") ||
            !body["vectors"].is_array())
          throw EmbeddingError("service response lacks a positive 'dim' or a 'vectors' array");
        batch.dim = body["dim"].get<std::size_t>();
        const auto& vectors = body["vectors"];
        if (vectors.size() != batch.end - batch.begin)
          throw EmbeddingError("service returned " + std::to_string(vectors.size()) +
                               " vectors for " + std::to_string(batch.end - batch.begin) +
                               " texts");
        batch.values.reserve(vectors.size() * batch.dim);
        for (const auto& v : vectors) {
          if (!v.is_array()) throw EmbeddingError("vector is not an array");
          if (v.size() != batch.dim) throw DimensionMismatch(batch.dim, v.size());
          for (const auto& x : v) {
            if (!x.is_number()) throw EmbeddingError("vector holds a non-number");
            batch.values.push_back(x.get<double>());
          }
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  std::size_t workers = std::min(config_.max_in_flight, batches.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);  // first failing batch in input order

  EmbeddingMatrix m;
  m.provider_id = id();
  m.dim = batches.empty() ? 0 : batches.front().dim;
  m.values.reserve(texts.size() * m.dim);
  for (const auto& b : batches) {
    if (b.dim != m.dim) throw DimensionMismatch(m.dim, b.dim);
    m.values.insert(m.values.end(), b.values.begin(), b.values.end());
  }
  for (const auto& [iri, text] : texts) m.row_keys.push_back(iri);
  normalize_rows(m.values, m.dim);
  return m;
}

}  // namespace kgalign
