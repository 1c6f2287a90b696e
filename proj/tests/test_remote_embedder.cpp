#include <doctest.h>

#include "kgalign/errors.hpp"
#include "provider_contract.hpp"
#include "stub_embed_server.hpp"

using namespace kgalign;
using kgtest::StubEmbedServer;

namespace {

ProviderConfig remote(const std::string& endpoint, std::size_t batch = 3, std::size_t in_flight = 2) {
  ProviderConfig c;
  c.kind = ProviderKind::RemoteService;
  c.endpoint = endpoint;
  c.batch_size = batch;
  c.max_in_flight = in_flight;
  c.timeout = std::chrono::milliseconds(2000);
  return c;
}

std::vector<KeyedText> many_texts(std::size_t n) {
  std::vector<KeyedText> out;
  for (std::size_t i = 0; i < n; ++i)
    out.emplace_back(kgtest::iri("t" + std::to_string(i)), "entity number " + std::to_string(i * 7919));
  return out;
}

}  // namespace

TEST_CASE("remote provider passes the provider contract") {
  StubEmbedServer server(32);
  RemoteEmbedder client(remote(server.endpoint()));
  kgtest::check_provider_contract(client);
  CHECK(client.id().find(server.endpoint()) != std::string::npos);
}

TEST_CASE("remote vectors equal the backing embedder's") {
  StubEmbedServer server(32);
  auto texts = kgtest::contract_texts();
  auto remote_m = RemoteEmbedder(remote(server.endpoint())).embed(texts);
  auto local_m = HashEmbedder(32).embed(texts);
  REQUIRE(remote_m.dim == 32);
  for (std::size_t i = 0; i < remote_m.values.size(); ++i)
    CHECK(remote_m.values[i] == doctest::Approx(local_m.values[i]).epsilon(1e-12));
}

TEST_CASE("batching is transparent and order is preserved") {
  StubEmbedServer server(32);
  auto texts = many_texts(23);
  auto reference = RemoteEmbedder(remote(server.endpoint(), 64, 1)).embed(texts);
  for (std::size_t batch : {1u, 2u, 5u, 7u, 23u}) {
    for (std::size_t in_flight : {1u, 3u, 8u}) {
      auto m = RemoteEmbedder(remote(server.endpoint(), batch, in_flight)).embed(texts);
      CHECK(m.row_keys == reference.row_keys);
      CHECK(m.values == reference.values);
    }
  }
  for (std::size_t b : server.batch_sizes()) CHECK(b <= 64);
}

TEST_CASE("in-flight requests stay under the cap") {
  StubEmbedServer server(16);
  server.delay = std::chrono::milliseconds(20);
  RemoteEmbedder(remote(server.endpoint(), 1, 3)).embed(many_texts(24));
  CHECK(server.requests() == 24);
  CHECK(server.max_concurrent() <= 3);
  CHECK(server.max_concurrent() >= 2);
}

TEST_CASE("endpoint with a path prefix") {
  httplib::Server srv;
  srv.Post("/v1/embed", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"dim": 2, "vectors": [[3, 4]]})", "application/json");
  });
  int port = srv.bind_to_any_port("127.0.0.1");
  std::thread t([&] { srv.listen_after_bind(); });
  srv.wait_until_ready();
  std::vector<KeyedText> one{{kgtest::iri("a"), "x"}};
  auto m = RemoteEmbedder(remote("http://127.0.0.1:" + std::to_string(port) + "/v1/")).embed(one);
  CHECK(m.row(0)[0] == doctest::Approx(0.6));
  srv.stop();
  t.join();
}

TEST_CASE("server errors surface status and message") {
  StubEmbedServer server(16);
  server.mode = StubEmbedServer::Mode::ServerError;
  try {
    RemoteEmbedder(remote(server.endpoint())).embed(many_texts(4));
    FAIL("expected ServiceError");
  } catch (const ServiceError& e) {
    CHECK(e.status() == 500);
    CHECK(e.body() == "model crashed");
    CHECK(e.stage() == "embed");
  }
}

TEST_CASE("slow service times out") {
  StubEmbedServer server(16);
  server.delay = std::chrono::milliseconds(1500);
  auto cfg = remote(server.endpoint(), 4, 1);
  cfg.timeout = std::chrono::milliseconds(200);
  CHECK_THROWS_AS(RemoteEmbedder(cfg).embed(many_texts(2)), Timeout);
}

TEST_CASE("unreachable service is a provider error") {
  auto cfg = remote("http://127.0.0.1:1");
  cfg.timeout = std::chrono::milliseconds(300);
  CHECK_THROWS_AS(RemoteEmbedder(cfg).embed(many_texts(1)), EmbeddingError);
}

TEST_CASE("malformed responses are rejected") {
  StubEmbedServer server(16);
  using Mode = StubEmbedServer::Mode;
  server.mode = Mode::MalformedJson;
  CHECK_THROWS_AS(RemoteEmbedder(remote(server.endpoint())).embed(many_texts(3)), EmbeddingError);
  server.mode = Mode::WrongCount;
  CHECK_THROWS_AS(RemoteEmbedder(remote(server.endpoint())).embed(many_texts(3)), EmbeddingError);
  server.mode = Mode::WrongDim;
  CHECK_THROWS_AS(RemoteEmbedder(remote(server.endpoint())).embed(many_texts(3)), DimensionMismatch);
  server.mode = Mode::MissingDim;
  CHECK_THROWS_AS(RemoteEmbedder(remote(server.endpoint())).embed(many_texts(3)), EmbeddingError);
}

TEST_CASE("endpoint validation") {
  CHECK_THROWS_AS(RemoteEmbedder(remote("ftp://host")), ConfigError);
  CHECK_THROWS_AS(RemoteEmbedder(remote("")), ConfigError);
}
