// Copyright 2026 The typobench Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "fixture.hpp"
#include "typobench/error.hpp"
#include "typobench/hashing.hpp"
#include "typobench/providers.hpp"

using namespace typobench;
using nlohmann::json;

namespace {

double norm(const Embedding& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// A local sidecar double running on an ephemeral port.
class FakeSidecar {
 public:
  FakeSidecar() {
    server_.Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
      ++calls;
      last_body = json::parse(req.body);
      if (fail_status) {
        res.status = fail_status;
        res.set_content("boom", "text/plain");
        return;
      }
      if (delay_ms) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
      json vectors = json::array();
      for (std::size_t i = 0; i < last_body["texts"].size(); ++i) {
        // Norm 0.97, as a server with float rounding might send.
        vectors.push_back({0.97 * 0.6, 0.97 * 0.8, 0.0});
      }
      if (drop_one && !vectors.empty()) vectors.erase(vectors.size() - 1);
      res.set_content(json{{"vectors", vectors}, {"dim", 3}}.dump(), "application/json");
    });
    server_.Post("/embed_image", [this](const httplib::Request& req, httplib::Response& res) {
      ++calls;
      last_body = json::parse(req.body);
      res.set_content(json{{"vector", {0, 0, 2}}, {"dim", 3}}.dump(), "application/json");
    });
    server_.Post("/generate", [this](const httplib::Request& req, httplib::Response& res) {
      ++calls;
      last_body = json::parse(req.body);
      if (malformed) {
        res.set_content("{not json", "application/json");
        return;
      }
      res.set_content(json{{"text", "echo:" + last_body["prompt"].get<std::string>()}}.dump(),
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeSidecar() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> calls{0};
  json last_body;
  int fail_status = 0;
  int delay_ms = 0;
  bool drop_one = false;
  bool malformed = false;

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

// Counts calls and hands out fixed outputs, for cache tests.
class CountingGen final : public GenerationProvider {
 public:
  std::string generate(const GenerationRequest& r) override {
    ++calls;
    return r.prompt + "#" + std::to_string(r.attempt);
  }
  std::string identity() const override { return "counting"; }
  int calls = 0;
};

}  // namespace

TEST_SUITE("providers") {
  TEST_CASE("stub embeddings are unit, deterministic and seed dependent") {
    StubEmbeddingProvider a(16, 1), b(16, 1), c(16, 2);
    const std::vector<std::string> texts = {"cat", "Cat!", "dog"};
    const auto va = a.embed_texts(texts);
    CHECK(va.size() == 3);
    for (const auto& v : va) CHECK(norm(v) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(va[0] == va[1]);  // normalized key
    CHECK(va[0] != va[2]);
    CHECK(va == b.embed_texts(texts));
    CHECK(va[0] != c.embed_text("cat"));
    CHECK(a.embed_image("x.png") == b.embed_image("x.png"));
    CHECK(a.embed_image("x.png") != a.embed_text("x.png"));
  }

  TEST_CASE("dictionary fixtures") {
    typobench::testing::TempDir dir;
    std::ofstream(dir / "d.json") << R"({"texts":{"cat":[3,4]},"images":{"i.png":[0,2]}})";
    auto d = StubEmbeddingProvider::from_dictionary_file(dir / "d.json");
    CHECK(d.dimension() == 2);
    CHECK(d.embed_text("cat")[0] == doctest::Approx(0.6));
    CHECK(d.embed_text("cat")[1] == doctest::Approx(0.8));
    CHECK(d.embed_image("i.png") == Embedding{0, 1});
    std::ofstream(dir / "bad.json") << R"({"cat":[1,2],"dog":[1,2,3]})";
    CHECK_THROWS_AS(StubEmbeddingProvider::from_dictionary_file(dir / "bad.json"),
                    ValidationError);
  }

  TEST_CASE("cosine and normalization") {
    CHECK(cosine(Embedding{1, 0}, Embedding{0, 1}) == 0.0);
    CHECK(cosine(Embedding{1, 0}, Embedding{1, 0}) == 1.0);
    CHECK_THROWS_AS(cosine(Embedding{1, 0}, Embedding{1, 0, 0}), ProviderError);
    Embedding z{0, 0};
    CHECK_THROWS_AS(normalize_l2(z), ProviderError);
  }

  TEST_CASE("class embedder averages templates") {
    StubEmbeddingProvider dict(2, 0);
    dict.add_text("a cat", {1, 0});
    dict.add_text("the cat", {0, 1});
    ClassEmbedder e(dict, {"a {}", "the {}"});
    const auto& v = e.embed("cat");
    CHECK(v[0] == doctest::Approx(std::sqrt(0.5)));
    CHECK(v[1] == doctest::Approx(std::sqrt(0.5)));
    CHECK(expand_template("a photo of a {}.", "dog") == "a photo of a dog.");
    CHECK_THROWS_AS(ClassEmbedder(dict, {"no placeholder"}), ValidationError);
  }

  TEST_CASE("stub generator answers in the wire format") {
    StubGenerationProvider g;
    const auto r1 = g.generate({"prompt", 32, 0});
    CHECK(json::parse(r1).contains("misleading"));
    CHECK(r1 == g.generate({"prompt", 32, 0}));
  }

  TEST_CASE("HTTP embedding client speaks the protocol") {
    FakeSidecar sidecar;
    HttpEmbeddingClient client(sidecar.endpoint());
    const std::vector<std::string> texts = {"cat", "dog"};
    const auto v = client.embed_texts(texts);
    CHECK(sidecar.last_body == json{{"texts", texts}});
    REQUIRE(v.size() == 2);
    CHECK(norm(v[0]) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(v[0][0] == doctest::Approx(0.6));
    CHECK(client.dimension() == 3);

    typobench::testing::TempDir dir;
    std::ofstream(dir / "img.bin", std::ios::binary) << "PNGDATA";
    const auto iv = client.embed_image((dir / "img.bin").string());
    CHECK(iv == Embedding{0, 0, 1});
    CHECK(sidecar.last_body == json{{"image_b64", base64_encode("PNGDATA")}});

    HttpOptions by_path;
    by_path.image_payload = ImagePayload::path;
    HttpEmbeddingClient path_client(sidecar.endpoint(), by_path);
    path_client.embed_image("/data/x.jpg");
    CHECK(sidecar.last_body == json{{"path", "/data/x.jpg"}});
  }

  TEST_CASE("HTTP errors become provider errors") {
    FakeSidecar sidecar;
    HttpEmbeddingClient client(sidecar.endpoint());
    const std::vector<std::string> texts = {"cat", "dog"};

    sidecar.fail_status = 500;
    try {
      client.embed_texts(texts);
      FAIL("expected an error");
    } catch (const ProviderError& e) {
      CHECK(e.kind() == ProviderError::Kind::http_status);
    }
    sidecar.fail_status = 0;

    sidecar.drop_one = true;
    CHECK_THROWS_AS(client.embed_texts(texts), ProviderError);
    sidecar.drop_one = false;

    sidecar.delay_ms = 400;
    HttpOptions fast;
    fast.timeout = std::chrono::milliseconds(100);
    HttpEmbeddingClient impatient(sidecar.endpoint(), fast);
    try {
      impatient.embed_texts(texts);
      FAIL("expected a timeout");
    } catch (const ProviderError& e) {
      CHECK(e.kind() == ProviderError::Kind::timeout);
    }
    sidecar.delay_ms = 0;

    HttpEmbeddingClient nowhere("http://127.0.0.1:1");
    CHECK_THROWS_AS(nowhere.embed_texts(texts), ProviderError);
  }

  TEST_CASE("HTTP generation client") {
    FakeSidecar sidecar;
    HttpGenerationClient client(sidecar.endpoint());
    CHECK(client.generate({"hello", 16, 2}) == "echo:hello");
    CHECK(sidecar.last_body == json{{"prompt", "hello"}, {"max_tokens", 16}});
    sidecar.malformed = true;
    try {
      client.generate({"hello", 16, 0});
      FAIL("expected an error");
    } catch (const ProviderError& e) {
      CHECK(e.kind() == ProviderError::Kind::malformed);
    }
  }

  TEST_CASE("response cache") {
    typobench::testing::TempDir dir;
    ResponseCache cache(dir.path());
    const auto k1 = ResponseCache::key("embed", json{{"a", 1}, {"b", 2}});
    const auto k2 = ResponseCache::key("embed", json{{"b", 2}, {"a", 1}});
    CHECK(k1 == k2);
    CHECK(k1 != ResponseCache::key("generate", json{{"a", 1}, {"b", 2}}));
    CHECK_FALSE(cache.get(k1));
    cache.put(k1, json{{"x", 1}});
    CHECK(cache.get(k1) == json{{"x", 1}});

    auto inner = std::make_shared<CountingGen>();
    CachedGenerationProvider gen(inner, ResponseCache(dir.path()));
    CHECK(gen.generate({"p", 8, 0}) == "p#0");
    CHECK(gen.generate({"p", 8, 0}) == "p#0");
    CHECK(gen.generate({"p", 8, 1}) == "p#1");
    CHECK(inner->calls == 2);

    auto stub = std::make_shared<StubEmbeddingProvider>(8, 3);
    CachedEmbeddingProvider emb(stub, ResponseCache(dir.path()));
    const std::vector<std::string> texts = {"a", "b"};
    CHECK(emb.embed_texts(texts) == stub->embed_texts(texts));
    CHECK(emb.embed_texts(texts) == stub->embed_texts(texts));
  }

  TEST_CASE("cached client skips the server on replay") {
    FakeSidecar sidecar;
    typobench::testing::TempDir dir;
    auto http = std::make_shared<HttpEmbeddingClient>(sidecar.endpoint());
    CachedEmbeddingProvider emb(http, ResponseCache(dir.path()));
    const std::vector<std::string> texts = {"cat"};
    const auto first = emb.embed_texts(texts);
    const int after_first = sidecar.calls;
    CHECK(emb.embed_texts(texts) == first);
    CHECK(sidecar.calls == after_first);
  }
}
