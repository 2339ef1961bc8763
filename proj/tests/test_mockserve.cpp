// Copyright 2026 The Trilingua Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "httplib.h"
#include "json.hpp"
#include "test_util.hpp"
#include "trilingua/mockserve.hpp"

namespace trilingua {
namespace {

using nlohmann::json;

std::string translate_body(const std::string& src, const std::string& tgt, const std::vector<std::string>& texts) {
  return json{{"src", src}, {"tgt", tgt}, {"texts", texts}, {"max_new_tokens", 2048}, {"decoding", "greedy"}}.dump();
}

TEST(MockHandler, IdentityStripsTag) {
  MockBehavior b;
  const auto r = handle_mock_request(b, "POST", "/v1/translate", translate_body("es", "en", {"<2en> hola"}), 0);
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(json::parse(r.body)["translations"][0], "hola");
}

TEST(MockHandler, TagPrefix) {
  auto b = resolve_behavior("tag_prefix");
  const auto r = handle_mock_request(b, "POST", "/v1/translate", translate_body("hi", "en", {"x", "<2en> y"}), 0);
  EXPECT_EQ(json::parse(r.body)["translations"], json({"[hi→en] x", "[hi→en] y"}));
}

TEST(MockHandler, Dictionary) {
  auto b = behavior_from_json(R"({"translator":"dictionary","dictionary":{"ताप":"fever"}})");
  const auto r = handle_mock_request(b, "POST", "/v1/translate", translate_body("hi", "en", {"<2en> ताप", "<2en> other"}), 0);
  EXPECT_EQ(json::parse(r.body)["translations"], json({"fever", "other"}));
}

TEST(MockHandler, EchoAndFixedGenerators) {
  MockBehavior echo;
  auto r = handle_mock_request(echo, "POST", "/v1/generate",
                               R"({"prompt":"P","max_new_tokens":10,"decoding":"greedy"})", 0);
  EXPECT_EQ(r.body, R"({"completion":"P"})");

  auto fixed = behavior_from_json(R"({"generator":"fixed","fixed":{")" + prompt_hash("P") + R"(":"answer"}})");
  r = handle_mock_request(fixed, "POST", "/v1/generate", R"({"prompt":"P","max_new_tokens":10,"decoding":"greedy"})", 0);
  EXPECT_EQ(r.body, R"({"completion":"answer"})");
  r = handle_mock_request(fixed, "POST", "/v1/generate", R"({"prompt":"Q","max_new_tokens":10,"decoding":"greedy"})", 0);
  EXPECT_EQ(r.body, R"({"completion":""})");
}

TEST(MockHandler, OutputIsCutToMaxNewTokens) {
  MockBehavior echo;
  auto r = handle_mock_request(echo, "POST", "/v1/generate",
                               R"({"prompt":"one two three four","max_new_tokens":2,"decoding":"greedy"})", 0);
  EXPECT_EQ(r.body, R"({"completion":"one two"})");
}

TEST(MockHandler, RejectsBadRequests) {
  MockBehavior b;
  EXPECT_EQ(handle_mock_request(b, "POST", "/v1/generate", "nope", 0).status, 400);
  EXPECT_EQ(handle_mock_request(b, "POST", "/v1/generate", R"({"prompt":"P","max_new_tokens":1,"decoding":"sample"})", 0).status,
            400);
  EXPECT_EQ(handle_mock_request(b, "POST", "/v1/embed", R"({"tokens":[1]})", 0).status, 400);
  EXPECT_EQ(handle_mock_request(b, "GET", "/v2/none", "", 0).status, 404);
}

TEST(MockHandler, FaultsFireAtExactCallIndices) {
  auto b = behavior_from_json(
      R"({"faults":[{"call":1,"kind":"http_503"},{"call":2,"kind":"malformed"},{"call":3,"kind":"http_400"}]})");
  const std::string body = R"({"prompt":"P","max_new_tokens":10,"decoding":"greedy"})";
  EXPECT_EQ(handle_mock_request(b, "POST", "/v1/generate", body, 0).status, 200);
  const auto r1 = handle_mock_request(b, "POST", "/v1/generate", body, 1);
  EXPECT_EQ(r1.status, 503);
  EXPECT_TRUE(json::parse(r1.body).contains("error"));
  EXPECT_EQ(handle_mock_request(b, "POST", "/v1/generate", body, 2).body, "this is not json");
  EXPECT_EQ(handle_mock_request(b, "POST", "/v1/generate", body, 3).status, 400);
  EXPECT_EQ(handle_mock_request(b, "POST", "/v1/generate", body, 4).status, 200);
}

TEST(HashEmbedding, DeterministicUnitVectors) {
  const auto a = hash_embedding("fever", 16);
  EXPECT_EQ(a, hash_embedding("fever", 16));
  EXPECT_NE(a, hash_embedding("cough", 16));
  double sq = 0;
  for (double x : a) sq += x * x;
  EXPECT_NEAR(std::sqrt(sq), 1.0, 1e-12);
}

TEST(Behavior, ParsingAndResolution) {
  EXPECT_EQ(resolve_behavior("identity").translator, MockTranslator::identity);
  EXPECT_THROW(behavior_from_json(R"({"bogus":1})"), std::invalid_argument);
  EXPECT_THROW(behavior_from_json(R"({"translator":"magic"})"), std::invalid_argument);
  EXPECT_THROW(behavior_from_json(R"({"faults":[{"call":0,"kind":"explode"}]})"), std::invalid_argument);
  testing::TempDir dir;
  testing::write_file(dir / "b.json", R"({"translator":"tag_prefix","embed_dim":4,"delay_ms":5})");
  const auto b = resolve_behavior((dir / "b.json").string());
  EXPECT_EQ(b.translator, MockTranslator::tag_prefix);
  EXPECT_EQ(b.embed_dim, 4u);
  EXPECT_EQ(b.delay, std::chrono::milliseconds(5));
}

TEST(MockServerTest, ServesAllEndpointsAndLogsCalls) {
  MockServer server(MockBehavior{});
  httplib::Client cli("127.0.0.1", server.port());
  auto h = cli.Get("/v1/health");
  ASSERT_TRUE(h);
  EXPECT_EQ(h->body, R"({"status":"ok","role":"mock"})");
  auto t = cli.Post("/v1/translate", translate_body("hi", "en", {"<2en> a"}), "application/json");
  ASSERT_TRUE(t);
  EXPECT_EQ(t->body, R"({"translations":["a"]})");
  auto e = cli.Post("/v1/embed", R"({"tokens":["a","a"]})", "application/json");
  ASSERT_TRUE(e);
  const auto v = json::parse(e->body)["vectors"];
  EXPECT_EQ(v[0], v[1]);
  EXPECT_EQ(v[0].size(), 16u);

  const auto log = server.call_log();
  ASSERT_EQ(log.size(), 3u);
  EXPECT_EQ(log[0].method, "GET");
  EXPECT_EQ(log[1].path, "/v1/translate");
  EXPECT_EQ(server.count("/v1/embed"), 1u);
  server.clear_log();
  EXPECT_TRUE(server.call_log().empty());
}

TEST(MockServerTest, EmbeddingsStableAcrossRestarts) {
  std::string first;
  for (int i = 0; i < 2; ++i) {
    MockServer server(MockBehavior{});
    httplib::Client cli("127.0.0.1", server.port());
    auto e = cli.Post("/v1/embed", R"({"tokens":["ताप","fever"]})", "application/json");
    ASSERT_TRUE(e);
    if (i == 0) {
      first = e->body;
    } else {
      EXPECT_EQ(e->body, first);
    }
  }
}

TEST(MockServerTest, PortInUseIsReported) {
  MockServer a(MockBehavior{});
  try {
    MockServer b(MockBehavior{}, a.port());
    FAIL() << "second bind succeeded";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("in use"), std::string::npos) << e.what();
  }
}

}  // namespace
}  // namespace trilingua
