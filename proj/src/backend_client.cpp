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

#include "trilingua/backend_client.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <thread>

#include "httplib.h"
#include "json.hpp"

namespace trilingua {

using nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 4> kRoleNames = {"translate_fwd", "translate_rev", "generate",
                                                        "embed"};
constexpr std::size_t kExcerptBytes = 200;

std::string excerpt(std::string_view payload) {
  if (payload.size() <= kExcerptBytes) {
    return std::string(payload);
  }
  // Back off to a UTF-8 boundary.
  std::size_t n = kExcerptBytes;
  while (n > 0 && (static_cast<unsigned char>(payload[n]) & 0xC0) == 0x80) {
    --n;
  }
  return std::string(payload.substr(0, n)) + "...";
}

// Splits "http://host:port/prefix" into the origin httplib wants and a path
// prefix.
std::pair<std::string, std::string> split_base_url(std::string_view url) {
  while (!url.empty() && url.back() == '/') {
    url.remove_suffix(1);
  }
  auto scheme = url.find("://");
  auto path_start = url.find('/', scheme == std::string_view::npos ? 0 : scheme + 3);
  if (path_start == std::string_view::npos) {
    return {std::string(url), ""};
  }
  return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

std::string error_message(const std::string& body) {
  auto j = ordered_json::parse(body, nullptr, false);
  if (j.is_object() && j.contains("error") && j["error"].is_string()) {
    return j["error"].get<std::string>();
  }
  return excerpt(body);
}

ordered_json parse_response(BackendRole role, const std::string& body, const char* field) {
  auto j = ordered_json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains(field)) {
    throw ProtocolError(role, 1, excerpt(body),
                        std::string("malformed response: expected field '") + field + "'");
  }
  return j[field];
}

std::size_t default_cap(BackendRole role) {
  switch (role) {
    case BackendRole::translate_fwd:
    case BackendRole::translate_rev:
      return 2048;
    case BackendRole::generate:
      return 3000;
    case BackendRole::embed:
      return 0;
  }
  return 0;
}

}  // namespace

std::string_view to_string(BackendRole role) { return kRoleNames[static_cast<std::size_t>(role)]; }

std::optional<BackendRole> parse_role(std::string_view name) {
  for (std::size_t i = 0; i < kRoleNames.size(); ++i) {
    if (kRoleNames[i] == name) {
      return static_cast<BackendRole>(i);
    }
  }
  return std::nullopt;
}

void BackendEndpoint::validate() const {
  const std::string who = "endpoint '" + std::string(to_string(role)) + "': ";
  if (base_url.empty()) {
    throw std::invalid_argument(who + "base_url is empty");
  }
  if (!(timeout_seconds > 0.0)) {
    throw std::invalid_argument(who + "timeout must be positive");
  }
  if (batch_size == 0) {
    throw std::invalid_argument(who + "batch_size must be at least 1");
  }
}

std::chrono::milliseconds RetryPolicy::delay(std::size_t attempt) const {
  double ms = static_cast<double>(base.count()) * std::pow(factor, static_cast<double>(attempt));
  ms = std::min(ms, static_cast<double>(cap.count()));
  if (jitter) {
    thread_local std::mt19937 rng{std::random_device{}()};
    ms *= std::uniform_real_distribution<double>(0.5, 1.0)(rng);
  }
  return std::chrono::milliseconds(static_cast<std::int64_t>(ms));
}

BackendError::BackendError(BackendRole role, std::size_t attempts, std::string excerpt,
                           const std::string& what)
    : std::runtime_error(std::string(to_string(role)) + " backend: " + what + " (attempts: " +
                         std::to_string(attempts) + ")"),
      role_(role),
      attempts_(attempts),
      excerpt_(std::move(excerpt)) {}

std::string translate_request_body(std::span<const std::string> texts, Lang src, Lang tgt,
                                   const DecodingPolicy& policy) {
  ordered_json j;
  j["src"] = to_string(src);
  j["tgt"] = to_string(tgt);
  j["texts"] = ordered_json::array();
  for (const auto& t : texts) {
    j["texts"].push_back(t);
  }
  j["max_new_tokens"] = policy.max_new_tokens;
  j["decoding"] = "greedy";
  return j.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

std::string generate_request_body(std::string_view prompt, const DecodingPolicy& policy) {
  ordered_json j;
  j["prompt"] = std::string(prompt);
  j["max_new_tokens"] = policy.max_new_tokens;
  j["decoding"] = "greedy";
  return j.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

std::string embed_request_body(std::span<const std::string> tokens) {
  ordered_json j;
  j["tokens"] = ordered_json::array();
  for (const auto& t : tokens) {
    j["tokens"].push_back(t);
  }
  return j.dump(-1, ' ', false, ordered_json::error_handler_t::replace);
}

BackendClient::BackendClient(BackendEndpoint endpoint, RetryPolicy retry, std::size_t max_new_tokens_cap)
    : endpoint_(std::move(endpoint)),
      retry_(retry),
      cap_(max_new_tokens_cap ? max_new_tokens_cap : default_cap(endpoint_.role)) {
  endpoint_.validate();
}

std::string BackendClient::post(std::string_view path, const std::string& body) const {
  const auto [origin, prefix] = split_base_url(endpoint_.base_url);
  const std::string full_path = prefix + std::string(path);
  const bool is_get = body.empty();
  const auto timeout = std::chrono::duration<double>(endpoint_.timeout_seconds);
  const auto timeout_us = std::chrono::duration_cast<std::chrono::microseconds>(timeout);

  std::string last_error;
  std::string last_excerpt = excerpt(body);
  const std::size_t attempts = endpoint_.max_retries + 1;
  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(retry_.delay(attempt - 1));
    }
    httplib::Client cli(origin);
    cli.set_connection_timeout(timeout_us);
    cli.set_read_timeout(timeout_us);
    cli.set_write_timeout(timeout_us);
    cli.set_keep_alive(false);

    auto res = is_get ? cli.Get(full_path) : cli.Post(full_path, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      return res->body;
    }
    last_excerpt = excerpt(res->body);
    last_error = "HTTP " + std::to_string(res->status) + ": " + error_message(res->body);
    if (res->status < 500) {
      throw BackendError(endpoint_.role, attempt + 1, last_excerpt, last_error);
    }
  }
  throw BackendError(endpoint_.role, attempts, last_excerpt, last_error);
}

std::vector<std::string> BackendClient::translate(std::span<const std::string> texts, Lang src,
                                                  Lang tgt, const DecodingPolicy& policy) const {
  if (texts.empty()) {
    throw std::invalid_argument("translate: no texts");
  }
  if (policy.max_new_tokens == 0 || policy.max_new_tokens > cap_) {
    throw std::invalid_argument("translate: max_new_tokens must be in [1, " + std::to_string(cap_) + "]");
  }
  std::vector<std::string> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += endpoint_.batch_size) {
    auto chunk = texts.subspan(start, std::min(endpoint_.batch_size, texts.size() - start));
    const auto body = post("/v1/translate", translate_request_body(chunk, src, tgt, policy));
    auto arr = parse_response(endpoint_.role, body, "translations");
    if (!arr.is_array() || !std::all_of(arr.begin(), arr.end(), [](const auto& v) { return v.is_string(); })) {
      throw ProtocolError(endpoint_.role, 1, excerpt(body), "malformed response: 'translations' must be an array of strings");
    }
    if (arr.size() != chunk.size()) {
      throw ProtocolError(endpoint_.role, 1, excerpt(body),
                          "length mismatch: sent " + std::to_string(chunk.size()) + ", received " +
                              std::to_string(arr.size()));
    }
    for (auto& v : arr) {
      out.push_back(v.get<std::string>());
    }
  }
  return out;
}

std::string BackendClient::generate(std::string_view prompt, const DecodingPolicy& policy) const {
  if (prompt.empty()) {
    throw std::invalid_argument("generate: empty prompt");
  }
  if (policy.max_new_tokens == 0 || policy.max_new_tokens > cap_) {
    throw std::invalid_argument("generate: max_new_tokens must be in [1, " + std::to_string(cap_) + "]");
  }
  const auto body = post("/v1/generate", generate_request_body(prompt, policy));
  auto completion = parse_response(endpoint_.role, body, "completion");
  if (!completion.is_string()) {
    throw ProtocolError(endpoint_.role, 1, excerpt(body), "malformed response: 'completion' must be a string");
  }
  return completion.get<std::string>();
}

std::vector<Embedding> BackendClient::embed(std::span<const std::string> tokens) const {
  if (tokens.empty()) {
    throw std::invalid_argument("embed: no tokens");
  }
  const auto body = post("/v1/embed", embed_request_body(tokens));
  auto arr = parse_response(endpoint_.role, body, "vectors");
  if (!arr.is_array()) {
    throw ProtocolError(endpoint_.role, 1, excerpt(body), "malformed response: 'vectors' must be an array");
  }
  if (arr.size() != tokens.size()) {
    throw ProtocolError(endpoint_.role, 1, excerpt(body),
                        "length mismatch: sent " + std::to_string(tokens.size()) + ", received " +
                            std::to_string(arr.size()));
  }
  std::vector<Embedding> out;
  out.reserve(arr.size());
  for (const auto& v : arr) {
    if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const auto& x) { return x.is_number(); })) {
      throw ProtocolError(endpoint_.role, 1, excerpt(body), "malformed response: vector must be numeric");
    }
    out.push_back(v.get<Embedding>());
    if (out.back().size() != out.front().size()) {
      throw ProtocolError(endpoint_.role, 1, excerpt(body), "inconsistent embedding dimensions");
    }
  }
  return out;
}

std::string BackendClient::health() const {
  const auto body = post("/v1/health", "");
  auto j = ordered_json::parse(body, nullptr, false);
  if (!j.is_object() || j.value("status", "") != "ok" || !j.contains("role") || !j["role"].is_string()) {
    throw ProtocolError(endpoint_.role, 1, excerpt(body), "unhealthy backend");
  }
  return j["role"].get<std::string>();
}

}  // namespace trilingua
