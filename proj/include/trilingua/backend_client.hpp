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

#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "trilingua/corpus.hpp"
#include "trilingua/metrics.hpp"

namespace trilingua {

enum class BackendRole { translate_fwd, translate_rev, generate, embed };

std::string_view to_string(BackendRole role);
std::optional<BackendRole> parse_role(std::string_view name);

struct BackendEndpoint {
  BackendRole role = BackendRole::generate;
  std::string base_url;  // "http://host:port"
  double timeout_seconds = 60.0;
  std::size_t max_retries = 2;
  std::size_t batch_size = 8;

  void validate() const;
};

// Greedy is the only mode.
struct DecodingPolicy {
  std::size_t max_new_tokens = 0;
};

// Exponential backoff with jitter: attempt k (0-based) waits
// min(cap, base * factor^k) scaled by a uniform factor in [0.5, 1].
struct RetryPolicy {
  std::chrono::milliseconds base{200};
  double factor = 2.0;
  std::chrono::milliseconds cap{5000};
  bool jitter = true;

  std::chrono::milliseconds delay(std::size_t attempt) const;
};

// Failure talking to a backend after retries, or a non-retryable response.
class BackendError : public std::runtime_error {
 public:
  BackendError(BackendRole role, std::size_t attempts, std::string excerpt, const std::string& what);

  BackendRole role() const noexcept { return role_; }
  std::size_t attempts() const noexcept { return attempts_; }
  const std::string& excerpt() const noexcept { return excerpt_; }

 private:
  BackendRole role_;
  std::size_t attempts_;
  std::string excerpt_;
};

// Well-formed transport, malformed payload (bad JSON, length or dimension
// mismatch). Never retried.
class ProtocolError : public BackendError {
 public:
  using BackendError::BackendError;
};

// Request body builders; byte-exact with the wire protocol.
std::string translate_request_body(std::span<const std::string> texts, Lang src, Lang tgt,
                                   const DecodingPolicy& policy);
std::string generate_request_body(std::string_view prompt, const DecodingPolicy& policy);
std::string embed_request_body(std::span<const std::string> tokens);

// JSON-over-HTTP client for one backend role. Stateless between calls, so one
// instance may be shared by concurrent workers. Transport failures and 5xx
// responses are retried; 4xx and malformed responses fail immediately.
class BackendClient {
 public:
  // `max_new_tokens_cap` bounds policy.max_new_tokens; 0 selects the role
  // default (2048 for translation, 3000 for generation).
  explicit BackendClient(BackendEndpoint endpoint, RetryPolicy retry = {},
                         std::size_t max_new_tokens_cap = 0);

  const BackendEndpoint& endpoint() const noexcept { return endpoint_; }

  // Sends texts in chunks of batch_size; the result is index-aligned with
  // `texts`. Each text must already carry its language tag.
  std::vector<std::string> translate(std::span<const std::string> texts, Lang src, Lang tgt,
                                     const DecodingPolicy& policy) const;

  std::string generate(std::string_view prompt, const DecodingPolicy& policy) const;

  std::vector<Embedding> embed(std::span<const std::string> tokens) const;

  // GET /v1/health; returns the reported role.
  std::string health() const;

  std::size_t max_new_tokens_cap() const noexcept { return cap_; }

 private:
  std::string post(std::string_view path, const std::string& body) const;

  BackendEndpoint endpoint_;
  RetryPolicy retry_;
  std::size_t cap_;
};

}  // namespace trilingua
